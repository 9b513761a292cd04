import itertools

import numpy as np
import pytest

from groundlab.errors import KTooSmall, NonpositiveDelta, TooLarge
from groundlab.paulis import diagonal_of
from groundlab.pseudobool import pseudo_to_operator
from groundlab.reductions import (
    Infeasible,
    QuadraticPenalty,
    TargetKernel,
    and_gadget,
    copy_gadget,
    cubic_product_gadget,
    synthesize_penalty,
    xor_chain,
)

AND_KERNEL = {(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)}
XOR_KERNEL = {b for b in itertools.product((0, 1), repeat=3) if (b[0] ^ b[1]) == b[2]}


def all_bits(n):
    return list(itertools.product((0, 1), repeat=n))


class TestAndGadget:
    def test_table_energies(self):
        delta = 2.5
        g = and_gadget(delta)
        want = [0, 3 * delta, 0, delta, 0, delta, delta, 0]
        got = [g.energy(b) for b in all_bits(3)]
        assert got == pytest.approx(want)

    def test_kernel_matches_and(self):
        g = and_gadget(1.0)
        zero = {b for b in all_bits(3) if g.energy(b) == 0}
        assert zero == AND_KERNEL

    def test_rejects_nonpositive_delta(self):
        with pytest.raises(NonpositiveDelta):
            and_gadget(0.0)

    def test_bitflip_maps_to_or_family(self):
        # X^⊗n conjugation complements every bit: AND kernel -> OR kernel
        g = and_gadget(1.0)
        flipped = {tuple(1 - b for b in bits) for bits in all_bits(3) if g.energy(bits) == 0}
        or_kernel = {(a, b, int(a | b)) for a in (0, 1) for b in (0, 1)}
        assert flipped == or_kernel


class TestCopyGadget:
    def test_energies(self):
        g = copy_gadget()
        assert g.energy((0, 0, 0)) == 0
        assert g.energy((1, 1, 1)) == 0
        assert g.energy((1, 0, 0)) == 2

    def test_kernel_is_repetition_code(self):
        g = copy_gadget()
        zero = {b for b in all_bits(3) if g.energy(b) == 0}
        assert zero == {(0, 0, 0), (1, 1, 1)}


class TestCubicGadgets:
    @pytest.mark.parametrize("variant", ["A", "B"])
    def test_reproduces_negative_product(self, variant):
        g = cubic_product_gadget(variant)
        for bits in all_bits(3):
            value, _ = g.min_over_slack(bits)
            assert value == -(bits[0] * bits[1] * bits[2])

    def test_variants_agree(self):
        ga, gb = cubic_product_gadget("A"), cubic_product_gadget("B")
        for bits in all_bits(3):
            assert ga.min_over_slack(bits)[0] == gb.min_over_slack(bits)[0]

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            cubic_product_gadget("C")


class TestPenaltyRealization:
    def test_diagonal_nonnegative_after_shift(self):
        for g in (and_gadget(1.0), copy_gadget(), cubic_product_gadget("A")):
            diag = diagonal_of(pseudo_to_operator(g.as_pseudobool()))
            assert diag.min() >= min(g.energy(b) for b in all_bits(g.n)) - 1e-12
            shifted = diag - diag.min()
            assert shifted.min() >= -1e-12

    def test_ground_space_matches_energy_table(self):
        g = and_gadget(1.0)
        diag = diagonal_of(pseudo_to_operator(g.as_pseudobool()))
        table = np.array([g.energy(b) for b in all_bits(3)], dtype=float)
        assert np.allclose(diag, table)

    def test_json_round_trip(self):
        g = and_gadget(1.5)
        back = QuadraticPenalty.from_json_dict(g.to_json_dict())
        for bits in all_bits(3):
            assert back.energy(bits) == pytest.approx(g.energy(bits))


class TestSynthesizePenalty:
    def test_and_kernel_feasible_without_slack(self):
        result = synthesize_penalty(TargetKernel(3, AND_KERNEL), 0)
        assert isinstance(result, QuadraticPenalty)
        zero = {b for b in all_bits(3) if result.energy(b) == 0}
        assert zero == AND_KERNEL
        for bits in all_bits(3):
            if bits not in AND_KERNEL:
                assert result.energy(bits) >= 1

    def test_xor_infeasible_without_slack(self):
        result = synthesize_penalty(TargetKernel(3, XOR_KERNEL), 0)
        assert isinstance(result, Infeasible)
        assert result.patterns_tried >= 1
        assert "infeasible" in result.detail

    def test_xor_feasible_with_one_mediator(self):
        result = synthesize_penalty(TargetKernel(3, XOR_KERNEL), 1)
        assert isinstance(result, QuadraticPenalty)
        for bits in all_bits(3):
            value, _ = result.min_over_slack(bits)
            if bits in XOR_KERNEL:
                assert value == 0
            else:
                assert value >= 1

    def test_equivalence_kernel_with_one_mediator(self):
        eqv = {b for b in all_bits(3) if (1 - (b[0] ^ b[1])) == b[2]}
        result = synthesize_penalty(TargetKernel(3, eqv), 1)
        assert isinstance(result, QuadraticPenalty)
        for bits in all_bits(3):
            value, _ = result.min_over_slack(bits)
            assert (value == 0) == (bits in eqv)

    def test_all_two_bit_functions_without_slack(self):
        # of the 16 two-input gates only XOR and EQV need a mediator
        functions = []
        for code in range(16):
            table = {(a, b): (code >> (2 * a + b)) & 1 for a in (0, 1) for b in (0, 1)}
            functions.append(table)
        infeasible = []
        for code, table in enumerate(functions):
            kernel = {(a, b, v) for (a, b), v in table.items()}
            result = synthesize_penalty(TargetKernel(3, kernel), 0)
            if isinstance(result, Infeasible):
                infeasible.append(code)
        # XOR truth table code: f(a,b) = a^b -> bits (00->0,01->1,10->1,11->0)
        xor_code = sum(((a ^ b) << (2 * a + b)) for a in (0, 1) for b in (0, 1))
        eqv_code = sum(((1 - (a ^ b)) << (2 * a + b)) for a in (0, 1) for b in (0, 1))
        assert sorted(infeasible) == sorted([xor_code, eqv_code])

    def test_margin_scales_with_delta(self):
        kernel = TargetKernel(2, {(0, 0), (1, 1)}, delta=3)
        result = synthesize_penalty(kernel, 0)
        assert isinstance(result, QuadraticPenalty)
        for bits in all_bits(2):
            if bits not in kernel.accepted:
                assert result.energy(bits) >= 3

    def test_size_guard(self):
        with pytest.raises(TooLarge):
            synthesize_penalty(TargetKernel(4, {(0, 0, 0, 0)}), 2)

    def test_rational_coefficients(self):
        from fractions import Fraction

        result = synthesize_penalty(TargetKernel(3, AND_KERNEL), 0)
        values = [result.k0, *result.linear.values(), *result.quadratic.values()]
        assert all(isinstance(v, Fraction) for v in values)


class TestXorChain:
    def test_too_small(self):
        with pytest.raises(KTooSmall):
            xor_chain(2)

    def test_k3_single_block(self):
        net = xor_chain(3)
        assert net.n_slack == 1  # one mediator, no auxiliaries
        for bits in all_bits(3):
            value, _ = net.min_over_slack(bits)
            assert (value == 0) == (sum(bits) % 2 == 0)

    def test_k4_structure(self):
        net = xor_chain(4)
        # one auxiliary y1 = s1 ⊕ s2 plus two mediated blocks
        assert net.n_slack == 1 + 2

    @pytest.mark.parametrize("k", [3, 4, 5, 6, 7, 8])
    def test_ground_space_encodes_parity(self, k):
        net = xor_chain(k)
        for bits in all_bits(k):
            value, _ = net.min_over_slack(bits)
            parity_holds = bits[-1] == (sum(bits[:-1]) % 2)
            if parity_holds:
                assert value == 0
            else:
                assert value >= 1
