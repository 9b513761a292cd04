import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groundlab.errors import (
    EmptyInstance,
    IncompleteTable,
    MalformedHeader,
    UnsupportedNode,
    UnterminatedClause,
    VariableOutOfRange,
)
from groundlab.paulis import StateVector, diagonal_of, expectation, realize_dense
from groundlab.pseudobool import (
    CnfInstance,
    Formula,
    PseudoBooleanPoly,
    SpinPoly,
    canonical_expand,
    cnf_to_hamiltonian,
    embed_formula,
    from_spin,
    kernel_embed,
    number_partition,
    operator_to_pseudo,
    parse_dimacs,
    pseudo_to_operator,
    random_ksat,
    to_spin,
)


def bits_of(idx, n):
    return [(idx >> (n - 1 - j)) & 1 for j in range(n)]


class TestCanonicalExpand:
    def test_bell_indicator(self):
        table = {(a, b): 1 - (a - b) ** 2 for a in (0, 1) for b in (0, 1)}
        poly = canonical_expand(table)
        assert poly.coeffs == {(): 1.0, (0,): -1.0, (1,): -1.0, (0, 1): 2.0}

    def test_path_graph_amplitudes(self):
        # signs of the three-qubit graph state: 1 - 2xy - 2yz + 4xyz
        table = {}
        for x in (0, 1):
            for y in (0, 1):
                for z in (0, 1):
                    table[(x, y, z)] = 1 - 2 * (x * y) - 2 * (y * z) + 4 * (x * y * z)
        poly = canonical_expand(table)
        assert poly.coeffs == {(): 1.0, (0, 1): -2.0, (1, 2): -2.0, (0, 1, 2): 4.0}

    def test_all_zero(self):
        assert canonical_expand(np.zeros(8), 3).coeffs == {}

    def test_reproduces_table(self):
        rng = np.random.default_rng(0)
        table = rng.normal(size=16)
        poly = canonical_expand(table, 4)
        assert np.abs(poly.evaluate_all() - table).max() < 1e-12

    def test_incomplete_table(self):
        with pytest.raises(IncompleteTable):
            canonical_expand(np.zeros(7), 3)

    def test_grading_bounds(self):
        from math import comb

        rng = np.random.default_rng(1)
        poly = canonical_expand(rng.normal(size=32), 5)
        for d in range(6):
            count = sum(1 for k in poly.coeffs if len(k) == d)
            assert count <= comb(5, d)
        assert len(poly.coeffs) <= 32


class TestPseudoToOperator:
    def test_single_variable_is_projector(self):
        op = pseudo_to_operator(PseudoBooleanPoly.variable(1, 0))
        assert op.coefficient("I") == pytest.approx(0.5)
        assert op.coefficient("Z") == pytest.approx(-0.5)

    def test_equality_penalty_expansion(self):
        poly = PseudoBooleanPoly(2, {(): 1, (0,): -1, (1,): -1, (0, 1): 2})
        op = pseudo_to_operator(poly)
        assert np.allclose(diagonal_of(op), [1, 0, 0, 1])

    def test_zero_polynomial(self):
        assert pseudo_to_operator(PseudoBooleanPoly(3)).cardinality() == 0

    def test_diagonal_matches_pointwise_evaluation(self):
        rng = np.random.default_rng(3)
        for n in (2, 4, 6):
            poly = canonical_expand(rng.normal(size=1 << n), n)
            assert np.abs(diagonal_of(pseudo_to_operator(poly)) - poly.evaluate_all()).max() < 1e-10

    def test_round_trip_through_operator(self):
        rng = np.random.default_rng(4)
        poly = canonical_expand(rng.normal(size=16), 4)
        back = operator_to_pseudo(pseudo_to_operator(poly))
        for key, val in poly.coeffs.items():
            assert back.coeffs[key] == pytest.approx(val, abs=1e-12)


class TestFormulaEmbedding:
    def test_and_spectrum(self):
        op = embed_formula(Formula.var(0) & Formula.var(1))
        assert sorted(diagonal_of(op)) == pytest.approx([0, 0, 0, 1])

    def test_negation_is_p0(self):
        op = embed_formula(~Formula.var(0), 1)
        assert op.coefficient("I") == pytest.approx(0.5)
        assert op.coefficient("Z") == pytest.approx(0.5)

    def test_or_counts_satisfied_disjuncts(self):
        op = embed_formula(Formula.var(0) | Formula.var(1))
        assert sorted(diagonal_of(op)) == pytest.approx([0, 1, 1, 2])

    def test_clause_projector_form(self):
        # x0 ∨ ¬x1 ∨ x2 kernel-embedded penalty = |0><0| ⊗ |1><1| ⊗ |0><0|
        clause = Formula.var(0) | ~Formula.var(1) | Formula.var(2)
        op = kernel_embed(clause, 3)
        diag = diagonal_of(op)
        want = np.zeros(8)
        want[0b010] = 1.0
        assert np.allclose(diag, want)

    def test_kernel_embed_and(self):
        op = kernel_embed(Formula.var(0) & Formula.var(1))
        assert np.allclose(diagonal_of(op), [1, 1, 1, 0])

    def test_kernel_embed_nonnegative_integer(self):
        rng = np.random.default_rng(5)
        f = (Formula.var(0) | ~Formula.var(2)) & (Formula.var(1) | Formula.var(3))
        diag = diagonal_of(kernel_embed(f, 4))
        assert diag.min() >= -1e-10
        assert np.abs(diag - np.round(diag)).max() < 1e-10

    def test_tautology_gives_zero_operator(self):
        op = kernel_embed(Formula.var(0) | ~Formula.var(0), 1)
        assert op.cardinality() == 0

    def test_xor_node_rejected(self):
        bogus = Formula("xor", (Formula.var(0), Formula.var(1)))
        with pytest.raises(UnsupportedNode):
            embed_formula(bogus, 2)

    def test_formula_json_round_trip(self):
        f = (Formula.var(0) & ~Formula.var(1)) | Formula.const(1)
        back = Formula.from_json_dict(f.to_json_dict())
        for idx in range(4):
            assert back.evaluate(bits_of(idx, 2)) == f.evaluate(bits_of(idx, 2))


class TestSpinTransform:
    def test_and_penalty_polarity(self):
        # Δ(x3 + x1x2 - 2x1x2x3) -> (Δ/4)(2 - s3 - s1s3 - s2s3 + s1s2s3)
        delta = 2.0
        poly = PseudoBooleanPoly(3, {(2,): delta, (0, 1): delta, (0, 1, 2): -2 * delta})
        spin = to_spin(poly)
        assert spin.coeffs[()] == pytest.approx(delta / 2)
        assert spin.coeffs[(2,)] == pytest.approx(-delta / 4)
        assert spin.coeffs[(0, 2)] == pytest.approx(-delta / 4)
        assert spin.coeffs[(1, 2)] == pytest.approx(-delta / 4)
        assert spin.coeffs[(0, 1, 2)] == pytest.approx(delta / 4)

    def test_single_variable(self):
        spin = to_spin(PseudoBooleanPoly.variable(1, 0))
        assert spin.coeffs == {(): 0.5, (0,): -0.5}

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31 - 1))
    def test_round_trip_random_cubics(self, seed):
        rng = np.random.default_rng(seed)
        poly = PseudoBooleanPoly(4)
        for _ in range(6):
            size = int(rng.integers(0, 4))
            key = tuple(sorted(rng.choice(4, size, replace=False).tolist()))
            poly.add_term(key, float(rng.normal()))
        back = from_spin(to_spin(poly))
        keys = set(poly.coeffs) | set(back.coeffs)
        for key in keys:
            assert back.coeffs.get(key, 0.0) == pytest.approx(poly.coeffs.get(key, 0.0), abs=1e-12)

    def test_evaluation_agreement(self):
        rng = np.random.default_rng(8)
        poly = canonical_expand(rng.normal(size=8), 3)
        spin = to_spin(poly)
        for idx in range(8):
            bits = bits_of(idx, 3)
            spins = [1 - 2 * b for b in bits]
            assert spin.evaluate(spins) == pytest.approx(poly.evaluate(bits), abs=1e-12)

    def test_z2_symmetry_of_pure_zz(self):
        # [X̃, H] = 0 for H of pure ZZ type
        rng = np.random.default_rng(13)
        spin = SpinPoly(4)
        for i in range(4):
            for j in range(i + 1, 4):
                spin.add_term((i, j), float(rng.normal()))
        h = realize_dense(spin.to_operator())
        xall = np.eye(1)
        x = np.array([[0, 1], [1, 0]])
        for _ in range(4):
            xall = np.kron(xall, x)
        assert np.abs(xall @ h - h @ xall).max() < 1e-10


class TestDimacs:
    def test_basic(self):
        inst = parse_dimacs("c hi\np cnf 2 1\n1 -2 0\n")
        assert inst.n == 2
        assert inst.clauses == [((0, 1), (1, 0))]

    def test_comments_only(self):
        with pytest.raises(EmptyInstance):
            parse_dimacs("c nothing\nc here\n")

    def test_variable_out_of_range(self):
        with pytest.raises(VariableOutOfRange):
            parse_dimacs("p cnf 2 1\n3 0\n")

    def test_unterminated(self):
        with pytest.raises(UnterminatedClause):
            parse_dimacs("p cnf 2 1\n1 -2\n")

    def test_bad_header(self):
        with pytest.raises(MalformedHeader):
            parse_dimacs("p dnf 2 1\n1 0\n")

    def test_clause_count_mismatch(self):
        with pytest.raises(MalformedHeader):
            parse_dimacs("p cnf 2 2\n1 0\n")

    def test_round_trip(self):
        inst = random_ksat(6, 10, 3, np.random.default_rng(0))
        back = parse_dimacs(inst.to_dimacs())
        assert back.n == inst.n
        assert back.clauses == [tuple(c) for c in inst.clauses]


class TestCnfHamiltonian:
    def test_worked_satisfiable_instance(self):
        # (x1∨¬x3∨x4)(¬x2∨x3∨¬x4)(¬x1∨x2∨x3): assignment 0,0,0,· has energy 0
        inst = parse_dimacs("p cnf 4 3\n1 -3 4 0\n-2 3 -4 0\n-1 2 3 0\n")
        diag = diagonal_of(cnf_to_hamiltonian(inst))
        assert diag[0b0000] == pytest.approx(0.0, abs=1e-12)
        assert diag[0b0001] == pytest.approx(0.0, abs=1e-12)

    def test_empty_clause_list(self):
        assert cnf_to_hamiltonian(CnfInstance(3, [])).cardinality() == 0

    def test_uniform_state_expectation(self):
        inst = CnfInstance(3, [((0, 1), (1, 1), (2, 1))])
        h = cnf_to_hamiltonian(inst)
        assert expectation(h, StateVector.uniform(3)) == pytest.approx(1 / 8)

    def test_counts_violations(self):
        rng = np.random.default_rng(21)
        inst = random_ksat(6, 14, 3, rng)
        diag = diagonal_of(cnf_to_hamiltonian(inst))
        for idx in range(64):
            assert diag[idx] == pytest.approx(inst.violations(bits_of(idx, 6)), abs=1e-10)

    def test_rank_one_projector_per_clause(self):
        inst = CnfInstance(3, [((0, 1), (1, 0), (2, 1))])
        h = realize_dense(cnf_to_hamiltonian(inst))
        assert np.linalg.matrix_rank(h) == 1


class TestNumberPartition:
    @staticmethod
    def brute_minimum(values):
        spin = number_partition(values)
        n = len(values)
        best = None
        for idx in range(1 << n):
            spins = [1 if (idx >> k) & 1 else -1 for k in range(n)]
            val = spin.evaluate(spins)
            best = val if best is None else min(best, val)
        return best

    def test_balanced_pair(self):
        assert self.brute_minimum([1, 1]) == 0

    def test_one_two_three(self):
        assert self.brute_minimum([1, 2, 3]) == 0

    def test_one_two(self):
        assert self.brute_minimum([1, 2]) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            number_partition([])


class TestRandomKsat:
    def test_no_repeated_variables(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            inst = random_ksat(8, 20, 3, rng)
            for clause in inst.clauses:
                names = [i for i, _ in clause]
                assert len(set(names)) == len(names) == 3

    def test_seed_reproducible(self):
        a = random_ksat(10, 30, 3, 42)
        b = random_ksat(10, 30, 3, 42)
        assert a.clauses == b.clauses
