"""Pseudo-Boolean ring and its diagonal-operator embedding.

Multilinear 0/1 polynomials (x_i^2 = x_i) in canonical form, Boolean formulas,
DIMACS CNF instances, and the affine spin picture s_i = 1 - 2x_i.  Everything
here lands in diagonal Hamiltonians over {1, Z} words.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    EmptyInstance,
    IncompleteTable,
    InvalidClause,
    MalformedHeader,
    UnsupportedNode,
    UnterminatedClause,
    VariableOutOfRange,
)
from .paulis import OperatorSum, PauliString

ENUM_LIMIT = 20  # variables; exhaustive 2^n paths refuse beyond this


class PseudoBooleanPoly:
    """Multilinear polynomial {0,1}^n -> R with coefficients on index subsets.

    ``coeffs`` maps sorted index tuples (the empty tuple is the constant) to
    values; values may be floats or exact Fractions for penalty synthesis.
    """

    def __init__(self, n: int, coeffs=None):
        self.n = n
        self.coeffs: dict[tuple, object] = {}
        if coeffs:
            for key, value in dict(coeffs).items():
                self.set(key, value)

    def set(self, key, value) -> "PseudoBooleanPoly":
        key = tuple(sorted(key))
        if len(set(key)) != len(key):
            raise ValueError("repeated index in a multilinear monomial")
        if any(i < 0 or i >= self.n for i in key):
            raise ValueError("variable index out of range")
        if value == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = value
        return self

    def add_term(self, key, value) -> "PseudoBooleanPoly":
        key = tuple(sorted(key))
        return self.set(key, self.coeffs.get(key, 0) + value)

    @classmethod
    def zero(cls, n: int) -> "PseudoBooleanPoly":
        return cls(n)

    @classmethod
    def constant(cls, n: int, value) -> "PseudoBooleanPoly":
        return cls(n, {(): value} if value != 0 else {})

    @classmethod
    def variable(cls, n: int, i: int) -> "PseudoBooleanPoly":
        return cls(n, {(i,): 1})

    def copy(self) -> "PseudoBooleanPoly":
        return PseudoBooleanPoly(self.n, self.coeffs)

    def degree(self) -> int:
        return max((len(k) for k in self.coeffs), default=0)

    def __add__(self, other):
        other = self._coerce(other)
        out = self.copy()
        for k, v in other.coeffs.items():
            out.add_term(k, v)
        return out

    def __sub__(self, other):
        return self + (-1) * self._coerce(other)

    def __rmul__(self, scalar):
        return PseudoBooleanPoly(self.n, {k: scalar * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        """Product with idempotence reduction (x_i^2 = x_i)."""
        other = self._coerce(other)
        out = PseudoBooleanPoly(self.n)
        for ka, va in self.coeffs.items():
            for kb, vb in other.coeffs.items():
                out.add_term(tuple(set(ka) | set(kb)), va * vb)
        return out

    def _coerce(self, other) -> "PseudoBooleanPoly":
        if isinstance(other, PseudoBooleanPoly):
            if other.n != self.n:
                raise ValueError("variable counts differ")
            return other
        return PseudoBooleanPoly.constant(self.n, other)

    def evaluate(self, bits) -> float:
        total = 0
        for key, value in self.coeffs.items():
            prod = value
            for i in key:
                if not bits[i]:
                    prod = 0
                    break
            total += prod
        return total

    def evaluate_all(self) -> np.ndarray:
        """Values on every bitstring, indexed by integer with bit 0 = MSB."""
        if self.n > ENUM_LIMIT:
            raise ValueError(f"n = {self.n} exceeds enumeration limit")
        dim = 1 << self.n
        vals = np.zeros(dim)
        idx = np.arange(dim)
        for key, value in self.coeffs.items():
            mask = 0
            for i in key:
                mask |= 1 << (self.n - 1 - i)
            vals[(idx & mask) == mask] += float(value)
        return vals

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "coeffs": [{"vars": list(k), "c": float(v)} for k, v in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "PseudoBooleanPoly":
        return cls(d["n"], {tuple(t["vars"]): t["c"] for t in d["coeffs"]})

    def __repr__(self):
        return f"PseudoBooleanPoly(n={self.n}, terms={len(self.coeffs)})"


def canonical_expand(table, n: int | None = None) -> PseudoBooleanPoly:
    """Unique multilinear polynomial reproducing a complete truth-value table.

    ``table`` maps bit tuples to values, or is a length-2^n array indexed with
    bit 0 as the most significant bit.  Möbius transform over subsets.
    """
    if isinstance(table, dict):
        if n is None:
            n = len(next(iter(table)))
        if len(table) != (1 << n):
            raise IncompleteTable(f"expected {1 << n} entries, got {len(table)}")
        flat = np.zeros(1 << n)
        for bits, value in table.items():
            idx = 0
            for b in bits:
                idx = (idx << 1) | int(b)
            flat[idx] = value
    else:
        flat = np.asarray(table, dtype=float)
        if n is None:
            n = int(flat.size).bit_length() - 1
        if flat.size != (1 << n):
            raise IncompleteTable(f"expected {1 << n} entries, got {flat.size}")
    if n > ENUM_LIMIT:
        raise IncompleteTable(f"n = {n} exceeds enumeration limit")
    # subset Möbius transform along each variable axis
    coeff = flat.reshape((2,) * n).copy() if n else flat.copy()
    for axis in range(n):
        view = np.moveaxis(coeff, axis, 0)
        view[1] -= view[0]
    coeff = coeff.reshape(-1)
    poly = PseudoBooleanPoly(n)
    for idx in np.nonzero(coeff)[0]:
        key = tuple(j for j in range(n) if idx & (1 << (n - 1 - j)))
        poly.set(key, float(coeff[idx]))
    return poly


def pseudo_to_operator(f: PseudoBooleanPoly) -> OperatorSum:
    """Diagonal operator with H|x> = f(x)|x>, expanded over {1, Z} words.

    Each monomial Π_{i in S} x_i maps through x_i -> (1 - Z_i)/2.
    """
    op = OperatorSum(f.n)
    for key, value in f.coeffs.items():
        k = len(key)
        scale = float(value) / (1 << k)
        # Π (1 - Z_i) = Σ_{T ⊆ S} (-1)^{|T|} Z_T
        for sub in range(1 << k):
            zmask = 0
            bits = 0
            for pos, i in enumerate(key):
                if sub & (1 << pos):
                    zmask |= 1 << (f.n - 1 - i)
                    bits += 1
            op.add(scale * ((-1) ** bits), (0, zmask))
    return op.prune(0.0)


def operator_to_pseudo(op: OperatorSum) -> PseudoBooleanPoly:
    """Inverse embedding for diagonal operators (Z_i -> 1 - 2x_i)."""
    poly = PseudoBooleanPoly(op.n)
    for c, p in op.terms():
        if p.x:
            raise ValueError("operator is not diagonal")
        term = PseudoBooleanPoly.constant(op.n, c)
        for j in range(op.n):
            if p.z & (1 << (op.n - 1 - j)):
                term = term * PseudoBooleanPoly(op.n, {(): 1, (j,): -2})
        poly = poly + term
    return poly


# ---------------------------------------------------------------------------
# Boolean formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    """AST node over {AND, OR, NOT, VAR, CONST}."""

    kind: str
    children: tuple = ()
    index: int = -1
    value: int = 0

    @staticmethod
    def var(i: int) -> "Formula":
        return Formula("var", index=i)

    @staticmethod
    def const(v: int) -> "Formula":
        return Formula("const", value=int(v))

    def __and__(self, other: "Formula") -> "Formula":
        return Formula("and", (self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Formula("or", (self, other))

    def __invert__(self) -> "Formula":
        return Formula("not", (self,))

    def max_var(self) -> int:
        if self.kind == "var":
            return self.index
        return max((c.max_var() for c in self.children), default=-1)

    def evaluate(self, bits) -> int:
        if self.kind == "var":
            return int(bits[self.index])
        if self.kind == "const":
            return self.value
        if self.kind == "not":
            return 1 - self.children[0].evaluate(bits)
        if self.kind == "and":
            return self.children[0].evaluate(bits) & self.children[1].evaluate(bits)
        if self.kind == "or":
            return self.children[0].evaluate(bits) | self.children[1].evaluate(bits)
        raise UnsupportedNode(self.kind)

    def to_json_dict(self) -> dict:
        if self.kind == "var":
            return {"var": self.index}
        if self.kind == "const":
            return {"const": self.value}
        return {self.kind: [c.to_json_dict() for c in self.children]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Formula":
        if "var" in d:
            return cls.var(d["var"])
        if "const" in d:
            return cls.const(d["const"])
        for kind in ("and", "or", "not"):
            if kind in d:
                children = tuple(cls.from_json_dict(c) for c in d[kind])
                return cls(kind, children)
        raise UnsupportedNode(f"bad formula node {d!r}")


def _formula_poly(g: Formula, n: int) -> PseudoBooleanPoly:
    """Spectral map: AND -> product, OR -> plain sum, literals -> x / (1-x).

    The OR image counts satisfied disjuncts, so eigenvalues may exceed 1;
    use kernel_embed for a 0/1 indicator.
    """
    if g.kind == "var":
        return PseudoBooleanPoly.variable(n, g.index)
    if g.kind == "const":
        return PseudoBooleanPoly.constant(n, g.value)
    if g.kind == "not":
        child = g.children[0]
        if child.kind == "var":
            return PseudoBooleanPoly.constant(n, 1) - PseudoBooleanPoly.variable(n, child.index)
        if child.kind == "const":
            return PseudoBooleanPoly.constant(n, 1 - child.value)
        raise UnsupportedNode("negations must be pushed to literals")
    if g.kind == "and":
        return _formula_poly(g.children[0], n) * _formula_poly(g.children[1], n)
    if g.kind == "or":
        return _formula_poly(g.children[0], n) + _formula_poly(g.children[1], n)
    raise UnsupportedNode(f"node {g.kind!r} not supported; rewrite it first")


def embed_formula(g: Formula, n: int | None = None) -> OperatorSum:
    """Spectrum embedding: H|x> = f(x)|x> for the induced pseudo-Boolean f."""
    if n is None:
        n = g.max_var() + 1
    return pseudo_to_operator(_formula_poly(g, n))


def kernel_embed(g: Formula, n: int | None = None) -> OperatorSum:
    """Non-negative diagonal penalty whose kernel is exactly the accepting set.

    Realized as the projector sum over rejecting strings, so every rejected
    string sits at energy exactly 1.
    """
    if n is None:
        n = g.max_var() + 1
    if n > ENUM_LIMIT:
        raise IncompleteTable(f"n = {n} exceeds enumeration limit")
    table = np.zeros(1 << n)
    for idx in range(1 << n):
        bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
        table[idx] = 1 - g.evaluate(bits)
    return pseudo_to_operator(canonical_expand(table, n))


# ---------------------------------------------------------------------------
# Spin picture
# ---------------------------------------------------------------------------

class SpinPoly:
    """Polynomial over spin variables s ∈ {±1}; affine image of a 0/1 polynomial."""

    def __init__(self, n: int, coeffs=None):
        self.n = n
        self.coeffs: dict[tuple, object] = {}
        if coeffs:
            for k, v in dict(coeffs).items():
                k = tuple(sorted(k))
                if v != 0:
                    self.coeffs[k] = v

    @property
    def constant(self):
        return self.coeffs.get((), 0)

    def evaluate(self, spins) -> float:
        total = 0
        for key, value in self.coeffs.items():
            prod = value
            for i in key:
                prod *= spins[i]
            total += prod
        return total

    def add_term(self, key, value) -> "SpinPoly":
        key = tuple(sorted(key))
        new = self.coeffs.get(key, 0) + value
        if new == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = new
        return self

    def to_operator(self) -> OperatorSum:
        """Direct Ising realization s_i -> Z_i."""
        op = OperatorSum(self.n)
        for key, value in self.coeffs.items():
            zmask = 0
            for i in key:
                zmask |= 1 << (self.n - 1 - i)
            op.add(float(value), (0, zmask))
        return op

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "coeffs": [{"vars": list(k), "c": float(v)} for k, v in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SpinPoly":
        return cls(d["n"], {tuple(t["vars"]): t["c"] for t in d["coeffs"]})

    def __repr__(self):
        return f"SpinPoly(n={self.n}, terms={len(self.coeffs)})"


def to_spin(f: PseudoBooleanPoly) -> SpinPoly:
    """Substitute x_i = (1 - s_i)/2 and expand."""
    out = SpinPoly(f.n)
    for key, value in f.coeffs.items():
        k = len(key)
        half = Fraction(1, 2 ** k) if isinstance(value, Fraction) else 1.0 / (1 << k)
        # Π (1 - s_i)/2 = 2^{-k} Σ_{T ⊆ S} (-1)^{|T|} s_T
        for sub in range(1 << k):
            skey = tuple(key[pos] for pos in range(k) if sub & (1 << pos))
            out.add_term(skey, value * half * ((-1) ** len(skey)))
    return out


def from_spin(g: SpinPoly) -> PseudoBooleanPoly:
    """Substitute s_i = 1 - 2x_i and expand."""
    out = PseudoBooleanPoly(g.n)
    for key, value in g.coeffs.items():
        term = PseudoBooleanPoly.constant(g.n, value)
        for i in key:
            term = term * PseudoBooleanPoly(g.n, {(): 1, (i,): -2})
        out = out + term
    return out


def number_partition(values) -> SpinPoly:
    """H = (Σ n_i s_i)^2; vanishes iff a balanced partition exists."""
    values = list(values)
    if not values:
        raise ValueError("need at least one value")
    n = len(values)
    out = SpinPoly(n)
    out.add_term((), sum(v * v for v in values))
    for i in range(n):
        for j in range(i + 1, n):
            out.add_term((i, j), 2 * values[i] * values[j])
    return out


# ---------------------------------------------------------------------------
# CNF
# ---------------------------------------------------------------------------

@dataclass
class CnfInstance:
    """Clauses as tuples of literals (index, polarity); polarity 1 = positive."""

    n: int
    clauses: list = field(default_factory=list)

    def __post_init__(self):
        for clause in self.clauses:
            seen = set()
            for index, _pol in clause:
                if not (0 <= index < self.n):
                    raise VariableOutOfRange(f"variable {index + 1} out of range")
                if index in seen:
                    raise InvalidClause("clause repeats a variable")
                seen.add(index)
            if len(clause) < 1:
                raise InvalidClause("empty clause")

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def clause_density(self) -> float:
        return self.m / self.n

    def violations(self, bits) -> int:
        count = 0
        for clause in self.clauses:
            if all(bits[i] != pol for i, pol in clause):
                count += 1
        return count

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {self.m}"]
        for clause in self.clauses:
            lits = [(i + 1) if pol else -(i + 1) for i, pol in clause]
            lines.append(" ".join(map(str, lits)) + " 0")
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfInstance:
    """Standard DIMACS CNF: 'p cnf n m' header, 0-terminated clauses, 'c' comments."""
    n = m = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: bad header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise MalformedHeader(f"line {lineno}: non-integer header fields") from exc
            continue
        if n is None:
            raise MalformedHeader(f"line {lineno}: clause before header")
        try:
            tokens.extend(int(tok) for tok in line.split())
        except ValueError as exc:
            raise UnterminatedClause(f"line {lineno}: non-integer literal") from exc
    if n is None:
        raise EmptyInstance("no 'p cnf' header found")
    clauses = []
    current: list[tuple[int, int]] = []
    for lit in tokens:
        if lit == 0:
            if not current:
                raise InvalidClause("empty clause (lone 0)")
            clauses.append(tuple(current))
            current = []
            continue
        index = abs(lit) - 1
        if index >= n:
            raise VariableOutOfRange(f"literal {lit} exceeds declared count {n}")
        current.append((index, 1 if lit > 0 else 0))
    if current:
        raise UnterminatedClause("trailing clause without terminating 0")
    if m is not None and m != len(clauses):
        raise MalformedHeader(f"header declares {m} clauses, found {len(clauses)}")
    return CnfInstance(n, clauses)


def cnf_to_hamiltonian(inst: CnfInstance) -> OperatorSum:
    """H|x> = (#clauses violated by x)|x>; one rank-1 projector per clause.

    The clause projector over its k qubits is Π_i P_{1-pol_i}, i.e. the
    projector onto the unique all-literals-false assignment.
    """
    op = OperatorSum(inst.n)
    for clause in inst.clauses:
        k = len(clause)
        scale = 1.0 / (1 << k)
        # Π ((1 + (-1)^{pol} Z_i)/2): polarity 1 literal is false when x_i = 0
        for sub in range(1 << k):
            zmask = 0
            sign = 1.0
            for pos, (index, pol) in enumerate(clause):
                if sub & (1 << pos):
                    zmask |= 1 << (inst.n - 1 - index)
                    if not pol:
                        sign = -sign
            op.add(scale * sign, (0, zmask))
    return op.prune(0.0)


def random_ksat(n: int, m: int, k: int = 3, rng=None) -> CnfInstance:
    """Uniform random k-SAT: k distinct variables per clause, random polarity."""
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    if k > n:
        raise InvalidClause(f"k = {k} exceeds variable count {n}")
    clauses = []
    for _ in range(m):
        variables = rng.choice(n, size=k, replace=False)
        polarities = rng.integers(0, 2, size=k)
        clauses.append(tuple((int(v), int(p)) for v, p in zip(variables, polarities)))
    return CnfInstance(n, clauses)
