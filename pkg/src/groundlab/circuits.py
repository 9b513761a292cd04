"""Gate-by-gate statevector simulation without materializing full unitaries.

Qubit 0 is the leftmost tensor factor (most significant index bit), matching
the Pauli-word convention in :mod:`groundlab.paulis`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooLarge, IndexOutOfRange, UnsupportedGate
from .paulis import STATEVECTOR_LIMIT, StateVector, as_amplitudes

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = (_X + _Z) / math.sqrt(2)
_P = np.array([[1, 0], [0, 1j]], dtype=complex)
PAULI_MATS = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z, "H": _H, "P": _P}


def rotation_matrix(axis, theta: float) -> np.ndarray:
    """e^{-iθ(n·σ)} = cosθ·1 - i sinθ (n·σ) for a unit 3-vector n."""
    nx, ny, nz = axis
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("rotation axis must be unit length")
    ns = nx * _X + ny * _Y + nz * _Z
    return math.cos(theta) * _I2 - 1j * math.sin(theta) * ns


def controlled_unitary_matrix(name: str, param: float | None = None) -> np.ndarray:
    """2x2 block for KControlledU targets."""
    if name == "X":
        return _X
    if name == "V":       # principal square root of X
        return scipy_sqrtm_x()
    if name == "Vd":
        return scipy_sqrtm_x().conj().T
    if name == "Z":
        return _Z
    if name == "sZ":      # principal square root of Z
        return np.diag([1.0, 1j]).astype(complex)
    if name == "sZd":
        return np.diag([1.0, -1j]).astype(complex)
    if name == "Rx":
        return rotation_matrix((1, 0, 0), param)
    if name == "Rz":
        return rotation_matrix((0, 0, 1), param)
    if name == "phase":   # diag(1, e^{iχ})
        return np.diag([1.0, np.exp(1j * param)]).astype(complex)
    raise UnsupportedGate(f"unknown controlled target {name!r}")


def scipy_sqrtm_x() -> np.ndarray:
    # closed form: V = (1/2)[[1+i, 1-i], [1-i, 1+i]]
    return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


@dataclass
class Gate:
    kind: str                      # rot | fixed | cn | cphase | ku
    qubits: tuple                  # acted-on qubits; for controlled kinds: (*controls, target)
    params: tuple = ()

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "qubits": list(self.qubits), "params": list(self.params)}


class Circuit:
    """Ordered gate list over n qubits with a builder-style interface."""

    def __init__(self, n: int):
        self.n = n
        self.gates: list[Gate] = []

    # -- builders ------------------------------------------------------------
    def _check(self, *qubits):
        for q in qubits:
            if not (0 <= q < self.n):
                raise IndexOutOfRange(f"qubit {q} out of range for n = {self.n}")
        if len(set(qubits)) != len(qubits):
            raise IndexOutOfRange("repeated qubit in one gate")

    def rot(self, qubit: int, axis, theta: float) -> "Circuit":
        self._check(qubit)
        nx, ny, nz = axis
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("rotation axis must be unit length")
        self.gates.append(Gate("rot", (qubit,), (float(nx), float(ny), float(nz), float(theta))))
        return self

    def rx(self, qubit: int, theta: float) -> "Circuit":
        return self.rot(qubit, (1, 0, 0), theta)

    def ry(self, qubit: int, theta: float) -> "Circuit":
        return self.rot(qubit, (0, 1, 0), theta)

    def rz(self, qubit: int, theta: float) -> "Circuit":
        return self.rot(qubit, (0, 0, 1), theta)

    def fixed(self, qubit: int, name: str) -> "Circuit":
        self._check(qubit)
        if name not in ("H", "P", "X", "Y", "Z"):
            raise UnsupportedGate(f"unknown fixed gate {name!r}")
        self.gates.append(Gate("fixed", (qubit,), (name,)))
        return self

    def h(self, qubit: int) -> "Circuit":
        return self.fixed(qubit, "H")

    def p(self, qubit: int) -> "Circuit":
        return self.fixed(qubit, "P")

    def x(self, qubit: int) -> "Circuit":
        return self.fixed(qubit, "X")

    def y(self, qubit: int) -> "Circuit":
        return self.fixed(qubit, "Y")

    def z(self, qubit: int) -> "Circuit":
        return self.fixed(qubit, "Z")

    def cn(self, control: int, target: int) -> "Circuit":
        self._check(control, target)
        self.gates.append(Gate("cn", (control, target)))
        return self

    def cphase(self, controls, phase: float) -> "Circuit":
        """Multiply amplitude by e^{iφ} on states where every control is |1⟩."""
        controls = tuple(controls)
        self._check(*controls)
        if not controls:
            raise IndexOutOfRange("cphase needs at least one qubit")
        self.gates.append(Gate("cphase", controls, (float(phase),)))
        return self

    def ku(self, controls, target: int, name: str, param: float | None = None) -> "Circuit":
        """k-controlled U for U in {X, V, V†, Z, √Z, √Z†, Rx(θ), Rz(φ)}."""
        controls = tuple(controls)
        self._check(*controls, target)
        params = (name,) if param is None else (name, float(param))
        self.gates.append(Gate("ku", controls + (target,), params))
        return self

    def hermitian_reflection(self, qubit: int, axis) -> "Circuit":
        """Self-inverse gate n·σ (unit axis); used by the self-inverse compiler."""
        self._check(qubit)
        nx, ny, nz = axis
        if abs(math.sqrt(nx * nx + ny * ny + nz * nz) - 1.0) > 1e-12:
            raise ValueError("reflection axis must be unit length")
        self.gates.append(Gate("refl", (qubit,), (float(nx), float(ny), float(nz))))
        return self

    def two_qubit_reflection(self, control: int, target: int, phi: float) -> "Circuit":
        """Self-inverse two-qubit block P0⊗1 + P1⊗(sinφ X + cosφ Z)."""
        self._check(control, target)
        self.gates.append(Gate("refl2", (control, target), (float(phi),)))
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise DimensionTooLarge("qubit counts differ")
        self.gates.extend(other.gates)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    # -- semantics -------------------------------------------------------------
    def gate_matrix(self, gate: Gate) -> np.ndarray:
        """The 2x2 block (or full local matrix) a gate applies."""
        if gate.kind == "rot":
            return rotation_matrix(gate.params[:3], gate.params[3])
        if gate.kind == "fixed":
            return PAULI_MATS[gate.params[0]]
        if gate.kind == "refl":
            nx, ny, nz = gate.params
            return nx * _X + ny * _Y + nz * _Z
        if gate.kind == "ku":
            return controlled_unitary_matrix(*gate.params)
        raise UnsupportedGate(gate.kind)

    def simulate(self, psi0=None) -> StateVector:
        if self.n > STATEVECTOR_LIMIT:
            raise DimensionTooLarge(f"n = {self.n} exceeds statevector limit")
        if psi0 is None:
            amps = StateVector.basis(self.n, 0).amplitudes
        else:
            amps = as_amplitudes(psi0).copy()
        amps = self.apply(amps)
        return StateVector(self.n, amps / np.linalg.norm(amps))

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Apply all gates to an amplitude array of shape (2^n,) or (2^n, k)."""
        squeeze = amps.ndim == 1
        work = amps.reshape(-1, 1) if squeeze else amps
        work = work.astype(complex, copy=True)
        for gate in self.gates:
            work = self._apply_gate(gate, work)
        return work[:, 0] if squeeze else work

    def _apply_gate(self, gate: Gate, work: np.ndarray) -> np.ndarray:
        n = self.n
        if gate.kind in ("rot", "fixed", "refl"):
            return _apply_1q(work, n, gate.qubits[0], self.gate_matrix(gate))
        if gate.kind == "cn":
            c, t = gate.qubits
            return _apply_controlled(work, n, (c,), t, _X)
        if gate.kind == "refl2":
            c, t = gate.qubits
            phi = gate.params[0]
            return _apply_controlled(work, n, (c,), t,
                                     math.sin(phi) * _X + math.cos(phi) * _Z)
        if gate.kind == "cphase":
            mask = 0
            for q in gate.qubits:
                mask |= 1 << (n - 1 - q)
            idx = np.arange(work.shape[0])
            sel = (idx & mask) == mask
            out = work.copy()
            out[sel] *= np.exp(1j * gate.params[0])
            return out
        if gate.kind == "ku":
            controls, t = gate.qubits[:-1], gate.qubits[-1]
            return _apply_controlled(work, n, controls, t, self.gate_matrix(gate))
        raise UnsupportedGate(gate.kind)

    def dense(self) -> np.ndarray:
        """Full unitary; intended for small n."""
        dim = 1 << self.n
        if self.n > 12:
            raise DimensionTooLarge("dense circuit matrix limited to 12 qubits")
        return self.apply(np.eye(dim, dtype=complex))

    # -- serialization -----------------------------------------------------------
    def to_json_dict(self) -> dict:
        return {"n": self.n, "gates": [g.to_json_dict() for g in self.gates]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d: dict) -> "Circuit":
        c = cls(d["n"])
        for g in d["gates"]:
            c.gates.append(Gate(g["kind"], tuple(g["qubits"]), tuple(g["params"])))
        return c

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_json_dict(json.loads(s))


def _apply_1q(work: np.ndarray, n: int, qubit: int, u: np.ndarray) -> np.ndarray:
    k = work.shape[1]
    before = 1 << qubit
    after = 1 << (n - 1 - qubit)
    view = work.reshape(before, 2, after * k)
    out = np.einsum("ij,ajb->aib", u, view)
    return np.ascontiguousarray(out).reshape(1 << n, k)


def _apply_controlled(work: np.ndarray, n: int, controls, target: int, u: np.ndarray) -> np.ndarray:
    dim = work.shape[0]
    idx = np.arange(dim)
    cmask = 0
    for q in controls:
        cmask |= 1 << (n - 1 - q)
    tbit = 1 << (n - 1 - target)
    active0 = ((idx & cmask) == cmask) & ((idx & tbit) == 0)
    rows0 = idx[active0]
    rows1 = rows0 | tbit
    out = work.copy()
    a0, a1 = work[rows0], work[rows1]
    out[rows0] = u[0, 0] * a0 + u[0, 1] * a1
    out[rows1] = u[1, 0] * a0 + u[1, 1] * a1
    return out


@dataclass
class Ansatz:
    """Circuit template: bind(θ) yields a concrete circuit on a fixed input."""

    n: int
    slots: int
    builder: "callable"
    initial_state: "callable" = None

    def bind(self, theta) -> Circuit:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.slots,):
            raise ValueError(f"expected {self.slots} parameters, got shape {theta.shape}")
        return self.builder(theta)

    def prepare(self, theta) -> StateVector:
        psi0 = self.initial_state() if self.initial_state else None
        return self.bind(theta).simulate(psi0)
