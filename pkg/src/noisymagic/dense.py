"""Brute-force density-matrix simulator used as an independent oracle.

Deliberately naive: full ``2**n x 2**n`` matrices, gates embedded by tensor
contraction.  Qubit 0 is the most significant tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import PAULI_MATRICES, PauliString, PauliVector

MAX_QUBITS = 10

_S2 = 1 / np.sqrt(2)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _S2
_S = np.diag([1, 1j])
_SX = _H @ _S @ _H

GATES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "H": _H,
    "S": _S,
    "SDG": _S.conj().T,
    "SQRT_X": _SX,
    "SQRT_Y": 0.5 * (1 + 1j) * np.array([[1, -1], [1, 1]], dtype=complex),
    "X": PAULI_MATRICES[1],
    "Y": PAULI_MATRICES[2],
    "Z": PAULI_MATRICES[3],
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "TDG": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_GATE_ALIASES = {"CX": "CNOT", "S_DAG": "SDG", "SX": "SQRT_X", "SY": "SQRT_Y", "T_DAG": "TDG"}


def rotation_z(theta: float) -> np.ndarray:
    """``U(theta) = |0><0| + e^{i theta} |1><1|``."""
    return np.diag([1, np.exp(1j * theta)])


def gate_matrix(gate, theta: float | None = None) -> np.ndarray:
    """Unitary for a gate name (``"U"`` takes ``theta``) or a raw matrix."""
    if not isinstance(gate, str):
        return np.asarray(gate, dtype=complex)
    name = gate.upper()
    name = _GATE_ALIASES.get(name, name)
    if name == "U":
        if theta is None:
            raise ValueError("gate U needs an angle")
        return rotation_z(theta)
    if name not in GATES:
        raise ValueError(f"unknown gate {gate!r}")
    return GATES[name]


@dataclass(frozen=True, eq=False)
class DenseState:
    n: int
    rho: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_QUBITS:
            raise ValueError(f"dense oracle supports at most {MAX_QUBITS} qubits")
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2**self.n, 2**self.n):
            raise ValueError(f"bad density matrix shape {rho.shape}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def zero(cls, n: int) -> DenseState:
        rho = np.zeros((2**n, 2**n), dtype=complex)
        rho[0, 0] = 1
        return cls(n, rho)

    @classmethod
    def from_vector(cls, psi) -> DenseState:
        psi = np.asarray(psi, dtype=complex).ravel()
        n = int(round(np.log2(psi.size)))
        return cls(n, np.outer(psi, psi.conj()))

    @classmethod
    def from_pauli_vector(cls, v: PauliVector) -> DenseState:
        return cls(v.n, v.to_density())

    def tensor(self, other: DenseState) -> DenseState:
        return DenseState(self.n + other.n, np.kron(self.rho, other.rho))

    def pauli_vector(self) -> PauliVector:
        return PauliVector.from_density(self.rho)

    def check(self, atol: float = 1e-9) -> None:
        """Raise unless Hermitian, unit trace and positive semidefinite."""
        if not np.allclose(self.rho, self.rho.conj().T, atol=1e-12):
            raise AssertionError("density matrix is not Hermitian")
        if abs(np.trace(self.rho) - 1) > 1e-12:
            raise AssertionError(f"trace is {np.trace(self.rho)}")
        if np.linalg.eigvalsh(self.rho).min() < -atol:
            raise AssertionError("density matrix is not positive semidefinite")


def _apply_operator(rho: np.ndarray, n: int, op: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """``op rho op^dag`` with ``op`` acting on ``qubits`` (in op's tensor order)."""
    k = len(qubits)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubit(s)")
    if len(set(qubits)) != k or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"bad qubit indices {qubits} for {n} qubits")
    t = rho.reshape([2] * (2 * n))
    opt = op.reshape([2] * (2 * k))
    # left multiply on row legs
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), list(qubits)))
    t = np.moveaxis(t, list(range(k)), list(qubits))
    # right multiply by op^dag on column legs
    cols = [n + q for q in qubits]
    t = np.tensordot(t, opt.conj(), axes=(cols, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
    return t.reshape(2**n, 2**n)


def apply_unitary(s: DenseState, u, qubits: Sequence[int] | int, theta: float | None = None) -> DenseState:
    if isinstance(qubits, int):
        qubits = (qubits,)
    return DenseState(s.n, _apply_operator(s.rho, s.n, gate_matrix(u, theta), tuple(qubits)))


def apply_kraus(s: DenseState, kraus: Sequence[np.ndarray], qubits: Sequence[int] | int) -> DenseState:
    if isinstance(qubits, int):
        qubits = (qubits,)
    out = sum(_apply_operator(s.rho, s.n, k, tuple(qubits)) for k in kraus)
    return DenseState(s.n, out)


def apply_channel(s: DenseState, c, qubits: Sequence[int] | int) -> DenseState:
    """Apply a PauliChannel, PTM or any object with a ``kraus()`` method."""
    return apply_kraus(s, c.kraus(), qubits)


def exact_expectation(s: DenseState, a: PauliString | str) -> float:
    if isinstance(a, str):
        a = PauliString.from_str(a)
    if a.n != s.n:
        raise ValueError(f"size mismatch: {a.n} vs {s.n} qubits")
    return float(np.real(np.trace(s.rho @ a.to_matrix())))


def postselect_zero(s: DenseState, qubit: int) -> tuple[DenseState | None, float]:
    """Project ``qubit`` onto ``|0>``; return the renormalised state and probability."""
    proj = np.diag([1, 0]).astype(complex)
    unnorm = _apply_operator(s.rho, s.n, proj, (qubit,))
    p = float(np.real(np.trace(unnorm)))
    if p < 1e-15:
        return None, 0.0
    return DenseState(s.n, unnorm / p), p


def partial_trace(s: DenseState, keep: Sequence[int]) -> DenseState:
    keep = list(keep)
    drop = [q for q in range(s.n) if q not in keep]
    t = s.rho.reshape([2] * (2 * s.n))
    for q in sorted(drop, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=cur + q)
    k = len(keep)
    # remaining legs are in ascending qubit order
    order = sorted(keep)
    perm = [order.index(q) for q in keep]
    t = np.transpose(t, perm + [k + i for i in perm])
    return DenseState(k, t.reshape(2**k, 2**k))
