"""Signed Pauli strings and Hermitian operators in the Pauli basis.

Conventions used throughout the package:

* A :class:`PauliString` is ``i**phase_exp`` times a tensor product of the
  Hermitian letters ``I, X, Y, Z``.  Bit ``q`` of ``x_mask`` / ``z_mask``
  marks an X / Z component on qubit ``q`` (both bits set means ``Y``).
* Dense matrices put qubit 0 in the most significant tensor slot, so the
  string ``"+XZ"`` is ``np.kron(X, Z)``.
* A :class:`PauliVector` stores ``c_P = Tr(rho P)`` for every unsigned Pauli
  ``P``.  The flat index is ``sum_q d_q * 4**q`` with digit order
  ``I, X, Y, Z`` (qubit 0 is the fastest digit).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LETTERS = "IXYZ"

# (x, z) bits of the digits I, X, Y, Z
_DIGIT_X = (0, 1, 1, 0)
_DIGIT_Z = (0, 0, 1, 1)

PAULI_MATRICES = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_PHASE_PREFIX = {"+": 0, "+i": 1, "-": 2, "-i": 3, "i": 1, "": 0}
_PHASE_TEXT = ("+", "+i", "-", "-i")


def _g(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of i picked up when multiplying single-qubit letters."""
    if not x1 and not z1:
        return 0
    if x1 and z1:
        return z2 - x2
    if x1:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


@dataclass(frozen=True)
class PauliString:
    """``i**phase_exp`` times a product of Pauli letters on ``n`` qubits."""

    n: int
    x_mask: int = 0
    z_mask: int = 0
    phase_exp: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"mask has bits outside {self.n} qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_str(cls, text: str) -> PauliString:
        """Parse ``"+XIZ"``, ``"-iYY"``, ``"XX"``; leftmost letter is qubit 0."""
        text = text.strip()
        i = 0
        while i < len(text) and text[i] not in LETTERS:
            i += 1
        prefix, letters = text[:i], text[i:]
        if prefix not in _PHASE_PREFIX:
            raise ValueError(f"bad phase prefix {prefix!r} in {text!r}")
        x = z = 0
        for q, ch in enumerate(letters):
            if ch not in LETTERS:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            d = LETTERS.index(ch)
            x |= _DIGIT_X[d] << q
            z |= _DIGIT_Z[d] << q
        return cls(len(letters), x, z, _PHASE_PREFIX[prefix])

    @classmethod
    def from_index(cls, n: int, index: int, phase_exp: int = 0) -> PauliString:
        x = z = 0
        for q in range(n):
            d = (index >> (2 * q)) & 3
            x |= _DIGIT_X[d] << q
            z |= _DIGIT_Z[d] << q
        return cls(n, x, z, phase_exp)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        d = LETTERS.index(letter)
        return cls(n, _DIGIT_X[d] << qubit, _DIGIT_Z[d] << qubit)

    @property
    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def letter(self, q: int) -> str:
        return LETTERS[self.digit(q)]

    def digit(self, q: int) -> int:
        x = (self.x_mask >> q) & 1
        z = (self.z_mask >> q) & 1
        return (0, 1, 3, 2)[x | (z << 1)]

    @property
    def index(self) -> int:
        """Flat PauliVector index of the unsigned string."""
        return sum(self.digit(q) << (2 * q) for q in range(self.n))

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase_exp == 0 else -1

    @property
    def weight(self) -> int:
        return bin(self.x_mask | self.z_mask).count("1")

    def unsigned(self) -> PauliString:
        return PauliString(self.n, self.x_mask, self.z_mask, 0)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase_exp] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_mul(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.n, self.x_mask, self.z_mask, self.phase_exp + 2)

    def tensor(self, other: PauliString) -> PauliString:
        """``self`` on the low qubits, ``other`` on the following ones."""
        return PauliString(
            self.n + other.n,
            self.x_mask | (other.x_mask << self.n),
            self.z_mask | (other.z_mask << self.n),
            self.phase_exp + other.phase_exp,
        )

    def to_matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for q in range(self.n):
            out = np.kron(out, PAULI_MATRICES[self.digit(q)])
        return (1j ** self.phase_exp) * out


def _check_sizes(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n} qubits")


def pauli_mul(p: PauliString, q: PauliString) -> PauliString:
    """Exact signed product ``p q``."""
    _check_sizes(p, q)
    phase = p.phase_exp + q.phase_exp
    for k in range(p.n):
        phase += _g(
            (p.x_mask >> k) & 1, (p.z_mask >> k) & 1, (q.x_mask >> k) & 1, (q.z_mask >> k) & 1
        )
    return PauliString(p.n, p.x_mask ^ q.x_mask, p.z_mask ^ q.z_mask, phase)


def commutes(p: PauliString, q: PauliString) -> bool:
    _check_sizes(p, q)
    overlap = (p.x_mask & q.z_mask) ^ (p.z_mask & q.x_mask)
    return bin(overlap).count("1") % 2 == 0


@lru_cache(maxsize=None)
def symplectic_masks(n: int) -> tuple[np.ndarray, np.ndarray]:
    """x and z masks of every PauliVector index, as int64 arrays."""
    idx = np.arange(4**n, dtype=np.int64)
    x = np.zeros_like(idx)
    z = np.zeros_like(idx)
    dx = np.array(_DIGIT_X, dtype=np.int64)
    dz = np.array(_DIGIT_Z, dtype=np.int64)
    for q in range(n):
        d = (idx >> (2 * q)) & 3
        x |= dx[d] << q
        z |= dz[d] << q
    x.setflags(write=False)
    z.setflags(write=False)
    return x, z


def _parity(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    out = np.zeros_like(a)
    while np.any(a):
        out ^= a & 1
        a >>= 1
    return out


def commutation_signs(p: PauliString) -> np.ndarray:
    """+1 where a basis Pauli commutes with ``p``, -1 where it anticommutes."""
    x, z = symplectic_masks(p.n)
    par = _parity((x & p.z_mask) ^ (z & p.x_mask))
    return 1 - 2 * par


def index_of_masks(n: int, x_mask: int, z_mask: int) -> int:
    return PauliString(n, x_mask, z_mask).index


# ---------------------------------------------------------------------------
# Pauli vectors


def _transform(tensor: np.ndarray, n: int, mats: np.ndarray) -> np.ndarray:
    """Contract each qubit's (row, col) pair of a 2n-leg tensor with ``mats``.

    ``mats[k, a, b]`` is applied as ``sum_{ab} T[.., a, .., b, ..] mats[k, b, a]``;
    the result has one 4-valued leg per qubit, ordered qubit 0 first.
    """
    t = tensor
    for q in range(n):
        # after q steps, legs are: rows q..n-1, cols q..n-1, k_0..k_{q-1}
        t = np.tensordot(t, mats, axes=([0, n - q], [2, 1]))
    return t


def _density_to_coeffs(rho: np.ndarray, n: int) -> np.ndarray:
    t = _transform(rho.reshape([2] * (2 * n)), n, PAULI_MATRICES)
    # legs k_0..k_{n-1}; qubit 0 is the fastest digit of the flat index
    t = np.transpose(t, list(range(n))[::-1]) if n > 1 else t
    return np.real_if_close(t.reshape(-1), tol=1e6).real.astype(float)


def _coeffs_to_density(coeffs: np.ndarray, n: int) -> np.ndarray:
    c = coeffs.reshape([4] * n) if n else coeffs.reshape(())
    # c legs are ordered qubit n-1 first
    if n > 1:
        c = np.transpose(c, list(range(n))[::-1])
    out = c.astype(complex)
    for _ in range(n):
        # consume the leading digit leg, append a (row, col) pair at the end
        out = np.tensordot(out, PAULI_MATRICES, axes=([0], [0]))
    if n == 0:
        return np.array([[complex(out)]])
    # legs are now r0, c0, r1, c1, ...
    perm = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
    out = np.transpose(out, perm).reshape(2**n, 2**n)
    return out / 2**n


@dataclass(frozen=True, eq=False)
class PauliVector:
    """Real coefficients ``c_P = Tr(A P)`` of a Hermitian operator ``A``."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if c.size != 4**self.n:
            raise ValueError(f"expected {4**self.n} coefficients, got {c.size}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_density(cls, rho: np.ndarray) -> PauliVector:
        rho = np.asarray(rho, dtype=complex)
        n = int(round(np.log2(rho.shape[0])))
        if rho.shape != (2**n, 2**n):
            raise ValueError(f"bad density-matrix shape {rho.shape}")
        return cls(n, _density_to_coeffs(rho, n))

    @classmethod
    def from_paulis(cls, n: int, terms: dict[str, float]) -> PauliVector:
        """Build from ``{"XZ": c, ...}``; signed strings fold their sign in."""
        c = np.zeros(4**n)
        for label, value in terms.items():
            p = PauliString.from_str(label)
            if p.n != n:
                raise ValueError(f"{label!r} does not act on {n} qubits")
            c[p.index] += p.sign * value
        return cls(n, c)

    def to_density(self) -> np.ndarray:
        return _coeffs_to_density(np.asarray(self.coeffs), self.n)

    def __getitem__(self, label: str) -> float:
        p = PauliString.from_str(label)
        return p.sign * float(self.coeffs[p.index])

    def tensor(self, other: PauliVector) -> PauliVector:
        """``self`` on the low qubits, ``other`` on the following ones."""
        return PauliVector(self.n + other.n, np.kron(other.coeffs, self.coeffs))

    def support(self, atol: float = 1e-12) -> np.ndarray:
        return np.flatnonzero(np.abs(self.coeffs) > atol)

    def allclose(self, other: PauliVector, atol: float = 1e-10) -> bool:
        return self.n == other.n and np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0)

    def digest(self, decimals: int = 10) -> str:
        """Stable hash of the rounded coefficients (cache key)."""
        c = np.round(np.asarray(self.coeffs), decimals) + 0.0
        h = hashlib.sha256(f"n={self.n};".encode())
        h.update(c.astype("<f8").tobytes())
        return h.hexdigest()[:24]

    def __repr__(self) -> str:
        return f"PauliVector(n={self.n}, nnz={self.support().size})"


def pauli_vector_of_pure_state(amplitudes, atol: float = 1e-10) -> PauliVector:
    """``c_P = <psi|P|psi>`` for a normalized state vector of length ``2**n``."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    n = int(round(np.log2(psi.size)))
    if psi.size != 2**n:
        raise ValueError(f"state length {psi.size} is not a power of two")
    if n > 10:
        raise ValueError("at most 10 qubits supported")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1) > atol:
        raise ValueError(f"state is not normalized (norm^2 = {norm})")
    return PauliVector.from_density(np.outer(psi, psi.conj()))


def pauli_vector_of_pauli(p: PauliString) -> PauliVector:
    """Expansion of a single Hermitian Pauli operator (coefficient +-2**n)."""
    c = np.zeros(4**p.n)
    c[p.index] = p.sign * 2**p.n
    return PauliVector(p.n, c)


def stabilizer_norm(a: PauliVector) -> float:
    """Sum of absolute expansion coefficients of ``A = 2**-n sum_P c_P P``.

    Equals ``2**-n sum_P |Tr(A P)|``; a single Pauli operator has norm 1.
    """
    return float(np.abs(a.coeffs).sum()) / 2**a.n
