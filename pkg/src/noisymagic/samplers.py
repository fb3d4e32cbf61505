"""Monte Carlo estimators: stabilizer-state sampling and Heisenberg propagation.

Both estimators draw shots in fixed-size shards.  Shard ``s`` uses a Philox
generator keyed by ``seed ^ s``, so results depend only on ``(seed, shots)``
and never on the number of worker threads.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .channels import PTM, channel_stabilizer_norm
from .pauli import PauliString
from .rom import FEASIBILITY_TOL, SCHEMA_VERSION
from .stabilizer import CliffordOp, StabilizerTableau, expectation, postselect_zero

SHARD_SIZE = 1 << 14


def hoeffding_shots(l1: float, delta: float, epsilon: float) -> int:
    """Shots so that the mean is within ``delta`` with probability ``1 - epsilon``."""
    if not l1 >= 1 - 1e-12:
        raise ValueError(f"l1 norm {l1} below 1")
    if not delta > 0:
        raise ValueError(f"delta={delta} must be positive")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon={epsilon} outside (0, 1)")
    return math.ceil(l1**2 * (2 / delta**2) * math.log(2 / epsilon))


def hoeffding_delta(l1: float, shots: int, epsilon: float) -> float:
    """Inverse of :func:`hoeffding_shots` for a fixed shot count."""
    return l1 * math.sqrt(2 * math.log(2 / epsilon) / shots)


def _generator(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) ^ shard) & (2**64 - 1)))


def _shards(shots: int) -> list[tuple[int, int]]:
    return [(s, min(SHARD_SIZE, shots - s * SHARD_SIZE)) for s in range(math.ceil(shots / SHARD_SIZE))]


def _run_shards(fn, shots: int, threads: int) -> list:
    jobs = _shards(shots)
    if threads <= 1 or len(jobs) == 1:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda j: fn(*j), jobs))


@dataclass(frozen=True)
class EstimatorResult:
    method: str
    mean: float
    shots: int
    l1_total: float
    delta: float
    epsilon: float
    required_shots: int
    seed: int
    sample_variance: float = 0.0

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, **asdict(self)}


# ---------------------------------------------------------------------------
# stabilizer-state sampling


class Resource(Protocol):
    """Anything with signed weights over stabilizer tableaus."""

    n: int
    coefficients: np.ndarray

    def tableau(self, k: int) -> StabilizerTableau: ...


@dataclass(frozen=True, eq=False)
class StabilizerMixture:
    """Explicit quasiprobability mixture over given tableaus."""

    n: int
    coefficients: np.ndarray
    tableaus: tuple[StabilizerTableau, ...]
    residual: float = 0.0

    @property
    def l1(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def tableau(self, k: int) -> StabilizerTableau:
        return self.tableaus[k]


@dataclass(frozen=True, eq=False)
class GadgetizedCircuit:
    """Clifford circuit on data qubits plus resource ancillas.

    The ancillas follow the data qubits, one block per resource, in order.
    Data qubits start in ``|0>``; every ancilla is postselected on ``|0>``.
    """

    n_data: int
    ops: tuple[CliffordOp, ...]
    observable: PauliString
    resources: tuple[Resource, ...] = ()
    _values: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(CliffordOp.parse(g) for g in self.ops))
        obs = self.observable
        if isinstance(obs, str):
            obs = PauliString.from_str(obs)
        if not obs.is_hermitian:
            raise ValueError("observable must be Hermitian")
        if obs.n == self.n_data:
            obs = obs.tensor(PauliString(self.t))
        if obs.n != self.n_data + self.t:
            raise ValueError(f"observable acts on {obs.n} qubits")
        object.__setattr__(self, "observable", obs)
        for r in self.resources:
            if len(r.coefficients) == 0:
                raise ValueError("empty decomposition")
            if getattr(r, "residual", 0.0) > FEASIBILITY_TOL:
                raise ValueError("decomposition residual too large")
        for g in self.ops:
            if max(g.qubits) >= self.n_data + self.t:
                raise ValueError(f"{g} addresses a qubit outside the register")

    @property
    def t(self) -> int:
        return sum(r.n for r in self.resources)

    @property
    def l1_total(self) -> float:
        return float(np.prod([np.abs(r.coefficients).sum() for r in self.resources]))

    def value(self, config: Sequence[int]) -> float:
        """``2^t Tr[(A x |0><0|) U (|0><0| x sigma) U^dag]`` for one choice of states."""
        key = tuple(int(k) for k in config)
        hit = self._values.get(key)
        if hit is not None:
            return hit
        state = StabilizerTableau.zero_state(self.n_data)
        for r, k in zip(self.resources, key):
            state = state.tensor(r.tableau(k))
        state = state.apply(self.ops)
        prob = 1.0
        for q in range(self.n_data, self.n_data + self.t):
            state, p = postselect_zero(state, q)
            if state is None:
                prob = 0.0
                break
            prob *= p
        v = 0.0 if prob == 0 else 2**self.t * prob * expectation(state, self.observable)
        self._values[key] = v
        return v

    def exact_mean(self, max_configs: int = 200_000) -> float:
        """``sum_config prod(x) value(config)``: the estimator's expectation, by enumeration."""
        sizes = [len(r.coefficients) for r in self.resources]
        if math.prod(sizes) > max_configs:
            raise ValueError(f"{math.prod(sizes)} configurations exceed max_configs")
        total = 0.0
        for cfg in itertools.product(*(range(s) for s in sizes)):
            w = math.prod(float(r.coefficients[k]) for r, k in zip(self.resources, cfg))
            total += w * self.value(cfg)
        return total


def _sample_configs(c: GadgetizedCircuit, seed: int, shard: int, size: int) -> np.ndarray:
    rng = _generator(seed, shard)
    cols = []
    for r in c.resources:
        w = np.abs(r.coefficients)
        cols.append(rng.choice(len(w), size=size, p=w / w.sum()))
    return np.stack(cols, axis=1) if cols else np.zeros((size, 0), dtype=np.int64)


def stabilizer_sampling_estimate(
    c: GadgetizedCircuit,
    shots: int | None = None,
    seed: int = 0,
    delta: float = 0.05,
    epsilon: float = 0.05,
    threads: int = 1,
) -> EstimatorResult:
    """Sample ``sigma_i`` with probability ``|x_i|/l1`` and average ``sign(x_i) l1 <A>_sigma``.

    With ``shots=None`` the Hoeffding shot count for ``(delta, epsilon)`` is used.
    """
    l1 = c.l1_total
    required = hoeffding_shots(l1, delta, epsilon)
    shots = required if shots is None else int(shots)
    if shots <= 0:
        raise ValueError("shots must be positive")
    configs = np.concatenate(_run_shards(lambda s, k: _sample_configs(c, seed, s, k), shots, threads))
    uniq, inverse = np.unique(configs, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    vals = np.empty(len(uniq))
    for j, cfg in enumerate(uniq):
        sign = 1.0
        for r, k in zip(c.resources, cfg):
            sign *= np.sign(r.coefficients[k])
        vals[j] = sign * l1 * c.value(cfg)
    m = vals[inverse]
    return EstimatorResult(
        "stabilizer", float(m.mean()), shots, l1, delta, epsilon, required, seed, float(m.var())
    )


# ---------------------------------------------------------------------------
# Heisenberg propagation

_INIT_PAULI = {"0": (3, 1), "1": (3, -1), "+": (1, 1), "-": (1, -1), "+i": (2, 1), "-i": (2, -1)}


@dataclass(frozen=True, eq=False)
class HeisenbergCircuit:
    """Channels ``Lambda_1 ... Lambda_d`` (PTM, qubits) on a product stabilizer input."""

    n: int
    channels: tuple[tuple[PTM, tuple[int, ...]], ...]
    init: tuple[str, ...]
    observable: PauliString

    def __post_init__(self):
        obs = self.observable
        if isinstance(obs, str):
            obs = PauliString.from_str(obs)
        if obs.n != self.n:
            raise ValueError(f"observable acts on {obs.n} qubits, circuit has {self.n}")
        if not obs.is_hermitian:
            raise ValueError("observable must be Hermitian")
        object.__setattr__(self, "observable", obs)
        if len(self.init) != self.n or any(lab not in _INIT_PAULI for lab in self.init):
            raise ValueError(f"bad initial labels {self.init}")
        for ptm, qubits in self.channels:
            if ptm is None:
                raise ValueError("channel PTM missing")
            if ptm.n != len(qubits) or ptm.n > 2:
                raise ValueError(f"PTM on {ptm.n} qubits applied to {qubits}")
            if any(not 0 <= q < self.n for q in qubits):
                raise ValueError(f"qubits {qubits} outside register")

    @property
    def l1_total(self) -> float:
        """Product of the adjoint channels' stabilizer norms."""
        return float(np.prod([channel_stabilizer_norm(p) for p, _ in self.channels]))


@dataclass(frozen=True)
class _Step:
    qubits: tuple[int, ...]
    cum: np.ndarray  # row-wise cumulative |R_ij| / row norm
    sign: np.ndarray
    norm: np.ndarray


def _steps(c: HeisenbergCircuit) -> list[_Step]:
    out = []
    for ptm, qubits in reversed(c.channels):
        r = ptm.matrix
        norm = np.abs(r).sum(axis=1)
        safe = np.where(norm > 0, norm, 1.0)
        cum = np.cumsum(np.abs(r), axis=1) / safe[:, None]
        cum[:, -1] = 1.0
        out.append(_Step(tuple(qubits), cum, np.sign(r), norm))
    return out


def _heisenberg_shard(c: HeisenbergCircuit, steps: list[_Step], seed: int, shard: int, size: int) -> np.ndarray:
    rng = _generator(seed, shard)
    digits = np.tile(np.array([c.observable.digit(q) for q in range(c.n)], dtype=np.int64), (size, 1))
    weight = np.full(size, float(c.observable.sign))
    for st in steps:
        idx = np.zeros(size, dtype=np.int64)
        for k, q in enumerate(st.qubits):
            idx += digits[:, q] << (2 * k)
        u = rng.random(size)
        j = (st.cum[idx] < u[:, None]).sum(axis=1)
        j = np.minimum(j, st.cum.shape[1] - 1)
        weight *= st.sign[idx, j] * st.norm[idx]
        for k, q in enumerate(st.qubits):
            digits[:, q] = (j >> (2 * k)) & 3
    for q, lab in enumerate(c.init):
        letter, s = _INIT_PAULI[lab]
        d = digits[:, q]
        weight *= np.where(d == 0, 1.0, np.where(d == letter, float(s), 0.0))
    return weight


def heisenberg_estimate(
    c: HeisenbergCircuit,
    shots: int | None = None,
    seed: int = 0,
    delta: float = 0.05,
    epsilon: float = 0.05,
    threads: int = 1,
) -> EstimatorResult:
    """Propagate ``A`` backwards one sampled Pauli at a time and average the weights."""
    l1 = c.l1_total
    required = hoeffding_shots(l1, delta, epsilon)
    shots = required if shots is None else int(shots)
    if shots <= 0:
        raise ValueError("shots must be positive")
    steps = _steps(c)
    m = np.concatenate(_run_shards(lambda s, k: _heisenberg_shard(c, steps, seed, s, k), shots, threads))
    return EstimatorResult(
        "heisenberg", float(m.mean()), shots, l1, delta, epsilon, required, seed, float(m.var())
    )
