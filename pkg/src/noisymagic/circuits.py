"""Small noisy Clifford+diagonal circuits with three interchangeable views.

A :class:`NoisyCircuit` is a flat instruction list on ``n`` data qubits:

* Clifford gates by name, e.g. ``["H", 0]`` or ``["CNOT", 0, 1]``
* diagonal non-Clifford gates ``["T", q]``, ``["TDG", q]``, ``["U", q, theta]``
* Pauli noise ``["depo1", q, p]``, ``["depo2", a, b, p]``, ``["dephasing", q, p]``,
  ``["pauli", q, px, py, pz]``

It compiles to a dense density-matrix run (exact value), a
:class:`~noisymagic.samplers.HeisenbergCircuit` and a
:class:`~noisymagic.samplers.GadgetizedCircuit`.

Gadget wiring.  A diagonal gate without trailing noise consumes one
ancilla ``a`` prepared in ``U|+>``: ``CNOT(q, a)`` then postselect ``a``.
A diagonal gate followed by single-qubit Pauli noise consumes the noisy
pair resource ``E~(CZ|U>|+>)`` on ancillas ``(a, b)``:
``CNOT(q, a), H(q), SWAP(q, b), H(q)`` then postselect ``a`` and ``b``.
Free-standing Pauli noise on ``k`` qubits consumes its Choi state on
``2k`` ancillas with the same Bell-teleportation wiring, minus the final
Hadamards.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dense
from .channels import (
    PTM,
    PauliChannel,
    depolarizing1,
    depolarizing2,
    dephasing,
    pauli_noise,
    ptm_of_gate,
)
from .gadgets import gadget_pair_resource, teleport_diagonal_gate, teleported_noise
from .pauli import PauliString, commutes
from .rom import SCHEMA_VERSION, DecompositionCache, QuasiDecomposition, full_basis, rom
from .samplers import GadgetizedCircuit, HeisenbergCircuit, StabilizerMixture
from .stabilizer import CliffordOp, StabilizerTableau, _split_labels

DIAGONAL = {"T": math.pi / 4, "TDG": -math.pi / 4}
NOISE_ARITY = {"depo1": 1, "depo2": 2, "dephasing": 1, "pauli": 1}
_PREP = {"0": [], "1": ["X"], "+": ["H"], "-": ["X", "H"], "+i": ["H", "S"], "-i": ["H", "SDG"]}


def _noise_channel(kind: str, params: Sequence[float]) -> PauliChannel:
    if kind == "depo1":
        return depolarizing1(*params)
    if kind == "depo2":
        return depolarizing2(*params)
    if kind == "dephasing":
        return dephasing(*params)
    if kind == "pauli":
        return pauli_noise(*params)
    raise ValueError(f"unknown noise kind {kind!r}")


@dataclass(frozen=True)
class Instruction:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    @property
    def is_noise(self) -> bool:
        return self.name in NOISE_ARITY

    @property
    def is_diagonal(self) -> bool:
        return self.name in DIAGONAL or self.name == "U"

    @property
    def angle(self) -> float:
        return DIAGONAL[self.name] if self.name in DIAGONAL else self.params[0]

    def channel(self) -> PauliChannel:
        return _noise_channel(self.name, self.params)

    def to_list(self) -> list:
        return [self.name, *self.qubits, *self.params]


def _parse_instruction(item) -> Instruction:
    name, *rest = item
    key = str(name)
    if key.lower() in NOISE_ARITY:
        k = NOISE_ARITY[key.lower()]
        return Instruction(key.lower(), tuple(int(q) for q in rest[:k]), tuple(float(x) for x in rest[k:]))
    key = key.upper()
    if key in DIAGONAL:
        return Instruction(key, (int(rest[0]),))
    if key == "U":
        return Instruction("U", (int(rest[0]),), (float(rest[1]),))
    op = CliffordOp(key, tuple(int(q) for q in rest))
    return Instruction(op.name, op.qubits)


@dataclass(frozen=True)
class NoisyCircuit:
    n: int
    instructions: tuple[Instruction, ...]
    observable: PauliString
    init: tuple[str, ...] = ()

    def __post_init__(self):
        init = self.init or ("0",) * self.n
        if len(init) != self.n or any(lab not in _PREP for lab in init):
            raise ValueError(f"bad initial labels {init}")
        object.__setattr__(self, "init", tuple(init))
        obs = self.observable
        if isinstance(obs, str):
            obs = PauliString.from_str(obs)
        if obs.n != self.n or not obs.is_hermitian:
            raise ValueError("observable must be a Hermitian Pauli string on the data qubits")
        object.__setattr__(self, "observable", obs)
        for ins in self.instructions:
            if any(not 0 <= q < self.n for q in ins.qubits):
                raise ValueError(f"{ins} addresses a qubit outside 0..{self.n - 1}")
            if ins.is_noise:
                ins.channel()  # validates rates

    # -- io -----------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> NoisyCircuit:
        n = int(data["n"])
        init = tuple(_split_labels(data["init"])) if "init" in data else ()
        ins = tuple(_parse_instruction(x) for x in data["ops"])
        return cls(n, ins, PauliString.from_str(data["observable"]), init)

    @classmethod
    def from_json(cls, text: str) -> NoisyCircuit:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "init": "".join(self.init),
            "ops": [i.to_list() for i in self.instructions],
            "observable": str(self.observable),
        }

    @property
    def t_count(self) -> int:
        return sum(1 for i in self.instructions if i.is_diagonal)

    # -- dense ------------------------------------------------------------------

    def initial_dense(self) -> dense.DenseState:
        s = dense.DenseState.zero(self.n)
        for q, lab in enumerate(self.init):
            for g in _PREP[lab]:
                s = dense.apply_unitary(s, g, q)
        return s

    def exact_state(self) -> dense.DenseState:
        s = self.initial_dense()
        for ins in self.instructions:
            if ins.is_noise:
                s = dense.apply_channel(s, ins.channel(), ins.qubits)
            elif ins.is_diagonal:
                s = dense.apply_unitary(s, "U", ins.qubits, theta=ins.angle)
            else:
                s = dense.apply_unitary(s, ins.name, ins.qubits)
        return s

    def exact_expectation(self) -> float:
        return dense.exact_expectation(self.exact_state(), self.observable)

    # -- Heisenberg -------------------------------------------------------------

    def to_heisenberg(self) -> HeisenbergCircuit:
        chans: list[tuple[PTM, tuple[int, ...]]] = []
        for ins in self.instructions:
            if ins.is_noise:
                chans.append((ins.channel().ptm(), ins.qubits))
            elif ins.is_diagonal:
                chans.append((ptm_of_gate("U", ins.angle), ins.qubits))
            else:
                chans.append((ptm_of_gate(ins.name), ins.qubits))
        return HeisenbergCircuit(self.n, tuple(chans), self.init, self.observable)

    # -- gadgetized ---------------------------------------------------------------

    def to_gadgetized(
        self,
        cache: DecompositionCache | None = None,
        decompositions: Sequence[QuasiDecomposition] = (),
    ) -> GadgetizedCircuit:
        """Replace every diagonal gate and noise channel by a resource-state gadget.

        A supplied decomposition is used for any resource it reconstructs;
        the rest are solved (through ``cache`` when given).
        """

        def solve(target, basis):
            for d in decompositions:
                if d.n == target.n and d.reconstruct().allclose(target, atol=1e-7):
                    return d
            return cache.rom(target, basis) if cache is not None else rom(target, basis)

        ops: list[CliffordOp] = []
        for q, lab in enumerate(self.init):
            ops += [CliffordOp(g, (q,)) for g in _PREP[lab]]
        resources: list = []
        next_anc = self.n
        ins = list(self.instructions)
        i = 0
        while i < len(ins):
            cur = ins[i]
            nxt = ins[i + 1] if i + 1 < len(ins) else None
            if cur.is_diagonal and nxt is not None and nxt.is_noise and nxt.qubits == cur.qubits:
                (q,) = cur.qubits
                pair, noise = gadget_pair_resource(("U", cur.angle)), teleported_noise(nxt.channel())
                resources.append(solve(noise.apply(pair.vector), full_basis(2)))
                a, b = next_anc, next_anc + 1
                ops += _bell_wiring([q], [a], [b]) + [CliffordOp("H", (q,))]
                next_anc += 2
                i += 2
                continue
            if cur.is_diagonal:
                (q,) = cur.qubits
                resources.append(solve(teleport_diagonal_gate(cur.angle).vector, full_basis(1)))
                ops.append(CliffordOp("CNOT", (q, next_anc)))
                next_anc += 1
            elif cur.is_noise:
                k = len(cur.qubits)
                resources.append(choi_mixture(cur.channel()))
                a = list(range(next_anc, next_anc + k))
                b = list(range(next_anc + k, next_anc + 2 * k))
                ops += _bell_wiring(list(cur.qubits), a, b)
                next_anc += 2 * k
            else:
                ops.append(CliffordOp(cur.name, cur.qubits))
            i += 1
        return GadgetizedCircuit(self.n, tuple(ops), self.observable, tuple(resources))


def _bell_wiring(data: Sequence[int], a: Sequence[int], b: Sequence[int]) -> list[CliffordOp]:
    """Bell-postselect each data qubit with ``a`` and move the ``b`` output back."""
    ops = []
    for q, qa, qb in zip(data, a, b):
        ops += [CliffordOp("CNOT", (q, qa)), CliffordOp("H", (q,)), CliffordOp("SWAP", (q, qb))]
    return ops


def choi_mixture(channel: PauliChannel) -> StabilizerMixture:
    """Choi state of a Pauli channel as an explicit nonnegative Bell-state mixture.

    Qubits ``0..k-1`` are the reference halves, ``k..2k-1`` the channel outputs.
    """
    k = channel.n
    gens = []
    for j in range(k):
        xx = PauliString.single(2 * k, j, "X") * PauliString.single(2 * k, k + j, "X")
        zz = PauliString.single(2 * k, j, "Z") * PauliString.single(2 * k, k + j, "Z")
        gens.append((xx, zz))
    tabs, probs = [], []
    for p, e in channel.terms:
        if p <= 0:
            continue
        stabs = []
        for xx, zz in gens:
            # E on the output half flips the Bell stabilizers that anticommute with it
            out = PauliString(2 * k, e.x_mask << k, e.z_mask << k)
            for g in (xx, zz):
                stabs.append(g if commutes(g, out) else -g)
        tabs.append(StabilizerTableau.from_stabilizers(stabs))
        probs.append(p)
    return StabilizerMixture(2 * k, np.asarray(probs), tuple(tabs))


def load_circuit(path: str) -> NoisyCircuit:
    with open(path) as fh:
        return NoisyCircuit.from_json(fh.read())


def random_circuit(
    rng: np.random.Generator,
    n: int,
    n_diagonal: int,
    p: float,
    depth: int = 6,
) -> NoisyCircuit:
    """Random Clifford+T circuit with depolarizing noise after every diagonal gate
    and after every two-qubit gate; used for the estimator corpus."""
    cl1 = ["H", "S", "SQRT_X", "SQRT_Y", "X", "Z"]
    slots = sorted(rng.choice(depth, size=min(n_diagonal, depth), replace=False).tolist())
    ins: list[Instruction] = []
    for layer in range(depth):
        for q in range(n):
            ins.append(Instruction(str(rng.choice(cl1)), (q,)))
        if layer in slots:
            q = int(rng.integers(n))
            ins.append(Instruction("T", (q,)))
            if p > 0:
                ins.append(Instruction("depo1", (q,), (p,)))
        if n > 1:
            a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
            ins.append(Instruction(str(rng.choice(["CNOT", "CZ"])), (a, b)))
            if p > 0 and layer % 2 == 0:
                ins.append(Instruction("depo2", (a, b), (p,)))
    letters = "".join(rng.choice(list("IXYZ"), size=n))
    if set(letters) == {"I"}:
        letters = "Z" + letters[1:]
    init = tuple(str(x) for x in rng.choice(list(_PREP), size=n))
    return NoisyCircuit(n, tuple(ins), PauliString.from_str(letters), init)


__all__ = [
    "Instruction",
    "NoisyCircuit",
    "choi_mixture",
    "load_circuit",
    "random_circuit",
]
