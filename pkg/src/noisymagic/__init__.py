"""Cost accounting and samplers for noisy circuits with magic-state gadgets."""

__version__ = "0.1.0"

from .channels import (
    PTM,
    PauliChannel,
    channel_stabilizer_norm,
    depolarizing1,
    depolarizing2,
    dephasing,
    pauli_noise,
    ptm_of_gate,
    unit_cell_norms,
)
from .circuits import NoisyCircuit, random_circuit
from .gadgets import (
    CHOI_CORRECTION,
    ResourceState,
    fused_t_resource,
    noise_teleport,
    push_dephasing,
    teleport_diagonal_gate,
    unit_cell_resource,
)
from .pauli import PauliString, PauliVector
from .rom import (
    DecompositionCache,
    InfeasibleError,
    QuasiDecomposition,
    SolverError,
    full_basis,
    reduced_basis,
    rom,
)
from .rqc import RqcSpec, heisenberg_cost, scaling_sweep, stabilizer_cost
from .samplers import heisenberg_estimate, hoeffding_shots, stabilizer_sampling_estimate
from .stabilizer import StabilizerTableau

__all__ = [name for name in dir() if not name.startswith("_")]
