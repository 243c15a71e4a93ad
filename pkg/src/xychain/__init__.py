"""Three-spin Heisenberg XY chain simulated with liquid-state NMR operations.

Submodules
----------
spinops     Pauli-string and dense operator algebra
xymodel     XY Hamiltonian, exact/analytic/factored propagators, transfer unitary
nmrcompile  pulse sequences, their simulation and phase-insensitive fidelity
experiment  deviation-state evolution, preparation, amplitude sweeps, state transfer
cli         ``xychain`` command
"""

from .experiment import (
    AmplitudeSample,
    DeviationState,
    QubitState,
    amplitude_curve,
    branch_propagator,
    equilibrium_state,
    evolve,
    fit_cos2,
    preparation_sequence,
    pst_transfer,
)
from .nmrcompile import SAMPLE_SYSTEM, PulseSequence, SpinSystem, compile_u, fidelity, simulate_sequence
from .spinops import PauliString, commutator, embed, exp_hermitian, exp_pauli_string, hs_coefficient
from .xymodel import (
    XYChainSpec,
    build_xy_hamiltonian,
    decompose_factors,
    propagator_analytic,
    pst_unitary,
)

__version__ = "0.1.0"
