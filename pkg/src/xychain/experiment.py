"""Product-operator simulation of the transfer experiment.

States are traceless deviation density matrices. Amplitudes reported for C1
and C3 are Pauli coefficients, not integrated spectral lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .nmrcompile import (
    SAMPLE_SYSTEM,
    GradientZ,
    PulseSequence,
    RfPulse,
    SpinSystem,
    event_unitary,
)
from .spinops import (
    PauliLike,
    embed,
    hs_coefficient,
    identity,
    is_hermitian,
    is_unitary,
    max_abs,
    n_spins,
    pauli_expansion,
    single,
)
from .xymodel import pst_unitary

SQRT2 = math.sqrt(2.0)

# fitted spectrometer amplitudes (arbitrary units); reference only
EXPERIMENTAL_A1 = 6.20
EXPERIMENTAL_A3 = 5.65

# initial operator, C1 term, C3 term, intermediate antiphase term
BRANCHES = {
    "A": ("YII", "YII", "ZZY", "ZXI"),
    "B": ("XII", "XII", "ZZX", "ZYI"),
}


@dataclass(frozen=True)
class DeviationState:
    """Traceless Hermitian deviation density matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n_spins(m)
        if not is_hermitian(m):
            raise ValueError("deviation state must be Hermitian")
        if abs(np.trace(m)) > 1e-10 * max(1.0, max_abs(m)) * m.shape[0]:
            raise ValueError("deviation state must be traceless")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_paulis(cls, terms: dict[str, float], n: int | None = None) -> "DeviationState":
        if not terms:
            if n is None:
                raise ValueError("spin count needed for an empty state")
            return cls(np.zeros((2**n, 2**n), dtype=complex))
        return cls(sum(c * embed(p) for p, c in terms.items()))

    @property
    def n(self) -> int:
        return n_spins(self.matrix)

    def coefficient(self, p: PauliLike) -> float:
        return hs_coefficient(self.matrix, p)

    def coefficients(self, tol: float = 1e-12) -> dict[str, float]:
        return pauli_expansion(self.matrix, tol)

    def norm(self) -> float:
        return float(np.sqrt(np.real(np.trace(self.matrix @ self.matrix))))


@dataclass(frozen=True)
class QubitState:
    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1) > 1e-12:
            raise ValueError("qubit state is not normalized")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "QubitState":
        norm = math.hypot(abs(alpha), abs(beta))
        if norm == 0:
            raise ValueError("zero vector is not a state")
        return cls(alpha / norm, beta / norm)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)


@dataclass(frozen=True)
class AmplitudeSample:
    phi: float
    amp_c1: float
    amp_c3: float


def equilibrium_state(sys: SpinSystem = SAMPLE_SYSTEM) -> DeviationState:
    """Thermal deviation ``sum_j gamma_j I_z^j`` with ``I_z = Z/2``."""
    return DeviationState.from_paulis(
        {single("Z", j, sys.n).letters: g / 2 for j, g in enumerate(sys.gamma, 1)}, sys.n
    )


def preparation_sequence() -> PulseSequence:
    """``[pi/2]_y^2 - [pi/2]_y^3 - [grad]_z - [pi/2]_x^1``: equilibrium to ``sigma_y^1``."""
    q = math.pi / 2
    return PulseSequence(
        (RfPulse(q, "y", (2,)), RfPulse(q, "y", (3,)), GradientZ(), RfPulse(q, "x", (1,)))
    )


def apply_gradient(s: DeviationState) -> DeviationState:
    """Dephase every Pauli term containing an X or Y on any spin."""
    out = np.zeros_like(s.matrix)
    for letters, c in s.coefficients(tol=0.0).items():
        if "X" not in letters and "Y" not in letters:
            out += c * embed(letters)
    return DeviationState(out)


def evolve(s: DeviationState, u: np.ndarray) -> DeviationState:
    """``u s u^dagger``."""
    if u.shape != s.matrix.shape:
        raise ValueError(f"dimension mismatch {u.shape} vs {s.matrix.shape}")
    if not is_unitary(u):
        raise ValueError("propagator is not unitary")
    m = u @ s.matrix @ u.conj().T
    return DeviationState((m + m.conj().T) / 2)


def apply_sequence(
    s: DeviationState, seq: PulseSequence | Iterable, sys: SpinSystem = SAMPLE_SYSTEM
) -> DeviationState:
    """Run a sequence on a state, gradients included."""
    for e in seq:
        s = apply_gradient(s) if isinstance(e, GradientZ) else evolve(s, event_unitary(e, sys))
    return s


def branch_propagator(which: str, phi: float) -> np.ndarray:
    """Closed forms ``U_A``, ``U_B`` and ``U = U_A U_B`` at phase ``phi``."""
    c, s = math.cos(phi), math.sin(phi)
    if which == "A":
        return c * identity(3) - 1j / SQRT2 * s * (embed("XXI") + embed("IYY"))
    if which == "B":
        return c * identity(3) - 1j / SQRT2 * s * (embed("YYI") + embed("IXX"))
    if which == "full":
        return branch_propagator("A", phi) @ branch_propagator("B", phi)
    raise ValueError(f"branch must be 'A', 'B' or 'full', got {which!r}")


def initial_state(branch: str) -> DeviationState:
    try:
        start = BRANCHES[branch][0]
    except KeyError:
        raise ValueError(f"branch must be 'A' or 'B', got {branch!r}") from None
    return DeviationState(embed(start))


def amplitude_sample(phi: float, branch: str = "A") -> AmplitudeSample:
    _, c1, c3, _ = BRANCHES[branch]
    s = evolve(initial_state(branch), branch_propagator(branch, phi))
    return AmplitudeSample(float(phi), s.coefficient(c1) + 0.0, 0.0 - s.coefficient(c3))


def amplitude_curve(phis: Sequence[float], branch: str = "A") -> list[AmplitudeSample]:
    """C1 and C3 amplitudes over a phase grid, sorted by ``phi``.

    Branch A starts from ``sigma_y^1`` and tracks ``Y1`` and ``-Z1 Z2 Y3``;
    branch B starts from ``sigma_x^1`` and tracks ``X1`` and ``-Z1 Z2 X3``.
    Exact values are ``cos^2 phi`` and ``sin^2 phi``.
    """
    initial_state(branch)
    return [amplitude_sample(phi, branch) for phi in sorted(phis)]


def fit_cos2(data: Sequence[AmplitudeSample]) -> tuple[float, float, np.ndarray]:
    """Least-squares ``amp_c1 ~ a1 cos^2 phi`` and ``amp_c3 ~ a3 sin^2 phi``.

    Returns ``(a1, a3, residuals)`` with residuals shaped ``(len(data), 2)``.
    """
    if len(data) < 3:
        raise ValueError("need at least three samples to fit")
    phi = np.array([d.phi for d in data])
    if np.ptp(phi) == 0:
        raise ValueError("degenerate design: all samples share one phase")
    c2, s2 = np.cos(phi) ** 2, np.sin(phi) ** 2
    if c2 @ c2 == 0 or s2 @ s2 == 0:
        raise ValueError("degenerate design: a basis curve vanishes on every sample")
    y1 = np.array([d.amp_c1 for d in data])
    y3 = np.array([d.amp_c3 for d in data])
    a1 = float(c2 @ y1 / (c2 @ c2))
    a3 = float(s2 @ y3 / (s2 @ s2))
    residuals = np.column_stack([y1 - a1 * c2, y3 - a3 * s2])
    return a1, a3, residuals


def pst_transfer(q: QubitState, correct_phase: bool = True) -> tuple[np.ndarray, float]:
    """Send ``q`` from spin 1 to spin 3 with the transfer propagator.

    The raw output is ``|00>(alpha|0> - beta|1>)``; ``correct_phase`` applies
    ``sigma_z`` to spin 3. Fidelity is measured against ``|00>(alpha|0> + beta|1>)``.
    """
    if not isinstance(q, QubitState):
        raise TypeError("expected a QubitState")
    zero = np.array([1, 0], dtype=complex)
    psi_in = np.kron(q.vector, np.kron(zero, zero))
    out = pst_unitary() @ psi_in
    if correct_phase:
        out = embed("IIZ") @ out
    target = np.kron(zero, np.kron(zero, q.vector))
    return out, float(abs(np.vdot(target, out)) ** 2)
