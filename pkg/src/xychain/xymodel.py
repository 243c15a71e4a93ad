"""Heisenberg XY chain: Hamiltonian, exact and factored propagators, PST unitary.

All evolution entry points take the phase ``phi = J t / sqrt(2)``; the
matching time is ``t = phi * sqrt(2) / J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .spinops import (
    PauliString,
    as_pauli,
    embed,
    exp_hermitian,
    exp_pauli_string,
    identity,
)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class XYChainSpec:
    """Open chain of ``n`` spins with per-bond XY couplings (rad/s, hbar = 1)."""

    n: int = 3
    couplings: tuple[float, ...] = field(default=(1.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        if self.n < 2:
            raise ValueError("an XY chain needs at least two spins")
        if len(self.couplings) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} couplings, got {len(self.couplings)}")
        if not all(math.isfinite(c) for c in self.couplings):
            raise ValueError("couplings must be finite")

    @classmethod
    def uniform(cls, n: int = 3, j: float = 1.0) -> "XYChainSpec":
        return cls(n, (j,) * (n - 1))

    @property
    def is_uniform_three_spin(self) -> bool:
        return self.n == 3 and self.couplings[0] == self.couplings[1]

    def time_for(self, phi: float) -> float:
        return phi * SQRT2 / self.couplings[0]


UNIFORM_CHAIN = XYChainSpec.uniform(3, 1.0)


def _require_uniform_three(chain: XYChainSpec | None) -> XYChainSpec:
    chain = UNIFORM_CHAIN if chain is None else chain
    if not chain.is_uniform_three_spin:
        raise ValueError("only the uniform three-spin chain has the closed-form decomposition")
    return chain


def _bond(letter: str, j: int, n: int) -> PauliString:
    letters = ["I"] * n
    letters[j] = letters[j + 1] = letter
    return PauliString(1, "".join(letters))


def build_xy_hamiltonian(chain: XYChainSpec = UNIFORM_CHAIN) -> np.ndarray:
    """``H = 1/2 sum_bonds J_b (X_j X_j+1 + Y_j Y_j+1)``."""
    n = chain.n
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j, jb in enumerate(chain.couplings):
        h += 0.5 * jb * (embed(_bond("X", j, n)) + embed(_bond("Y", j, n)))
    return h


def total_z(n: int) -> np.ndarray:
    return sum(embed(PauliString(1, "I" * j + "Z" + "I" * (n - j - 1))) for j in range(n))


def operators_AB(chain: XYChainSpec = UNIFORM_CHAIN) -> tuple[np.ndarray, np.ndarray]:
    """Commuting split ``A = (XXI + IYY)/2``, ``B = (YYI + IXX)/2`` of ``H/J``."""
    if chain.n != 3:
        raise ValueError("the A/B split is defined for three spins only")
    a = 0.5 * (embed("XXI") + embed("IYY"))
    b = 0.5 * (embed("YYI") + embed("IXX"))
    return a, b


class AngularMomentum(NamedTuple):
    """Three Pauli strings whose halves obey ``[Lx, Ly] = i Lz`` cyclically."""

    x: PauliString
    y: PauliString
    z: PauliString

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(0.5 * embed(p) for p in self)


def angular_momentum_triples() -> tuple[AngularMomentum, AngularMomentum]:
    la = AngularMomentum(*(PauliString.parse(s) for s in ("XXI", "IYY", "XZY")))
    lb = AngularMomentum(*(PauliString.parse(s) for s in ("IXX", "YYI", "YZX")))
    return la, lb


@dataclass(frozen=True)
class FactorSequence:
    """Product ``prod_k exp(-i theta_k P_k)`` in written (left-to-right) order.

    The rightmost factor acts first in time.
    """

    factors: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        fs = tuple((float(t), as_pauli(p)) for t, p in self.factors)
        for _, p in fs:
            if not p.is_hermitian:
                raise ValueError(f"factor generator {p} is not Hermitian")
        object.__setattr__(self, "factors", fs)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def unitary(self) -> np.ndarray:
        n = self.factors[0][1].n
        u = identity(n)
        for theta, p in self.factors:
            u = u @ exp_pauli_string(theta, p)
        return u


def decompose_factors(phi: float, chain: XYChainSpec | None = None) -> FactorSequence:
    """Six-factor form of ``U = U_A U_B``, each factor a single Pauli exponential."""
    _require_uniform_three(chain)
    q = math.pi / 8
    return FactorSequence(
        (
            (q, PauliString.parse("XZY")),
            (phi, PauliString.parse("XXI")),
            (-q, PauliString.parse("XZY")),
            (q, PauliString.parse("YZX")),
            (phi, PauliString.parse("IXX")),
            (-q, PauliString.parse("YZX")),
        )
    )


def exact_propagator(phi: float, chain: XYChainSpec | None = None) -> np.ndarray:
    """Reference ``exp(-i H t)`` at ``t = phi sqrt(2) / J`` by eigendecomposition."""
    chain = _require_uniform_three(chain)
    return exp_hermitian(build_xy_hamiltonian(chain), chain.time_for(phi))


def propagator_analytic(phi: float, chain: XYChainSpec | None = None) -> np.ndarray:
    """Closed-form 8x8 propagator, basis order ``|000>, |001>, ..., |111>``."""
    _require_uniform_three(chain)
    c2 = math.cos(phi) ** 2
    s2 = math.sin(phi) ** 2
    cc = math.cos(2 * phi)
    h = -1j / SQRT2 * math.sin(2 * phi)
    u = np.zeros((8, 8), dtype=complex)
    u[0, 0] = u[7, 7] = 1.0
    # one-excitation block on |001>, |010>, |100>
    u[1, 1], u[1, 2], u[1, 4] = c2, h, -s2
    u[2, 1], u[2, 2], u[2, 4] = h, cc, h
    u[4, 1], u[4, 2], u[4, 4] = -s2, h, c2
    # two-excitation block on |011>, |101>, |110>
    u[3, 3], u[3, 5], u[3, 6] = c2, h, -s2
    u[5, 3], u[5, 5], u[5, 6] = h, cc, h
    u[6, 3], u[6, 5], u[6, 6] = -s2, h, c2
    return u


def pst_unitary() -> np.ndarray:
    """Transfer propagator at ``t = pi / (sqrt(2) J)``."""
    return propagator_analytic(math.pi / 2)


def magnetization_sectors(n: int) -> np.ndarray:
    """Number of spins down (``|1>``) for every basis index."""
    return np.array([bin(k).count("1") for k in range(2**n)])


def decomposition_deviations(phi: float, chain: XYChainSpec | None = None) -> dict[str, float]:
    """Pairwise max-entry gaps between the closed form, six-factor product and exact exponential."""
    analytic = propagator_analytic(phi, chain)
    factored = decompose_factors(phi, chain).unitary()
    exact = exact_propagator(phi, chain)
    gap = lambda a, b: float(np.max(np.abs(a - b)))  # noqa: E731
    return {
        "analytic-exact": gap(analytic, exact),
        "factored-exact": gap(factored, exact),
        "analytic-factored": gap(analytic, factored),
    }
