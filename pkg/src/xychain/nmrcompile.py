"""Liquid-state NMR realization of the XY propagator.

Sign conventions
----------------
* An rf pulse ``[theta]_a^S`` is ``exp(+i theta/2 sum_{j in S} sigma_a^j)``.
* A z rotation and the three-body ``ZZZ`` event use the same rule:
  ``angle`` means ``exp(+i angle/2 G)``.
* A coupling delay ``[tau_jl]`` is ``exp(-i pi J_jl tau / 2 Z_j Z_l)`` with all
  other couplings refocused and chemical shifts ignored.

Sequences are stored in time order; the first event acts first.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .spinops import exp_pauli_string, identity, n_spins, single
from .xymodel import propagator_analytic

# Larmor ratio gamma(1H) / gamma(13C)
GAMMA_H_OVER_C = 42.577478 / 10.7084


@dataclass(frozen=True)
class SpinSystem:
    """Weakly coupled spins: offsets ``nu`` (Hz), couplings ``j`` (Hz), relative gammas.

    The default is the labelled trichloroethylene sample: C1, H2, C3.
    """

    n: int = 3
    nu: tuple[float, ...] = (0.0, 0.0, 904.4)
    j: tuple[tuple[float, ...], ...] = (
        (0.0, 200.9, 103.1),
        (200.9, 0.0, 9.16),
        (103.1, 9.16, 0.0),
    )
    gamma: tuple[float, ...] = (1.0, GAMMA_H_OVER_C, 1.0)

    def __post_init__(self):
        j = np.asarray(self.j, dtype=float)
        if j.shape != (self.n, self.n):
            raise ValueError(f"coupling matrix must be {self.n}x{self.n}")
        if not np.allclose(j, j.T, atol=0, rtol=0) or np.any(np.diag(j) != 0):
            raise ValueError("coupling matrix must be symmetric with zero diagonal")
        if len(self.nu) != self.n or len(self.gamma) != self.n:
            raise ValueError("nu and gamma need one entry per spin")
        object.__setattr__(self, "j", tuple(tuple(float(v) for v in row) for row in j))
        object.__setattr__(self, "nu", tuple(float(v) for v in self.nu))
        object.__setattr__(self, "gamma", tuple(float(v) for v in self.gamma))

    def coupling(self, a: int, b: int) -> float:
        return self.j[a - 1][b - 1]

    @classmethod
    def from_constants(
        cls,
        j12: float = 200.9,
        j23: float = 9.16,
        j13: float = 103.1,
        nu: tuple[float, float, float] = (0.0, 0.0, 904.4),
        gamma_ratio: float = GAMMA_H_OVER_C,
    ) -> "SpinSystem":
        j = ((0.0, j12, j13), (j12, 0.0, j23), (j13, j23, 0.0))
        return cls(3, tuple(nu), j, (1.0, gamma_ratio, 1.0))


SAMPLE_SYSTEM = SpinSystem()


@dataclass(frozen=True)
class RfPulse:
    angle: float
    axis: str
    spins: tuple[int, ...]

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError(f"rf axis must be 'x' or 'y', got {self.axis!r}")
        spins = tuple(sorted(set(int(s) for s in self.spins)))
        if not spins:
            raise ValueError("rf pulse needs at least one spin")
        object.__setattr__(self, "spins", spins)


@dataclass(frozen=True)
class CouplingDelay:
    pair: tuple[int, int]
    tau: float

    def __post_init__(self):
        a, b = self.pair
        if not a < b:
            raise ValueError(f"coupling pair must be ordered j < l, got {self.pair}")
        if not self.tau >= 0:
            raise ValueError(f"delay must be non-negative, got {self.tau}")
        object.__setattr__(self, "pair", (int(a), int(b)))


@dataclass(frozen=True)
class ZRotation:
    angle: float
    spin: int


@dataclass(frozen=True)
class ThreeBodyZ:
    """Unexpanded ``exp(+i angle/2 Z1 Z2 Z3)``."""

    angle: float


@dataclass(frozen=True)
class GradientZ:
    pass


PulseEvent = Union[RfPulse, CouplingDelay, ZRotation, ThreeBodyZ, GradientZ]


@dataclass(frozen=True)
class PulseSequence:
    events: tuple[PulseEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.events + other.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return PulseSequence(self.events[item])
        return self.events[item]

    @property
    def duration(self) -> float:
        """Total free-evolution time; rf pulses are taken as zero width."""
        return sum(e.tau for e in self.events if isinstance(e, CouplingDelay))

    def to_text(self) -> str:
        return "".join(format_event(e) + "\n" for e in self.events)

    @classmethod
    def from_text(cls, text: str) -> "PulseSequence":
        events = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                events.append(parse_event(line))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"line {lineno}: cannot parse {line!r}: {exc}") from None
        return cls(tuple(events))


def _num(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def format_event(e: PulseEvent) -> str:
    if isinstance(e, RfPulse):
        return f"RF axis={e.axis} angle={_num(e.angle)} spins={','.join(map(str, e.spins))}"
    if isinstance(e, CouplingDelay):
        return f"DELAY pair={e.pair[0]},{e.pair[1]} tau={_num(e.tau)}"
    if isinstance(e, ZRotation):
        return f"ZROT spin={e.spin} angle={_num(e.angle)}"
    if isinstance(e, ThreeBodyZ):
        return f"ZZZ angle={_num(e.angle)}"
    if isinstance(e, GradientZ):
        return "GRAD"
    raise TypeError(f"unknown pulse event {e!r}")


_FIELD = re.compile(r"(\w+)=(\S+)")


def parse_event(line: str) -> PulseEvent:
    kind, _, rest = line.partition(" ")
    kv = dict(_FIELD.findall(rest))
    if kind == "RF":
        spins = tuple(int(s) for s in kv["spins"].split(","))
        return RfPulse(float(kv["angle"]), kv["axis"], spins)
    if kind == "DELAY":
        a, b = (int(s) for s in kv["pair"].split(","))
        return CouplingDelay((a, b), float(kv["tau"]))
    if kind == "ZROT":
        return ZRotation(float(kv["angle"]), int(kv["spin"]))
    if kind == "ZZZ":
        return ThreeBodyZ(float(kv["angle"]))
    if kind == "GRAD":
        return GradientZ()
    raise ValueError(f"unknown event kind {kind!r}")


def rf_pulse_unitary(e: RfPulse, n: int = 3) -> np.ndarray:
    u = identity(n)
    for s in e.spins:
        u = u @ exp_pauli_string(-e.angle / 2, single(e.axis.upper(), s, n))
    return u


def coupling_delay_unitary(
    pair: tuple[int, int], tau: float, sys: SpinSystem = SAMPLE_SYSTEM
) -> np.ndarray:
    if tau < 0:
        raise ValueError("delay must be non-negative")
    a, b = pair
    zz = single("Z", a, sys.n) * single("Z", b, sys.n)
    return exp_pauli_string(math.pi * sys.coupling(a, b) * tau / 2, zz)


def event_unitary(e: PulseEvent, sys: SpinSystem = SAMPLE_SYSTEM) -> np.ndarray:
    if isinstance(e, RfPulse):
        return rf_pulse_unitary(e, sys.n)
    if isinstance(e, CouplingDelay):
        return coupling_delay_unitary(e.pair, e.tau, sys)
    if isinstance(e, ZRotation):
        return exp_pauli_string(-e.angle / 2, single("Z", e.spin, sys.n))
    if isinstance(e, ThreeBodyZ):
        if sys.n != 3:
            raise ValueError("ZZZ event needs a three-spin system")
        return exp_pauli_string(-e.angle / 2, "ZZZ")
    if isinstance(e, GradientZ):
        raise ValueError("a z gradient is not unitary; simulate it at the state level")
    raise TypeError(f"unknown pulse event {e!r}")


def simulate_sequence(seq: PulseSequence | Iterable[PulseEvent], sys: SpinSystem = SAMPLE_SYSTEM) -> np.ndarray:
    """Propagator of a sequence: the first event is applied first."""
    u = identity(sys.n)
    for e in seq:
        u = event_unitary(e, sys) @ u
    return u


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """``|tr(u^dagger v)| / 2**n``; equals 1 iff ``u`` and ``v`` differ by a global phase."""
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch {u.shape} vs {v.shape}")
    n_spins(u)
    return float(abs(np.trace(u.conj().T @ v))) / u.shape[0]


def zzz_block(sign: int, sys: SpinSystem = SAMPLE_SYSTEM) -> PulseSequence:
    """Pulse/delay realization of ``exp(-i sign pi/8 Z1 Z2 Z3)`` through the proton.

    ``sign=+1`` uses the ``9/(2 J12)`` delays, ``sign=-1`` the ``7/(2 J12)`` ones.
    Exact up to global phase.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    j12, j23 = sys.coupling(1, 2), sys.coupling(2, 3)
    t12 = (9 if sign == 1 else 7) / (2 * j12)
    return PulseSequence(
        (
            RfPulse(-math.pi / 2, "x", (2,)),
            RfPulse(-math.pi, "y", (2,)),
            CouplingDelay((1, 2), t12),
            RfPulse(math.pi / 2, "y", (2,)),
            CouplingDelay((2, 3), 1 / (4 * j23)),
            RfPulse(math.pi / 2, "y", (2,)),
            CouplingDelay((1, 2), t12),
            RfPulse(math.pi / 2, "x", (2,)),
        )
    )


def selective_x_block(spin: int, angle: float) -> PulseSequence:
    """``exp(+i angle/2 X_spin)`` for a carbon from hard y pulses and a z rotation.

    The sandwiching pulses stay at ``+-pi/2``; the rotation angle is carried by
    the z rotation, so any ``angle`` is realized exactly.
    """
    if spin not in (1, 3):
        raise ValueError("selective x rotations are built for carbon spins 1 and 3")
    return PulseSequence(
        (
            RfPulse(math.pi / 2, "y", (1, 3)),
            ZRotation(angle, spin),
            RfPulse(-math.pi / 2, "y", (1, 3)),
        )
    )


def z_double_block() -> PulseSequence:
    """``[pi]_x^{1,3} - [pi]_y^{1,3}``, equal to ``exp(i pi/2 (Z1 + Z3))`` up to phase."""
    return PulseSequence((RfPulse(math.pi, "x", (1, 3)), RfPulse(math.pi, "y", (1, 3))))


def _zz_delay(pair: tuple[int, int], phi: float, sys: SpinSystem) -> CouplingDelay:
    # exp(-i phi Z Z): pi J tau / 2 = phi (mod 2 pi), tau >= 0
    angle = phi % (2 * math.pi)
    return CouplingDelay(pair, 2 * angle / (math.pi * sys.coupling(*pair)))


def _zzz(sign: int, expand: bool, sys: SpinSystem) -> PulseSequence:
    if expand:
        return zzz_block(sign, sys)
    return PulseSequence((ThreeBodyZ(-sign * math.pi / 4),))


def _x_carbon(spin: int, angle: float, expand: bool) -> PulseSequence:
    if expand:
        return selective_x_block(spin, angle)
    return PulseSequence((RfPulse(angle, "x", (spin,)),))


def _z_double(expand: bool) -> PulseSequence:
    if expand:
        return z_double_block()
    return PulseSequence((ZRotation(math.pi, 1), ZRotation(math.pi, 3)))


def _rf(angle: float, axis: str, *spins: int) -> PulseSequence:
    return PulseSequence((RfPulse(angle, axis, spins),))


def compile_segments(
    phi: float, expand: bool = False, sys: SpinSystem = SAMPLE_SYSTEM
) -> tuple[PulseSequence, PulseSequence]:
    """Time-ordered halves of the compiled propagator.

    The first half (applied first) carries the ``Z2 Z3`` coupling and
    corresponds to ``U_B``; the second carries ``Z1 Z2`` and corresponds to
    ``U_A``. Each half alone matches its branch only up to the shared
    single-spin frame pulses at the junction.
    """
    if not math.isfinite(phi):
        raise ValueError("phi must be finite")
    phi = phi % (2 * math.pi)
    q = math.pi / 2
    first = (
        _rf(q, "y", 3)
        + _x_carbon(1, -q, expand)
        + _zzz(-1, expand, sys)
        + _rf(q, "y", 2)
        + PulseSequence((_zz_delay((2, 3), phi, sys),))
        + _rf(-q, "y", 2)
        + _zzz(1, expand, sys)
        + PulseSequence((ZRotation(-q, 1),))
        + _z_double(expand)
    )
    second = (
        _rf(-q, "y", 3)
        + _rf(q, "x", 1, 3)
        + _zzz(-1, expand, sys)
        + _rf(q, "y", 2)
        + PulseSequence((_zz_delay((1, 2), phi, sys),))
        + _rf(-q, "y", 2)
        + _zzz(1, expand, sys)
        + _x_carbon(3, q, expand)
        + _rf(-q, "y", 1)
    )
    return first, second


def compile_u(phi: float, expand: bool = False, sys: SpinSystem = SAMPLE_SYSTEM) -> PulseSequence:
    """Pulse sequence whose propagator is the XY evolution at phase ``phi``.

    ``phi`` is reduced modulo ``2 pi`` so every delay is non-negative. With
    ``expand`` the three-body exponentials, selective carbon x pulses and the
    double z rotation are replaced by their hard-pulse/delay realizations.
    """
    first, second = compile_segments(phi, expand, sys)
    return first + second


def ua_segment_duration(phi: float, sys: SpinSystem = SAMPLE_SYSTEM) -> float:
    """Delay time spent realizing ``U_A`` (two ZZZ blocks and the ``Z1 Z2`` delay)."""
    return compile_segments(phi, True, sys)[1].duration


def compiled_fidelity(phi: float, expand: bool = False, sys: SpinSystem = SAMPLE_SYSTEM) -> float:
    return fidelity(simulate_sequence(compile_u(phi, expand, sys), sys), propagator_analytic(phi))
