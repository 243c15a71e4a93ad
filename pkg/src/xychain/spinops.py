"""Dense spin-1/2 operator algebra built on Pauli strings.

Basis convention: spin 1 is the leftmost tensor factor (most significant
bit) and ``|0>`` is spin up, so ``Z = diag(1, -1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

MAX_SPINS = 12
HERMITIAN_TOL = 1e-10

_PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (phase, letter) with sigma_a sigma_b = phase * sigma_letter
_PRODUCT = {}
for _a in "IXYZ":
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)

_PHASES = (1, -1, 1j, -1j)
_PHASE_PREFIX = {"+": 1, "-": -1, "+i": 1j, "i": 1j, "-i": -1j}


def _snap_phase(phase: complex) -> complex:
    for p in _PHASES:
        if abs(phase - p) < 1e-12:
            return p
    raise ValueError(f"phase must be one of +1, -1, +i, -i, got {phase!r}")


@dataclass(frozen=True)
class PauliString:
    """A phased tensor product of single-spin Pauli letters.

    ``letters[0]`` acts on spin 1. Multiplication with ``*`` is the exact
    symbolic product, so closure under multiplication holds by construction.

    Examples
    --------
    >>> PauliString.parse("XXI") * PauliString.parse("YYI")
    PauliString(phase=-1, letters='ZZI')
    """

    phase: complex
    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(c not in "IXYZ" for c in letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "letters", letters)
        phase = _snap_phase(complex(self.phase))
        if phase.imag == 0:
            phase = int(phase.real)
        object.__setattr__(self, "phase", phase)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"XZY"``, ``"-ZZY"``, ``"iXYI"`` or ``"-iZ"``."""
        text = text.strip()
        # lowercase ``i`` is the phase; letters must be uppercase
        for prefix in ("-i", "+i", "i", "-", "+"):
            if text.startswith(prefix):
                return cls(_PHASE_PREFIX[prefix], text[len(prefix):])
        return cls(1, text)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (1, -1)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("Pauli strings act on different spin counts")
        phase = self.phase * other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            ph, c = _PRODUCT[(a, b)]
            phase *= ph
            out.append(c)
        return PauliString(phase, "".join(out))

    def __neg__(self) -> "PauliString":
        return PauliString(-self.phase, self.letters)

    def __str__(self) -> str:
        prefix = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return prefix + self.letters


PauliLike = Union[PauliString, str]


def as_pauli(p: PauliLike) -> PauliString:
    return p if isinstance(p, PauliString) else PauliString.parse(p)


def single(letter: str, spin: int, n: int) -> PauliString:
    """Pauli string with ``letter`` on ``spin`` (1-based) and identity elsewhere."""
    if not 1 <= spin <= n:
        raise ValueError(f"spin {spin} outside 1..{n}")
    letters = ["I"] * n
    letters[spin - 1] = letter
    return PauliString(1, "".join(letters))


def pauli_matrix(letter: str) -> np.ndarray:
    """2x2 matrix of the Pauli letter ``I``, ``X``, ``Y`` or ``Z``."""
    try:
        return _PAULI[letter.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli letter {letter!r}") from None


def embed(p: PauliLike, n: int | None = None) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a Pauli string, spin 1 leftmost."""
    p = as_pauli(p)
    if n is not None and n != p.n:
        raise ValueError(f"Pauli string has {p.n} letters, expected {n}")
    if p.n > MAX_SPINS:
        raise ValueError(f"at most {MAX_SPINS} spins supported")
    mat = reduce(np.kron, (_PAULI[c] for c in p.letters))
    return p.phase * mat


def identity(n: int) -> np.ndarray:
    return np.eye(2**n, dtype=complex)


def n_spins(m: np.ndarray) -> int:
    dim = m.shape[0]
    if m.ndim != 2 or m.shape[1] != dim or dim & (dim - 1) or dim < 2:
        raise ValueError(f"expected a square 2**n matrix, got shape {m.shape}")
    return dim.bit_length() - 1


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def max_abs(m: np.ndarray) -> float:
    """Max-entry norm."""
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return max_abs(m - m.conj().T) <= tol


def is_unitary(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return max_abs(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def exp_pauli_string(theta: float, p: PauliLike) -> np.ndarray:
    """Closed form of ``exp(-i theta P)`` for a Hermitian Pauli string.

    Uses ``P @ P = 1``: the result is ``cos(theta) - i sin(theta) P``.
    """
    p = as_pauli(p)
    if not p.is_hermitian:
        raise ValueError(f"generator {p} is not Hermitian (phase must be +1 or -1)")
    return np.cos(theta) * identity(p.n) - 1j * np.sin(theta) * embed(p)


def exp_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Propagator ``exp(-i h t)`` by eigendecomposition of Hermitian ``h``."""
    h = np.asarray(h, dtype=complex)
    n_spins(h)
    if not is_hermitian(h):
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def hs_coefficient(m: np.ndarray, p: PauliLike) -> float:
    """Coefficient of ``p`` in the Pauli expansion of Hermitian ``m``.

    Computed as ``Re tr(m P) / 2**n``.
    """
    p = as_pauli(p)
    return float(np.real(np.trace(m @ embed(p, n_spins(m))))) / m.shape[0]


def all_pauli_strings(n: int):
    """Every phase-free Pauli string on ``n`` spins, in lexicographic IXYZ order."""
    from itertools import product

    for letters in product("IXYZ", repeat=n):
        yield PauliString(1, "".join(letters))


def pauli_expansion(m: np.ndarray, tol: float = 0.0) -> dict[str, float]:
    """Real Pauli coefficients of a Hermitian matrix keyed by letter string."""
    out = {}
    for p in all_pauli_strings(n_spins(m)):
        c = hs_coefficient(m, p)
        if abs(c) > tol:
            out[p.letters] = c
    return out


def from_pauli_sum(terms: dict[str, float] | list[tuple[float, PauliLike]]) -> np.ndarray:
    """Dense matrix of ``sum_k c_k P_k``."""
    items = terms.items() if isinstance(terms, dict) else ((p, c) for c, p in terms)
    mat = None
    for p, c in items:
        term = c * embed(p)
        mat = term if mat is None else mat + term
    if mat is None:
        raise ValueError("empty Pauli sum")
    return mat
