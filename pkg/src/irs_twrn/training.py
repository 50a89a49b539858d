"""IRS phase training matrices, phase quantization and the quantization loss factor.

Column ``i`` of a training matrix is the IRS phase vector used for pilot
symbol ``i``. Entries are written ``exp(-1j * phase)``; quantization acts
on that ``phase``, snapping it to the offset grid
``{pi/L, 3*pi/L, ..., (2L-1)*pi/L}`` with ``L = 2**bits``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    InvalidResolutionError,
    SingularGramError,
    UnsupportedOrderError,
)

UNIT_MODULUS_TOL = 1e-12
# Largest condition number of Q for which the Gram trace is still reported.
GRAM_COND_LIMIT = 1e12
# Phases within this many grid cells of a midpoint are treated as exact midpoints.
_MIDPOINT_SNAP = 1e-9


class Scheme(str, enum.Enum):
    DFT = "DFT"
    HADAMARD = "Hadamard"
    RANDOM_PHASE = "RandomPhase"

    @classmethod
    def parse(cls, name: "str | Scheme") -> "Scheme":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {
            "dft": cls.DFT,
            "hadamard": cls.HADAMARD,
            "had": cls.HADAMARD,
            "randomphase": cls.RANDOM_PHASE,
            "random": cls.RANDOM_PHASE,
            "rpm": cls.RANDOM_PHASE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown training scheme {name!r}") from None


@dataclass(frozen=True, eq=False)
class TrainingMatrix:
    """Unit-modulus M×M IRS training matrix.

    ``quant_bits`` is ``None`` for infinite phase resolution.
    """

    entries: np.ndarray
    scheme: Scheme
    quant_bits: int | None = None

    def __post_init__(self):
        Q = np.array(self.entries, dtype=complex)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionError(f"training matrix must be square, got shape {Q.shape}")
        if not np.allclose(np.abs(Q), 1.0, rtol=0, atol=UNIT_MODULUS_TOL):
            raise ValueError("training matrix entries must have unit modulus (IRS amplitudes fixed to 1)")
        Q.setflags(write=False)
        object.__setattr__(self, "entries", Q)
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    @property
    def phases(self) -> np.ndarray:
        """Phase shifts in [0, 2*pi) such that ``entries == exp(-1j * phases)``."""
        return np.mod(-np.angle(self.entries), 2 * np.pi)

    def __neg__(self) -> "TrainingMatrix":
        return TrainingMatrix(-self.entries, self.scheme, self.quant_bits)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def _as_array(Q) -> np.ndarray:
    return Q.entries if isinstance(Q, TrainingMatrix) else np.asarray(Q, dtype=complex)


def dft_matrix(M: int) -> TrainingMatrix:
    if M < 1:
        raise DimensionError("M must be >= 1")
    # reduce the exponent mod M first so large M keeps full phase accuracy
    k = np.outer(np.arange(M), np.arange(M)) % M
    return TrainingMatrix(np.exp(-2j * np.pi * k / M), Scheme.DFT)


def hadamard_matrix(M: int) -> TrainingMatrix:
    """Sylvester-construction Hadamard matrix of order ``M`` (a power of two)."""
    if M < 1 or M & (M - 1):
        raise UnsupportedOrderError(f"Hadamard order must be a power of 2, got {M}")
    H = np.ones((1, 1))
    while H.shape[0] < M:
        H = np.block([[H, H], [H, -H]])
    return TrainingMatrix(H.astype(complex), Scheme.HADAMARD)


def random_phase_matrix(M: int, rng: np.random.Generator) -> TrainingMatrix:
    if M < 1:
        raise DimensionError("M must be >= 1")
    phases = rng.uniform(0.0, 2 * np.pi, size=(M, M))
    return TrainingMatrix(np.exp(-1j * phases), Scheme.RANDOM_PHASE)


def make_training_matrix(scheme: "str | Scheme", M: int, rng: np.random.Generator | None = None) -> TrainingMatrix:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.DFT:
        return dft_matrix(M)
    if scheme is Scheme.HADAMARD:
        return hadamard_matrix(M)
    if rng is None:
        raise ValueError("random phase matrices need a generator")
    return random_phase_matrix(M, rng)


def quantize_phase(phase, bits: int) -> np.ndarray:
    """Snap phases to the circularly nearest level of the ``2**bits`` offset grid.

    Level ``i`` sits at ``(2i+1)*pi/L`` and owns ``[2i*pi/L, 2(i+1)*pi/L)``,
    so an exact midpoint goes to the larger adjacent level.
    """
    if int(bits) != bits or bits < 1:
        raise InvalidResolutionError(f"quantization bits must be an integer >= 1, got {bits!r}")
    L = 2 ** int(bits)
    u = np.mod(np.asarray(phase, dtype=float), 2 * np.pi) * (L / (2 * np.pi))
    nearest = np.round(u)
    u = np.where(np.abs(u - nearest) < _MIDPOINT_SNAP, nearest, u)
    level = np.mod(np.floor(u), L)
    return (2 * level + 1) * np.pi / L


def quantize(Q: TrainingMatrix, bits: int) -> TrainingMatrix:
    """Copy of ``Q`` as realized by ``bits``-bit phase shifters."""
    return TrainingMatrix(np.exp(-1j * quantize_phase(Q.phases, bits)), Q.scheme, int(bits))


def gram_trace_inv(Q) -> float:
    """``tr{(Q^T Q^*)^-1}``, computed from the singular values of ``Q``.

    ``Q^T Q^*`` is the conjugate of ``Q^H Q`` so its eigenvalues are the
    squared singular values of ``Q``; no Gram matrix is formed or inverted.

    Raises
    ------
    SingularGramError
        If ``cond(Q)`` exceeds ``GRAM_COND_LIMIT``.
    """
    A = _as_array(Q)
    s = np.linalg.svd(A, compute_uv=False)
    cond = math.inf if s[-1] == 0 else float(s[0] / s[-1])
    if not cond <= GRAM_COND_LIMIT:
        raise SingularGramError(f"training Gram matrix is singular (cond(Q) = {cond:.3g})", cond)
    return float(np.sum(1.0 / s**2))


def loss_factor_exact(Q: TrainingMatrix, bits: int | float | None) -> float:
    """Quantized over unquantized Gram trace criterion for ``Q``.

    ``bits`` of ``None`` or ``inf`` means no quantization (returns 1).
    """
    if bits is None or bits == math.inf:
        return 1.0
    return gram_trace_inv(quantize(Q, int(bits))) / gram_trace_inv(Q)


def loss_factor_approx(bits: int | float | None) -> float:
    """Closed-form loss ``3 - 2*sinc(pi/L)`` with the unnormalized sinc."""
    if bits is None or bits == math.inf:
        return 1.0
    if bits < 1:
        raise InvalidResolutionError(f"quantization bits must be >= 1, got {bits!r}")
    x = math.pi / 2.0**bits
    return 3.0 - 2.0 * math.sin(x) / x
