"""Four-period sign-structured pilot pattern and its decoupling combiner.

Both users send the same pilot sequence four times. User 1 keeps its sign,
user 2 alternates it, and the IRS flips the training matrix in the last two
periods. Adding and subtracting the four received blocks isolates each of
the two direct and two cascaded channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet, complex_gaussian
from .errors import DimensionError
from .training import TrainingMatrix

# rows: period 1..4; columns: (s_u1, s_u2, s_Q)
SIGN_SCHEDULE = np.array(
    [
        [+1, +1, +1],
        [+1, -1, +1],
        [+1, +1, -1],
        [+1, -1, -1],
    ]
)

# Row r isolates: 0 -> U1 direct, 1 -> U2 direct, 2 -> U1 cascaded, 3 -> U2 cascaded.
COMBINING_MATRIX = np.array(
    [
        [+1, +1, +1, +1],
        [+1, -1, +1, -1],
        [+1, +1, -1, -1],
        [+1, -1, -1, +1],
    ]
)


def term_coefficients(schedule: np.ndarray = SIGN_SCHEDULE) -> np.ndarray:
    """4×4 table: coefficient of each channel term (columns) in each period (rows).

    Term order matches ``COMBINING_MATRIX`` rows: U1 direct, U2 direct,
    U1 cascaded, U2 cascaded.
    """
    s1, s2, sq = schedule[:, 0], schedule[:, 1], schedule[:, 2]
    return np.stack([s1, s2, s1 * sq, s2 * sq], axis=1)


def validate_schedule(schedule) -> np.ndarray:
    schedule = np.asarray(schedule)
    if schedule.shape != (4, 3) or not np.array_equal(schedule, SIGN_SCHEDULE):
        raise ValueError("only the fixed sign schedule s_u1=(++++), s_u2=(+-+-), s_Q=(++--) is supported")
    return schedule


@dataclass(frozen=True)
class PilotSequences:
    x_u1: np.ndarray
    x_u2: np.ndarray

    def __post_init__(self):
        x1 = np.asarray(self.x_u1, dtype=complex)
        x2 = np.asarray(self.x_u2, dtype=complex)
        if x1.ndim != 1 or x1.shape != x2.shape:
            raise DimensionError("both users need pilot vectors of the same length N_P")
        if not (np.allclose(np.abs(x1), 1, rtol=0, atol=1e-12) and np.allclose(np.abs(x2), 1, rtol=0, atol=1e-12)):
            raise ValueError("pilot symbols must have unit modulus")
        object.__setattr__(self, "x_u1", x1)
        object.__setattr__(self, "x_u2", x2)

    @property
    def N_P(self) -> int:
        return self.x_u1.shape[0]


def default_pilots(N_P: int, rng: np.random.Generator | None = None, mode: str = "random") -> PilotSequences:
    """Unit-modulus pilots with uniform random phases, or all ones with ``mode="ones"``."""
    if N_P < 1:
        raise DimensionError("N_P must be >= 1")
    if mode == "ones":
        return PilotSequences(np.ones(N_P, complex), np.ones(N_P, complex))
    if mode != "random":
        raise ValueError(f"unknown pilot mode {mode!r}")
    if rng is None:
        raise ValueError("random pilots need a generator")
    phases = rng.uniform(0.0, 2 * np.pi, size=(2, N_P))
    return PilotSequences(np.exp(1j * phases[0]), np.exp(1j * phases[1]))


@dataclass(frozen=True)
class PilotFrame:
    """Received K×N_P blocks of the four pilot periods, stacked as ``Y[p]``.

    ``W`` holds the noise blocks when synthesis was asked to keep them.
    """

    Y: np.ndarray
    W: np.ndarray | None = None

    def __post_init__(self):
        if self.Y.ndim != 3 or self.Y.shape[0] != 4:
            raise DimensionError(f"frame must be 4×K×N_P, got {self.Y.shape}")


@dataclass(frozen=True)
class CombinedObservations:
    """Decoupled observations; ``Yt[0..3]`` isolate U1 direct, U2 direct, U1 cascaded, U2 cascaded."""

    Yt: np.ndarray


def channel_terms(channels: ChannelSet, Q: TrainingMatrix, pilots: PilotSequences, P_u1: float, P_u2: float) -> np.ndarray:
    """The four noise-free channel terms, each K×N_P, in combiner row order."""
    Qa = Q.entries
    K, M = channels.H_ir.shape
    if Qa.shape != (M, pilots.N_P):
        raise DimensionError(f"Q {Qa.shape} does not match M={M}, N_P={pilots.N_P}")
    a1, a2 = np.sqrt(P_u1), np.sqrt(P_u2)
    x1, x2 = pilots.x_u1, pilots.x_u2
    return np.stack(
        [
            a1 * np.outer(channels.h_u1r, x1),
            a2 * np.outer(channels.h_u2r, x2),
            a1 * (channels.H_u1ir @ Qa) * x1,  # H Q X with X = diag(x)
            a2 * (channels.H_u2ir @ Qa) * x2,
        ]
    )


def synthesize_frame(
    channels: ChannelSet,
    Q: TrainingMatrix,
    pilots: PilotSequences,
    P_u1: float,
    P_u2: float,
    noise_power: float,
    rng: np.random.Generator | None,
    keep_noise: bool = False,
) -> PilotFrame:
    """Received signal of one training frame (four pilot periods).

    With ``noise_power == 0`` no random numbers are drawn and ``rng`` may be None.
    """
    if noise_power < 0:
        raise ValueError("noise power must be non-negative")
    terms = channel_terms(channels, Q, pilots, P_u1, P_u2)
    Y = np.einsum("pt,tkn->pkn", term_coefficients(), terms)
    W = None
    if noise_power > 0:
        W = complex_gaussian(rng, Y.shape, noise_power)
        Y = Y + W
    return PilotFrame(Y=Y, W=W if keep_noise else None)


def combine(frame: PilotFrame | np.ndarray) -> CombinedObservations:
    Y = frame.Y if isinstance(frame, PilotFrame) else np.asarray(frame)
    return CombinedObservations(
        np.stack(
            [
                Y[0] + Y[1] + Y[2] + Y[3],
                Y[0] - Y[1] + Y[2] - Y[3],
                Y[0] + Y[1] - Y[2] - Y[3],
                Y[0] - Y[1] - Y[2] + Y[3],
            ]
        )
    )
