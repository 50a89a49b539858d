"""Least-squares estimators for the direct and cascaded channels.

The cascaded estimator solves ``H_hat @ (Q X) = Yt / (4 sqrt(P))`` from the
right with an M×M factorization; this is the same system as the vectorized
form ``((Q X)^T kron I_K) vec(H) = vec(Yt) / (4 sqrt(P))`` without ever
building the KM×KM matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegeneratePilotError, DimensionError, SingularDesignError
from .pilots import PilotFrame, PilotSequences, combine
from .training import TrainingMatrix

DESIGN_COND_LIMIT = 1e12


@dataclass(frozen=True)
class EstimateSet:
    h_u1r_hat: np.ndarray
    h_u2r_hat: np.ndarray
    H_u1ir_hat: np.ndarray
    H_u2ir_hat: np.ndarray


def estimate_direct(Yt: np.ndarray, x: np.ndarray, P: float) -> np.ndarray:
    """LS estimate ``Yt x^* / (4 sqrt(P) x^T x^*)`` of a direct K-vector channel."""
    Yt = np.asarray(Yt)
    x = np.asarray(x)
    if Yt.ndim != 2 or Yt.shape[1] != x.shape[0]:
        raise DimensionError(f"Yt {Yt.shape} does not match pilot length {x.shape[0]}")
    energy = float(np.vdot(x, x).real)
    if energy == 0.0:
        raise DegeneratePilotError("pilot sequence has zero energy")
    return (Yt @ x.conj()) / (4.0 * np.sqrt(P) * energy)


class CascadedSolver:
    """Right-solve against a fixed training matrix, reusable across pilot draws.

    Since ``(Q X)^-1 = X^-1 Q^-1`` and ``X`` is a unit-modulus diagonal,
    ``cond(Q X) == cond(Q)``; one LU factorization of ``Q`` serves every
    trial that shares it.
    """

    def __init__(self, Q: TrainingMatrix | np.ndarray, cond_limit: float = DESIGN_COND_LIMIT):
        Qa = Q.entries if isinstance(Q, TrainingMatrix) else np.asarray(Q, dtype=complex)
        self.condition = float(np.linalg.cond(Qa))
        if not self.condition <= cond_limit:
            raise SingularDesignError(
                f"training design is ill-conditioned (cond = {self.condition:.3g} > {cond_limit:.0e})",
                self.condition,
            )
        self.M = Qa.shape[0]
        self._lu = linalg.lu_factor(Qa, check_finite=False)

    def solve(self, Yt: np.ndarray, x: np.ndarray, P: float) -> np.ndarray:
        Yt = np.asarray(Yt)
        if Yt.ndim != 2 or Yt.shape[1] != self.M or np.shape(x) != (self.M,):
            raise DimensionError(f"Yt {Yt.shape} / pilots {np.shape(x)} do not match M={self.M}")
        # Z Q = Yt X^-1  <=>  Q^T Z^T = (Yt X^-1)^T
        rhs = (Yt / x).T
        Z = linalg.lu_solve(self._lu, rhs, trans=1, check_finite=False).T
        return Z / (4.0 * np.sqrt(P))


def estimate_cascaded(
    Yt: np.ndarray,
    Q: TrainingMatrix | np.ndarray,
    x: np.ndarray,
    P: float,
    cond_limit: float = DESIGN_COND_LIMIT,
) -> np.ndarray:
    """LS estimate of a K×M cascaded channel: ``Yt (Q X)^-1 / (4 sqrt(P))``.

    Raises
    ------
    SingularDesignError
        If ``cond(Q X)`` exceeds ``cond_limit``; the estimate carries the
        condition number in ``.condition``.
    """
    Qa = Q.entries if isinstance(Q, TrainingMatrix) else np.asarray(Q, dtype=complex)
    x = np.asarray(x)
    Yt = np.asarray(Yt)
    if Qa.shape != (x.shape[0], x.shape[0]) or Yt.ndim != 2 or Yt.shape[1] != x.shape[0]:
        raise DimensionError(f"incompatible shapes Yt {Yt.shape}, Q {Qa.shape}, x {x.shape}")
    D = Qa * x[np.newaxis, :]
    cond = float(np.linalg.cond(D))
    if not cond <= cond_limit:
        raise SingularDesignError(f"Q X is ill-conditioned (cond = {cond:.3g} > {cond_limit:.0e})", cond)
    Z = linalg.solve(D.T, Yt.T, check_finite=False).T
    return Z / (4.0 * np.sqrt(P))


def estimate_cascaded_orthogonal(Yt: np.ndarray, Q: TrainingMatrix | np.ndarray, x: np.ndarray, P: float) -> np.ndarray:
    """Shortcut ``Yt X^H Q^H / (4 sqrt(P) M)``; valid only when ``Q^H Q = M I``."""
    Qa = Q.entries if isinstance(Q, TrainingMatrix) else np.asarray(Q, dtype=complex)
    M = Qa.shape[0]
    return ((np.asarray(Yt) * np.conj(x)) @ Qa.conj().T) / (4.0 * np.sqrt(P) * M)


def estimate_all(
    frame: PilotFrame,
    Q: TrainingMatrix,
    pilots: PilotSequences,
    P_u1: float,
    P_u2: float,
    solver: CascadedSolver | None = None,
) -> EstimateSet:
    """Combine the frame and run all four estimators.

    Pass a prebuilt ``solver`` for ``Q`` to skip refactorizing it.
    """
    Yt = combine(frame).Yt
    x1, x2 = pilots.x_u1, pilots.x_u2
    if solver is None:
        H1 = estimate_cascaded(Yt[2], Q, x1, P_u1)
        H2 = estimate_cascaded(Yt[3], Q, x2, P_u2)
    else:
        H1 = solver.solve(Yt[2], x1, P_u1)
        H2 = solver.solve(Yt[3], x2, P_u2)
    return EstimateSet(
        h_u1r_hat=estimate_direct(Yt[0], x1, P_u1),
        h_u2r_hat=estimate_direct(Yt[1], x2, P_u2),
        H_u1ir_hat=H1,
        H_u2ir_hat=H2,
    )
