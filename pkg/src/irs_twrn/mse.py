"""Empirical and analytic estimation MSE for the four channels.

All components use the same ``1/(4M)`` normalization of the squared
Frobenius error. Components are ordered: U1 direct, U2 direct, U1 cascaded,
U2 cascaded.

The analytic direct-channel term exists in two variants. ``k_correction``
False gives ``sigma^2 / (16 P M^2)``; True multiplies by the relay antenna
count K, which is what the noise statistics of a length-K error vector give.
Every report records which one was used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from .config import SystemConfig
from .errors import SingularGramError
from .estimation import EstimateSet
from .channels import ChannelSet
from .training import (
    GRAM_COND_LIMIT,
    Scheme,
    TrainingMatrix,
    loss_factor_approx,
    loss_factor_exact,
    make_training_matrix,
)


def error_energies(est: EstimateSet, truth: ChannelSet) -> np.ndarray:
    """Squared Frobenius error of each of the four estimates."""
    pairs = (
        (est.h_u1r_hat, truth.h_u1r),
        (est.h_u2r_hat, truth.h_u2r),
        (est.H_u1ir_hat, truth.H_u1ir),
        (est.H_u2ir_hat, truth.H_u2ir),
    )
    return np.array([np.sum(np.abs(a - b) ** 2) for a, b in pairs])


def empirical_component(estimates: Sequence[np.ndarray], truths: Sequence[np.ndarray], M: int) -> float:
    """``(1/(4M))`` times the trial average of ``||estimate - truth||_F^2``."""
    if len(estimates) == 0:
        raise ValueError("need at least one trial")
    if len(estimates) != len(truths):
        raise ValueError("estimates and truths differ in trial count")
    energy = [np.sum(np.abs(np.asarray(e) - np.asarray(t)) ** 2) for e, t in zip(estimates, truths)]
    return float(np.mean(energy)) / (4 * M)


def analytic_direct(P: float, M: int, noise_power: float, K: int, k_correction: bool = False) -> float:
    value = noise_power / (16.0 * P * M**2)
    return K * value if k_correction else value


def analytic_cascaded(Q: TrainingMatrix | np.ndarray, x: np.ndarray, P: float, K: int, M: int, noise_power: float) -> float:
    """``sigma^2 K tr{(X^H X)^-1 (Q^T Q^*)^-1} / (16 P M)`` via a Cholesky solve on M×M matrices."""
    Qa = Q.entries if isinstance(Q, TrainingMatrix) else np.asarray(Q, dtype=complex)
    G = Qa.T @ Qa.conj()
    cond = float(np.linalg.cond(G))
    if not cond <= GRAM_COND_LIMIT**2:
        raise SingularGramError(f"training Gram matrix is singular (cond = {cond:.3g})", cond)
    try:
        factor = linalg.cho_factor(G)
    except linalg.LinAlgError as exc:
        raise SingularGramError(f"training Gram matrix is not positive definite: {exc}", math.inf) from exc
    pilot_energy = np.abs(np.asarray(x)) ** 2  # diagonal of X^H X
    trace = float(np.trace(linalg.cho_solve(factor, np.diag(1.0 / pilot_energy))).real)
    return noise_power * K * trace / (16.0 * P * M)


def analytic_cascaded_kronecker(Q: TrainingMatrix | np.ndarray, x: np.ndarray, P: float, K: int, noise_power: float) -> float:
    """``sigma^2 tr{(A^-1)^H A^-1} / (16 P M)`` with the explicit ``A = (Q X)^T kron I_K``.

    Builds a KM×KM matrix; meant for small cross-checks only.
    """
    Qa = Q.entries if isinstance(Q, TrainingMatrix) else np.asarray(Q, dtype=complex)
    M = Qa.shape[0]
    A = np.kron((Qa * np.asarray(x)[np.newaxis, :]).T, np.eye(K))
    Ainv = np.linalg.inv(A)
    return noise_power * float(np.trace(Ainv.conj().T @ Ainv).real) / (16.0 * P * M)


def sum_mse_min(P_u1: float, P_u2: float, M: int, K: int, noise_power: float, k_correction: bool = False) -> float:
    """Minimum Sum-MSE reached by any training matrix with ``Q^H Q = M I``."""
    cascaded = K * noise_power / (16 * P_u1 * M) + K * noise_power / (16 * P_u2 * M)
    direct = analytic_direct(P_u1, M, noise_power, K, k_correction) + analytic_direct(P_u2, M, noise_power, K, k_correction)
    return cascaded + direct


def analytic_components(
    config: SystemConfig, beta: float = 1.0, k_correction: bool = False
) -> tuple[float, float, float, float]:
    """Analytic ``(eps1, eps2, eps3, eps4)`` with the cascaded terms scaled by ``beta``."""
    M, K, s2 = config.M, config.K, config.noise_power
    return (
        analytic_direct(config.P_u1, M, s2, K, k_correction),
        analytic_direct(config.P_u2, M, s2, K, k_correction),
        beta * K * s2 / (16 * config.P_u1 * M),
        beta * K * s2 / (16 * config.P_u2 * M),
    )


def predicted_quantized_sum(
    config: SystemConfig,
    scheme: "str | Scheme | TrainingMatrix",
    bits: int | float | None,
    approx: bool = False,
    k_correction: bool = False,
) -> float:
    """Sum-MSE predicted for ``bits``-bit phase shifters.

    Cascaded terms of the optimal-Q minimum are multiplied by the exact
    loss factor of the quantized matrix (or its closed-form approximation
    when ``approx``); direct terms do not involve Q and stay unchanged.
    A random-phase scheme needs a concrete ``TrainingMatrix``.
    """
    if approx:
        beta = loss_factor_approx(bits)
    else:
        Q = scheme if isinstance(scheme, TrainingMatrix) else make_training_matrix(scheme, config.M)
        beta = loss_factor_exact(Q, bits)
    return sum(analytic_components(config, beta, k_correction))


@dataclass
class MseReport:
    """Empirical and analytic MSE components of one experiment point."""

    eps_empirical: tuple[float, float, float, float]
    eps_analytic: tuple[float, float, float, float]
    trials: int
    excluded_trials: int = 0
    k_correction: bool = False
    config_echo: SystemConfig | None = None
    energies: np.ndarray | None = field(default=None, repr=False)

    @property
    def sum_empirical(self) -> float:
        return float(sum(self.eps_empirical))

    @property
    def sum_analytic(self) -> float:
        return float(sum(self.eps_analytic))

    @classmethod
    def from_energies(
        cls,
        energies: np.ndarray,
        M: int,
        eps_analytic: Sequence[float],
        excluded_trials: int = 0,
        k_correction: bool = False,
        config: SystemConfig | None = None,
    ) -> "MseReport":
        """Aggregate a (trials × 4) array of per-trial squared errors."""
        energies = np.asarray(energies, dtype=float).reshape(-1, 4)
        if energies.shape[0] == 0:
            eps = (math.nan,) * 4
        else:
            eps = tuple(float(v) for v in energies.mean(axis=0) / (4 * M))
        return cls(
            eps_empirical=eps,
            eps_analytic=tuple(float(v) for v in eps_analytic),
            trials=energies.shape[0] + excluded_trials,
            excluded_trials=excluded_trials,
            k_correction=k_correction,
            config_echo=config,
            energies=energies,
        )


def mc_band(samples: np.ndarray, floor: float = 0.03) -> float:
    """Relative half-width ``max(3 * std / sqrt(T) / mean, floor)`` of a Monte Carlo mean."""
    samples = np.asarray(samples, dtype=float)
    T = samples.size
    mean = samples.mean()
    if T < 2 or mean == 0:
        return floor
    return max(3.0 * samples.std(ddof=1) / math.sqrt(T) / abs(mean), floor)
