"""Rayleigh channel realizations and the cascaded User→IRS→Relay channels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .config import LINKS, SystemConfig
from .errors import DimensionError


def complex_gaussian(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """iid CN(0, variance) samples, drawn as (g1 + j g2) * sqrt(variance / 2)."""
    g = rng.standard_normal((2, *np.atleast_1d(shape)))
    return (g[0] + 1j * g[1]) * np.sqrt(variance / 2.0)


def cascade(H_ir: np.ndarray, h_ui: np.ndarray) -> np.ndarray:
    """Cascaded channel ``H_ir @ diag(h_ui)`` without forming the diagonal."""
    H_ir = np.asarray(H_ir)
    h_ui = np.asarray(h_ui)
    if H_ir.ndim != 2 or h_ui.ndim != 1 or H_ir.shape[1] != h_ui.shape[0]:
        raise DimensionError(f"cannot cascade H_ir {H_ir.shape} with h {h_ui.shape}")
    return H_ir * h_ui[np.newaxis, :]


@dataclass(frozen=True)
class ChannelSet:
    """One realization of every link plus the two cascaded channels.

    Vectors are 1-D arrays; ``H_ir`` and the cascaded channels are K×M.
    """

    h_u1i: np.ndarray
    h_u2i: np.ndarray
    H_ir: np.ndarray
    h_u1r: np.ndarray
    h_u2r: np.ndarray
    H_u1ir: np.ndarray
    H_u2ir: np.ndarray

    @classmethod
    def from_links(cls, h_u1i, h_u2i, H_ir, h_u1r, h_u2r) -> "ChannelSet":
        H_ir = np.asarray(H_ir, dtype=complex)
        K, M = H_ir.shape
        h_u1r = np.asarray(h_u1r, dtype=complex)
        h_u2r = np.asarray(h_u2r, dtype=complex)
        if h_u1r.shape != (K,) or h_u2r.shape != (K,):
            raise DimensionError(f"direct channels must have length K={K}")
        h_u1i = np.asarray(h_u1i, dtype=complex)
        h_u2i = np.asarray(h_u2i, dtype=complex)
        return cls(
            h_u1i=h_u1i,
            h_u2i=h_u2i,
            H_ir=H_ir,
            h_u1r=h_u1r,
            h_u2r=h_u2r,
            H_u1ir=cascade(H_ir, h_u1i),
            H_u2ir=cascade(H_ir, h_u2i),
        )

    @property
    def K(self) -> int:
        return self.H_ir.shape[0]

    @property
    def M(self) -> int:
        return self.H_ir.shape[1]


def draw_channels_with_attenuation(
    M: int, K: int, attenuation: Mapping[str, float], rng: np.random.Generator
) -> ChannelSet:
    """Draw all links with the given per-link variances.

    Draw order is fixed (U1→IRS, U2→IRS, IRS→R, U1→R, U2→R) so a given
    generator state always yields the same realization.
    """
    missing = set(LINKS) - set(attenuation)
    if missing:
        raise KeyError(f"missing attenuation for {sorted(missing)}")
    return ChannelSet.from_links(
        h_u1i=complex_gaussian(rng, M, attenuation["u1_irs"]),
        h_u2i=complex_gaussian(rng, M, attenuation["u2_irs"]),
        H_ir=complex_gaussian(rng, (K, M), attenuation["irs_relay"]),
        h_u1r=complex_gaussian(rng, K, attenuation["u1_relay"]),
        h_u2r=complex_gaussian(rng, K, attenuation["u2_relay"]),
    )


def draw_channels(config: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    return draw_channels_with_attenuation(config.M, config.K, config.link_attenuations(), rng)
