"""Scenario parameters: dimensions, powers, noise, node geometry and path loss.

All power quantities are stored in linear milliwatts. Conversions from dB
happen only at the boundaries (config files, CLI flags).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import InvalidConfigError, InvalidDistanceError, InvalidGeometryError

Point = tuple[float, float]

LINKS = ("u1_relay", "u2_relay", "u1_irs", "u2_irs", "irs_relay")


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


def path_loss_linear(d: float, exponent: float, ref_loss_db: float) -> float:
    """Linear power attenuation of a log-distance path loss model.

    ``PL_dB = ref_loss_db + 10 * exponent * log10(d)``, returned as
    ``10 ** (-PL_dB / 10)``.

    Raises
    ------
    InvalidDistanceError
        If ``d`` is below the 1 m reference distance.
    """
    if not d >= 1.0:
        raise InvalidDistanceError(f"distance {d!r} m is below the 1 m reference distance")
    return 10.0 ** (-(ref_loss_db + 10.0 * exponent * math.log10(d)) / 10.0)


def snr_to_power(snr_db: float, noise_power: float) -> float:
    """Transmit power giving ``snr_db`` over ``noise_power`` (both linear)."""
    if not noise_power > 0:
        raise InvalidConfigError(f"noise power must be positive, got {noise_power!r}")
    return noise_power * 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True)
class NodeGeometry:
    """Planar node positions in meters."""

    u1: Point = (0.0, 0.0)
    u2: Point = (100.0, 0.0)
    relay: Point = (0.0, 50.0)
    irs: Point = (10.0, 50.0)

    def __post_init__(self):
        for name in ("u1", "u2", "relay", "irs"):
            p = tuple(float(c) for c in getattr(self, name))
            if len(p) != 2 or not all(math.isfinite(c) for c in p):
                raise InvalidGeometryError(f"{name} must be a finite (x, y) pair, got {p!r}")
            object.__setattr__(self, name, p)
        for link, d in _raw_distances(self).items():
            if d <= 0:
                raise InvalidGeometryError(f"coincident endpoints on link {link}")


@dataclass(frozen=True)
class PathLossModel:
    ref_loss_db: float = 30.0
    exp_direct: float = 3.5
    exp_user_irs: float = 2.4
    exp_irs_relay: float = 2.2

    def __post_init__(self):
        if not math.isfinite(self.ref_loss_db):
            raise InvalidConfigError("ref_loss_db must be finite")
        for name in ("exp_direct", "exp_user_irs", "exp_irs_relay"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidConfigError(f"{name} must be a finite non-negative number, got {v!r}")

    def exponent(self, link: str) -> float:
        if link in ("u1_relay", "u2_relay"):
            return self.exp_direct
        if link in ("u1_irs", "u2_irs"):
            return self.exp_user_irs
        if link == "irs_relay":
            return self.exp_irs_relay
        raise KeyError(link)


def _raw_distances(geometry: NodeGeometry) -> dict[str, float]:
    ends = {
        "u1_relay": (geometry.u1, geometry.relay),
        "u2_relay": (geometry.u2, geometry.relay),
        "u1_irs": (geometry.u1, geometry.irs),
        "u2_irs": (geometry.u2, geometry.irs),
        "irs_relay": (geometry.irs, geometry.relay),
    }
    return {k: math.dist(a, b) for k, (a, b) in ends.items()}


def link_distances(geometry: NodeGeometry) -> dict[str, float]:
    """Euclidean length in meters of each of the five physical links."""
    return _raw_distances(geometry)


NOISE_POWER_DEFAULT = dbm_to_mw(-80.0)


@dataclass(frozen=True)
class SystemConfig:
    """Immutable scenario description.

    ``N_P`` defaults to ``M``; the pilot pattern needs exactly one pilot
    symbol per IRS element, so any other value is rejected.
    """

    M: int = 128
    K: int = 16
    N_P: int | None = None
    P_u1: float = NOISE_POWER_DEFAULT
    P_u2: float = NOISE_POWER_DEFAULT
    noise_power: float = NOISE_POWER_DEFAULT
    geometry: NodeGeometry = field(default_factory=NodeGeometry)
    path_loss: PathLossModel = field(default_factory=PathLossModel)
    seed: int = 0

    def __post_init__(self):
        if self.N_P is None:
            object.__setattr__(self, "N_P", self.M)
        for name in ("M", "K", "N_P"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidConfigError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.N_P < self.M:
            raise InvalidConfigError(f"N_P={self.N_P} < M={self.M}: training matrix would not be invertible")
        if self.N_P != self.M:
            raise InvalidConfigError(f"only N_P == M is supported, got N_P={self.N_P}, M={self.M}")
        for name in ("P_u1", "P_u2", "noise_power"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidConfigError(f"{name} must be positive and finite, got {v!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfigError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")

    def with_snr(self, snr_db: float) -> "SystemConfig":
        """Copy with both user powers set to give ``snr_db`` (P_u1 = P_u2)."""
        p = snr_to_power(snr_db, self.noise_power)
        return replace(self, P_u1=p, P_u2=p)

    def link_attenuations(self) -> dict[str, float]:
        """Linear path-loss attenuation per link; cascaded paths use per-hop losses."""
        dist = link_distances(self.geometry)
        pl = self.path_loss
        return {k: path_loss_linear(d, pl.exponent(k), pl.ref_loss_db) for k, d in dist.items()}


# ---------------------------------------------------------------------------
# text configuration files
# ---------------------------------------------------------------------------

def _parse_point(text: str) -> Point:
    parts = [p.strip() for p in text.strip().strip("()").split(",")]
    if len(parts) != 2:
        raise InvalidConfigError(f"expected 'x, y', got {text!r}")
    return float(parts[0]), float(parts[1])


def read_config_file(path: str | Path) -> dict[str, dict[str, str]]:
    """Read an INI-style file into ``{section: {key: raw value}}``.

    Keys keep their case so ``M`` and ``N_P`` can be spelled as in the
    dataclasses.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise InvalidConfigError(f"cannot read config file {path}")
    return {s: dict(parser.items(s)) for s in parser.sections()}


def _coerce(cls, values: Mapping[str, Any]) -> dict[str, Any]:
    known = {f.name: f for f in fields(cls)}
    out: dict[str, Any] = {}
    for key, raw in values.items():
        if key not in known:
            raise InvalidConfigError(f"unknown {cls.__name__} key {key!r}")
        if not isinstance(raw, str):
            out[key] = raw
            continue
        if cls is NodeGeometry:
            out[key] = _parse_point(raw)
        elif key in ("M", "K", "N_P", "seed"):
            out[key] = int(raw)
        else:
            out[key] = float(raw)
    return out


def system_config_from_sections(
    sections: Mapping[str, Mapping[str, Any]],
    base: SystemConfig | None = None,
) -> SystemConfig:
    """Build a config from ``SystemConfig``/``NodeGeometry``/``PathLossModel`` sections.

    Values present in ``sections`` override those of ``base``.
    """
    base = base or SystemConfig()
    try:
        geometry = replace(base.geometry, **_coerce(NodeGeometry, sections.get("NodeGeometry", {})))
        path_loss = replace(base.path_loss, **_coerce(PathLossModel, sections.get("PathLossModel", {})))
        top = _coerce(SystemConfig, sections.get("SystemConfig", {}))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfigError):
            raise
        raise InvalidConfigError(str(exc)) from exc
    top.pop("geometry", None)
    top.pop("path_loss", None)
    if "M" in top and "N_P" not in top:
        top["N_P"] = None
    return replace(base, geometry=geometry, path_loss=path_loss, **top)
