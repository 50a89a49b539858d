"""Command line entry point: ``irs-twrn {fig3,fig4,fig5,custom} [flags]``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from .config import (
    SystemConfig,
    dbm_to_mw,
    read_config_file,
    system_config_from_sections,
)
from .errors import IrsTwrnError
from .runner import INF, ExperimentSpec, run

# per-subcommand defaults (desk scale; pass --m 128 --k 16 for full size)
DEFAULTS = {
    "fig3": dict(scenario="snr_sweep", snr="-10:30:5", bits="inf", schemes="dft,hadamard,rpm", m="16", k=4),
    "fig4": dict(scenario="bits_sweep", snr="0,15,30", bits="1:7,inf", schemes="dft,hadamard", m="32", k=4),
    "fig5": dict(scenario="loss_factor", snr="10", bits="1:7", schemes="dft", m="16,64,128", k=4),
    "custom": dict(scenario="custom", snr="10", bits="inf", schemes="dft", m="16", k=4),
}


def parse_range_list(text: str, cast=float) -> list:
    """Parse ``"a:b:step"``, ``"a:b"`` (step 1) or comma lists mixing both."""
    out: list = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pieces = [float(p) for p in part.split(":")]
            if len(pieces) == 2:
                pieces.append(1.0)
            if len(pieces) != 3 or pieces[2] <= 0:
                raise ValueError(f"bad range {part!r}")
            a, b, step = pieces
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            out.extend(cast(v) for v in np.round(a + step * np.arange(max(n, 0)), 12))
        else:
            out.append(cast(part))
    return out


def parse_bits(text: str) -> list:
    bits: list = []
    for part in str(text).split(","):
        part = part.strip().lower()
        if not part:
            continue
        if part == "inf":
            bits.append(INF)
        else:
            bits.extend(parse_range_list(part, cast=lambda v: int(float(v))))
    return bits


def _on_off(text: str) -> bool:
    key = str(text).strip().lower()
    if key in ("on", "true", "yes", "1"):
        return True
    if key in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irs-twrn",
        description="Monte Carlo LS channel estimation for IRS-aided two-way relaying.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "fig3": "Sum-MSE versus SNR for DFT, Hadamard and random-phase training",
        "fig4": "Sum-MSE versus phase-shifter bits at several SNRs",
        "fig5": "quantization loss factor versus bits for several IRS sizes",
        "custom": "arbitrary (scheme, M, SNR, bits) grid",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="INI file with SystemConfig/NodeGeometry/PathLossModel/ExperimentSpec sections")
        p.add_argument("--m", "--M", dest="m", help="IRS sizes, e.g. 16 or 16,64,128")
        p.add_argument("--k", "--K", dest="k", type=int, help="relay antennas")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--snr", help="SNR grid in dB: a:b:step or a comma list")
        p.add_argument("--bits", help="bits grid: list, ranges like 1:7, and/or inf")
        p.add_argument("--schemes", help="comma list of dft, hadamard, rpm")
        p.add_argument("--k-correction", dest="k_correction", type=_on_off, help="on|off (default on)")
        p.add_argument("--pilots", choices=("random", "ones"))
        g = p.add_argument_group("system overrides")
        g.add_argument("--N-P", "--N_P", dest="N_P", type=int)
        g.add_argument("--P-u1", "--P_u1", dest="P_u1", type=float, help="mW; used when --snr is 'config'")
        g.add_argument("--P-u2", "--P_u2", dest="P_u2", type=float, help="mW; used when --snr is 'config'")
        g.add_argument("--noise-power", "--noise_power", dest="noise_power", type=float, help="mW")
        g.add_argument("--noise-power-dbm", dest="noise_power_dbm", type=float)
        g.add_argument("--ref-loss-db", "--ref_loss_db", dest="ref_loss_db", type=float)
        g.add_argument("--exp-direct", "--exp_direct", dest="exp_direct", type=float)
        g.add_argument("--exp-user-irs", "--exp_user_irs", dest="exp_user_irs", type=float)
        g.add_argument("--exp-irs-relay", "--exp_irs_relay", dest="exp_irs_relay", type=float)
        for node in ("u1", "u2", "relay", "irs"):
            g.add_argument(f"--{node}", help="x,y in meters")
    return parser


def _sections_from_args(args, file_sections: dict) -> dict:
    sections = {k: dict(v) for k, v in file_sections.items() if k != "ExperimentSpec"}
    top = sections.setdefault("SystemConfig", {})
    for key in ("N_P", "P_u1", "P_u2", "noise_power"):
        if getattr(args, key) is not None:
            top[key] = getattr(args, key)
    if args.noise_power_dbm is not None:
        top["noise_power"] = dbm_to_mw(args.noise_power_dbm)
    pl = sections.setdefault("PathLossModel", {})
    for key in ("ref_loss_db", "exp_direct", "exp_user_irs", "exp_irs_relay"):
        if getattr(args, key) is not None:
            pl[key] = getattr(args, key)
    geo = sections.setdefault("NodeGeometry", {})
    for node in ("u1", "u2", "relay", "irs"):
        if getattr(args, node) is not None:
            geo[node] = getattr(args, node)
    return sections


def spec_from_args(args) -> ExperimentSpec:
    file_sections = read_config_file(args.config) if args.config else {}
    exp = dict(file_sections.get("ExperimentSpec", {}))
    defaults = DEFAULTS[args.command]

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return exp.get(key, default)

    snr_text = str(pick(args.snr, "snr", defaults["snr"]))
    snr_grid = [None] if snr_text.strip().lower() == "config" else parse_range_list(snr_text)
    m_grid = parse_range_list(str(pick(args.m, "m", defaults["m"])), cast=lambda v: int(float(v)))
    K = int(pick(args.k, "k", defaults["k"]))
    sections = _sections_from_args(args, file_sections)
    config = system_config_from_sections(sections, SystemConfig(M=m_grid[0] if m_grid else 16, K=K))
    kc = args.k_correction if args.k_correction is not None else _on_off(exp.get("k_correction", "on"))
    return ExperimentSpec(
        scenario=defaults["scenario"],
        snr_grid_db=snr_grid,
        bits_grid=parse_bits(pick(args.bits, "bits", defaults["bits"])),
        schemes=[s for s in str(pick(args.schemes, "schemes", defaults["schemes"])).split(",") if s.strip()],
        m_grid=m_grid,
        K=K,
        trials=int(pick(args.trials, "trials", 2000)),
        seed=int(pick(args.seed, "seed", 0)),
        output_path=pick(args.out, "out", None),
        k_correction=kc,
        pilot_mode=pick(args.pilots, "pilots", "random"),
        config=replace(config, K=K),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = spec_from_args(args)
    except (IrsTwrnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(spec)
    except IrsTwrnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
