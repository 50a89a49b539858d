"""Monte Carlo sweeps over SNR, phase-shifter bits and IRS size.

Every trial draws from its own generator, seeded from
``(seed, scenario id, grid point index, trial index)``, so per-trial results
do not depend on how trials are split across workers. Per-trial error
energies are collected in trial order and reduced once, which keeps the CSV
byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .channels import draw_channels
from .config import SystemConfig, mw_to_dbm
from .errors import InvalidConfigError, SingularDesignError, SingularGramError
from .estimation import CascadedSolver, estimate_all
from .mse import MseReport, analytic_cascaded, analytic_components, error_energies
from .pilots import default_pilots, synthesize_frame
from .training import (
    Scheme,
    TrainingMatrix,
    gram_trace_inv,
    loss_factor_approx,
    loss_factor_exact,
    make_training_matrix,
    quantize,
    random_phase_matrix,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "IRS_TWRN_WORKERS"
SINGULAR = "singular"
INF = math.inf

SCENARIOS = ("snr_sweep", "bits_sweep", "loss_factor", "custom")
_SCENARIO_ID = {"custom": 0, "snr_sweep": 3, "bits_sweep": 4, "loss_factor": 5}


@dataclass
class ExperimentSpec:
    """What to sweep. ``None`` entries in ``snr_grid_db`` mean "use the config powers"."""

    scenario: str = "custom"
    snr_grid_db: list = field(default_factory=lambda: [10.0])
    bits_grid: list = field(default_factory=lambda: [INF])
    schemes: list = field(default_factory=lambda: [Scheme.DFT])
    m_grid: list = field(default_factory=lambda: [16])
    K: int = 4
    trials: int = 2000
    seed: int = 0
    output_path: str | None = None
    k_correction: bool = True
    pilot_mode: str = "random"
    config: SystemConfig = field(default_factory=SystemConfig)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidConfigError(f"unknown scenario {self.scenario!r}")
        for name in ("snr_grid_db", "bits_grid", "schemes", "m_grid"):
            if len(getattr(self, name)) == 0:
                raise InvalidConfigError(f"{name} must not be empty")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidConfigError(f"trials must be a positive integer, got {self.trials!r}")
        self.schemes = [Scheme.parse(s) for s in self.schemes]
        for b in self.bits_grid:
            if not (b == INF or (int(b) == b and b >= 1)):
                raise InvalidConfigError(f"bits must be integers >= 1 or inf, got {b!r}")
        if self.pilot_mode not in ("random", "ones"):
            raise InvalidConfigError(f"unknown pilot mode {self.pilot_mode!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfigError("seed must fit in 64 unsigned bits")


@dataclass
class SweepRow:
    scenario: str
    scheme: str
    M: int
    K: int
    snr_db: float
    bits: float
    trials: int
    sum_mse_empirical: float | str
    sum_mse_analytic: float | str
    eps1_empirical: float | str
    eps2_empirical: float | str
    eps3_empirical: float | str
    eps4_empirical: float | str
    beta_exact: float | str
    beta_approx: float
    excluded_trials: int
    seed: int
    beta_sim: float | str = SINGULAR
    k_correction: bool = True


CSV_COLUMNS = [f.name for f in fields(SweepRow)]


# ---------------------------------------------------------------------------
# per-trial work
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointTask:
    """Everything a worker needs to run trials of one grid point."""

    config: SystemConfig
    scheme: Scheme
    bits: float
    seed: int
    scenario_id: int
    point_index: int
    pilot_mode: str = "random"
    # fixed (possibly quantized) training matrix; None for random-phase
    Q: TrainingMatrix | None = None


def trial_rng(seed: int, scenario_id: int, point_index: int, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(scenario_id, point_index, trial_index))
    return np.random.default_rng(ss)


def run_trials(task: PointTask, start: int, stop: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Run trials ``start..stop-1`` of a grid point.

    Returns per-trial error energies (n×4), per-draw analytic cascaded terms
    (n×2, NaN for fixed Q), per-draw loss factor (n) and an exclusion mask.
    """
    cfg = task.config
    n = stop - start
    energies = np.full((n, 4), np.nan)
    casc = np.full((n, 2), np.nan)
    beta = np.full(n, np.nan)
    excluded = np.zeros(n, dtype=bool)
    solver = CascadedSolver(task.Q) if task.Q is not None else None

    for i, t in enumerate(range(start, stop)):
        rng = trial_rng(task.seed, task.scenario_id, task.point_index, t)
        channels = draw_channels(cfg, rng)
        pilots = default_pilots(cfg.N_P, rng, mode=task.pilot_mode)
        Q = task.Q
        trial_solver = solver
        if Q is None:
            Q0 = random_phase_matrix(cfg.M, rng)
            Q = Q0 if task.bits == INF else quantize(Q0, int(task.bits))
            try:
                trial_solver = CascadedSolver(Q)
                casc[i] = (
                    analytic_cascaded(Q, pilots.x_u1, cfg.P_u1, cfg.K, cfg.M, cfg.noise_power),
                    analytic_cascaded(Q, pilots.x_u2, cfg.P_u2, cfg.K, cfg.M, cfg.noise_power),
                )
                beta[i] = 1.0 if Q is Q0 else gram_trace_inv(Q) / gram_trace_inv(Q0)
            except (SingularDesignError, SingularGramError):
                excluded[i] = True
                continue
        frame = synthesize_frame(channels, Q, pilots, cfg.P_u1, cfg.P_u2, cfg.noise_power, rng)
        est = estimate_all(frame, Q, pilots, cfg.P_u1, cfg.P_u2, solver=trial_solver)
        energies[i] = error_energies(est, channels)
    return energies, casc, beta, excluded


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def execute(task: PointTask, trials: int, workers: int | None = None):
    """Run all trials of a point, in parallel chunks when ``workers > 1``."""
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or trials < 2 * workers:
        return run_trials(task, 0, trials)
    bounds = np.linspace(0, trials, min(trials, 4 * workers) + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_trials, task, a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        parts = [f.result() for f in futures]
    return tuple(np.concatenate(p) for p in zip(*parts))


# ---------------------------------------------------------------------------
# grid points
# ---------------------------------------------------------------------------

@dataclass
class PointResult:
    report: MseReport | None  # None when the fixed design is singular
    beta_exact: float | str
    snr_db: float

    @property
    def cascaded_empirical(self) -> float | str:
        if self.report is None or self.report.trials == self.report.excluded_trials:
            return SINGULAR
        return self.report.eps_empirical[2] + self.report.eps_empirical[3]


def _point_config(spec: ExperimentSpec, M: int, snr_db) -> tuple[SystemConfig, float]:
    cfg = replace(spec.config, M=M, N_P=None, K=spec.K, seed=int(spec.seed))
    if snr_db is None:
        return cfg, 10.0 * math.log10(cfg.P_u1 / cfg.noise_power)
    return cfg.with_snr(float(snr_db)), float(snr_db)


def evaluate_point(
    spec: ExperimentSpec,
    scheme: Scheme,
    M: int,
    snr_db,
    bits: float,
    point_index: int,
    workers: int | None = None,
) -> PointResult:
    cfg, snr_value = _point_config(spec, M, snr_db)
    sid = _SCENARIO_ID[spec.scenario]
    kc = spec.k_correction

    if scheme is Scheme.RANDOM_PHASE:
        task = PointTask(cfg, scheme, bits, int(spec.seed), sid, point_index, spec.pilot_mode, None)
        energies, casc, beta, excluded = execute(task, spec.trials, workers)
        keep = ~excluded
        if not keep.any():
            return PointResult(None, SINGULAR, snr_value)
        direct = analytic_components(cfg, 1.0, kc)[:2]
        analytic = (*direct, float(casc[keep, 0].mean()), float(casc[keep, 1].mean()))
        report = MseReport.from_energies(energies[keep], M, analytic, int(excluded.sum()), kc, cfg)
        return PointResult(report, float(beta[keep].mean()), snr_value)

    Q0 = make_training_matrix(scheme, M)
    Q = Q0 if bits == INF else quantize(Q0, int(bits))
    try:
        beta_exact = loss_factor_exact(Q0, None if bits == INF else int(bits))
        task = PointTask(cfg, scheme, bits, int(spec.seed), sid, point_index, spec.pilot_mode, Q)
        energies, _, _, _ = execute(task, spec.trials, workers)
    except (SingularGramError, SingularDesignError) as exc:
        log.info("%s M=%d bits=%s: %s", scheme.value, M, bits, exc)
        return PointResult(None, SINGULAR, snr_value)
    analytic = analytic_components(cfg, beta_exact, kc)
    return PointResult(MseReport.from_energies(energies, M, analytic, 0, kc, cfg), beta_exact, snr_value)


def _row(spec: ExperimentSpec, scheme: Scheme, M: int, bits: float, res: PointResult, beta_sim) -> SweepRow:
    rep = res.report
    if rep is None:
        emp = [SINGULAR] * 4
        total = analytic = SINGULAR
        excluded = spec.trials
    else:
        emp = list(rep.eps_empirical)
        total, analytic = rep.sum_empirical, rep.sum_analytic
        excluded = rep.excluded_trials
    return SweepRow(
        scenario=spec.scenario,
        scheme=scheme.value,
        M=M,
        K=spec.K,
        snr_db=res.snr_db,
        bits=bits,
        trials=spec.trials,
        sum_mse_empirical=total,
        sum_mse_analytic=analytic,
        eps1_empirical=emp[0],
        eps2_empirical=emp[1],
        eps3_empirical=emp[2],
        eps4_empirical=emp[3],
        beta_exact=res.beta_exact,
        beta_approx=loss_factor_approx(bits),
        excluded_trials=excluded,
        seed=int(spec.seed),
        beta_sim=beta_sim,
        k_correction=spec.k_correction,
    )


def run_grid(spec: ExperimentSpec, workers: int | None = None) -> tuple[list[SweepRow], dict]:
    """Evaluate the full (scheme, M, snr, bits) grid.

    Returns the rows plus the underlying ``PointResult`` objects keyed by
    ``(scheme, M, snr, bits)`` for callers that need per-trial energies.
    """
    grid = list(itertools.product(spec.schemes, spec.m_grid, spec.snr_grid_db, spec.bits_grid))
    results: dict = {}
    for idx, (scheme, M, snr, bits) in enumerate(grid):
        results[(scheme, M, snr, bits)] = evaluate_point(spec, scheme, M, snr, bits, idx, workers)

    # unquantized references for beta_sim, reusing grid points where possible
    next_index = len(grid)
    rows = []
    for scheme, M, snr, bits in grid:
        key = (scheme, M, snr, INF)
        if key not in results:
            results[key] = evaluate_point(spec, scheme, M, snr, INF, next_index, workers)
            next_index += 1
        num = results[(scheme, M, snr, bits)].cascaded_empirical
        den = results[key].cascaded_empirical
        beta_sim = SINGULAR if SINGULAR in (num, den) else num / den
        rows.append(_row(spec, scheme, M, bits, results[(scheme, M, snr, bits)], beta_sim))
    return rows, results


def run_snr_sweep(spec: ExperimentSpec, workers: int | None = None) -> list[SweepRow]:
    return run_grid(replace(spec, scenario="snr_sweep"), workers)[0]


def run_bits_sweep(spec: ExperimentSpec, workers: int | None = None) -> list[SweepRow]:
    return run_grid(replace(spec, scenario="bits_sweep"), workers)[0]


def run_loss_factor(spec: ExperimentSpec, workers: int | None = None) -> list[SweepRow]:
    return run_grid(replace(spec, scenario="loss_factor", schemes=[Scheme.DFT]), workers)[0]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value == INF:
        return "inf"
    return f"{value:.8e}"


def _fmt_row(row: SweepRow) -> list[str]:
    out = []
    for name in CSV_COLUMNS:
        v = getattr(row, name)
        if name == "snr_db":
            out.append(f"{v:g}")
        elif name == "bits":
            out.append("inf" if v == INF else str(int(v)))
        else:
            out.append(_fmt(v))
    return out


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(_fmt_row(row))
    return buf.getvalue()


def write_csv_atomic(rows: Sequence[SweepRow], path: str | os.PathLike) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def summary_line(row: SweepRow) -> str:
    def g(v):
        return v if isinstance(v, str) else f"{v:.4e}"

    bits = "inf" if row.bits == INF else int(row.bits)
    return (
        f"{row.scenario} {row.scheme:<11} M={row.M} K={row.K} snr={row.snr_db:g}dB bits={bits} "
        f"sum_emp={g(row.sum_mse_empirical)} sum_ana={g(row.sum_mse_analytic)} "
        f"beta={g(row.beta_exact)} beta_sim={g(row.beta_sim)} excluded={row.excluded_trials}/{row.trials}"
    )


def run(spec: ExperimentSpec, workers: int | None = None, stream=None) -> int:
    """Run a spec, write its CSV and print one summary line per row. Returns an exit status."""
    stream = stream or sys.stdout
    if spec.output_path:
        parent = Path(spec.output_path).parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            print(f"error: output directory {parent} is not writable", file=sys.stderr)
            return 2
    rows = run_grid(spec, workers)[0]
    if spec.output_path:
        try:
            write_csv_atomic(rows, spec.output_path)
        except OSError as exc:
            print(f"error: cannot write {spec.output_path}: {exc}", file=sys.stderr)
            return 2
    for row in rows:
        print(summary_line(row), file=stream)
    variant = "K-corrected" if spec.k_correction else "as-printed"
    print(
        f"# {len(rows)} rows, direct-channel analytic variant: {variant}, "
        f"noise {mw_to_dbm(spec.config.noise_power):g} dBm",
        file=stream,
    )
    return 0
