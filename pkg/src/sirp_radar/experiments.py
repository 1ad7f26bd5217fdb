"""Monte Carlo sweep harness: MSE curves, bound curves, and resolution-limit
curves over a single swept axis, with deterministic seeding and CSV/JSON output.

Each sweep draws the waveform once, resolves the scene per grid point, and
fans trials out over per-trial RNG substreams so that serial and parallel
runs fold to identical records.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._errors import ConfigError
from .arl import arl_asymptotic, arl_closed_form, arl_exact, linearize
from .crlb import crb_standard, emcb, kappa, mcrb_hcrb
from .estimators import EstimatorOptions, cmle, imape, imle
from .radar_model import ArrayGeometry, ObservationSet, RadarScene, target_response
from .sirp_clutter import (
    SpeckleCovariance,
    TextureFamily,
    sample_clutter,
    sigma2_for_scr,
    toeplitz_sigma,
)

__all__ = [
    "AXES",
    "ExperimentConfig",
    "SweepRecord",
    "config_hash",
    "default_config",
    "resolve_point",
    "run_arl_sweep",
    "run_bound_sweep",
    "run_mse_sweep",
    "sweep_waveform",
    "trial_observation",
    "write_outputs",
]

logger = logging.getLogger(__name__)

OMEGA1_DEFAULT = math.pi * math.sin(math.radians(60.0))

AXES = ("T", "scr", "N", "a", "b", "alpha1", "alpha2")
ESTIMATOR_NAMES = ("cmle", "imle", "imape")
BOUND_NAMES = ("crb", "emcb", "mcrb", "hcrb", "crb_gaussian")

# RNG substream namespaces: spawn key (0,) draws the sweep waveform,
# (1, g, t) drives trial t of grid point g, (2, g) drives the bound
# Monte Carlo at grid point g.
_WAVEFORM_KEY = 0
_TRIAL_KEY = 1
_BOUND_KEY = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved description of one sweep: scene, clutter, axis, and budget."""

    family: TextureFamily
    axis: str
    grid: tuple[float, ...]
    m_tx: int = 5
    n_rx: int = 4
    n_snapshots: int = 6
    omega1: float = OMEGA1_DEFAULT
    delta: float = 1.0
    alpha1: complex = 2.0 + 0.5j
    alpha2: complex = 1.0 - 3.0j
    scr_db: float = 0.0
    trials: int = 500
    seed: int = 0
    estimators: tuple[str, ...] = ("cmle", "imle", "imape")
    bounds: tuple[str, ...] = BOUND_NAMES
    emcb_draws: int = 2000
    options: EstimatorOptions = EstimatorOptions()
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "bounds", tuple(self.bounds))
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; choose from {AXES}")
        if not self.grid:
            raise ConfigError("sweep grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if min(self.m_tx, self.n_rx, self.n_snapshots) < 1:
            raise ConfigError("array and snapshot counts must be positive")
        for name in self.estimators:
            if name not in ESTIMATOR_NAMES:
                raise ConfigError(f"unknown estimator {name!r}; choose from {ESTIMATOR_NAMES}")
        for name in self.bounds:
            if name not in BOUND_NAMES:
                raise ConfigError(f"unknown bound {name!r}; choose from {BOUND_NAMES}")
        if self.emcb_draws < 1:
            raise ConfigError(f"emcb_draws must be >= 1, got {self.emcb_draws}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class SweepRecord:
    """One grid point: the axis value plus named result columns."""

    axis_value: float
    columns: tuple[tuple[str, float], ...]
    wall_time: float
    config_hash: str

    def value(self, name: str) -> float:
        for key, val in self.columns:
            if key == name:
                return val
        raise KeyError(name)


def default_config(kind: str = "k", **overrides) -> ExperimentConfig:
    """Reference configuration: 5x4 half-wavelength arrays, six snapshots,
    unit spacing, amplitudes 2+0.5j and 1-3j, and the stock texture laws
    (gamma shape 2 scale 10; inverse-gamma shape 1.1 scale 2)."""
    if kind == "k":
        family = TextureFamily.k_distributed(2.0, 10.0)
    elif kind == "t":
        family = TextureFamily.t_distributed(1.1, 2.0)
    else:
        raise ConfigError(f"unknown texture kind {kind!r}; choose 'k' or 't'")
    base = dict(
        family=family,
        axis="scr",
        grid=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, TextureFamily):
        return {"kind": value.kind.value, "a": value.a, "b": value.b}
    if isinstance(value, EstimatorOptions):
        return dataclasses.asdict(value)
    if isinstance(value, tuple):
        return list(value)
    return value


def config_echo(cfg: ExperimentConfig) -> dict:
    return {f.name: _jsonable(getattr(cfg, f.name)) for f in dataclasses.fields(cfg)}


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(config_echo(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def sweep_waveform(cfg: ExperimentConfig) -> np.ndarray:
    """Per-sweep probing waveform, sized for the largest snapshot count.

    Drawn once from the dedicated substream so every grid point (and both
    same-seed runs) sees the same design; snapshot-axis sweeps slice columns
    off the front.
    """
    t_max = cfg.n_snapshots
    if cfg.axis == "T":
        t_max = max(t_max, int(round(max(cfg.grid))))
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(_WAVEFORM_KEY,)))
    shape = (cfg.m_tx, t_max)
    return rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)


@dataclass(frozen=True)
class ResolvedPoint:
    """Scene and clutter covariance at one grid value."""

    scene: RadarScene
    cov: SpeckleCovariance
    family: TextureFamily
    axis_value: float


def _rescaled(alpha: complex, modulus: float) -> complex:
    return alpha / abs(alpha) * modulus


def resolve_point(cfg: ExperimentConfig, value: float, waveform: np.ndarray) -> ResolvedPoint:
    family = cfg.family
    n_rx = cfg.n_rx
    t_snap = cfg.n_snapshots
    scr_db = cfg.scr_db
    alpha1, alpha2 = cfg.alpha1, cfg.alpha2
    if cfg.axis == "T":
        t_snap = int(round(value))
    elif cfg.axis == "N":
        n_rx = int(round(value))
    elif cfg.axis == "scr":
        scr_db = value
    elif cfg.axis == "a":
        family = dataclasses.replace(family, a=value)
    elif cfg.axis == "b":
        family = dataclasses.replace(family, b=value)
    elif cfg.axis == "alpha1":
        alpha1 = _rescaled(alpha1, value)
    elif cfg.axis == "alpha2":
        alpha2 = _rescaled(alpha2, value)
    wf = waveform[:, :t_snap]
    scene = RadarScene(
        geometry=ArrayGeometry.uniform(cfg.m_tx, n_rx),
        omega1=cfg.omega1,
        delta=cfg.delta,
        alpha1=alpha1,
        alpha2=alpha2,
        waveform=wf,
    )
    sigma2 = sigma2_for_scr(wf, family, scr_db)
    cov = toeplitz_sigma(n_rx, sigma2 / n_rx)
    return ResolvedPoint(scene=scene, cov=cov, family=family, axis_value=float(value))


def trial_observation(
    cfg: ExperimentConfig, grid_index: int, trial_index: int, point: ResolvedPoint
) -> ObservationSet:
    """Scene response plus one clutter draw from the trial's own substream."""
    rng = np.random.default_rng(
        np.random.SeedSequence(cfg.seed, spawn_key=(_TRIAL_KEY, grid_index, trial_index))
    )
    draw = sample_clutter(point.family, point.cov, point.scene.n_snapshots, rng)
    return ObservationSet(y=target_response(point.scene).v + draw.n, tau_true=draw.tau)


def _run_named_estimator(name: str, y, point: ResolvedPoint, opts: EstimatorOptions):
    if name == "cmle":
        return cmle(y, point.scene, opts)
    if name == "imle":
        return imle(y, point.scene, opts)
    return imape(y, point.scene, point.family, opts)


def _mse_trial(args):
    cfg, grid_index, trial_index, point = args
    obs = trial_observation(cfg, grid_index, trial_index, point)
    out = []
    for name in cfg.estimators:
        result = _run_named_estimator(name, obs.y, point, cfg.options)
        out.append((result.delta_hat, result.boundary))
    return out


def _bound_columns(cfg: ExperimentConfig, grid_index: int, point: ResolvedPoint):
    columns: list[tuple[str, float]] = []
    mcrb_pair = None
    if "mcrb" in cfg.bounds or "hcrb" in cfg.bounds:
        mcrb_pair = mcrb_hcrb(point.scene, point.cov, point.family)
    for name in cfg.bounds:
        if name == "crb":
            val = crb_standard(point.scene, point.cov, point.family)
        elif name == "emcb":
            rng = np.random.default_rng(
                np.random.SeedSequence(cfg.seed, spawn_key=(_BOUND_KEY, grid_index))
            )
            val = emcb(point.scene, point.cov, point.family, n_mc=cfg.emcb_draws, rng=rng)
        elif name == "mcrb":
            val = mcrb_pair[0]
        elif name == "hcrb":
            val = mcrb_pair[1]
        else:  # crb_gaussian: same clutter-to-signal ratio, no texture modulation
            gauss_cov = point.cov.with_power(point.cov.sigma2 * point.family.mean_texture())
            val = crb_standard(point.scene, gauss_cov, TextureFamily.gaussian())
        columns.append((name, float(val)))
    return columns


def run_mse_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """Estimator mean-square error over the grid, one clutter draw per trial.

    Boundary-flagged trials are excluded from the squared-error mean and
    reported in the flagged_* columns; used_* columns give the trial count
    actually averaged.
    """
    chash = config_hash(cfg)
    waveform = sweep_waveform(cfg)
    records = []
    for grid_index, value in enumerate(cfg.grid):
        started = time.perf_counter()
        point = resolve_point(cfg, value, waveform)
        tasks = [(cfg, grid_index, t, point) for t in range(cfg.trials)]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                trial_rows = list(pool.map(_mse_trial, tasks, chunksize=8))
        else:
            trial_rows = [_mse_trial(task) for task in tasks]
        columns: list[tuple[str, float]] = []
        for j, name in enumerate(cfg.estimators):
            deltas = np.array([row[j][0] for row in trial_rows])
            flagged = np.array([row[j][1] for row in trial_rows])
            kept = deltas[~flagged]
            mse = float(np.mean((kept - cfg.delta) ** 2)) if kept.size else math.nan
            columns.append((f"mse_{name}", mse))
            columns.append((f"used_{name}", float(kept.size)))
            columns.append((f"flagged_{name}", float(np.count_nonzero(flagged))))
        columns.append(("crb", crb_standard(point.scene, point.cov, point.family)))
        records.append(
            SweepRecord(
                axis_value=float(value),
                columns=tuple(columns),
                wall_time=time.perf_counter() - started,
                config_hash=chash,
            )
        )
        logger.info("mse sweep %s=%g done in %.2fs", cfg.axis, value, records[-1].wall_time)
    return records


def run_bound_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """Requested lower bounds over the grid; no estimation runs."""
    chash = config_hash(cfg)
    waveform = sweep_waveform(cfg)
    records = []
    for grid_index, value in enumerate(cfg.grid):
        started = time.perf_counter()
        point = resolve_point(cfg, value, waveform)
        records.append(
            SweepRecord(
                axis_value=float(value),
                columns=tuple(_bound_columns(cfg, grid_index, point)),
                wall_time=time.perf_counter() - started,
                config_hash=chash,
            )
        )
    return records


def run_arl_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """Resolution limit over the grid: fixed-point, closed-form, and
    high-ratio asymptote columns."""
    chash = config_hash(cfg)
    waveform = sweep_waveform(cfg)
    records = []
    for value in cfg.grid:
        started = time.perf_counter()
        point = resolve_point(cfg, value, waveform)
        weight = 2.0 * kappa(point.family, point.scene.n_rx) / point.scene.n_rx
        lin = linearize(point.scene, point.cov)
        closed = arl_closed_form(lin, point.scene.alpha2, weight)
        exact = arl_exact(point.scene, point.cov, point.family)
        columns = (
            ("delta_exact", float(exact.delta)),
            ("delta_closed", float(closed.delta)),
            ("delta_asym", float(arl_asymptotic(lin, point.scene.alpha2, weight))),
        )
        records.append(
            SweepRecord(
                axis_value=float(value),
                columns=columns,
                wall_time=time.perf_counter() - started,
                config_hash=chash,
            )
        )
    return records


def _format(value: float) -> str:
    return f"{value:.17g}"


def write_outputs(
    records: list[SweepRecord], cfg: ExperimentConfig, outdir, stem: str
) -> dict[str, Path]:
    """Persist one sweep: <stem>.csv with the records, <stem>_manifest.json
    with the deterministic provenance, and <stem>_timings.json with the
    (non-reproducible) wall times kept out of the manifest on purpose."""
    if not records:
        raise ConfigError("nothing to write: no sweep records")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = [name for name, _ in records[0].columns]
    for rec in records:
        if [name for name, _ in rec.columns] != names:
            raise ConfigError("inconsistent sweep records: column names differ")

    csv_path = outdir / f"{stem}.csv"
    lines = [",".join([cfg.axis] + names)]
    for rec in records:
        lines.append(",".join([_format(rec.axis_value)] + [_format(v) for _, v in rec.columns]))
    csv_path.write_text("\n".join(lines) + "\n")

    manifest = {
        "axis": cfg.axis,
        "columns": names,
        "config": config_echo(cfg),
        "config_hash": records[0].config_hash,
        "grid": list(cfg.grid),
        "records": len(records),
        "version": f"v{__version__}-g{records[0].config_hash[:7]}",
    }
    manifest_path = outdir / f"{stem}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    timings_path = outdir / f"{stem}_timings.json"
    timings = {
        "per_point": [
            {"axis_value": rec.axis_value, "seconds": rec.wall_time} for rec in records
        ],
        "total_seconds": sum(rec.wall_time for rec in records),
    }
    timings_path.write_text(json.dumps(timings, indent=2) + "\n")
    return {"csv": csv_path, "manifest": manifest_path, "timings": timings_path}
