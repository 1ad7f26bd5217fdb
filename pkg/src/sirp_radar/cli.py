"""Command-line front end: sweep subcommands, single-shot estimation on a
stored observation file, and information-weight queries.

Exit codes: 0 success, 2 configuration/usage problems, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from ._errors import ConfigError, NumericalError
from .crlb import inverse_texture_mean, kappa, nu
from .estimators import EstimatorOptions, cmle, imape, imle
from .experiments import (
    ExperimentConfig,
    default_config,
    run_arl_sweep,
    run_bound_sweep,
    run_mse_sweep,
    write_outputs,
)
from .radar_model import ArrayGeometry, ObservationSet, RadarScene
from .sirp_clutter import TextureFamily

__all__ = ["build_parser", "load_observations", "main", "write_observations"]

_REFERENCE = default_config("k")

_FAMILY_DEFAULTS = {"k": (2.0, 10.0), "t": (1.1, 2.0)}

_SWEEP_AXES = {"mse": ("T", "scr"), "bounds": ("T", "N", "a", "b"),
               "arl": ("scr", "a", "b", "alpha1", "alpha2")}

_DEFAULT_GRIDS = {
    ("mse", "T"): (2.0, 4.0, 6.0, 10.0, 16.0),
    ("mse", "scr"): (0.0, 5.0, 10.0, 15.0, 20.0, 25.0),
    ("bounds", "T"): (2.0, 4.0, 8.0, 16.0, 32.0, 64.0),
    ("bounds", "N"): (2.0, 3.0, 4.0, 6.0, 8.0, 10.0),
    ("bounds", "a", "k"): (1.5, 2.0, 3.0, 5.0),
    ("bounds", "a", "t"): (1.1, 1.5, 2.0, 3.0),
    ("bounds", "b"): (1.0, 2.0, 5.0, 10.0),
    ("arl", "scr"): (0.0, 5.0, 10.0, 15.0, 20.0),
    ("arl", "a", "k"): (1.5, 2.0, 3.0, 5.0),
    ("arl", "a", "t"): (1.1, 1.5, 2.0, 3.0),
    ("arl", "b"): (1.0, 2.0, 5.0, 10.0),
    ("arl", "alpha1"): (0.5, 1.0, 2.0, 4.0, 8.0),
    ("arl", "alpha2"): (0.5, 1.0, 2.0, 4.0, 8.0),
}

# Named reproductions of the reference study's figure families.  Each entry
# pins the sweep command, texture kind, axis, grid, and geometry.
PRESETS = {
    "fig1": ("mse", "k", dict(axis="T", grid=(2.0, 4.0, 6.0, 10.0, 16.0), scr_db=10.0)),
    "fig2": ("mse", "k", dict(axis="scr", grid=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0))),
    "fig3": ("mse", "t", dict(axis="T", grid=(2.0, 4.0, 6.0, 10.0, 16.0), scr_db=10.0)),
    "fig4": ("mse", "t", dict(axis="scr", grid=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0))),
    "fig5": ("bounds", "k", dict(axis="T", grid=(2.0, 4.0, 8.0, 16.0, 32.0, 64.0),
                                 m_tx=6, n_rx=3, scr_db=10.0)),
    "fig6": ("bounds", "k", dict(axis="N", grid=(2.0, 3.0, 4.0, 6.0, 8.0, 10.0),
                                 m_tx=6, n_snapshots=2, scr_db=10.0)),
    "fig7": ("bounds", "k", dict(axis="a", grid=(1.5, 2.0, 3.0, 5.0), scr_db=10.0)),
    "fig8": ("bounds", "k", dict(axis="b", grid=(1.0, 2.0, 5.0, 10.0), scr_db=10.0)),
    "fig9": ("arl", "k", dict(axis="scr", grid=(0.0, 5.0, 10.0, 15.0, 20.0),
                              m_tx=6, n_rx=8)),
    "fig10": ("arl", "k", dict(axis="alpha2", grid=(0.5, 1.0, 2.0, 4.0, 8.0),
                               m_tx=6, n_rx=8, scr_db=10.0)),
}

_RUNNERS = {"mse": run_mse_sweep, "bounds": run_bound_sweep, "arl": run_arl_sweep}


def _default_seed() -> int:
    raw = os.environ.get("SIRP_RADAR_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"SIRP_RADAR_SEED must be an integer, got {raw!r}") from exc


def _add_common_scene_flags(sub):
    sub.add_argument("--family", choices=("k", "t"), default="k",
                     help="texture law: gamma (k) or inverse-gamma (t) (default: %(default)s)")
    sub.add_argument("--a", type=float, default=None,
                     help="texture shape (default: 2 for k, 1.1 for t)")
    sub.add_argument("--b", type=float, default=None,
                     help="texture scale (default: 10 for k, 2 for t)")
    sub.add_argument("--M", type=int, default=_REFERENCE.m_tx,
                     help="transmit sensors (default: %(default)s)")
    sub.add_argument("--N", type=int, default=_REFERENCE.n_rx,
                     help="receive sensors (default: %(default)s)")
    sub.add_argument("--T", type=int, default=_REFERENCE.n_snapshots,
                     help="snapshots (default: %(default)s)")
    sub.add_argument("--delta", type=float, default=_REFERENCE.delta,
                     help="true angular spacing (default: %(default)s)")
    sub.add_argument("--scr", type=float, default=_REFERENCE.scr_db,
                     help="signal-to-clutter ratio in dB when not swept (default: %(default)s)")
    sub.add_argument("--grid", type=str, default=None,
                     help="comma-separated sweep grid (default: per-axis table)")


def _add_estimator_flags(sub):
    ref = EstimatorOptions()
    sub.add_argument("--max-iters", type=int, default=ref.max_iters,
                     help="iteration cap for the alternating fits (default: %(default)s)")
    sub.add_argument("--epsilon", type=float, default=ref.epsilon,
                     help="spacing-change stopping threshold (default: %(default)s)")
    sub.add_argument("--grid-points", type=int, default=ref.grid_points,
                     help="coarse search grid size (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirp-radar",
        description="Two-target angular-spacing estimation and resolution "
        "limits in compound-Gaussian clutter.",
    )
    parser.add_argument("--preset", choices=sorted(PRESETS, key=lambda p: int(p[3:])),
                        default=None, help="run a named figure-family reproduction")
    parser.add_argument("--outdir", type=str, default="results",
                        help="output directory (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=None,
                        help="experiment seed (default: SIRP_RADAR_SEED or 0)")
    parser.add_argument("--trials", type=int, default=None,
                        help=f"Monte Carlo trials (default: {_REFERENCE.trials})")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel worker processes (default: %(default)s)")

    subs = parser.add_subparsers(dest="command")

    mse = subs.add_parser("mse", help="Monte Carlo mean-square-error sweep")
    mse.add_argument("--axis", choices=_SWEEP_AXES["mse"], required=True)
    _add_common_scene_flags(mse)
    _add_estimator_flags(mse)

    bounds = subs.add_parser("bounds", help="lower-bound sweep (no estimation)")
    bounds.add_argument("--axis", choices=_SWEEP_AXES["bounds"], required=True)
    _add_common_scene_flags(bounds)
    bounds.add_argument("--emcb-draws", type=int, default=_REFERENCE.emcb_draws,
                        help="texture draws for the expected bound (default: %(default)s)")

    arl = subs.add_parser("arl", help="angular resolution limit sweep")
    arl.add_argument("--axis", choices=_SWEEP_AXES["arl"], required=True)
    _add_common_scene_flags(arl)

    est = subs.add_parser("estimate", help="run all estimators on a stored observation")
    est.add_argument("--input", type=str, required=True,
                     help="observation JSON file {n, t, re, im}")
    est.add_argument("--family", choices=("k", "t"), default="k",
                     help="texture law assumed by the posterior-mode estimator")
    est.add_argument("--m", type=int, default=_REFERENCE.m_tx,
                     help="transmit sensors (default: %(default)s)")
    est.add_argument("--omega1-deg", type=float, default=60.0,
                     help="known first-target direction in degrees (default: %(default)s)")
    est.add_argument("--waveform", type=str, default=None,
                     help="waveform JSON file (rows = M); drawn from the seed if omitted")
    _add_estimator_flags(est)

    kap = subs.add_parser("kappa", help="print the information weight and "
                          "both texture-curvature conventions")
    kap.add_argument("--family", choices=("k", "t", "gaussian"), required=True)
    kap.add_argument("--a", type=float, default=None, help="texture shape")
    kap.add_argument("--b", type=float, default=None, help="texture scale")
    kap.add_argument("--N", type=int, required=True, help="receive sensors")
    return parser


def _family_from(kind: str, a, b) -> TextureFamily:
    if kind == "gaussian":
        return TextureFamily.gaussian()
    da, db = _FAMILY_DEFAULTS[kind]
    a = da if a is None else a
    b = db if b is None else b
    if kind == "k":
        return TextureFamily.k_distributed(a, b)
    return TextureFamily.t_distributed(a, b)


def _parse_grid(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"could not parse grid {raw!r}: {exc}") from exc


def _grid_for(command: str, axis: str, kind: str) -> tuple[float, ...]:
    if (command, axis, kind) in _DEFAULT_GRIDS:
        return _DEFAULT_GRIDS[(command, axis, kind)]
    return _DEFAULT_GRIDS[(command, axis)]


def _sweep_config(args, command: str) -> ExperimentConfig:
    family = _family_from(args.family, args.a, args.b)
    grid = _parse_grid(args.grid) if args.grid else _grid_for(command, args.axis, args.family)
    overrides = dict(
        axis=args.axis,
        grid=grid,
        m_tx=args.M,
        n_rx=args.N,
        n_snapshots=args.T,
        delta=args.delta,
        scr_db=args.scr,
        family=family,
        seed=args.seed if args.seed is not None else _default_seed(),
        workers=args.workers,
    )
    if args.trials is not None:
        overrides["trials"] = args.trials
    if command == "bounds":
        overrides["emcb_draws"] = args.emcb_draws
    if command == "mse":
        overrides["options"] = EstimatorOptions(
            max_iters=args.max_iters, epsilon=args.epsilon, grid_points=args.grid_points
        )
    return ExperimentConfig(**overrides)


def _preset_config(args) -> tuple[str, ExperimentConfig]:
    command, kind, overrides = PRESETS[args.preset]
    merged = dict(overrides)
    merged["seed"] = args.seed if args.seed is not None else _default_seed()
    merged["workers"] = args.workers
    if args.trials is not None:
        merged["trials"] = args.trials
    return command, default_config(kind, **merged)


def _run_sweep(command: str, cfg: ExperimentConfig, outdir: str, stem: str) -> int:
    records = _RUNNERS[command](cfg)
    paths = write_outputs(records, cfg, outdir, stem)
    for path in paths.values():
        print(path)
    return 0


def load_observations(path) -> ObservationSet:
    """Read the documented observation format into an N x T complex matrix.

    The payload is JSON {n, t, re, im} with the real and imaginary parts as
    flat row-major arrays of length n*t.
    """
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at byte offset {exc.pos}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object with keys n, t, re, im")
    missing = [key for key in ("n", "t", "re", "im") if key not in doc]
    if missing:
        raise ConfigError(f"{path}: missing keys {missing}")
    n, t = int(doc["n"]), int(doc["t"])
    if n < 1 or t < 1:
        raise ConfigError(f"{path}: n and t must be positive, got {n}, {t}")
    re, im = np.asarray(doc["re"], dtype=float), np.asarray(doc["im"], dtype=float)
    if re.shape != (n * t,) or im.shape != (n * t,):
        raise ConfigError(
            f"{path}: payload length mismatch: expected {n * t} values, "
            f"got re={re.size}, im={im.size}"
        )
    return ObservationSet(y=(re + 1j * im).reshape(n, t))


def write_observations(path, y: np.ndarray) -> None:
    y = np.asarray(y, dtype=complex)
    doc = {
        "n": y.shape[0],
        "t": y.shape[1],
        "re": y.real.ravel().tolist(),
        "im": y.imag.ravel().tolist(),
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def _load_waveform(path, m_tx: int) -> np.ndarray:
    obs = load_observations(path)
    if obs.y.shape[0] != m_tx:
        raise ConfigError(
            f"{path}: waveform has {obs.y.shape[0]} rows, expected M={m_tx}"
        )
    return obs.y


def _result_payload(result) -> dict:
    return {
        "delta_hat": float(result.delta_hat),
        "alpha1": [result.alpha_hat[0].real, result.alpha_hat[0].imag],
        "alpha2": [result.alpha_hat[1].real, result.alpha_hat[1].imag],
        "iterations": int(result.iterations_run),
        "converged": bool(result.converged),
        "boundary": bool(result.boundary),
        "a_hat": None if result.a_hat is None else float(result.a_hat),
        "b_hat": None if result.b_hat is None else float(result.b_hat),
    }


def _run_estimate(args) -> int:
    obs = load_observations(args.input)
    n_rx, t_snap = obs.y.shape
    seed = args.seed if args.seed is not None else _default_seed()
    if args.waveform is not None:
        waveform = _load_waveform(args.waveform, args.m)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
        shape = (args.m, t_snap)
        waveform = rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)
    if waveform.shape[1] < t_snap:
        raise ConfigError(
            f"waveform provides {waveform.shape[1]} snapshots, observation has {t_snap}"
        )
    scene = RadarScene(
        geometry=ArrayGeometry.uniform(args.m, n_rx),
        omega1=math.pi * math.sin(math.radians(args.omega1_deg)),
        delta=1.0,
        alpha1=1.0 + 0.0j,
        alpha2=1.0 + 0.0j,
        waveform=waveform[:, :t_snap],
    )
    family = _family_from(args.family, None, None)
    opts = EstimatorOptions(
        max_iters=args.max_iters, epsilon=args.epsilon, grid_points=args.grid_points
    )
    payload = {
        "cmle": _result_payload(cmle(obs.y, scene, opts)),
        "imle": _result_payload(imle(obs.y, scene, opts)),
        "imape": _result_payload(imape(obs.y, scene, family, opts)),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _run_kappa(args) -> int:
    family = _family_from(args.family, args.a, args.b)
    print(f"kappa = {kappa(family, args.N):.17g}")
    if args.family != "gaussian":
        print(f"nu_printed = {nu(family):.17g}")
        print(f"inverse_texture_mean = {inverse_texture_mean(family):.17g}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.preset is not None:
            if args.command is not None:
                raise ConfigError("--preset already names a command; drop the subcommand")
            command, cfg = _preset_config(args)
            return _run_sweep(command, cfg, args.outdir, args.preset)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        if args.command in _RUNNERS:
            cfg = _sweep_config(args, args.command)
            return _run_sweep(args.command, cfg, args.outdir, f"{args.command}_{args.axis}")
        if args.command == "estimate":
            return _run_estimate(args)
        return _run_kappa(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
