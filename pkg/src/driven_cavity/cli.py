"""Command-line experiment runner.

    python -m driven_cavity fig2 --seed 7 --out results/

Every subcommand reads an optional JSON config, applies flag overrides (flags
win), runs, and writes its data files plus one ``<name>.manifest.json`` that
echoes the config, the package version, wall time, the files written and all
warnings raised along the way.  The default output directory comes from
``$DRIVEN_CAVITY_OUT`` (else ``./results``).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .branches import branch_superposition, conditional_steady_superposition, post_emission_collapse
from .correlations import QuadratureSpec, hft_approx, hft_from_branches, hft_numeric
from .dynamics import SystemParams, integrate_master, steady_state_mixture, steady_state_values
from .entanglement import entropy_of_entanglement, realignment_trace_norm, schematic_post_collapse_mixture
from .errors import CavityError, ConfigError
from .hilbert import SpaceSpec, atom_field_product, atom_state, build_operators, coherent_state, partial_trace_field
from .series import TimeSeries, write_rows, write_series
from .trajectories import Channel, ensemble_expectation, entanglement_series, evolve_trajectory, run_ensemble

OUT_ENV = "DRIVEN_CAVITY_OUT"
EXPERIMENTS = ("steady", "master", "traject", "fig1", "fig2", "fig3", "realignment")
REQUIRED_KEYS = ("drive", "kappa")
INITIAL_STATES = ("vacuum", "conditional", "collapsed", "mixture")

# per-experiment defaults for keys that are not physical rates
_T_FINAL = {"master": 10.0, "traject": 10.0, "fig1": 3.0, "fig2": 100.0, "fig3": 3.0}
_INITIAL = {"master": "vacuum", "traject": "vacuum", "fig1": "collapsed", "fig2": "vacuum"}


@dataclass
class ExperimentConfig:
    experiment: str
    drive: float
    kappa: float
    gamma: float = 0.0
    g: float = 1.0
    n_max: int = 60
    dt: float = 0.002
    t_final: float = 0.0
    sample_dt: float = 0.05
    seed: int = 0
    n_traj: int = 1
    theta: float = 0.0
    relative_phase: float = 0.0
    initial: str = "vacuum"
    exact: bool = False
    workers: int = 1
    out: str = field(default_factory=lambda: os.environ.get(OUT_ENV, "results"))

    @property
    def params(self) -> SystemParams:
        return SystemParams(drive=self.drive, kappa=self.kappa, gamma=self.gamma, g=self.g)

    @property
    def spec(self) -> SpaceSpec:
        return SpaceSpec(self.n_max)

    @property
    def stride(self) -> int:
        return max(1, int(round(self.sample_dt / self.dt)))

    def echo(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_INT_KEYS = {"n_max", "seed", "n_traj", "workers"}
_FLOAT_KEYS = {"drive", "kappa", "gamma", "g", "dt", "t_final", "sample_dt", "theta", "relative_phase"}


def _experiment_defaults(experiment: str) -> dict:
    out = {"t_final": _T_FINAL.get(experiment, 0.0), "initial": _INITIAL.get(experiment, "vacuum")}
    if experiment == "fig2":
        out["gamma"] = 0.4
    if experiment == "traject":
        out["n_traj"] = 100
    return out


def _parse_json(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    if not text.strip():
        raise ConfigError(f"config {path} is empty; required keys: {', '.join(REQUIRED_KEYS)}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _coerce(key: str, value):
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if key == "exact":
        if not isinstance(value, bool):
            raise ConfigError(f"exact: expected true or false, got {value!r}")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    return value


def _validate(cfg: ExperimentConfig) -> None:
    for key in ("drive", "kappa", "gamma", "g"):
        value = getattr(cfg, key)
        if not np.isfinite(value) or value < 0:
            raise ConfigError(f"{key}: must be a finite nonnegative rate, got {value}")
    if cfg.n_max < 1:
        raise ConfigError(f"n_max: must be at least 1, got {cfg.n_max}")
    for key in ("dt", "sample_dt"):
        if not getattr(cfg, key) > 0:
            raise ConfigError(f"{key}: must be positive, got {getattr(cfg, key)}")
    if cfg.t_final < 0:
        raise ConfigError(f"t_final: must be nonnegative, got {cfg.t_final}")
    if cfg.n_traj < 1:
        raise ConfigError(f"n_traj: must be at least 1, got {cfg.n_traj}")
    if cfg.workers < 1:
        raise ConfigError(f"workers: must be at least 1, got {cfg.workers}")
    if cfg.initial not in INITIAL_STATES:
        raise ConfigError(f"initial: must be one of {', '.join(INITIAL_STATES)}, got {cfg.initial!r}")


def load_config(path: str | None, experiment: str, overrides: dict | None = None) -> ExperimentConfig:
    """Validated config for ``experiment``.

    With a file, ``drive`` and ``kappa`` are required; without one the
    reference rates (E = 0.7, kappa = 0.125) are used.  ``overrides`` (from
    flags) win over file values.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    values = {"drive": 0.7, "kappa": 0.125} if path is None else {}
    values.update(_experiment_defaults(experiment))
    if path is not None:
        data = _parse_json(path)
        unknown = sorted(set(data) - set(_FIELDS))
        if unknown:
            raise ConfigError(f"{path}: unknown keys: {', '.join(unknown)}")
        missing = [k for k in REQUIRED_KEYS if k not in data]
        if missing:
            raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
        if data.get("experiment", experiment) != experiment:
            raise ConfigError(f"{path}: config is for {data['experiment']!r}, not {experiment!r}")
        values.update({k: _coerce(k, v) for k, v in data.items()})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["experiment"] = experiment
    cfg = ExperimentConfig(**values)
    _validate(cfg)
    return cfg


# --- experiments --------------------------------------------------------------


def _initial_ket(cfg: ExperimentConfig) -> np.ndarray:
    spec = cfg.spec
    if cfg.initial == "vacuum":
        return atom_field_product(atom_state(0, 1), coherent_state(0, spec))
    psi = conditional_steady_superposition(cfg.params, cfg.relative_phase, spec)
    return post_emission_collapse(psi) if cfg.initial == "collapsed" else psi


def _initial_rho(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.initial == "mixture":
        return steady_state_mixture(cfg.params, cfg.spec)
    psi = _initial_ket(cfg)
    return np.outer(psi, psi.conj())


def _atom_entropy(state: np.ndarray) -> float:
    return entropy_of_entanglement(partial_trace_field(state))


def run_steady(cfg: ExperimentConfig) -> dict:
    phi_ss, r_ss = steady_state_values(cfg.params)
    print(f"phi_ss = {phi_ss:.10f}")
    print(f"r_ss = {r_ss:.10f}")
    return {"results": {"phi_ss": phi_ss, "r_ss": r_ss}}


def run_realignment(cfg: ExperimentConfig) -> dict:
    phi_ss, _ = steady_state_values(cfg.params)
    value = realignment_trace_norm(schematic_post_collapse_mixture(phi_ss), 2, 4)
    ok = abs(value - np.sqrt(2)) < 1e-9
    print(f"trace norm = {value:.15f} (sqrt2 = {np.sqrt(2):.15f}) {'OK' if ok else 'MISMATCH'}")
    return {"results": {"phi_ss": phi_ss, "trace_norm": value, "matches_sqrt2": bool(ok)}, "exit": 0 if ok else 1}


def run_master(cfg: ExperimentConfig) -> dict:
    ops = build_operators(cfg.spec)
    p_e, n_op, a = ops.excited_projector, ops.number, ops.a

    def observe(rho):
        return [
            np.trace(p_e @ rho).real,
            np.trace(n_op @ rho).real,
            np.trace(a @ rho).real,
            np.trace(a @ rho).imag,
            _atom_entropy(rho),
        ]

    run = integrate_master(_initial_rho(cfg), cfg.params, cfg.t_final, cfg.dt, cfg.stride, observe=observe)
    cols = np.asarray(run.states)
    names = ("excited", "photons", "re_a", "im_a", "atom_entropy")
    series = TimeSeries(run.times, {n: cols[:, i] for i, n in enumerate(names)})
    return {"series": {"master": series}, "results": {"max_trace_drift": run.max_trace_drift}}


def run_traject(cfg: ExperimentConfig) -> dict:
    psi0 = _initial_ket(cfg)
    results = run_ensemble(
        psi0, cfg.params, cfg.t_final, cfg.n_traj, cfg.dt, cfg.seed, cfg.stride, workers=cfg.workers
    )
    ops = build_operators(cfg.spec)
    excited = ensemble_expectation(results, ops.excited_projector)
    photons = ensemble_expectation(results, ops.number)
    series = TimeSeries(
        excited.times,
        {
            "excited": excited.mean,
            "excited_stderr": np.nan_to_num(excited.stderr),
            "photons": photons.mean,
            "photons_stderr": np.nan_to_num(photons.stderr),
        },
    )
    jumps = [[res.index, j.time, j.channel.value] for res in results for j in res.jumps]
    return {
        "series": {"traject": series},
        "tables": {"traject_jumps": (["trajectory", "time", "channel"], jumps)},
        "results": {"n_jumps": len(jumps)},
    }


def run_fig1(cfg: ExperimentConfig) -> dict:
    params, spec = cfg.params, cfg.spec
    phi_ss, _ = steady_state_values(params)
    psi0 = _initial_ket(cfg)
    # the emission adds 2 phi_ss to the relative phase of the two field components
    effective_phase = cfg.relative_phase + 2 * phi_ss if cfg.initial == "collapsed" else cfg.relative_phase
    run = integrate_master(np.outer(psi0, psi0.conj()), params, cfg.t_final, cfg.dt, cfg.stride, observe=_atom_entropy)
    traj = evolve_trajectory(psi0, params, cfg.t_final, cfg.dt, cfg.seed, 0, cfg.stride)
    traj_entropy = entanglement_series(traj, include_jumps=False)["entropy"]
    branch = np.array([_atom_entropy(branch_superposition(t, params, effective_phase, spec)) for t in run.times])
    series = TimeSeries(
        run.times, {"branch": branch, "trajectory": traj_entropy, "master": np.asarray(run.states, dtype=float)}
    )
    early = run.times <= 2
    deviation = float(np.abs(branch - series["master"])[early].max())
    return {"series": {"fig1": series}, "results": {"max_branch_master_deviation_gt_le_2": deviation}}


def run_fig2(cfg: ExperimentConfig) -> dict:
    traj = evolve_trajectory(_initial_ket(cfg), cfg.params, cfg.t_final, cfg.dt, cfg.seed, 0, cfg.stride)
    series = entanglement_series(traj)
    jumps = [[j.time, j.channel.value] for j in traj.jumps]
    n_spont = sum(1 for j in traj.jumps if j.channel == Channel.SPONTANEOUS)
    return {
        "series": {"fig2": series},
        "tables": {"fig2_jumps": (["time", "channel"], jumps)},
        "results": {"n_jumps": len(jumps), "n_spontaneous": n_spont},
    }


def run_fig3(cfg: ExperimentConfig) -> dict:
    params, spec = cfg.params, cfg.spec
    quad = QuadratureSpec(cfg.theta)
    n_samples = int(round(cfg.t_final / cfg.sample_dt)) + 1
    ts = np.round(np.arange(n_samples) * cfg.sample_dt, 12)
    cols = {
        "coherent": hft_from_branches(ts, params, quad, True, spec).values,
        "incoherent": hft_from_branches(ts, params, quad, False, spec).values,
        "approx": hft_approx(ts, params).values,
        "approx_incoherent": hft_approx(ts, params, coherent=False).values,
    }
    if cfg.exact:
        psi = conditional_steady_superposition(params, cfg.relative_phase, spec)
        cols["exact"] = hft_numeric(np.outer(psi, psi.conj()), params, quad, ts, cfg.dt).values
    meta = {"theta": cfg.theta, "normalization": "incoherent steady-state mixture <a_theta>", "samples": n_samples}
    return {"series": {"fig3": TimeSeries(ts, cols)}, "results": meta}


RUNNERS = {
    "steady": run_steady,
    "master": run_master,
    "traject": run_traject,
    "fig1": run_fig1,
    "fig2": run_fig2,
    "fig3": run_fig3,
    "realignment": run_realignment,
}


class _ListHandler(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record):
        self.messages.append(f"{record.name}: {record.getMessage()}")


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run ``cfg`` and write its outputs; returns the exit status."""
    handler = _ListHandler()
    logging.getLogger("driven_cavity").addHandler(handler)
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            outcome = RUNNERS[cfg.experiment](cfg)
    finally:
        logging.getLogger("driven_cavity").removeHandler(handler)
    wall = time.perf_counter() - start

    os.makedirs(cfg.out, exist_ok=True)
    files = []
    for name, series in outcome.get("series", {}).items():
        path = os.path.join(cfg.out, f"{name}.csv")
        write_series(series, path, time_label="time")
        files.append(path)
    for name, (header, rows) in outcome.get("tables", {}).items():
        path = os.path.join(cfg.out, f"{name}.csv")
        write_rows(path, header, rows)
        files.append(path)

    # one entry per warning site; repeated threshold crossings keep the first message
    seen = {}
    for w in caught:
        seen.setdefault((w.category, w.filename, w.lineno), f"{w.category.__name__}: {w.message}")
    manifest = {
        "experiment": cfg.experiment,
        "config": cfg.echo(),
        "version": __version__,
        "wall_time_s": wall,
        "outputs": [os.path.basename(f) for f in files],
        "results": outcome.get("results", {}),
        "warnings": list(seen.values()) + handler.messages,
    }
    with open(os.path.join(cfg.out, f"{cfg.experiment}.manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, default=float)
        fh.write("\n")
    return outcome.get("exit", 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, help="base seed for trajectories")
    common.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUT_ENV} or ./results)")
    common.add_argument("--ntraj", type=int, help="number of trajectories")
    common.add_argument("--theta", type=float, help="quadrature angle for h^FT")

    parser = argparse.ArgumentParser(prog="driven_cavity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    helps = {
        "steady": "print the semiclassical steady-state phase and amplitude",
        "master": "integrate the master equation",
        "traject": "run a trajectory ensemble",
        "fig1": "branch-state vs trajectory vs master-equation entropy after an emission",
        "fig2": "single-trajectory entropy with spontaneous emission",
        "fig3": "h^FT from the branch states and the short-time closed form",
        "realignment": "realignment trace norm of the schematic post-collapse mixture",
    }
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "out": args.out, "n_traj": args.ntraj, "theta": args.theta}
    try:
        cfg = load_config(args.config, args.experiment, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_experiment(cfg)
    except (CavityError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
