"""Named pipelines: each turns an ExperimentConfig into CSV artifacts."""
from __future__ import annotations

import time
from pathlib import Path

from .. import __version__
from .. import asymptotics as asy
from ..dist_core.diagnostics import class_diagnostics
from ..errors import ConfigError, RwsumError
from ..montecarlo import estimators as est
from ..montecarlo.table import (RatioConfig, RatioTable, _error_row, _row_from_mc, breiman_table,
                                ratio_table, ruin_table, stopped_table)
from ..weights import TruncatedMoment, i_long_tail_check, weight_condition_checks
from . import report
from .config import ExperimentConfig, render


def _mc_estimator(cfg, dep, allowed):
    e = cfg.estimator
    if e == "auto":
        return "ak" if dep.independent and "ak" in allowed else (
            "conditional" if dep.independent else "crude")
    if e not in allowed:
        raise ConfigError(f"estimator {e!r} not available for pipeline {cfg.pipeline}",
                          position="experiment.estimator")
    return e


def run_verify(cfg: ExperimentConfig):
    dep = cfg.dependence_spec()
    rc = RatioConfig(F=cfg.model(), x_grid=cfg.x_grid, n_list=cfg.n_list, dep=dep,
                     weights=cfg.weight_process(), estimator=cfg.estimator, N=cfg.N,
                     seed=cfg.seed, tolerance=cfg.tolerance, grid_n=cfg.grid_n,
                     threads=cfg.threads)
    return ratio_table(rc)


def _infinite_table(cfg, dep, G, tau, estimator):
    F = dep.marginal()
    rows = []
    for x in cfg.x_grid:
        try:
            rhs = asy.ruin_approx_infinite(F, G, float(x))
            e = est.ruin_prob_mc(F, dep, G, tau.n_max, float(x), cfg.N, cfg.seed, estimator,
                                 cfg.threads)
            rows.append(_row_from_mc(x, tau.n_max, e, rhs, e.estimator))
        except RwsumError as exc:
            rows.append(_error_row(x, tau.n_max, exc))
    return RatioTable(rows)


def run_ruin(cfg: ExperimentConfig):
    dep = cfg.dependence_spec()
    G = cfg.discount_model()
    tau = cfg.stopping_time()
    window = cfg.weight_window()
    case = cfg.case_label()
    if tau is None:
        if cfg.pipeline == "stopped":
            raise ConfigError("stopped pipeline needs [model] stopping", position="model.stopping")
        e = _mc_estimator(cfg, dep, ("crude", "conditional", "ak"))
        return ruin_table(dep.marginal(), dep, G, cfg.x_grid, cfg.n_list, cfg.N, cfg.seed, e,
                          case=case, window=window, form=cfg.form, threads=cfg.threads)
    if tau.kind == "infinite":
        e = _mc_estimator(cfg, dep, ("crude", "conditional", "ak"))
        return _infinite_table(cfg, dep, G, tau, e)
    e = _mc_estimator(cfg, dep, ("crude", "conditional"))
    return stopped_table(dep.marginal(), dep, G, tau, cfg.x_grid, cfg.N, cfg.seed, e,
                         form=cfg.form, case=case, window=window, threads=cfg.threads)


def run_breiman(cfg: ExperimentConfig):
    F = cfg.dependence_spec().marginal()
    return breiman_table(F, cfg.discount_model(), cfg.x_grid, cfg.n_list,
                         case=cfg.case_label(), window=cfg.weight_window())


def run_checks(cfg: ExperimentConfig):
    """Rows of (x, check_id, value, verdict)."""
    F = cfg.dependence_spec().marginal()
    G = cfg.discount_model()
    window = cfg.weight_window()
    if window is None:
        raise ConfigError("checks pipeline needs [model] window", position="model.window")
    rows = []
    kinds = {k.strip() for k in cfg.checks.split(",") if k.strip()}
    unknown = kinds - {"weight", "long_tail"}
    if unknown:
        raise ConfigError(f"unknown checks {sorted(unknown)}", position="model.checks")
    if "weight" in kinds:
        rep = weight_condition_checks(F, G, window, cfg.p, cfg.x_grid, n=max(cfg.n_list))
        rows.extend(rep.rows)
    if "long_tail" in kinds:
        from ..dist_core.window import log_window_f2_inv
        inv = log_window_f2_inv if window.kind == "log" else None
        I = TruncatedMoment(G, F.rv_index, window.f2, inv)
        lt = i_long_tail_check(I, cfg.lag, cfg.x_grid)
        verdict = "in_L0" if lt.in_L0 else "not_in_L0"
        from ..weights import CheckRow
        rows.extend(CheckRow(x, "i_ratio", r, verdict) for x, r in lt.rows)
        if lt.step_ratio is not None:
            rows.append(CheckRow(float(cfg.x_grid[-1]), "i_step_ratio", lt.step_ratio, verdict))
        rows.append(CheckRow(float(cfg.x_grid[-1]), "a_G", lt.a_G, verdict))
        rows.append(CheckRow(float(cfg.x_grid[-1]), "b_f2", lt.b_f2, verdict))
    return rows


def run_tail_eval(cfg: ExperimentConfig):
    """Rows (x, tail, cdf) for the increment model, plus class flags."""
    F = cfg.dependence_spec().marginal()
    rows = [(float(x), float(F.tail(x)), float(F.cdf(x))) for x in cfg.x_grid]
    diag = None
    try:
        diag = class_diagnostics(F)
    except RwsumError:
        pass
    return rows, diag


def run_experiment(cfg: ExperimentConfig, out_dir=None, plot_data=True) -> report.RunManifest:
    """Execute cfg.pipeline, write artifacts and a manifest under out_dir."""
    t0 = time.perf_counter()
    out = Path(out_dir if out_dir is not None else cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    man = report.RunManifest(config_digest=cfg.digest(), seed=cfg.seed, pipeline=cfg.pipeline,
                             version=__version__)
    cfg_path = report.atomic_write(out / "config.ini", render(cfg))
    man.add(cfg_path, out)
    name = cfg.pipeline.replace("-", "_")
    target = out / f"{name}.csv"
    if cfg.pipeline in ("verify", "ruin", "stopped", "breiman"):
        fn = {"verify": run_verify, "ruin": run_ruin, "stopped": run_ruin,
              "breiman": run_breiman}[cfg.pipeline]
        table = fn(cfg)
        for p in report.emit_report(table, target, plot_data=plot_data):
            man.add(p, out)
        man.errors = [f"x={r.x!r} n={r.n}: {r.flag}" for r in table.rows
                      if r.flag.startswith("error")]
        if table.f3:
            f3 = [(x, n) for x, n in sorted(table.f3.items())]
            man.add(report.emit_rows(("x", "f3"), f3, out / f"{name}_f3.csv"), out)
    elif cfg.pipeline == "checks":
        man.add(report.emit_checks(run_checks(cfg), target), out)
    else:
        rows, _ = run_tail_eval(cfg)
        man.add(report.emit_rows(("x", "tail", "cdf"), rows, target), out)
    man.wall_clock = time.perf_counter() - t0
    man.write(out / "manifest.json")
    return man
