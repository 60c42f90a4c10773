"""Command-line front end.

``hazmon run CONFIG`` executes a seeded sweep and writes ``results.csv``,
``summary.json`` and (unless ``--no-plots``) SVG figures.
``hazmon plan SCENARIO --edge K`` plans one route edge three ways and prints
the mean posterior each achieves.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 a trial
failed (suppressed by ``--keep-going``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import multiprocessing
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from scipy import stats

from . import svg
from .budget import edge_budgets
from .cvt import CvtConfig
from .geometry import RectDomain, as_points
from .hazard import HazardField, HazardParams, sample_unknown_hazards
from .optimizer import (EdgePlanningProblem, KinematicBounds, PlannerConfig, cell_grid_points,
                        objective_gamma, plan_edge)
from .routing import route_edges, vehicle_edges
from .sim import (ALL_METHODS, COVERAGE_METHODS, PATH_METHODS, Scenario, ScenarioSpec,
                  TrialResult, _end_velocities, build_routes, feasible_lawnmower,
                  generate_scenario, run_pipeline, straight_path)
from .spline import n_sample_intervals

log = logging.getLogger("hazmon")

OUT_ENV = "HAZMON_OUT"
RESULTS_SCHEMA_VERSION = 1
SUMMARY_SCHEMA = "hazmon-summary/1"
SUMMARY_SCHEMA_FILE = Path(__file__).with_name("summary.schema.json")
EXIT_OK, EXIT_CONFIG, EXIT_TRIAL = 0, 2, 3

CSV_COLUMNS = ("schema_version", "trial", "seed", "n_known", "n_pseudo", "method", "status",
               "ecr", "edv", "discovered", "discovery_rate", "expected_discovered",
               "n_unknown", "path_length", "route_length", "n_edges", "planner_failures")
METRICS = ("ecr", "edv", "discovered", "discovery_rate", "expected_discovered", "path_length")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = ""):
        where = f"{source}:{line}: " if line else (f"{source}: " if source else "")
        super().__init__(where + message)
        self.line = line


# --- schema ---------------------------------------------------------------------

NUM = (int, float)
INT_OR_RANGE = "int_or_range"
POINT = "point"
POINTS = "points"
BOUNDS4 = "bounds4"

SECTION_SCHEMAS: dict[str, dict[str, Any]] = {
    "scenario": {"domain": BOUNDS4, "depot": POINT, "n_vehicles": int, "total_budget": NUM,
                 "n_unknown": int, "n_known": INT_OR_RANGE, "n_pseudo": INT_OR_RANGE,
                 "known": POINTS},
    "hazard": {f.name: NUM for f in fields(HazardParams)},
    "cvt": {"alpha": NUM, "beta_density": NUM, "n_samples": int, "max_iter": int,
            "move_tol": NUM},
    "planner": {"k": int, "cp_spacing": NUM, "min_ctrl": int, "v_nominal": NUM,
                "max_outer": int, "max_inner": int, "mu0": NUM, "mu_growth": NUM,
                "objective_weight": NUM},
    "bounds": {f.name: NUM for f in fields(KinematicBounds)},
    "sweep": {"n_known": list, "n_pseudo": list},
}
TOP_SCHEMA: dict[str, Any] = {"experiment": str, "seed": int, "trials": int, "methods": list,
                              "output": str, "plots": bool, **{k: dict for k in SECTION_SCHEMAS}}
PLAN_TOP_SCHEMA: dict[str, Any] = {"seed": int, "output": str,
                                   **{k: dict for k in SECTION_SCHEMAS if k != "sweep"}}
EXPERIMENTS = {"coverage": COVERAGE_METHODS, "discovery": PATH_METHODS}


def _type_ok(value, kind) -> bool:
    if kind is NUM:
        return isinstance(value, NUM) and not isinstance(value, bool)
    if kind is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == INT_OR_RANGE:
        return _type_ok(value, int) or (isinstance(value, list) and len(value) == 2
                                        and all(_type_ok(v, int) for v in value))
    if kind == POINT:
        return isinstance(value, list) and len(value) == 2 and all(_type_ok(v, NUM) for v in value)
    if kind == POINTS:
        return isinstance(value, list) and all(_type_ok(p, POINT) for p in value)
    if kind == BOUNDS4:
        return isinstance(value, list) and len(value) == 4 and all(_type_ok(v, NUM) for v in value)
    return isinstance(value, kind)


def _kind_name(kind) -> str:
    return {NUM: "number", int: "integer", str: "string", bool: "boolean", list: "list",
            dict: "mapping", INT_OR_RANGE: "integer or [lo, hi]", POINT: "[x, y]",
            POINTS: "list of [x, y]", BOUNDS4: "[x_min, x_max, y_min, y_max]"}.get(kind, str(kind))


@dataclass
class Document:
    """Parsed YAML plus the source line of every key, for error messages."""

    data: dict
    lines: dict[tuple[str, ...], int]
    source: str

    def line(self, *path: str) -> int | None:
        while path:
            if path in self.lines:
                return self.lines[path]
            path = path[:-1]
        return None

    def error(self, message: str, *path: str) -> ConfigError:
        return ConfigError(message, self.line(*path), self.source)


def _collect_lines(node, path, out):
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = path + (str(k.value),)
            out[key] = k.start_mark.line + 1
            _collect_lines(v, key, out)


def load_document(path: Path, top_schema: dict) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", source=str(path)) from exc
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                          mark.line + 1 if mark else None, str(path)) from exc
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", 1, str(path))
    lines: dict[tuple[str, ...], int] = {}
    _collect_lines(node, (), lines)
    doc = Document(data, lines, str(path))
    for key, value in data.items():
        if key not in top_schema:
            raise doc.error(f"unknown key {key!r} (allowed: {', '.join(top_schema)})", key)
        if not _type_ok(value, top_schema[key]):
            raise doc.error(f"{key!r} must be of type {_kind_name(top_schema[key])}", key)
        if key in SECTION_SCHEMAS:
            schema = SECTION_SCHEMAS[key]
            for sub, v in value.items():
                if sub not in schema:
                    raise doc.error(f"unknown key {key}.{sub} (allowed: {', '.join(schema)})",
                                    key, sub)
                if not _type_ok(v, schema[sub]):
                    raise doc.error(f"{key}.{sub} must be of type {_kind_name(schema[sub])}", key, sub)
    return doc


# --- run configuration ------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    experiment: str
    spec: ScenarioSpec
    methods: tuple[str, ...]
    trials: int
    seed: int
    output: Path
    plots: bool
    planner: PlannerConfig = PlannerConfig()
    bounds: KinematicBounds = KinematicBounds()
    sweep_known: tuple[int, ...] | None = None
    sweep_pseudo: tuple[int, ...] | None = None
    known: np.ndarray | None = field(default=None, compare=False)

    def cells(self) -> list[tuple[Any, Any]]:
        ks = self.sweep_known or (self.spec.n_known,)
        ps = self.sweep_pseudo or (self.spec.n_pseudo,)
        return [(k, p) for k in ks for p in ps]


def _build(doc: Document, section: str, cls, **extra):
    values = dict(doc.data.get(section, {}))
    values.update(extra)
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise doc.error(f"invalid {section} settings: {exc}", section) from exc


def _scenario_spec(doc: Document) -> tuple[ScenarioSpec, np.ndarray | None]:
    sc = dict(doc.data.get("scenario", {}))
    try:
        domain = RectDomain(*sc.pop("domain", (0.0, 1000.0, 0.0, 1000.0)))
    except ValueError as exc:
        raise doc.error(str(exc), "scenario", "domain") from exc
    known = sc.pop("known", None)
    if known is not None:
        known = as_points(known)
        if len(known) == 0:
            raise doc.error("scenario.known must list at least one point", "scenario", "known")
        if not np.all(domain.contains(known)):
            raise doc.error("scenario.known points must lie inside the domain",
                            "scenario", "known")
        sc["n_known"] = len(known)
    for key in ("n_known", "n_pseudo"):
        if isinstance(sc.get(key), list):
            lo, hi = sc[key]
            if lo > hi or lo < (1 if key == "n_known" else 0):
                raise doc.error(f"scenario.{key} range [{lo}, {hi}] is invalid", "scenario", key)
            sc[key] = (lo, hi)
        elif key in sc and sc[key] < (1 if key == "n_known" else 0):
            raise doc.error(f"scenario.{key} is out of range", "scenario", key)
    if sc.get("n_vehicles", 1) < 1:
        raise doc.error("scenario.n_vehicles must be at least 1", "scenario", "n_vehicles")
    if sc.get("total_budget", 1.0) <= 0:
        raise doc.error("scenario.total_budget must be positive", "scenario", "total_budget")
    if sc.get("n_unknown", 0) < 0:
        raise doc.error("scenario.n_unknown must be non-negative", "scenario", "n_unknown")
    if "depot" in sc:
        sc["depot"] = tuple(float(v) for v in sc["depot"])
        if not domain.contains(np.array(sc["depot"])):
            raise doc.error("scenario.depot must lie inside the domain", "scenario", "depot")
    params = _build(doc, "hazard", HazardParams)
    cvt = _build(doc, "cvt", CvtConfig)
    try:
        cvt.validate()
    except ValueError as exc:
        raise doc.error(f"invalid cvt settings: {exc}", "cvt") from exc
    spec = ScenarioSpec(domain=domain, params=params, cvt=cvt, **sc)
    return spec, known


def _planner(doc: Document) -> tuple[PlannerConfig, KinematicBounds]:
    planner = _build(doc, "planner", PlannerConfig)
    if planner.k < 1 or planner.max_outer < 1 or planner.max_inner < 1 or planner.cp_spacing <= 0:
        raise doc.error("planner: k, max_outer, max_inner and cp_spacing must be positive",
                        "planner")
    bounds = _build(doc, "bounds", KinematicBounds)
    return planner, bounds


def load_run_config(path: Path, seed: int | None = None, out: str | None = None,
                    plots: bool | None = None) -> RunConfig:
    doc = load_document(path, TOP_SCHEMA)
    d = doc.data
    experiment = d.get("experiment", "discovery")
    if experiment not in EXPERIMENTS:
        raise doc.error(f"experiment must be one of {sorted(EXPERIMENTS)}", "experiment")
    methods = tuple(d.get("methods", EXPERIMENTS[experiment]))
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad or not methods:
        raise doc.error(f"unknown methods {bad} (allowed: {', '.join(ALL_METHODS)})", "methods")
    trials = d.get("trials", 1)
    if trials < 1:
        raise doc.error("trials must be at least 1", "trials")
    spec, known = _scenario_spec(doc)
    planner, bounds = _planner(doc)
    sweep = d.get("sweep", {})
    axes = {}
    for key in ("n_known", "n_pseudo"):
        vals = sweep.get(key)
        if vals is None:
            continue
        if not vals or not all(_type_ok(v, int) for v in vals):
            raise doc.error(f"sweep.{key} must be a non-empty list of integers", "sweep", key)
        if min(vals) < (1 if key == "n_known" else 0):
            raise doc.error(f"sweep.{key} values are out of range", "sweep", key)
        axes[key] = tuple(vals)
    if known is not None and "n_known" in axes:
        raise doc.error("sweep.n_known cannot be combined with explicit scenario.known",
                        "sweep", "n_known")
    output = Path(out or os.environ.get(OUT_ENV) or d.get("output", "results"))
    return RunConfig(experiment, spec, methods, int(trials),
                     int(d.get("seed", 0) if seed is None else seed), output,
                     bool(d.get("plots", True) if plots is None else plots), planner, bounds,
                     axes.get("n_known"), axes.get("n_pseudo"), known)


# --- trials ---------------------------------------------------------------------

@dataclass(frozen=True)
class TrialTask:
    index: int
    trial: int
    seed: int
    spec: ScenarioSpec
    methods: tuple[str, ...]
    planner: PlannerConfig
    bounds: KinematicBounds
    known: np.ndarray | None = None


def trial_seed(base: int, n_known, n_pseudo, trial: int) -> int:
    """Independent per-trial seed derived from the base seed and the cell."""
    keys = [base, trial]
    for v in (n_known, n_pseudo):
        keys.extend(v if isinstance(v, tuple) else (v,))
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def make_tasks(cfg: RunConfig) -> list[TrialTask]:
    tasks = []
    for n_known, n_pseudo in cfg.cells():
        spec = replace(cfg.spec, n_known=n_known, n_pseudo=n_pseudo)
        for t in range(cfg.trials):
            tasks.append(TrialTask(len(tasks), t, trial_seed(cfg.seed, n_known, n_pseudo, t),
                                   spec, cfg.methods, cfg.planner, cfg.bounds, cfg.known))
    return tasks


def make_scenario(task: TrialTask) -> Scenario:
    sc = generate_scenario(task.spec, task.seed)
    if task.known is None:
        return sc
    unknown = sample_unknown_hazards(task.known, task.spec.params, task.spec.domain,
                                     task.spec.n_unknown, [task.seed, 1])
    return replace(sc, known=task.known.copy(), unknown=unknown)


def run_task(task: TrialTask):
    """Returns ``(task, rows, error message or None)``; never raises."""
    try:
        rows = run_pipeline(make_scenario(task), task.methods, task.trial, task.planner,
                            task.bounds)
        return task, rows, None
    except Exception as exc:  # a trial failure must not kill the sweep
        log.debug("trial %d failed", task.index, exc_info=True)
        return task, [], f"{type(exc).__name__}: {exc}"


def run_tasks(tasks: list[TrialTask], jobs: int = 1):
    """Yield results in task order; trials run in ``jobs`` worker processes."""
    if jobs <= 1 or len(tasks) <= 1:
        yield from map(run_task, tasks)
        return
    ctx = multiprocessing.get_context("spawn")
    with ctx.Pool(processes=jobs) as pool:
        yield from pool.imap(run_task, tasks)


# --- outputs --------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _fmt_count(v) -> str:
    return "" if v is None else (f"{v[0]}-{v[1]}" if isinstance(v, tuple) else str(v))


def result_rows(task: TrialTask, rows: list[TrialResult], error: str | None):
    if error is not None:
        nan = float("nan")
        for m in task.methods:
            yield {"schema_version": RESULTS_SCHEMA_VERSION, "trial": task.trial,
                   "seed": task.seed, "n_known": _fmt_count(task.spec.n_known),
                   "n_pseudo": _fmt_count(task.spec.n_pseudo), "method": m,
                   "status": "error", **{c: nan for c in CSV_COLUMNS[7:]}}
        return
    for r in rows:
        yield {"schema_version": RESULTS_SCHEMA_VERSION, "trial": r.trial, "seed": r.seed,
               "n_known": r.n_known, "n_pseudo": r.n_pseudo, "method": r.method,
               "status": "ok", "ecr": r.ecr, "edv": r.edv, "discovered": r.discovered,
               "discovery_rate": r.discovery_rate,
               "expected_discovered": r.expected_discovered, "n_unknown": r.n_unknown,
               "path_length": r.path_length, "route_length": r.route_length,
               "n_edges": r.n_edges, "planner_failures": r.planner_failures}


def _group_key(row) -> tuple:
    return (str(row["n_known"]), str(row["n_pseudo"]), row["method"])


def _cell_label(task: TrialTask) -> tuple[str, str]:
    return _fmt_count(task.spec.n_known), _fmt_count(task.spec.n_pseudo)


def summarize(cfg: RunConfig, records: list[tuple[TrialTask, dict]]) -> dict:
    """Per-method and per-cell means and standard deviations, plus paired tests."""
    groups: dict[tuple, list[dict]] = {}
    overall: dict[str, list[dict]] = {}
    for task, row in records:
        if row["status"] != "ok":
            continue
        cell = _cell_label(task)
        groups.setdefault((*cell, row["method"]), []).append(row)
        overall.setdefault(row["method"], []).append(row)

    def stat(rows):
        out = {}
        for m in METRICS:
            v = np.array([float(r[m]) for r in rows])
            out[m] = {"mean": float(v.mean()), "std": float(v.std(ddof=1)) if len(v) > 1 else 0.0}
        return out

    cells = []
    for (k, p, m), rows in groups.items():
        cells.append({"n_known": k, "n_pseudo": p, "method": m, "n": len(rows),
                      "metrics": stat(rows)})
    comparisons = []
    if cfg.experiment == "discovery":
        for k, p in dict.fromkeys((c["n_known"], c["n_pseudo"]) for c in cells):
            for a, b in (("optimized", "straight"), ("optimized", "lawnmower"),
                         ("lawnmower", "straight")):
                ra = {r["trial"]: r["discovered"] for r in groups.get((k, p, a), [])}
                rb = {r["trial"]: r["discovered"] for r in groups.get((k, p, b), [])}
                common = sorted(set(ra) & set(rb))
                if len(common) < 2:
                    continue
                x = np.array([ra[t] for t in common], float)
                y = np.array([rb[t] for t in common], float)
                d = x - y
                if np.all(d == d[0]):
                    pval = 0.0 if d[0] > 0 else 1.0
                else:
                    pval = float(stats.ttest_rel(x, y, alternative="greater").pvalue)
                comparisons.append({"n_known": k, "n_pseudo": p, "better": a, "worse": b,
                                    "n": len(common), "mean_difference": float(d.mean()),
                                    "p_value": pval})
    failures = sum(1 for _, r in records if r["status"] != "ok")
    return {"schema": SUMMARY_SCHEMA, "experiment": cfg.experiment, "seed": cfg.seed,
            "trials_per_cell": cfg.trials, "methods": list(cfg.methods),
            "failed_rows": failures,
            "overall": {m: {"n": len(rows), "metrics": stat(rows)} for m, rows in overall.items()},
            "cells": cells, "comparisons": comparisons}


def write_csv(path: Path, rows: list[dict]):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r[k]) for k in CSV_COLUMNS})


def write_plots(cfg: RunConfig, summary: dict, tasks: list[TrialTask]):
    cells = summary["cells"]
    labels = list(dict.fromkeys(f"{c['n_known']}/{c['n_pseudo']}" for c in cells))
    metric = "discovered" if cfg.experiment == "discovery" else "ecr"
    series, errors = {}, {}
    for m in cfg.methods:
        by = {f"{c['n_known']}/{c['n_pseudo']}": c["metrics"][metric]
              for c in cells if c["method"] == m}
        series[m] = [by.get(lbl, {"mean": float("nan")})["mean"] for lbl in labels]
        errors[m] = [by.get(lbl, {"std": 0.0})["std"] for lbl in labels]
    title = ("Hazards discovered per trial (known/pseudo)" if metric == "discovered"
             else "Edge coverage ratio (known/pseudo)")
    (cfg.output / f"{metric}.svg").write_text(svg.bar_chart(labels, series, errors, metric, title))
    if tasks:
        sc = make_scenario(tasks[0])
        original, augmented = build_routes(sc)
        pos_o = original.nodes.positions
        pos_a = augmented.nodes.positions
        pseudo = augmented.nodes.nodes[len(sc.known):]
        fig = svg.route_figure(sc.domain, sc.depot, sc.known, pseudo,
                               {"original": [pos_o[list(s)] for s in original.sequences],
                                "edge-cvt": [pos_a[list(s)] for s in augmented.sequences]},
                               f"Trial 0 routes (seed {tasks[0].seed})")
        (cfg.output / "routes.svg").write_text(fig)


def cmd_run(args) -> int:
    try:
        cfg = load_run_config(Path(args.config), args.seed, args.out,
                              False if args.no_plots else None)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg.output.mkdir(parents=True, exist_ok=True)
    tasks = make_tasks(cfg)
    log.info("running %d trials (%s) with %d job(s)", len(tasks), cfg.experiment, args.jobs)
    records: list[tuple[TrialTask, dict]] = []
    timings = []
    failed = []
    for task, rows, err in run_tasks(tasks, args.jobs):
        if err is not None:
            failed.append((task, err))
            log.error("trial %d (seed %d) failed: %s", task.index, task.seed, err)
        for row in result_rows(task, rows, err):
            records.append((task, row))
        for r in rows:
            timings.append((task.index, r.method, r.wall_time, r.timed_out))
        if err is not None and not args.keep_going:
            break
    write_csv(cfg.output / "results.csv", [r for _, r in records])
    with open(cfg.output / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(("task", "method", "wall_time", "timed_out"))
        for row in timings:
            w.writerow((row[0], row[1], f"{row[2]:.4f}", int(row[3])))
    summary = summarize(cfg, records)
    (cfg.output / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if cfg.plots:
        write_plots(cfg, summary, tasks)
    if failed and not args.keep_going:
        print(f"error: trial failed: {failed[0][1]}", file=sys.stderr)
        return EXIT_TRIAL
    return EXIT_OK


# --- single-edge planning -----------------------------------------------------------

def plan_single_edge(doc_path: Path, edge: int, seed: int | None = None):
    """Plan edge ``edge`` of a scenario's edge-CVT route three ways.

    The edge is planned against the prior field (no earlier samples).
    Returns a dict with the problem, the three paths and their mean
    posteriors.
    """
    doc = load_document(doc_path, PLAN_TOP_SCHEMA)
    spec, known = _scenario_spec(doc)
    planner, bounds = _planner(doc)
    base = int(doc.data.get("seed", 0) if seed is None else seed)
    task = TrialTask(0, 0, base, spec, PATH_METHODS, planner, bounds, known)
    sc = make_scenario(task)
    _, route = build_routes(sc)
    per_vehicle = vehicle_edges(route)
    flat = [(m, i) for m, es in enumerate(per_vehicle) for i in range(len(es))]
    if not 0 <= edge < len(flat):
        raise doc.error(f"edge index {edge} out of range (route has {len(flat)} edges)")
    budgets, sv = edge_budgets(route, sc.fleet, sc.domain)
    m, i = flat[edge]
    e = per_vehicle[m][i]
    v0s, vfs = _end_velocities(per_vehicle[m], planner.nominal_speed(bounds))
    field_ = HazardField(sc.known, sc.params)
    prob = EdgePlanningProblem(e.a, e.b, v0s[i], vfs[i], float(budgets[m][i]),
                               cell_grid_points(sv, edge), field_, bounds)
    init, _ = feasible_lawnmower(prob, planner)
    res = plan_edge(prob, init, planner)
    straight = straight_path(e.a, e.b, bounds, planner)
    straight_prob = replace(prob, n_samples=n_sample_intervals(straight.duration,
                                                               sc.params.delta_s))
    gammas = {"optimized": res.gamma, "lawnmower": objective_gamma(init, prob),
              "straight": objective_gamma(straight, straight_prob)}
    paths = {"optimized": res.path, "lawnmower": init, "straight": straight}
    problems = {"optimized": prob, "lawnmower": prob, "straight": straight_prob}
    return {"scenario": sc, "route": route, "problem": prob, "problems": problems,
            "paths": paths, "gammas": gammas, "result": res, "edge": e,
            "output": doc.data.get("output", "plan")}


def cmd_plan(args) -> int:
    try:
        out = plan_single_edge(Path(args.scenario), args.edge, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: planning failed: {exc}", file=sys.stderr)
        return EXIT_TRIAL
    for name, g in out["gammas"].items():
        print(f"{name:<10s} gamma={g:.12f}")
    res = out["result"]
    if not res.success:
        print(f"warning: planner status {res.status}", file=sys.stderr)
    if not args.no_plots:
        outdir = Path(args.out or os.environ.get(OUT_ENV) or out["output"])
        outdir.mkdir(parents=True, exist_ok=True)
        prob = out["problem"]
        pts = np.vstack([prob.grid] + [p.eval(np.linspace(p.t0, p.tf, 200))
                                       for p in out["paths"].values()])
        pad = 30.0
        x0, y0 = pts.min(axis=0) - pad
        x1, y1 = pts.max(axis=0) + pad
        n = 40
        xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
        ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
        gx, gy = np.meshgrid(xs, ys)
        post = prob.field.posterior(np.column_stack([gx.ravel(), gy.ravel()])).reshape(n, n)
        lines = {name: p.eval(np.linspace(p.t0, p.tf, 400)) for name, p in out["paths"].items()}
        fig = svg.posterior_figure((x0, x1, y0, y1), post, lines, out["scenario"].known,
                                   f"Edge {args.edge}: prior posterior and planned paths")
        (outdir / f"plan_edge{args.edge}.svg").write_text(fig)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hazmon", description=__doc__.splitlines()[0])
    p.add_argument("--log-level", default="WARNING",
                   choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment sweep from a YAML config")
    r.add_argument("config")
    r.add_argument("--seed", type=int, default=None, help="override the config's base seed")
    r.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    r.add_argument("--keep-going", action="store_true", help="record failed trials and continue")
    r.add_argument("--no-plots", action="store_true")
    r.add_argument("--out", default=None, help=f"output directory (else ${OUT_ENV} or config)")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("plan", help="plan one route edge and compare path types")
    q.add_argument("scenario")
    q.add_argument("--edge", type=int, required=True)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--no-plots", action="store_true")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_plan)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
