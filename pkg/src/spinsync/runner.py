"""Job execution for every CLI mode.

Each mode produces a table (header + rows). Grid points are computed
independently and returned in row-major order whatever the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytics, quantities
from .config import JobSpec
from .correlations import UndefinedCorrelation
from .liouvillian import (
    DegenerateSteadyState,
    build_liouvillian,
    set_field,
    steady_state,
)
from .measures import SITE_NAMES, joint_distribution, pair_marginal, phase_grid, s1, s3_ab_bc, s3_ab_ca
from .perturbation import extract_coefficients

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class Table:
    name: str
    header: list[str]
    rows: list[list]


def _entropy_base(spec: JobSpec):
    return 2.0 if spec.entropy_base == "2" else None


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _point(task):
    """Steady state and requested quantities at one configuration."""
    config, outputs, base = task
    n = config.n_spins
    values, errors = [], []
    try:
        L = build_liouvillian(config)
        rho = steady_state(L).matrix
    except DegenerateSteadyState as exc:
        for name in outputs:
            values += quantities.flatten(name, None, n)
        return values, f"DegenerateSteadyState: {exc}"
    for name in outputs:
        try:
            v = quantities.evaluate(name, rho, L, entropy_base=base)
        except UndefinedCorrelation as exc:
            v = None
            errors.append(f"{name}: {exc}")
        values += quantities.flatten(name, v, n)
    return values, "; ".join(errors)


def _quantity_header(outputs, n):
    return [c for name in outputs for c in quantities.columns(name, n)]


def run_steady(spec: JobSpec) -> list[Table]:
    outputs = spec.resolved_outputs()
    values, err = _point((spec.system, outputs, _entropy_base(spec)))
    return [Table("steady", _quantity_header(outputs, spec.system.n_spins) + ["error"], [values + [err]])]


def run_grid(spec: JobSpec) -> list[Table]:
    """sweep2d, or entangle with an optional grid."""
    outputs = spec.resolved_outputs()
    base = _entropy_base(spec)
    n = spec.system.n_spins
    axes = spec.grid
    if not axes:
        values, err = _point((spec.system, outputs, base))
        return [Table(spec.mode, _quantity_header(outputs, n) + ["error"], [values + [err]])]
    axis_values = [a.values() for a in axes]
    points = [()]
    for vals in axis_values:
        points = [p + (v,) for p in points for v in vals]
    tasks = []
    for p in points:
        cfg = spec.system
        for a, v in zip(axes, p):
            cfg = set_field(cfg, a.field, v)
        tasks.append((cfg, outputs, base))
    log.info("%s: %d grid points on %d worker(s)", spec.mode, len(tasks), spec.workers)
    results = _map(_point, tasks, spec.workers)
    header = [a.field for a in axes] + _quantity_header(outputs, n) + ["error"]
    rows = [list(p) + vals + [err] for p, (vals, err) in zip(points, results)]
    return [Table(spec.mode, header, rows)]


def run_dist(spec: JobSpec) -> list[Table]:
    n = spec.system.n_spins
    rho = steady_state(build_liouvillian(spec.system)).matrix
    phi = phase_grid(spec.samples)
    header, cols = ["phi"], [phi]
    for j in range(n):
        header.append(f"S1_{SITE_NAMES[j]}")
        cols.append(s1(rho, j, phi))
    pairs = {1: [], 2: [(0, 1)], 3: [(0, 1), (1, 2), (2, 0)]}[n]
    for i, j in pairs:
        header.append(f"S2_{SITE_NAMES[i]}{SITE_NAMES[j]}")
        cols.append(pair_marginal(rho, i, j, phi))
    tables = [Table("dist", header, [list(r) for r in zip(*cols)])]
    if spec.joint and n >= 2:
        grid = phase_grid(spec.joint_samples)
        p1, p2 = np.meshgrid(grid, grid, indexing="ij")
        p1, p2 = p1.ravel(), p2.ravel()
        if n == 2:
            head = ["phi_A", "phi_B", "S2_joint"]
            vals = [joint_distribution(rho, np.stack([p1, p2], axis=-1))]
        else:
            head = ["phi_1", "phi_2", "S3_ABBC", "S3_ABCA"]
            vals = [s3_ab_bc(rho, p1, p2), s3_ab_ca(rho, p1, p2)]
        tables.append(Table("joint", head, [list(r) for r in zip(p1, p2, *vals)]))
    return tables


def _locus_point(task):
    target, g, omega_a, scale, bracket = task
    try:
        root = analytics.locate_blockade_locus(target, g, omega_a, scale=scale, bracket=bracket)
        return root, ""
    except analytics.NoSignChange as exc:
        return float("nan"), f"NoSignChange: {exc}"


def run_locus(spec: JobSpec) -> list[Table]:
    lo = spec.locus
    tasks = [(lo.target, g, lo.omega_a, lo.scale, lo.bracket) for g in lo.g]
    results = _map(_locus_point, tasks, spec.workers)
    rows = []
    for g, (root, err) in zip(lo.g, results):
        if lo.target == "m1AB":
            pred = (analytics.m1AB_blockade_ratio_exact(g) if lo.scale == "sum"
                    else analytics.m1AB_blockade_ratio(g))
        else:
            pred = float("nan")
        rows.append([g, lo.omega_a, root, pred, err])
    header = ["g", "omega_a", "ratio", "ratio_asymptotic", "error"]
    return [Table("locus", header, rows)]


def run_perturb(spec: JobSpec) -> list[Table]:
    p = spec.perturb
    n = spec.system.n_spins
    targets = p.targets or tuple(t for t in quantities.default_outputs("sweep2d", n) if t.startswith("m"))
    monomials = p.monomials or tuple(
        (a, d - a) for d in range(1, p.max_order + 1) for a in range(d, -1, -1))
    rows = []
    for t in targets:
        head, letters = t.split("_")
        idx = tuple(SITE_NAMES.index(c) for c in letters)
        label = idx[0] if len(idx) == 1 else idx
        fit = extract_coefficients(spec.system, monomials, (label, int(head[1])), axes=p.axes)
        for (a, b), c in fit.coefficients.items():
            rows.append([t, a, b] + quantities.split_complex(c) + [fit.condition[a + b]])
    header = ["quantity", f"pow_{p.axes[0]}", f"pow_{p.axes[1]}",
              "coeff_re", "coeff_im", "coeff_abs", "coeff_phase", "condition"]
    return [Table("perturb", header, rows)]


RUNNERS = {
    "steady": run_steady,
    "dist": run_dist,
    "sweep2d": run_grid,
    "entangle": run_grid,
    "locus": run_locus,
    "perturb": run_perturb,
}


def run(spec: JobSpec) -> list[Table]:
    return RUNNERS[spec.mode](spec)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) or math.isinf(v) else v
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(table: Table, spec: JobSpec) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "mode": spec.mode,
        "table": table.name,
        "config": spec.to_text(),
        "columns": table.header,
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def render(tables: list[Table], spec: JobSpec) -> list[tuple[str, str]]:
    """(suffix, text) pairs; the first table has no suffix."""
    out = []
    for k, t in enumerate(tables):
        text = to_csv(t) if spec.format == "csv" else to_json(t, spec)
        out.append(("" if k == 0 else f".{t.name}", text))
    return out
