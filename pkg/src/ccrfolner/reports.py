"""Report rows, deterministic JSON/CSV emission and parameter sweeps."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .amenability import build_folner_subspace, ratio_general
from .errors import CCRError
from .expr import eval_weyl, parse_element
from .lattice import (LatticeModel, hypertrace_commutator, monomial_hypertrace_prediction,
                      mult_defect, norm_report, trace_reproduction)
from .resolvent import FockRep, relation_residual
from .symplectic import SymplecticSpace, VecX
from .weyl import trace


@dataclass
class ReportRow:
    command: str
    parameters: dict
    metric: str
    value: Any
    prediction: Any = None
    provenance: str | None = None
    passed: bool = True
    tolerance: float | None = None

    def __post_init__(self):
        self.parameters = jsonable(self.parameters)
        self.value = jsonable(self.value)
        self.prediction = jsonable(self.prediction)
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ReportRow":
        return cls(**d)


class SweepError(CCRError):
    def __init__(self, msg, rows):
        self.rows = rows
        super().__init__(msg)


def jsonable(x):
    if isinstance(x, ReportRow):
        return jsonable(x.to_dict())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, VecX):
        return x.to_json()
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    return x


def dumps(obj) -> str:
    """Stable JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"


def to_csv(rows: Sequence[dict]) -> str:
    rows = [jsonable(r) for r in rows]
    keys = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v
                    for k, v in r.items()})
    return buf.getvalue()


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


def monomial_defect_prediction(width: int, lo: int, a: Sequence[int], b: Sequence[int]) -> float:
    """Closed form of ||phi(W(a)W(b)) - phi(W(a))phi(W(b))||_{2,tr} on a box.

    Each column h with h, h+a+b in the box but h+b outside contributes one
    unit-modulus entry, so the defect is sqrt(count / |box|).
    """
    hi = lo + width - 1

    def overlap(*shifts):
        out = 1
        for axis in zip(*shifts):
            low = max(lo - s for s in axis)
            high = min(hi - s for s in axis)
            out *= max(0, high - low + 1)
        return out

    zero = [0] * len(a)
    ab = [x + y for x, y in zip(a, b)]
    count = overlap(zero, ab) - overlap(zero, ab, b)
    return math.sqrt(count / width ** len(a))


def _space(spec) -> SymplecticSpace:
    return SymplecticSpace.from_json(spec.get("space", {"d": 1}))


def _gens(space, spec):
    return [space.vec(g) for g in spec["gens"]]


def _monomial(A):
    if len(A.terms) == 1:
        (f, c), = A.terms.items()
        if abs(c - 1) < 1e-15:
            return f
    return None


def _cell_hypertrace(spec, space, gens, N, tol):
    rows = []
    R = spec.get("R")
    for src in spec["ops"]:
        A = eval_weyl(parse_element(src, space), space)
        val = hypertrace_commutator(space, gens, N, A, R=R)
        f = _monomial(A)
        pred, prov, ok = None, None, True
        if f is not None:
            coords = LatticeModel(space, gens, 0).locate(f)
            pred, prov = monomial_hypertrace_prediction(N, coords), "closed-form"
            ok = abs(val - pred) <= tol
        rows.append(ReportRow("hypertrace", {"N": N, "op": src}, "trace_norm", val, pred, prov, ok, tol))
    return rows


def _cell_compress(spec, space, gens, N, tol):
    rows = []
    model = LatticeModel(space, gens, N, box=spec.get("box", "symmetric"))
    for a_src, b_src in spec.get("pairs", []):
        A = eval_weyl(parse_element(a_src, space), space)
        B = eval_weyl(parse_element(b_src, space), space)
        val = mult_defect(model, A, B)
        fa, fb = _monomial(A), _monomial(B)
        pred, prov, ok = None, None, True
        if fa is not None and fb is not None:
            pred = monomial_defect_prediction(model.width, model.lo, model.locate(fa), model.locate(fb))
            prov = "closed-form"
            ok = abs(val - pred) <= tol
        rows.append(ReportRow("compress", {"N": N, "op": f"{a_src}|{b_src}"}, "defect", val, pred, prov, ok, tol))
    for src in spec.get("ops", []):
        A = eval_weyl(parse_element(src, space), space)
        rep = norm_report(model, A)
        ok = rep["compressed_norm"] <= rep["l1_bound"] + tol
        rows.append(ReportRow("compress", {"N": N, "op": src}, "compressed_norm", rep["compressed_norm"],
                              rep["l1_bound"], "oracle", ok, tol))
        tr = trace_reproduction(model, A)
        tau = trace(A)
        rows.append(ReportRow("compress", {"N": N, "op": src}, "trace", tr, tau, "closed-form",
                              abs(tr - tau) <= tol, tol))
    return rows


def _cell_folner(spec, space, gens, N, tol):
    rows = []
    V = build_folner_subspace(gens, N)
    for src in spec["ops"]:
        A = eval_weyl(parse_element(src, space), space)
        br = ratio_general(A, V)
        ok = br.lower <= br.numeric + tol and br.numeric <= br.upper + 1e-6
        rows.append(ReportRow("folner-ratio", {"N": N, "op": src}, "ratio",
                              {"lower": br.lower, "numeric": br.numeric, "upper": br.upper},
                              None, None, bool(ok), tol))
    return rows


def _cell_residuals(spec, M):
    rows = []
    rep = FockRep(spec.get("modes", 1), M)
    K = spec.get("cutoff", 4)
    for params in spec["params"]:
        relation = params["relation"]
        res = relation_residual(rep, relation, params, K)
        rows.append(ReportRow("resolvent-residuals", {"M": M, "K": K, **params}, "raw", res.raw))
        rows.append(ReportRow("resolvent-residuals", {"M": M, "K": K, **params}, "compressed", res.compressed))
    return rows


def _run_cell(spec, value):
    cmd = spec["command"]
    tol = spec.get("tolerance", 1e-10)
    if cmd == "resolvent-residuals":
        return _cell_residuals(spec, value)
    space = _space(spec)
    gens = _gens(space, spec)
    if cmd == "hypertrace":
        return _cell_hypertrace(spec, space, gens, value, tol)
    if cmd == "compress":
        return _cell_compress(spec, space, gens, value, tol)
    if cmd == "folner-ratio":
        return _cell_folner(spec, space, gens, value, tol)
    raise CCRError(f"unknown sweep command {cmd!r}")


SLOPE_PREDICTIONS = {("hypertrace", "trace_norm"): -1.0, ("compress", "defect"): -0.5}


def _slopes(spec, rows):
    """Log-log slope of each decaying series against the box side 2N+1."""
    out = []
    series: dict[tuple, list] = {}
    for r in rows:
        if r.command in ("hypertrace", "compress") and r.metric in ("trace_norm", "defect"):
            series.setdefault((r.command, r.metric, r.parameters["op"]), []).append(r)
    tol = spec.get("slope_tolerance", 0.05)
    for (cmd, metric, op), rs in series.items():
        vals = [r.value for r in rs]
        if len(rs) < 2 or min(vals) <= 0:
            continue
        side = [2 * r.parameters["N"] + 1 for r in rs]
        slope = loglog_slope(side, vals)
        pred = SLOPE_PREDICTIONS[(cmd, metric)] if all(r.prediction is not None for r in rs) else None
        ok = True if pred is None else abs(slope - pred) <= tol
        out.append(ReportRow(cmd, {"op": op, "grid": [r.parameters["N"] for r in rs]},
                             "loglog_slope_vs_side", slope, pred, "closed-form" if pred is not None else None,
                             ok, tol))
    return out


def run_sweep(spec: dict, jobs: int = 1) -> list[ReportRow]:
    """Evaluate a sweep description; rows come back in grid order.

    ``spec`` keys: command, grid (one axis, e.g. {"N": [2, 4, 8]}), gens,
    ops / pairs / params, and optional space, box, R, tolerance.
    """
    grid = spec.get("grid", {})
    if len(grid) > 1:
        raise CCRError("sweeps take a single grid axis")
    values = next(iter(grid.values()), [])
    rows: list[ReportRow] = []

    def cell(v):
        try:
            return _run_cell(spec, v), None
        except ValueError as exc:  # CCRError included
            return None, exc

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(cell, values))
    else:
        results = [cell(v) for v in values]
    for v, (cell_rows, exc) in zip(values, results):
        if exc is not None:
            raise SweepError(f"cell {v!r} failed: {exc}", rows)
        rows.extend(cell_rows)
    rows.extend(_slopes(spec, rows))
    return rows
