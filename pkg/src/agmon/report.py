"""JSON and CSV renderings of eigenpairs, distance fields and bound reports.

Field names and CSV column order are fixed; new columns are only ever
appended. Infinite values are written as the string ``"inf"`` (JSON) or
``inf`` (CSV); missing values as ``null`` / empty.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from ._io import atomic_write_text
from .bounds import BoundReport
from .errors import SchemaViolation
from .experiments import DecayComparison, TreeExperiment
from .metric import AgmonField
from .spectral import EigenPair
from .stochastic import WalkBound

__all__ = [
    "BOUND_COLUMNS",
    "FIELD_COLUMNS",
    "PROFILE_COLUMNS",
    "num",
    "pairs_document",
    "pairs_from_document",
    "field_document",
    "field_rows",
    "bound_document",
    "bound_rows",
    "walk_document",
    "experiment_document",
    "profile_rows",
    "to_csv",
    "write_json",
    "write_csv",
]

BOUND_COLUMNS = ("v", "abs_phi", "rho", "bound", "slack")
REFINED_COLUMNS = ("refined_bound", "refined_slack")
WALK_COLUMNS = ("walk_bound", "walk_slack", "walk_tighter")
FIELD_COLUMNS = ("v", "potential", "degree", "allowed", "node_cost", "rho", "next", "fmt")
PROFILE_COLUMNS = ("level", "mean_abs_phi", "node_cost", "rho_E")


def num(x):
    """JSON-safe float: ``inf``/``-inf``/``nan`` become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# eigenpairs -----------------------------------------------------------------

def pairs_document(pairs: list[EigenPair], tol: float, method: str) -> dict:
    return {
        "n": int(pairs[0].eigenvector.shape[0]) if pairs else 0,
        "method": method,
        "tol_eig": tol,
        "pairs": [
            {
                "index": i,
                "eigenvalue": p.eigenvalue,
                "residual": p.residual,
                "eigenvector": [float(x) for x in p.eigenvector],
            }
            for i, p in enumerate(pairs)
        ],
    }


def pairs_from_document(doc: dict) -> dict[int, EigenPair]:
    """Eigenpairs keyed by their ``index`` field, exactly as stored."""
    try:
        out = {}
        for i, entry in enumerate(doc["pairs"]):
            vec = np.array([float(x) for x in entry["eigenvector"]], dtype=np.float64)
            out[int(entry.get("index", i))] = EigenPair(
                float(entry["eigenvalue"]), vec, float(entry.get("residual", "nan"))
            )
        return out
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"malformed eigenpair document: {exc}") from exc


# distance fields --------------------------------------------------------------

def field_rows(graph, potential, agmon: AgmonField, fmt: np.ndarray | None = None) -> list[dict]:
    rows = []
    for v in range(graph.n):
        nxt = int(agmon.predecessor[v])
        rows.append(
            {
                "v": v,
                "potential": float(potential[v]),
                "degree": graph.degrees[v],
                "allowed": bool(potential[v] <= agmon.energy),
                "node_cost": num(agmon.node_cost[v]),
                "rho": num(agmon.rho[v]),
                "next": nxt if nxt >= 0 else None,
                "fmt": num(fmt[v]) if fmt is not None else None,
            }
        )
    return rows


def field_document(graph, potential, agmon: AgmonField, fmt=None, empty_allowed: bool = False) -> dict:
    return {
        "energy": num(agmon.energy),
        "energy_shift": agmon.energy_shift,
        "empty_allowed_region": empty_allowed,
        "rows": field_rows(graph, potential, agmon, fmt),
    }


# bound reports ----------------------------------------------------------------

def bound_rows(theorem: BoundReport, refined: BoundReport | None = None, walk: BoundReport | None = None) -> list[dict]:
    rows = []
    slack = theorem.slack
    for v in range(theorem.n):
        row = {
            "v": v,
            "abs_phi": num(theorem.abs_phi[v]),
            "rho": num(theorem.rho[v]),
            "bound": num(theorem.bound[v]),
            "slack": num(slack[v]),
        }
        if refined is not None:
            row["refined_bound"] = num(refined.bound[v])
            row["refined_slack"] = num(refined.slack[v])
        if walk is not None:
            row["walk_bound"] = num(walk.bound[v])
            row["walk_slack"] = num(walk.slack[v])
            row["walk_tighter"] = bool(walk.bound[v] < theorem.bound[v]) and not walk.vacuous
        rows.append(row)
    return rows


def _summary(report: BoundReport) -> dict:
    return {
        "ok": report.passed,
        "min_slack": num(report.min_slack),
        "worst_vertex": report.worst_vertex,
        "tol": report.tol,
    }


def bound_document(
    theorem: BoundReport,
    refined: BoundReport | None = None,
    walk: BoundReport | None = None,
    walk_info: WalkBound | None = None,
    eigen_residual: float | None = None,
    eigenpair_ok: bool = True,
) -> dict:
    doc = {
        "energy": num(theorem.energy),
        "theorem_bound_ok": theorem.passed,
        "eigen_residual": num(eigen_residual),
        "eigenpair_ok": eigenpair_ok,
        "sup_norm": num(theorem.abs_phi.max()),
        "argmax": theorem.argmax,
        "argmax_allowed": theorem.argmax_allowed,
        "theorem": _summary(theorem),
    }
    if refined is not None:
        doc["refined_bound_ok"] = refined.passed
        doc["refined"] = _summary(refined)
    if walk is not None:
        doc["walk_bound_ok"] = walk.passed
        doc["walk_vacuous"] = walk.vacuous
        doc["walk"] = _summary(walk)
        doc["walk"]["tighter_count"] = 0 if walk.vacuous else int(np.sum(walk.bound < theorem.bound))
        if walk_info is not None:
            doc["walk"]["delta"] = walk_info.delta
            doc["walk"]["linear_residual"] = walk_info.residual
    doc["rows"] = bound_rows(theorem, refined, walk)
    return doc


def walk_document(graph, walk: WalkBound) -> dict:
    rows = []
    for v in range(graph.n):
        rows.append(
            {
                "v": v,
                "allowed": bool(walk.allowed[v]),
                "exact": num(walk.exact_moment[v]),
                "mc": num(walk.mc_moment[v]) if walk.mc_moment is not None else None,
                "mc_stderr": num(walk.mc_stderr[v]) if walk.mc_stderr is not None else None,
            }
        )
    return {
        "energy": num(walk.energy),
        "delta": walk.delta,
        "linear_residual": walk.residual,
        "samples": walk.sample_count,
        "seed": walk.seed,
        "rows": rows,
    }


# tree experiment ------------------------------------------------------------

def profile_rows(exp: TreeExperiment, agmon: AgmonField) -> list[dict]:
    rows = []
    for i in range(exp.k + 2):
        mask = exp.levels == i
        phi = exp.hub_value if i == exp.k + 1 else exp.level_profile[i]
        rows.append(
            {
                "level": i,
                "mean_abs_phi": num(phi),
                "node_cost": num(agmon.node_cost[mask].mean()),
                "rho_E": num(agmon.rho[mask].mean()),
            }
        )
    return rows


def experiment_document(exp: TreeExperiment, agmon: AgmonField, cmp: DecayComparison, recurrence: float) -> dict:
    return {
        "q": exp.q,
        "k": exp.k,
        "w_mag": exp.w_mag,
        "n": exp.graph.n,
        "hub": exp.hub,
        "lambda1": exp.lambda1,
        "lambda_bound": exp.lambda_bound,
        "lambda_bound_ok": exp.lambda_bound_ok,
        "eigen_residual": exp.pair.residual,
        "hub_value": exp.hub_value,
        "level_profile": [num(x) for x in exp.level_profile],
        "level_spread": [num(x) for x in exp.level_spread],
        "ratios": [num(x) for x in exp.ratios],
        "predicted_ratio": exp.predicted_ratio,
        "recurrence_residual": recurrence,
        "node_cost": [num(x) for x in cmp.node_cost],
        "empirical_rate": [num(x) for x in cmp.empirical_rate],
        "rate_ratio": [num(x) for x in cmp.rate_ratio],
        "root_rho": cmp.root_rho,
        "root_log_decay": cmp.root_log_decay,
        "sharpness": cmp.sharpness,
        "profile": profile_rows(exp, agmon),
    }


# writers --------------------------------------------------------------------

def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_csv(rows: list[dict], columns=None) -> str:
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_json(doc: dict, path) -> None:
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def write_csv(rows: list[dict], path, columns=None) -> None:
    atomic_write_text(path, to_csv(rows, columns))
