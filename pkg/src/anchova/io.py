"""JSON and CSV formats.

Files use 1-based coordinate indices; everything in memory is 0-based.

* function: ``{"dim": d, "terms": [{"coeff": c, "factors": {"j": [c0, c1, ...]}}]}``
* components: ``{"dim": d, "components": [{"subset": [...], "function": <function>}]}``
* weights: ``{"dim": d, "weights": [{"subset": [...], "gamma": g}]}``, omitted subsets are 0
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Iterable, TextIO

from .core import CoordSubset, format_number, format_p, mask_indices, parse_p
from .decomp import ComponentTuple
from .equivalence import EquivalenceReport
from .poly import Poly1
from .tensor import TensorFunction, TensorTerm
from .weights import ExplicitWeights

__all__ = [
    "function_to_dict",
    "function_from_dict",
    "components_to_dict",
    "components_from_dict",
    "weights_to_dict",
    "weights_from_dict",
    "load_json",
    "dump_json",
    "REPORT_HEADER",
    "write_reports_csv",
    "reports_to_csv",
    "read_reports_csv",
]

REPORT_HEADER = ["dim", "p", "anch_norm", "anova_norm", "ratio_a_over_anch", "ratio_anch_over_a", "c_dp", "satisfied"]


def _subset_from_list(indices, dim: int) -> int:
    idx = [int(i) for i in indices]
    if any(i < 1 or i > dim for i in idx):
        raise ValueError(f"subset indices must lie in 1..{dim}, got {idx}")
    return CoordSubset.from_indices((i - 1 for i in idx), dim).bits


def _subset_to_list(bits: int) -> list[int]:
    return [j + 1 for j in mask_indices(bits)]


def function_to_dict(f: TensorFunction) -> dict:
    return {
        "dim": f.dim,
        "terms": [
            {"coeff": t.coeff, "factors": {str(j + 1): list(h.coeffs) for j, h in t.factors}}
            for t in f.terms
        ],
    }


def function_from_dict(data: dict) -> TensorFunction:
    dim = int(data["dim"])
    terms = []
    for t in data.get("terms", []):
        facs = []
        for key, coeffs in t.get("factors", {}).items():
            j = int(key)
            if not 1 <= j <= dim:
                raise ValueError(f"factor coordinate {j} outside 1..{dim}")
            facs.append((j - 1, Poly1(tuple(float(c) for c in coeffs))))
        terms.append(TensorTerm(float(t.get("coeff", 1.0)), tuple(facs)))
    return TensorFunction(dim, terms)


def components_to_dict(g: ComponentTuple) -> dict:
    return {
        "dim": g.dim,
        "components": [
            {"subset": _subset_to_list(bits), "function": function_to_dict(comp)} for bits, comp in g.items()
        ],
    }


def components_from_dict(data: dict) -> ComponentTuple:
    dim = int(data["dim"])
    comps = {}
    for entry in data.get("components", []):
        bits = _subset_from_list(entry["subset"], dim)
        f = function_from_dict(entry["function"])
        if bits in comps:
            comps[bits] = comps[bits] + f
        else:
            comps[bits] = f
    return ComponentTuple(dim, comps)


def weights_to_dict(w) -> dict:
    table = w.table()
    return {
        "dim": w.dim,
        "weights": [
            {"subset": _subset_to_list(bits), "gamma": float(g)} for bits, g in enumerate(table) if g != 0
        ],
    }


def weights_from_dict(data: dict) -> ExplicitWeights:
    dim = int(data["dim"])
    values = {}
    for entry in data.get("weights", []):
        bits = _subset_from_list(entry["subset"], dim)
        if bits in values:
            raise ValueError(f"subset {entry['subset']} listed twice")
        values[bits] = float(entry["gamma"])
    return ExplicitWeights.from_mapping(dim, values)


def load_json(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data: dict, fh: TextIO) -> None:
    json.dump(data, fh, indent=2, sort_keys=False)
    fh.write("\n")


def _report_row(r: EquivalenceReport) -> list[str]:
    return [
        str(r.dim),
        format_p(r.p),
        format_number(r.anchored_norm),
        format_number(r.anova_norm),
        format_number(r.ratio_a_over_anch),
        format_number(r.ratio_anch_over_a),
        format_number(r.bound_cdp),
        "true" if r.bound_satisfied else "false",
    ]


def write_reports_csv(reports: Iterable[EquivalenceReport], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for r in reports:
        writer.writerow(_report_row(r))


def reports_to_csv(reports: Iterable[EquivalenceReport]) -> str:
    buf = _io.StringIO()
    write_reports_csv(reports, buf)
    return buf.getvalue()


def read_reports_csv(fh: TextIO) -> list[EquivalenceReport]:
    reader = csv.DictReader(fh)
    if reader.fieldnames != REPORT_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        if row["satisfied"] not in ("true", "false"):
            raise ValueError(f"bad satisfied flag {row['satisfied']!r}")
        out.append(
            EquivalenceReport(
                dim=int(row["dim"]),
                p=parse_p(row["p"]),
                anchored_norm=float(row["anch_norm"]),
                anova_norm=float(row["anova_norm"]),
                ratio_a_over_anch=float(row["ratio_a_over_anch"]),
                ratio_anch_over_a=float(row["ratio_anch_over_a"]),
                bound_cdp=float(row["c_dp"]),
                bound_satisfied=row["satisfied"] == "true",
            )
        )
    return out
