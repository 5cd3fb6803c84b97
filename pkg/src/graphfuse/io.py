"""Edge-list ingestion and machine-readable result emission.

The interchange format is UTF-8 text, one record per line, fields
(t, u, v) separated by whitespace or commas, with '#' comment lines.
Writers may include a directive comment like ``# n=50 t_min=1 t_max=12``
which parsers honor, so a written series round-trips exactly even with
isolated vertices or empty leading/trailing bins.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .graph import Graph, GraphSeries

__all__ = [
    "ParsedSeries",
    "parse_edge_list",
    "write_edge_list",
    "emit_results",
    "load_results",
    "power_result_rows",
    "detection_rows",
    "table2_rows",
    "feature_rows",
]

_DIRECTIVE = re.compile(r"\b(n|t_min|t_max)=(\d+)")


@dataclass(frozen=True)
class ParsedSeries:
    """A parsed series plus the label mapping that produced it."""

    series: GraphSeries
    labels: tuple[str, ...]
    t_start: int

    def time_label(self, t: int) -> int:
        """Original bin index of internal 1-based time t."""
        return self.t_start + t - 1


def _split_record(line: str) -> list[str]:
    return [p.strip() for p in line.split(",")] if "," in line else line.split()


def parse_edge_list(path, *, n: int | None = None, label_map_path=None) -> ParsedSeries:
    """Read a time-binned edge list into a series of graphs.

    Labels may be arbitrary strings; they map to dense vertex indices.
    All-integer labels map to themselves (n = max + 1 unless given),
    otherwise labels sort lexicographically and n is their count. An
    optional label-map file (one label per line) pins both n and the
    ordering. Bins missing between the smallest and largest t become
    empty graphs. Per-bin duplicate pairs collapse and self-loops drop,
    per the simple-graph rules.
    """
    path = Path(path)
    records: list[tuple[int, str, str]] = []
    directives: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, rawline in enumerate(fh, start=1):
            line = rawline.strip()
            if not line:
                continue
            if line.startswith("#"):
                for key, val in _DIRECTIVE.findall(line):
                    directives[key] = int(val)
                continue
            parts = _split_record(line)
            if len(parts) != 3:
                raise ValueError(
                    f"{path}:{lineno}: expected 3 fields (t, u, v), got {len(parts)}"
                )
            t_str, u, v = parts
            try:
                t = int(t_str)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: time bin {t_str!r} is not an integer") from None
            if t < 1:
                raise ValueError(f"{path}:{lineno}: time bin must be >= 1, got {t}")
            records.append((t, u, v))
    if not records:
        raise ValueError(f"{path}: no records")

    if n is None and "n" in directives:
        n = directives["n"]

    seen = {lbl for _, u, v in records for lbl in (u, v)}
    if label_map_path is not None:
        with Path(label_map_path).open("r", encoding="utf-8") as fh:
            ordered = [ln.strip() for ln in fh if ln.strip()]
        index = {lbl: i for i, lbl in enumerate(ordered)}
        missing = seen - index.keys()
        if missing:
            raise ValueError(f"labels not in label map: {sorted(missing)[:5]}")
        labels = tuple(ordered)
        n_final = n if n is not None else len(ordered)
        if n_final < len(ordered):
            raise ValueError(f"n={n_final} smaller than label map ({len(ordered)})")
    elif all(_is_int(lbl) for lbl in seen):
        index = {lbl: int(lbl) for lbl in seen}
        values = sorted(set(index.values()))
        if values[0] < 0:
            raise ValueError(f"negative vertex label {values[0]}")
        if n is not None:
            n_final = n
            if values[-1] >= n_final:
                raise ValueError(f"label {values[-1]} out of range for n={n_final}")
        else:
            n_final = values[-1] + 1
        labels = tuple(str(i) for i in range(n_final))
    else:
        ordered = sorted(seen)
        index = {lbl: i for i, lbl in enumerate(ordered)}
        labels = tuple(ordered)
        n_final = len(ordered)
        if n is not None:
            if n < len(ordered):
                raise ValueError(f"n={n} smaller than distinct label count {len(ordered)}")
            n_final = n
            labels = labels + tuple(f"_unused_{i}" for i in range(len(ordered), n))

    t_lo = min(t for t, _, _ in records)
    t_hi = max(t for t, _, _ in records)
    t_lo = min(t_lo, directives.get("t_min", t_lo))
    t_hi = max(t_hi, directives.get("t_max", t_hi))
    bins: dict[int, list[tuple[int, int]]] = {t: [] for t in range(t_lo, t_hi + 1)}
    for t, u, v in records:
        bins[t].append((index[u], index[v]))
    graphs = [Graph(n_final, bins[t]) for t in range(t_lo, t_hi + 1)]
    return ParsedSeries(series=GraphSeries(graphs), labels=labels, t_start=t_lo)


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except ValueError:
        return False


def write_edge_list(series: GraphSeries, path, *, t_start: int = 1, labels=None, directives: bool = True) -> None:
    """Write a series as 't u v' lines, one edge per line, bins in order."""
    path = Path(path)
    name = (lambda v: str(labels[v])) if labels is not None else str
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        if directives:
            fh.write(
                f"# n={series.n} t_min={t_start} t_max={t_start + len(series) - 1}\n"
            )
        for t_idx, g in enumerate(series):
            t = t_start + t_idx
            for u, v in g.edges:
                fh.write(f"{t} {name(u)} {name(v)}\n")


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        if v != v:  # NaN is not representable in strict JSON
            return None
        return float(f"{v:.6g}")
    return v


def emit_results(rows: list[dict], path, fmt: str = "csv", config: dict | None = None) -> None:
    """Write result rows as CSV (header + records) or JSON.

    Floats are printed with 6 significant digits in both formats. The
    CSV carries the config echo as leading '#' comment lines; the JSON
    document is {"config": ..., "results": [...]}.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}")
    if not rows:
        raise ValueError("no result rows to emit")
    path = Path(path)
    columns = list(rows[0].keys())
    for r in rows:
        if list(r.keys()) != columns:
            raise ValueError("result rows have inconsistent columns")
    if fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            if config is not None:
                fh.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for r in rows:
                writer.writerow([_fmt_cell(v) for v in r.values()])
    else:
        doc = {
            "config": config,
            "results": [{k: _json_value(v) for k, v in r.items()} for r in rows],
        }
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=False, allow_nan=False)
            fh.write("\n")


def load_results(path) -> tuple[list[dict], dict | None]:
    """Read back an emitted results file; returns (rows, config)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        with path.open("r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return doc["results"], doc.get("config")
    config = None
    rows: list[dict] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        header: list[str] | None = None
        for line in fh:
            if line.startswith("#"):
                if line.startswith("# config: "):
                    config = json.loads(line[len("# config: "):])
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
            else:
                rows.append(dict(zip(header, cells)))
    return rows, config


def _subset_str(subset) -> str:
    return ",".join(str(i) for i in subset)


def power_result_rows(results) -> list[dict]:
    return [
        {
            "scheme": r.scheme,
            "subset": _subset_str(r.subset),
            "q": float(r.q),
            "power": float(r.power),
            "se": float(r.se),
            "M": int(r.M),
        }
        for r in results
    ]


def detection_rows(results) -> list[dict]:
    return [
        {
            "t": r.t,
            "scheme": r.scheme,
            "subset": _subset_str(r.subset),
            "fused": float(r.fused),
            "cv": float(r.cv),
            "reject": bool(r.reject),
            "alpha": float(r.alpha),
        }
        for r in results
    ]


def table2_rows(rows) -> list[dict]:
    return [
        {
            "d_prime": r.d_prime,
            "n_subsets": r.n_subsets,
            "both": r.both,
            "equal_only": r.equal_only,
            "adaptive_only": r.adaptive_only,
        }
        for r in rows
    ]


def feature_rows(t_values, raw, normalized=None, names=None) -> list[dict]:
    """Per-time rows of raw feature values, optionally with z-scores."""
    from .invariants import FEATURE_NAMES

    names = names or FEATURE_NAMES
    out = []
    for i, t in enumerate(t_values):
        row: dict = {"t": int(t)}
        for j, name in enumerate(names):
            row[name] = float(raw[i, j])
        if normalized is not None:
            for j, name in enumerate(names):
                row[f"s_{name}"] = float(normalized[i, j])
        out.append(row)
    return out
