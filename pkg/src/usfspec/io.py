"""File formats: traces, reports and sweep tables as CSV and JSON.

CSV files are comma separated with LF line endings and a header row,
preceded by ``# key=value`` provenance lines. Floats are written with 17
significant digits, so every value round-trips exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .signal import FoldedTrace, SamplingConfig, SoSParams

TOOL = "usfspec"


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def provenance(config: dict, seed: int | None) -> dict:
    return {"tool": TOOL, "version": __version__, "config_hash": config_hash(config), "seed": seed}


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows, prov: dict | None = None, extra: dict | None = None):
    path = Path(path)
    with path.open("w", newline="") as fh:
        for key, value in {**(prov or {}), **(extra or {})}.items():
            fh.write(f"# {key}={value if isinstance(value, str) else json.dumps(value, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Returns ``(meta, header, rows)``; meta holds the ``# key=value`` lines."""
    meta, lines = {}, []
    with Path(path).open(newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                try:
                    meta[key] = json.loads(value)
                except json.JSONDecodeError:
                    meta[key] = value
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return meta, rows[0], rows[1:]


def write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"
    Path(path).write_text(text)


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def trace_envelope(trace: FoldedTrace) -> dict:
    cfg = trace.config.to_dict()
    return {
        "provenance": provenance(cfg, trace.config.seed),
        "config": cfg,
        "truth": trace.truth.to_dict() if trace.truth is not None else None,
        "samples": [float(x) for x in trace.samples],
    }


def trace_to_json(trace: FoldedTrace, path):
    write_json(path, trace_envelope(trace))


def trace_from_json(path) -> FoldedTrace:
    d = read_json(path)
    truth = SoSParams.from_dict(d["truth"]) if d.get("truth") else None
    return FoldedTrace(np.array(d["samples"], dtype=float), SamplingConfig(**d["config"]), truth)


def trace_to_csv(trace: FoldedTrace, path):
    cfg = trace.config.to_dict()
    extra = {"config": cfg}
    if trace.truth is not None:
        extra["truth"] = trace.truth.to_dict()
    rows = [(n, y) for n, y in zip(range(1, trace.config.count + 1), trace.samples)]
    write_csv(path, ["n", "y_w"], rows, provenance(cfg, trace.config.seed), extra)


def trace_from_csv(path) -> FoldedTrace:
    meta, header, rows = read_csv(path)
    if header[:2] != ["n", "y_w"]:
        raise ValueError(f"{path}: expected columns n,y_w, got {header}")
    samples = np.array([float(r[1]) for r in rows])
    if "config" in meta:
        config = SamplingConfig(**meta["config"])
    else:
        # bare CSV: only the samples are known
        config = SamplingConfig(np.inf, 1.0, samples.size)
    truth = SoSParams.from_dict(meta["truth"]) if "truth" in meta else None
    return FoldedTrace(samples, config, truth)


def load_trace(path) -> FoldedTrace:
    path = Path(path)
    if path.suffix.lower() == ".json":
        return trace_from_json(path)
    return trace_from_csv(path)
