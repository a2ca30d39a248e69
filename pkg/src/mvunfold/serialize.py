"""CSV and config-file serialization.

Fixed schemas, 17 significant digits for floats (lossless float64 round
trips), no timestamps: identical inputs produce byte-identical files.
Wall-clock timings therefore live only in the JSON summaries, never in
the CSVs.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = [
    "fmt",
    "save_points_csv",
    "load_points_csv",
    "save_edges_csv",
    "load_edges_csv",
    "save_trace_csv",
    "save_table_csv",
    "load_table_csv",
    "parse_config_text",
    "load_config",
    "dump_config",
    "config_hash",
    "ConfigError",
]


class ConfigError(ValueError):
    """Malformed experiment config file."""


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def save_points_csv(path, X: np.ndarray):
    """Point matrix CSV with header x0,...,x{p-1}."""
    X = np.atleast_2d(np.asarray(X, float))
    p = X.shape[1]
    lines = [",".join(f"x{c}" for c in range(p))]
    for row in X:
        lines.append(",".join(format(v, ".17g") for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_points_csv(path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    return np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def save_edges_csv(path, edges: np.ndarray, lengths: np.ndarray):
    lines = ["i,j,length"]
    for (i, j), l in zip(edges, lengths):
        lines.append(f"{int(i)},{int(j)},{format(float(l), '.17g')}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_edges_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    ii, jj, ll = [], [], []
    for ln in lines[1:]:
        a, b, c = ln.split(",")
        ii.append(int(a))
        jj.append(int(b))
        ll.append(float(c))
    return np.column_stack([ii, jj]).astype(np.int64), np.asarray(ll)


def save_trace_csv(path, trace):
    lines = ["iter,energy,max_violation,penalty,steps"]
    for k, e, v, mu, s in trace.rows():
        lines.append(f"{k},{fmt(e)},{fmt(v)},{fmt(mu)},{int(s)}")
    Path(path).write_text("\n".join(lines) + "\n")


def save_table_csv(path, columns, rows):
    """Write dict rows under a fixed column order."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(row[c]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n")


def load_table_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        vals = ln.split(",")
        row = {}
        for c, v in zip(columns, vals):
            try:
                row[c] = int(v) if "." not in v and "e" not in v and "inf" not in v and "nan" not in v else float(v)
            except ValueError:
                row[c] = v
        rows.append(row)
    return columns, rows


def _coerce(value: str):
    value = value.strip()
    if value == "":
        return None
    if "," in value:
        return [_coerce(v) for v in value.split(",")]
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    return value


def parse_config_text(text: str) -> dict:
    """Parse the flat key=value config format (version 1).

    Dotted keys nest; '#' starts a comment; blank lines are ignored.
    """
    cfg: dict = {}
    version = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key == "version":
            version = _coerce(value)
            continue
        parts = key.split(".")
        node = cfg
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"line {lineno}: key {key!r} conflicts with a scalar")
        node[parts[-1]] = _coerce(value)
    if version != 1:
        raise ConfigError("config must declare version=1")
    return cfg


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


def _flatten(prefix, node, out):
    if isinstance(node, dict):
        for k in sorted(node):
            _flatten(prefix + k + ".", node[k], out)
        return
    key = prefix[:-1]
    if isinstance(node, list):
        out.append((key, ",".join(fmt(v) for v in node)))
    elif node is None:
        out.append((key, ""))
    else:
        out.append((key, fmt(node)))


def dump_config(cfg: dict) -> str:
    out: list[tuple[str, str]] = []
    _flatten("", cfg, out)
    lines = ["version=1"] + [f"{k}={v}" for k, v in out]
    return "\n".join(lines) + "\n"


# fields that do not affect results, only where/how they are produced
_NON_SEMANTIC = {"out_dir", "workers"}


def config_hash(cfg: dict) -> str:
    """Hash of the semantically meaningful config content."""
    pruned = {k: v for k, v in cfg.items() if k not in _NON_SEMANTIC}
    canon = json.dumps(pruned, sort_keys=True, separators=(",", ":"), default=fmt)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
