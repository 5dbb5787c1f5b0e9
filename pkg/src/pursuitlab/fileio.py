"""File formats: delimited matrices/vectors and JSON result payloads.

Matrix files carry a ``# dense m N`` header line followed by m rows of N
comma-separated decimals; vector files carry ``# vector dim`` followed by
one value per line.  Headers are matched exactly and floats are written
with shortest round-trip precision, so fixtures are diffable and re-writing
a parsed file reproduces it byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import as_matrix, as_vector
from .recovery import RecoveryResult
from .ric import RicEstimate

SCHEMA_VERSION = 1


class FileFormatError(ValueError):
    """Malformed input file; the message names the offending line/field."""


def _fmt(v: float) -> str:
    return repr(float(v))


def _parse_value(token: str, path: str, line_no: int, field_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FileFormatError(
            f"{path}: line {line_no}, field {field_no}: {token.strip()!r} is not a number"
        ) from None
    if not np.isfinite(value):
        raise FileFormatError(
            f"{path}: line {line_no}, field {field_no}: value must be finite"
        )
    return value


def write_matrix(path: str | Path, phi: np.ndarray) -> None:
    phi = as_matrix(phi)
    m, n = phi.shape
    lines = [f"# dense {m} {n}"]
    lines += [",".join(_fmt(v) for v in row) for row in phi]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path: str | Path) -> np.ndarray:
    path = str(path)
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: line 1: empty file, expected '# dense m N' header")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "#" or head[1] != "dense":
        raise FileFormatError(f"{path}: line 1: expected '# dense m N' header, got {lines[0]!r}")
    try:
        m, n = int(head[2]), int(head[3])
    except ValueError:
        raise FileFormatError(f"{path}: line 1: non-integer dimensions in {lines[0]!r}") from None
    if m < 1 or n < 1:
        raise FileFormatError(f"{path}: line 1: dimensions must be positive, got {m} x {n}")
    if lines[0] != f"# dense {m} {n}":
        raise FileFormatError(f"{path}: line 1: header must be exactly '# dense {m} {n}'")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise FileFormatError(f"{path}: expected {m} data rows, got {len(body)}")
    rows = []
    for i, ln in enumerate(body, start=2):
        tokens = ln.split(",")
        if len(tokens) != n:
            raise FileFormatError(f"{path}: line {i}: expected {n} values, got {len(tokens)}")
        rows.append([_parse_value(tok, path, i, j + 1) for j, tok in enumerate(tokens)])
    return np.asarray(rows)


def write_vector(path: str | Path, v: np.ndarray) -> None:
    v = as_vector(v)
    lines = [f"# vector {v.shape[0]}"] + [_fmt(x) for x in v]
    Path(path).write_text("\n".join(lines) + "\n")


def read_vector(path: str | Path) -> np.ndarray:
    path = str(path)
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: line 1: empty file, expected '# vector dim' header")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "#" or head[1] != "vector":
        raise FileFormatError(f"{path}: line 1: expected '# vector dim' header, got {lines[0]!r}")
    try:
        dim = int(head[2])
    except ValueError:
        raise FileFormatError(f"{path}: line 1: non-integer dimension in {lines[0]!r}") from None
    if dim < 1:
        raise FileFormatError(f"{path}: line 1: dimension must be positive, got {dim}")
    if lines[0] != f"# vector {dim}":
        raise FileFormatError(f"{path}: line 1: header must be exactly '# vector {dim}'")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != dim:
        raise FileFormatError(f"{path}: expected {dim} values, got {len(body)}")
    return np.asarray(
        [_parse_value(ln, path, i, 1) for i, ln in enumerate(body, start=2)]
    )


def dump_json(payload: dict) -> str:
    """Canonical JSON text: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def recovery_payload(result: RecoveryResult, trace: str = "norms") -> dict:
    """JSON-ready dict for a recovery run at the requested trace level."""
    iterations = []
    if trace != "none":
        for rec in result.iterations:
            row: dict = {
                "n": rec.n,
                "delta_support": list(rec.delta_support.indices),
                "merged_support": list(rec.merged_support.indices),
                "pruned_support": list(rec.pruned_support.indices),
                "residual_norm": rec.residual_norm,
            }
            if rec.signal_error is not None:
                row["signal_error"] = rec.signal_error
                row["tail_energy"] = rec.tail_energy
            if trace == "full" and rec.estimate is not None:
                row["intermediate"] = rec.intermediate.tolist()
                row["estimate"] = rec.estimate.tolist()
            iterations.append(row)
    return {
        "schema_version": SCHEMA_VERSION,
        "algorithm": result.algorithm,
        "converged": result.converged,
        "estimate": result.estimate.tolist(),
        "support": list(result.support.indices),
        "iterations": iterations,
        "residual_history": result.residual_history,
    }


def ric_payload(estimate: RicEstimate) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "s": estimate.s,
        "value": estimate.value,
        "mode": estimate.mode,
        "witness": list(estimate.witness.indices),
        "supports_examined": estimate.supports_examined,
        "rip_holds": estimate.rip_holds,
    }
