"""Plain-text formats: state files, CSV tables and JSON documents.

All floats are written with 17 significant digits so output is
byte-reproducible and round-trips exactly.
"""

import json
import math
import os
import sys
import tempfile

import numpy as np

from .spinalg import SpinState

NORM_TOL = 1e-8


class StateFileError(ValueError):
    pass


def fmt(x):
    """Format a number with 17 significant digits; ints stay ints."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}"
                 for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in v):
            return "[" + ", ".join(_json_value(x, indent, level + 1) for x in v) + "]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def json_text(obj, indent=2):
    """Deterministic JSON with 17-digit floats; non-finite floats become null."""
    return _json_value(obj, indent, 0) + "\n"


def table_json(header, rows):
    return json_text({"columns": list(header), "rows": [list(r) for r in rows]})


def format_state(psi):
    lines = [f"two_j = {psi.two_j}"]
    lines += [f"{fmt(a.real)} {fmt(a.imag)}" for a in psi.amplitudes]
    return "\n".join(lines) + "\n"


def parse_state(text, renormalize=False, source="<string>"):
    """Parse the state-file format: ``two_j = <int>`` followed by 2j+1 lines
    ``<re> <im>`` in ascending-m order."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise StateFileError(f"{source}: empty state file")
    key, sep, value = lines[0].partition("=")
    if not sep or key.strip() != "two_j":
        raise StateFileError(f"{source}: first line must read 'two_j = <int>'")
    try:
        two_j = int(value.strip())
    except ValueError:
        raise StateFileError(f"{source}: two_j must be an integer, got {value.strip()!r}")
    if two_j < 0:
        raise StateFileError(f"{source}: two_j must be non-negative")
    body = lines[1:]
    if len(body) != two_j + 1:
        raise StateFileError(
            f"{source}: expected {two_j + 1} amplitude lines, found {len(body)}")
    amps = np.empty(two_j + 1, dtype=complex)
    for k, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise StateFileError(f"{source}: amplitude line {k + 1} needs '<re> <im>'")
        try:
            re, im = float(parts[0]), float(parts[1])
        except ValueError:
            raise StateFileError(f"{source}: amplitude line {k + 1} is not numeric")
        if not (math.isfinite(re) and math.isfinite(im)):
            raise StateFileError(f"{source}: amplitude line {k + 1} is not finite")
        amps[k] = complex(re, im)
    norm = float(np.linalg.norm(amps))
    if renormalize:
        if norm == 0.0:
            raise StateFileError(f"{source}: cannot renormalize the zero vector")
        amps /= norm
    elif abs(norm - 1.0) > NORM_TOL:
        raise StateFileError(
            f"{source}: state norm {norm:.12g} deviates from 1 by more than "
            f"{NORM_TOL:g} (use --renormalize)")
    return SpinState(two_j, amps)


def read_state_file(path, renormalize=False):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFileError(f"{path}: cannot read state file ({exc.strerror})") from exc
    return parse_state(text, renormalize=renormalize, source=str(path))


def write_text(path, text):
    """Write ``text`` to ``path`` atomically (``-`` or None means stdout)."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
