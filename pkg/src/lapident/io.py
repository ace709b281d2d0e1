"""CSV writing and key=value config files."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """17 significant digits for floats, plain text for everything else."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_bytes(csv_text(header, rows).encode("ascii"))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


def parse_config(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected key = value")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            problems.append(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    if problems:
        raise ConfigError(problems)
    return out


def parse_int_list(value: str) -> tuple[int, ...]:
    """``1,2,5`` or ranges like ``0..12`` (inclusive), mixable with commas."""
    items: list[int] = []
    for part in value.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            items.extend(range(int(lo), int(hi) + 1))
        elif part:
            items.append(int(part))
    return tuple(items)


def parse_float_list(value: str) -> tuple[float, ...]:
    return tuple(float(p) for p in value.split(",") if p.strip())
