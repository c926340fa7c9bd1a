"""CSV emission, atomic writes and run manifests."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import InvalidParameter

HEADER = ("x", "n", "lhs", "stderr", "ci_lo", "ci_hi", "rhs", "ratio", "flag")
CHECK_HEADER = ("x", "check_id", "value", "verdict")


def num(v):
    return "%.17g" % v


def atomic_write(path, text):
    """Write text to path through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def table_csv(table):
    rows = [(num(r.x), str(r.n), num(r.lhs), num(r.stderr), num(r.ci_lo), num(r.ci_hi),
             num(r.rhs), num(r.ratio), r.flag) for r in table.rows]
    return _csv_text(HEADER, rows)


def emit_report(table, path, plot_data=False):
    """Write the ratio table as CSV; optionally a two-column ``x ratio`` .dat file."""
    if not len(table.rows):
        raise InvalidParameter("refusing to write an empty table")
    out = [atomic_write(path, table_csv(table))]
    if plot_data:
        lines = [f"{num(r.x)} {num(r.ratio)}" for r in table.rows]
        out.append(atomic_write(Path(path).with_suffix(".dat"), "\n".join(lines) + "\n"))
    return out


def emit_checks(rows, path):
    body = [(num(r.x), r.check_id, num(r.value), r.verdict) for r in rows]
    return atomic_write(path, _csv_text(CHECK_HEADER, body))


def emit_rows(header, rows, path):
    body = [tuple(num(v) if isinstance(v, float) else str(v) for v in r) for r in rows]
    return atomic_write(path, _csv_text(header, body))


def read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    config_digest: str
    seed: int
    pipeline: str
    artifacts: list = field(default_factory=list)   # [{"path", "sha256"}]
    wall_clock: float = 0.0
    version: str = ""
    errors: list = field(default_factory=list)

    def add(self, path, root):
        self.artifacts.append({"path": os.path.relpath(path, root), "sha256": sha256_file(path)})

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def write(self, path):
        return atomic_write(path, self.to_json())
