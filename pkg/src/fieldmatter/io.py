"""CSV/JSON emission, covariance documents and run manifests.

Data files contain no timestamps or host details, so identical inputs give
byte-identical files; timing goes to the manifest only.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import platform
import sys

import numpy as np

from .errors import InvalidStateError


def format_value(value):
    """Number formatting for CSV: 17 significant digits, scientific notation."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.16e" % value
    return str(value)


def records_to_csv(records, columns):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = rec.row() if hasattr(rec, "row") else rec
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def read_csv(text):
    """Parse emitted CSV back to a list of dicts of floats."""
    reader = csv.DictReader(_io.StringIO(text))
    return [{k: float(v) for k, v in row.items()} for row in reader]


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no infinity; pure-mode exponents and the like become null
        return value if math.isfinite(value) else None
    if hasattr(value, "row"):
        return _jsonable(value.row())
    if hasattr(value, "as_dict"):
        return _jsonable(value.as_dict())
    return value


def dumps(document):
    """Deterministic JSON (sorted keys, non-finite numbers as null)."""
    return json.dumps(_jsonable(document), sort_keys=True, indent=2, allow_nan=False) + "\n"


def records_document(records, fit=None, **extra):
    doc = {"records": [r.row() if hasattr(r, "row") else r for r in records],
           "fit": fit.as_dict() if fit is not None else None}
    doc.update(extra)
    return doc


def covariance_to_json(gamma):
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise InvalidStateError("expected a 2n x 2n matrix")
    return {"n": gamma.shape[0] // 2, "ordering": "interleaved",
            "data": [float(x) for x in gamma.ravel()]}


def covariance_from_json(doc):
    try:
        n = int(doc["n"])
        ordering = doc.get("ordering", "interleaved")
        data = np.asarray(doc["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError(f"malformed covariance document: {exc}") from None
    if ordering != "interleaved":
        raise InvalidStateError(f"unsupported ordering {ordering!r}")
    if data.size != 4 * n * n:
        raise InvalidStateError(f"expected {4 * n * n} entries, got {data.size}")
    return data.reshape(2 * n, 2 * n)


def versions():
    import scipy

    from . import __version__

    return {"fieldmatter": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__,
            "platform": sys.platform}


def write_text(path, text):
    """Write ``text`` to ``path`` (``-`` means standard output)."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def manifest_path(out):
    return f"{out}.manifest.json"


def write_manifest(out, config, wall_time, fit=None, extra=None):
    doc = {"config": config, "versions": versions(), "wall_time_s": wall_time,
           "fit": fit.as_dict() if fit is not None else None}
    if extra:
        doc.update(extra)
    target = manifest_path(out if out not in (None, "-") else "stdout")
    write_text(target, dumps(doc))
    return target
