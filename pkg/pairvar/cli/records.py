"""Emission and parsing of result records

Records are flat dictionaries. Tabular results are written as CSV,
fit results as line-delimited JSON (one object per line).
"""
import io
import json
import math
import pathlib
import sys

import numpy as np
import pandas as pd

from .manifest import manifest_path

#: Available output formats
available_formats = ["csv", "jsonl"]


def plain(value):
    """Convert numpy scalars and arrays to built-in Python types"""
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    elif isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    elif isinstance(value, np.bool_):
        return bool(value)
    elif isinstance(value, np.integer):
        return int(value)
    elif isinstance(value, np.floating):
        return float(value)
    return value


def _scalar(text):
    """Parse a CSV cell that is not JSON-encoded"""
    if text == "":
        return None
    elif text in ["True", "False"]:
        return text == "True"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _cell(value):
    value = plain(value)
    if value is None:
        return ""
    elif isinstance(value, list):
        return json.dumps(value)
    elif isinstance(value, float):
        return repr(value)
    elif isinstance(value, str):
        # strings that would be read back as another type are quoted
        if value[:1] in ["", "[", '"'] or _scalar(value) != value:
            return json.dumps(value)
        return value
    return str(value)


def _parse_cell(text):
    if text[:1] in ["[", '"']:
        return json.loads(text)
    return _scalar(text)


def emit_records(records, fmt="csv"):
    """Convert records to text

    Parameters
    ----------
    records: list of dict
        Result records (all with the same keys for "csv")
    fmt: str
        "csv" or "jsonl"

    Returns
    -------
    text: str
    """
    if fmt == "csv":
        columns = list(records[0].keys()) if records else []
        df = pd.DataFrame([[_cell(rec[cc]) for cc in columns]
                           for rec in records], columns=columns)
        return df.to_csv(index=False, lineterminator="\n")
    elif fmt == "jsonl":
        lines = [json.dumps({kk: plain(vv) for kk, vv in rec.items()})
                 for rec in records]
        return "".join(line + "\n" for line in lines)
    else:
        raise ValueError("Unknown format '{}'!".format(fmt))


def parse_records(text, fmt="csv"):
    """Inverse of :func:`emit_records`"""
    if fmt == "csv":
        if not text.strip():
            return []
        df = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
        return [{cc: _parse_cell(row[cc]) for cc in df.columns}
                for _, row in df.iterrows()]
    elif fmt == "jsonl":
        return [json.loads(line) for line in text.splitlines() if line]
    else:
        raise ValueError("Unknown format '{}'!".format(fmt))


def records_equal(a, b):
    """Compare records value by value and type by type

    NaN values are treated as equal.
    """
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        if list(ra.keys()) != list(rb.keys()):
            return False
        for key in ra:
            va, vb = ra[key], rb[key]
            if (isinstance(va, float) and isinstance(vb, float)
                    and math.isnan(va) and math.isnan(vb)):
                continue
            if type(va) is not type(vb) or va != vb:
                return False
    return True


def write_output(text, out=None, manifest=None):
    """Write output text to a file (with manifest) or to stdout"""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out = pathlib.Path(out)
        out.write_text(text, encoding="utf-8")
        if manifest is not None:
            manifest.write(manifest_path(out))
