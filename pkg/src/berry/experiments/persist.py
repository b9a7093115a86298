"""Writing and reading per-replicate CSV records and JSON summaries."""
import csv
import io
import json
import os

import numpy as np

from ..errors import ParseError
from .config import content_hash
from .runners import ExperimentResult, Record

CSV_HEADER = ("replicate", "seed", "E", "domain_id", "stat", "value")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        # repr keeps every float bit-exact on reload
        w.writerow((int(r.replicate), int(r.seed), repr(float(r.E)), int(r.domain_id),
                    r.stat, repr(float(r.value))))
    return buf.getvalue()


def summary_document(result: ExperimentResult) -> dict:
    cfg = result.config.to_dict()
    return _jsonable({
        "config": cfg,
        "config_hash": content_hash(cfg),
        "summary": result.summary,
    })


def dumps(result: ExperimentResult, fmt="csv") -> str:
    if fmt == "csv":
        return records_to_csv(result.records)
    if fmt == "json":
        return json.dumps(summary_document(result), indent=1, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def persist(result: ExperimentResult, path, fmt=None):
    """Write ``result`` to ``path`` as CSV records or a JSON summary.

    The format defaults to the file extension (``.json`` gives JSON).
    Raises ``OSError`` when the path is not writable.
    """
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    text = dumps(result, fmt)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def parse_records(text: str):
    lines = text.splitlines()
    if not lines or tuple(lines[0].strip().split(",")) != CSV_HEADER:
        raise ParseError("expected header " + ",".join(CSV_HEADER), line=1)
    out = []
    for n, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", line=n)
        try:
            out.append(Record(int(row[0]), int(row[1]), float(row[2]), int(row[3]),
                              row[4], float(row[5])))
        except ValueError as exc:
            raise ParseError(str(exc), line=n) from None
    return out


def parse_summary(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict) or not {"config", "config_hash", "summary"} <= set(doc):
        raise ParseError("summary document needs config, config_hash and summary", line=1)
    return doc


def load(path):
    """Read a file written by :func:`persist`.

    CSV files give a list of :class:`Record`; JSON files give the summary
    document (``config``, ``config_hash``, ``summary``).
    """
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return parse_summary(text)
    return parse_records(text)
