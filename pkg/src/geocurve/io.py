"""Feature CSV and curve JSON formats.

Feature files::

    label,f0,f1,...,f{d-1}
    cat,0.12,-1.5,...

Augmented files carry pre-shape coordinates ``p0..p{2d-1}`` and a trailing
``augmented`` column (1 for pseudo-labelled rows). Curve files are JSON
documents with schema ``geocurve.curves/1``; floats are written with
``repr`` so they round-trip exactly.
"""
import csv
import io as _io
import json
import math

import numpy as np

from .dataset import LabeledFeatureSet
from .errors import GeocurveError, InputError
from .fitting import FittedCurve
from .geodesic import make_curve
from .losses import LossReport

CURVES_SCHEMA = "geocurve.curves/1"


def _fmt(x):
    return repr(float(x))


def _parse_rows(text, source):
    reader = csv.reader(_io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError(f"{source}: empty file", line=1) from None
    if not header or header[0].strip() != "label":
        raise InputError(f"{source}: header must start with 'label'", line=1)
    width = len(header)
    labels, rows = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != width:
            raise InputError(f"{source}: expected {width} fields, got {len(row)}", line=lineno)
        try:
            vals = [float(x) for x in row[1:]]
        except ValueError as exc:
            raise InputError(f"{source}: {exc}", line=lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{source}: non-finite value", line=lineno)
        labels.append(row[0])
        rows.append(vals)
    return header, labels, rows


def read_features(path_or_text, source=None, text=False):
    """Read a raw feature CSV into a LabeledFeatureSet (labels as strings)."""
    content = path_or_text if text else _read(path_or_text)
    source = source or ("<text>" if text else str(path_or_text))
    header, labels, rows = _parse_rows(content, source)
    d = len(header) - 1
    if d < 2:
        raise InputError(f"{source}: need at least 2 feature columns, got {d}", line=1)
    if not rows:
        raise InputError(f"{source}: no data rows")
    return LabeledFeatureSet(np.array(rows), np.array(labels, dtype=object))


def read_augmented(path_or_text, source=None, text=False):
    """Read an augmented pre-shape CSV; returns a LabeledFeatureSet of kind preshape."""
    content = path_or_text if text else _read(path_or_text)
    source = source or ("<text>" if text else str(path_or_text))
    header, labels, rows = _parse_rows(content, source)
    if header[-1].strip() != "augmented":
        raise InputError(f"{source}: last column must be 'augmented'", line=1)
    width = len(header) - 2
    vectors = np.array([r[:-1] for r in rows]).reshape(len(rows), width)
    flags = np.array([r[-1] for r in rows], dtype=float) == 1.0
    return LabeledFeatureSet(vectors, np.array(labels, dtype=object), flags, kind="preshape")


def _read(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def format_features(dataset, prefix="f", augmented_column=False):
    """Serialize rows as CSV text with LF line endings."""
    cols = [f"{prefix}{i}" for i in range(dataset.dim)]
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["label"] + cols + (["augmented"] if augmented_column else []))
    for lab, vec, aug in zip(dataset.labels.tolist(), dataset.vectors, dataset.augmented):
        row = [str(lab)] + [_fmt(x) for x in vec]
        if augmented_column:
            row.append("1" if aug else "0")
        w.writerow(row)
    return out.getvalue()


def curves_to_json(curves, config=None, counts=None):
    """Serialize a label -> FittedCurve map, classes in sorted label order."""
    records = []
    for lab in sorted(curves, key=str):
        fc = curves[lab]
        rec = {
            "label": str(lab),
            "d": fc.curve.dim // 2,
            "m": None if counts is None else int(counts[lab]),
            "tau_start": [float(x) for x in fc.curve.tau_start],
            "tau_end": [float(x) for x in fc.curve.tau_end],
            "theta": float(fc.curve.theta),
            "final_loss": fc.final_loss.as_dict(),
            "epochs": fc.epochs_run,
            "degenerate_events": fc.degenerate_events,
            "loss_trace": [float(x) for x in fc.loss_trace],
        }
        records.append(rec)
    doc = {"schema": CURVES_SCHEMA, "config": config or {}, "classes": records}
    return json.dumps(doc, indent=1) + "\n"


def curves_from_json(text, source="<curves>"):
    """Parse a curves document back into ``({label: FittedCurve}, {label: m})``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON ({exc.msg})", line=exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("schema") != CURVES_SCHEMA:
        raise InputError(f"{source}: expected schema {CURVES_SCHEMA!r}")
    curves, counts = {}, {}
    try:
        for rec in doc["classes"]:
            lab = str(rec["label"])
            a = np.array(rec["tau_start"], dtype=np.float64)
            b = np.array(rec["tau_end"], dtype=np.float64)
            if a.size != 2 * int(rec["d"]):
                raise InputError(f"{source}: class {lab!r} endpoint length {a.size} != 2*d")
            curve = make_curve(a, b)
            fl = rec.get("final_loss") or {}
            report = LossReport(fl.get("sim", math.nan), fl.get("diverg", math.nan),
                                fl.get("total", math.nan), fl.get("beta", math.nan))
            curves[lab] = FittedCurve(
                curve=curve, class_label=lab, final_loss=report,
                loss_trace=tuple(rec.get("loss_trace", ())),
                degenerate_events=int(rec.get("degenerate_events", 0)),
            )
            counts[lab] = rec.get("m")
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, GeocurveError) as exc:
        raise InputError(f"{source}: malformed curve record ({exc})") from None
    return curves, counts


def read_curves(path):
    return curves_from_json(_read(path), source=str(path))
