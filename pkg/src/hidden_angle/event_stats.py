"""Measurement-record ingestion and the end-to-end velocity-bound pipeline.

Events are (E, px, py, pz) tuples in natural units (c = 1); a unit scale
factor can be applied once at parse time.  Sample spreads use the unbiased
(n-1) variance, computed independently per component - the pipeline never
forms covariances.  How the energy/momentum spreads relate to the physical
state preparation versus detector resolution is up to the caller; this
module simply reports sample statistics of whatever records it is given.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConflictingCalibration,
    MalformedRow,
    MissingHeader,
    NonFiniteValue,
    OutOfDomain,
    TooFewEvents,
)
from .landau_peierls import VelocityEstimate, calibrate_A, normalization_A, velocity_bound
from .moments import VarianceVector
from .relations import norm

__all__ = [
    "EventRecord",
    "SampleMoments",
    "VelocityReport",
    "parse_events",
    "sample_moments",
    "virtual_velocity_pipeline",
]

CSV_HEADER = ("E", "px", "py", "pz")


@dataclass(frozen=True)
class EventRecord:
    """One measurement: energy and the three momentum components."""

    E: float
    px: float
    py: float
    pz: float

    def __post_init__(self):
        for name in ("E", "px", "py", "pz"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class SampleMoments:
    """Unbiased sample variances of the energy and momentum components."""

    n_events: int
    var_E: float
    P2: VarianceVector


def _iter_lines(source):
    # os.PathLike (e.g. pathlib.Path) opens a file; str/bytes are content
    if isinstance(source, os.PathLike):
        with open(source, "r", encoding="utf-8") as fh:
            yield from enumerate(fh, start=1)
        return
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        yield from enumerate(io.StringIO(source), start=1)
        return
    # file-like; tolerate binary handles
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        yield lineno, raw


def _parse_float(text: str, lineno: int, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(lineno, f"field {field}: cannot parse {text.strip()!r}") from None
    if not math.isfinite(value):
        raise NonFiniteValue(lineno, f"field {field} is {value!r}")
    return value


def parse_events(source, format: str = "csv", unit_scale: float = 1.0) -> list[EventRecord]:
    """Read EventRecords from a pathlib.Path, a str/bytes buffer, or a file object.

    Plain strings and bytes are treated as content, not filenames.  ``csv``
    expects the header ``E,px,py,pz``; ``jsonl`` expects one object per
    line carrying those four numeric keys (extra keys are ignored).  Blank
    lines and ``#`` comments are skipped in both formats.
    """
    if format not in ("csv", "jsonl"):
        raise ValueError(f"format must be 'csv' or 'jsonl', got {format!r}")
    if not (unit_scale > 0.0 and math.isfinite(unit_scale)):
        raise ValueError(f"unit_scale must be positive, got {unit_scale!r}")
    records: list[EventRecord] = []
    saw_header = format != "csv"
    for lineno, raw in _iter_lines(source):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if format == "csv":
            fields = [f.strip() for f in line.split(",")]
            if not saw_header:
                if tuple(fields) != CSV_HEADER:
                    raise MissingHeader(
                        f"expected header {','.join(CSV_HEADER)!r}, got {line!r}"
                    )
                saw_header = True
                continue
            if len(fields) != 4:
                raise MalformedRow(lineno, f"expected 4 fields, got {len(fields)}")
            e, px, py, pz = (
                _parse_float(f, lineno, name) for f, name in zip(fields, CSV_HEADER)
            )
        else:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRow(lineno, f"invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise MalformedRow(lineno, "expected a JSON object")
            vals = []
            for key in CSV_HEADER:
                if key not in obj:
                    raise MalformedRow(lineno, f"missing key {key!r}")
                v = obj[key]
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise MalformedRow(lineno, f"key {key!r} is not numeric")
                if not math.isfinite(v):
                    raise NonFiniteValue(lineno, f"key {key!r} is {v!r}")
                vals.append(float(v))
            e, px, py, pz = vals
        records.append(
            EventRecord(e * unit_scale, px * unit_scale, py * unit_scale, pz * unit_scale)
        )
    if format == "csv" and not saw_header:
        raise MissingHeader("input contains no header line")
    return records


def sample_moments(records: list[EventRecord]) -> SampleMoments:
    """Unbiased per-field sample variances of the records."""
    if len(records) < 2:
        raise TooFewEvents(f"need at least 2 records, got {len(records)}")
    data = np.array([(r.E, r.px, r.py, r.pz) for r in records], dtype=float)
    var = data.var(axis=0, ddof=1)
    return SampleMoments(
        n_events=len(records),
        var_E=float(var[0]),
        P2=VarianceVector.of(var[1], var[2], var[3]),
    )


@dataclass(frozen=True)
class VelocityReport:
    """Pipeline output: sample moments, resolved A, and the speed bound."""

    moments: SampleMoments
    estimate: VelocityEstimate
    calibration_mode: str

    def to_dict(self) -> dict:
        return {
            "n_events": self.moments.n_events,
            "var_E": self.moments.var_E,
            "P2": list(self.moments.P2),
            "P2_norm": norm(self.moments.P2),
            "calibration_mode": self.calibration_mode,
            "A": self.estimate.A,
            "u2_norm": self.estimate.u2_norm,
            "u_bound": self.estimate.u_bound,
            "cos_u": self.estimate.cos_u,
            "delta": self.estimate.delta,
            "variance_definition": "unbiased_n_minus_1",
            "u2_norm_meaning": "order_of_magnitude_estimate",
            "u_bound_meaning": "upper_bound",
        }


def virtual_velocity_pipeline(
    records: list[EventRecord],
    *,
    A: float | None = None,
    delta: float | None = None,
    cos_u: float | None = None,
    reference: list[EventRecord] | None = None,
    u_ref: float | None = None,
) -> VelocityReport:
    """Resolve A, form sample moments, and bound the group velocity.

    Exactly one calibration mode must be selected: ``A`` directly,
    ``(delta, cos_u)``, or a ``reference`` sample with known ``u_ref``
    (zero-virtuality anchoring, the preferred route when the angle is
    unobservable).
    """
    groups = [
        A is not None,
        delta is not None or cos_u is not None,
        reference is not None or u_ref is not None,
    ]
    if sum(groups) > 1:
        raise ConflictingCalibration(
            "choose one of: A, (delta, cos_u), or (reference, u_ref)"
        )
    if sum(groups) == 0:
        raise ValueError("a calibration mode is required")

    moments = sample_moments(records)
    p2_norm = norm(moments.P2)
    if p2_norm <= 0.0:
        raise OutOfDomain("momentum sample has zero spread; cannot bound velocity")

    if A is not None:
        mode = "direct_A"
        a_value = float(A)
        if a_value <= 0.0:
            raise OutOfDomain(f"A must be positive, got {A!r}")
        used_delta = used_cos = None
    elif delta is not None or cos_u is not None:
        if delta is None or cos_u is None:
            raise ValueError("delta and cos_u must be given together")
        mode = "delta_cos_u"
        a_value = normalization_A(delta, cos_u)
        used_delta, used_cos = float(delta), float(cos_u)
    else:
        if reference is None or u_ref is None:
            raise ValueError("reference sample and u_ref must be given together")
        mode = "reference_sample"
        ref = sample_moments(reference)
        a_value = calibrate_A(ref.var_E, norm(ref.P2), u_ref)
        used_delta = used_cos = None

    estimate = VelocityEstimate(
        A=a_value,
        u2_norm=a_value * moments.var_E / p2_norm,
        u_bound=velocity_bound(moments.var_E, p2_norm, a_value),
        cos_u=used_cos,
        delta=used_delta,
    )
    return VelocityReport(moments=moments, estimate=estimate, calibration_mode=mode)
