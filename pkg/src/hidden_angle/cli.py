"""Command-line front end.

Subcommands: ``state-report`` (uncertainty report for a 3D state),
``sweep`` (level scans of the saturation cosine as CSV), ``velocity``
(event-sample velocity bound), ``verify`` (randomized invariant suite).

Output is machine-first: JSON by default, ``--format human`` for aligned
text, CSV reserved for sweep tables.  Failure diagnostics go to stderr
only.  Settings resolve as flags > HIDDEN_ANGLE_HBAR > config file >
defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .axis_states import (
    SeparableState3D,
    gaussian_packet,
    harmonic_oscillator,
    infinite_well,
    load_tabulated,
)
from .checks import run_all_checks
from .errors import ConflictingCalibration, HiddenAngleError
from .event_stats import parse_events, virtual_velocity_pipeline
from .moments import QuadratureConfig, Rule, variance_vectors
from .relations import HBarContext, box_cos_closed, cos_saturation, ho_cos_closed, hur_report

__all__ = ["RunConfig", "main", "load_schema"]

ENV_HBAR = "HIDDEN_ANGLE_HBAR"

_RULES = {
    "auto": None,
    "gauss-hermite": Rule.GAUSS_HERMITE,
    "gauss-legendre": Rule.GAUSS_LEGENDRE,
    "adaptive-simpson": Rule.ADAPTIVE_SIMPSON,
}

_DEFAULTS = {
    "hbar": 1.0,
    "delta": 0.5,
    "points": 256,
    "rel_tol": 1e-10,
    "rule": "auto",
    "seed": 0,
    "format": "json",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved run settings shared by all subcommands."""

    hbar: float = 1.0
    quadrature: QuadratureConfig = QuadratureConfig()
    delta: float = 0.5
    output_format: str = "json"
    seed: int = 0

    @property
    def context(self) -> HBarContext:
        return HBarContext(self.hbar)


def load_schema(name: str) -> dict:
    """Load a published JSON schema shipped with the package."""
    text = resources.files("hidden_angle").joinpath(f"schemas/{name}").read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------
# Config resolution
# ---------------------------------------------------------------------------

_CASTS = {
    "hbar": float,
    "delta": float,
    "rel_tol": float,
    "points": int,
    "seed": int,
    "rule": str,
    "format": str,
}


def _load_config_file(path: str) -> dict:
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CASTS:
            raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
        settings[key] = _CASTS[key](value.strip())
    return settings


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = dict(_DEFAULTS)
    if getattr(args, "config", None):
        settings.update(_load_config_file(args.config))
    if os.environ.get(ENV_HBAR):
        settings["hbar"] = float(os.environ[ENV_HBAR])
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    if settings["rule"] not in _RULES:
        raise ValueError(f"unknown quadrature rule {settings['rule']!r}")
    if settings["format"] not in ("json", "csv", "human"):
        raise ValueError(f"unknown output format {settings['format']!r}")
    if settings["hbar"] <= 0.0:
        raise ValueError("hbar must be positive")
    if settings["delta"] <= 0.0:
        raise ValueError("delta must be positive")
    return RunConfig(
        hbar=float(settings["hbar"]),
        quadrature=QuadratureConfig(
            rule=_RULES[settings["rule"]],
            points=int(settings["points"]),
            rel_tol=float(settings["rel_tol"]),
        ),
        delta=float(settings["delta"]),
        output_format=settings["format"],
        seed=int(settings["seed"]),
    )


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _emit_json(data: dict) -> None:
    print(json.dumps(data, indent=2))


def _emit_human(data: dict) -> None:
    width = max(len(k) for k in data)
    for key, value in data.items():
        if isinstance(value, list):
            value = "(" + ", ".join(str(v) for v in value) + ")"
        print(f"{key:<{width}}  {value}")


def _emit_report(data: dict, output_format: str) -> int | None:
    """Print a report dict; returns an exit code only on misuse."""
    if output_format == "json":
        _emit_json(data)
    elif output_format == "human":
        flat = dict(data)
        if "axes" in flat:
            flat["axes"] = [json.dumps(a) for a in flat["axes"]]
        _emit_human(flat)
    else:
        return _fail("CSV output is reserved for sweep tables", 1)
    return None


# ---------------------------------------------------------------------------
# state-report
# ---------------------------------------------------------------------------


def _triple(text: str, conv, flag: str) -> list:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3:
        raise ValueError(f"{flag} takes one value or three comma-separated values")
    return [conv(p) for p in parts]


def _build_axes(args: argparse.Namespace) -> SeparableState3D:
    family = args.family
    if family == "ho":
        ns = _triple(args.n or "0", int, "--n")
        ms = _triple(args.m or "1", float, "--m")
        ws = _triple(args.omega or "1", float, "--omega")
        axes = tuple(
            harmonic_oscillator(n, mass=m, omega=w) for n, m, w in zip(ns, ms, ws)
        )
    elif family == "well":
        ns = _triple(args.n or "1", int, "--n")
        ls = _triple(args.L or "1", float, "--L")
        axes = tuple(infinite_well(n, width_L=l) for n, l in zip(ns, ls))
    elif family == "gauss":
        sigmas = _triple(args.sigma or "1", float, "--sigma")
        axes = tuple(gaussian_packet(s) for s in sigmas)
    else:
        files = args.file or []
        if len(files) == 1:
            files = files * 3
        if len(files) != 3:
            raise ValueError("--family table needs --file once (shared) or three times")
        axes = tuple(load_tabulated(f) for f in files)
    return SeparableState3D(axes)


def cmd_state_report(args: argparse.Namespace, cfg: RunConfig) -> int:
    state = _build_axes(args)
    report = hur_report(state, cfg.quadrature, cfg.context)
    data = {"axes": [a.describe() for a in state.axes]}
    data.update(report.to_dict())
    code = _emit_report(data, cfg.output_format)
    if code is not None:
        return code
    return 0 if report.aggregated_holds else 2


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.family == "ho":
        if args.n_max < 0:
            return _fail("--n-max must be >= 0 for the oscillator", 1)
        levels = range(0, args.n_max + 1)
        closed = ho_cos_closed
        make = lambda n: SeparableState3D.isotropic(harmonic_oscillator(n))
    else:
        if args.n_max < 1:
            return _fail("--n-max must be >= 1 for the well", 1)
        levels = range(1, args.n_max + 1)
        closed = box_cos_closed
        make = lambda n: SeparableState3D.isotropic(infinite_well(n))

    print("n,cos_closed,cos_saturation_numeric,abs_diff")
    for n in levels:
        r2, p2 = variance_vectors(
            make(n),
            cfg.quadrature,
            cfg.hbar,
            prefer_closed_form=not args.compare_quadrature,
        )
        numeric = cos_saturation(p2, r2, cfg.context)
        expected = closed(n)
        print(f"{n},{expected!r},{numeric!r},{abs(numeric - expected)!r}")
    return 0


# ---------------------------------------------------------------------------
# velocity
# ---------------------------------------------------------------------------


def _read_events(path: str, forced_format: str | None):
    fmt = forced_format
    if fmt is None:
        fmt = "jsonl" if path.endswith((".jsonl", ".json", ".ndjson")) else "csv"
    return parse_events(Path(path), format=fmt)


def cmd_velocity(args: argparse.Namespace, cfg: RunConfig) -> int:
    groups = [
        args.A is not None,
        args.delta is not None or args.cos_u is not None,
        args.calibrate is not None or args.u_ref is not None,
    ]
    if sum(groups) > 1:
        return _fail("calibration modes are mutually exclusive "
                     "(--A | --delta/--cos-u | --calibrate/--u-ref)", 3)
    if sum(groups) == 0:
        return _fail("a calibration mode is required "
                     "(--A | --delta --cos-u | --calibrate --u-ref)", 1)
    if groups[1] and (args.delta is None or args.cos_u is None):
        return _fail("--delta and --cos-u must be given together", 1)
    if groups[2] and (args.calibrate is None or args.u_ref is None):
        return _fail("--calibrate and --u-ref must be given together", 1)

    records = _read_events(args.events, args.events_format)
    reference = (
        _read_events(args.calibrate, args.events_format) if args.calibrate else None
    )
    report = virtual_velocity_pipeline(
        records,
        A=args.A,
        delta=args.delta,
        cos_u=args.cos_u,
        reference=reference,
        u_ref=args.u_ref,
    )
    code = _emit_report(report.to_dict(), cfg.output_format)
    if code is not None:
        return code
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.cases < 1:
        return _fail(f"--cases must be >= 1, got {args.cases}", 1)
    results = run_all_checks(args.cases, cfg.seed, cfg.context)
    failed = [r for r in results if not r.passed]
    stream = sys.stderr if failed else sys.stdout
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name} ({r.cases} cases)", file=stream)
    if failed:
        print(f"first failing case: {failed[0].failure}", file=sys.stderr)
        return 2
    print(f"all {len(results)} property checks passed", file=stream)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=float, default=None,
                        help="value of hbar (default 1; env HIDDEN_ANGLE_HBAR)")
    common.add_argument("--config", default=None, metavar="FILE",
                        help="key=value settings file (lowest precedence)")
    common.add_argument("--format", choices=["json", "csv", "human"], default=None,
                        help="output format (default json; csv only for sweep)")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--points", type=int, default=None,
                        help="quadrature points (default 256)")
    common.add_argument("--rel-tol", type=float, default=None, dest="rel_tol",
                        help="adaptive quadrature relative tolerance")
    common.add_argument("--rule", choices=sorted(_RULES), default=None,
                        help="force a quadrature rule (default auto)")
    common.add_argument("--delta", type=float, default=None,
                        help="free constant of the energy-time relation")

    parser = argparse.ArgumentParser(
        prog="hidden-angle",
        description="Uncertainty-relation vectors, hidden-angle cosines, and "
                    "virtual-particle velocity bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state-report", parents=[common],
                             help="uncertainty report for a separable 3D state")
    p_state.add_argument("--family", required=True,
                         choices=["ho", "well", "gauss", "table"])
    p_state.add_argument("--n", default=None, help="quantum numbers NX,NY,NZ")
    p_state.add_argument("--m", default=None, help="mass (one value or three)")
    p_state.add_argument("--omega", default=None, help="frequency (one or three)")
    p_state.add_argument("--L", default=None, help="well width (one or three)")
    p_state.add_argument("--sigma", default=None, help="packet spread (one or three)")
    p_state.add_argument("--file", action="append", default=None,
                         help="tabulated wavefunction file (repeat for 3 axes)")

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="saturation-cosine level scan as CSV")
    p_sweep.add_argument("--family", required=True, choices=["ho", "well"])
    p_sweep.add_argument("--n-max", type=int, required=True, dest="n_max")
    p_sweep.add_argument("--compare-quadrature", action="store_true",
                         help="recompute variances by quadrature instead of closed forms")

    p_vel = sub.add_parser("velocity", parents=[common],
                           help="velocity bound from an event sample")
    p_vel.add_argument("--events", required=True, help="event file (csv or jsonl)")
    p_vel.add_argument("--events-format", choices=["csv", "jsonl"], default=None,
                       help="force the event file format (default: by extension)")
    p_vel.add_argument("--A", type=float, default=None, help="normalization A directly")
    p_vel.add_argument("--cos-u", type=float, default=None, dest="cos_u",
                       help="velocity-angle cosine (with --delta)")
    p_vel.add_argument("--calibrate", default=None, metavar="FILE",
                       help="reference event sample for zero-virtuality calibration")
    p_vel.add_argument("--u-ref", type=float, default=None, dest="u_ref",
                       help="known reference speed (with --calibrate)")

    p_verify = sub.add_parser("verify", parents=[common],
                              help="run the randomized invariant suite")
    p_verify.add_argument("--cases", type=int, default=1000)

    return parser


_COMMANDS = {
    "state-report": cmd_state_report,
    "sweep": cmd_sweep,
    "velocity": cmd_velocity,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](args, cfg)
    except ConflictingCalibration as exc:
        return _fail(str(exc), 3)
    except HiddenAngleError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", 1)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), 1)


def run() -> None:
    sys.exit(main())
