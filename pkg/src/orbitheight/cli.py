"""Batch front-end: JSON job files in, deterministic CSV/JSON reports out.

Commands:

    orbitheight run <job.json> [--out DIR] [--threads K] [--budget M]
    orbitheight catalog
    orbitheight validate <job.json>

A job either names a file or a bundled catalog fixture.  Reports are
written next to the input (or into --out) as <job>.report.csv and
<job>.report.json, built fully in memory first so failed runs leave no
partial files.  Exit codes: 0 success, 2 validation error (bad JSON,
schema, expressions), 3 runtime error (indeterminacy, budget, missing
terms).

Determinism: real-valued report fields are formatted with six decimals
(round half to even); exact quantities (counts, rationals) are never
rounded.  Identical jobs produce byte-identical reports at any --threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import commuting as commuting_mod
from . import dfinite as dfinite_mod
from . import dml as dml_mod
from . import orbit as orbit_mod
from . import schanuel as schanuel_mod
from .density import EventuallyPeriodicSet, NATURALS, density as set_density, shift_set
from .errors import OrbitHeightError, ValidationError
from .exact import format_rational, height_rational
from .poly import parse_expression, parse_map

KINDS = ("orbit", "gap", "dfinite", "density", "schanuel", "dml", "commuting")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _parse_start(job: dict, nvars: int) -> tuple[Fraction, ...]:
    start = job.get("start")
    _require(isinstance(start, list) and len(start) == nvars,
             f"'start' must be a list of {nvars} rationals")
    try:
        return tuple(Fraction(str(c)) for c in start)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad start coordinate: {exc}") from exc


def _parse_variables(job: dict) -> tuple[str, ...]:
    variables = job.get("variables")
    _require(isinstance(variables, list) and variables
             and all(isinstance(v, str) for v in variables),
             "'variables' must be a nonempty list of names")
    return tuple(variables)


def _int_param(job: dict, key: str, default=None, minimum=None):
    value = job.get(key, default)
    _require(value is not None, f"missing required field '{key}'")
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"'{key}' must be an integer")
    if minimum is not None:
        _require(value >= minimum, f"'{key}' must be >= {minimum}")
    return value


def _metrics_csv(rows: list[tuple[str, str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "value"])
    writer.writerows(rows)
    return buf.getvalue()


# --- per-kind builders: validate and close over everything, run later ---

def _build_orbit(job: dict, params):
    variables = _parse_variables(job)
    phi = parse_map(job.get("map", []), variables)
    _require(len(phi.components) == len(variables), "'map' must be a self-map")
    observable = parse_expression(str(job.get("observable", "")), variables)
    start = _parse_start(job, len(variables))
    n_max = _int_param(job, "N", minimum=0)

    def run():
        trace = orbit_mod.iterate_orbit(phi, observable, start, n_max)
        payload = {
            "kind": "orbit",
            "horizon": trace.horizon,
            "rows": len(trace.rows),
            "stop_reason": trace.stop_reason,
            "stop_index": trace.stop_index,
            "last_height": _fmt(trace.rows[-1].height) if trace.rows else None,
        }
        return orbit_mod.trace_to_csv(trace), payload

    return run


def _build_gap(job: dict, params):
    variables = _parse_variables(job)
    phi = parse_map(job.get("map", []), variables)
    _require(len(phi.components) == len(variables), "'map' must be a self-map")
    observable = parse_expression(str(job.get("observable", "")), variables)
    start = _parse_start(job, len(variables))
    n_max = _int_param(job, "N", minimum=2)
    n0 = _int_param(job, "N0", default=2, minimum=2)
    tail_fraction = job.get("tail_fraction", 0.5)
    _require(isinstance(tail_fraction, (int, float)) and 0 < tail_fraction <= 1,
             "'tail_fraction' must lie in (0, 1]")
    curve_constants = job.get("curve_constants", [])
    _require(isinstance(curve_constants, list)
             and all(isinstance(c, (int, float)) for c in curve_constants),
             "'curve_constants' must be a list of numbers")
    ell = job.get("ell")
    if ell is not None:
        ell = _int_param(job, "ell", minimum=0)

    def run():
        trace = orbit_mod.iterate_orbit(phi, observable, start, n_max)
        report = orbit_mod.gap_diagnostics(
            trace, n0=n0, tail_fraction=float(tail_fraction),
            curve_constants=[float(c) for c in curve_constants],
        )
        rows = [
            ("tail_start", str(report.tail_start)),
            ("tail_sup", _fmt(report.tail_sup)),
            ("tail_inf", _fmt(report.tail_inf)),
        ]
        payload = {
            "kind": "gap",
            "horizon": trace.horizon,
            "stop_reason": trace.stop_reason,
            "N0": report.N0,
            "tail_start": report.tail_start,
            "tail_sup": _fmt(report.tail_sup),
            "tail_inf": _fmt(report.tail_inf),
            "below_curve_density": [
                {"C": _fmt(c), "density": str(frac)}
                for c, frac in report.below_curve_density
            ],
        }
        for c, frac in report.below_curve_density:
            rows.append((f"below_curve_density[C={_fmt(c)}]", str(frac)))
        if ell is not None:
            repeat = orbit_mod.detect_window_repeat(trace, ell)
            if repeat is None:
                payload["window_repeat"] = None
                rows.append(("window_repeat", "none"))
            else:
                payload["window_repeat"] = {
                    "i": repeat.i,
                    "j": repeat.j,
                    "period": repeat.period,
                    "verified_to": repeat.verified_to,
                }
                rows.append(("window_repeat",
                             f"i={repeat.i};j={repeat.j};verified_to={repeat.verified_to}"))
        return _metrics_csv(rows), payload

    return run


def _build_dfinite(job: dict, params):
    rec = dfinite_mod.parse_recurrence_job(job)
    n_max = _int_param(job, "N", default=500, minimum=3)
    epsilon = job.get("epsilon", 0.5)
    _require(isinstance(epsilon, (int, float)) and epsilon > 0,
             "'epsilon' must be a positive number")
    n0 = _int_param(job, "N0", default=10, minimum=2)

    def run():
        terms = dfinite_mod.expand_terms(rec, n_max)
        verdict = dfinite_mod.classify_height_growth(terms, epsilon=float(epsilon), n0=n0)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "term", "height", "ratio"])
        for n, t in enumerate(terms):
            h = height_rational(t)
            ratio = "" if n <= 1 else _fmt(h / math.log(n))
            writer.writerow([n, format_rational(t), _fmt(h), ratio])
        payload = {
            "kind": "dfinite",
            "N": verdict.N,
            "N0": verdict.N0,
            "epsilon": _fmt(verdict.epsilon),
            "verdict": verdict.kind,
            "preperiod": verdict.preperiod,
            "period": verdict.period,
            "verified_to": verdict.verified_to,
            "tail_ratio": None if verdict.tail_ratio is None else _fmt(verdict.tail_ratio),
        }
        return buf.getvalue(), payload

    return run


def _parse_set(data, field: str) -> EventuallyPeriodicSet:
    _require(isinstance(data, dict), f"'{field}' must be a set object")
    try:
        return EventuallyPeriodicSet.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad '{field}' set: {exc}") from exc


def _build_density(job: dict, params):
    subset = _parse_set(job.get("set"), "set")

    def run():
        sigma = shift_set(subset)
        rows = [
            ("set", str(subset)),
            ("density", str(set_density(subset))),
            ("shift_set", str(sigma)),
            ("shift_set_density", str(set_density(sigma))),
        ]
        payload = {
            "kind": "density",
            "set": str(subset),
            "density": str(set_density(subset)),
            "shift_set": str(sigma),
            "shift_set_density": str(set_density(sigma)),
        }
        return _metrics_csv(rows), payload

    return run


def _build_schanuel(job: dict, params):
    n = _int_param(job, "n", minimum=1)
    bounds = job.get("B_list")
    _require(isinstance(bounds, list) and bounds
             and all(isinstance(b, int) and b >= 1 for b in bounds),
             "'B_list' must be a nonempty list of bounds >= 1")

    def run():
        fit = schanuel_mod.schanuel_fit(
            n, bounds, budget=params.budget, threads=params.threads
        )
        payload = {
            "kind": "schanuel",
            "n": n,
            "analytic_constant": _fmt(fit.constant),
            "reports": [
                {
                    "B": rep.B,
                    "count": rep.count,
                    "ratio": _fmt(rep.ratio),
                    "kappa_fit": None if rep.kappa_fit is None else _fmt(rep.kappa_fit),
                }
                for rep in fit.reports
            ],
        }
        return schanuel_mod.fit_to_csv(fit), payload

    return run


def _build_dml(job: dict, params):
    variables = _parse_variables(job)
    phi = parse_map(job.get("map", []), variables)
    _require(len(phi.components) == len(variables), "'map' must be a self-map")
    start = _parse_start(job, len(variables))
    equations = job.get("Y")
    _require(isinstance(equations, list) and equations,
             "'Y' must be a nonempty list of polynomial equations")
    polys = []
    for text in equations:
        rf = parse_expression(str(text), variables)
        _require(rf.den.is_constant(),
                 f"subvariety equation {text!r} must be polynomial")
        polys.append(rf.num.scale(Fraction(1) / rf.den.constant_value()))
    subvariety = dml_mod.Subvariety(tuple(polys))
    n_max = _int_param(job, "N", minimum=0)
    min_terms = _int_param(job, "min_terms", default=5, minimum=3)

    def run():
        hits = dml_mod.return_set(phi, start, subvariety, n_max)
        decomp = dml_mod.ap_decompose(hits, n_max, min_terms=min_terms)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "component"])
        membership = {}
        for prog in decomp.progressions:
            for t in prog.terms_up_to(decomp.horizon):
                membership[t] = f"progression(a={prog.a},d={prog.d})"
        for t in decomp.residual:
            membership[t] = "residual"
        for t in decomp.hits:
            writer.writerow([t, membership[t]])
        payload = json.loads(decomp.to_json())
        return buf.getvalue(), payload

    return run


def _build_commuting(job: dict, params):
    variables = _parse_variables(job)
    maps_field = job.get("maps")
    _require(isinstance(maps_field, list) and maps_field
             and all(isinstance(m, list) for m in maps_field),
             "'maps' must be a list of component lists")
    maps = [parse_map(m, variables) for m in maps_field]
    for phi in maps:
        _require(len(phi.components) == len(variables), "each map must be a self-map")
    observable = parse_expression(str(job.get("observable", "")), variables)
    start = _parse_start(job, len(variables))
    n_max = _int_param(job, "N", minimum=2)
    n0 = _int_param(job, "N0", default=2, minimum=2)
    norms = _parse_set(job.get("T", NATURALS.to_json()), "T")

    def run():
        mtrace = commuting_mod.grid_orbit(maps, observable, start, n_max)
        report = commuting_mod.norm_sliced_diagnostics(mtrace, norms, n0=n0)
        payload = {
            "kind": "commuting",
            "maps": len(maps),
            "norm_bound": n_max,
            "entries": len(mtrace.entries),
            "undefined": len(mtrace.undefined_at),
            "T": str(norms),
            "sup_ratio": _fmt(report.sup_ratio),
            "sup_at": report.sup_at,
            "slices": [
                {
                    "s": st.s,
                    "M_s": _fmt(st.max_height),
                    "ratio": _fmt(st.ratio),
                    "argmax": list(st.argmax),
                }
                for st in report.slices
            ],
        }
        return commuting_mod.grid_to_csv(mtrace), payload

    return run


_BUILDERS = {
    "orbit": _build_orbit,
    "gap": _build_gap,
    "dfinite": _build_dfinite,
    "density": _build_density,
    "schanuel": _build_schanuel,
    "dml": _build_dml,
    "commuting": _build_commuting,
}


class _Params:
    def __init__(self, threads: int, budget: int):
        self.threads = threads
        self.budget = budget


def _build(job: dict, params: _Params):
    """Build phase: anything that fails here is a validation error (exit 2),
    including expression-level problems like identically-zero denominators."""
    try:
        return _BUILDERS[job["kind"]](job, params)
    except ValidationError:
        raise
    except OrbitHeightError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_job_text(text: str, source: str) -> dict:
    try:
        job = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {source}: {exc}") from exc
    _require(isinstance(job, dict), "job file must contain a JSON object")
    kind = job.get("kind")
    _require(kind in KINDS, f"'kind' must be one of {', '.join(KINDS)}")
    return job


def _read_job_source(name: str) -> tuple[str, str, Path]:
    """Resolve a path or catalog name to (stem, job text, default out dir)."""
    path = Path(name)
    if path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read job file {path}: {exc}") from exc
        stem = path.name[: -len(".json")] if path.name.endswith(".json") else path.name
        return stem, text, path.parent
    if name in list_catalog():
        text = (
            resources.files("orbitheight")
            .joinpath("catalog", f"{name}.json")
            .read_text(encoding="utf-8")
        )
        return name, text, Path.cwd()
    raise ValidationError(f"no such job file or catalog entry: {name}")


def list_catalog() -> list[str]:
    """Names of the bundled example jobs."""
    base = resources.files("orbitheight").joinpath("catalog")
    return sorted(
        entry.name[: -len(".json")]
        for entry in base.iterdir()
        if entry.name.endswith(".json")
    )


def run_job(
    path: str | Path,
    out_dir: str | Path | None = None,
    threads: int = 1,
    budget: int = schanuel_mod.DEFAULT_BUDGET,
) -> tuple[Path, Path]:
    """Validate, run, and write the two report files for one job.

    Returns the (csv_path, json_path) written.  Raises ValidationError for
    bad input and other OrbitHeightError subclasses for runtime failures;
    nothing is written unless the run completed.
    """
    stem, text, default_dir = _read_job_source(str(path))
    job = _parse_job_text(text, str(path))
    runner = _build(job, _Params(threads=threads, budget=budget))
    csv_text, payload = runner()
    json_text = json.dumps(payload, indent=2) + "\n"

    target_dir = Path(out_dir) if out_dir is not None else default_dir
    target_dir.mkdir(parents=True, exist_ok=True)
    csv_path = target_dir / f"{stem}.report.csv"
    json_path = target_dir / f"{stem}.report.json"
    csv_path.write_text(csv_text, encoding="utf-8")
    json_path.write_text(json_text, encoding="utf-8")
    return csv_path, json_path


def validate_job(path: str | Path) -> None:
    """Schema/expression validation without running the job."""
    _, text, _ = _read_job_source(str(path))
    job = _parse_job_text(text, str(path))
    _build(job, _Params(threads=1, budget=schanuel_mod.DEFAULT_BUDGET))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="orbitheight",
        description="Height-growth experiments for rational-map orbits over Q",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a job file and write reports")
    p_run.add_argument("job", help="path to a job JSON file, or a catalog name")
    p_run.add_argument("--out", default=None, help="directory for report files")
    p_run.add_argument("--threads", type=int, default=1, help="worker cap")
    p_run.add_argument(
        "--budget", type=int, default=schanuel_mod.DEFAULT_BUDGET,
        help="enumeration budget for point counting",
    )

    sub.add_parser("catalog", help="list bundled example jobs")

    p_val = sub.add_parser("validate", help="validate a job file without running it")
    p_val.add_argument("job", help="path to a job JSON file, or a catalog name")

    args = parser.parse_args(argv)

    if args.command == "catalog":
        for name in list_catalog():
            print(name)
        return 0

    try:
        if args.command == "validate":
            validate_job(args.job)
            print(f"{args.job}: valid")
            return 0
        csv_path, json_path = run_job(
            args.job, out_dir=args.out, threads=args.threads, budget=args.budget
        )
        print(csv_path)
        print(json_path)
        return 0
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except OrbitHeightError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
