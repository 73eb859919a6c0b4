"""CSV and JSON input/output, solve-spec parsing and run manifests.

Every number is written with 17 significant digits (``format(x, ".17g")``),
which round-trips any float64 exactly and makes outputs byte-reproducible.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError
from .expansion import LegendreSeries, parse_sampler, project
from .pde import (
    DEFAULT_DT,
    ForcingTerm,
    IBVPSpec,
    ManufacturedSolution,
    SolverConfig,
    Trajectory,
    manufactured_case,
)

__all__ = [
    "fmt",
    "write_csv",
    "read_series_csv",
    "write_series_csv",
    "write_trajectory_csv",
    "write_reconstruction_csv",
    "SolveJob",
    "load_solve_job",
    "file_digest",
    "RunManifest",
]

SERIES_HEADER = ("n", "coefficient")


def fmt(x) -> str:
    """Format a number with 17 significant digits; integers stay integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else fmt(v) for v in row])
    return path


def write_series_csv(path, series: LegendreSeries, extra: dict | None = None) -> Path:
    """Write ``n,coefficient`` rows; ``extra`` adds named columns of equal length."""
    extra = extra or {}
    header = SERIES_HEADER + tuple(extra)
    cols = [np.asarray(v, dtype=float) for v in extra.values()]
    rows = (
        [n, c] + [col[n] for col in cols] for n, c in enumerate(series.coefficients)
    )
    return write_csv(path, header, rows)


def read_series_csv(path) -> LegendreSeries:
    """Read a ``n,coefficient`` file; extra columns are ignored.

    Raises
    ------
    DataError
        On a missing file, a wrong header, gaps or unparsable values. The
        message gives the 1-based line number.
    """
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header[:2]) != SERIES_HEADER:
            raise DataError(f"{path}:1: expected header 'n,coefficient', got {header!r}")
        coeffs = []
        for row in reader:
            line = reader.line_num
            if not row or all(not v.strip() for v in row):
                continue
            if len(row) < 2:
                raise DataError(f"{path}:{line}: expected 2 fields, got {len(row)}")
            try:
                n = int(row[0])
                c = float(row[1])
            except ValueError:
                raise DataError(f"{path}:{line}: cannot parse {row[:2]!r}") from None
            if n != len(coeffs):
                raise DataError(f"{path}:{line}: expected index {len(coeffs)}, got {n}")
            if not math.isfinite(c):
                raise DataError(f"{path}:{line}: non-finite coefficient {row[1]!r}")
            coeffs.append(c)
    if not coeffs:
        raise DataError(f"{path}: no coefficients")
    return LegendreSeries(np.array(coeffs))


def write_trajectory_csv(path, traj: Trajectory) -> Path:
    """Long format ``t,n,a_n``: one row per (time, mode)."""
    N = traj.N

    def rows():
        for t, a in zip(traj.times, traj.coefficients):
            for n in range(N + 1):
                yield t, n, a[n]

    return write_csv(path, ("t", "n", "a_n"), rows())


def write_reconstruction_csv(path, times, xs, computed, exact=None) -> Path:
    """Rows ``t,x,T_computed,T_exact,abs_err``.

    ``computed`` and ``exact`` have one row per time. Without an exact
    solution the last two columns are left empty.
    """

    def rows():
        for i, t in enumerate(times):
            for k, x in enumerate(xs):
                tc = computed[i][k]
                if exact is None:
                    yield t, x, tc, None, None
                else:
                    te = exact[i][k]
                    yield t, x, tc, te, abs(tc - te)

    return write_csv(path, ("t", "x", "T_computed", "T_exact", "abs_err"), rows())


@dataclass
class SolveJob:
    """A parsed solve request: problem, solver settings and optional exact solution."""

    spec: IBVPSpec
    config: SolverConfig
    exact: object | None = None
    exact_name: str | None = None
    resolved: dict = field(default_factory=dict)


class FreeDiffusionSolution:
    """Exact solution of the unforced linear problem: ``a_n(t) = exp(-n(n+1)t) a_n(0)``."""

    def __init__(self, initial: LegendreSeries):
        self.initial = initial

    def coefficients(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        n = np.arange(self.initial.degree + 1)
        return np.exp(-np.multiply.outer(t, n * (n + 1))) * self.initial.coefficients

    def __call__(self, x, t):
        from .expansion import evaluate

        return evaluate(LegendreSeries(self.coefficients(t)), x)


def _series_field(value, N, what):
    if isinstance(value, str):
        sampler = parse_sampler(value)
        return project(sampler, N)
    if isinstance(value, list):
        try:
            return LegendreSeries(np.array(value, dtype=float))
        except (TypeError, ValueError):
            raise DataError(f"{what}: coefficients must be numbers") from None
    raise DataError(f"{what}: expected a coefficient list or a function name, got {value!r}")


def _number(doc, key, kind, default=None):
    if key not in doc:
        if default is None:
            raise DataError(f"missing field {key!r}")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DataError(f"field {key!r} must be a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise DataError(f"field {key!r} must be an integer, got {v!r}")
        return int(v)
    if not math.isfinite(v):
        raise DataError(f"field {key!r} must be finite, got {v!r}")
    return float(v)


def load_solve_job(path) -> SolveJob:
    """Parse a solve request.

    Fields: ``c``, ``N``, ``initial`` (coefficient list or function name such
    as ``"manufactured_g"``), ``forcing`` (list of ``{"rate", "spatial"}``
    with ``spatial`` a list or a function name), ``dt``, ``steps`` and
    ``N_prime``; optionally ``substeps``. Setting ``"case": "manufactured"``
    (or ``"manufactured_linear"``) builds the known-solution problem at order
    ``N`` and ignores ``c``, ``initial`` and ``forcing``.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DataError(f"{path}: top level must be an object")
    try:
        return _job_from_doc(doc)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _job_from_doc(doc) -> SolveJob:
    N = _number(doc, "N", int)
    if N < 0:
        raise DataError(f"N must be non-negative, got {N}")
    cfg = SolverConfig(
        dt=_number(doc, "dt", float, DEFAULT_DT),
        steps=_number(doc, "steps", int),
        N_prime=_number(doc, "N_prime", int),
        substeps=_number(doc, "substeps", int) if doc.get("substeps") is not None else None,
    )
    case = doc.get("case")
    exact = None
    exact_name = None
    if case is not None:
        if case not in ("manufactured", "manufactured_linear"):
            raise DataError(f"unknown case {case!r}; known: manufactured, manufactured_linear")
        spec, exact = manufactured_case(N, linear=case == "manufactured_linear")
        exact_name = "manufactured"
    else:
        c = _number(doc, "c", float)
        initial = _series_field(doc.get("initial"), N, "initial")
        raw_forcing = doc.get("forcing", [])
        if not isinstance(raw_forcing, list):
            raise DataError("forcing must be a list of {rate, spatial} objects")
        forcing = []
        for i, term in enumerate(raw_forcing):
            if not isinstance(term, dict) or "spatial" not in term:
                raise DataError(f"forcing[{i}] must be an object with 'rate' and 'spatial'")
            rate = _number(term, "rate", float)
            spatial = _series_field(term["spatial"], N, f"forcing[{i}].spatial")
            forcing.append(ForcingTerm(rate, spatial))
        spec = IBVPSpec(c=c, forcing=tuple(forcing), initial=initial, N=N)
        if c == 0.0 and not forcing:
            exact = FreeDiffusionSolution(spec.initial.truncate(N))
            exact_name = "free_diffusion"
    resolved = {
        "case": case,
        "c": spec.c,
        "N": spec.N,
        "initial": spec.initial.coefficients.tolist(),
        "forcing": [{"rate": f.rate, "spatial": f.spatial.coefficients.tolist()} for f in spec.forcing],
        "dt": cfg.dt,
        "steps": cfg.steps,
        "N_prime": cfg.N_prime,
        "exact": exact_name,
    }
    return SolveJob(spec, cfg, exact, exact_name, resolved)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Record of one CLI run: parameters, input digests and every file written."""

    command: str
    parameters: dict
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def add_input(self, path):
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path):
        self.outputs.append(Path(path))

    def write(self, path) -> Path:
        path = Path(path)
        entries = [
            {"path": os.path.relpath(p, path.parent), "sha256": file_digest(p)}
            for p in self.outputs
        ]
        entries.append({"path": path.name, "sha256": None})
        doc = {
            "command": self.command,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": entries,
            "wall_time_s": self.wall_time_s,
        }
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return path
