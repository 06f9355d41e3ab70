"""Plain-text file formats shared by the command line tools.

Tables are comma separated with fixed lowercase headers, configuration
files are flat ``key = value`` text, and each run directory carries a JSON
manifest.  Floating point cells are written with ``repr`` so identical
runs produce byte-identical files; the manifest is the only file that
embeds wall-clock timestamps, and it keeps them under a single key so
consumers can compare everything else verbatim.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .curves import ReliabilityBand
from .dists import ComponentParams
from .errors import DataError, UsageError
from .mcem import ComponentFit
from .sampler import PosteriorDraws
from .simlab import ScenarioResult
from .sysmodel import ComponentRecord, ComponentSample, SystemObservation, SystemSample

__all__ = [
    "SYSTEM_HEADER",
    "COMPONENT_HEADER",
    "DRAWS_HEADER",
    "BAND_HEADER",
    "TRACE_HEADER",
    "STUDY_HEADER",
    "read_header",
    "read_system_csv",
    "read_component_csv",
    "draws_filename",
    "write_draws_csv",
    "read_draws_csv",
    "write_band_csv",
    "write_trace_csv",
    "write_study_csv",
    "write_table",
    "read_config",
    "read_json",
    "write_json",
    "sha256_file",
]

SYSTEM_HEADER = ("time", "cause")
COMPONENT_HEADER = ("time", "event")
DRAWS_HEADER = ("component", "draw_index", "beta", "eta")
BAND_HEADER = ("t", "mean", "lower", "upper")
TRACE_HEADER = ("iteration", "component", "m_beta", "m_eta")
STUDY_HEADER = (
    "side",
    "family",
    "censor_pct",
    "true_mean",
    "n",
    "bias",
    "mse",
    "n_failed",
)


def _cell(x) -> str:
    # repr of a builtin float round-trips exactly; numpy scalars must be
    # downcast first or their repr leaks the type name
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a CSV table with a fixed header and repr-formatted floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(x) for x in row])


def read_header(path: str | Path) -> tuple[str, ...]:
    """Return the first-line column names, lowercased and stripped."""
    try:
        with open(path, newline="") as fh:
            first = next(csv.reader(fh), None)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from None
    if first is None:
        raise DataError(f"{path}: empty file")
    return tuple(c.strip().lower() for c in first)


def _rows(path: str | Path, header: Sequence[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line_number, fields) after checking the header line."""
    try:
        fh = open(path, newline="")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from None
    with fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got is None:
            raise DataError(f"{path}: empty file")
        if tuple(c.strip().lower() for c in got) != tuple(header):
            raise DataError(
                f"{path}: line 1: expected header {','.join(header)!r}, "
                f"got {','.join(got)!r}"
            )
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: line {ln}: expected {len(header)} fields, got {len(row)}"
                )
            yield ln, row


def _float_field(path, ln: int, name: str, cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(
            f"{path}: line {ln}: {name} is not a number: {cell.strip()!r}"
        ) from None


def _int_field(path, ln: int, name: str, cell: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise DataError(
            f"{path}: line {ln}: {name} is not an integer: {cell.strip()!r}"
        ) from None


def _time_field(path, ln: int, cell: str) -> float:
    t = _float_field(path, ln, "time", cell)
    if not (math.isfinite(t) and t > 0.0):
        raise DataError(
            f"{path}: line {ln}: time must be a positive finite number, "
            f"got {cell.strip()}"
        )
    return t


def read_system_csv(path: str | Path, kind: str, k: int) -> SystemSample:
    """Parse a masked system sample with header ``time,cause``.

    ``cause`` is the failing component, numbered 1..k.  Errors carry the
    1-based line number of the offending row.
    """
    observations = []
    for ln, row in _rows(path, SYSTEM_HEADER):
        t = _time_field(path, ln, row[0])
        cause = _int_field(path, ln, "cause", row[1])
        if not 1 <= cause <= k:
            raise DataError(f"{path}: line {ln}: cause {cause} outside 1..{k}")
        observations.append(SystemObservation(t, cause))
    if not observations:
        raise DataError(f"{path}: no observations")
    try:
        return SystemSample(kind, k, tuple(observations))
    except ValueError as e:
        raise DataError(f"{path}: {e}") from None


def read_component_csv(path: str | Path, side: str) -> ComponentSample:
    """Parse single-component records with header ``time,event``.

    ``event`` is 1 for an exact failure time and 0 for a censored record;
    the censoring direction comes from ``side``.
    """
    records = []
    for ln, row in _rows(path, COMPONENT_HEADER):
        t = _time_field(path, ln, row[0])
        event = _int_field(path, ln, "event", row[1])
        if event not in (0, 1):
            raise DataError(f"{path}: line {ln}: event must be 0 or 1, got {event}")
        records.append(ComponentRecord(t, event == 0))
    if not records:
        raise DataError(f"{path}: no records")
    try:
        return ComponentSample(side, tuple(records))
    except ValueError as e:
        raise DataError(f"{path}: {e}") from None


def draws_filename(j: int) -> str:
    """Canonical name of the posterior draws table for component ``j``."""
    return f"draws_component{j}.csv"


def write_draws_csv(path: str | Path, j: int, d: PosteriorDraws) -> None:
    write_table(
        path,
        DRAWS_HEADER,
        ((j, i + 1, p.beta, p.eta) for i, p in enumerate(d.draws)),
    )


def read_draws_csv(path: str | Path, j: int) -> tuple[ComponentParams, ...]:
    """Read back a draws table, checking it belongs to component ``j``."""
    out = []
    for ln, row in _rows(path, DRAWS_HEADER):
        comp = _int_field(path, ln, "component", row[0])
        if comp != j:
            raise DataError(
                f"{path}: line {ln}: component {comp} in a file for component {j}"
            )
        beta = _float_field(path, ln, "beta", row[2])
        eta = _float_field(path, ln, "eta", row[3])
        try:
            out.append(ComponentParams(beta, eta))
        except ValueError as e:
            raise DataError(f"{path}: line {ln}: {e}") from None
    if not out:
        raise DataError(f"{path}: no draws")
    return tuple(out)


def write_band_csv(path: str | Path, band: ReliabilityBand) -> None:
    write_table(
        path,
        BAND_HEADER,
        zip(band.grid.points, band.mean, band.lower, band.upper),
    )


def write_trace_csv(path: str | Path, fits: Sequence[ComponentFit]) -> None:
    rows = []
    for j, f in enumerate(fits, start=1):
        for step in f.em_trace:
            rows.append((step.iteration, j, step.m_beta, step.m_eta))
    write_table(path, TRACE_HEADER, rows)


def write_study_csv(path: str | Path, results: Sequence[ScenarioResult]) -> None:
    write_table(
        path,
        STUDY_HEADER,
        (
            (
                r.spec.side,
                r.spec.generator.family,
                r.spec.censor_fraction * 100.0,
                r.spec.true_mean,
                r.spec.n,
                r.bias,
                r.mse,
                r.n_failed,
            )
            for r in results
        ),
    )


def read_config(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment line."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}: line {ln}: expected key=value, got {line!r}")
        key = key.strip()
        if not key:
            raise UsageError(f"{path}: line {ln}: empty key")
        if key in out:
            raise UsageError(f"{path}: line {ln}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def read_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON: {e}") from None


def write_json(path: str | Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                h.update(chunk)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from None
    return h.hexdigest()
