"""Deterministic on-disk formats for parameters, line sets and spectra.

All frequencies on disk are offsets from the drive in units of gamma.
Numbers are written with 12 significant digits, so write-read-write is
byte stable and every file stays diff-able.  Spectrum files are plain
two-column text ('#' comments, comma emitted, comma or whitespace accepted),
compatible with gnuplot and CSV readers; line sets and parameters are JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .analytic import LineSpectrum, SampledSpectrum, SpectralLine
from .core import SystemParams

__all__ = [
    "ParseError",
    "GridSpec",
    "ParamsFile",
    "write_spectrum",
    "read_spectrum",
    "write_lines",
    "read_lines",
    "write_params",
    "read_params",
]

_PARAM_KEYS = ("n_emitters", "rabi", "dd_coupling", "detuning")


class ParseError(ValueError):
    """A file failed to parse; the message names the offending line/key."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation grid: [lo, hi] with a point count >= 2."""

    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"need finite lo < hi, got [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise ValueError(f"points must be >= 2, got {self.points}")

    def array(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ParamsFile:
    """Contents of a parameters file: physical inputs plus optional grid."""

    params: SystemParams
    grid: GridSpec | None = None


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


def _round12(v: float) -> float:
    return float(_fmt(v))


def _params_dict(params: SystemParams) -> dict[str, Any]:
    return {
        "n_emitters": params.n_emitters,
        "rabi": _round12(params.rabi),
        "dd_coupling": _round12(params.dd_coupling),
        "detuning": _round12(params.detuning),
    }


def _provenance_lines(provenance: Mapping[str, Any] | None) -> list[str]:
    if not provenance:
        return []
    return [f"# {key}: {value}" for key, value in provenance.items()]


def write_spectrum(spectrum: SampledSpectrum, destination: str | Path,
                   provenance: Mapping[str, Any] | None = None) -> None:
    """Write two comma-separated columns (offset, intensity), '#' header.

    The provenance mapping (generator, parameters, version) goes into the
    header so the file records how to regenerate itself.  Whole-file replace
    semantics; never appends.
    """
    lines = ["# resfluor spectrum"]
    lines += _provenance_lines(provenance)
    lines.append("# columns: offset,intensity")
    for x, v in zip(spectrum.grid, spectrum.values):
        lines.append(f"{_fmt(x)},{_fmt(v)}")
    Path(destination).write_text("\n".join(lines) + "\n")


def read_spectrum(source: str | Path) -> SampledSpectrum:
    """Parse a two-column spectrum file; errors carry 1-based line numbers."""
    xs: list[float] = []
    vs: list[float] = []
    prev = -np.inf
    for lineno, raw in enumerate(Path(source).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 2:
            raise ParseError(f"line {lineno}: expected 2 columns, got {len(fields)}")
        try:
            x, v = float(fields[0]), float(fields[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if not (np.isfinite(x) and np.isfinite(v)):
            raise ParseError(f"line {lineno}: non-finite value")
        if x <= prev:
            raise ParseError(f"line {lineno}: offsets must be strictly increasing "
                             f"({_fmt(x)} after {_fmt(prev)})")
        prev = x
        xs.append(x)
        vs.append(v)
    if not xs:
        raise ParseError("no data rows: file is empty or header-only")
    try:
        return SampledSpectrum(grid=np.array(xs), values=np.array(vs))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def write_lines(line_spectrum: LineSpectrum, destination: str | Path,
                provenance: Mapping[str, Any] | None = None) -> None:
    """Write a line set with its parameters and provenance as JSON."""
    doc = {
        "format": "resfluor-lines",
        "kind": line_spectrum.kind,
        "params": _params_dict(line_spectrum.params),
        "lines": [{"center": _round12(ln.center),
                   "half_width": _round12(ln.half_width),
                   "weight": _round12(ln.weight)} for ln in line_spectrum.lines],
    }
    if provenance:
        doc["provenance"] = dict(provenance)
    Path(destination).write_text(json.dumps(doc, indent=1) + "\n")


def read_lines(source: str | Path) -> LineSpectrum:
    """Parse a JSON line-set file back into a LineSpectrum."""
    doc = _load_json(source)
    for key in ("kind", "params", "lines"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}")
    params = _parse_params(doc["params"])
    try:
        lines = tuple(SpectralLine(float(ln["center"]), float(ln["half_width"]),
                                   float(ln["weight"])) for ln in doc["lines"])
        return LineSpectrum(params=params, lines=lines, kind=str(doc["kind"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad line entry: {exc}") from exc


def write_params(params: SystemParams, destination: str | Path,
                 grid: GridSpec | None = None) -> None:
    """Write physical parameters (and an optional grid) as JSON."""
    doc: dict[str, Any] = _params_dict(params)
    if grid is not None:
        doc["grid"] = {"min": _round12(grid.lo), "max": _round12(grid.hi),
                       "points": grid.points}
    Path(destination).write_text(json.dumps(doc, indent=1) + "\n")


def read_params(source: str | Path) -> ParamsFile:
    """Parse a parameters file; unknown keys and invalid values are errors."""
    doc = _load_json(source)
    if not isinstance(doc, dict):
        raise ParseError("parameters file must hold a JSON object")
    unknown = set(doc) - set(_PARAM_KEYS) - {"grid"}
    if unknown:
        raise ParseError(f"unknown keys: {sorted(unknown)}")
    missing = [k for k in _PARAM_KEYS if k not in doc]
    if missing:
        raise ParseError(f"missing keys: {missing}")
    params = _parse_params({k: doc[k] for k in _PARAM_KEYS})
    grid = None
    if "grid" in doc:
        g = doc["grid"]
        if not isinstance(g, dict) or set(g) != {"min", "max", "points"}:
            raise ParseError("grid must be an object with keys min, max, points")
        try:
            grid = GridSpec(lo=float(g["min"]), hi=float(g["max"]),
                            points=int(g["points"]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad grid: {exc}") from exc
    return ParamsFile(params=params, grid=grid)


def _load_json(source: str | Path):
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _parse_params(doc: Mapping[str, Any]) -> SystemParams:
    try:
        n = doc["n_emitters"]
        if not isinstance(n, int):
            raise ParseError(f"n_emitters must be an integer, got {n!r}")
        return SystemParams(n_emitters=n, rabi=float(doc["rabi"]),
                            dd_coupling=float(doc["dd_coupling"]),
                            detuning=float(doc["detuning"]))
    except KeyError as exc:
        raise ParseError(f"missing parameter key: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid parameters: {exc}") from exc
