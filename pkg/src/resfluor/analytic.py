"""Closed-form spectral line sets and Lorentzian grid evaluation.

The resonant spectrum of N coupled emitters is a sum of 2N+1 Lorentzians:
a central line at the drive frequency plus N sidebands clustered around each
of +-2*Omega, the cluster spacing set by the per-pair coupling delta/(N-1).
Each line is stored as (center, half_width, weight) with the global 1/4
prefactor folded into the weights, so a line contributes
weight*hw/(hw^2 + (x-center)^2) and integrates to pi*weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import SystemParams

__all__ = [
    "SpectralLine",
    "LineSpectrum",
    "SampledSpectrum",
    "general_lines",
    "mollow_limit_lines",
    "two_atom_lines",
    "three_atom_lines",
    "evaluate_spectrum",
    "integrated_weight",
]

# Largest negative spectrum value tolerated: numerical undershoot of oracles.
_NEGATIVE_TOL = 1e-8


@dataclass(frozen=True)
class SpectralLine:
    """One Lorentzian: offset center x0, half-width hw > 0, weight w >= 0."""

    center: float
    half_width: float
    weight: float

    def __post_init__(self):
        if not (self.half_width > 0 and np.isfinite(self.half_width)):
            raise ValueError(f"half_width must be > 0, got {self.half_width}")
        if not (self.weight >= 0 and np.isfinite(self.weight)):
            raise ValueError(f"weight must be >= 0, got {self.weight}")
        if not np.isfinite(self.center):
            raise ValueError(f"center must be finite, got {self.center}")


@dataclass(frozen=True)
class LineSpectrum:
    """A finite line set tied to the parameters that generated it.

    Invariants: exactly one line sits at center 0, and every line at +x0
    has a mirror at -x0 with identical half-width and weight.
    """

    params: SystemParams
    lines: tuple[SpectralLine, ...]
    kind: str  # general | mollow | two_atom | three_atom

    def __post_init__(self):
        centered = [ln for ln in self.lines if ln.center == 0.0]
        if len(centered) != 1:
            raise ValueError(f"expected exactly one central line, got {len(centered)}")
        pos = sorted((ln for ln in self.lines if ln.center > 0.0),
                     key=lambda ln: (ln.center, ln.half_width, ln.weight))
        neg = sorted((ln for ln in self.lines if ln.center < 0.0),
                     key=lambda ln: (-ln.center, ln.half_width, ln.weight))
        if len(pos) != len(neg):
            raise ValueError("line set is not mirror symmetric")
        for p, m in zip(pos, neg):
            if not (p.center == -m.center and p.half_width == m.half_width
                    and p.weight == m.weight):
                raise ValueError("line set is not mirror symmetric")

    def __iter__(self):
        return iter(self.lines)

    def __len__(self):
        return len(self.lines)


@dataclass(frozen=True)
class SampledSpectrum:
    """Intensity samples on a strictly increasing offset grid."""

    grid: np.ndarray
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or values.ndim != 1 or grid.size != values.size:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size == 0:
            raise ValueError("spectrum is empty")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ValueError("grid and values must be finite")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if np.min(values) < -_NEGATIVE_TOL:
            raise ValueError(f"values must be non-negative, min is {values.min():g}")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.size


def _require_resonance(params: SystemParams, what: str) -> None:
    if params.detuning != 0.0:
        raise ValueError(f"{what} is defined at resonance only (detuning = 0), "
                         f"got detuning = {params.detuning}")


def _mirrored(params: SystemParams, central: SpectralLine,
              plus_branch: list[SpectralLine], kind: str) -> LineSpectrum:
    # Mirror lines by explicit negation so symmetry holds bit-for-bit.
    minus = [SpectralLine(-ln.center, ln.half_width, ln.weight) for ln in plus_branch]
    lines = sorted([central, *plus_branch, *minus], key=lambda ln: ln.center)
    return LineSpectrum(params=params, lines=tuple(lines), kind=kind)


def general_lines(params: SystemParams) -> LineSpectrum:
    """The exact 2N+1-line resonant spectrum for arbitrary N.

    Central line: center 0, half-width 1/2, weight N(N+2)/12.  Sidebands for
    n = 1..N at 2*Omega - delta_tilde*(2n-N-1)/2 with weight
    n(N-n+1)/(4(N+1)) and half-width (1 + 2n(N-n+1))/4, mirrored about 0.
    The n with vanishing weight are dropped so the count is literally 2N+1.

    The half-widths carry a factor 2 on the combinatorial term: the N = 1
    limit (sideband width 3/4), the explicit N = 2 and N = 3 spectra and the
    operator form of the coherence decay (see liouville.coherence_decay_rates)
    all require it.
    """
    _require_resonance(params, "general_lines")
    n_em = params.n_emitters
    two_omega = 2.0 * params.rabi
    dt = params.delta_tilde
    central = SpectralLine(0.0, 0.5, n_em * (n_em + 2) / 12.0)
    plus = []
    for n in range(1, n_em + 1):
        center = two_omega - dt * (2 * n - n_em - 1) / 2.0
        hw = (1 + 2 * n * (n_em - n + 1)) / 4.0
        weight = n * (n_em - n + 1) / (4.0 * (n_em + 1))
        plus.append(SpectralLine(center, hw, weight))
    return _mirrored(params, central, plus, "general")


def mollow_limit_lines(params: SystemParams) -> LineSpectrum:
    """The three-line uncoupled limit: coupling treated as exactly zero.

    Lines (0, 1/2, N(N+2)/12) and (+-2*Omega, 3/4, N(N+2)/24).  For N = 1
    this is the single-atom Mollow triplet.  For N >= 2 with nonzero coupling
    it is NOT the delta -> 0 limit of the line widths of general_lines; the
    two regimes are separated by the secular condition.
    """
    _require_resonance(params, "mollow_limit_lines")
    n_em = params.n_emitters
    central = SpectralLine(0.0, 0.5, n_em * (n_em + 2) / 12.0)
    side = SpectralLine(2.0 * params.rabi, 0.75, n_em * (n_em + 2) / 24.0)
    return _mirrored(params, central, [side], "mollow")


def two_atom_lines(params: SystemParams) -> LineSpectrum:
    """Literal N = 2 spectrum: weights {2/3, 1/6 x4}, widths {1/2, 5/4}."""
    if params.n_emitters != 2:
        raise ValueError(f"two_atom_lines requires N = 2, got {params.n_emitters}")
    _require_resonance(params, "two_atom_lines")
    two_omega = 2.0 * params.rabi
    half_delta = params.dd_coupling / 2.0
    central = SpectralLine(0.0, 0.5, 4.0 / 6.0)
    plus = [SpectralLine(two_omega + half_delta, 1.25, 1.0 / 6.0),
            SpectralLine(two_omega - half_delta, 1.25, 1.0 / 6.0)]
    return _mirrored(params, central, plus, "two_atom")


def three_atom_lines(params: SystemParams) -> LineSpectrum:
    """Literal N = 3 spectrum: weights {5/4, 1/4 x2, 3/16 x4}, widths {1/2, 9/4, 7/4}."""
    if params.n_emitters != 3:
        raise ValueError(f"three_atom_lines requires N = 3, got {params.n_emitters}")
    _require_resonance(params, "three_atom_lines")
    two_omega = 2.0 * params.rabi
    half_delta = params.dd_coupling / 2.0
    central = SpectralLine(0.0, 0.5, 5.0 / 4.0)
    plus = [SpectralLine(two_omega, 2.25, 1.0 / 4.0),
            SpectralLine(two_omega + half_delta, 1.75, 3.0 / 16.0),
            SpectralLine(two_omega - half_delta, 1.75, 3.0 / 16.0)]
    return _mirrored(params, central, plus, "three_atom")


def _as_lines(lines: LineSpectrum | Iterable[SpectralLine]) -> Sequence[SpectralLine]:
    if isinstance(lines, LineSpectrum):
        return lines.lines
    return tuple(lines)


def evaluate_spectrum(lines: LineSpectrum | Iterable[SpectralLine],
                      grid: np.ndarray) -> SampledSpectrum:
    """Sum the Lorentzians on a grid: S(x) = sum w*hw/(hw^2 + (x-x0)^2)."""
    grid = np.asarray(grid, dtype=float)
    values = np.zeros_like(grid)
    for ln in _as_lines(lines):
        values += ln.weight * ln.half_width / (ln.half_width ** 2 + (grid - ln.center) ** 2)
    return SampledSpectrum(grid=grid, values=values)


def integrated_weight(lines: LineSpectrum | Iterable[SpectralLine]) -> float:
    """Total line weight; the spectrum integrates to pi times this."""
    return float(sum(ln.weight for ln in _as_lines(lines)))
