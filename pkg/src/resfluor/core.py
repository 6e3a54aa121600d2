"""Physical parameters, the symmetric ladder subspace, and dressed-frame quantities.

All rates and frequencies are expressed in units of the single-emitter decay
rate gamma, which is stored but fixed to 1 by convention.  Spectra produced
downstream live entirely in the offset coordinate x = (nu - omega_L)/gamma;
absolute frequencies are never stored.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "SecularRegimeWarning",
    "SystemParams",
    "DressedFrame",
    "CollectiveOperators",
    "make_params",
    "dressed_frame",
    "collective_operators",
    "scaled_coupling",
]


class SecularRegimeWarning(UserWarning):
    """Parameters violate the regime 2*rabi > dd_coupling >= 10*N*gamma."""


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs for an ensemble of N identical two-level emitters.

    Attributes
    ----------
    n_emitters : int
        Number of emitters N (>= 1).
    rabi : float
        Drive strength Omega, units of gamma.
    dd_coupling : float
        Pairwise dipole-dipole coupling delta, units of gamma (>= 0).
    detuning : float
        Detuning Delta of the drive from the (coupling-shifted) transition,
        units of gamma.  Delta = 0 is resonance.
    gamma : float
        Single-emitter decay rate; 1 by convention.
    """

    n_emitters: int
    rabi: float
    dd_coupling: float
    detuning: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n_emitters, (int, np.integer)) or isinstance(self.n_emitters, bool):
            raise ValueError(f"n_emitters must be an integer, got {self.n_emitters!r}")
        if self.n_emitters < 1:
            raise ValueError(f"n_emitters must be >= 1, got {self.n_emitters}")
        for name in ("rabi", "dd_coupling", "detuning", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.rabi < 0:
            raise ValueError(f"rabi must be >= 0, got {self.rabi}")
        if self.dd_coupling < 0:
            raise ValueError(f"dd_coupling must be >= 0, got {self.dd_coupling}")

    @property
    def delta_tilde(self) -> float:
        """Per-pair scaled coupling delta/(N-1); 0 for a single emitter."""
        return scaled_coupling(self.dd_coupling, self.n_emitters)

    @property
    def secular_ok(self) -> bool:
        """Whether 2*rabi > dd_coupling and dd_coupling >= 10*N*gamma.

        The ">> gamma" requirement is quantified as a factor of 10.  Violation
        is a warning, never a construction failure: convergence studies
        deliberately leave the regime.
        """
        return (2.0 * self.rabi > self.dd_coupling
                and self.dd_coupling >= 10.0 * self.n_emitters * self.gamma)


@dataclass(frozen=True)
class DressedFrame:
    """Mixing angle and drive-frame frequencies derived from SystemParams.

    theta solves cot(2*theta) = detuning/(2*rabi); at resonance theta = pi/4.
    """

    theta: float
    g_big: float
    g_bar: float
    delta_bar: float
    delta_tilde: float


class CollectiveOperators(NamedTuple):
    """Ladder matrices on the (N+1)-dimensional symmetric subspace."""

    rp: np.ndarray
    rm: np.ndarray
    rz: np.ndarray


def make_params(n_emitters: int, rabi: float, dd_coupling: float,
                detuning: float = 0.0, *, gamma: float = 1.0,
                warn: bool = True) -> SystemParams:
    """Validate and normalize physical parameters (gamma = 1 internal units).

    Emits a SecularRegimeWarning when the parameters leave the regime in which
    the closed-form spectrum is controlled.  Rejects n_emitters < 1, negative
    rates and non-finite values.
    """
    p = SystemParams(n_emitters=int(n_emitters), rabi=float(rabi),
                     dd_coupling=float(dd_coupling), detuning=float(detuning),
                     gamma=float(gamma))
    if warn and not p.secular_ok:
        warnings.warn(
            f"parameters leave the secular regime (need 2*rabi > dd_coupling "
            f">= 10*N*gamma; got rabi={p.rabi}, dd_coupling={p.dd_coupling}, "
            f"N={p.n_emitters})", SecularRegimeWarning, stacklevel=2)
    return p


def scaled_coupling(delta: float, n: int) -> float:
    """Per-pair coupling delta/(N-1).  Defined as 0 for N = 1 (no pairs)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if n == 1:
        return 0.0
    return delta / (n - 1)


def dressed_frame(params: SystemParams) -> DressedFrame:
    """Mixing angle and effective frequencies of the drive-dressed frame.

    Returns theta in (0, pi/2) with cot(2*theta) = Delta/(2*Omega), the
    generalized drive frequency G = sqrt(Omega^2 + (Delta/2)^2), and its
    coupling-corrected versions

        g_bar     = G + delta_tilde*(sin^4(theta) - sin^2(2*theta)/2)
        delta_bar = delta_tilde*(cos^4(theta) + sin^4(theta) - sin^2(2*theta))

    At resonance these reduce to g_bar = Omega - delta_tilde/4 and
    delta_bar = -delta_tilde/2.
    """
    two_omega = 2.0 * params.rabi
    if params.detuning == 0.0:
        theta = math.pi / 4.0  # exact at resonance
    else:
        theta = 0.5 * math.atan2(two_omega, params.detuning)
    g_big = math.hypot(params.rabi, 0.5 * params.detuning)
    dt = params.delta_tilde
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    sin_2t_sq = (2.0 * math.sin(theta) * math.cos(theta)) ** 2
    g_bar = g_big + dt * (s2 * s2 - 0.5 * sin_2t_sq)
    delta_bar = dt * (c2 * c2 + s2 * s2 - sin_2t_sq)
    return DressedFrame(theta=theta, g_big=g_big, g_bar=g_bar,
                        delta_bar=delta_bar, delta_tilde=dt)


def collective_operators(n: int) -> CollectiveOperators:
    """Ladder matrices R+, R-, Rz on the symmetric subspace of N emitters.

    Basis states |m>, m = 0..N, count excited emitters:

        R+|m> = sqrt((N-m)(m+1)) |m+1>,   Rz|m> = (2m-N) |m>,

    and R- is the conjugate transpose of R+.  The bare-frame spin operators
    share this representation with Sz = Rz/2 and S+- = R+-.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    dim = n + 1
    m = np.arange(n)
    rp = np.zeros((dim, dim), dtype=complex)
    rp[m + 1, m] = np.sqrt((n - m) * (m + 1.0))
    rz = np.diag(2.0 * np.arange(dim) - n).astype(complex)
    return CollectiveOperators(rp=rp, rm=rp.conj().T, rz=rz)
