"""Master-equation oracles on the symmetric subspace.

Two generators are provided: the secular drive-dressed one (whose coherence
sectors reproduce the closed-form line set up to O(gamma/delta_tilde)
couplings) and the bare-frame one with no secular approximation.  Both act on
column-stacked density matrices of dimension (N+1)^2; the symmetric sector is
enough because the collective dynamics never leaves it.

Spectra are obtained through the quantum regression step: the stationary
correlator <A B(tau)> equals Tr[B exp(L tau)(rho_s A)], and its half-range
Fourier transform is evaluated exactly in tau by expanding rho_s*A in the
eigenbasis of L (one mode per Lorentzian) instead of time propagation.  A
quadrature-based time-domain transform is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .analytic import SampledSpectrum
from .core import SystemParams, collective_operators, dressed_frame

__all__ = [
    "LiouvilleError",
    "Liouvillian",
    "CorrelatorSpec",
    "build_secular_liouvillian",
    "build_bare_liouvillian",
    "steady_state",
    "propagate",
    "resolvent_correlator",
    "time_domain_correlator",
    "dressed_spectrum_oracle",
    "bare_spectrum_oracle",
    "coherence_decay_rates",
]


class LiouvilleError(RuntimeError):
    """Linear-algebra failure: missing/non-unique null space, singular resolvent."""


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Dense superoperator matrix acting on vectorized density operators."""

    matrix: np.ndarray
    frame: str  # secular_dressed | bare_nonsecular
    params: SystemParams

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension N+1 (the matrix is dim^2 x dim^2)."""
        return self.params.n_emitters + 1


@dataclass(frozen=True, eq=False)
class CorrelatorSpec:
    """Operators of a stationary two-time correlator <left right(tau)>."""

    left: np.ndarray
    right: np.ndarray
    incoherent: bool = True

    def __post_init__(self):
        a = np.asarray(self.left, dtype=complex)
        b = np.asarray(self.right, dtype=complex)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("left and right must be square matrices of equal shape")
        object.__setattr__(self, "left", a)
        object.__setattr__(self, "right", b)


def _vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def _unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim)


def _spre(a: np.ndarray) -> np.ndarray:
    return np.kron(a, np.eye(a.shape[0]))


def _spost(b: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(b.shape[0]), b.T)


def _dissipator(c: np.ndarray) -> np.ndarray:
    # c rho c^dag - {c^dag c, rho}/2 on vectorized rho
    cdc = c.conj().T @ c
    return np.kron(c, c.conj()) - 0.5 * (_spre(cdc) + _spost(cdc))


def _hamiltonian_part(h: np.ndarray) -> np.ndarray:
    return -1j * (_spre(h) - _spost(h))


def build_secular_liouvillian(params: SystemParams) -> Liouvillian:
    """Generator of the secular dressed-frame master equation.

    drho/dt = -i[g_bar*Rz - delta_bar*R+R-, rho]
              + (gamma/4) sin^2(2 theta) D[Rz] rho
              + gamma cos^4(theta) D[R-] rho + gamma sin^4(theta) D[R+] rho

    with D the standard Lindblad dissipator; the reservoir response is taken
    flat across the sideband frequencies (all rates equal gamma).  At
    resonance the three rates all become gamma/4.
    """
    ops = collective_operators(params.n_emitters)
    fr = dressed_frame(params)
    g = params.gamma
    h = fr.g_bar * ops.rz - fr.delta_bar * (ops.rp @ ops.rm)
    sin_t, cos_t = np.sin(fr.theta), np.cos(fr.theta)
    rate_z = 0.25 * g * (2.0 * sin_t * cos_t) ** 2
    rate_down = g * cos_t ** 4
    rate_up = g * sin_t ** 4
    mat = (_hamiltonian_part(h)
           + rate_z * _dissipator(ops.rz)
           + rate_down * _dissipator(ops.rm)
           + rate_up * _dissipator(ops.rp))
    return Liouvillian(matrix=mat, frame="secular_dressed", params=params)


def build_bare_liouvillian(params: SystemParams) -> Liouvillian:
    """Generator of the bare-frame master equation, no secular approximation.

    drho/dt = -i[Delta*Sz + Omega*(S+ + S-) - delta_tilde*S+S-, rho]
              + gamma D[S-] rho

    with Sz = Rz/2 and S+- the collective ladder matrices.  Delta = 0 is
    resonance in the convention that the drive already absorbs the
    coupling-induced shift delta_tilde.
    """
    ops = collective_operators(params.n_emitters)
    sz = 0.5 * ops.rz
    dt = params.delta_tilde
    h = params.detuning * sz + params.rabi * (ops.rp + ops.rm) - dt * (ops.rp @ ops.rm)
    mat = _hamiltonian_part(h) + params.gamma * _dissipator(ops.rm)
    return Liouvillian(matrix=mat, frame="bare_nonsecular", params=params)


def steady_state(liou: Liouvillian, *, rtol: float = 1e-12,
                 atol: float = 1e-10) -> np.ndarray:
    """Unique trace-one stationary density matrix of the generator.

    Raises LiouvilleError when the null space is missing or not
    one-dimensional, or when the result is not numerically positive.
    """
    _, s, vh = scipy.linalg.svd(liou.matrix)
    tol = max(atol, rtol * s[0])
    nullity = int(np.sum(s < tol))
    if nullity != 1:
        raise LiouvilleError(
            f"expected a unique stationary state, found null-space dimension "
            f"{nullity} (tolerance {tol:g})")
    rho = _unvec(vh[-1].conj(), liou.dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise LiouvilleError("stationary vector has vanishing trace")
    rho = rho / tr
    evals = scipy.linalg.eigvalsh(rho)
    if evals.min() < -1e-10:
        raise LiouvilleError(f"stationary state not positive, min eigenvalue {evals.min():g}")
    return rho


def propagate(liou: Liouvillian, rho: np.ndarray, tau: float) -> np.ndarray:
    """Apply exp(L tau) to a density matrix (matrix exponential, exact)."""
    prop = scipy.linalg.expm(liou.matrix * tau)
    return _unvec(prop @ _vec(rho), liou.dim)


def _eigenmode_amplitudes(liou: Liouvillian, rho_s: np.ndarray,
                          spec: CorrelatorSpec):
    """Expand rho_s*A over eigenmodes of L and project each mode on B.

    Returns (eigenvalues, amplitudes, zero_mask); the correlator is
    <A B(tau)> = sum_k amp_k exp(lambda_k tau), and zero_mask marks the
    stationary modes whose removal implements the plateau subtraction.
    """
    if spec.left.shape[0] != liou.dim:
        raise ValueError(f"operator dimension {spec.left.shape[0]} does not "
                         f"match Liouvillian dimension {liou.dim}")
    v0 = _vec(rho_s @ spec.left)
    if not np.any(v0):
        # nothing to propagate (e.g. undriven steady state annihilated by A)
        empty = np.empty(0, dtype=complex)
        return empty, empty, np.empty(0, dtype=bool)
    evals, vecs = scipy.linalg.eig(liou.matrix)
    try:
        coeffs = scipy.linalg.solve(vecs, v0)
    except scipy.linalg.LinAlgError as exc:
        raise LiouvilleError(f"generator is not diagonalizable: {exc}") from exc
    b_row = _vec(spec.right.T)
    amps = (b_row @ vecs) * coeffs
    zero_mask = np.abs(evals) < 1e-9 * max(1.0, np.abs(evals).max())
    return evals, amps, zero_mask


def resolvent_correlator(liou: Liouvillian, rho_s: np.ndarray,
                         spec: CorrelatorSpec, grid: np.ndarray) -> SampledSpectrum:
    """Half-range Fourier transform of <A B(tau)>_s at each grid offset.

    Returns Re integral_0^inf exp(i x tau) (<A B(tau)>_s - plateau) d tau,
    exactly in tau, one Lorentzian per eigenmode of the generator.  The
    plateau <A>_s<B>_s is removed by discarding the stationary eigenmode when
    incoherent is set; otherwise the stationary mode is kept and the resolvent
    is singular at x = 0.
    """
    grid = np.asarray(grid, dtype=float)
    evals, amps, zero_mask = _eigenmode_amplitudes(liou, rho_s, spec)
    if spec.incoherent:
        evals, amps = evals[~zero_mask], amps[~zero_mask]
    if evals.size == 0:
        return SampledSpectrum(grid=grid, values=np.zeros_like(grid))
    denom = evals[:, None] + 1j * grid[None, :]
    if np.abs(denom).min() < 1e-12:
        raise LiouvilleError(
            "singular resolvent: stationary mode retained and the grid "
            "contains x = 0 (set incoherent=True)")
    values = -np.real(np.sum(amps[:, None] / denom, axis=0))
    return SampledSpectrum(grid=grid, values=values)


def time_domain_correlator(liou: Liouvillian, rho_s: np.ndarray,
                           spec: CorrelatorSpec, grid: np.ndarray, *,
                           tau_max: float = 50.0) -> np.ndarray:
    """Same transform by adaptive quadrature of the propagated correlator.

    Cross-check oracle for resolvent_correlator: integrates
    Re[exp(i x tau) (<A B(tau)>_s - plateau)] to tau_max with the correlator
    evaluated through the matrix exponential at each quadrature node.  Slow;
    intended for small instances and a few grid points.
    """
    grid = np.asarray(grid, dtype=float)
    v0 = _vec(rho_s @ spec.left)
    b_row = _vec(spec.right.T)
    plateau = complex(np.trace(spec.right @ rho_s) * np.trace(rho_s @ spec.left))

    def correlator(tau: float) -> complex:
        prop = scipy.linalg.expm(liou.matrix * tau)
        c = b_row @ (prop @ v0)
        return c - plateau if spec.incoherent else c

    out = np.empty_like(grid)
    for i, x in enumerate(grid):
        def integrand(tau: float) -> float:
            return np.real(np.exp(1j * x * tau) * correlator(tau))
        val, _ = scipy.integrate.quad(integrand, 0.0, tau_max,
                                      epsabs=1e-10, epsrel=1e-10, limit=400)
        out[i] = val
    return out


def dressed_spectrum_oracle(params: SystemParams, grid: np.ndarray) -> SampledSpectrum:
    """Numeric resonant spectrum from the secular generator.

    One quarter of the sum of the three dressed correlators (Rz,Rz), (R+,R-)
    and (R-,R+), each transformed with the stationary mode deflated.  At
    resonance the plateaus vanish analytically; deflation is applied anyway
    for robustness.
    """
    if params.detuning != 0.0:
        raise ValueError("dressed_spectrum_oracle is defined at resonance only")
    grid = np.asarray(grid, dtype=float)
    liou = build_secular_liouvillian(params)
    rho_s = steady_state(liou)
    ops = collective_operators(params.n_emitters)
    total = np.zeros_like(grid)
    for a, b in ((ops.rz, ops.rz), (ops.rp, ops.rm), (ops.rm, ops.rp)):
        part = resolvent_correlator(liou, rho_s, CorrelatorSpec(a, b), grid)
        total += part.values
    return SampledSpectrum(grid=grid, values=0.25 * total)


def bare_spectrum_oracle(params: SystemParams, grid: np.ndarray) -> SampledSpectrum:
    """Incoherent spectrum <S+ S-(tau)> from the bare non-secular generator.

    The elastic component (the correlator plateau) is removed by
    stationary-mode deflation.
    """
    liou = build_bare_liouvillian(params)
    rho_s = steady_state(liou)
    ops = collective_operators(params.n_emitters)
    return resolvent_correlator(liou, rho_s, CorrelatorSpec(ops.rp, ops.rm),
                                np.asarray(grid, dtype=float))


def coherence_decay_rates(liou: Liouvillian, n: int) -> tuple[float, float]:
    """Decay rate and frequency of the superdiagonal coherence <n|rho|n+1>.

    The first-off-diagonal sector of the secular generator is closed; its
    eigenvalue paired with coherence n (by nearest expected frequency) tends
    to -gamma*(1 + 2(N-n)(n+1))/4 + i*(2*Omega - delta_tilde*(1+2n-N)/2) as
    delta_tilde/gamma grows.  Returns (rate, frequency) = (-Re, Im).

    Raises LiouvilleError when the expected frequencies are degenerate
    (delta_tilde = 0) and the pairing is ambiguous.
    """
    if liou.frame != "secular_dressed":
        raise ValueError("coherence sector analysis expects the secular generator")
    p = liou.params
    n_em = p.n_emitters
    if not 0 <= n <= n_em - 1:
        raise ValueError(f"coherence index must be in 0..{n_em - 1}, got {n}")
    dim = liou.dim
    idx = np.array([k * dim + (k + 1) for k in range(n_em)])
    sector = liou.matrix[np.ix_(idx, idx)]
    evals = scipy.linalg.eigvals(sector)

    expected = np.array([2.0 * p.rabi - p.delta_tilde * (1 + 2 * k - n_em) / 2.0
                         for k in range(n_em)])
    gaps = np.abs(expected[:, None] - expected[None, :])[~np.eye(n_em, dtype=bool)]
    if n_em > 1 and gaps.min() < 1e-6 * p.gamma:
        raise LiouvilleError(
            "coherence frequencies are degenerate (delta_tilde ~ 0); "
            "eigenvalue pairing is ambiguous")
    k = int(np.argmin(np.abs(evals.imag - expected[n])))
    lam = evals[k]
    return float(-lam.real), float(lam.imag)
