"""Block decomposition of the eigenvalue problem at one gap index.

Working on the half-integer lattice e_m = e^{i pi m x}, the eigenvalue
equation -f'' + qf = lam f splits at index n into a 2-dimensional part on
span{e_n, e_{-n}} and an infinite remainder handled by contraction.  The
remainder operator is

    T_n f = V A_lam^{-1} Q_n f,

multiplication by q after inverting f -> lam f + f'' away from the resonant
modes +-n, with ||T_n|| <= 2 ||q|| / n on the weighted spaces.  Its Neumann
resolvent turns the eigenvalue condition into the singularity of a 2x2 matrix
with diagonal lam - sigma_n - a_n(lam) (sigma_n = n^2 pi^2) and off-diagonal
entries c_{+-n}(lam).

Everything downstream lives at the point alpha_n where the diagonal vanishes:
the adapted coefficients p_{+-n} = c_{-+n}(alpha_n), the gap roots xi_-+
obtained by Newton on lam - sigma_n - a_n -+ phi_n with phi_n = sqrt(c_n
c_{-n}), and the map q -> Phi(q) that replaces high Fourier modes by adapted
coefficients.  Phi is a near-identity diffeomorphism on a ball, inverted here
by direct iteration, which also yields potentials with collapsed gaps beyond
a prescribed index (N-gap approximants).

All operators act on zero-mean potentials; the public entry points strip the
mean and add it back to every returned spectral quantity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .seqspace import (
    FourierPotential,
    ParityVector,
    make_fourier,
    multiply_by_potential,
    truncate,
    unit_vector,
)

PI2 = math.pi ** 2
STRIP_HALF_WIDTH = 12.0   # |Re lam - n^2 pi^2| <= 12 n admits lam
NU_CAP = 128              # Neumann iteration cap; also sizes the mode window
COLLAPSE_PRODUCT = 1e-24  # |c_+ c_-| below this counts as a collapsed gap
_SINGULAR_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the operator's admissible region."""


class ContractionError(RuntimeError):
    """No usable contraction factor at this gap index."""


class IterationError(RuntimeError):
    """An iteration failed to converge or left its certified region."""


@dataclass(frozen=True)
class SolveInfo:
    """Diagnostics of one resolvent solve: iterations, final residual, last
    observed contraction ratio, accumulated window-truncation loss."""

    iters: int
    resid: float
    rate: float
    lost: float


@dataclass(frozen=True)
class BlockDiagnostics:
    solver_iters: int
    newton_iters: int
    resid: float
    rate: float
    lost: float
    collapsed: bool


@dataclass(frozen=True)
class BlockData:
    """Reduced 2x2 data of one gap: fixed point, adapted coefficients, roots.

    xi_minus precedes xi_plus lexicographically (real part, then imaginary
    part) and gamma_n = xi_plus - xi_minus.  The mean of the potential is
    already added back into alpha_n and xi_-+.
    """

    n: int
    alpha_n: complex
    a_n_at_alpha: complex
    p_plus: complex
    p_minus: complex
    xi_minus: complex
    xi_plus: complex
    gamma_n: complex
    diagnostics: BlockDiagnostics


@dataclass(frozen=True)
class MapResult:
    """Outcome of inverting the adapted-coefficient map."""

    q: FourierPotential
    resid: float
    iters: int
    rate: float


def mode_cutoff(q: FourierPotential, n: int, nu_cap: int = NU_CAP) -> int:
    """Window cap for the resolvent iteration at index n.

    Each application of T_n widens the support by 2K, so nu_cap rounds need
    this much room before truncation loss can appear.
    """
    return 2 * q.K * nu_cap + n + 8


def _require_zero_mean(q: FourierPotential) -> None:
    if q.mean != 0:
        raise DomainError("operator requires a zero-mean potential; "
                          "use q.without_mean() and shift eigenvalues")


def _require_in_strip(n: int, lam: complex) -> None:
    if abs(lam.real - n * n * PI2) > STRIP_HALF_WIDTH * n:
        raise DomainError(f"lam = {lam} outside the admissible strip at n = {n}")


def apply_Tn(q: FourierPotential, n: int, lam: complex,
             f: ParityVector) -> ParityVector:
    """One application of T_n: zero the +-n modes, divide by lam - m^2 pi^2,
    multiply by the potential.

    Requires mean(q) = 0, lam in the admissible strip, and parity(f) = n mod 2.
    """
    _require_zero_mean(q)
    if n < 1:
        raise DomainError("gap index n must be >= 1")
    _require_in_strip(n, lam)
    if f.parity != n % 2:
        raise DomainError(f"parity {f.parity} vector at gap index {n}")
    m = f.modes()
    denom = lam - PI2 * m.astype(np.float64) ** 2
    resonant = np.abs(m) == n
    # cannot trip for admissible lam (the gap to the nearest off-resonant
    # mode exceeds the strip width), but guard the division anyway
    if np.any((np.abs(denom) < _SINGULAR_TOL) & ~resonant):
        raise DomainError(f"lam = {lam} is near-singular off the resonant modes")
    g = np.where(resonant, 0, f.data / np.where(resonant, 1.0, denom))
    return multiply_by_potential(q, ParityVector(f.parity, f.mcut, g, f.lost))


def resolve_hat_Tn(q: FourierPotential, n: int, lam: complex, rhs: ParityVector,
                   tol: float = 1e-12,
                   max_iter: int = NU_CAP) -> tuple[ParityVector, SolveInfo]:
    """Solve (I - T_n) g = rhs by the Neumann iteration g <- rhs + T_n g.

    Refuses when 2 ||q|| >= n, where the operator-norm bound gives no
    contraction at all; below that the measured ratio decides convergence.
    The residual in SolveInfo comes from a final direct application of
    I - T_n, so the contract ||(I - T_n) g - rhs|| <= tol ||rhs|| is checked,
    not inferred.
    """
    _require_zero_mean(q)
    nq = q.l2()
    if 2.0 * nq >= n:
        raise ContractionError(f"2 ||q|| = {2 * nq:.6g} >= n = {n}: "
                               "resolvent series need not converge")
    rhs_norm = rhs.l2()
    if rhs_norm == 0.0:
        return rhs, SolveInfo(0, 0.0, 0.0, rhs.lost)
    g = rhs
    rate = 2.0 * nq / n
    d_prev = None
    for it in range(1, max_iter + 1):
        tg = apply_Tn(q, n, lam, g)
        g_new = ParityVector(g.parity, g.mcut, rhs.data + tg.data, tg.lost)
        d = float(np.linalg.norm(g_new.data - g.data))
        rate = d / d_prev if d_prev is not None else d / rhs_norm
        g = g_new
        if d <= tol * rhs_norm:
            break
        d_prev = d
    else:
        raise IterationError(f"resolvent at n = {n} not converged after "
                             f"{max_iter} rounds; last ratio {rate:.3g}")
    tg = apply_Tn(q, n, lam, g)
    resid = float(np.linalg.norm(g.data - tg.data - rhs.data))
    return g, SolveInfo(it, resid, rate, g.lost)


def coeff_an_cn(q: FourierPotential, n: int, lam: complex,
                tol: float = 1e-12) -> tuple[complex, complex, complex]:
    """Entries of the reduced 2x2 matrix at lam.

    a_n is mode n of the resolvent applied to V e_n; c_plus is mode -n of the
    same solve, and c_minus is mode n of the solve with data V e_{-n}.  Mode
    extraction equals the L^2 pairing because distinct lattice modes of one
    parity are orthonormal over the period.
    """
    a_n, c_plus, c_minus, _ = _reduced_entries(q, n, lam, tol)
    return a_n, c_plus, c_minus


def _reduced_entries(q: FourierPotential, n: int, lam: complex, tol: float):
    mcut = mode_cutoff(q, n)
    h, info_p = resolve_hat_Tn(
        q, n, lam, multiply_by_potential(q, unit_vector(n, mcut)), tol)
    g, info_m = resolve_hat_Tn(
        q, n, lam, multiply_by_potential(q, unit_vector(-n, mcut)), tol)
    info = SolveInfo(info_p.iters + info_m.iters,
                     max(info_p.resid, info_m.resid),
                     max(info_p.rate, info_m.rate),
                     info_p.lost + info_m.lost)
    return h.coeff(n), h.coeff(-n), g.coeff(n), info


def _diagonal_entry(q: FourierPotential, n: int, lam: complex, tol: float):
    mcut = mode_cutoff(q, n)
    h, info = resolve_hat_Tn(
        q, n, lam, multiply_by_potential(q, unit_vector(n, mcut)), tol)
    return h.coeff(n), info


class _Tally:
    """Accumulates SolveInfo across the solves of one gap computation."""

    def __init__(self) -> None:
        self.iters = 0
        self.resid = 0.0
        self.rate = 0.0
        self.lost = 0.0

    def add(self, info: SolveInfo) -> None:
        self.iters += info.iters
        self.resid = max(self.resid, info.resid)
        self.rate = max(self.rate, info.rate)
        self.lost += info.lost


def alpha_fixed_point(q: FourierPotential, n: int, tol: float = 1e-12) -> complex:
    """The point alpha_n where the reduced diagonal lam - sigma_n - a_n vanishes.

    Direct iteration alpha <- sigma_n + a_n(alpha) from sigma_n = n^2 pi^2.
    The iterate must stay in the disc |alpha - sigma_n| <= n, and once
    n >= ceil(4 ||q||) the sharper radius m^2 / 4n with m = ceil(4 ||q||) is
    checked after convergence.  The mean of q shifts the returned value.
    """
    alpha, _, _ = _alpha_zero_mean(q.without_mean(), n, tol)
    return alpha + complex(q.mean)


def _alpha_zero_mean(q0: FourierPotential, n: int, tol: float):
    """Fixed point in the zero-mean frame; returns (alpha, a_n, tally)."""
    sigma = n * n * PI2
    tol_lam = tol * max(1, n * n)
    alpha = complex(sigma)
    tally = _Tally()
    a_n = 0j
    for _ in range(48):
        a_n, info = _diagonal_entry(q0, n, alpha, tol)
        tally.add(info)
        step = sigma + a_n - alpha
        alpha = sigma + a_n
        if abs(alpha - sigma) > n:
            raise IterationError(f"fixed point left the disc |lam - {sigma:.6g}|"
                                 f" <= {n}")
        if abs(step) <= tol_lam:
            break
    else:
        raise IterationError(f"fixed-point iteration at n = {n} not converged")
    m = math.ceil(4.0 * q0.l2())
    if n >= m and abs(alpha - sigma) > m * m / (4.0 * n) + tol_lam:
        raise IterationError(f"fixed point outside the certified radius at n = {n}")
    return alpha, a_n, tally


def _lex_order(a: complex, b: complex) -> tuple[complex, complex]:
    if (a.real, a.imag) <= (b.real, b.imag):
        return a, b
    return b, a


def _g_value(q0: FourierPotential, n: int, sigma: float, lam: complex,
             sign: float, phi_ref: complex, tol: float, tally: _Tally):
    """One factor of the reduced determinant, with the square-root branch
    picked by continuity against phi_ref."""
    a_n, c_plus, c_minus, info = _reduced_entries(q0, n, lam, tol)
    tally.add(info)
    phi = cmath.sqrt(c_plus * c_minus)
    if abs(phi - phi_ref) > abs(phi + phi_ref):
        phi = -phi
    return lam - sigma - a_n - sign * phi, phi


def _gap_root_newton(q0: FourierPotential, n: int, sigma: float, seed: complex,
                     sign: float, phi_ref: complex, tol: float, tol_lam: float,
                     tally: _Tally, max_iter: int = 24):
    # slope is 1 + O(1/n) (|da_n/dlam| <= 1/4 by a Cauchy estimate), so an
    # undamped finite-difference Newton is safe; the clip is a parachute
    h = 1e-6 * n
    lam = seed
    phi_prev = phi_ref
    for it in range(1, max_iter + 1):
        g0, phi_prev = _g_value(q0, n, sigma, lam, sign, phi_prev, tol, tally)
        gp, _ = _g_value(q0, n, sigma, lam + h, sign, phi_prev, tol, tally)
        gm, _ = _g_value(q0, n, sigma, lam - h, sign, phi_prev, tol, tally)
        d = (gp - gm) / (2.0 * h)
        if d == 0:
            raise IterationError(f"flat determinant factor at n = {n}")
        step = g0 / d
        if abs(step) > n / 4.0:
            step *= (n / 4.0) / abs(step)
        lam = lam - step
        if abs(lam - sigma) > n:
            raise IterationError(f"gap root left the disc at n = {n}")
        if abs(step) <= tol_lam:
            return lam, it
    raise IterationError(f"gap-root Newton at n = {n} did not converge")


def gap_block(q: FourierPotential, n: int, tol: float = 1e-12) -> BlockData:
    """Assemble the reduced data and gap roots at index n.

    Two Newton runs on lam - sigma_n - a_n(lam) -+ phi_n(lam), seeded at
    alpha_n +- phi_n(alpha_n), locate the roots; when |c_n c_{-n}| falls
    under COLLAPSE_PRODUCT both collapse onto alpha_n instead (the branch of
    the square root stops being trackable there, and the roots agree to far
    better than solver tolerance anyway).
    """
    q0 = q.without_mean()
    mean = complex(q.mean)
    sigma = n * n * PI2
    tol_lam = tol * max(1, n * n)
    alpha, _, tally = _alpha_zero_mean(q0, n, tol)
    a_alpha, c_plus, c_minus, info = _reduced_entries(q0, n, alpha, tol)
    tally.add(info)
    # V e_{-n} carries the ascending coefficient ladder, so its solve holds
    # the mode +n entry whose leading term is q_{+n}; the e_n solve leads
    # with q_{-n}.  p_{+-n} must lead with q_{+-n} or the map below would
    # not be near-identity.
    p_plus, p_minus = c_minus, c_plus
    prod = c_plus * c_minus
    newton_iters = 0
    collapsed = abs(prod) < COLLAPSE_PRODUCT
    if collapsed:
        xi_a = xi_b = alpha
    else:
        phi0 = cmath.sqrt(prod)
        xi_a, it_a = _gap_root_newton(q0, n, sigma, alpha + phi0, 1.0, phi0,
                                      tol, tol_lam, tally)
        xi_b, it_b = _gap_root_newton(q0, n, sigma, alpha - phi0, -1.0, phi0,
                                      tol, tol_lam, tally)
        newton_iters = it_a + it_b
    xi_minus, xi_plus = _lex_order(xi_a, xi_b)
    diag = BlockDiagnostics(tally.iters, newton_iters, tally.resid,
                            tally.rate, tally.lost, collapsed)
    return BlockData(n, alpha + mean, a_alpha, p_plus, p_minus,
                     xi_minus + mean, xi_plus + mean, xi_plus - xi_minus, diag)


def gap_roots(q: FourierPotential, n: int,
              tol: float = 1e-12) -> tuple[complex, complex, complex]:
    """Roots xi_-+ of the reduced determinant near sigma_n, lexicographically
    ordered, and the gap length gamma_n = xi_+ - xi_-."""
    block = gap_block(q, n, tol)
    return block.xi_minus, block.xi_plus, block.gamma_n


def adapted_map(q: FourierPotential, m: int | None = None,
                M_thresh: int | None = None, tol: float = 1e-12, *,
                K_out: int | None = None,
                diagnostics: dict[int, SolveInfo] | None = None) -> FourierPotential:
    """Replace the Fourier modes |n| >= M_thresh by adapted coefficients.

    Returns p with p_n = q_n for |n| < M_thresh and p_{+-n} = c_{-+n}(alpha_n)
    above.  m is the ball parameter (4 ||q|| <= m required) and the threshold
    must sit past the ball; both default from ||q||.  K_out widens the output
    window past the support of q, so the adapted band is present even for
    trigonometric polynomials; pass ``diagnostics`` a dict to collect per-index
    solver tallies.
    """
    q0 = q.without_mean()
    nq = q0.l2()
    if m is None:
        m = max(1, math.ceil(4.0 * nq))
    if 4.0 * nq > m:
        raise ContractionError(f"4 ||q|| = {4 * nq:.6g} exceeds the ball size m = {m}")
    if M_thresh is None:
        M_thresh = max(m + 1, 8)
    if M_thresh < m + 1:
        raise DomainError(f"threshold {M_thresh} sits inside the ball of size {m}")
    if K_out is None:
        K_out = max(q.K, M_thresh + 7)
    coeffs: dict[int, complex] = {}
    for nn in range(1, M_thresh):
        for s in (nn, -nn):
            z = q0.coeff(s)
            if z != 0:
                coeffs[s] = z
    for nn in range(M_thresh, K_out + 1):
        alpha, _, tally = _alpha_zero_mean(q0, nn, tol)
        _, c_plus, c_minus, info = _reduced_entries(q0, nn, alpha, tol)
        tally.add(info)
        # same ladder fact as in gap_block: the e_{-n} solve leads with q_{+n}
        coeffs[nn] = c_minus
        coeffs[-nn] = c_plus
        if diagnostics is not None:
            diagnostics[nn] = SolveInfo(tally.iters, tally.resid, tally.rate,
                                        tally.lost)
    return make_fourier(coeffs, mean=q.mean, K=K_out)


def invert_adapted_map(p: FourierPotential, m: int | None = None,
                       M_thresh: int | None = None, tol: float = 1e-12,
                       max_iter: int = 48) -> MapResult:
    """Invert the adapted-coefficient map by iterating q <- q - (Phi(q) - p).

    The derivative of Phi stays within 1/8 of the identity on the admissible
    ball, so the iteration contracts at about that rate; a measured rate above
    0.9 aborts.  m and M_thresh must match the forward map; by default they
    come from ||p|| through the same formulas.
    """
    if m is None:
        m = max(1, math.ceil(4.0 * p.without_mean().l2()))
    if M_thresh is None:
        M_thresh = max(m + 1, 8)
    q = p
    prev = None
    rate = 0.0
    for it in range(max_iter):
        phi = adapted_map(q, m, M_thresh, tol, K_out=p.K)
        diff = phi.data - p.data
        diff_mean = complex(phi.mean) - complex(p.mean)
        resid = math.sqrt(float(np.sum(np.abs(diff) ** 2)) + abs(diff_mean) ** 2)
        if prev is not None:
            rate = resid / prev
            if rate > 0.9 and resid > 10.0 * tol:
                raise IterationError(f"inverse iteration diverging: rate {rate:.3g}")
        if resid <= tol:
            return MapResult(q, resid, it, rate)
        q = FourierPotential(q.K, q.data - diff, complex(q.mean) - diff_mean)
        prev = resid
    raise IterationError(f"inverse iteration not converged in {max_iter} rounds")


def n_gap_approximant(q: FourierPotential, N: int, m: int | None = None,
                      M_thresh: int | None = None, tol: float = 1e-12, *,
                      K_out: int | None = None) -> FourierPotential:
    """A nearby potential whose gaps above index N are collapsed.

    Pushes q through the adapted map, truncates to |n| <= N, and inverts.
    N must reach the adapted threshold; below it the map keeps plain Fourier
    modes and truncating there would not close any gap.
    """
    nq = q.without_mean().l2()
    if m is None:
        m = max(1, math.ceil(4.0 * nq))
    if M_thresh is None:
        M_thresh = max(m + 1, 8)
    if N < M_thresh:
        raise DomainError(f"N = {N} below the adapted threshold {M_thresh}")
    p = adapted_map(q, m, M_thresh, tol, K_out=K_out)
    return invert_adapted_map(truncate(p, N), m, M_thresh, tol).q


def c_series_terms(q: FourierPotential, n: int, lam: complex,
                   nu_max: int) -> list[complex]:
    """First nu_max + 1 series terms of the off-diagonal entry: the mode -n
    coefficients of T_n^nu V e_n for nu = 0..nu_max.

    Partial sums approach the resolvent value c_plus geometrically in the
    contraction factor.  The window is sized so every term is held exactly.
    """
    _require_zero_mean(q)
    if nu_max < 0:
        raise DomainError("nu_max must be >= 0")
    _require_in_strip(n, lam)
    mcut = n + 2 * q.K * (nu_max + 1) + 8
    f = multiply_by_potential(q, unit_vector(n, mcut))
    terms = [f.coeff(-n)]
    for _ in range(nu_max):
        f = apply_Tn(q, n, lam, f)
        terms.append(f.coeff(-n))
    return terms
