"""Floquet oracle: monodromy, discriminant, and eigenvalue solvers.

Ground truth for the spectrum of -y'' + q y = lambda y with 1-periodic q comes
from transporting the fundamental solution matrix over one period and reading
the discriminant Delta(lambda) = y1(1) + y2'(1).  Periodic (n even) and
antiperiodic (n odd) eigenvalues solve Delta = (-1)^n 2; Sturm-Liouville
eigenvalues solve a boundary form built from one column.

Three integrator paths share the fixed-step, reproducible design:

  * classical RK4 in double precision (the default for ``monodromy``),
  * a fixed-step Taylor-series integrator in double precision whose error sits
    at the roundoff floor (~1e-15 on the trace) instead of the RK4 truncation
    bias (~5e-11 at the default step rule),
  * the same Taylor scheme in mpmath arbitrary precision for gaps far below
    double resolution.

Near a spectral gap the discriminant is almost a parabola touching +-2, so the
eigenvalue solver first locates the critical point by Newton on Delta', then
uses the quadratic model gamma = 2 sqrt(-2 D*/Delta'') to seed and polish the
two roots (the second deflated by the first).  A gap is reported collapsed
when the model separation falls under the tolerance; when the dip D* drowns in
integrator noise the pair is returned at the model positions and flagged
unresolved in the diagnostics, which the "auto" method escalates to mpmath.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .seqspace import FourierPotential

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal dependency
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f

# Step-count multipliers: the RK4 default keeps det(M) - 1 under 1e-10, the
# enforced minimum only resolves the oscillation.
RK4_STEP_FACTOR = 320
MIN_STEP_FACTOR = 64
_TAYLOR_ORDER = 22          # double path: series truncation below roundoff
_TAYLOR_NOISE = 1e-14       # double path: trace roundoff floor estimate
_RESOLVE_MARGIN = 100.0     # dip must exceed noise by this factor to count
_AUTO_DIP_FACTOR = 1e6      # auto keeps a double result only above this dip
_DEFAULT_DPS = 45
_AUTO_DPS = 30              # escalation precision when the caller names none


class RootSearchError(RuntimeError):
    """An eigenvalue Newton run stagnated or left its search region."""


@dataclass(frozen=True)
class MonodromyMatrix:
    """Fundamental matrix at x = 1; columns start as (1, 0) and (0, 1)."""

    y1: complex
    dy1: complex
    y2: complex
    dy2: complex

    def trace(self) -> complex:
        return self.y1 + self.dy2

    def det(self) -> complex:
        return self.y1 * self.dy2 - self.y2 * self.dy1


@dataclass(frozen=True)
class GapRecord:
    """Oracle-level spectral data at one index n.

    gamma = lam_plus - lam_minus, tau is the gap midpoint, sigma the
    Sturm-Liouville eigenvalue of the requested boundary angle, delta =
    sigma - tau, and triangle = |gamma| + |delta| measures the whole spectral
    triangle in the complex case.
    """

    n: int
    lam_minus: complex
    lam_plus: complex
    gamma: complex
    tau: complex
    sigma: complex
    delta: complex
    triangle: float


@dataclass(frozen=True)
class DeltaFit:
    """Least-squares kappa for delta_n ~ kappa p_n + conj(kappa) p_{-n}."""

    kappa: complex
    max_ratio: float
    degenerate: bool = False


def default_steps(lam: complex, factor: int = RK4_STEP_FACTOR) -> int:
    """Fixed-step count scaled to the oscillation sqrt(lam) over one period."""
    return factor * max(1, math.ceil(math.sqrt(abs(lam)) / math.pi))


# ---------------------------------------------------------------------------
# double-precision kernels


@njit(cache=True)
def _rk4_kernel(qs, lam, steps, h):
    y11 = 1.0 + 0j
    y12 = 0.0 + 0j
    y21 = 0.0 + 0j
    y22 = 1.0 + 0j
    for j in range(steps):
        a0 = qs[2 * j] - lam
        am = qs[2 * j + 1] - lam
        a1 = qs[2 * j + 2] - lam
        k1y = y12
        k1p = a0 * y11
        k2y = y12 + 0.5 * h * k1p
        k2p = am * (y11 + 0.5 * h * k1y)
        k3y = y12 + 0.5 * h * k2p
        k3p = am * (y11 + 0.5 * h * k2y)
        k4y = y12 + h * k3p
        k4p = a1 * (y11 + h * k3y)
        n11 = y11 + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        n12 = y12 + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        k1y = y22
        k1p = a0 * y21
        k2y = y22 + 0.5 * h * k1p
        k2p = am * (y21 + 0.5 * h * k1y)
        k3y = y22 + 0.5 * h * k2p
        k3p = am * (y21 + 0.5 * h * k2y)
        k4y = y22 + h * k3p
        k4p = a1 * (y21 + h * k3y)
        y21 = y21 + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        y22 = y22 + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        y11 = n11
        y12 = n12
    return y11, y12, y21, y22


@njit(cache=True)
def _taylor_kernel(C, lam, steps, h, order):
    y11 = 1.0 + 0j
    y12 = 0.0 + 0j
    y21 = 0.0 + 0j
    y22 = 1.0 + 0j
    a = np.empty(order + 3, dtype=np.complex128)
    for j in range(steps):
        for col in range(2):
            if col == 0:
                a[0] = y11
                a[1] = y12
            else:
                a[0] = y21
                a[1] = y22
            for m in range(order + 1):
                s = -lam * a[m]
                top = m if m < order else order
                for i in range(top + 1):
                    s += C[j, i] * a[m - i]
                a[m + 2] = s / ((m + 1.0) * (m + 2.0))
            y = a[order + 2]
            yp = (order + 2.0) * a[order + 2]
            for m in range(order + 1, 0, -1):
                y = y * h + a[m]
                yp = yp * h + m * a[m]
            y = y * h + a[0]
            if col == 0:
                y11 = y
                y12 = yp
            else:
                y21 = y
                y22 = yp
    return y11, y12, y21, y22


def _key(q: FourierPotential):
    return (q.K, q.data.tobytes(), complex(q.mean))


@lru_cache(maxsize=32)
def _rk4_samples(key, steps):
    # potential sampled at the step points and midpoints, mean included
    K, data_bytes, mean = key
    coeffs = np.frombuffer(data_bytes, dtype=np.complex128)
    x = np.arange(2 * steps + 1) * (0.5 / steps)
    modes = np.arange(-K, K + 1)
    qs = np.exp(2j * np.pi * np.outer(x, modes)) @ coeffs + mean
    return np.ascontiguousarray(qs)


@lru_cache(maxsize=32)
def _taylor_table(key, steps, order):
    # C[j, i] = i-th Taylor coefficient of q at x = j/steps
    K, data_bytes, mean = key
    coeffs = np.frombuffer(data_bytes, dtype=np.complex128)
    modes = np.arange(-K, K + 1)
    x = np.arange(steps) / steps
    phases = np.exp(2j * np.pi * np.outer(x, modes)) * coeffs  # (steps, modes)
    z = 2j * np.pi * modes
    powers = np.ones((order + 1, len(modes)), dtype=np.complex128)
    for i in range(1, order + 1):
        powers[i] = powers[i - 1] * z / i
    C = np.ascontiguousarray(phases @ powers.T)
    C[:, 0] += mean
    return C


def _taylor_steps(lam: complex) -> int:
    return max(16, int(math.ceil(math.sqrt(abs(lam)))) + 8)


def _monodromy_rk4(q: FourierPotential, lam: complex, steps: int) -> MonodromyMatrix:
    qs = _rk4_samples(_key(q), steps)
    y11, y12, y21, y22 = _rk4_kernel(qs, complex(lam), steps, 1.0 / steps)
    return MonodromyMatrix(y11, y12, y21, y22)


def _monodromy_taylor(q: FourierPotential, lam: complex,
                      steps: int | None = None) -> MonodromyMatrix:
    if steps is None:
        steps = _taylor_steps(lam)
    C = _taylor_table(_key(q), steps, _TAYLOR_ORDER)
    y11, y12, y21, y22 = _taylor_kernel(C, complex(lam), steps, 1.0 / steps,
                                        _TAYLOR_ORDER)
    return MonodromyMatrix(y11, y12, y21, y22)


# ---------------------------------------------------------------------------
# mpmath kernel


def _mp_order(dps: int) -> int:
    # with steps ~ 4 sqrt(lam) the per-step series argument stays under 1/4,
    # so this order pushes truncation beyond the working precision
    return max(28, int(0.55 * dps) + 8)


def _mp_factor(dps: int) -> float:
    # pick h sqrt(lam) = c per step so that c^(order+1)/(order+1)! stays two
    # orders of magnitude under the precision's noise floor
    order = _mp_order(dps)
    log_c = (math.lgamma(order + 2) - (dps - 1) * math.log(10.0)
             - math.log(64.0)) / (order + 1)
    return min(4.0, max(0.5, math.exp(-log_c)))


def _mp_steps(lam, dps: int) -> int:
    factor = _mp_factor(dps)
    return max(16, int(math.ceil(factor * math.sqrt(abs(complex(lam))))) + 8)


@lru_cache(maxsize=8)
def _mp_table(key, steps, order, dps):
    K, data_bytes, mean = key
    coeffs = np.frombuffer(data_bytes, dtype=np.complex128)
    with mp.workdps(dps):
        two_pi_i = 2j * mp.pi
        table = []
        for j in range(steps):
            x0 = mp.mpf(j) / steps
            row = [mp.mpc(0)] * (order + 1)
            for idx, qk in enumerate(coeffs):
                if qk == 0:
                    continue
                k = idx - K
                term = mp.mpc(complex(qk)) * mp.e ** (two_pi_i * k * x0)
                zk = two_pi_i * k
                for i in range(order + 1):
                    row[i] += term
                    term = term * zk / (i + 1)
            row[0] += mp.mpc(complex(mean))
            table.append(row)
    return table


def _mp_kernel(table, lam, steps, order):
    # caller holds the working precision
    h = mp.mpf(1) / steps
    lam = mp.mpc(lam)
    y11, y12 = mp.mpc(1), mp.mpc(0)
    y21, y22 = mp.mpc(0), mp.mpc(1)
    for j in range(steps):
        c = table[j]
        out = []
        for y0, yp0 in ((y11, y12), (y21, y22)):
            a = [mp.mpc(0)] * (order + 3)
            a[0] = y0
            a[1] = yp0
            for m in range(order + 1):
                s = -lam * a[m]
                for i in range(min(m, order) + 1):
                    s += c[i] * a[m - i]
                a[m + 2] = s / ((m + 1) * (m + 2))
            y = a[order + 2]
            yp = (order + 2) * a[order + 2]
            for m in range(order + 1, 0, -1):
                y = y * h + a[m]
                yp = yp * h + m * a[m]
            y = y * h + a[0]
            out.append((y, yp))
        (y11, y12), (y21, y22) = out
    return y11, y12, y21, y22


def _monodromy_mp(q: FourierPotential, lam, steps: int, dps: int):
    order = _mp_order(dps)
    table = _mp_table(_key(q), steps, order, dps)
    with mp.workdps(dps):
        return _mp_kernel(table, lam, steps, order)


# ---------------------------------------------------------------------------
# public integrator surface


def monodromy(q: FourierPotential, lam: complex, steps: int | None = None,
              *, method: str = "rk4", dps: int | None = None) -> MonodromyMatrix:
    """Fundamental matrix of -y'' + q y = lam y over [0, 1].

    Args:
        q: potential; the mean participates in the integration.
        lam: spectral parameter, complex allowed.
        steps: fixed step count; defaults to the RK4 rule (320 per pi of
            oscillation) and must respect the 64-per-pi minimum.
        method: "rk4" (default, classical 4th order) or "taylor" (series
            integrator at the double roundoff floor).
        dps: if set, run the Taylor scheme in mpmath at that precision.
    """
    if dps is not None:
        y11, y12, y21, y22 = _monodromy_mp(q, lam, steps or _mp_steps(lam, dps), dps)
        return MonodromyMatrix(complex(y11), complex(y12), complex(y21), complex(y22))
    if method == "taylor":
        return _monodromy_taylor(q, lam, steps)
    if method != "rk4":
        raise ValueError(f"unknown integrator {method!r}")
    if steps is None:
        steps = default_steps(lam)
    elif steps < default_steps(lam, MIN_STEP_FACTOR):
        raise ValueError(f"steps = {steps} under-resolves the oscillation "
                         f"at |lam| = {abs(lam):.3g}")
    return _monodromy_rk4(q, lam, steps)


def discriminant(q: FourierPotential, lam: complex, steps: int | None = None,
                 *, method: str = "rk4", dps: int | None = None) -> complex:
    """Delta(lam) = y1(1) + y2'(1); equals 2 cos(sqrt(lam)) for q = 0."""
    return monodromy(q, lam, steps, method=method, dps=dps).trace()


# ---------------------------------------------------------------------------
# eigenvalue machinery


class _Disc:
    """One discriminant evaluation path, with its noise floor, for the solvers."""

    def __init__(self, q: FourierPotential, method: str, dps: int | None,
                 center: complex, steps: int | None = None):
        self.method = method
        self.dps = 0
        if method == "mp":
            self.dps = dps or _DEFAULT_DPS
            n_steps = steps or _mp_steps(center, self.dps)
            order = _mp_order(self.dps)
            table = _mp_table(_key(q), n_steps, order, self.dps)
            self.fn = lambda lam: _mp_kernel(table, lam, n_steps, order)
            self.noise = 10.0 ** (-(self.dps - 3))
        elif method == "taylor":
            n_steps = steps or _taylor_steps(center)
            table = _taylor_table(_key(q), n_steps, _TAYLOR_ORDER)
            self.fn = lambda lam: _taylor_kernel(table, complex(lam), n_steps,
                                                 1.0 / n_steps, _TAYLOR_ORDER)
            self.noise = _TAYLOR_NOISE
        elif method == "rk4":
            n_steps = steps or default_steps(center)
            key = _key(q)
            self.fn = lambda lam: _rk4_kernel(_rk4_samples(key, n_steps),
                                              complex(lam), n_steps, 1.0 / n_steps)
            # RK4 error is truncation bias, not roundoff
            self.noise = 1e-9
        else:
            raise ValueError(f"unknown oracle method {method!r}")

    def trace(self, lam) -> complex:
        y11, _, _, y22 = self.fn(lam)
        return y11 + y22

    def boundary(self, lam, alpha: float) -> complex:
        # u solves the ODE with (u, u')(0) = (-sin a, cos a); the form
        # u(1) cos a + u'(1) sin a vanishes at the eigenvalue
        y11, y12, y21, y22 = self.fn(lam)
        sa, ca = math.sin(alpha), math.cos(alpha)
        u1 = -sa * y11 + ca * y21
        du1 = -sa * y12 + ca * y22
        return u1 * ca + du1 * sa

    def sqrt(self, z):
        return mp.sqrt(z) if self.method == "mp" else cmath.sqrt(z)

    def fd_curvature_step(self, scale: float):
        if self.method == "mp":
            return mp.mpf(10) ** (-(self.dps // 4)) * scale
        return max(1e-5, 2e-4 * scale)

    def fd_slope_step(self, scale: float):
        if self.method == "mp":
            return mp.mpf(10) ** (-(self.dps // 3)) * scale
        return 1e-6 * scale


def _lex_pair(a: complex, b: complex):
    if (a.real, a.imag) <= (b.real, b.imag):
        return a, b
    return b, a


def _newton_critical(disc: _Disc, lam0, n: int, tol: float, max_iter: int = 40):
    """Newton on Delta' = 0 from lam0; returns (lam*, Delta(lam*), Delta'', iters)."""
    scale = max(1.0, float(n))
    h = disc.fd_curvature_step(scale)
    clip = 6.0 * scale
    lam = lam0
    prev_step = None
    for it in range(1, max_iter + 1):
        f0 = disc.trace(lam)
        fp = disc.trace(lam + h)
        fm = disc.trace(lam - h)
        d1 = (fp - fm) / (2 * h)
        d2 = (fp - 2 * f0 + fm) / (h * h)
        if d2 == 0:
            raise RootSearchError("flat discriminant curvature in critical-point search")
        step = d1 / d2
        if abs(step) > clip:
            step = step / abs(step) * clip
        lam = lam - step
        if abs(lam - lam0) > 12.0 * scale:
            raise RootSearchError("critical point escaped the search strip")
        a = abs(step)
        if a <= tol:
            return lam, disc.trace(lam), d2, it
        # finite-difference slopes bottom out above tol; a small step that
        # has stopped halving means we sit in the noise ball around lam*
        if prev_step is not None and 2.0 * a >= prev_step and a <= 1e-5 * scale:
            return lam, disc.trace(lam), d2, it
        prev_step = a
    raise RootSearchError("critical-point Newton did not converge")


def _newton_root(disc: _Disc, fun, seed, tol: float, scale: float,
                 deflate=None, max_iter: int = 30):
    """Damped Newton with finite-difference slope; keeps the best residual seen.

    With ``deflate`` set, iterates on fun(lam)/(lam - deflate) so the second
    root of a nearly-double pair does not slide back into the first.
    """
    h = disc.fd_slope_step(scale)

    def g(lam):
        f = fun(lam)
        if deflate is None:
            return f
        denom = lam - deflate
        return f / (denom if denom != 0 else h)

    lam = seed
    best = None
    floor = 10.0 * disc.noise
    for it in range(1, max_iter + 1):
        f = g(lam)
        af = abs(f)
        if best is None or af < best[0]:
            best = (af, lam, it)
        if af <= floor:
            break
        d = (g(lam + h) - g(lam - h)) / (2 * h)
        if d == 0:
            break
        step = f / d
        if abs(step) > scale:
            step = step / abs(step) * scale
        lam = lam - step
        if abs(step) <= tol * 1e-2:
            f = g(lam)
            if abs(f) < best[0]:
                best = (abs(f), lam, it)
            break
    return best[1], float(best[0]), best[2]


def _solve_pair(q: FourierPotential, n: int, tol: float, method: str,
                dps: int | None, steps: int | None = None, seed=None):
    """One gap: critical point, quadratic model, polished roots, diagnostics."""
    center = n * n * math.pi ** 2 + complex(q.mean)
    target = 2.0 if n % 2 == 0 else -2.0
    disc = _Disc(q, method, dps, center, steps)
    if method == "mp":
        with mp.workdps(disc.dps):
            return _solve_pair_inner(disc, n, center, target, tol, seed)
    return _solve_pair_inner(disc, n, center, target, tol, seed)


def _solve_pair_inner(disc: _Disc, n: int, center: complex, target: float,
                      tol: float, seed=None):
    tol_lam = tol * max(1, n * n)
    start = center if seed is None else seed
    lam_star, f_star, d2, its = _newton_critical(disc, start, n, tol_lam)
    dip = f_star - target
    resolved = abs(dip) >= _RESOLVE_MARGIN * disc.noise
    gamma_model = 2 * disc.sqrt(-2 * dip / d2)
    info = {
        "method": disc.method if disc.method != "mp" else f"mp{disc.dps}",
        "resolved": bool(resolved),
        "critical": complex(lam_star),
        "dip": complex(dip),
        "curvature": complex(d2),
        "gamma_floor": 2.0 * math.sqrt(abs(2.0 * _RESOLVE_MARGIN * disc.noise
                                           / complex(d2))),
        "iters": its,
        "resid": float(abs(complex(dip))),
    }
    # an unresolved dip is pure noise and would split the pair in a random
    # complex direction; the critical point itself stays accurate, so report
    # the gap as closed and leave the floor in the diagnostics
    if not resolved or abs(gamma_model) <= tol_lam:
        return complex(lam_star), complex(lam_star), info
    scale = max(1.0, float(n))
    fun = lambda lam: disc.trace(lam) - target
    r1, res1, it1 = _newton_root(disc, fun, lam_star - gamma_model / 2, tol_lam, scale)
    r2, res2, it2 = _newton_root(disc, fun, lam_star + gamma_model / 2, tol_lam, scale,
                                 deflate=r1)
    for r in (complex(r1), complex(r2)):
        if abs(r - center) > 12.0 * scale + 1.0:
            raise RootSearchError(f"gap root {r} escaped the strip around {center}")
    info["iters"] = its + it1 + it2
    info["resid"] = float(max(res1, res2 * abs(complex(r2) - complex(r1))))
    lm, lp = _lex_pair(complex(r1), complex(r2))
    return lm, lp, info


def periodic_eigs(q: FourierPotential, n: int, tol: float = 1e-12,
                  *, method: str = "auto", dps: int | None = None,
                  steps: int | None = None):
    """The two eigenvalues lam_n^- <= lam_n^+ near n^2 pi^2 + mean.

    Solves Delta(lam) = (-1)^n 2 as described in the module docstring; the
    pair comes back in lexicographic order (real part, then imaginary part)
    and coincides when the gap is collapsed below tol * max(1, n^2) or not
    resolved above the integrator's noise floor.

    method "auto" runs the double Taylor path first and escalates to the
    arbitrary-precision integrator (30 digits) unless the discriminant dip
    stands far enough above the double roundoff floor to trust the split;
    "rk4", "taylor", "mp" force one path.  ``dps`` pins the mpmath precision
    (and with method "auto" jumps straight to mpmath).
    """
    lm, lp, _ = periodic_eigs_info(q, n, tol, method=method, dps=dps, steps=steps)
    return lm, lp


def periodic_eigs_info(q: FourierPotential, n: int, tol: float = 1e-12,
                       *, method: str = "auto", dps: int | None = None,
                       steps: int | None = None):
    if n < 1:
        raise ValueError("gap index n must be >= 1")
    if dps is not None and method in ("auto", "mp"):
        return _solve_pair(q, n, tol, "mp", dps, steps)
    if method == "auto":
        lm, lp, info = _solve_pair(q, n, tol, "taylor", None, steps)
        # a dip barely above the resolve margin still costs relative accuracy
        # in the split; keep the double result only when it is comfortable
        if info["resolved"] and abs(info["dip"]) >= _AUTO_DIP_FACTOR * _TAYLOR_NOISE:
            return lm, lp, info
        # the double critical point seeds the high-precision run
        return _solve_pair(q, n, tol, "mp", _AUTO_DPS, None, seed=info["critical"])
    return _solve_pair(q, n, tol, method, dps, steps)


def sturm_liouville_eig(q: FourierPotential, n: int, alpha: float = 0.0,
                        tol: float = 1e-12, *, method: str = "taylor",
                        dps: int | None = None) -> complex:
    """Eigenvalue near n^2 pi^2 + mean for y cos(a) + y' sin(a) = 0 at both ends.

    alpha = 0 is Dirichlet, alpha = pi/2 is Neumann.  These roots are simple,
    so a plain Newton run from the asymptotic center converges without any
    critical-point preparation.
    """
    if n < 1:
        raise ValueError("index n must be >= 1")
    center = n * n * math.pi ** 2 + complex(q.mean)
    if dps is not None:
        method = "mp"
    disc = _Disc(q, method, dps, center)
    scale = max(1.0, float(n))
    fun = lambda lam: disc.boundary(lam, alpha)
    if method == "mp":
        with mp.workdps(disc.dps):
            root, _, _ = _newton_root(disc, fun, mp.mpc(center), tol * max(1, n * n), scale)
    else:
        root, _, _ = _newton_root(disc, fun, complex(center), tol * max(1, n * n), scale)
    root = complex(root)
    if abs(root - center) > 12.0 * scale + 1.0:
        raise RootSearchError(f"boundary eigenvalue {root} escaped the strip")
    return root


def gap_record(q: FourierPotential, n: int, alpha: float = 0.0,
               tol: float = 1e-12, *, method: str = "auto",
               dps: int | None = None) -> GapRecord:
    """Assemble the full oracle record (gap pair, midpoint, delta, triangle)."""
    lm, lp, _ = periodic_eigs_info(q, n, tol, method=method, dps=dps)
    sl_method = "mp" if (method == "mp" or dps is not None) else "taylor"
    sigma = sturm_liouville_eig(q, n, alpha, tol, method=sl_method, dps=dps)
    tau = (lm + lp) / 2
    gamma = lp - lm
    delta = sigma - tau
    return GapRecord(n, lm, lp, gamma, tau, sigma, delta, abs(gamma) + abs(delta))


def delta_linear_model(q: FourierPotential, n_range: tuple[int, int],
                       m: int | None = None, M_thresh: int | None = None,
                       tol: float = 1e-12, *, dps: int | None = None) -> DeltaFit:
    """Fit kappa in delta_n ~ kappa p_n + conj(kappa) p_{-n} over an index range.

    p_{+-n} are the adapted coefficients from the block decomposition and
    delta_n comes from the Dirichlet family; |kappa| lands near 1/2 for real
    potentials in the admissible range.  Diagnostic only: the fit is
    real-linear least squares in (Re kappa, Im kappa) and reports itself
    degenerate when every p vanishes.
    """
    from . import blockdecomp

    lo, hi = n_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad index range {n_range}")
    floor = max(m or 1, M_thresh or 1)
    if lo < floor:
        raise ValueError(f"range starts at {lo}, below the admissible floor {floor}")
    rows = []
    rhs = []
    samples = []
    for n in range(lo, hi + 1):
        block = blockdecomp.gap_block(q.without_mean(), n, tol)
        rec = gap_record(q, n, 0.0, tol, dps=dps)
        pn, pm = block.p_plus, block.p_minus
        samples.append((rec.delta, pn, pm))
        rows.append([(pn + pm).real, -(pn - pm).imag])
        rows.append([(pn + pm).imag, (pn - pm).real])
        rhs.append(rec.delta.real)
        rhs.append(rec.delta.imag)
    if not samples or max(abs(pn) + abs(pm) for _, pn, pm in samples) == 0.0:
        return DeltaFit(0j, math.nan, degenerate=True)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    kappa = complex(sol[0], sol[1])
    worst = 0.0
    for delta, pn, pm in samples:
        denom = abs(pn) + abs(pm)
        if denom == 0:
            continue
        model = kappa * pn + kappa.conjugate() * pm
        worst = max(worst, abs(delta - model) / denom)
    return DeltaFit(kappa, worst)
