"""Potentials as Fourier windows and 2-periodic coefficient vectors.

A potential q = sum_n q_n e^{2 pi i n x} lives on the integer modes inside a
finite window |n| <= K, with the mean q_0 stored separately (the block solver
works with mean-zero potentials and the mean shifts the whole spectrum).  The
2-periodic side uses modes e_m = e^{i pi m x}; multiplication by q shifts m by
2k, so the even and odd sublattices never mix and a coefficient vector carries
a fixed parity.  Weighted norms follow ||q||_w^2 = sum w(n)^2 |q_n|^2, with
half-integer weight arguments (m/2) on the 2-periodic side.

All values are immutable in use; convolutions account for the l2 mass they
drop at the window edge instead of truncating silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .weights import Weight

# Conjugate-symmetry slack under which a coefficient window counts as real.
_REAL_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class FourierPotential:
    """1-periodic potential on modes e^{2 pi i n x}, |n| <= K, mean kept aside.

    ``data[K + n]`` holds q_n; the n = 0 slot stays zero and ``mean`` carries
    q_0.  ``is_real`` records conjugate symmetry q_{-n} = conj(q_n) (and a real
    mean) within 1e-14.
    """

    K: int
    data: np.ndarray
    mean: complex = 0j
    is_real: bool = False

    def __post_init__(self) -> None:
        if self.K < 0:
            raise ValueError("window size K must be >= 0")
        if self.data.shape != (2 * self.K + 1,):
            raise ValueError("coefficient array must have length 2K+1")
        if abs(self.data[self.K]) != 0.0:
            raise ValueError("mode 0 belongs in the mean field")
        if self.is_real and not _is_conjugate_symmetric(self.data, self.mean):
            raise ValueError("is_real set but coefficients are not conjugate-symmetric")

    def coeff(self, n: int) -> complex:
        """q_n, with q_0 = mean and 0 outside the window."""
        if n == 0:
            return complex(self.mean)
        if abs(n) > self.K:
            return 0j
        return complex(self.data[self.K + n])

    def modes(self):
        """Yield (n, q_n) over nonzero windowed coefficients, n ascending."""
        for j, z in enumerate(self.data):
            if z != 0:
                yield j - self.K, complex(z)

    def without_mean(self) -> "FourierPotential":
        if self.mean == 0:
            return self
        return FourierPotential(self.K, self.data, 0j, self.is_real)

    def l2(self) -> float:
        """Plain l2 norm including the mean term."""
        return math.sqrt(float(np.sum(np.abs(self.data) ** 2)) + abs(self.mean) ** 2)


def _is_conjugate_symmetric(data: np.ndarray, mean: complex) -> bool:
    if abs(mean.imag) > _REAL_TOL:
        return False
    return bool(np.all(np.abs(data - np.conj(data[::-1])) <= _REAL_TOL))


def make_fourier(coeffs: dict[int, complex], mean: complex = 0j,
                 K: int | None = None, is_real: bool | None = None) -> FourierPotential:
    """Potential from a mode map {n: q_n}; reality is detected unless forced.

    Args:
        coeffs: nonzero modes, any n != 0 (a 0 key is folded into the mean).
        mean: q_0.
        K: window size; defaults to the largest |n| present.
        is_real: override the conjugate-symmetry detection.
    """
    coeffs = dict(coeffs)
    mean = complex(mean) + complex(coeffs.pop(0, 0j))
    span = max((abs(n) for n in coeffs), default=0)
    if K is None:
        K = span
    elif K < span:
        raise ValueError(f"window K = {K} cannot hold mode {span}")
    data = np.zeros(2 * K + 1, dtype=np.complex128)
    for n, z in coeffs.items():
        data[K + n] = complex(z)
    if is_real is None:
        is_real = _is_conjugate_symmetric(data, mean)
    return FourierPotential(K, data, mean, bool(is_real))


def make_mathieu(mu: float) -> FourierPotential:
    """q = mu cos(2 pi x): the two modes q_{+-1} = mu/2."""
    if mu == 0:
        return make_fourier({}, K=1)
    return make_fourier({1: mu / 2, -1: mu / 2})


def make_gasymov(coeffs: list[complex]) -> FourierPotential:
    """One-sided potential sum_{n>=1} q_n e^{2 pi i n x}; every gap collapses."""
    modes = {n: complex(z) for n, z in enumerate(coeffs, start=1) if z != 0}
    return make_fourier(modes, K=len(coeffs) if coeffs else 0, is_real=not modes)


def make_random(decay: Weight, seed: int, K: int, real: bool = True) -> FourierPotential:
    """Random potential q_n = zeta_n / decay(n), zeta_n uniform on the unit disc.

    Draws run over n = 1..K in order (two uniforms per mode, radius then angle;
    the negative side draws after the positive one when not conjugate-forced),
    so a seed pins the potential bit-for-bit.
    """
    rng = np.random.default_rng(seed)
    modes: dict[int, complex] = {}
    for n in range(1, K + 1):
        zeta = _disc_point(rng)
        modes[n] = zeta / decay(n)
        if real:
            modes[-n] = np.conj(modes[n])
        else:
            modes[-n] = _disc_point(rng) / decay(n)
    return make_fourier(modes, K=K, is_real=real)


def _disc_point(rng: np.random.Generator) -> complex:
    radius = math.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2.0 * math.pi)
    return radius * complex(math.cos(angle), math.sin(angle))


def wnorm(q: FourierPotential, w: Weight) -> float:
    """||q||_w = (sum w(n)^2 |q_n|^2)^{1/2}, mean term included at n = 0."""
    total = abs(q.mean) ** 2  # w(0) = 1
    for n, z in q.modes():
        wn = w(n)
        if math.isinf(wn):
            return math.inf
        total += (wn * abs(z)) ** 2
    return math.sqrt(total)


def tail(q: FourierPotential, N: int) -> FourierPotential:
    """High-mode part sum_{|n| >= N} q_n e^{2 pi i n x} (drops the mean for N >= 1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    data = q.data.copy()
    lo = max(0, q.K - (N - 1))
    hi = min(2 * q.K + 1, q.K + N)
    data[lo:hi] = 0
    return FourierPotential(q.K, data, 0j, _is_conjugate_symmetric(data, 0j))


def truncate(q: FourierPotential, N: int) -> FourierPotential:
    """Low-mode part: keeps |n| <= N (and the mean), zeroes the rest."""
    if N < 0:
        raise ValueError("N must be >= 0")
    data = q.data.copy()
    data[:max(0, q.K - N)] = 0
    data[q.K + N + 1:] = 0
    return FourierPotential(q.K, data, q.mean, _is_conjugate_symmetric(data, q.mean))


@dataclass(frozen=True, eq=False)
class ParityVector:
    """Coefficients f_m on e_m = e^{i pi m x} for m of one parity, |m| <= mcut.

    ``data[j]`` holds the mode m = -mcut + 2j, so the array has mcut + 1
    entries; ``mcut`` always matches the parity.  ``lost`` accumulates the l2
    mass dropped by window truncation in the operations that produced this
    vector.
    """

    parity: int
    mcut: int
    data: np.ndarray
    lost: float = 0.0

    def __post_init__(self) -> None:
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if self.mcut < 0 or self.mcut % 2 != self.parity:
            raise ValueError("mcut must be >= 0 and match the parity")
        if self.data.shape != (self.mcut + 1,):
            raise ValueError("coefficient array must have length mcut + 1")

    def index(self, m: int) -> int:
        if abs(m) % 2 != self.parity:
            raise ValueError(f"mode {m} has the wrong parity")
        if abs(m) > self.mcut:
            raise ValueError(f"mode {m} outside the window")
        return (m + self.mcut) // 2

    def coeff(self, m: int) -> complex:
        if abs(m) > self.mcut:
            return 0j
        return complex(self.data[self.index(m)])

    def modes(self) -> np.ndarray:
        """The mode indices m, aligned with data."""
        return np.arange(-self.mcut, self.mcut + 1, 2)

    def l2(self) -> float:
        return float(np.linalg.norm(self.data))


def zero_vector(parity: int, mcut: int) -> ParityVector:
    mcut = _fit_parity(parity, mcut)
    return ParityVector(parity, mcut, np.zeros(mcut + 1, dtype=np.complex128))


def unit_vector(m: int, mcut: int) -> ParityVector:
    """The basis vector e_m inside a window of cap mcut."""
    parity = abs(m) % 2
    mcut = _fit_parity(parity, mcut)
    data = np.zeros(mcut + 1, dtype=np.complex128)
    data[(m + mcut) // 2] = 1.0
    return ParityVector(parity, mcut, data)


def _fit_parity(parity: int, mcut: int) -> int:
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    return mcut if mcut % 2 == parity else mcut - 1


def shifted_wnorm(f: ParityVector, w: Weight, i: int) -> float:
    """||f e_i||_w: the w-norm with every index re-centered by i, at weight
    arguments (m + i)/2 on the half-integer lattice."""
    total = 0.0
    for m, z in zip(f.modes(), f.data):
        if z == 0:
            continue
        wv = w((int(m) + i) / 2)
        if math.isinf(wv):
            return math.inf
        total += (wv * abs(z)) ** 2
    return math.sqrt(total)


def multiply_by_potential(q: FourierPotential, f: ParityVector) -> ParityVector:
    """(V f)_m = sum_k q_k f_{m-2k} (k = 0 contributes mean * f_m).

    The support widens by 2K and is folded back to the input window; the l2
    mass of the dropped edge modes is added to ``lost``.
    """
    kernel = q.data.copy()
    kernel[q.K] = q.mean
    # modes of f step by 2; a shift by 2k is one lattice step per k
    wide = np.convolve(kernel, f.data)
    # wide[j] is the mode m = -mcut - 2K + 2j
    drop = q.K
    kept = wide[drop:drop + f.mcut + 1]
    dropped = float(np.linalg.norm(wide[:drop]) ** 2
                    + np.linalg.norm(wide[drop + f.mcut + 1:]) ** 2)
    return ParityVector(f.parity, f.mcut, np.ascontiguousarray(kept),
                        f.lost + math.sqrt(dropped))
