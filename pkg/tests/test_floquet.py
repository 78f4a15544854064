"""Monodromy integrators, discriminant roots, and the oracle gap records."""

import cmath
import math

import pytest

from hillgap.floquet import (
    default_steps,
    delta_linear_model,
    discriminant,
    gap_record,
    monodromy,
    periodic_eigs,
    periodic_eigs_info,
    sturm_liouville_eig,
)
from hillgap.seqspace import make_fourier, make_gasymov, make_mathieu

PI2 = math.pi ** 2

FREE = make_fourier({}, K=1)


def _free_entries(lam):
    # y1 = cos(s x), y2 = sin(s x)/s with s = sqrt(lam); branch-independent
    s = cmath.sqrt(lam)
    return cmath.cos(s), cmath.sin(s) / s, -s * cmath.sin(s), cmath.cos(s)


def _model_gamma(info):
    return 2 * cmath.sqrt(-2 * info["dip"] / info["curvature"])


def test_free_monodromy_entries():
    # rk4 carries its h^4 global error; the series integrator sits at roundoff
    for lam in (1.0, 10.0, 100.0, -4.0, 2.0 + 3.0j):
        y1, y2, dy1, dy2 = _free_entries(lam)
        for method, tol in (("rk4", 1e-8), ("taylor", 1e-12)):
            m = monodromy(FREE, lam, method=method)
            assert m.y1 == pytest.approx(y1, abs=tol)
            assert m.y2 == pytest.approx(y2, abs=tol)
            assert m.dy1 == pytest.approx(dy1, abs=10 * tol)
            assert m.dy2 == pytest.approx(dy2, abs=tol)


def test_free_discriminant_sample_grid():
    for k in range(20):
        lam = 0.5 + 7.5 * k
        expect = 2 * cmath.cos(cmath.sqrt(lam))
        assert discriminant(FREE, lam, method="rk4") == pytest.approx(expect, abs=1e-8)
        assert discriminant(FREE, lam, method="taylor") == pytest.approx(expect, abs=1e-10)


def test_determinant_is_one():
    q = make_mathieu(1.0)
    g = make_gasymov([1.0, 0.5j])
    for lam in (2.0, 40.0, 250.0, -7.0, 30.0 + 11.0j):
        for method in ("rk4", "taylor"):
            assert abs(monodromy(q, lam, method=method).det() - 1.0) < 1e-10
            assert abs(monodromy(g, lam, method=method).det() - 1.0) < 1e-10


def test_rk4_step_halving_on_trace():
    q = make_mathieu(1.0)
    lam = 20.0
    traces = [monodromy(q, lam, steps, method="rk4").trace()
              for steps in (128, 256, 512, 4096)]
    e1 = abs(traces[0] - traces[3])
    e2 = abs(traces[1] - traces[3])
    e3 = abs(traces[2] - traces[3])
    assert math.log2(e1 / e2) > 3.5
    assert math.log2(e2 / e3) > 3.5


def test_taylor_matches_rk4():
    q = make_mathieu(1.0)
    g = make_gasymov([1.0, 0.5])
    for lam in (3.0, 97.2, 200.5, 15.0 - 4.0j):
        assert discriminant(q, lam, method="taylor") == pytest.approx(
            discriminant(q, lam, method="rk4"), abs=1e-8)
        assert discriminant(g, lam, method="taylor") == pytest.approx(
            discriminant(g, lam, method="rk4"), abs=1e-8)


def test_mp_matches_double():
    assert discriminant(FREE, 100.0, dps=30) == pytest.approx(2 * math.cos(10.0), abs=1e-13)
    q = make_mathieu(1.0)
    assert discriminant(q, 50.5, dps=30) == pytest.approx(
        discriminant(q, 50.5, method="taylor"), abs=1e-10)


def test_monodromy_validation():
    with pytest.raises(ValueError):
        monodromy(FREE, 10.0, method="midpoint")
    with pytest.raises(ValueError):
        # 16 steps under-resolve the oscillation at lam = 400
        monodromy(FREE, 400.0, 16, method="rk4")
    assert default_steps(400.0) == 320 * 7


def test_free_eigenvalues_both_integrators():
    for n in range(1, 13):
        for method in ("taylor", "rk4"):
            lm, lp = periodic_eigs(FREE, n, method=method)
            assert lm == lp
            assert abs(lm - n * n * PI2) <= 1e-9 * n * n * PI2


def test_mean_shift():
    q = make_fourier({}, mean=5.0, K=1)
    lm, lp = periodic_eigs(q, 2, method="taylor")
    assert lm == pytest.approx(4 * PI2 + 5.0, rel=1e-9)
    assert lm == lp


def test_free_boundary_eigenvalues():
    for n in range(1, 7):
        for alpha in (0.0, math.pi / 2):
            sigma = sturm_liouville_eig(FREE, n, alpha)
            assert sigma == pytest.approx(n * n * PI2, rel=1e-9)


def test_index_validation():
    with pytest.raises(ValueError):
        periodic_eigs(FREE, 0)
    with pytest.raises(ValueError):
        sturm_liouville_eig(FREE, 0)


def test_mathieu_first_pair_frozen():
    q = make_mathieu(1.0)
    lm, lp = periodic_eigs(q, 1, dps=45)
    assert lm.real == pytest.approx(9.366458121553913, rel=1e-12)
    assert lp.real == pytest.approx(10.366418022026322, rel=1e-12)
    assert lm.imag == 0.0 and lp.imag == 0.0


def test_mathieu_deep_gaps_frozen():
    # the returned pair is rounded to doubles, so once a gap falls near the
    # ulp of n^2 pi^2 the subtraction loses digits; the dip model keeps them
    frozen = {
        3: 4.009948292201571e-05,
        4: 5.6431406037943405e-08,
        5: 4.4669922667839324e-11,
    }
    q = make_mathieu(1.0)
    for n, gamma in frozen.items():
        lm, lp, info = periodic_eigs_info(q, n, dps=45)
        assert info["resolved"]
        assert info["gamma_floor"] < 1e-17
        assert _model_gamma(info) == pytest.approx(gamma, rel=1e-9)
    # pair subtraction still carries the leading digits of the widest one
    assert (lp - lm).real == pytest.approx(frozen[5], rel=1e-2)


def test_collapse_below_tolerance():
    # gamma_6 ~ 2.3e-14 sits under tol * n^2, so the pair is reported closed
    q = make_mathieu(1.0)
    lm, lp = periodic_eigs(q, 6, tol=1e-12, dps=45)
    assert lm == lp


def test_auto_escalation_policy():
    q = make_mathieu(1.0)
    _, _, info1 = periodic_eigs_info(q, 1)
    assert info1["method"] == "taylor" and info1["resolved"]
    _, _, info3 = periodic_eigs_info(q, 3)
    assert info3["method"] == "mp30" and info3["resolved"]


def test_discriminant_at_gap_roots():
    q = make_mathieu(1.0)
    for n, target in ((1, -2.0), (2, 2.0)):
        lm, lp = periodic_eigs(q, n)
        assert discriminant(q, lm, method="taylor") == pytest.approx(target, abs=1e-8)
        assert discriminant(q, lp, method="taylor") == pytest.approx(target, abs=1e-8)


def test_gasymov_gap_closes():
    g = make_gasymov([1.0])
    lm, lp, info = periodic_eigs_info(g, 2)
    assert info["method"] == "mp30"
    assert not info["resolved"]
    assert abs(lp - lm) <= 1e-7


def test_scipy_mathieu_cross_check():
    special = pytest.importorskip("scipy.special")
    # -y'' + mu cos(2 pi x) y = lam y maps onto the Mathieu standard form
    # with parameter mu / (2 pi^2) and eigenvalues lam / pi^2
    q = make_mathieu(1.0)
    par = 1.0 / (2 * PI2)
    for n in range(1, 5):
        lm, lp = periodic_eigs(q, n)
        assert lm.real == pytest.approx(PI2 * special.mathieu_b(n, par), rel=1e-9)
        assert lp.real == pytest.approx(PI2 * special.mathieu_a(n, par), rel=1e-9)


def test_conjugation_covariance():
    q = make_fourier({1: 0.3 + 0.4j, -1: 0.1 - 0.2j, 2: 0.05j, -2: -0.02 + 0j})
    qs = make_fourier({1: 0.1 + 0.2j, -1: 0.3 - 0.4j, 2: -0.02 + 0j, -2: -0.05j})
    lam = 3.0 + 0.7j
    left = discriminant(qs, lam.conjugate(), method="taylor")
    right = discriminant(q, lam, method="taylor").conjugate()
    assert left == pytest.approx(right, abs=1e-12)


def test_gap_record_consistency():
    q = make_mathieu(0.5)
    for n in (1, 2):
        rec = gap_record(q, n)
        assert rec.gamma == rec.lam_plus - rec.lam_minus
        assert rec.tau == (rec.lam_plus + rec.lam_minus) / 2
        assert rec.delta == rec.sigma - rec.tau
        assert rec.triangle == abs(rec.gamma) + abs(rec.delta)
        # real potential: the Dirichlet eigenvalue sits inside the closed gap
        assert rec.lam_minus.real - 1e-9 <= rec.sigma.real <= rec.lam_plus.real + 1e-9
        assert abs(rec.sigma.imag) < 1e-9


def test_delta_linear_model():
    fit = delta_linear_model(make_mathieu(0.5), (2, 4))
    assert not fit.degenerate
    assert abs(fit.kappa) == pytest.approx(0.5, abs=0.01)
    assert fit.max_ratio < 1e-3


def test_delta_linear_model_degenerate_and_validation():
    fit = delta_linear_model(FREE, (1, 2))
    assert fit.degenerate
    assert fit.kappa == 0j
    with pytest.raises(ValueError):
        delta_linear_model(make_mathieu(0.5), (0, 3))
    with pytest.raises(ValueError):
        delta_linear_model(make_mathieu(0.5), (3, 2))
    with pytest.raises(ValueError):
        delta_linear_model(make_mathieu(0.5), (2, 5), M_thresh=4)
