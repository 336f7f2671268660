import math
import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from henonheights.exactring import Poly
from henonheights.ffheight import stabilize
from henonheights.henon import HenonFamily, InitialPoint, orbit_polys
from henonheights.localgreen import (M_n_values, MetricSetup, Place, G_P, asymptotic_constant,
                                     classify, convergence_gap, filtration_consts, green, in_VL,
                                     log_gap_n, log_metric_norm_n, metric_at_infinity_limit,
                                     metric_norm_n, vp)

t = Poly.gen()
QUAD = HenonFamily.quadratic()
P00 = InitialPoint.const(0, 0)
ARCH = Place.arch()


def _oracle_arch(family, point, tau, steps=40, dps=80):
    # long high-precision forward and backward runs; error ~ 2^-steps
    with mpmath.workdps(dps):
        H = family.specialize(mpmath.mpf(tau.numerator) / tau.denominator)
        p = q = tuple(mpmath.mpf(c.numerator) / c.denominator for c in point)
        for _ in range(steps):
            p, q = H.forward(p), H.backward(q)
        gp = mpmath.log(max(abs(p[0]), abs(p[1]), 1)) / 2 ** steps
        gm = mpmath.log(max(abs(q[0]), abs(q[1]), 1)) / 2 ** steps
        return float(max(gp, gm))


def test_filtration_examples():
    fc = filtration_consts(QUAD, P00, ARCH, kappa=12)
    assert 6 <= fc.L ** (fc.m + 1)
    assert fc.m == 1 and fc.Delta == 1
    assert filtration_consts(QUAD, P00, Place.prime(5)).L == 1
    fam = HenonFamily(3, F(-1), (t, Poly(), t ** 2 + 3))
    fc5 = filtration_consts(fam, InitialPoint.const(2, 7), Place.prime(5))
    assert (fc5.Delta, fc5.L, fc5.place.bracket(9)) == (1, 1, 1)
    with pytest.raises(ValueError):
        filtration_consts(QUAD, P00, ARCH, kappa=1)


def test_filtration_bounds_hold_on_region():
    fc = filtration_consts(QUAD, P00, ARCH)
    L = fc.L
    rng = random.Random(3)
    for _ in range(200):
        tau = F(rng.randint(-L * 100, L * 100), 100)
        for c in (*QUAD.c, P00.a, P00.b):
            assert abs(c(tau)) <= L ** (fc.m + 1)
    assert 3 * QUAD.d * fc.Delta <= L ** (fc.m + 1)


def test_in_VL_examples():
    fc = filtration_consts(QUAD, P00, ARCH)
    small = (F(int(fc.threshold)), F(0))
    assert in_VL(small, F(0), ARCH, fc, QUAD, 1) and in_VL(small, F(0), ARCH, fc, QUAD, -1)
    assert in_VL((F(10 ** 6), F(0)), F(0), ARCH, fc, QUAD, 1)
    with pytest.raises(ValueError, match="outside"):
        in_VL(small, F(fc.L + 1), ARCH, fc, QUAD, 1)


def test_green_examples():
    g = G_P(QUAD, P00, 0)
    assert (g.value, g.tail_bound, g.status) == (0.0, 0.0, "periodic")
    g = G_P(QUAD, InitialPoint.const(-1, 1), -1)
    assert g.value == 0.0 and g.status == "periodic"
    g = G_P(QUAD, P00, 2)
    assert g.value > 0 and g.status == "escaped"
    assert abs(g.value - _oracle_arch(QUAD, (F(0), F(0)), F(2))) <= g.tail_bound + 1e-12


def test_fivadic_benchmark_by_valuation_recursion():
    tau = F(1, 5)
    H = QUAD.specialize(tau)
    pt, est = (F(0), F(0)), None
    for n in range(1, 11):
        pt = H.forward(pt)
        v = min(vp(pt[0], 5), vp(pt[1], 5))
        assert v == -2 ** (n - 1)
        est = -v * math.log(5) / 2 ** n
    g = G_P(QUAD, P00, tau, Place.prime(5))
    assert abs(g.value - est) < 1e-12 and abs(g.value - 0.5 * math.log(5)) < 1e-12
    assert g.tail_bound == 0.0


def test_large_parameter_band():
    g = G_P(QUAD, P00, 100)
    assert abs(g.value - 0.5 * math.log(100)) < 5e-3


def test_good_reduction_is_zero():
    for tau in (F(3), F(-7, 2), F(11)):
        g = G_P(QUAD, P00, tau, Place.prime(5))
        assert (g.value, g.tail_bound, g.status) == (0.0, 0.0, "integral")


def test_classify_examples():
    assert classify(QUAD, P00, 0).kind == "K"
    c = classify(QUAD, P00, 3)
    assert c.kind == "W" and c.green.escaped_at <= 10
    c = classify(QUAD, P00, F(7), Place.prime(3))
    assert c.kind == "K" and not c.heuristic
    c = classify(QUAD, InitialPoint.const(F(1, 3), 0), F(1, 9), Place.prime(3))
    assert c.kind == "W"


def test_unresolved_is_explicit():
    g = G_P(QUAD, P00, F(-1, 4), budget=3)
    assert g.status == "unresolved" and math.isnan(g.value)
    assert classify(QUAD, P00, F(-1, 4), budget=3).kind == "unresolved"


def test_padic_capped_precision_agrees_with_exact():
    fam = HenonFamily(2, F(3, 5), (Poly(), t))
    pt = (F(2, 3), F(1, 7))
    for tau in (F(1, 3), F(4, 9)):
        exact = green(fam, tau, pt, Place.prime(3), bit_cap=10 ** 6)
        capped = green(fam, tau, pt, Place.prime(3), bit_cap=8)
        assert abs(exact.G.value - capped.G.value) < 1e-12


def test_tail_bounds_contain_oracle():
    rng = random.Random(11)
    for _ in range(15):
        tau = F(rng.randint(-300, 300), rng.randint(1, 40))
        pt = (F(rng.randint(-9, 9), rng.randint(1, 5)), F(rng.randint(-9, 9), rng.randint(1, 5)))
        g = green(QUAD, tau, pt, ARCH, tol=1e-10).G
        if g.status != "escaped":
            continue
        assert abs(g.value - _oracle_arch(QUAD, pt, tau)) <= g.tail_bound + 1e-11


escaping = st.tuples(st.floats(2.5, 40), st.floats(-3, 3), st.floats(-3, 3))


@given(escaping)
def test_functional_equations(sample):
    tau, x, y = (F(v).limit_denominator(1000) for v in sample)
    H = QUAD.specialize(tau)
    q = (x, y)
    g = green(QUAD, tau, q, ARCH, tol=1e-12)
    g_fw = green(QUAD, tau, H.forward(q), ARCH, tol=1e-12)
    g_bw = green(QUAD, tau, H.backward(q), ARCH, tol=1e-12)
    assume(g.plus.status == "escaped" and g.minus.status == "escaped")
    assert abs(g_fw.plus.value - 2 * g.plus.value) < 1e-9
    assert abs(g_bw.minus.value - 2 * g.minus.value) < 1e-9


@given(st.floats(-6, 6), st.floats(-3, 3), st.floats(-3, 3))
def test_involution_symmetry(tau, x, y):
    tau, x, y = (F(v).limit_denominator(500) for v in (tau, x, y))
    g = green(QUAD, tau, (x, y), ARCH, tol=1e-10).G
    gi = green(QUAD, tau, (-y, -x), ARCH, tol=1e-10).G
    assume(g.resolved and gi.resolved)
    assert abs(g.value - gi.value) < 1e-6


def test_sandwich_laws_sampled():
    fc = filtration_consts(QUAD, P00, ARCH)
    rng = random.Random(5)
    C_up, C_lo = fc.upper_const, fc.threshold
    for _ in range(150):
        tau = F(rng.randint(-fc.L * 32, fc.L * 32), 32)
        M = M_n_values(QUAD, P00, tau, ARCH, 7)
        for n in range(1, 7):
            assert M[n + 1] <= C_up * M[n] ** 2
            assert M[n + 1] >= M[n] ** 2 / C_lo ** 2
    for _ in range(150):
        tau = F(rng.randint(fc.L * 16 + 1, 10 ** 5), 16) * rng.choice((1, -1))
        M = M_n_values(QUAD, P00, tau, ARCH, 7)
        for n in range(fc.N_unbounded, 7):
            assert M[n] ** 2 / (fc.Delta * fc.kappa) <= M[n + 1] <= fc.Delta * fc.kappa * M[n] ** 2


def test_metric_examples():
    setup = MetricSetup.build(QUAD, P00, 10)
    five = Place.prime(5)
    assert metric_norm_n((1, 0), F(10), 6, five, setup) == pytest.approx(0.2, rel=1e-12)
    fc = filtration_consts(QUAD, P00, ARCH)
    for n in range(5, 10):
        for tau in (F(0), F(1, 3), F(-7, 4), F(999)):
            assert abs(log_gap_n(tau, n, ARCH, setup)) <= convergence_gap(n, fc)
    with pytest.raises(ValueError):
        log_metric_norm_n((1, 0), F(1), 0, ARCH, setup)


@pytest.mark.parametrize("fam,P", [
    (QUAD, P00),
    (HenonFamily(2, 1, (Poly(), 2 * t)), P00),
    (HenonFamily(2, F(1, 5), (Poly(), t)), P00),
    (HenonFamily(2, 1, (Poly(), t / 4)), P00),
    (HenonFamily(3, F(2), (Poly(), Poly(), t)), InitialPoint.const(1, 0)),
])
def test_asymptotic_constant(fam, P):
    cert = stabilize(fam, P)
    c = float(asymptotic_constant(cert, ARCH, fam.delta))
    gaps = []
    for s in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 6):
        g = G_P(fam, P, F(s))
        gaps.append(abs(g.value - float(cert.ell) * math.log(s) - c))
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-4
    n = 8 if fam.d == 2 else 6
    setup = MetricSetup.build(fam, P, n)
    limit = metric_at_infinity_limit(cert, ARCH, fam.delta)
    # B-side leading coefficients pick up (-1/δ)^((d^j-1)/(d-1)), which only washes out as d^-n
    slack = abs(math.log(fam.delta)) / (float(cert.ell) * fam.d ** n * (fam.d - 1))
    at_inf = float(log_metric_norm_n((1, 0), None, n, ARCH, setup))
    assert abs(at_inf - limit) <= slack + 1e-9
