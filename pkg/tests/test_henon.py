import time
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from henonheights.exactring import GF, NumberField, Poly
from henonheights.henon import (HenonFamily, InitialPoint, OrbitTable, detect_period,
                                orbit_polys, orbit_polys_symbolic_b, specialize)
from henonheights.localgreen import Place, filtration_consts

t = Poly.gen()
QUAD = HenonFamily.quadratic()
rats = st.fractions(min_value=-4, max_value=4, max_denominator=9)


def test_step_examples():
    assert QUAD.specialize(F(0)).forward((F(0), F(0))) == (0, 0)
    H = QUAD.specialize(F(-1))
    assert H.forward((F(-1), F(1))) == (1, -1)
    assert H.forward((F(1), F(-1))) == (-1, 1)
    fam = HenonFamily(3, F(2, 3), (t, Poly(), t ** 2 + 1))
    Hs = fam.specialize(F(5, 2))
    assert Hs.backward(Hs.forward((F(3), F(5)))) == (3, 5)


def test_delta_not_invertible_in_ring():
    fam = HenonFamily.quadratic(5)
    with pytest.raises(ZeroDivisionError):
        fam.specialize(GF(5)(1)).backward((GF(5)(0), GF(5)(0)))


def test_orbit_examples():
    tab = orbit_polys(QUAD, InitialPoint.const(0, 0), 3)
    assert tab.A[1] == t and tab.A[2] == t ** 2 + t
    assert tab.A[3] == t ** 4 + 2 * t ** 3 + t ** 2 + 2 * t
    assert tab.B[1] == -t and tab.B[2] == -t ** 2 - t
    sym = orbit_polys_symbolic_b(QUAD, Poly(), 2)
    b = Poly.gen("b")
    assert sym.A[1].subs_inner(F(7)) == t + 7
    assert sym.A[2].subs_inner(F(7)) == (t + 7) ** 2 + t
    assert sym.A[1].coeff(0) == b


def test_degree_law_to_12():
    for P in (InitialPoint.const(0, 0), InitialPoint.const(F(-3, 2), F(5, 7))):
        tab = orbit_polys(QUAD, P, 12)
        for n in range(1, 13):
            assert tab.A[n].degree == tab.B[n].degree == 2 ** (n - 1)


def test_specialize_examples():
    tab = orbit_polys(QUAD, InitialPoint.const(0, 0), 3)
    assert specialize(tab.A[2], F(1)) == 2
    assert specialize(tab.A[3], F(-1)) == -2
    K = NumberField(t ** 3 + 2 * t ** 2 + 2 * t + 3)
    assert specialize(tab.A[1], K.gen()) == K.gen()


@given(rats, rats, rats)
def test_recursion_matches_iteration(tau, a, b):
    fam = HenonFamily(2, F(-3, 2), (t, t ** 2 - 1))
    P = InitialPoint(Poly.const(a) + t, Poly.const(b))
    tab = orbit_polys(fam, P, 6)
    H = fam.specialize(tau)
    pt = P.at(tau)
    fw, bw = pt, pt
    for n in range(1, 7):
        fw, bw = H.forward(fw), H.backward(bw)
        assert specialize(tab.forward_point(n), tau) == list(fw)
        assert specialize(tab.backward_point(n), tau) == list(bw)


def test_inverse_as_polynomials():
    fam = HenonFamily(2, F(2), (Poly(), t))
    P = InitialPoint(t, Poly.const(1))
    H = fam.polymap()
    pt = (P.a, P.b)
    for _ in range(4):
        pt = H.forward(pt)
    for _ in range(4):
        pt = H.backward(pt)
    assert pt == (P.a, P.b)


@given(rats, rats, rats)
def test_primed_form_is_conjugate(tau, x, y):
    H = HenonFamily(2, F(3), (t, t)).specialize(tau)
    p, q = (x, y), (y, x)
    for _ in range(4):
        p, q = H.forward(p), H.forward_primed(q)
        assert q == (p[1], p[0])


def test_detect_period_examples():
    fc = filtration_consts(QUAD, InitialPoint.const(0, 0), Place.arch())
    bound = float(fc.threshold)
    assert detect_period(QUAD, F(0), (F(0), F(0)), escape_bound=bound).period == 1
    assert detect_period(QUAD, F(-1), (F(-1), F(1)), escape_bound=bound).period == 2
    assert detect_period(QUAD, F(1), (F(0), F(0)), escape_bound=bound).status == "escaped"


def test_table_json_roundtrip():
    tab = orbit_polys(QUAD, InitialPoint.const(0, F(1, 2)), 4)
    assert OrbitTable.from_json(tab.to_json()) == tab
    assert HenonFamily.from_json(QUAD.to_json()) == QUAD
