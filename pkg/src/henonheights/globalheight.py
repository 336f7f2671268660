"""Canonical height of P_t under H_t as a sum of local Green values, and the
parameter height h_P(t) = h̃(P_t)/ℓ."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactring import NumberFieldElem, Poly, Q
from .ffheight import ff_height, stabilize
from .henon import HenonFamily, InitialPoint
from .localgreen import GreenValue, Place, G_P, green


def _primes(n: int) -> set[int]:
    n = abs(n)
    out, p = set(), 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


@dataclass(frozen=True)
class HeightValue:
    value: float
    tail_bound: float
    places_used: tuple[Place, ...]
    ell: Fraction | None
    status: str = "ok"            # ok | unresolved
    local: tuple = ()

    @property
    def resolved(self) -> bool:
        return self.status == "ok"

    def to_json(self, t=None) -> dict:
        out = {"value": self.value, "tail": self.tail_bound,
               "places": [str(p) for p in self.places_used], "status": self.status,
               "ell": None if self.ell is None else str(self.ell),
               "local": [{"place": str(p), **g.to_json()} for p, g in self.local]}
        if t is not None:
            out["t"] = str(t)
        return out


def relevant_places(family: HenonFamily, P: InitialPoint, t) -> list[Place]:
    """∞ plus every prime at which the data fails to be integral or δ fails to be a unit."""
    t = Q(t)
    primes: set[int] = set()
    for poly in (*family.c, P.a, P.b):
        for c in poly.coeffs:
            primes |= _primes(c.denominator)
    primes |= _primes(t.denominator)
    primes |= _primes(family.delta.numerator) | _primes(family.delta.denominator)
    return [Place.arch()] + [Place.prime(p) for p in sorted(primes)]


def _sum(locals_: Sequence[tuple[Place, GreenValue]], ell, weight: float = 1.0) -> HeightValue:
    places = tuple(p for p, _ in locals_)
    if any(not g.resolved for _, g in locals_):
        return HeightValue(float("nan"), math.inf, places, ell, "unresolved", tuple(locals_))
    val = math.fsum(g.value for _, g in locals_) * weight
    tail = math.fsum(g.tail_bound for _, g in locals_) * weight
    return HeightValue(val, tail, places, ell, "ok", tuple(locals_))


def canonical_height(family: HenonFamily, t, P: InitialPoint, tol: float = 1e-12,
                     budget: int = 256, parallel: bool = False) -> HeightValue:
    """h̃_{H_t}(P_t) for rational t, or algebraic t given as a number-field element."""
    if isinstance(t, NumberFieldElem):
        return _algebraic_height(family, t, P, tol, budget)
    t = Q(t)
    places = relevant_places(family, P, t)

    def one(pl):
        return pl, G_P(family, P, t, pl, tol, budget=budget)

    if parallel and len(places) > 1:
        with ThreadPoolExecutor(max_workers=len(places)) as ex:
            results = list(ex.map(one, places))
    else:
        results = [one(pl) for pl in places]
    return _sum(sorted(results, key=lambda r: r[0]), None)


def _algebraic_height(family, t: NumberFieldElem, P, tol, budget) -> HeightValue:
    K = t.field
    m = K.min_poly
    integral_data = all(c.denominator == 1 for c in m.coeffs) and \
        all(c.denominator == 1 for poly in (*family.c, P.a, P.b) for c in poly.coeffs) and \
        abs(family.delta) == 1
    if not integral_data:
        raise NotImplementedError("p-adic conjugates of algebraic parameters are unsupported")
    if any(c.denominator != 1 for c in t.value.coeffs):
        raise NotImplementedError("algebraic parameter must be a polynomial in an integral generator")
    locals_ = []
    for L in K.conjugates():
        tau = NumberFieldElem(L, t.value)
        locals_.append((Place.arch(), green(family, tau, P.at(tau), Place.arch(), tol, budget=budget).G))
    return _sum(locals_, None, 1.0 / K.degree)


def h_P(family: HenonFamily, P: InitialPoint, t, tol: float = 1e-12, budget: int = 256,
        ell: Fraction | None = None) -> HeightValue:
    if ell is None:
        ell = ff_height(stabilize(family, P))
    h = canonical_height(family, t, P, tol, budget)
    if not h.resolved:
        return HeightValue(h.value, h.tail_bound, h.places_used, ell, h.status, h.local)
    return HeightValue(h.value / float(ell), h.tail_bound / float(ell), h.places_used, ell, "ok", h.local)


def hhat_bracket(family: HenonFamily, t, P: InitialPoint, tol: float = 1e-12) -> dict:
    """h̃ = Σ_v max(G⁺, G⁻) against ĥ = Σ_v (G⁺ + G⁻): ĥ/2 ≤ h̃ ≤ ĥ."""
    t = Q(t)
    ht = hh = tail = 0.0
    for pl in relevant_places(family, P, t):
        tr = green(family, t, P.at(t), pl, tol)
        if not tr.G.resolved:
            raise ArithmeticError(f"unresolved Green value at {pl}")
        ht += tr.G.value
        hh += tr.plus.value + tr.minus.value
        tail += tr.plus.tail_bound + tr.minus.tail_bound
    return {"htilde": ht, "hhat": hh, "tail": tail}


def iota(delta, point):
    """ι_δ(x, y) = (-δy, -δx); reverses H when f(-δx) = f(x)."""
    x, y = point
    return (-delta * y, -delta * x)


def iota_point(delta, P: InitialPoint) -> InitialPoint:
    delta = Q(delta)
    return InitialPoint(P.b * (-delta), P.a * (-delta))


def H_point(family: HenonFamily, P: InitialPoint) -> InitialPoint:
    """H(P) over Q[t]."""
    return InitialPoint(P.b * family.delta + family.f(P.a, family.c), P.a)


@dataclass(frozen=True)
class CompareReport:
    max_discrepancy: float
    argmax: object
    max_tail: float
    samples: int
    skipped: int
    normalized: bool
    ell_P: Fraction
    ell_Q: Fraction

    def to_json(self) -> dict:
        return {"max_discrepancy": self.max_discrepancy, "argmax": str(self.argmax),
                "max_tail": self.max_tail, "samples": self.samples, "skipped": self.skipped,
                "normalized": self.normalized, "ell_P": str(self.ell_P), "ell_Q": str(self.ell_Q)}


def green_compare(family: HenonFamily, P: InitialPoint, Q_: InitialPoint, place: Place,
                  grid: Iterable, tol: float = 1e-12, normalized: bool = True,
                  budget: int = 256) -> CompareReport:
    """sup over the grid of |G_P/ℓ_P - G_Q/ℓ_Q| (or of |G_P - G_Q| when not normalized).

    The normalized form is the metric-level quantity; for Q = H(P) the raw Green
    functions differ by the factor ℓ_Q/ℓ_P = d even when the heights agree."""
    lP = ff_height(stabilize(family, P))
    lQ = ff_height(stabilize(family, Q_))
    sP, sQ = (float(lP), float(lQ)) if normalized else (1.0, 1.0)
    worst, arg, tail_max, n, skipped = 0.0, None, 0.0, 0, 0
    for t in grid:
        gp = G_P(family, P, t, place, tol, budget=budget)
        gq = G_P(family, Q_, t, place, tol, budget=budget)
        if not (gp.resolved and gq.resolved):
            skipped += 1
            continue
        n += 1
        disc = abs(gp.value / sP - gq.value / sQ)
        tail_max = max(tail_max, gp.tail_bound / sP + gq.tail_bound / sQ)
        if disc > worst or arg is None:
            worst, arg = max(disc, worst), t
    return CompareReport(worst, arg, tail_max, n, skipped, normalized, lP, lQ)
