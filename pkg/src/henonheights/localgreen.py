"""Local Green functions of H_t at the archimedean place and at primes.

Escape is certified pointwise: once the dominant coordinate x of the orbit
satisfies |x| ≥ |y|, ε = Σ|c_i|/|x|^i + |δ|/|x|^(d-1) < 1 and
|x|^(d-1)(1-ε) > 1, every later step obeys |log|x'| - d log|x|| ≤ -log(1-ε),
so the remaining error in G⁺ is at most -log(1-ε)/(d^n (d-1)).
Ultrametrically the same condition makes |x'| = |x|^d exact and the tail is 0.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .exactring import NumberFieldElem, Poly, Q
from .ffheight import (StabilizationCert, UNDETERMINED, degree_profile, ell_stable_from,
                       stabilize)
from .henon import HenonFamily, InitialPoint, OrbitTable, orbit_polys


class Unresolved(Exception):
    pass


# ---------------------------------------------------------------------------
# places

def vp(x, p: int) -> float | int:
    """p-adic valuation of a rational (inf for 0)."""
    x = Q(x)
    if x == 0:
        return math.inf
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


@dataclass(frozen=True, order=True)
class Place:
    p: int = 0          # 0 encodes the archimedean place
    n_v: int = 1

    @classmethod
    def arch(cls) -> "Place":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "Place":
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        return cls(p)

    @classmethod
    def parse(cls, s: str) -> "Place":
        s = str(s).strip().lower()
        return cls.arch() if s in ("inf", "infinity", "oo", "arch", "0") else cls.prime(int(s))

    @property
    def is_arch(self) -> bool:
        return self.p == 0

    def abs(self, x) -> Fraction:
        """Exact |x|_v for rational x."""
        x = Q(x)
        if self.is_arch:
            return abs(x)
        if x == 0:
            return Fraction(0)
        return Fraction(self.p) ** (-vp(x, self.p))

    def log_abs(self, x):
        x = Q(x)
        if x == 0:
            return -mpmath.inf
        if self.is_arch:
            return mpmath.log(abs(x.numerator)) - mpmath.log(x.denominator)
        return -vp(x, self.p) * mpmath.log(self.p)

    def bracket(self, r):
        return r if self.is_arch else 1

    def __str__(self):
        return "inf" if self.is_arch else str(self.p)


# ---------------------------------------------------------------------------
# filtration constants

def _coeff_abs(p: Poly, place: Place) -> list[Fraction]:
    return [place.abs(c) for c in p.coeffs]


def _upper(p: Poly, r: Fraction, place: Place) -> Fraction:
    """Upper bound for |p(t)| when |t| ≤ r."""
    cs = _coeff_abs(p, place)
    if not cs:
        return Fraction(0)
    terms = [c * r ** j for j, c in enumerate(cs)]
    return sum(terms) if place.is_arch else max(terms)


def _lower_top(p: Poly, r: Fraction, place: Place) -> Fraction:
    """Lower bound for |p(t)|/|t|^deg valid for every |t| ≥ r (nondecreasing in r).

    Archimedean: |lc| - Σ_{j<D}|c_j| r^(j-D). Ultrametric: |lc| when the top term
    dominates every other term at radius r (then strictly beyond r), else 0."""
    cs = _coeff_abs(p, place)
    D = len(cs) - 1
    lc = cs[-1]
    rest = [c * r ** (j - D) for j, c in enumerate(cs[:-1])]
    if place.is_arch:
        return max(lc - sum(rest), Fraction(0))
    return lc if all(x <= lc for x in rest) else Fraction(0)


def _upper_rel(p: Poly, D: int, r: Fraction, place: Place) -> Fraction:
    """Upper bound for |p(t)|/|t|^D for |t| ≥ r ≥ 1 when deg p ≤ D (nonincreasing in r)."""
    cs = _coeff_abs(p, place)
    terms = [c * r ** (j - D) for j, c in enumerate(cs)]
    if not terms:
        return Fraction(0)
    return sum(terms) if place.is_arch else max(terms)


def _root_ge(x: Fraction, base: Fraction, k: int) -> bool:
    """x ≥ base^(1/k) for x, base ≥ 0."""
    return x ** k >= base


@dataclass(frozen=True)
class FiltrationConsts:
    place: Place
    d: int
    m: int
    Delta: Fraction
    L: int
    kappa: Fraction
    kappa_thm: Fraction
    archimedean: bool
    L_bounded: int
    L_unbounded: int | None
    N_unbounded: int | None
    ell: Fraction | None

    @property
    def Lm1(self) -> int:
        return self.L ** (self.m + 1)

    @property
    def threshold(self) -> Fraction:
        """[3d] Δ L^(m+1), the size beyond which V_L^± are governed by the growth clause."""
        return self.place.bracket(3 * self.d) * self.Delta * self.Lm1

    @property
    def upper_const(self) -> Fraction:
        return self.place.bracket(self.d + 2) * self.Delta * self.Lm1

    def to_json(self) -> dict:
        out = asdict(self)
        out["place"] = str(self.place)
        for k in ("Delta", "kappa", "kappa_thm", "ell"):
            if out[k] is not None:
                out[k] = str(out[k])
        return out


def _unbounded_side_ok(seq: Sequence[Poly], N: int, m: int, d: int, gamma: Fraction, c_abs: Fraction,
                       cs: Sequence[Poly], kappa: Fraction, L: Fraction, place: Place) -> bool:
    """Conditions making the large-|t| sandwich hold for one orbit side from index N on.

    (i)  |X_N(t)| ≥ |t|^(m+1) and (ii) |X_{N-1}/X_N| ≤ |t|^-d for |t| > L,
    (a)  L^(m+1) ≥ (κ/|c|)^(1/(d-1)),
    (s)  |Σ c_i(t)/t^(i(m+1)) + γ/t^d| ≤ |c|(1 - 1/κ) for |t| > L.
    Ultrametrically (b) of the underlying estimate holds with equality, so κ is
    replaced by 1 in (a) and (s) only needs the strict bound |c|."""
    X, Y = seq[N], seq[N - 1]
    D = X.degree
    lo = _lower_top(X, L, place)
    if lo == 0:
        return False
    # (i): |X(t)| ≥ lo |t|^D ≥ |t|^(m+1)
    if lo * L ** (D - m - 1) < 1:
        return False
    # (ii): |Y|/|X| ≤ up |t|^(deg Y) / (lo |t|^D) ≤ |t|^-d
    if not Y.is_zero():
        if Y.degree - D + d > 0:
            return False
        if _upper_rel(Y, Y.degree, L, place) * L ** (Y.degree - D + d) > lo:
            return False
    Lm1 = L ** (m + 1)
    k_eff = kappa if place.is_arch else Fraction(1)
    if not _root_ge(Lm1, k_eff / c_abs, d - 1):
        return False
    terms = [_upper(c, L, place) / Lm1 ** i for i, c in enumerate(cs, start=1)]
    terms.append(gamma / L ** d)
    if place.is_arch:
        return sum(terms) <= c_abs * (1 - 1 / kappa)
    return max(terms) <= c_abs


def _pick_N(degs: Sequence[int], N0: int, m: int, d: int) -> int | None:
    for N in range(max(N0, 1), len(degs)):
        if degs[N - 1] > m + 1 and degs[N] - degs[N - 1] > d:
            return N
    return None


def filtration_consts(family: HenonFamily, P: InitialPoint, place: Place, kappa=2,
                      n_budget: int = 8, max_log2L: int = 64) -> FiltrationConsts:
    """Smallest power of two L with the bounded-region bounds and, for every
    unbounded orbit side, the large-|t| conditions (checked for κ and for the
    κ used in the uniform convergence bound)."""
    kappa = Q(kappa)
    if kappa <= 1:
        raise ValueError("kappa must exceed 1")
    d = family.d
    m = max(max(c.degree for c in family.c), P.a.degree, P.b.degree, 0)
    ad = place.abs(family.delta)
    Delta = max(ad, 1 / ad)
    kappa_thm = max(Fraction(place.bracket(3 * d)) * Delta, Fraction(2), kappa)
    polys = list(family.c) + [P.a, P.b]

    def bounded_ok(L: int) -> bool:
        Lm1 = Fraction(L) ** (m + 1)
        if any(_upper(p, Fraction(L), place) > Lm1 for p in polys):
            return False
        if place.bracket(3 * d) * Delta > Lm1:
            return False
        if place.is_arch and not _root_ge(Lm1, kappa_thm * Delta, d - 1):
            return False
        return True

    L_b = next((1 << k for k in range(max_log2L) if bounded_ok(1 << k)), None)
    if L_b is None:
        raise ArithmeticError("no admissible L for the bounded region")

    cert = stabilize(family, P, n_budget)
    ell = None if cert == UNDETERMINED else cert.ell
    L_u = N_u = None
    if cert != UNDETERMINED:
        table = orbit_polys(family, P, n_budget)
        sides = []
        if cert.N is not None:
            NA = _pick_N([p.degree for p in table.A], cert.N, m, d)
            sides.append(("A", NA, table.A, ad, Fraction(1)))
        if cert.Nb is not None:
            NB = _pick_N([p.degree for p in table.B], cert.Nb, m, d)
            sides.append(("B", NB, table.B, Fraction(1), 1 / ad))
        if all(s[1] is not None for s in sides) and len(sides) == 2:
            N_u = max(s[1] for s in sides)

            def unbounded_ok(L: int) -> bool:
                Lf = Fraction(L)
                for _, N, seq, gamma, c_abs in sides:
                    for k in (kappa, kappa_thm):
                        if not _unbounded_side_ok(seq, N, m, d, gamma, c_abs, family.c, k, Lf, place):
                            return False
                return True

            L_u = next((1 << k for k in range(max_log2L) if unbounded_ok(1 << k)), None)
        elif all(s[1] is not None for s in sides) and len(sides) == 1:
            # one side unbounded; the other must stay ε-small relative to it
            _, N, seq, gamma, c_abs = sides[0]
            other = table.B if sides[0][0] == "A" else table.A
            N_u = N

            def unbounded_ok(L: int) -> bool:
                Lf = Fraction(L)
                for k in (kappa, kappa_thm):
                    if not _unbounded_side_ok(seq, N, m, d, gamma, c_abs, family.c, k, Lf, place):
                        return False
                    eps_pow = 1 / (place.bracket(d + 2) * k * Delta ** 2)
                    lo = _lower_top(seq[N], Lf, place) * Lf ** seq[N].degree
                    ratios = [1 / lo] + [_upper(q, Lf, place) / lo if q.degree < seq[N].degree
                                         else Fraction(10 ** 9)
                                         for q in (other[N - 1], other[N], *family.c)]
                    if max(ratios) ** (d - 1) > eps_pow:
                        return False
                return True

            L_u = next((1 << k for k in range(max_log2L) if unbounded_ok(1 << k)), None)
    L = max(L_b, L_u or 1)
    return FiltrationConsts(place=place, d=d, m=m, Delta=Delta, L=L, kappa=kappa,
                            kappa_thm=kappa_thm, archimedean=place.is_arch, L_bounded=L_b,
                            L_unbounded=L_u, N_unbounded=N_u, ell=ell)


# ---------------------------------------------------------------------------
# sizes at a parameter value

def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    if isinstance(x, NumberFieldElem):
        return x.embed()
    return mpmath.mpmathify(x)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, NumberFieldElem))


def size(x, place: Place):
    """|x|_v: exact Fraction for rationals, mpf otherwise (archimedean only)."""
    if isinstance(x, (int, Fraction)):
        return place.abs(x)
    if not place.is_arch:
        raise NotImplementedError("p-adic sizes need rational inputs")
    return abs(_mp(x))


def point_norm(pt, place: Place):
    return max(size(pt[0], place), size(pt[1], place))


def _check_region(t, consts: FiltrationConsts):
    if size(t, consts.place) > consts.L:
        raise ValueError("filtration undefined outside the bounded region |t| ≤ L")


def in_VL(point, t, place: Place, consts: FiltrationConsts, family: HenonFamily, sign: int = 1) -> bool:
    """Membership in V_L^+ (sign=+1) or V_L^- (sign=-1) at parameter t."""
    _check_region(t, consts)
    nrm = point_norm(point, place)
    if nrm <= consts.threshold:
        return True
    smap = family.specialize(t if _is_exact(t) else _mp(t))
    img = smap.forward(point) if sign > 0 else smap.backward(point)
    return point_norm(img, place) * consts.Lm1 >= nrm ** family.d


def M_n_values(family: HenonFamily, P: InitialPoint, t, place: Place, n_max: int) -> list:
    """M_1..M_n_max at t (index 0 unused), computed by iterating the map exactly
    for rational t or in mpmath otherwise."""
    tt = t if _is_exact(t) else _mp(t)
    smap = family.specialize(tt)
    a, b = P.at(tt)
    fw = [(a, None)]
    pt = (a, b)
    A = [a]
    for _ in range(n_max):
        pt = smap.forward(pt)
        A.append(pt[0])
    pt = (a, b)
    B = [b]
    for _ in range(n_max):
        pt = smap.backward(pt)
        B.append(pt[1])
    one = Fraction(1) if _is_exact(tt) else mpmath.mpf(1)
    out = [None]
    for n in range(1, n_max + 1):
        out.append(max(size(A[n], place), size(A[n - 1], place), size(B[n - 1], place),
                       size(B[n], place), one))
    return out


# ---------------------------------------------------------------------------
# Green values

@dataclass(frozen=True)
class GreenValue:
    value: float
    tail_bound: float
    iterations_used: int
    escaped_at: int | None
    status: str                  # escaped | periodic | integral | bounded | unresolved
    heuristic: bool = False
    mp_value: object = field(default=None, compare=False, repr=False)

    @property
    def resolved(self) -> bool:
        return self.status != "unresolved"

    def to_json(self) -> dict:
        return {"value": self.value, "tail_bound": self.tail_bound,
                "iterations_used": self.iterations_used, "escaped_at": self.escaped_at,
                "status": self.status, "heuristic": self.heuristic,
                "exact": self.tail_bound == 0.0 and self.status != "unresolved"}


UNRESOLVED = GreenValue(float("nan"), float("inf"), 0, None, "unresolved")


@dataclass(frozen=True)
class GreenTriple:
    plus: GreenValue
    minus: GreenValue
    G: GreenValue

    def to_json(self) -> dict:
        return {"G_plus": self.plus.to_json(), "G_minus": self.minus.to_json(), "G": self.G.to_json()}


def _combine_max(a: GreenValue, b: GreenValue) -> GreenValue:
    if not a.resolved or not b.resolved:
        return GreenValue(float("nan"), float("inf"), max(a.iterations_used, b.iterations_used),
                          None, "unresolved")
    top = a if a.value >= b.value else b
    if a.status == b.status:
        status = a.status
    elif "escaped" in (a.status, b.status):
        status = "escaped"
    else:
        status = "bounded"
    esc = [g.escaped_at for g in (a, b) if g.escaped_at is not None]
    return GreenValue(top.value, max(a.tail_bound, b.tail_bound),
                      max(a.iterations_used, b.iterations_used), min(esc) if esc else None,
                      status, a.heuristic or b.heuristic, top.mp_value)


def _log_up_const(smap_cs_abs, delta_abs, d: int, place: Place):
    """log C with log⁺‖H^{±1}(Q)‖ ≤ d log⁺‖Q‖ + log C."""
    C = max([1] + list(smap_cs_abs))
    Delta = max(delta_abs, 1 / delta_abs)
    return mpmath.log(place.bracket(d + 2) * Delta * C)


def _arch_direction(smap, pt, sign: int, tol, budget: int, delta_abs, cabs, logC):
    d = smap.d
    log_delta = mpmath.log(delta_abs)
    escaped_at = None
    n = 0
    while True:
        x, y = (abs(pt[0]), abs(pt[1]))
        big, small = (x, y) if sign > 0 else (y, x)
        gamma = delta_abs if sign > 0 else 1
        scale = 1 if sign > 0 else delta_abs
        if big > 0 and big >= small:
            eps = sum(c / big ** i for i, c in enumerate(cabs, start=1)) + gamma / big ** (d - 1)
            if eps < 1 and big ** (d - 1) * (1 - eps) > scale:
                if escaped_at is None:
                    escaped_at = n
                tail = -mpmath.log1p(-eps) / (mpmath.mpf(d) ** n * (d - 1))
                if tail < tol or n >= budget:
                    val = mpmath.log(big)
                    if sign < 0:
                        val -= log_delta / (d - 1)
                    val /= mpmath.mpf(d) ** n
                    if tail >= tol:
                        return GreenValue(float("nan"), float(tail), n, escaped_at, "unresolved")
                    return GreenValue(float(val), float(tail), n, escaped_at, "escaped", False, val)
        if n >= budget:
            break
        pt = smap.forward(pt) if sign > 0 else smap.backward(pt)
        n += 1
    nrm = max(abs(pt[0]), abs(pt[1]))
    ub = (max(mpmath.log(nrm), 0) if nrm > 0 else 0) + logC / (d - 1)
    ub /= mpmath.mpf(d) ** n
    if ub < tol:
        return GreenValue(0.0, float(ub), n, None, "bounded", True, mpmath.mpf(0))
    return GreenValue(float("nan"), float(ub), n, None, "unresolved")


class _PAdic:
    """p^v * u with u a unit known modulo p^r (capped relative precision)."""

    __slots__ = ("p", "v", "u", "r")

    def __init__(self, p, v, u, r):
        self.p, self.v, self.u, self.r = p, v, u, r

    @classmethod
    def from_rational(cls, x: Fraction, p: int, prec: int):
        if x == 0:
            return cls(p, prec, 0, 0)          # zero known to absolute precision prec
        v = vp(x, p)
        y = x / Fraction(p) ** v
        mod = p ** prec
        return cls(p, v, y.numerator * pow(y.denominator, -1, mod) % mod, prec)

    @property
    def is_zero(self) -> bool:
        return self.u == 0

    def _norm(self, v, u, absprec):
        p = self.p
        if u == 0 or v >= absprec:
            return _PAdic(p, absprec, 0, 0)
        while u % p == 0:
            u //= p
            v += 1
            if v >= absprec:
                return _PAdic(p, absprec, 0, 0)
        r = absprec - v
        return _PAdic(p, v, u % p ** r, r)

    @property
    def absprec(self):
        return self.v + self.r

    def __add__(self, o):
        o = self._c(o)
        ap = min(self.absprec, o.absprec)
        v = min(self.v, o.v)
        mod = self.p ** (ap - v) if ap > v else 1
        u = (self.u * self.p ** (self.v - v) + o.u * self.p ** (o.v - v)) % mod
        return self._norm(v, u, ap)

    __radd__ = __add__

    def __neg__(self):
        return _PAdic(self.p, self.v, (-self.u) % self.p ** self.r if self.r else 0, self.r)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._c(o)
        if self.is_zero or o.is_zero:
            ap = min(self.absprec + (o.v if not o.is_zero else o.absprec),
                     o.absprec + (self.v if not self.is_zero else self.absprec))
            return _PAdic(self.p, ap, 0, 0)
        r = min(self.r, o.r)
        return _PAdic(self.p, self.v + o.v, self.u * o.u % self.p ** r, r)

    __rmul__ = __mul__

    def _c(self, o):
        if isinstance(o, _PAdic):
            return o
        return _PAdic.from_rational(Q(o), self.p, max(self.r, 1) + max(self.v, 0) + 64)

    def valuation(self):
        if self.is_zero:
            raise Unresolved("p-adic precision exhausted")
        return self.v


def _val(x, p):
    if isinstance(x, _PAdic):
        return x.valuation()
    return vp(x, p)


def _padic_direction(smap, pt, sign: int, p: int, budget: int, tol, cvals, dval, logC,
                     prec: int, bit_cap: int):
    d = smap.d
    lp = mpmath.log(p)
    n = 0
    while True:
        try:
            vx, vy = _val(pt[0], p), _val(pt[1], p)
        except Unresolved:
            return GreenValue(float("nan"), float("inf"), n, None, "unresolved")
        vb, vs = (vx, vy) if sign > 0 else (vy, vx)
        if vb <= vs and vb <= 0:
            ok = all(vc - i * vb > 0 for i, vc in enumerate(cvals, start=1) if vc != math.inf)
            gamma_v = dval if sign > 0 else 0
            ok = ok and gamma_v - (d - 1) * vb > 0
            if sign < 0:
                ok = ok and (d - 1) * vb <= dval
            if ok:
                raw = -vb if sign > 0 else (-vb + Fraction(dval, d - 1))
                val = mpmath.mpf(raw.numerator if isinstance(raw, Fraction) else raw)
                if isinstance(raw, Fraction):
                    val /= raw.denominator
                val = val * lp / mpmath.mpf(d) ** n
                growing = vb < 0 if sign > 0 else (d - 1) * vb < dval
                if growing:
                    return GreenValue(float(val), 0.0, n, n, "escaped", False, val)
                return GreenValue(0.0, 0.0, n, None, "bounded", False, mpmath.mpf(0))
        if n >= budget:
            break
        pt = smap.forward(pt) if sign > 0 else smap.backward(pt)
        if not isinstance(pt[0], _PAdic) and max(Q(pt[0]).numerator.bit_length(),
                                                  Q(pt[0]).denominator.bit_length(),
                                                  Q(pt[1]).numerator.bit_length(),
                                                  Q(pt[1]).denominator.bit_length()) > bit_cap:
            pt = tuple(_PAdic.from_rational(Q(c), p, prec) for c in pt)
            smap = _padic_map(smap, p, prec)
        n += 1
    try:
        vmin = min(_val(pt[0], p), _val(pt[1], p))
    except Unresolved:
        return GreenValue(float("nan"), float("inf"), n, None, "unresolved")
    ub = (max(-vmin, 0) * lp + logC / (d - 1)) / mpmath.mpf(d) ** n
    if ub < tol:
        return GreenValue(0.0, float(ub), n, None, "bounded", True, mpmath.mpf(0))
    return GreenValue(float("nan"), float(ub), n, None, "unresolved")


def _padic_map(smap, p, prec):
    from .henon import SpecializedMap
    cs = [_PAdic.from_rational(Q(c), p, prec) for c in smap.cs]
    new = SpecializedMap(smap.family, cs, smap.tau)
    new.delta = _PAdic.from_rational(smap.delta, p, prec)
    new.inv_delta = _PAdic.from_rational(1 / smap.delta, p, prec)
    new._delta_in = lambda x: (new.delta, new.inv_delta)
    return new


def _exact_cycle(smap, pt, budget: int, bit_cap: int = 20000) -> int | None:
    start = pt
    for k in range(1, budget + 1):
        pt = smap.forward(pt)
        if pt[0] == start[0] and pt[1] == start[1]:
            return k
        if _bits(pt) > bit_cap:
            return None
    return None


def _bits(pt) -> int:
    out = 0
    for v in pt:
        if isinstance(v, Fraction):
            out = max(out, v.numerator.bit_length(), v.denominator.bit_length())
        elif isinstance(v, NumberFieldElem):
            out = max(out, v.value.height_bits())
        elif isinstance(v, int):
            out = max(out, v.bit_length())
    return out


def green(family: HenonFamily, tau, point, place: Place = Place.arch(), tol: float = 1e-12,
          budget: int = 256, dps: int = 50, padic_prec: int = 64, bit_cap: int = 4096,
          cycle_budget: int = 64) -> GreenTriple:
    """G⁺, G⁻ and G = max(G⁺, G⁻) of ``point`` under H_τ at the given place."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    exact = _is_exact(tau) and all(_is_exact(c) for c in point)
    if exact:
        point = tuple(Q(c) if isinstance(c, int) else c for c in point)
        if isinstance(tau, int):
            tau = Q(tau)
        smap = family.specialize(tau)
        k = _exact_cycle(smap, point, cycle_budget)
        if k is not None:
            g = GreenValue(0.0, 0.0, k, None, "periodic", False, mpmath.mpf(0))
            return GreenTriple(g, g, g)
    if place.is_arch:
        with mpmath.workdps(dps):
            t_mp = _mp(tau)
            if isinstance(tau, NumberFieldElem):
                pt = tuple(_mp(c) for c in point)
            else:
                pt = tuple(_mp(c) for c in point)
            smap = family.specialize(t_mp)
            cabs = [abs(c) for c in smap.cs]
            dabs = abs(_mp(family.delta))
            logC = _log_up_const(cabs, dabs, family.d, place)
            gp = _arch_direction(smap, pt, 1, tol, budget, dabs, cabs, logC)
            gm = _arch_direction(smap, pt, -1, tol, budget, dabs, cabs, logC)
        return GreenTriple(gp, gm, _combine_max(gp, gm))
    if not exact or isinstance(tau, NumberFieldElem) or any(isinstance(c, NumberFieldElem) for c in point):
        raise NotImplementedError("p-adic Green values need rational parameter and point")
    p = place.p
    smap = family.specialize(tau)
    cvals = [vp(c, p) for c in smap.cs]
    dval = vp(family.delta, p)
    if dval == 0 and all(v >= 0 for v in cvals) and all(vp(c, p) >= 0 for c in point):
        g = GreenValue(0.0, 0.0, 0, None, "integral", False, mpmath.mpf(0))
        return GreenTriple(g, g, g)
    with mpmath.workdps(dps):
        logC = _log_up_const([place.abs(c) for c in smap.cs], place.abs(family.delta), family.d, place)
        gp = _padic_direction(smap, point, 1, p, budget, tol, cvals, dval, logC, padic_prec, bit_cap)
        gm = _padic_direction(smap, point, -1, p, budget, tol, cvals, dval, logC, padic_prec, bit_cap)
    return GreenTriple(gp, gm, _combine_max(gp, gm))


def G_P(family: HenonFamily, P: InitialPoint, t, place: Place = Place.arch(), tol: float = 1e-12,
        **kw) -> GreenValue:
    """G_{P,v}(t) = G_v(P_t) under H_t."""
    if isinstance(t, int):
        t = Q(t)
    return green(family, t, P.at(t), place, tol, **kw).G


@dataclass(frozen=True)
class Classification:
    kind: str            # K | W | unresolved
    certificate: str
    heuristic: bool
    green: GreenValue

    def to_json(self) -> dict:
        return {"kind": self.kind, "certificate": self.certificate, "heuristic": self.heuristic,
                "green": self.green.to_json()}


def classify(family: HenonFamily, P: InitialPoint, t, place: Place = Place.arch(),
             budget: int = 256, tol: float = 1e-12) -> Classification:
    """K when G_{P,v}(t) = 0, W when the orbit provably escapes."""
    g = G_P(family, P, t, place, tol, budget=budget)
    if g.status == "escaped":
        return Classification("W", f"escape regime entered at step {g.escaped_at}", False, g)
    if g.status in ("periodic", "integral"):
        return Classification("K", g.status, False, g)
    if g.status == "bounded":
        cert = "trapped for full budget" if g.heuristic else "ultrametric non-growth"
        return Classification("K", cert, g.heuristic, g)
    return Classification("unresolved", "budget exhausted", False, g)


# ---------------------------------------------------------------------------
# metrics ‖η‖_n on O(1) and their uniform convergence

@dataclass(frozen=True)
class MetricSetup:
    family: HenonFamily
    P: InitialPoint
    table: OrbitTable
    cert: StabilizationCert
    elln: tuple[int, ...]
    n0: int

    @classmethod
    def build(cls, family: HenonFamily, P: InitialPoint, n: int) -> "MetricSetup":
        table = orbit_polys(family, P, n)
        cert = stabilize(family, P, max(n, 2), table)
        if cert == UNDETERMINED:
            raise ValueError("metric needs a stabilized orbit (ℓ > 0)")
        prof = degree_profile(table)
        return cls(family, P, table, cert, prof.elln, ell_stable_from(cert, prof))


def _log_size_term(t, n: int, place: Place, setup: MetricSetup):
    """(1/ℓ_n) log ‖(A_n, A_{n-1}, B_{n-1}, B_n, 1)‖ at (t:1), or the top-coefficient
    version at (1:0) when t is None."""
    if n < setup.n0 or n > setup.table.n or setup.elln[n] <= 0:
        raise ValueError(f"n={n} lies before stabilization or beyond the table")
    ln = setup.elln[n]
    if t is None:
        tab = setup.table
        coords = (tab.A[n], tab.A[n - 1], tab.B[n - 1], tab.B[n], Poly.const(1))
        top = max(place.abs(c.coeff(ln)) for c in coords)
        return place.log_abs(top) / ln
    # orbit values come from iterating the map: Horner on A_n loses everything to cancellation
    M = M_n_values(setup.family, setup.P, t, place, n)[n]
    return mpmath.log(_mp(M)) / ln


def log_metric_norm_n(eta: tuple, t, n: int, place: Place, setup: MetricSetup, dps: int = 30):
    """log ‖a0 X0 + a1 X1‖_n at (t:1), or at (1:0) when t is None."""
    a0, a1 = (Q(e) for e in eta)
    with mpmath.workdps(dps):
        if t is None:
            return place.log_abs(a0) - _log_size_term(None, n, place, setup)
        if place.is_arch and not isinstance(t, (int, Fraction)):
            lin = mpmath.log(abs(a0 * _mp(t) + a1))
        else:
            lin = place.log_abs(a0 * Q(t) + a1)
        return lin - _log_size_term(t, n, place, setup)


def metric_norm_n(eta: tuple, t, n: int, place: Place, setup: MetricSetup) -> float:
    return float(mpmath.exp(log_metric_norm_n(eta, t, n, place, setup)))


def log_gap_n(t, n: int, place: Place, setup: MetricSetup, dps: int = 30):
    """log(‖η‖_{n+1}/‖η‖_n), the same for every η not vanishing at t; t=None means (1:0)."""
    with mpmath.workdps(dps):
        return _log_size_term(t, n, place, setup) - _log_size_term(t, n + 1, place, setup)


def convergence_gap(n: int, consts: FiltrationConsts) -> float:
    """(1/(ℓ d^n)) log(κ L^(m+1)) with κ = max([3d]Δ, 2, κ_user)."""
    if consts.ell is None or consts.ell == 0:
        raise ValueError("gap needs ℓ > 0")
    return float(mpmath.log(mpmath.mpf(consts.kappa_thm.numerator) / consts.kappa_thm.denominator
                            * consts.Lm1) / (consts.ell * consts.d ** n))


def metric_at_infinity_limit(cert: StabilizationCert, place: Place, delta) -> float:
    """lim log ‖X0‖_n(1:0) = -(1/ℓ) · lim (1/d^n) log |top coefficient|."""
    return float(-asymptotic_constant(cert, place, delta) / cert.ell)


def asymptotic_constant(cert: StabilizationCert, place: Place, delta):
    """lim_{|t|→∞} G_{P,v}(t) - ℓ log|t|_v.

    A side: lc(A_{N+j}) = α^(d^j) gives (1/d^N) log|α|. B side: the leading
    coefficients satisfy lc(B_{n+1}) = -lc(B_n)^d/δ, giving
    (1/d^N')(log|β| - log|δ|/(d-1)). Only sides of maximal growth ℓ count."""
    d = cert.d
    vals = []
    if cert.N is not None and Fraction(cert.D, d ** cert.N) == cert.ell:
        vals.append(place.log_abs(cert.alpha) / d ** cert.N)
    if cert.Nb is not None and Fraction(cert.Db, d ** cert.Nb) == cert.ell:
        vals.append((place.log_abs(cert.beta) - place.log_abs(delta) / (d - 1)) / d ** cert.Nb)
    return max(vals)
