"""Exact periodic-parameter tools: Σ_n(P), the reversible construction of
infinitely many periodic parameters, multiplicity certificates and the
resultant checks for the (0, b) slice."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .exactring import (BiPoly, GF, INF, NumberField, Poly, Q, factor_rational, ff_cycle,
                        is_irreducible, ord_factor, poly_gcd, squarefree_part, sylvester_resultant)
from .henon import HenonFamily, InitialPoint, OrbitTable, orbit_polys, orbit_polys_symbolic_b

ZERO_MARKER = "identically-periodic"


def _diff(table: OrbitTable, P: InitialPoint, n: int) -> tuple[Poly, Poly]:
    """H^n(P) - P = (A_n - a, A_{n-1} - b)."""
    return table.A[n] - P.a, table.A[n - 1] - P.b


def sigma_n(family: HenonFamily, P: InitialPoint, n: int, table: OrbitTable | None = None):
    """Squarefree polynomial whose roots are the t with H_t^n(P_t) = P_t."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if table is None or table.n < n:
        table = orbit_polys(family, P, n)
    u, v = _diff(table, P, n)
    if u.is_zero() and v.is_zero():
        return ZERO_MARKER
    return squarefree_part(poly_gcd(u, v))


# ---------------------------------------------------------------------------
# reversibility

@dataclass(frozen=True)
class Reversibility:
    delta_unit: bool
    f_parity_ok: bool
    on_curve: bool

    @property
    def holds(self) -> bool:
        return self.delta_unit and self.f_parity_ok and self.on_curve


def reversibility(family: HenonFamily, P: InitialPoint) -> Reversibility:
    """δ = ±1, f_t(-δx) = f_t(x) identically, and δa + b = 0."""
    dl = family.delta
    d = family.d
    # coefficient of x^(d-i) in f(-δx) is (-δ)^(d-i) c_i
    parity = (-dl) ** d == 1 and all(c.is_zero() or (-dl) ** (d - i) == 1
                                     for i, c in enumerate(family.c, start=1))
    return Reversibility(abs(dl) == 1, parity, (P.a * dl + P.b).is_zero())


def _require_reversible(family, P):
    r = reversibility(family, P)
    if not r.holds:
        raise ValueError(f"reversibility fails: {r}")


def half_period_poly(family: HenonFamily, P: InitialPoint, m: int, parity: str = "even",
                     table: OrbitTable | None = None) -> Poly:
    """δA_m + A_{m-1} (even), or δA_{m+1} + A_{m-1} for δ = -1 (odd)."""
    _require_reversible(family, P)
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if parity == "odd" and family.delta != -1:
        raise ValueError("odd half-period polynomial needs δ = -1")
    top = m + 1 if parity == "odd" else m
    if table is None or table.n < top:
        table = orbit_polys(family, P, top)
    return table.A[top] * family.delta + table.A[m - 1]


def w_factor(family: HenonFamily, P: InitialPoint, p: int) -> Poly:
    """W_2p = (δA_p + A_{p-1}) / (δA_1 + A_0), checked exact, nonconstant and coprime."""
    if p < 3 or not sympy.isprime(p):
        raise ValueError("p must be an odd prime")
    table = orbit_polys(family, P, p)
    num = half_period_poly(family, P, p, table=table)
    den = half_period_poly(family, P, 1, table=table)
    if den.is_zero():
        raise ValueError("δA_1 + A_0 vanishes identically")
    W, r = num.divmod(den)
    if not r.is_zero():
        raise ArithmeticError(f"δA_1 + A_0 does not divide δA_{p} + A_{p - 1}")
    if W.degree < 1:
        raise ArithmeticError("W is constant")
    if poly_gcd(W, den).degree > 0:
        raise ArithmeticError("W is not coprime to δA_1 + A_0")
    return W


@dataclass(frozen=True)
class SigmaWitness:
    min_poly: Poly
    period: int
    p: int
    residues: dict

    def to_json(self) -> dict:
        return {"min_poly": str(self.min_poly), "coeffs": self.min_poly.to_json()["coeffs"],
                "period": self.period, "p": self.p, "residues_verified": True}


def _orbit_mod(family: HenonFamily, P: InitialPoint, w: Poly, n: int) -> list:
    """Points H^k(P) for k = 0..n with t replaced by a root of w (exact)."""
    K = NumberField(w, check=False)
    t = K.gen()
    smap = family.specialize(t)
    pt = tuple(K(c) for c in P.at(t))
    out = [pt]
    for _ in range(n):
        pt = smap.forward(pt)
        out.append(pt)
    return out


def certify_witness(family: HenonFamily, P: InitialPoint, w: Poly, p: int) -> SigmaWitness:
    """Exact check that P_t has period dividing 2p when w(t) = 0, and the exact period."""
    if not is_irreducible(w):
        raise ValueError("w must be irreducible")
    orbit = _orbit_mod(family, P, w, 2 * p)
    start = orbit[0]
    if orbit[2 * p] != start:
        raise ArithmeticError("H^{2p}(P) differs from P modulo w")
    period = next(k for k in sorted({1, 2, p, 2 * p}) if orbit[k] == start)
    res = {"A_2p_minus_a": "0", "A_2p-1_minus_b": "0", "checked": [k for k in (1, 2, p) if k < period]}
    return SigmaWitness(w.monic(), period, p, res)


def sigma_witnesses(family: HenonFamily, P: InitialPoint, primes: Sequence[int],
                    parallel: bool = True) -> list[SigmaWitness]:
    """One certified witness per odd prime p (lowest-degree irreducible factor of W_2p)."""
    def one(p):
        W = w_factor(family, P, p)
        w = factor_rational(W)[0][0]
        return certify_witness(family, P, w, p)

    if parallel and len(primes) > 1:
        with ThreadPoolExecutor(max_workers=len(primes)) as ex:
            return list(ex.map(one, primes))
    return [one(p) for p in primes]


# ---------------------------------------------------------------------------
# multiplicity

Mat = tuple[tuple[Poly, Poly], tuple[Poly, Poly]]


def _matmul(X: Mat, Y: Mat) -> Mat:
    return tuple(tuple(X[i][0] * Y[0][j] + X[i][1] * Y[1][j] for j in range(2)) for i in range(2))


def _identity(var="t") -> Mat:
    one, zero = Poly.const(1, var), Poly((), var)
    return ((one, zero), (zero, one))


def jacobian_psi(family: HenonFamily, P: InitialPoint, q: int, table: OrbitTable | None = None) -> Mat:
    """Jacobian of H^q at P in the row convention: J(A_0) J(A_1) ... J(A_{q-1}),
    J(x) = [[f'_t(x), 1], [δ, 0]]."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if table is None or table.n < q:
        table = orbit_polys(family, P, q)
    dl = Poly.const(family.delta)
    M = _identity()
    for i in range(q):
        J = ((family.fprime(table.A[i], family.c), Poly.const(1)), (dl, Poly(())))
        M = _matmul(M, J)
    return M


def _vecmat(v: tuple[Poly, Poly], M: Mat) -> tuple[Poly, Poly]:
    return (v[0] * M[0][0] + v[1] * M[1][0], v[0] * M[0][1] + v[1] * M[1][1])


def _ord_vec(v, w: Poly):
    return min(ord_factor(v[0], w), ord_factor(v[1], w))


def _phi_candidates(deg: int) -> list[int]:
    # φ(j) ≥ sqrt(j/2), so φ(j) = deg forces j ≤ 2 deg²
    return [j for j in range(1, 2 * deg * deg + 3) if sympy.totient(j) == deg]


@dataclass(frozen=True)
class EigenOrders:
    orders: tuple[int, ...]
    resolved: bool
    D: int | None


def eigen_orders(trace: Poly, det: Fraction, w: Poly, bound: int = 64) -> EigenOrders:
    """Multiplicative orders of the eigenvalues of a 2×2 matrix over Q[t]/(w).

    N(ξ) = Res_t(w, ξ² - tr(t)ξ + det) vanishes exactly at the eigenvalues over all
    conjugates of the root of w; Galois conjugation preserves orders, so the
    cyclotomic factors of N give the orders. Non-roots of unity count as 1."""
    xi = BiPoly.inner_gen("t", "xi")
    chi = xi * xi - BiPoly.from_outer(trace, "xi") * xi + BiPoly.from_outer(Poly.const(det), "xi")
    N = sylvester_resultant(BiPoly.from_outer(w, "xi"), chi, eliminate="t")
    orders = []
    resolved = True
    for g, _ in factor_rational(N):
        cyc = [j for j in _phi_candidates(g.degree)
               if Poly([Fraction(int(c)) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(j, sympy.Symbol("x"))).all_coeffs())], g.var) == g]
        if cyc:
            if cyc[0] > bound:
                resolved = False
            orders.append(cyc[0])
        else:
            orders.append(1)
    D = math.lcm(*orders) if resolved else None
    return EigenOrders(tuple(orders), resolved, D)


@dataclass(frozen=True)
class MultiplicityCert:
    q: int
    k: int
    min_poly: Poly
    e_q: float | int
    D_q: int | None
    ord_qk: float | int
    remainder_ord: float | int
    verified_equal: bool

    def to_json(self) -> dict:
        return {"q": self.q, "k": self.k, "min_poly": str(self.min_poly), "e_q": self.e_q,
                "D_q": self.D_q, "ord_qk": self.ord_qk, "remainder_ord": self.remainder_ord,
                "verified_equal": self.verified_equal}


def multiplicity_cert(family: HenonFamily, P: InitialPoint, q: int, k: int, w: Poly,
                      bound: int = 64) -> MultiplicityCert:
    """Check ord_w(H^{qk}(P) - P) = ord_w(H^q(P) - P) for k coprime to D_{q,α}, α a root of w."""
    if k < 1:
        raise ValueError("k must be positive")
    table = orbit_polys(family, P, q * k)
    eps = _diff(table, P, q)
    e_q = _ord_vec(eps, w)
    if e_q == 0:
        raise ValueError("root of w is not a parameter with H^q(P) = P")
    Psi = jacobian_psi(family, P, q, table)
    trace = Psi[0][0] + Psi[1][1]
    det = Fraction((-family.delta) ** q)
    eo = eigen_orders(trace % w, det, w, bound)
    if not eo.resolved:
        raise ArithmeticError(f"eigenvalue order exceeds search bound {bound}; D_q unresolved")
    if math.gcd(k, eo.D) != 1:
        raise ValueError(f"hypothesis violated: gcd(k, D_q) = gcd({k}, {eo.D}) ≠ 1")
    lhs = _diff(table, P, q * k)
    ord_qk = _ord_vec(lhs, w)
    # remainder of the first-order expansion: H^{qk}(P) - P - ε·Σ Ψ^i
    S = ((Poly(()), Poly(())), (Poly(()), Poly(())))
    Pw = _identity()
    for _ in range(k):
        S = tuple(tuple(S[i][j] + Pw[i][j] for j in range(2)) for i in range(2))
        Pw = _matmul(Pw, Psi)
    lin = _vecmat(eps, S)
    rem = (lhs[0] - lin[0], lhs[1] - lin[1])
    rem_ord = _ord_vec(rem, w)
    if rem_ord < 2 * e_q:
        raise ArithmeticError("first-order remainder has order below 2 e_q")
    return MultiplicityCert(q, k, w.monic(), e_q, eo.D, ord_qk, rem_ord, ord_qk == e_q)


# ---------------------------------------------------------------------------
# resultants on the (0, b) slice

@dataclass(frozen=True)
class ResultantReport:
    n: int
    poly: Poly
    degree_ok: bool
    leading_unit: bool
    integral: bool
    clo_equal: bool | None
    clo_sign: int | None

    def to_json(self) -> dict:
        return {"n": self.n, "poly": self.poly.to_json(), "degree": self.poly.degree,
                "degree_ok": self.degree_ok, "leading_unit": self.leading_unit,
                "integral": self.integral, "clo_equal": self.clo_equal, "clo_sign": self.clo_sign}


def resultant_in_b(family: HenonFamily, n: int) -> ResultantReport:
    """Res_t(A_n(t), A_{n-1}(t) - b) for P = (0, b) on the family (y + x² + t, x)."""
    if family.d != 2 or abs(family.delta) != 1 or family != HenonFamily.quadratic(family.delta):
        raise ValueError("needs the quadratic family x² + t with δ = ±1")
    if n < 2:
        raise ValueError("n must be at least 2")
    tab = orbit_polys_symbolic_b(family, Poly(()), n)
    b = BiPoly.inner_gen("t", "b")
    R = sylvester_resultant(tab.A[n], tab.A[n - 1] - b, eliminate="t")
    deg_ok = R.degree == 2 ** (n - 1)
    lead = abs(R.lc()) == 1
    integral = R.is_integral()
    clo_eq = clo_sign = None
    if n % 2 == 0:
        m = n // 2
        R2 = sylvester_resultant(tab.A[m] - tab.B[m - 1], tab.A[m - 1] - tab.B[m], eliminate="t")
        if R2 == R:
            clo_eq, clo_sign = True, 1
        elif R2 == -R:
            clo_eq, clo_sign = True, -1
        else:
            clo_eq = False
    return ResultantReport(n, R, deg_ok, lead, integral, clo_eq, clo_sign)


def sigma_empty_certificate(b) -> bool | None:
    """True when Σ((0, b)) is empty because b is not an algebraic integer; None when inapplicable."""
    b = Q(b)
    return True if b.denominator > 1 else None


def finite_field_sigma(p: int, k: int, a, b, delta=1) -> dict:
    """Period of (a, b) under (y + x² + t, x) for every t in F_{p^k}."""
    F = GF(p, k)
    fam = HenonFamily.quadratic(delta)
    A, B = F(a), F(b)
    table = {}
    for t in F.elements():
        smap = fam.specialize(t)
        table[t] = ff_cycle(smap.forward, (A, B), max_steps=4 * (p ** k) ** 2 + 4)
    return table
