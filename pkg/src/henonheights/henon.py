"""One-parameter Hénon families H_t(x, y) = (δy + f_t(x), x) and their orbit
polynomials A_n(t), B_n(t)."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import mpmath

from .exactring import BiPoly, NumberFieldElem, Poly, Q


class OrbitTooLarge(MemoryError):
    pass


@dataclass(frozen=True)
class HenonFamily:
    """f_t(x) = x^d + sum_i c_i(t) x^(d-i); c holds c_1..c_d."""

    d: int
    delta: Fraction
    c: tuple[Poly, ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("degree must be at least 2")
        object.__setattr__(self, "delta", Q(self.delta))
        if self.delta == 0:
            raise ValueError("delta must be nonzero")
        cs = tuple(c if isinstance(c, Poly) else Poly.const(c) for c in self.c)
        if len(cs) != self.d:
            raise ValueError(f"need {self.d} coefficients c_1..c_d, got {len(cs)}")
        object.__setattr__(self, "c", cs)

    @classmethod
    def quadratic(cls, delta=1) -> "HenonFamily":
        """x^2 + t."""
        return cls(2, Q(delta), (Poly(), Poly.gen()))

    @classmethod
    def power(cls, d: int, delta=1) -> "HenonFamily":
        """x^d + t."""
        return cls(d, Q(delta), tuple([Poly()] * (d - 1) + [Poly.gen()]))

    @property
    def max_coeff_degree(self) -> int:
        return max(c.degree for c in self.c)

    def coeffs_at(self, tau) -> list:
        """c_i(τ) in whatever ring τ lives in."""
        return [_eval(c, tau) for c in self.c]

    def f(self, x, cs: Sequence):
        r = x + cs[0]
        for ci in cs[1:]:
            r = r * x + ci
        return r

    def f_poly(self) -> list[Poly]:
        return list(self.c)

    def fprime(self, x, cs: Sequence):
        """Derivative of f_t in x at x."""
        d = self.d
        r = x * 0 + d
        for i, ci in enumerate(cs[:-1], start=1):
            r = r * x + ci * (d - i)
        return r

    def specialize(self, tau) -> "SpecializedMap":
        return SpecializedMap(self, self.coeffs_at(tau), tau)

    def polymap(self) -> "SpecializedMap":
        """The map over Q[t] itself."""
        return SpecializedMap(self, list(self.c), Poly.gen())

    def to_json(self) -> dict:
        return {"d": self.d, "delta": str(self.delta), "c": [c.to_json() for c in self.c]}

    @classmethod
    def from_json(cls, obj: dict) -> "HenonFamily":
        return cls(int(obj["d"]), Q(obj["delta"]), tuple(Poly.from_json(c) for c in obj["c"]))

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class InitialPoint:
    a: Poly
    b: Poly

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not isinstance(v, Poly):
                object.__setattr__(self, name, Poly.const(v))

    @classmethod
    def const(cls, a, b) -> "InitialPoint":
        return cls(Poly.const(a), Poly.const(b))

    def at(self, tau) -> tuple:
        return _eval(self.a, tau), _eval(self.b, tau)

    @property
    def max_degree(self) -> int:
        return max(self.a.degree, self.b.degree)

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "InitialPoint":
        return cls(Poly.from_json(obj["a"]), Poly.from_json(obj["b"]))

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _eval(p: Poly, tau):
    if isinstance(tau, (mpmath.mpf, mpmath.mpc, complex, float)):
        return p.eval_mp(tau)
    v = p(tau)
    return v


class SpecializedMap:
    """H_τ over a concrete coefficient ring."""

    def __init__(self, family: HenonFamily, cs: Sequence, tau=None):
        self.family = family
        self.cs = list(cs)
        self.tau = tau
        self.delta = family.delta
        self.inv_delta = 1 / family.delta
        self.d = family.d

    def _delta_in(self, x):
        # δ as an element of x's ring; finite fields must see δ invertible
        from .exactring import FiniteFieldElem
        if isinstance(x, FiniteFieldElem):
            dl = x.F(self.delta)
            if dl.is_zero():
                raise ZeroDivisionError("delta is not invertible in this ring")
            return dl, dl.inverse()
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return mpmath.mpf(self.delta.numerator) / self.delta.denominator, \
                mpmath.mpf(self.delta.denominator) / self.delta.numerator
        return self.delta, self.inv_delta

    def f(self, x):
        return self.family.f(x, self.cs)

    def forward(self, pt):
        x, y = pt
        dl, _ = self._delta_in(x)
        return (y * dl + self.f(x), x)

    def backward(self, pt):
        x, y = pt
        _, idl = self._delta_in(y)
        return (y, (x - self.f(y)) * idl)

    def forward_primed(self, pt):
        """H' = j∘H∘j with j(x, y) = (y, x): (x, y) -> (y, δx + f(y))."""
        x, y = pt
        dl, _ = self._delta_in(y)
        return (y, x * dl + self.f(y))

    def iterate(self, pt, n: int):
        step = self.forward if n >= 0 else self.backward
        for _ in range(abs(n)):
            pt = step(pt)
        return pt


def step_forward(point, smap: SpecializedMap):
    return smap.forward(point)


def step_backward(point, smap: SpecializedMap):
    return smap.backward(point)


@dataclass(frozen=True)
class OrbitTable:
    A: tuple
    B: tuple

    @property
    def n(self) -> int:
        return len(self.A) - 1

    def forward_point(self, n: int) -> tuple:
        """H^n(P) = (A_n, A_{n-1})."""
        return self.A[n], self.A[n - 1]

    def backward_point(self, n: int) -> tuple:
        """H^{-n}(P) = (B_{n-1}, B_n)."""
        return self.B[n - 1], self.B[n]

    def to_json(self) -> dict:
        return {"A": [p.to_json() for p in self.A], "B": [p.to_json() for p in self.B]}

    @classmethod
    def from_json(cls, obj: dict) -> "OrbitTable":
        return cls(tuple(Poly.from_json(p) for p in obj["A"]), tuple(Poly.from_json(p) for p in obj["B"]))


def orbit_sequences(cs: Sequence, delta: Fraction, a, b, n: int, f, size_guard=None):
    """A_0..A_n and B_0..B_n over any ring where cs, a, b live."""
    inv = 1 / Q(delta)
    A = [a, delta * b + f(a, cs)] if n >= 1 else [a]
    while len(A) <= n:
        A.append(A[-2] * delta + f(A[-1], cs))
        if size_guard:
            size_guard(A[-1])
    B = [b, (a - f(b, cs)) * inv] if n >= 1 else [b]
    while len(B) <= n:
        B.append((B[-2] - f(B[-1], cs)) * inv)
        if size_guard:
            size_guard(B[-1])
    return A, B


DEFAULT_COEFF_LIMIT = 2 * 10 ** 5   # total coefficient count per polynomial
DEFAULT_BIT_LIMIT = 4 * 10 ** 8     # total numerator bits per polynomial


def _guard(limit_coeffs: int, limit_bits: int):
    def check(p):
        if isinstance(p, Poly):
            if len(p.num) > limit_coeffs:
                raise OrbitTooLarge(f"orbit polynomial degree {p.degree} exceeds guard {limit_coeffs}")
            if len(p.num) * p.height_bits() > limit_bits:
                raise OrbitTooLarge("orbit polynomial coefficients exceed the memory guard")
    return check


def orbit_polys(family: HenonFamily, P: InitialPoint, n: int,
                coeff_limit: int = DEFAULT_COEFF_LIMIT, bit_limit: int = DEFAULT_BIT_LIMIT) -> OrbitTable:
    """Exact A_0..A_n, B_0..B_n in Q[t]."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if family.d ** max(n - 1, 0) * (family.max_coeff_degree + P.max_degree + 1) > 4 * coeff_limit:
        raise OrbitTooLarge(f"n={n} would exceed the degree guard for d={family.d}")
    A, B = orbit_sequences(family.c, family.delta, P.a, P.b, n, family.f, _guard(coeff_limit, bit_limit))
    return OrbitTable(tuple(A), tuple(B))


def orbit_polys_symbolic_b(family: HenonFamily, a: Poly, n: int) -> OrbitTable:
    """Orbit of P = (a(t), b) with b an indeterminate; entries are BiPoly in (t, b)."""
    cs = [BiPoly.from_outer(c) for c in family.c]
    A, B = orbit_sequences(cs, family.delta, BiPoly.from_outer(a), BiPoly.inner_gen(), n, family.f)
    return OrbitTable(tuple(A), tuple(B))


def specialize(obj, tau):
    """Evaluate a Poly, a sequence of Polys or an OrbitTable at τ."""
    if isinstance(obj, OrbitTable):
        return OrbitTable(tuple(_eval(p, tau) for p in obj.A), tuple(_eval(p, tau) for p in obj.B))
    if isinstance(obj, Poly):
        return _eval(obj, tau)
    return [specialize(o, tau) for o in obj]


# ---------------------------------------------------------------------------
# period detection

@dataclass(frozen=True)
class PeriodResult:
    status: str            # "periodic" | "escaped" | "undetermined"
    period: int | None = None
    steps: int = 0
    log10_norm: float | None = None

    def to_json(self) -> dict:
        return {"status": self.status, "period": self.period, "steps": self.steps,
                "log10_norm": self.log10_norm}


def _abs_arch(v, dps: int = 30):
    if isinstance(v, NumberFieldElem):
        with mpmath.workdps(dps):
            return abs(v.embed())
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return abs(mpmath.mpmathify(v))


def escape_certified(smap: SpecializedMap, pt, direction: int = 1, absfn=_abs_arch) -> bool:
    """True when the archimedean sizes guarantee |orbit| -> ∞ in the given direction.

    Forward: |x| ≥ |y|, ε = Σ|c_i|/|x|^i + |δ|/|x|^(d-1) < 1 and |x|^(d-1)(1-ε) > 1.
    Then |x'| ≥ |x|^d (1-ε) > |x| and the same conditions persist along the orbit.
    Backward is the mirror statement on the second coordinate with δ moved across.
    """
    d = smap.d
    cabs = [absfn(c) for c in smap.cs]
    dl = abs(mpmath.mpf(smap.delta.numerator) / smap.delta.denominator)
    x, y = pt
    if direction > 0:
        big, small, gamma, scale = absfn(x), absfn(y), dl, 1
    else:
        big, small, gamma, scale = absfn(y), absfn(x), 1, dl
    if big == 0 or big < small:
        return False
    eps = sum(ci / big ** i for i, ci in enumerate(cabs, start=1)) + gamma / big ** (d - 1)
    return eps < 1 and big ** (d - 1) * (1 - eps) > scale


def detect_period(family: HenonFamily, tau, P, n_max: int = 200, escape_bound=None) -> PeriodResult:
    """Exact orbit of P under H_τ over Q or a number field.

    Returns the least period ≤ n_max, "escaped" once the archimedean size passes
    escape_bound and an escape certificate holds, otherwise "undetermined"."""
    smap = family.specialize(tau)
    if isinstance(P, InitialPoint):
        P = P.at(tau)
    P = tuple(Q(v) if isinstance(v, int) else v for v in P)
    if escape_bound is None:
        escape_bound = 0
    pt = P
    for k in range(1, n_max + 1):
        pt = smap.forward(pt)
        if pt[0] == P[0] and pt[1] == P[1]:
            return PeriodResult("periodic", k, k)
        nrm = max(_abs_arch(pt[0]), _abs_arch(pt[1]))
        if nrm > escape_bound and escape_certified(smap, pt, 1):
            return PeriodResult("escaped", None, k, float(mpmath.log10(nrm)))
    return PeriodResult("undetermined", None, n_max)
