"""Exact arithmetic: rational polynomials, bivariate polynomials, resultants,
number fields and finite fields.

Rationals are ``fractions.Fraction``. A ``Poly`` keeps integer numerators over
one common denominator so that large products can go through Kronecker
substitution on big integers.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import gmpy2
import mpmath

INF = math.inf
DEG_ZERO = -1  # degree of the zero polynomial

_KRONECKER_MIN = 24


def Q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


# ---------------------------------------------------------------------------
# integer vector helpers

def _strip(v: list) -> list:
    while v and not v[-1]:
        v.pop()
    return v


def _school_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pack(v: Sequence[int], kb: int) -> int:
    zero = bytes(kb)
    pos = b"".join(x.to_bytes(kb, "little") if x > 0 else zero for x in v)
    neg = b"".join((-x).to_bytes(kb, "little") if x < 0 else zero for x in v)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    ma = max(abs(x) for x in a)
    mb = ma if a is b else max(abs(x) for x in b)
    bound = ma * mb * min(len(a), len(b))
    kb = (bound.bit_length() + 2 + 7) // 8
    k = 8 * kb
    A = gmpy2.mpz(_pack(a, kb))
    R = int(A * A) if a is b else int(A * gmpy2.mpz(_pack(b, kb)))
    neg = R < 0
    if neg:
        R = -R
    n = len(a) + len(b) - 1
    raw = R.to_bytes(kb * (n + 1), "little")
    half, full = 1 << (k - 1), 1 << k
    out, carry = [], 0
    for i in range(n):
        c = int.from_bytes(raw[i * kb:(i + 1) * kb], "little") + carry
        if c >= half:
            c -= full
            carry = 1
        else:
            carry = 0
        out.append(-c if neg else c)
    return out


def int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) < _KRONECKER_MIN:
        return _school_mul(a, b)
    return _kronecker_mul(a, b)


# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial over Q, coefficient index = degree."""

    __slots__ = ("num", "den", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "t"):
        fr = [Q(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in fr]
        self._set(nums, den, var)

    def _set(self, nums: list[int], den: int, var: str) -> None:
        nums = _strip(list(nums))
        if not nums:
            den = 1
        else:
            g = math.gcd(den, *nums)
            if g > 1:
                nums = [x // g for x in nums]
                den //= g
        self.num = tuple(nums)
        self.den = den
        self.var = var

    @classmethod
    def _raw(cls, nums, den: int, var: str = "t") -> "Poly":
        p = cls.__new__(cls)
        p._set(nums, den, var)
        return p

    @classmethod
    def gen(cls, var: str = "t") -> "Poly":
        return cls._raw([0, 1], 1, var)

    @classmethod
    def const(cls, c, var: str = "t") -> "Poly":
        c = Q(c)
        return cls._raw([c.numerator], c.denominator, var)

    @classmethod
    def monomial(cls, c, k: int, var: str = "t") -> "Poly":
        c = Q(c)
        return cls._raw([0] * k + [c.numerator], c.denominator, var)

    # -- basic data
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    @property
    def degree(self) -> int:
        return len(self.num) - 1

    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return len(self.num) <= 1

    def lc(self) -> Fraction:
        return Fraction(self.num[-1], self.den) if self.num else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.num):
            return Fraction(self.num[k], self.den)
        return Fraction(0)

    def is_integral(self) -> bool:
        return self.den == 1

    def height_bits(self) -> int:
        return max([abs(x).bit_length() for x in self.num] + [self.den.bit_length()])

    def __len__(self) -> int:
        return len(self.num)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    # -- arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self.var)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return Poly._raw(other.num, other.den, self.var)
        g = math.gcd(self.den, other.den)
        den = self.den // g * other.den
        fa, fb = den // self.den, den // other.den
        a, b = self.num, other.num
        if len(a) < len(b):
            a, b, fa, fb = b, a, fb, fa
        out = [x * fa for x in a]
        for i, y in enumerate(b):
            out[i] += y * fb
        return Poly._raw(out, den, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([-x for x in self.num], self.den, self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Q(other)
            return Poly._raw([x * c.numerator for x in self.num], self.den * c.denominator, self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        if other is self:
            nums = int_poly_mul(self.num, self.num)
        else:
            nums = int_poly_mul(self.num, other.num)
        return Poly._raw(nums, self.den * other.den, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Q(other)
            if c == 0:
                raise ZeroDivisionError("polynomial division by zero scalar")
            return self * (1 / c)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(1, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dv = other.coeffs
        dlc = dv[-1]
        dd = len(dv) - 1
        if len(r) - 1 < dd:
            return Poly((), self.var), self
        q = [Fraction(0)] * (len(r) - dd)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c:
                c = c / dlc
                q[i - dd] = c
                for j in range(dd + 1):
                    r[i - dd + j] -= c * dv[j]
        return Poly(q, self.var), Poly(r[:dd], self.var)

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def exact_div(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self / other
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return Poly._raw(self.num, self.num[-1], self.var) if self.num[-1] > 0 else \
            Poly._raw([-x for x in self.num], -self.num[-1], self.var)

    def primitive(self) -> "Poly":
        """Integer primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        g = math.gcd(*self.num)
        s = -1 if self.num[-1] < 0 else 1
        return Poly._raw([s * x // g for x in self.num], 1, self.var)

    def derivative(self) -> "Poly":
        return Poly._raw([i * x for i, x in enumerate(self.num)][1:], self.den, self.var)

    def __call__(self, x):
        """Horner evaluation at any value supporting + and * with Fractions."""
        if not self.num:
            return Fraction(0) if not isinstance(x, Poly) else Poly((), x.var)
        if isinstance(x, (mpmath.mpf, mpmath.mpc, complex, float)):
            return self.eval_mp(x)
        cs = self.coeffs
        r = cs[-1]
        for c in reversed(cs[:-1]):
            r = r * x + c
        if isinstance(x, Poly) and not isinstance(r, Poly):
            r = Poly.const(r, x.var)
        return r

    def eval_mp(self, x):
        x = mpmath.mpmathify(x)
        r = mpmath.mpf(0)
        for c in reversed(self.num):
            r = r * x + c
        return r / self.den

    def eval_mod(self, x: int, p: int) -> int:
        den_inv = pow(self.den, -1, p)
        r = 0
        for c in reversed(self.num):
            r = (r * x + c) % p
        return r * den_inv % p

    def map_coeffs(self, fn: Callable) -> list:
        return [fn(c) for c in self.coeffs]

    # -- display and serialisation
    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.num:
            return "0"
        terms = []
        for k in range(len(self.num) - 1, -1, -1):
            c = self.coeff(k)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = self.var if k == 1 else f"{self.var}^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            terms.append((sign, body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "Poly":
        if isinstance(obj, (int, str, Fraction)):
            return cls.const(Q(obj))
        return cls([Q(c) for c in obj["coeffs"]], obj.get("var", "t"))

    def with_var(self, var: str) -> "Poly":
        return Poly._raw(self.num, self.den, var)


def poly_from_roots(roots: Sequence, var: str = "t") -> Poly:
    p = Poly.const(1, var)
    for r in roots:
        p = p * Poly([-Q(r), 1], var)
    return p


# ---------------------------------------------------------------------------
# gcd, ord

def _prem(f: Poly, g: Poly) -> Poly:
    """Pseudo-remainder of integer polynomials (lc(g)^k * f mod g)."""
    r = list(f.num)
    gv = g.num
    dg = len(gv) - 1
    lg = gv[-1]
    while len(r) - 1 >= dg and r:
        c = r[-1]
        shift = len(r) - 1 - dg
        r = [lg * x for x in r]
        for j in range(dg + 1):
            r[shift + j] -= c * gv[j]
        _strip(r)
    return Poly._raw(r, 1, f.var)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd over Q via primitive remainder sequences."""
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    a, b = f.primitive(), g.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        r = _prem(a, b)
        a, b = b, (r.primitive() if not r.is_zero() else r)
    return a.monic()


def is_irreducible(m: Poly) -> bool:
    if m.degree < 1:
        return False
    if m.degree == 1:
        return True
    return _sympy_irreducible(m.num, m.den)


@lru_cache(maxsize=256)
def _sympy_irreducible(num: tuple, den: int) -> bool:
    import sympy
    x = sympy.Symbol("x")
    return bool(sympy.Poly(list(reversed(num)), x, domain="QQ").is_irreducible)


def ord_factor(F: Poly, m: Poly):
    """Largest e with m^e | F; INF when F = 0."""
    if m.degree < 1:
        raise ValueError("ord_factor needs a nonconstant modulus")
    if not is_irreducible(m):
        raise ValueError("ord_factor needs an irreducible modulus")
    if F.is_zero():
        return INF
    e = 0
    while True:
        q, r = F.divmod(m)
        if not r.is_zero():
            return e
        F = q
        e += 1


def squarefree_part(f: Poly) -> Poly:
    if f.degree < 1:
        return f.monic()
    g = poly_gcd(f, f.derivative())
    return f.exact_div(g).monic()


def factor_rational(f: Poly) -> list[tuple[Poly, int]]:
    """Monic irreducible factors over Q with multiplicities, in a fixed order."""
    import sympy
    if f.degree < 1:
        return []
    x = sympy.Symbol("x")
    sp = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f.coeffs)], x, domain="QQ")
    _, facs = sp.factor_list()
    out = []
    for g, e in facs:
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(g.all_coeffs())]
        out.append((Poly(cs, f.var).monic(), int(e)))
    out.sort(key=lambda pe: (pe[0].degree, pe[0].coeffs))
    return out


# ---------------------------------------------------------------------------
# bivariate: polynomials in t with coefficients in Q[b]

class BiPoly:
    """Polynomial in an outer variable whose coefficients are Polys in an inner one."""

    __slots__ = ("cs", "outer", "inner")

    def __init__(self, cs: Iterable = (), outer: str = "t", inner: str = "b"):
        lst = []
        for c in cs:
            if not isinstance(c, Poly):
                c = Poly.const(c, inner)
            lst.append(c.with_var(inner))
        while lst and lst[-1].is_zero():
            lst.pop()
        self.cs = tuple(lst)
        self.outer = outer
        self.inner = inner

    @classmethod
    def outer_gen(cls, outer="t", inner="b") -> "BiPoly":
        return cls([0, 1], outer, inner)

    @classmethod
    def inner_gen(cls, outer="t", inner="b") -> "BiPoly":
        return cls([Poly.gen(inner)], outer, inner)

    @classmethod
    def from_outer(cls, p: Poly, inner="b") -> "BiPoly":
        return cls(list(p.coeffs), p.var, inner)

    @property
    def degree(self) -> int:
        return len(self.cs) - 1

    def is_zero(self) -> bool:
        return not self.cs

    def lc(self) -> Poly:
        return self.cs[-1] if self.cs else Poly((), self.inner)

    def coeff(self, k: int) -> Poly:
        return self.cs[k] if 0 <= k < len(self.cs) else Poly((), self.inner)

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, Poly):
            return BiPoly([other.with_var(self.inner)], self.outer, self.inner)
        if isinstance(other, (int, Fraction)):
            return BiPoly([other], self.outer, self.inner)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.cs == other.cs

    def __hash__(self):
        return hash(self.cs)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.cs), len(other.cs))
        return BiPoly([self.coeff(i) + other.coeff(i) for i in range(n)], self.outer, self.inner)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly([-c for c in self.cs], self.outer, self.inner)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return BiPoly([c * other for c in self.cs], self.outer, self.inner)
        if not isinstance(other, BiPoly):
            return NotImplemented
        if not self.cs or not other.cs:
            return BiPoly((), self.outer, self.inner)
        out = [Poly((), self.inner)] * (len(self.cs) + len(other.cs) - 1)
        for i, x in enumerate(self.cs):
            if x.is_zero():
                continue
            for j, y in enumerate(other.cs):
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return BiPoly(out, self.outer, self.inner)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Q(other))
        return NotImplemented

    def subs_inner(self, value) -> Poly:
        return Poly([c(Q(value)) for c in self.cs], self.outer)

    def swap(self) -> "BiPoly":
        n = 1 + max((c.degree for c in self.cs), default=-1)
        rows = []
        for k in range(n):
            rows.append(Poly([c.coeff(k) for c in self.cs], self.outer))
        return BiPoly(rows, self.inner, self.outer)

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.cs)

    def __repr__(self):
        parts = [f"({c})*{self.outer}^{k}" for k, c in enumerate(self.cs) if not c.is_zero()]
        return "BiPoly(" + (" + ".join(parts) or "0") + ")"


def _bareiss_det(M: list[list], zero, one, is_zero, exact_div):
    n = len(M)
    if n == 0:
        return one
    M = [row[:] for row in M]
    sign = 1
    prev = one
    for k in range(n - 1):
        if is_zero(M[k][k]):
            for i in range(k + 1, n):
                if not is_zero(M[i][k]):
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = exact_div(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def sylvester_matrix(fc: Sequence, gc: Sequence, zero) -> list[list]:
    """Rows of f (deg g of them) first, then rows of g; highest degree leftmost."""
    m, n = len(fc) - 1, len(gc) - 1
    size = m + n
    rows = []
    fr = list(reversed(fc))
    gr = list(reversed(gc))
    for i in range(n):
        rows.append([zero] * i + fr + [zero] * (size - i - len(fr)))
    for i in range(m):
        rows.append([zero] * i + gr + [zero] * (size - i - len(gr)))
    return rows


def resultant(f: Poly, g: Poly) -> Fraction:
    """Res(f, g) over Q as det of the Sylvester matrix (f rows first)."""
    if f.is_zero() and g.is_zero():
        raise ValueError("undefined resultant")
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    M = sylvester_matrix(f.coeffs, g.coeffs, Fraction(0))
    return _bareiss_det(M, Fraction(0), Fraction(1), lambda x: x == 0, lambda a, b: a / b)


def sylvester_resultant(f, g, eliminate: str = "t") -> Poly:
    """Resultant of two bivariate polynomials eliminating the named variable."""
    if isinstance(f, Poly):
        f = BiPoly.from_outer(f)
    if isinstance(g, Poly):
        g = BiPoly.from_outer(g, f.inner)
    if eliminate == f.inner:
        f, g = f.swap(), g.swap()
    elif eliminate != f.outer:
        raise ValueError(f"unknown variable {eliminate!r}")
    if f.is_zero() and g.is_zero():
        raise ValueError("undefined resultant")
    inner = f.inner
    zero = Poly((), inner)
    if f.is_zero() or g.is_zero():
        return zero
    M = sylvester_matrix(f.cs, g.cs, zero)
    return _bareiss_det(M, zero, Poly.const(1, inner), lambda x: x.is_zero(),
                        lambda a, b: a.exact_div(b))


# ---------------------------------------------------------------------------
# number fields Q[θ]/(m)

def _ext_gcd_inverse(a: Poly, m: Poly) -> Poly:
    r0, r1 = m, a % m
    s0, s1 = Poly((), m.var), Poly.const(1, m.var)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if r0.degree != 0:
        raise ZeroDivisionError("element not invertible modulo the minimal polynomial")
    return (s0 / r0.lc()) % m


class NumberField:
    """Q[θ]/(m) with a chosen complex embedding isolating one root of m."""

    def __init__(self, min_poly: Poly, approx=None, check: bool = True, dps: int = 50):
        m = min_poly.monic()
        if m.degree < 1:
            raise ValueError("minimal polynomial must be nonconstant")
        if check and not is_irreducible(m):
            raise ValueError(f"{m} is reducible over Q")
        self.min_poly = m
        with mpmath.workdps(dps):
            roots = _all_roots(m)
            if approx is None:
                approx = max(roots, key=lambda z: (mpmath.re(z), mpmath.im(z)))
            target = mpmath.mpmathify(approx)
            i = min(range(len(roots)), key=lambda j: abs(roots[j] - target))
            root = roots[i]
            others = [abs(roots[j] - root) for j in range(len(roots)) if j != i]
            radius = min(others) / 3 if others else mpmath.mpf(1)
        self.root = root
        self.radius = radius
        self.roots = roots

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.min_poly == other.min_poly \
            and abs(self.root - other.root) < self.radius

    def __hash__(self):
        return hash(self.min_poly)

    def gen(self) -> "NumberFieldElem":
        return NumberFieldElem(self, Poly.gen(self.min_poly.var))

    def __call__(self, value) -> "NumberFieldElem":
        if isinstance(value, NumberFieldElem):
            return value
        if isinstance(value, Poly):
            return NumberFieldElem(self, value)
        return NumberFieldElem(self, Poly.const(value, self.min_poly.var))

    def conjugates(self) -> list["NumberField"]:
        return [_conj_field(self, r) for r in self.roots]

    def __repr__(self):
        return f"NumberField({self.min_poly}, root~{mpmath.nstr(self.root, 12)})"


def _conj_field(K: NumberField, r) -> NumberField:
    L = NumberField.__new__(NumberField)
    L.min_poly = K.min_poly
    L.roots = K.roots
    L.root = r
    others = [abs(s - r) for s in K.roots if s is not r]
    L.radius = min(others) / 3 if others else mpmath.mpf(1)
    return L


def _all_roots(m: Poly):
    cs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(m.coeffs)]
    if m.degree == 1:
        return [mpmath.mpc(-cs[1] / cs[0])]
    return [mpmath.mpc(z) for z in mpmath.polyroots(cs, maxsteps=400, extraprec=4 * mpmath.mp.prec)]


class NumberFieldElem:
    __slots__ = ("field", "value")

    def __init__(self, field: NumberField, value: Poly):
        self.field = field
        self.value = value.with_var(field.min_poly.var) % field.min_poly

    @property
    def min_poly(self) -> Poly:
        return self.field.min_poly

    def _other(self, o):
        if isinstance(o, NumberFieldElem):
            if o.field.min_poly != self.field.min_poly:
                raise ValueError("mismatched number fields")
            return o.value
        if isinstance(o, (int, Fraction)):
            return Poly.const(o, self.field.min_poly.var)
        return NotImplemented

    def __add__(self, o):
        v = self._other(o)
        return NotImplemented if v is NotImplemented else NumberFieldElem(self.field, self.value + v)

    __radd__ = __add__

    def __sub__(self, o):
        v = self._other(o)
        return NotImplemented if v is NotImplemented else NumberFieldElem(self.field, self.value - v)

    def __rsub__(self, o):
        return (-self) + o

    def __neg__(self):
        return NumberFieldElem(self.field, -self.value)

    def __mul__(self, o):
        v = self._other(o)
        return NotImplemented if v is NotImplemented else NumberFieldElem(self.field, self.value * v)

    __rmul__ = __mul__

    def inverse(self) -> "NumberFieldElem":
        if self.value.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        return NumberFieldElem(self.field, _ext_gcd_inverse(self.value, self.field.min_poly))

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return NumberFieldElem(self.field, self.value / o)
        if isinstance(o, NumberFieldElem):
            return self * o.inverse()
        return NotImplemented

    def __rtruediv__(self, o):
        return self.inverse() * o

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = self.field(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        v = self._other(o)
        if v is NotImplemented:
            return NotImplemented
        return self.value == v

    def __hash__(self):
        return hash((self.field.min_poly, self.value))

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def embed(self, field: NumberField | None = None):
        """Complex value under the chosen embedding (or a conjugate field's)."""
        K = field or self.field
        return self.value.eval_mp(K.root)

    def __repr__(self):
        return f"[{self.value} mod {self.field.min_poly}]"


def nf_reduce(value, field: NumberField) -> NumberFieldElem:
    """Reduce a polynomial (or scalar) in the generator modulo the minimal polynomial."""
    if isinstance(value, NumberFieldElem):
        if value.field.min_poly != field.min_poly:
            raise ValueError("mismatched number fields")
        return value
    return field(value)


# ---------------------------------------------------------------------------
# finite fields

def _fp_poly_divmod(a: list[int], b: list[int], p: int):
    a = a[:]
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        s = len(a) - len(b)
        q[s] = c
        for j, y in enumerate(b):
            a[s + j] = (a[s + j] - c * y) % p
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _fp_is_irreducible(f: list[int], p: int) -> bool:
    k = len(f) - 1
    if k <= 1:
        return k == 1
    for d in range(1, k // 2 + 1):
        for idx in range(p ** d):
            g, v = [], idx
            for _ in range(d):
                g.append(v % p)
                v //= p
            g.append(1)
            if not _fp_poly_divmod(f, g, p)[1]:
                return False
    return True


@lru_cache(maxsize=None)
def conway_like_modulus(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree k over F_p, ordering by
    coefficient vector (c_0, ..., c_{k-1}) read as a base-p integer."""
    if k == 1:
        return (0, 1)
    for idx in range(p ** k):
        cs, v = [], idx
        for _ in range(k):
            cs.append(v % p)
            v //= p
        f = cs + [1]
        if _fp_is_irreducible(f, p):
            return tuple(f)
    raise ArithmeticError("no irreducible found")


class GF:
    def __init__(self, p: int, k: int = 1):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p, self.k = p, k
        self.modulus = conway_like_modulus(p, k)

    def __call__(self, v) -> "FiniteFieldElem":
        if isinstance(v, FiniteFieldElem):
            return v
        if isinstance(v, int):
            return FiniteFieldElem(self, (v % self.p,) + (0,) * (self.k - 1))
        if isinstance(v, Fraction):
            return self(v.numerator) * self(v.denominator).inverse()
        return FiniteFieldElem(self, tuple(v))

    def elements(self) -> list["FiniteFieldElem"]:
        out = []
        for idx in range(self.p ** self.k):
            cs, v = [], idx
            for _ in range(self.k):
                cs.append(v % self.p)
                v //= self.p
            out.append(FiniteFieldElem(self, tuple(cs)))
        return out

    def __eq__(self, o):
        return isinstance(o, GF) and (o.p, o.k) == (self.p, self.k)

    def __hash__(self):
        return hash((self.p, self.k))

    def __repr__(self):
        return f"GF({self.p}^{self.k})"


class FiniteFieldElem:
    __slots__ = ("F", "c")

    def __init__(self, F: GF, c: tuple[int, ...]):
        c = tuple(x % F.p for x in c)
        c = c + (0,) * (F.k - len(c))
        self.F, self.c = F, c

    def _o(self, o):
        if isinstance(o, FiniteFieldElem):
            return o
        if isinstance(o, (int, Fraction)):
            return self.F(o)
        return NotImplemented

    def __add__(self, o):
        o = self._o(o)
        if o is NotImplemented:
            return o
        return FiniteFieldElem(self.F, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return FiniteFieldElem(self.F, tuple(-a for a in self.c))

    def __sub__(self, o):
        o = self._o(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._o(o)
        if o is NotImplemented:
            return o
        p = self.F.p
        prod = [0] * (2 * self.F.k - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    prod[i + j] += a * b
        prod = [x % p for x in prod]
        while prod and prod[-1] == 0:
            prod.pop()
        _, r = _fp_poly_divmod(prod, list(self.F.modulus), p) if len(prod) > self.F.k else (None, prod)
        return FiniteFieldElem(self.F, tuple(r))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        r, b = self.F(1), self
        if e < 0:
            return self.inverse() ** (-e)
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def is_zero(self) -> bool:
        return not any(self.c)

    def inverse(self) -> "FiniteFieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.F.p ** self.F.k - 2)

    def __truediv__(self, o):
        o = self._o(o)
        return self * o.inverse()

    def __eq__(self, o):
        o = self._o(o)
        if o is NotImplemented:
            return False
        return self.c == o.c

    def __hash__(self):
        return hash((self.F.p, self.c))

    def __repr__(self):
        if self.F.k == 1:
            return f"{self.c[0]}"
        return "(" + " + ".join(f"{a}*z^{i}" for i, a in enumerate(self.c) if a) + ")" if any(self.c) else "0"


def ff_cycle(step: Callable, start, max_steps: int | None = None) -> int:
    """Least n >= 1 with step^n(start) == start, via Brent's cycle finding.

    Raises if start lies on a tail rather than a cycle (step not bijective)."""
    power = lam = 1
    tortoise = start
    hare = step(start)
    count = 1
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
        count += 1
        if max_steps is not None and count > max_steps:
            raise RuntimeError("cycle search exceeded step budget")
    # tail length mu: start is periodic iff mu == 0
    x = start
    for _ in range(lam):
        x = step(x)
    if x != start:
        raise ArithmeticError("start point is not periodic")
    return lam
