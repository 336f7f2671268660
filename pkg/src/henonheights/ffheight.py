"""Degree growth of the orbit polynomials over Q(t) and the exact rational
function-field height ℓ = lim ℓ_n / d^n."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from .exactring import Poly
from .henon import HenonFamily, InitialPoint, OrbitTable, orbit_polys


@dataclass(frozen=True)
class DegreeProfile:
    degA: tuple[int, ...]
    degB: tuple[int, ...]
    elln: tuple[int, ...]   # elln[0] is unused (set to max(deg a, deg b))

    def to_csv(self) -> str:
        rows = ["n,degA,degB,ell_n"]
        for n in range(len(self.degA)):
            rows.append(f"{n},{self.degA[n]},{self.degB[n]},{self.elln[n]}")
        return "\n".join(rows) + "\n"


def degree_profile(table: OrbitTable) -> DegreeProfile:
    dA = tuple(p.degree for p in table.A)
    dB = tuple(p.degree for p in table.B)
    ell = [max(dA[0], dB[0])]
    for n in range(1, len(dA)):
        ell.append(max(dA[n], dA[n - 1], dB[n - 1], dB[n]))
    return DegreeProfile(dA, dB, tuple(ell))


@dataclass(frozen=True)
class StabilizationCert:
    d: int
    N: int | None
    D: int | None
    alpha: Fraction | None
    Nb: int | None
    Db: int | None
    beta: Fraction | None
    ell: Fraction
    verified_to: int

    @property
    def a_unbounded(self) -> bool:
        return self.N is not None

    @property
    def b_unbounded(self) -> bool:
        return self.Nb is not None

    def to_json(self) -> dict:
        out = asdict(self)
        for k in ("alpha", "beta", "ell"):
            if out[k] is not None:
                out[k] = str(out[k])
        return out


class AssumptionUndetermined(Exception):
    """Neither degree sequence crossed its threshold within the budget."""


UNDETERMINED = "assumption-undetermined"


def _threshold(family: HenonFamily, start: Poly) -> int:
    return 1 + max(family.max_coeff_degree, start.degree)


def _first_crossing(degs, D: int) -> int | None:
    for n in range(1, len(degs)):
        if degs[n] >= D:
            return n
    return None


def stabilize(family: HenonFamily, P: InitialPoint, n_budget: int = 8,
              table: OrbitTable | None = None):
    """Stabilization data per side, or UNDETERMINED if no side crosses its threshold.

    Once deg A_N ≥ D with D = 1 + max(deg c_i, deg a), the top term of
    f_t(A_n) dominates forever, so deg A_{N+j} = d^j deg A_N.
    Same on the B side with deg b."""
    if n_budget < 2:
        raise ValueError("n_budget must be at least 2")
    if table is None or table.n < n_budget:
        table = orbit_polys(family, P, n_budget)
    prof = degree_profile(table)
    d = family.d
    D = _threshold(family, P.a)
    Db = _threshold(family, P.b)
    N = _first_crossing(prof.degA, D)
    Nb = _first_crossing(prof.degB, Db)
    if N is None and Nb is None:
        return UNDETERMINED
    ellA = Fraction(prof.degA[N], d ** N) if N is not None else Fraction(0)
    ellB = Fraction(prof.degB[Nb], d ** Nb) if Nb is not None else Fraction(0)
    ell = max(ellA, ellB)
    # verify the degree law and ℓ_n = d^n ℓ on the computed range
    top = table.n
    for n in range(N or top + 1, top + 1):
        if prof.degA[n] != d ** (n - N) * prof.degA[N]:
            raise ArithmeticError(f"degree law fails on the A side at n={n}")
    for n in range(Nb or top + 1, top + 1):
        if prof.degB[n] != d ** (n - Nb) * prof.degB[Nb]:
            raise ArithmeticError(f"degree law fails on the B side at n={n}")
    return StabilizationCert(
        d=d, N=N, D=prof.degA[N] if N is not None else None,
        alpha=table.A[N].lc() if N is not None else None,
        Nb=Nb, Db=prof.degB[Nb] if Nb is not None else None,
        beta=table.B[Nb].lc() if Nb is not None else None,
        ell=ell, verified_to=top)


def ell_stable_from(cert: StabilizationCert, prof: DegreeProfile) -> int:
    """First n from which ℓ_n = d^n ℓ holds on the computed profile."""
    for n0 in range(1, len(prof.elln)):
        if all(prof.elln[n] == cert.ell * cert.d ** n for n in range(n0, len(prof.elln))):
            return n0
    raise ArithmeticError("ℓ_n never settles on the computed range")


def ff_height(cert) -> Fraction:
    if not isinstance(cert, StabilizationCert):
        raise AssumptionUndetermined("stabilization did not succeed; ℓ is undetermined")
    return cert.ell


def leading_coefficient_law(cert: StabilizationCert, table: OrbitTable, delta: Fraction):
    """Predicted leading coefficients past stabilization.

    A side: lc(A_{N+j}) = α^(d^j). B side: the recursion gives
    lc(B_{n+1}) = -lc(B_n)^d / δ, so lc(B_{N'+j}) = (-1/δ)^((d^j-1)/(d-1)) β^(d^j)."""
    d = cert.d
    out = {"A": [], "B": []}
    if cert.N is not None:
        for j in range(0, table.n - cert.N + 1):
            out["A"].append((cert.N + j, table.A[cert.N + j].lc(), cert.alpha ** (d ** j)))
    if cert.Nb is not None:
        for j in range(0, table.n - cert.Nb + 1):
            e = (d ** j - 1) // (d - 1)
            out["B"].append((cert.Nb + j, table.B[cert.Nb + j].lc(),
                             (-1 / Fraction(delta)) ** e * cert.beta ** (d ** j)))
    return out
