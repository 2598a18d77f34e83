"""Points over F_p, p-adic implicit functions and truncated L-series.

A :class:`PSeries2` is an element of Z/p^N [[x - a, y - b]] truncated above
total degree D, stored as a dense (D+1, D+1) array ``c[i, j]`` for the
monomial (x-a)^i (y-b)^j.  The L-series at a point is tau_n evaluated along
the implicit function z(x, y) of f_n = 0, obtained by Newton iteration.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import _accel
from .exactring import BadDenominator, ZpnElem, is_prime
from .mpoly import MultiPoly, evaluate

DEFAULT_PREC = 8
DEFAULT_DEG = 4
POINT_CAP = 101

# coordinate orders (free, free, solved) tried in turn at regular points
PERMUTATIONS = ((0, 1, 2), (0, 2, 1), (1, 2, 0))


class CapExceeded(ValueError):
    pass


class NewtonStall(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# truncated bivariate series


class PSeries2:
    __slots__ = ("c", "p", "N", "D", "center", "M")

    def __init__(self, coeffs, p: int, N: int, D: int, center=(0, 0)):
        self.p, self.N, self.D = p, N, D
        self.M = p**N
        dtype = np.int64 if _accel.series_fits_int64(self.M) else object
        arr = np.zeros((D + 1, D + 1), dtype=dtype)
        src = np.asarray(coeffs, dtype=object)
        rows = min(src.shape[0], D + 1)
        cols = min(src.shape[1], D + 1)
        for i in range(rows):
            for j in range(min(cols, D + 1 - i)):
                arr[i, j] = int(src[i, j]) % self.M
        self.c = arr
        self.center = tuple(int(t) for t in center)

    @classmethod
    def _wrap(cls, arr, like: "PSeries2") -> "PSeries2":
        s = object.__new__(cls)
        s.p, s.N, s.D, s.M, s.center = like.p, like.N, like.D, like.M, like.center
        s.c = arr
        return s

    @classmethod
    def constant(cls, value, p, N, D, center=(0, 0)) -> "PSeries2":
        arr = np.zeros((1, 1), dtype=object)
        arr[0, 0] = _to_residue(value, p, p**N)
        return cls(arr, p, N, D, center)

    @classmethod
    def coordinate(cls, which: int, p, N, D, center) -> "PSeries2":
        """The series of x (which=0) or y (which=1) around ``center``."""
        arr = np.zeros((2, 2), dtype=object)
        arr[0, 0] = center[which]
        if which == 0:
            arr[1, 0] = 1
        else:
            arr[0, 1] = 1
        return cls(arr, p, N, D, center)

    def _same(self, o: "PSeries2"):
        if (o.p, o.N, o.D, o.center) != (self.p, self.N, self.D, self.center):
            raise ValueError("series live in different rings")

    def _scalar(self, s) -> int:
        return _to_residue(s, self.p, self.M)

    def __add__(self, o):
        if isinstance(o, PSeries2):
            self._same(o)
            return PSeries2._wrap((self.c + o.c) % self.M, self)
        arr = self.c.copy()
        arr[0, 0] = (arr[0, 0] + self._scalar(o)) % self.M
        return PSeries2._wrap(arr, self)

    __radd__ = __add__

    def __neg__(self):
        return PSeries2._wrap((-self.c) % self.M, self)

    def __sub__(self, o):
        return self + (-o if isinstance(o, PSeries2) else -_as_scalar(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, PSeries2):
            self._same(o)
            return PSeries2._wrap(_accel.series_mul(self.c, o.c, self.D, self.M), self)
        s = self._scalar(o)
        return PSeries2._wrap((self.c * s) % self.M, self)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = PSeries2.constant(1, self.p, self.N, self.D, self.center)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def const(self) -> int:
        return int(self.c[0, 0])

    def is_unit(self) -> bool:
        return self.const() % self.p != 0

    def inverse(self) -> "PSeries2":
        c0 = self.const()
        if c0 % self.p == 0:
            raise ZeroDivisionError("series with non-unit constant term")
        t = PSeries2.constant(pow(c0, -1, self.M), self.p, self.N, self.D, self.center)
        # t <- t (2 - s t): the error ideal squares each round
        for _ in range(max(1, math.ceil(math.log2(self.D + 1))) + 1):
            t = t * (2 - self * t)
        return t

    def __truediv__(self, o):
        if isinstance(o, PSeries2):
            return self * o.inverse()
        return self * pow(self._scalar(o), -1, self.M)

    def truncate(self, N: int, D: int) -> "PSeries2":
        if N > self.N or D > self.D:
            raise ValueError("can only truncate to lower precision")
        return PSeries2(self.c[: D + 1, : D + 1], self.p, N, D, self.center)

    def mod_p(self) -> np.ndarray:
        out = np.zeros((self.D + 1, self.D + 1), dtype=np.int64)
        for i in range(self.D + 1):
            for j in range(self.D + 1 - i):
                out[i, j] = int(self.c[i, j]) % self.p
        return out

    def coefficient(self, i: int, j: int) -> ZpnElem:
        return ZpnElem(int(self.c[i, j]), self.p, self.N)

    def table(self) -> list[list[int]]:
        """Coefficients c[i][j] for i + j <= D as plain ints."""
        return [[int(self.c[i, j]) for j in range(self.D + 1 - i)] for i in range(self.D + 1)]

    def is_zero(self) -> bool:
        return not any(int(self.c[i, j]) for i in range(self.D + 1) for j in range(self.D + 1 - i))

    def __eq__(self, o):
        return (isinstance(o, PSeries2) and (self.p, self.N, self.D, self.center) == (o.p, o.N, o.D, o.center)
                and self.table() == o.table())

    def __hash__(self):
        return hash((self.p, self.N, self.D, self.center, str(self.table())))

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "D": self.D, "center": list(self.center), "coeffs": self.table()}

    def __repr__(self):
        return f"PSeries2(p={self.p}, N={self.N}, D={self.D}, center={self.center}, {self.table()})"


def _as_scalar(o):
    if isinstance(o, (int, Fraction)):
        return o
    if isinstance(o, ZpnElem):
        return o.r
    if isinstance(o, np.integer):
        return int(o)
    raise TypeError(f"unsupported scalar {o!r}")


def _to_residue(s, p, M) -> int:
    s = _as_scalar(s)
    if isinstance(s, Fraction):
        if s.denominator % p == 0:
            raise BadDenominator(f"{s} is not p-integral for p={p}")
        return s.numerator * pow(s.denominator, -1, M) % M
    return int(s) % M


# ---------------------------------------------------------------------------
# structured evaluation of the family, generic over the value type


def family_values(n: int, x, y, z, need=("f", "fz", "tau")) -> dict:
    """f_n, tau_n and partials of f_exp at (x, y, z) for any ring-like values.

    Works with ints, FpElem, ZpnElem and PSeries2; cross-checked against
    MultiPoly evaluation in the tests.
    """
    xy = x * y
    v = x * x + y * y + z * z - xy * z - 2
    zero, one = 0 * x, 0 * x + 1
    # S_{-2..n}, dS_{-2..n}
    S = {-2: -one, -1: zero}
    dS = {-2: zero, -1: zero}
    for k in range(0, n + 1):
        S[k] = v * S[k - 1] - S[k - 2]
        dS[k] = S[k - 1] + v * dS[k - 1] - dS[k - 2]
    out = {"v": v}
    if "f" in need:
        out["f"] = xy * S[n - 1] - (xy - z) * S[n - 2] - z * S[n]
    if "tau" in need:
        prev, cur = zero, one  # P_{-1}, P_0
        if n == 1:
            pn2 = zero
        else:
            for _ in range(n - 2):
                prev, cur = cur, v * cur - prev + 1
            pn2 = cur
        out["tau"] = (2 - x - y + z) * S[n - 1] + (4 - 2 * x - 2 * y + xy) * pn2
    if {"fx", "fy", "fz"} & set(need):
        dv = xy * dS[n - 1] - (xy - z) * dS[n - 2] - z * dS[n]
        diff = S[n - 1] - S[n - 2]
        if "fx" in need:
            out["fx"] = y * diff + dv * (2 * x - y * z)
        if "fy" in need:
            out["fy"] = x * diff + dv * (2 * y - x * z)
        if "fz" in need:
            out["fz"] = S[n - 2] - S[n] + dv * (2 * z - xy)
    return out


_PARTIAL = ("fx", "fy", "fz")


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True, order=True)
class FpPoint:
    a: int
    b: int
    c: int
    n: int = field(compare=False)
    p: int = field(compare=False)
    on_geometric: bool = field(compare=False)
    nonacyclic: bool = field(compare=False)
    abs_irreducible: bool = field(compare=False)
    dz_nonzero: bool = field(compare=False)
    dx_nonzero: bool = field(default=False, compare=False)
    dy_nonzero: bool = field(default=False, compare=False)

    @classmethod
    def at(cls, a: int, b: int, c: int, n: int, p: int) -> "FpPoint":
        """Recompute all flags from the coordinates."""
        a, b, c = a % p, b % p, c % p
        vals = family_values(n, a, b, c, need=("f", "tau", "fx", "fy", "fz"))
        m = lambda t: t % p  # noqa: E731
        return cls(a, b, c, n, p, m(vals["f"]) == 0, m(vals["tau"]) == 0, m(vals["v"] - 2) != 0,
                   m(vals["fz"]) != 0, m(vals["fx"]) != 0, m(vals["fy"]) != 0)

    @property
    def regular(self) -> bool:
        return self.dx_nonzero or self.dy_nonzero or self.dz_nonzero

    @property
    def in_study_set(self) -> bool:
        return self.on_geometric and self.nonacyclic and self.abs_irreducible and self.dz_nonzero

    @property
    def in_regular_set(self) -> bool:
        """Study set widened to points where only d/dx or d/dy is a unit."""
        return self.on_geometric and self.nonacyclic and self.abs_irreducible and self.regular

    def permutation(self) -> tuple[int, int, int]:
        """Coordinate order (free, free, solved); identity when d/dz is a unit."""
        flags = (self.dx_nonzero, self.dy_nonzero, self.dz_nonzero)
        for perm in PERMUTATIONS:
            if flags[perm[2]]:
                return perm
        raise NewtonStall("point is singular on the reduced surface")

    def to_json(self) -> dict:
        return {"point": [self.a, self.b, self.c], "n": self.n, "p": self.p,
                "on_geometric": self.on_geometric, "nonacyclic": self.nonacyclic,
                "abs_irreducible": self.abs_irreducible, "dz_nonzero": self.dz_nonzero,
                "dx_nonzero": self.dx_nonzero, "dy_nonzero": self.dy_nonzero}


def find_points(n: int, p: int, backend: str | None = None) -> list[FpPoint]:
    """All points of F_p^3 on the reduced geometric surface, with flags."""
    if not (isinstance(p, int) and p > 2 and is_prime(p)):
        raise ValueError("p must be an odd prime")
    if p > POINT_CAP:
        raise CapExceeded(f"p={p} exceeds the enumeration cap {POINT_CAP}")
    vals = _accel.points(n, p, backend)
    f, tau, red, fx, fy, fz = (vals[k] for k in range(6))
    out = []
    for a, b, c in np.argwhere(f == 0):
        a, b, c = int(a), int(b), int(c)
        out.append(FpPoint(a, b, c, n, p, True, bool(tau[a, b, c] == 0), bool(red[a, b, c] != 0),
                           bool(fz[a, b, c] != 0), bool(fx[a, b, c] != 0), bool(fy[a, b, c] != 0)))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Hensel / Newton


def newton_implicit(F: Callable, Fz: Callable, a: int, b: int, c: int, p: int, N: int, D: int) -> PSeries2:
    """Solve F(x, y, z(x, y)) = 0 for a series z with z(a, b) = c mod p.

    ``F`` and ``Fz`` take three series (x, y, z) and return a series.
    """
    X = PSeries2.coordinate(0, p, N, D, (a, b))
    Y = PSeries2.coordinate(1, p, N, D, (a, b))
    Z = PSeries2.constant(c, p, N, D, (a, b))
    steps = max(1, math.ceil(math.log2(N + D + 1)))
    for it in range(steps + 64):
        dz = Fz(X, Y, Z)
        if not dz.is_unit():
            raise NewtonStall("derivative lost its unit constant term during Newton iteration")
        Znew = Z - F(X, Y, Z) * dz.inverse()
        if Znew == Z and it + 1 >= steps:
            break
        Z = Znew
    else:
        raise NewtonStall("Newton iteration did not reach a fixed point")
    if not F(X, Y, Z).is_zero():
        raise NewtonStall("nonzero Hensel defect")
    if (Z.const() - c) % p:
        raise NewtonStall("lifted series left the residue class of the point")
    return Z


def hensel_poly(f: MultiPoly, a: int, b: int, c: int, p: int, N: int, D: int) -> PSeries2:
    """Implicit function of a polynomial f(x, y, z) (first three variables)."""
    fz = f.diff(f.vars[2])
    extra = len(f.vars) - 3
    if extra:
        raise ValueError("expected a polynomial in exactly three variables")
    return newton_implicit(lambda X, Y, Z: evaluate(f, (X, Y, Z)),
                           lambda X, Y, Z: evaluate(fz, (X, Y, Z)), a, b, c, p, N, D)


def _permuted(n, perm, what):
    """f_n-family function of (X, Y, Z) where Z stands for coordinate perm[2]."""
    inv = [0, 0, 0]
    for slot, coord in enumerate(perm):
        inv[coord] = slot

    def call(X, Y, Z):
        slots = (X, Y, Z)
        xyz = [slots[inv[k]] for k in range(3)]
        return family_values(n, *xyz, need=(what,))[what]

    return call


def hensel_implicit(pt: FpPoint, N: int = DEFAULT_PREC, D: int = DEFAULT_DEG, lift=None,
                    perm: tuple | None = None) -> PSeries2:
    """Implicit function of f_exp at ``pt`` solved for the coordinate perm[2].

    ``lift`` overrides the integer lift of the two free coordinates.
    """
    perm = perm or (pt.permutation() if not pt.dz_nonzero else (0, 1, 2))
    coords = (pt.a, pt.b, pt.c)
    a, b, c = (coords[k] for k in perm)
    if lift is not None:
        a, b = lift
        if (a - coords[perm[0]]) % pt.p or (b - coords[perm[1]]) % pt.p:
            raise ValueError("lift does not reduce to the point")
    F = _permuted(pt.n, perm, "f")
    Fz = _permuted(pt.n, perm, _PARTIAL[perm[2]])
    return newton_implicit(F, Fz, a, b, c, pt.p, N, D)


# ---------------------------------------------------------------------------
# L-series


def _rank_mod_p(m, p) -> int:
    m = [[x % p for x in row] for row in m]
    rank = 0
    rows, cols = len(m), len(m[0])
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        iv = pow(m[rank][col], -1, p)
        for r in range(rows):
            if r != rank and m[r][col]:
                f = m[r][col] * iv % p
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


@dataclass
class LReport:
    point: FpPoint
    L: PSeries2
    const_val: int
    lin_x: int
    lin_y: int
    quad_rank: int
    verdict: str
    permutation: tuple
    N: int
    D: int

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "permutation": list(self.permutation),
            "N": self.N,
            "D": self.D,
            "const_val": self.const_val,
            "lin_x": self.lin_x,
            "lin_y": self.lin_y,
            "quad_rank": self.quad_rank,
            "verdict": self.verdict,
            "taylor_mod_p": [[int(t) for t in row[: self.D + 1 - i]] for i, row in enumerate(self.L.mod_p())],
            "L": self.L.to_json(),
        }


def l_series(pt: FpPoint, N: int = DEFAULT_PREC, D: int = DEFAULT_DEG, lift=None, perm=None):
    perm = perm or (pt.permutation() if not pt.dz_nonzero else (0, 1, 2))
    Z = hensel_implicit(pt, N, D, lift, perm)
    X = PSeries2.coordinate(0, pt.p, N, D, Z.center)
    Y = PSeries2.coordinate(1, pt.p, N, D, Z.center)
    return _permuted(pt.n, perm, "tau")(X, Y, Z), perm


def l_function(pt: FpPoint, N: int = DEFAULT_PREC, D: int = DEFAULT_DEG, lift=None) -> LReport:
    """Taylor data of L = tau_n(x, y, z(x, y)) reduced mod p at the point."""
    if D < 2:
        raise ValueError("degree must be >= 2 to read the quadratic part")
    if not pt.on_geometric:
        raise ValueError("point is not on the reduced geometric surface")
    L, perm = l_series(pt, N, D, lift)
    t = L.mod_p()
    p = pt.p
    const_val, lin_x, lin_y = int(t[0, 0]), int(t[1, 0]), int(t[0, 1])
    quad = [[2 * int(t[2, 0]), int(t[1, 1])], [int(t[1, 1]), 2 * int(t[0, 2])]]
    quad_rank = _rank_mod_p(quad, p)
    if const_val != 0 or not pt.in_regular_set:
        verdict = "not-applicable"
    else:
        verdict = "pass" if lin_x == 0 and lin_y == 0 else "fail"
    return LReport(pt, L, const_val, lin_x, lin_y, quad_rank, verdict, tuple(perm), N, D)


def l_survey(n: int, p: int, N: int = DEFAULT_PREC, D: int = DEFAULT_DEG, backend: str | None = None,
             workers: int = 4) -> dict:
    """Run :func:`l_function` over the study set and the permuted regular points.

    Reports come back sorted by point whatever the worker count.
    """
    pts = find_points(n, p, backend)
    excluded = {"acyclic": 0, "reducible": 0, "singular": 0}
    singular_points = []
    todo = []
    for pt in pts:
        if not pt.nonacyclic:
            excluded["acyclic"] += 1
        elif not pt.abs_irreducible:
            excluded["reducible"] += 1
        elif not pt.regular:
            excluded["singular"] += 1
            singular_points.append([pt.a, pt.b, pt.c])
        else:
            todo.append(pt)
    if workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(lambda q: l_function(q, N, D), todo))
    else:
        reports = [l_function(q, N, D) for q in todo]
    study = [r for r in reports if r.point.in_study_set]
    extra = [r for r in reports if not r.point.in_study_set]
    count = lambda rs, v: sum(1 for r in rs if r.verdict == v)  # noqa: E731
    summary = {
        "points_on_surface": len(pts),
        "study_set": len(study),
        "pass": count(study, "pass"),
        "fail": count(study, "fail"),
        "permuted": len(extra),
        "permuted_pass": count(extra, "pass"),
        "permuted_fail": count(extra, "fail"),
        "quad_rank_histogram": {str(k): sum(1 for r in study if r.quad_rank == k) for k in range(3)},
        "excluded": excluded,
        "singular_points": singular_points,
    }
    ok = summary["fail"] == 0 and summary["permuted_fail"] == 0
    return {"n": n, "p": p, "N": N, "D": D, "ok": ok, "summary": summary, "reports": reports}


def recenter_check(pt: FpPoint, N: int = DEFAULT_PREC, D: int = DEFAULT_DEG, shifts=((1, 0), (0, 1), (2, 3))) -> dict:
    """Verdicts for other integer lifts (a + p*s, b + p*t) of the free coordinates."""
    base = l_function(pt, N, D)
    perm = base.permutation
    coords = (pt.a, pt.b, pt.c)
    a, b = coords[perm[0]], coords[perm[1]]
    verdicts = []
    for s, t in shifts:
        r = l_function(pt, N, D, lift=(a + pt.p * s, b + pt.p * t))
        verdicts.append(r.verdict)
    return {"base": base.verdict, "shifted": verdicts, "ok": all(v == base.verdict for v in verdicts)}
