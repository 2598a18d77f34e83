"""Character-variety and torsion polynomials of the Whitehead link W and the
odd twisted Whitehead links W_{2n-1}, and the checks built on them.

All polynomials live in Q[x, y, z, v] with x = Tr m, y = Tr mu,
z = Tr m*mu and v = x^2 + y^2 + z^2 - xyz - 2.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import chebfam as cf
from .exactring import QQ, QuotientRing, umonic
from .groebner import (
    IdealBasis,
    buchberger,
    buchberger_split,
    elimination_ideal,
    is_groebner,
    is_trivial,
    radical_member,
    saturate,
)
from .mpoly import VARS, MonomialOrder, MultiPoly, equal_up_to_unit

x, y, z, v = MultiPoly.gens(VARS)
ONE = MultiPoly.const(1, VARS)


class IdentityFailure(AssertionError):
    pass


class SaturationMismatch(AssertionError):
    pass


class BasisMismatch(AssertionError):
    pass


def trace_expr() -> MultiPoly:
    """x^2 + y^2 + z^2 - xyz - 2, the value of v in trace coordinates."""
    return x**2 + y**2 + z**2 - x * y * z - 2


def whitehead_f() -> MultiPoly:
    return x * y * z**2 - z * (x**2 + y**2 + z**2) + x * y + 2 * z


def whitehead_tau() -> MultiPoly:
    return 2 * (2 + z - x - y)


def reducible_poly() -> MultiPoly:
    return x**2 + y**2 + z**2 - x * y * z - 4


def diagonal_poly() -> MultiPoly:
    """Tr mu = Tr mu*upsilon, written in (x, y, z)."""
    return x * y * z - y**2 - z**2 - x + 2


@dataclass(frozen=True)
class FamilyPolys:
    n: int
    f_n: MultiPoly
    tau_n: MultiPoly
    trace_rel: MultiPoly
    reducible: MultiPoly

    @functools.cached_property
    def f_exp(self) -> MultiPoly:
        return self.f_n.subs("v", trace_expr())

    @functools.cached_property
    def tau_exp(self) -> MultiPoly:
        return self.tau_n.subs("v", trace_expr())

    @functools.cached_property
    def chain_partials(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        """Partials of f_exp written back in (x, y, z, v) via the chain rule."""
        dv = self.f_n.diff("v")
        return (
            self.f_n.diff("x") + dv * (2 * x - y * z),
            self.f_n.diff("y") + dv * (2 * y - x * z),
            self.f_n.diff("z") + dv * (2 * z - x * y),
        )

    @functools.cached_property
    def exp_partials(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        f = self.f_exp
        return f.diff("x"), f.diff("y"), f.diff("z")


@functools.lru_cache(maxsize=None)
def family_polys(n: int) -> FamilyPolys:
    if n < 1:
        raise ValueError("n must be >= 1")
    S = cf.S
    f_n = x * y * S(n - 1) - (x * y - z) * S(n - 2) - z * S(n)
    tau_n = (2 - x - y + z) * S(n - 1) + (4 - 2 * x - 2 * y + x * y) * cf.P(n - 2)
    trace_rel = trace_expr() - v
    return FamilyPolys(n, f_n, tau_n, trace_rel, reducible_poly())


# ---------------------------------------------------------------------------
# certificates


@dataclass
class MultiplicityCertificate:
    check: str
    n: int | None
    component: list[MultiPoly]
    multiplicity: int
    evidence: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e["holds"] for e in self.evidence)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "n": self.n,
            "component": [g.to_json() for g in self.component],
            "multiplicity": self.multiplicity,
            "evidence": self.evidence,
        }


_EVIDENCE: dict[str, Callable[..., dict]] = {}


def _evidence(fn):
    _EVIDENCE[fn.__name__] = fn
    return fn


def _item(name, holds, **data):
    return {"name": name, "holds": bool(holds), **data}


def _run(name, **params):
    out = _EVIDENCE[name](**params)
    out["params"] = params
    return out


def _jacobian_rank(forms, vars_=("x", "y", "z")) -> int | None:
    """Rank of the Jacobian of affine-linear forms (None if some form is not linear)."""
    rows = []
    for g in forms:
        if g.degree() > 1:
            return None
        rows.append([Fraction(g.diff(w).constant_term()) for w in vars_])
    rank, col = 0, 0
    rows = [r[:] for r in rows]
    ncols = len(vars_)
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                fac = rows[i][col] / rows[rank][col]
                rows[i] = [a - fac * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


# ---------------------------------------------------------------------------
# Whitehead link


@_evidence
def square_factor_identity() -> dict:
    lhs = whitehead_f().subs("z", x + y - 2)
    rhs = (x + y - 1) ** 2 * (x - 2) * (y - 2)
    diff = lhs - rhs
    return _item("square_factor_identity", diff.is_zero(), difference=str(diff),
                 expanded=rhs.to_json())


@_evidence
def reducible_witness(fix: str) -> dict:
    other = "y" if fix == "x" else "x"
    q = reducible_poly().subs(fix, 2 * ONE).subs("z", MultiPoly.gens(VARS)[VARS.index(other)])
    return _item("reducible_witness", q.is_zero(), substitution={fix: "2", "z": other}, value=str(q))


@_evidence
def line_membership() -> dict:
    L = [x + y - 1, z + 1]
    G = buchberger(IdealBasis(L), track=True)
    half_tau = whitehead_tau() * Fraction(1, 2)
    explicit = -(x + y - 1) + (z + 1)
    f_on_line = whitehead_f().subs("y", 1 - x).subs("z", -ONE)
    holds = G.contains(half_tau) and (half_tau - explicit).is_zero() and f_on_line.is_zero() \
        and G.contains(whitehead_f())
    return _item("line_membership", holds, cofactors=["-1", "1"], gb_hash=G.hash())


@_evidence
def line_transversality() -> dict:
    r = _jacobian_rank([x + y - 1, z + 1])
    return _item("line_transversality", r == 2, jacobian_rank=r)


def whitehead_divisor_check() -> MultiplicityCertificate:
    cert = MultiplicityCertificate("whitehead-divisor", None, [x + y - 1, z + 1], 2)
    cert.evidence.append(_run("square_factor_identity"))
    cert.evidence.append(_run("reducible_witness", fix="x"))
    cert.evidence.append(_run("reducible_witness", fix="y"))
    cert.evidence.append(_run("line_membership"))
    cert.evidence.append(_run("line_transversality"))
    if not cert.ok:
        bad = [e["name"] for e in cert.evidence if not e["holds"]]
        raise IdentityFailure(f"Whitehead divisor evidence failed: {bad}")
    return cert


# ---------------------------------------------------------------------------
# smoothness


def smooth_geometric(n: int, route: str = "four-var") -> dict:
    """Is V(f_exp) free of singular points?

    ``route="four-var"`` works in Q[x,y,z,v] with the trace relation adjoined
    and chain-rule partials (same ideal, much cheaper); ``"direct"`` uses
    f_exp and its partials in Q[x,y,z].
    """
    fp = family_polys(n)
    if route == "four-var":
        gens = [fp.trace_rel, fp.f_n, *fp.chain_partials]
    elif route == "direct":
        gens = [fp.f_exp, *fp.exp_partials]
    else:
        raise ValueError(f"unknown route {route!r}")
    G = buchberger(IdealBasis(gens))
    return {"route": route, "trivial": G.is_one(), "gb_hash": G.hash(), "gb_size": len(G)}


def smooth_parity(n: int) -> list[dict]:
    """Singular points of the trace surface over each parity factor of S_{n-1}."""
    out = []
    xyz = ("x", "y", "z")
    for label, g in zip(("odd", "even"), cf.parity_split_coeffs(n)):
        if len(g) <= 1:
            out.append({"factor": label, "modulus": [str(c) for c in g], "trivial": True, "branches": 0})
            continue
        R = QuotientRing(g, "v")
        X, Y, Z = MultiPoly.gens(xyz, R)
        vv = R.gen()
        gens = [X**2 + Y**2 + Z**2 - X * Y * Z - 2 - vv, 2 * X - Y * Z, 2 * Y - X * Z, 2 * Z - X * Y]
        branches = buchberger_split(IdealBasis(gens))
        # same question in Q[x,y,z,v] with g(v) adjoined, as an independent route
        g4 = MultiPoly.from_univariate(g, "v", VARS)
        cross = is_trivial([family_polys(n).trace_rel, 2 * x - y * z, 2 * y - x * z, 2 * z - x * y, g4])
        triv = all(G.is_one() for _, G in branches)
        out.append({
            "factor": label,
            "modulus": [str(c) for c in g],
            "trivial": triv and cross,
            "branches": len(branches),
            "four_var_agrees": triv == cross,
        })
    return out


def smoothness_report(n: int, route: str = "four-var") -> dict:
    geo = smooth_geometric(n, route)
    par = smooth_parity(n) if n >= 2 else []
    ok = geo["trivial"] and all(p["trivial"] for p in par)
    return {"ok": ok, "geometric": geo, "parity": par}


def smoothness_check(n: int, route: str = "four-var") -> bool:
    return smoothness_report(n, route)["ok"]


# ---------------------------------------------------------------------------
# non-geometric components


def _reduce_mod_v(p: MultiPoly, g: tuple) -> MultiPoly:
    """Reduce the v-coefficients of p modulo the monic univariate g(v)."""
    if g == (1,):
        return MultiPoly({}, p.vars)
    G = buchberger(IdealBasis([MultiPoly.from_univariate(g, "v", p.vars)]))
    return G.normal_form(p)


def nongeometric_check(n: int) -> dict:
    if n < 2:
        raise ValueError("n must be >= 2")
    fp = family_polys(n)
    g_odd, g_even = cf.parity_split_coeffs(n)
    ev = []
    # (a) the torsion vanishes identically on even-k components
    r = _reduce_mod_v(fp.tau_n, g_even)
    ev.append(_item("tau_vanishes_mod_g_even", r.is_zero(), remainder=str(r)))
    # (b) on odd-k components (2 - v) tau_n = 2 (2 - x)(2 - y)
    r = _reduce_mod_v((2 - v) * fp.tau_n - 2 * (2 - x) * (2 - y), g_odd)
    ev.append(_item("tau_is_product_mod_g_odd", r.is_zero(), remainder=str(r), unit="2-v"))
    # (c) x = 2 slices the trace surface into two lines
    d = fp.trace_rel.subs("x", 2 * ONE) - ((y - z) ** 2 - (v - 2))
    ev.append(_item("slice_is_two_lines", d.is_zero(), difference=str(d)))
    # (d) multiplicity one: lines are reduced (v - 2 a unit), the surface is
    # smooth along them, the line forms are transverse and (2-x), (2-y) cut
    # different lines
    if len(g_odd) > 1:
        go = MultiPoly.from_univariate(g_odd, "v", VARS)
        tr = fp.trace_rel
        grad = [2 * x - y * z, 2 * y - x * z, 2 * z - x * y]
        v2_unit = is_trivial([go, v - 2])
        smooth_x = is_trivial([x - 2, tr, go, *grad])
        smooth_y = is_trivial([y - 2, tr, go, *grad])
        distinct = not radical_member(2 - y, [x - 2, tr, go])
        rank = _jacobian_rank([x - 2, y - z], ("x", "y", "z"))
        ev.append(_item("odd_lines_multiplicity_one", v2_unit and smooth_x and smooth_y and distinct and rank == 2,
                        v_minus_2_unit=v2_unit, surface_smooth_on_x2=smooth_x,
                        surface_smooth_on_y2=smooth_y, x_and_y_lines_distinct=distinct,
                        line_jacobian_rank=rank))
    ok = all(e["holds"] for e in ev)
    return {"ok": ok, "n": n, "g_odd": [str(c) for c in g_odd], "g_even": [str(c) for c in g_even],
            "evidence": ev}


# ---------------------------------------------------------------------------
# geometric component


@dataclass(frozen=True)
class GeometricGens:
    U: MultiPoly
    Zrel: MultiPoly
    G: MultiPoly
    H: MultiPoly
    M: MultiPoly
    units: tuple


@functools.lru_cache(maxsize=None)
def geometric_gens(n: int) -> GeometricGens:
    Tn, Tn1 = cf.T(n), cf.T(n - 1)
    U = 2 * Tn - v + 2
    Zrel = U * z - (Tn + Tn1) * (x + y - 2)
    G = U * x * y - Tn * (v + 2) * (x + y - 2)
    H = (Tn + 2) * (x + y) - (v + 2)
    M = (Tn + 2) * (x - y) * U
    units = (cf.S(n - 1), v - 2, Tn - 2, Tn + 2, U)
    return GeometricGens(U, Zrel, G, H, M, units)


@_evidence
def torsion_linear_in_z(n: int) -> dict:
    fp = family_polys(n)
    S1, P2 = cf.S(n - 1), cf.P(n - 2)
    rhs = (x + y - 2) * (S1 + 2 * P2) - x * y * P2 - z * S1
    d = -fp.tau_n - rhs
    return _item("torsion_linear_in_z", d.is_zero(), difference=str(d))


def _sat_gb(gens, units):
    I = saturate(IdealBasis(gens), list(units))
    return buchberger(I, MonomialOrder.grevlex(VARS))


@_evidence
def saturated_equality(n: int, drop_tn_plus_2: bool = False) -> dict:
    fp = family_polys(n)
    gg = geometric_gens(n)
    units = [u for i, u in enumerate(gg.units) if not (drop_tn_plus_2 and i == 3)]
    A = _sat_gb([fp.trace_rel, fp.f_n, fp.tau_n], units)
    B = _sat_gb([gg.Zrel, gg.G, gg.H**2], units)
    same = A.elements == B.elements
    out = _item("saturated_equality", same, lhs_hash=A.hash(), rhs_hash=B.hash(), gb_size=len(A))
    if not same:
        out["lhs_only"] = [str(g) for g in A.elements if g not in B.elements]
        out["rhs_only"] = [str(g) for g in B.elements if g not in A.elements]
    return out


@_evidence
def gh_transversality(n: int) -> dict:
    gg = geometric_gens(n)
    J = _sat_gb([gg.Zrel, gg.G, gg.H], gg.units)
    JM = buchberger(saturate(IdealBasis(J.elements), gg.M), MonomialOrder.grevlex(VARS))
    holds = not J.is_one() and not JM.is_one()
    return _item("gh_transversality", holds, reduced_hash=J.hash(), after_minor_hash=JM.hash(),
                 reduced_trivial=J.is_one(), after_minor_trivial=JM.is_one(),
                 minor_saturation_unchanged=J.elements == JM.elements)


@_evidence
def gb_postcheck(n: int) -> dict:
    fp = family_polys(n)
    gg = geometric_gens(n)
    A = _sat_gb([fp.trace_rel, fp.f_n, fp.tau_n], gg.units)
    return _item("gb_postcheck", is_groebner(A), gb_hash=A.hash())


def geometric_mult_check(n: int, open_question: bool = True) -> MultiplicityCertificate:
    """Certificate that the torsion has multiplicity two on V(f_n).

    With ``open_question`` the saturated equality is also re-run without the
    factor T_n + 2 and the outcome is stored (informational, never fatal).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    fp = family_polys(n)
    cert = MultiplicityCertificate("geometric-mult", n, [fp.trace_rel, fp.f_n], 2)
    cert.evidence.append(_run("torsion_linear_in_z", n=n))
    cert.evidence.append(_run("saturated_equality", n=n))
    cert.evidence.append(_run("gh_transversality", n=n))
    cert.evidence.append(_run("gb_postcheck", n=n))
    if open_question:
        alt = _run("saturated_equality", n=n, drop_tn_plus_2=True)
        alt["informational"] = True
        # informational items must not make a correct certificate fail
        alt["holds_without_tn_plus_2"] = alt.pop("holds")
        alt["holds"] = True
        cert.evidence.append(alt)
    return cert


def _replay_informational(**params):
    out = saturated_equality(**params)
    out["informational"] = True
    out["holds_without_tn_plus_2"] = out.pop("holds")
    out["holds"] = True
    return out


def _verify_item(item) -> dict:
    if item.get("informational"):
        fresh = _replay_informational(**item["params"])
        fresh["params"] = item["params"]
        return fresh
    return _run(item["name"], **item.get("params", {}))


def verify_certificate(cert) -> bool:
    """Re-run every evidence item named in ``cert`` and compare outcomes.

    Accepts a :class:`MultiplicityCertificate` or its JSON form.
    """
    data = cert.to_json() if isinstance(cert, MultiplicityCertificate) else cert
    for item in data["evidence"]:
        fresh = _verify_item(item)
        if not fresh["holds"] or fresh != item:
            return False
    return True


# ---------------------------------------------------------------------------
# elimination on the diagonal


def diagonal_elimination_check() -> dict:
    f = whitehead_f()
    D = diagonal_poly()
    E = elimination_ideal(IdealBasis([f, D]), ["z"])
    expected = (x + y - 1) * (x - y - 1) * (x - 2) * x
    gens = E.generators
    principal = len(gens) == 1
    unit = equal_up_to_unit(gens[0], expected) if principal else None
    exact = unit is not None
    # expected lies in the elimination ideal and vice versa (radical level)
    G = buchberger(IdealBasis([f, D]))
    in_ideal = G.contains(expected)
    radical_both = all(radical_member(g, [expected]) for g in gens) and radical_member(expected, gens)
    status = "pass" if exact and in_ideal else ("pass" if radical_both else "fail")
    report = {
        "ok": status == "pass",
        "status": status,
        "basis": [g.to_json() for g in gens],
        "basis_str": [str(g) for g in gens],
        "expected": expected.to_json(),
        "exact_principal_match": exact,
        "unit": None if unit is None else str(unit),
        "expected_in_ideal": in_ideal,
        "same_radical": radical_both,
        "point_on_line": str(D(Fraction(1, 2), Fraction(1, 2), -1, 0)),
    }
    if status == "fail":
        raise BasisMismatch(f"elimination basis {report['basis_str']} differs from the expected quartic")
    return report


def equal_up_to_units(p: MultiPoly, q: MultiPoly, units=(), max_power: int = 2):
    """Find c and exponents k_i with p == c * prod(units_i^k_i) * q.

    Searches k_i in [-max_power, max_power]; returns ``(c, ks)`` or None.
    """
    import itertools

    if not units:
        c = equal_up_to_unit(p, q)
        return None if c is None else (c, ())
    for ks in itertools.product(range(-max_power, max_power + 1), repeat=len(units)):
        lhs, rhs = p, q
        for u, k in zip(units, ks):
            if k > 0:
                rhs = rhs * u**k
            elif k < 0:
                lhs = lhs * u ** (-k)
        c = equal_up_to_unit(lhs, rhs)
        if c is not None:
            return c, ks
    return None


__all__ = [
    "FamilyPolys", "family_polys", "MultiplicityCertificate", "verify_certificate",
    "whitehead_f", "whitehead_tau", "reducible_poly", "diagonal_poly", "trace_expr",
    "whitehead_divisor_check", "smoothness_check", "smoothness_report", "nongeometric_check",
    "geometric_gens", "geometric_mult_check", "diagonal_elimination_check", "equal_up_to_units",
    "IdentityFailure", "SaturationMismatch", "BasisMismatch",
]
