"""Buchberger's algorithm and ideal-theoretic predicates built on it.

Internally a monomial is the tuple ``W.e + e`` where ``W`` is the integer
weight matrix of the monomial order (see
:meth:`MonomialOrder.weight_rows`).  Because ``W`` is linear, monomial
multiplication is componentwise addition of these tuples and the order is
plain tuple comparison.  The trailing ``len(vars)`` entries are the
exponents, used for divisibility.
"""
from __future__ import annotations

import contextlib
import contextvars
import hashlib
import json
import time
from fractions import Fraction
from typing import Iterable, Sequence

from .exactring import (
    QQ,
    NotAUnit,
    PrimeField,
    QuotElem,
    QuotientRing,
    Ring,
    inv,
    normalize_rational,
    udivmod,
    umonic,
)
from .mpoly import VARS, MonomialOrder, MultiPoly

try:  # gmpy2 rationals are several times faster than Fraction in the kernel
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpq = None


class ZeroDivisorHit(ArithmeticError):
    """A leading coefficient in Q[v]/(g) turned out to be a zero divisor.

    ``factor`` is the nontrivial monic factor of ``g`` that was found.
    """

    def __init__(self, factor, ring):
        super().__init__(f"zero divisor in {ring}: factor {factor}")
        self.factor = tuple(factor)
        self.ring = ring


class BudgetExceeded(RuntimeError):
    pass


class NotGroebner(AssertionError):
    pass


# ---------------------------------------------------------------------------
# time budget shared by all GB runs in a context

_deadline: contextvars.ContextVar[float | None] = contextvars.ContextVar("torsdiv_deadline", default=None)


@contextlib.contextmanager
def time_budget(seconds: float | None):
    """Abort GB computations inside the block after ``seconds``."""
    if seconds is None:
        yield
        return
    end = time.monotonic() + seconds
    outer = _deadline.get()
    if outer is not None:
        end = min(end, outer)
    token = _deadline.set(end)
    try:
        yield
    finally:
        _deadline.reset(token)


def _check_budget():
    d = _deadline.get()
    if d is not None and time.monotonic() > d:
        raise BudgetExceeded("time budget exhausted during Groebner computation")


# ---------------------------------------------------------------------------
# coefficient domains used by the kernel


class _Domain:
    mod = 0

    def __init__(self, ring: Ring):
        self.ring = ring

    def to(self, c):
        return c

    def back(self, c):
        return c

    def inv(self, c):
        return inv(c)


class _QQDomain(_Domain):
    def to(self, c):
        if _mpq is None:
            return Fraction(c)
        if isinstance(c, Fraction):
            return _mpq(c.numerator, c.denominator)
        return _mpq(c)

    def back(self, c):
        if _mpq is None:
            return normalize_rational(c)
        n, d = int(c.numerator), int(c.denominator)
        return n if d == 1 else Fraction(n, d)

    def inv(self, c):
        return 1 / c


class _FpDomain(_Domain):
    def __init__(self, ring: PrimeField):
        super().__init__(ring)
        self.mod = ring.p

    def to(self, c):
        return c.r

    def back(self, c):
        return self.ring.coerce(c)

    def inv(self, c):
        return pow(c, -1, self.mod)


class _QuotDomain(_Domain):
    def inv(self, c):
        try:
            return inv(c)
        except NotAUnit as exc:
            raise ZeroDivisorHit(exc.factor, self.ring) from None


def _domain(ring: Ring) -> _Domain:
    if ring == QQ:
        return _QQDomain(ring)
    if isinstance(ring, PrimeField):
        return _FpDomain(ring)
    if isinstance(ring, QuotientRing):
        return _QuotDomain(ring)
    raise TypeError(f"Groebner bases need field-like coefficients, not {ring}")


# ---------------------------------------------------------------------------
# encoded monomials


class _Encoder:
    def __init__(self, order: MonomialOrder, vars_: tuple):
        self.rows = order.weight_rows(vars_)
        self.n = len(vars_)
        self.k = len(self.rows)
        self._nz = [[(j, w) for j, w in enumerate(r) if w] for r in self.rows]

    def enc(self, e):
        return tuple(sum(w * e[j] for j, w in r) for r in self._nz) + tuple(e)

    def exps(self, m):
        return m[self.k:]


def _divides(a_exp, b_exp):
    for x, y in zip(a_exp, b_exp):
        if x > y:
            return False
    return True


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class _Kernel:
    """Buchberger state for one (ring, order, vars) triple."""

    def __init__(self, ring: Ring, order: MonomialOrder, vars_: tuple):
        self.dom = _domain(ring)
        self.mod = self.dom.mod
        self.enc = _Encoder(order, vars_)
        self.k = self.enc.k
        self.steps = 0

    # conversion ------------------------------------------------------------
    def load(self, p: MultiPoly) -> dict:
        to, enc = self.dom.to, self.enc.enc
        return {enc(e): to(c) for e, c in p.terms.items()}

    def unload(self, f: dict, vars_, ring) -> MultiPoly:
        k, back = self.k, self.dom.back
        return MultiPoly({m[k:]: back(c) for m, c in f.items()}, vars_, ring)

    # arithmetic ------------------------------------------------------------
    def monic(self, f: dict, cof=None):
        lm = max(f)
        c = f[lm]
        if c == 1:
            return f, cof
        ic = self.dom.inv(c)
        mod = self.mod
        if mod:
            f = {m: a * ic % mod for m, a in f.items()}
        else:
            f = {m: a * ic for m, a in f.items()}
        if cof is not None:
            cof = [self._scale(q, ic) for q in cof]
        return f, cof

    def _scale(self, q, c):
        mod = self.mod
        if mod:
            return {m: a * c % mod for m, a in q.items() if a * c % mod}
        return {m: a * c for m, a in q.items()}

    def _axpy(self, f: dict, c, shift, g: dict):
        """f <- f - c * shift * g (in place)."""
        mod = self.mod
        for m, a in g.items():
            mm = _add(m, shift)
            v = f.get(mm)
            if v is None:
                v = (-c * a) % mod if mod else -c * a
                if v:  # products can vanish over Q[v]/(g) with g reducible
                    f[mm] = v
            else:
                v = v - c * a
                if mod:
                    v %= mod
                if v:
                    f[mm] = v
                else:
                    del f[mm]

    def reduce(self, f: dict, basis: list, cof=None, bcof=None, full: bool = True):
        """Normal form of ``f`` w.r.t. the monic polynomials in ``basis``."""
        k = self.k
        lms = [(max(g), max(g)[k:]) for g in basis]
        f = dict(f)
        r = {}
        if cof is not None:
            cof = [dict(q) for q in cof]
        count = 0
        while f:
            m = max(f)
            mexp = m[k:]
            for i, (lm, lexp) in enumerate(lms):
                if _divides(lexp, mexp):
                    c = f[m]
                    shift = _sub(m, lm)
                    self._axpy(f, c, shift, basis[i])
                    if cof is not None:
                        for q, gq in zip(cof, bcof[i]):
                            self._axpy(q, c, shift, gq)
                    break
            else:
                r[m] = f.pop(m)
                if not full:
                    r.update(f)
                    break
            count += 1
            if count & 255 == 0:
                _check_budget()
        return r, cof

    def spoly(self, f: dict, g: dict):
        lf, lg = max(f), max(g)
        k = self.k
        lcm_e = tuple(max(a, b) for a, b in zip(lf[k:], lg[k:]))
        lcm = self.enc.enc(lcm_e)
        s = {}
        self._axpy(s, self.dom.to(-1) if not self.mod else self.mod - 1, _sub(lcm, lf), f)
        self._axpy(s, 1, _sub(lcm, lg), g)
        return s, _sub(lcm, lf), _sub(lcm, lg)

    # Buchberger --------------------------------------------------------------
    def groebner(self, polys: list, track: bool = False):
        """Reduced GB of ``polys``; with ``track`` also cofactor lists."""
        k = self.k
        n_in = len(polys)
        pool: list = []
        pcof: list = []
        G: list[int] = []
        pairs: list[tuple] = []

        def lmexp(i):
            return max(pool[i])[k:]

        def lcm_e(i, j):
            return tuple(max(a, b) for a, b in zip(lmexp(i), lmexp(j)))

        def update(h: int):
            nonlocal G, pairs
            hexp = lmexp(h)
            C = list(G)
            D = []
            while C:
                g1 = C.pop()
                g1exp = lmexp(g1)
                l1 = tuple(max(a, b) for a, b in zip(hexp, g1exp))
                coprime = all(a == 0 or b == 0 for a, b in zip(hexp, g1exp))
                if coprime or (
                    not any(_divides(lcm_e(h, g2), l1) for g2 in C)
                    and not any(_divides(lcm_e(h, g2), l1) for g2 in D)
                ):
                    D.append(g1)
            E = [g for g in D if not all(a == 0 or b == 0 for a, b in zip(hexp, lmexp(g)))]
            kept = []
            for (i, j, l) in pairs:
                lexp = l[k:]
                if _divides(hexp, lexp) and lcm_e(i, h) != lexp and lcm_e(j, h) != lexp:
                    continue
                kept.append((i, j, l))
            for g in E:
                kept.append((g, h, self.enc.enc(lcm_e(g, h))))
            pairs = kept
            G = [g for g in G if not _divides(hexp, lmexp(g))] + [h]

        def add(f, cof):
            f, cof = self.monic(f, cof)
            pool.append(f)
            pcof.append(cof)
            update(len(pool) - 1)

        # seed: reduce inputs against each other as they come in
        for idx, p in enumerate(polys):
            if not p:
                continue
            cof = None
            if track:
                cof = [{} for _ in range(n_in)]
                cof[idx] = {self.enc.enc((0,) * self.enc.n): self.dom.to(1) if not self.mod else 1}
            basis = [pool[i] for i in G]
            f, cof = self.reduce(p, basis, cof, [pcof[i] for i in G] if track else None)
            if f:
                add(f, cof)

        while pairs:
            _check_budget()
            best = min(range(len(pairs)), key=lambda t: pairs[t][2])
            i, j, _ = pairs.pop(best)
            s, si, sj = self.spoly(pool[i], pool[j])
            cof = None
            if track:
                mod = self.mod
                cof = [{} for _ in range(n_in)]
                # s = si*f_i - sj*f_j
                for q, qi, qj in zip(cof, pcof[i], pcof[j]):
                    self._axpy(q, (mod - 1) if mod else self.dom.to(-1), si, qi)
                    self._axpy(q, 1 if mod else self.dom.to(1), sj, qj)
            basis = [pool[t] for t in G]
            f, cof = self.reduce(s, basis, cof, [pcof[t] for t in G] if track else None)
            self.steps += 1
            if f:
                add(f, cof)

        # minimalise and interreduce
        G = sorted(G, key=lambda t: max(pool[t]))
        minimal = []
        for t in G:
            te = lmexp(t)
            if not any(_divides(lmexp(u), te) for u in G if u != t and (lmexp(u) != te or u < t)):
                minimal.append(t)
        out, outcof = [], []
        for t in minimal:
            others = [pool[u] for u in minimal if u != t]
            ocof = [pcof[u] for u in minimal if u != t] if track else None
            f, cof = self.reduce(pool[t], others, pcof[t], ocof)
            f, cof = self.monic(f, cof)
            out.append(f)
            outcof.append(cof)
        order = sorted(range(len(out)), key=lambda t: max(out[t]), reverse=True)
        return [out[t] for t in order], ([outcof[t] for t in order] if track else None)


# ---------------------------------------------------------------------------
# public types


def _common(polys: Sequence[MultiPoly]):
    vars_ = polys[0].vars
    ring = polys[0].ring
    for p in polys:
        if p.vars != vars_ or p.ring != ring:
            raise ValueError("generators must share variables and coefficient ring")
    return vars_, ring


class IdealBasis:
    """Finite generating set of an ideal together with a monomial order."""

    def __init__(self, generators: Iterable[MultiPoly], order: MonomialOrder | None = None,
                 vars: Sequence[str] | None = None, ring: Ring | None = None):
        gens = [g for g in generators if not g.is_zero()]
        if gens:
            v0, r0 = _common(gens)
            if vars is not None and tuple(vars) != v0:
                gens = [g.with_vars(vars) for g in gens]
                v0 = tuple(vars)
            vars, ring = v0, r0
        else:
            vars = tuple(vars or VARS)
            ring = ring or QQ
        self.generators = gens
        self.vars = tuple(vars)
        self.ring = ring
        self.order = order or MonomialOrder.grevlex(self.vars)

    def with_order(self, order: MonomialOrder) -> "IdealBasis":
        return IdealBasis(self.generators, order, self.vars, self.ring)

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"IdealBasis({[str(g) for g in self.generators]}, {self.order})"


class GroebnerBasis:
    """Reduced Groebner basis; ``elements`` are monic, sorted by leading term."""

    def __init__(self, elements: list[MultiPoly], order: MonomialOrder, vars_, ring,
                 cofactors=None, steps: int = 0):
        self.elements = elements
        self.order = order
        self.vars = tuple(vars_)
        self.ring = ring
        self.cofactors = cofactors
        self.steps = steps
        self._kernel = None
        self._loaded = None

    def _k(self):
        if self._kernel is None:
            self._kernel = _Kernel(self.ring, self.order, self.vars)
            self._loaded = [self._kernel.load(g) for g in self.elements]
        return self._kernel, self._loaded

    def is_one(self) -> bool:
        return len(self.elements) == 1 and self.elements[0].is_constant()

    def is_zero_ideal(self) -> bool:
        return not self.elements

    def normal_form(self, p: MultiPoly) -> MultiPoly:
        return normal_form(p, self)

    def contains(self, p: MultiPoly) -> bool:
        return normal_form(p, self).is_zero()

    def leading_monomials(self) -> list[tuple]:
        return [g.leading_term(self.order)[0] for g in self.elements]

    def to_json(self) -> dict:
        return {
            "order": {"kind": self.order.kind, "priority": list(self.order.priority),
                      "blocks": list(self.order.blocks) if self.order.blocks else None},
            "vars": list(self.vars),
            "ring": self.ring.name,
            "basis": [g.to_json() for g in self.elements],
        }

    def hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def __eq__(self, other):
        return (isinstance(other, GroebnerBasis) and self.order == other.order
                and self.vars == other.vars and self.ring == other.ring
                and self.elements == other.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"GroebnerBasis({[str(g) for g in self.elements]})"


def _as_ideal(I, order=None) -> IdealBasis:
    if isinstance(I, IdealBasis):
        return I.with_order(order) if order is not None else I
    return IdealBasis(list(I), order)


def buchberger(I, order: MonomialOrder | None = None, track: bool = False,
               verify: bool = False) -> GroebnerBasis:
    """Reduced Groebner basis of ``I``.

    ``track`` records, for every basis element, cofactors expressing it in
    the input generators.  ``verify`` re-checks all S-polynomials afterwards.
    Over ``Q[v]/(g)`` a non-invertible leading coefficient raises
    :class:`ZeroDivisorHit`; use :func:`buchberger_split` to branch.
    """
    I = _as_ideal(I, order)
    K = _Kernel(I.ring, I.order, I.vars)
    polys = [K.load(g) for g in I.generators]
    out, cof = K.groebner(polys, track=track)
    elems = [K.unload(f, I.vars, I.ring) for f in out]
    cofs = None
    if track:
        cofs = [[K.unload(q, I.vars, I.ring) for q in c] for c in cof]
    G = GroebnerBasis(elems, I.order, I.vars, I.ring, cofs, K.steps)
    if verify and not is_groebner(G):
        raise NotGroebner("S-polynomial post-check failed")
    return G


def buchberger_split(I, order: MonomialOrder | None = None) -> list[tuple[Ring, GroebnerBasis]]:
    """GB over ``Q[v]/(g)``, splitting ``g`` whenever a zero divisor shows up.

    Returns one ``(branch ring, basis)`` pair per factor of ``g``.
    """
    I = _as_ideal(I, order)
    if not isinstance(I.ring, QuotientRing):
        return [(I.ring, buchberger(I))]
    try:
        return [(I.ring, buchberger(I))]
    except ZeroDivisorHit as hit:
        g = I.ring.g
        f1 = umonic(hit.factor)
        f2, r = udivmod(g, f1)
        if r:
            raise ArithmeticError("discovered factor does not divide the modulus") from None
        out = []
        for fac in (f1, umonic(f2)):
            sub = QuotientRing(fac, I.ring.var)
            gens = [g_.map_coeffs(lambda c, s=sub: s.coerce(c) if not isinstance(c, QuotElem)
                                  else QuotElem(c.rep, s.g), sub) for g_ in I.generators]
            out.extend(buchberger_split(IdealBasis(gens, I.order, I.vars, sub)))
        return out


def is_groebner(G: GroebnerBasis) -> bool:
    """Direct check that every S-polynomial of G reduces to zero."""
    K, loaded = G._k()
    for i in range(len(loaded)):
        for j in range(i + 1, len(loaded)):
            s, _, _ = K.spoly(loaded[i], loaded[j])
            r, _ = K.reduce(s, loaded)
            if r:
                return False
    return True


def normal_form(p: MultiPoly, G: GroebnerBasis) -> MultiPoly:
    if p.vars != G.vars:
        p = p.with_vars(G.vars)
    if p.ring != G.ring:
        p = p.to_ring(G.ring)
    K, loaded = G._k()
    r, _ = K.reduce(K.load(p), loaded)
    return K.unload(r, G.vars, G.ring)


def divide(p: MultiPoly, divisors: Sequence[MultiPoly], order: MonomialOrder | None = None):
    """Multivariate division: return ``(quotients, r)`` with
    ``p == sum(q_i * g_i) + r`` and no term of ``r`` divisible by any
    leading monomial."""
    order = order or MonomialOrder.grevlex(p.vars)
    K = _Kernel(p.ring, order, p.vars)
    gs = []
    scales = []
    for g in divisors:
        lg = K.load(g)
        lm = max(lg)
        c = lg[lm]
        ic = K.dom.inv(c)
        gs.append({m: (a * ic % K.mod if K.mod else a * ic) for m, a in lg.items()})
        scales.append(ic)
    one = K.enc.enc((0,) * len(p.vars))
    n = len(gs)
    cof = [{} for _ in range(n)]
    bcof = []
    for i in range(n):
        row = [{} for _ in range(n)]
        row[i] = {one: scales[i]}
        bcof.append(row)
    r, cof = K.reduce(K.load(p), gs, cof, bcof)
    # reduce() records f_new = f - c*m*g, so cofactors come out negated
    qs = [-K.unload(q, p.vars, p.ring) for q in cof]
    return qs, K.unload(r, p.vars, p.ring)


def lift(p: MultiPoly, G: GroebnerBasis):
    """Cofactors ``c_i`` (w.r.t. the generators G was tracked from) with
    ``p == sum c_i * gen_i``, or None when ``p`` is not in the ideal."""
    if G.cofactors is None:
        raise ValueError("basis was computed without track=True")
    qs, r = divide(p, G.elements, G.order)
    if not r.is_zero():
        return None
    n = len(G.cofactors[0]) if G.cofactors else 0
    zero = MultiPoly({}, G.vars, G.ring)
    out = [zero] * n
    for q, row in zip(qs, G.cofactors):
        for t in range(n):
            out[t] = out[t] + q * row[t]
    return out


def contains(I, p: MultiPoly) -> bool:
    return buchberger(I).contains(p)


def is_trivial(I) -> bool:
    """True iff 1 lies in the ideal (all branches for quotient rings)."""
    I = _as_ideal(I)
    return all(G.is_one() for _, G in buchberger_split(I))


def ideal_equal(I, J) -> bool:
    I, J = _as_ideal(I), _as_ideal(J)
    if I.vars != J.vars or I.ring != J.ring:
        raise ValueError("ideals live in different rings")
    order = MonomialOrder.grevlex(I.vars)
    return buchberger(I, order).elements == buchberger(J, order).elements


def _fresh_var(vars_) -> str:
    name = "t"
    while name in vars_:
        name += "_"
    return name


def elimination_ideal(I, drop_vars: Sequence[str]) -> IdealBasis:
    """Generators of ``I`` intersected with the ring without ``drop_vars``.

    The result keeps the original variable list (dropped variables simply
    do not occur) and carries the grevlex order on the remaining variables.
    """
    I = _as_ideal(I)
    drop = tuple(drop_vars)
    for v in drop:
        if v not in I.vars:
            raise ValueError(f"{v} is not a variable of the ideal")
    order = MonomialOrder.elimination(drop, I.vars)
    G = buchberger(I, order)
    keep = [g for g in G.elements if not set(g.variables_used()) & set(drop)]
    rest = tuple(v for v in I.order.priority if v not in drop) if I.order.kind == "grevlex" else \
        tuple(v for v in I.vars if v not in drop)
    return IdealBasis(keep, MonomialOrder("grevlex", rest + drop), I.vars, I.ring)


def saturate(I, f) -> IdealBasis:
    """``I : f^inf`` via ``t*f - 1``; a list of factors is handled one at a time."""
    I = _as_ideal(I)
    factors = list(f) if isinstance(f, (list, tuple)) else [f]
    cur = I
    for u in factors:
        cur = _saturate_one(cur, u)
    return cur


def _saturate_one(I: IdealBasis, f: MultiPoly) -> IdealBasis:
    if f.vars != I.vars:
        f = f.with_vars(I.vars)
    t = _fresh_var(I.vars)
    vt = I.vars + (t,)
    gens = [g.with_vars(vt) for g in I.generators]
    tt = MultiPoly.gens(vt, I.ring)[-1]
    gens.append(tt * f.with_vars(vt) - 1)
    order = MonomialOrder.elimination((t,), vt)
    G = buchberger(IdealBasis(gens, order, vt, I.ring))
    keep = [g.with_vars(I.vars) for g in G.elements if g.degree(t) <= 0]
    return IdealBasis(keep, MonomialOrder.grevlex(I.vars) if I.order.kind != "grevlex" else I.order,
                      I.vars, I.ring)


def radical_member(p: MultiPoly, I) -> bool:
    """Rabinowitsch test: p lies in rad(I) iff 1 in (I, 1 - t p)."""
    I = _as_ideal(I)
    t = _fresh_var(I.vars)
    vt = I.vars + (t,)
    gens = [g.with_vars(vt) for g in I.generators]
    tt = MultiPoly.gens(vt, I.ring)[-1]
    gens.append(tt * p.with_vars(vt) - 1)
    return buchberger(IdealBasis(gens, MonomialOrder.grevlex(vt), vt, I.ring)).is_one()


def reduced_basis(I, order: MonomialOrder | None = None) -> list[MultiPoly]:
    return buchberger(I, order).elements


__all__ = [
    "ZeroDivisorHit", "BudgetExceeded", "NotGroebner", "time_budget", "IdealBasis", "GroebnerBasis",
    "buchberger", "buchberger_split", "is_groebner", "normal_form", "divide", "lift", "contains",
    "is_trivial", "ideal_equal", "elimination_ideal", "saturate", "radical_member", "reduced_basis",
]
