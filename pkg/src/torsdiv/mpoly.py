"""Sparse multivariate polynomials over the rings of :mod:`torsdiv.exactring`.

A :class:`MultiPoly` maps exponent tuples to nonzero coefficients over a
fixed variable list.  The canonical variable list is ``(x, y, z, v)``, with
an auxiliary ``t`` appended for saturation.
"""
from __future__ import annotations

import json
from fractions import Fraction
from operator import add
from typing import Iterable, Mapping, Sequence

from .exactring import (
    QQ,
    BadDenominator,
    FpElem,
    QuotElem,
    Ring,
    ZpnElem,
    inv,
    normalize_rational,
    rational_from_str,
    rational_to_str,
    ugcd,
    utrim,
)

VARS = ("x", "y", "z", "v")
VARS_T = VARS + ("t",)

# exponents are stored as Python ints, but we refuse anything a machine
# word could not hold so runaway degree blow-ups fail loudly
MAX_EXPONENT = 2**63 - 1


class MixedRings(TypeError):
    pass


class MonomialOrder:
    """A monomial order over an explicit variable priority.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``.  For block orders
    ``blocks`` gives the block sizes along ``priority``; blocks compare
    lexicographically one after another, each block internally by grevlex.
    """

    __slots__ = ("kind", "priority", "blocks")

    def __init__(self, kind: str, priority: Sequence[str], blocks: Sequence[int] | None = None):
        if kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown order kind {kind!r}")
        priority = tuple(priority)
        if len(set(priority)) != len(priority):
            raise ValueError("priority must be a permutation")
        if kind == "block":
            if not blocks or sum(blocks) != len(priority) or min(blocks) < 1:
                raise ValueError("block sizes must partition the variables")
            blocks = tuple(blocks)
        else:
            blocks = None
        self.kind = kind
        self.priority = priority
        self.blocks = blocks

    @classmethod
    def grevlex(cls, vars_: Sequence[str] = VARS) -> "MonomialOrder":
        return cls("grevlex", vars_)

    @classmethod
    def lex(cls, vars_: Sequence[str] = VARS) -> "MonomialOrder":
        return cls("lex", vars_)

    @classmethod
    def elimination(cls, drop: Sequence[str], vars_: Sequence[str]) -> "MonomialOrder":
        drop = tuple(drop)
        rest = tuple(v for v in vars_ if v not in drop)
        if not drop:
            return cls.grevlex(rest)
        if not rest:
            return cls.grevlex(drop)
        return cls("block", drop + rest, (len(drop), len(rest)))

    def weight_rows(self, vars_: Sequence[str]) -> list[list[int]]:
        """Integer matrix W such that lex comparison of W.e realises the order."""
        idx = [vars_.index(v) for v in self.priority]
        if sorted(idx) != list(range(len(vars_))):
            raise ValueError(f"order priority {self.priority} does not match variables {tuple(vars_)}")
        n = len(vars_)

        def unit(i, s=1):
            row = [0] * n
            row[i] = s
            return row

        if self.kind == "lex":
            return [unit(i) for i in idx]
        blocks = self.blocks if self.kind == "block" else (n,)
        rows, start = [], 0
        for size in blocks:
            part = idx[start:start + size]
            start += size
            deg = [0] * n
            for i in part:
                deg[i] = 1
            rows.append(deg)
            rows.extend(unit(i, -1) for i in reversed(part[1:]))
        return rows

    def key(self, vars_: Sequence[str]):
        rows = self.weight_rows(vars_)
        nz = [[(j, w) for j, w in enumerate(r) if w] for r in rows]

        def _key(e):
            return tuple(sum(w * e[j] for j, w in r) for r in nz)

        return _key

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.priority, self.blocks) == (
            other.kind, other.priority, other.blocks)

    def __hash__(self):
        return hash((self.kind, self.priority, self.blocks))

    def __repr__(self):
        extra = f", blocks={self.blocks}" if self.blocks else ""
        return f"MonomialOrder({self.kind!r}, {self.priority}{extra})"


def _ring_of_scalar(c):
    return None


class MultiPoly:
    """Immutable sparse polynomial."""

    __slots__ = ("_t", "vars", "ring", "_maxexp")

    def __init__(self, terms: Mapping | None = None, vars: Sequence[str] = VARS, ring: Ring = QQ):
        self.vars = tuple(vars)
        self.ring = ring
        n = len(self.vars)
        t: dict = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for variables {self.vars}")
            c = ring.coerce(c)
            if c != 0:
                t[e] = (t[e] + c) if e in t else c
                if t[e] == 0:
                    del t[e]
        self._t = t
        self._maxexp = None

    @classmethod
    def _raw(cls, t: dict, vars_: tuple, ring: Ring) -> "MultiPoly":
        p = object.__new__(cls)
        p._t = t
        p.vars = vars_
        p.ring = ring
        p._maxexp = None
        return p

    # -- construction -----------------------------------------------------

    @classmethod
    def gens(cls, vars_: Sequence[str] = VARS, ring: Ring = QQ) -> tuple["MultiPoly", ...]:
        vars_ = tuple(vars_)
        one = ring.one
        out = []
        for i in range(len(vars_)):
            e = [0] * len(vars_)
            e[i] = 1
            out.append(cls._raw({tuple(e): one}, vars_, ring))
        return tuple(out)

    @classmethod
    def const(cls, c, vars_: Sequence[str] = VARS, ring: Ring = QQ) -> "MultiPoly":
        vars_ = tuple(vars_)
        c = ring.coerce(c)
        return cls._raw({(0,) * len(vars_): c} if c != 0 else {}, vars_, ring)

    @classmethod
    def from_univariate(cls, coeffs: Sequence, var: str, vars_: Sequence[str] = VARS, ring: Ring = QQ):
        vars_ = tuple(vars_)
        i = vars_.index(var)
        t = {}
        for k, c in enumerate(coeffs):
            c = ring.coerce(c)
            if c != 0:
                e = [0] * len(vars_)
                e[i] = k
                t[tuple(e)] = c
        return cls._raw(t, vars_, ring)

    # -- basic protocol ---------------------------------------------------

    @property
    def terms(self) -> dict:
        """Read-only view (do not mutate) of the term map."""
        return self._t

    def items(self) -> list:
        """Terms in canonical order: descending grevlex over ``self.vars``."""
        key = MonomialOrder.grevlex(self.vars).key(self.vars)
        return sorted(self._t.items(), key=lambda kv: key(kv[0]), reverse=True)

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.ring == other.ring and self._t == other._t
        try:
            return self == self._lift(other)
        except (TypeError, ValueError, ArithmeticError):
            return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self._t.items())))

    def max_exponent(self) -> int:
        if self._maxexp is None:
            self._maxexp = max((max(e, default=0) for e in self._t), default=0)
        return self._maxexp

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise MixedRings(f"variable lists differ: {self.vars} vs {other.vars}")
            if other.ring != self.ring:
                raise MixedRings(f"coefficient rings differ: {self.ring} vs {other.ring}")
            return other
        return MultiPoly.const(other, self.vars, self.ring)

    def _norm(self, c):
        return normalize_rational(c) if self.ring is QQ or self.ring == QQ else c

    def __add__(self, other):
        try:
            o = self._lift(other)
        except MixedRings:
            raise
        except TypeError:
            return NotImplemented
        t = dict(self._t)
        for e, c in o._t.items():
            if e in t:
                s = self._norm(t[e] + c)
                if s == 0:
                    del t[e]
                else:
                    t[e] = s
            else:
                t[e] = c
        return MultiPoly._raw(t, self.vars, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self._t.items()}, self.vars, self.ring)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except MixedRings:
            raise
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                c = self.ring.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
            if c == 0:
                return MultiPoly._raw({}, self.vars, self.ring)
            return MultiPoly._raw({e: self._norm(a * c) for e, a in self._t.items()}, self.vars, self.ring)
        o = self._lift(other)
        if self.max_exponent() + o.max_exponent() > MAX_EXPONENT:
            raise OverflowError("exponent exceeds machine word size")
        t: dict = {}
        norm = self._norm
        for e1, c1 in self._t.items():
            for e2, c2 in o._t.items():
                e = tuple(map(add, e1, e2))
                if e in t:
                    t[e] = t[e] + c1 * c2
                else:
                    t[e] = c1 * c2
        t = {e: norm(c) for e, c in t.items() if c != 0}
        return MultiPoly._raw(t, self.vars, self.ring)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        if k and self.max_exponent() * k > MAX_EXPONENT:
            raise OverflowError("exponent exceeds machine word size")
        result = MultiPoly.const(1, self.vars, self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "MultiPoly":
        return self * c

    # -- structure --------------------------------------------------------

    def _index(self, var) -> int:
        if isinstance(var, MultiPoly):
            (e,) = var._t.keys()
            return e.index(1)
        try:
            return self.vars.index(var)
        except ValueError:
            raise ValueError(f"{var!r} is not one of {self.vars}") from None

    def degree(self, var=None) -> int:
        """Degree in ``var`` (total degree when omitted); -1 for zero."""
        if not self._t:
            return -1
        if var is None:
            return max(sum(e) for e in self._t)
        i = self._index(var)
        return max(e[i] for e in self._t)

    def variables_used(self) -> tuple:
        used = [False] * len(self.vars)
        for e in self._t:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def is_constant(self) -> bool:
        return not self.variables_used()

    def constant_term(self):
        return self._t.get((0,) * len(self.vars), self.ring.zero)

    def univariate_coeffs(self, var=None) -> tuple:
        """Coefficient tuple (lowest degree first) of a univariate polynomial."""
        used = self.variables_used()
        if var is None:
            if len(used) > 1:
                raise ValueError(f"polynomial is not univariate (uses {used})")
            var = used[0] if used else self.vars[0]
        elif any(u != var for u in used):
            raise ValueError(f"polynomial involves variables other than {var}")
        i = self._index(var)
        d = self.degree(var)
        out = [0] * (d + 1)
        for e, c in self._t.items():
            out[e[i]] = c
        return utrim(out)

    def coeffs_in(self, var) -> dict[int, "MultiPoly"]:
        """Split as sum_k c_k * var^k; the c_k do not involve ``var``."""
        i = self._index(var)
        parts: dict[int, dict] = {}
        for e, c in self._t.items():
            k = e[i]
            parts.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MultiPoly._raw(t, self.vars, self.ring) for k, t in parts.items()}

    def leading_term(self, order: MonomialOrder):
        if not self._t:
            raise ValueError("zero polynomial has no leading term")
        key = order.key(self.vars)
        e = max(self._t, key=key)
        return e, self._t[e]

    def map_coeffs(self, fn, ring: Ring) -> "MultiPoly":
        t = {}
        for e, c in self._t.items():
            c2 = fn(c)
            if c2 != 0:
                t[e] = c2
        return MultiPoly._raw(t, self.vars, ring)

    def to_ring(self, ring: Ring) -> "MultiPoly":
        """Reduce/embed coefficients into ``ring`` (e.g. Q -> F_p)."""
        return self.map_coeffs(ring.coerce, ring)

    def with_vars(self, vars_: Sequence[str]) -> "MultiPoly":
        """Re-express over another variable list containing all used vars."""
        vars_ = tuple(vars_)
        for v in self.variables_used():
            if v not in vars_:
                raise ValueError(f"variable {v} missing from {vars_}")
        pos = [self.vars.index(v) if v in self.vars else None for v in vars_]
        t = {tuple(e[j] if j is not None else 0 for j in pos): c for e, c in self._t.items()}
        return MultiPoly._raw(t, vars_, self.ring)

    # -- calculus and substitution ---------------------------------------

    def diff(self, var) -> "MultiPoly":
        return partial_derivative(self, var)

    def subs(self, var, q) -> "MultiPoly":
        return substitute(self, var, q)

    def __call__(self, *point, ring: Ring | None = None):
        return evaluate(self, point, ring=ring)

    # -- normalisation ------------------------------------------------------

    def content_normalize(self, order: MonomialOrder | None = None):
        """Return ``(unit, q)`` with ``self == unit * q``.

        Over Q, ``q`` has coprime integer coefficients and positive leading
        coefficient; over a field the leading coefficient is made 1.
        """
        if not self._t:
            return self.ring.one, self
        order = order or MonomialOrder.grevlex(self.vars)
        _, lc = self.leading_term(order)
        if self.ring == QQ:
            from math import gcd, lcm

            den = 1
            for c in self._t.values():
                den = lcm(den, Fraction(c).denominator)
            num = 0
            for c in self._t.values():
                num = gcd(num, int(Fraction(c) * den))
            unit = Fraction(num, den)
            if lc < 0:
                unit = -unit
            unit = normalize_rational(unit)
            return unit, self * inv(unit)
        return lc, self * inv(lc)

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        out = {"vars": list(self.vars), "terms": []}
        if self.ring != QQ:
            out["ring"] = self.ring.name
        for e, c in self.items():
            out["terms"].append({"c": _coeff_to_str(c), "e": list(e)})
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, d: Mapping | str) -> "MultiPoly":
        if isinstance(d, str):
            d = json.loads(d)
        ring = _ring_from_name(d.get("ring", "QQ"))
        vars_ = tuple(d["vars"])
        t = {}
        for term in d["terms"]:
            t[tuple(term["e"])] = ring.coerce(rational_from_str(term["c"]))
        return cls(t, vars_, ring)

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k
            )
            cs = _coeff_to_str(c)
            if mono:
                if cs == "1":
                    s = "+" + mono
                elif cs == "-1":
                    s = "-" + mono
                else:
                    s = ("" if cs.startswith("-") else "+") + cs + "*" + mono
            else:
                s = ("" if cs.startswith("-") else "+") + cs
            parts.append(s)
        out = " ".join(parts)
        return out[1:] if out.startswith("+") else out


def _coeff_to_str(c) -> str:
    if isinstance(c, (int, Fraction)):
        return rational_to_str(c)
    if isinstance(c, (FpElem, ZpnElem)):
        return str(c.r)
    return repr(c)


def _ring_from_name(name: str) -> Ring:
    from .exactring import GF, PadicResidueRing

    if name == "QQ":
        return QQ
    if name.startswith("GF(") and name.endswith(")"):
        return GF(int(name[3:-1]))
    if name.startswith("Z/") and "^" in name:
        p, N = name[2:].split("^")
        return PadicResidueRing(int(p), int(N))
    raise ValueError(f"cannot deserialize ring {name!r}")


# ---------------------------------------------------------------------------
# operations


def ring_ops(a: MultiPoly, b: MultiPoly, op: str = "mul") -> MultiPoly:
    """Named access to +, -, * (and ``pow`` with an int ``b``)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "pow":
        return a ** b
    raise ValueError(op)


def partial_derivative(p: MultiPoly, var) -> MultiPoly:
    i = p._index(var)
    t = {}
    for e, c in p._t.items():
        k = e[i]
        if k:
            t[e[:i] + (k - 1,) + e[i + 1:]] = p._norm(c * k)
    return MultiPoly._raw({e: c for e, c in t.items() if c != 0}, p.vars, p.ring)


def substitute(p: MultiPoly, var, q) -> MultiPoly:
    """Replace every occurrence of ``var`` in ``p`` by ``q`` and expand."""
    i = p._index(var)
    q = p._lift(q)
    parts = p.coeffs_in(p.vars[i])
    if not parts:
        return p
    result = MultiPoly._raw({}, p.vars, p.ring)
    for k in range(max(parts), -1, -1):
        result = result * q
        if k in parts:
            result = result + parts[k]
    return result


def _embedder(point, ring):
    if ring is not None:
        return ring.coerce
    for a in point:
        if isinstance(a, FpElem):
            return lambda c, p=a.p: FpElem.from_rational(c, p) if isinstance(c, (int, Fraction)) else c
        if isinstance(a, ZpnElem):
            return lambda c, p=a.p, N=a.N: ZpnElem.from_rational(c, p, N) if isinstance(c, (int, Fraction)) else c
    return lambda c: c


def evaluate(p: MultiPoly, point: Sequence, ring: Ring | None = None):
    """Evaluate at ``point``; with ``ring`` the point and coefficients are
    first mapped into that ring (raising :class:`BadDenominator` when a
    coefficient denominator is not invertible there)."""
    if len(point) == 1 and isinstance(point[0], (list, tuple)):
        point = tuple(point[0])
    if len(point) != len(p.vars):
        raise ValueError(f"expected {len(p.vars)} coordinates, got {len(point)}")
    if ring is not None:
        point = tuple(ring.coerce(a) if isinstance(a, (int, Fraction)) else a for a in point)
    emb = _embedder(point, ring)
    powers: list[dict[int, object]] = [{} for _ in point]

    def pw(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = point[i] ** k
        return cache[k]

    acc = None
    for e, c in p._t.items():
        term = emb(c)
        for i, k in enumerate(e):
            if k:
                term = term * pw(i, k)
        acc = term if acc is None else acc + term
    if acc is None:
        return emb(0) if ring is not None or any(isinstance(a, (FpElem, ZpnElem)) for a in point) else 0
    return normalize_rational(acc) if isinstance(acc, Fraction) else acc


def univariate_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic gcd of two univariate polynomials in the same variable."""
    a = a._lift(b) if not isinstance(a, MultiPoly) else a
    b = a._lift(b)
    used = set(a.variables_used()) | set(b.variables_used())
    if len(used) > 1:
        raise ValueError(f"inputs are not univariate in one variable: {sorted(used)}")
    var = used.pop() if used else a.vars[0]
    g = ugcd(a.univariate_coeffs(var), b.univariate_coeffs(var))
    return MultiPoly.from_univariate(g, var, a.vars, a.ring)


def univariate_divmod(a: MultiPoly, b: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    from .exactring import udivmod

    used = set(a.variables_used()) | set(b.variables_used())
    if len(used) > 1:
        raise ValueError("inputs are not univariate in one variable")
    var = used.pop() if used else a.vars[0]
    q, r = udivmod(a.univariate_coeffs(var), b.univariate_coeffs(var))
    return (MultiPoly.from_univariate(q, var, a.vars, a.ring),
            MultiPoly.from_univariate(r, var, a.vars, a.ring))


def equal_up_to_unit(p: MultiPoly, q: MultiPoly):
    """Return the constant ``c`` with ``p == c * q``, or None."""
    if p.is_zero() or q.is_zero():
        return p.ring.one if p.is_zero() and q.is_zero() else None
    if p._t.keys() != q._t.keys():
        return None
    e0 = next(iter(q._t))
    c = p._t[e0] * inv(q._t[e0])
    c = normalize_rational(c) if isinstance(c, Fraction) else c
    return c if p == q * c else None


def poly_from_terms(pairs: Iterable, vars_: Sequence[str] = VARS, ring: Ring = QQ) -> MultiPoly:
    t = {}
    for c, e in pairs:
        t[tuple(e)] = t.get(tuple(e), 0) + c
    return MultiPoly(t, vars_, ring)


__all__ = [
    "VARS", "VARS_T", "MAX_EXPONENT", "MixedRings", "MonomialOrder", "MultiPoly", "BadDenominator",
    "QuotElem", "ring_ops", "partial_derivative", "substitute", "evaluate", "univariate_gcd",
    "univariate_divmod", "equal_up_to_unit", "poly_from_terms",
]
