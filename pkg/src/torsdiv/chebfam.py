"""Chebyshev-type families in the trace variable v.

``S_k`` (second kind), ``T_k`` (first kind) and ``P_k = (S_{k+1} - S_k - 1)/(v - 2)``
are kept as integer coefficient tuples (lowest degree first) in a shared
cache and handed out as :class:`MultiPoly` in whatever variable list the
caller asks for.
"""
from __future__ import annotations

import threading

from .exactring import uadd, udivmod, ugcd, umonic, umul, usub, uderiv, ueval, uscale
from .mpoly import VARS, MultiPoly


class DivisionFailure(ArithmeticError):
    pass


class ProductMismatch(ArithmeticError):
    pass


_V = (0, 1)


class ChebCache:
    """Append-only memo tables for S, T, P and dS/dv indexed by integer k."""

    def __init__(self):
        self._lock = threading.Lock()
        self._S = {-2: (-1,), -1: (), 0: (1,), 1: _V}
        self._T = {-1: _V, 0: (2,), 1: _V}
        self._P = {}
        self._dS = {}

    def _extend(self, table, k):
        # forward: X_{j+1} = v X_j - X_{j-1};  backward: X_{j-1} = v X_j - X_{j+1}
        hi = max(table)
        lo = min(table)
        while k > hi:
            table[hi + 1] = usub(umul(_V, table[hi]), table[hi - 1])
            hi += 1
        while k < lo:
            table[lo - 1] = usub(umul(_V, table[lo]), table[lo + 1])
            lo -= 1
        return table[k]

    def S(self, k: int) -> tuple:
        with self._lock:
            return self._extend(self._S, k)

    def T(self, k: int) -> tuple:
        with self._lock:
            return self._extend(self._T, k)

    def P(self, k: int) -> tuple:
        if k < -1:
            raise ValueError("P_k is defined for k >= -1")
        got = self._P.get(k)
        if got is not None:
            return got
        num = usub(usub(self.S(k + 1), self.S(k)), (1,))
        q, r = udivmod(num, (-2, 1))
        if r:
            raise DivisionFailure(f"S_{k+1} - S_{k} - 1 is not divisible by v-2 (remainder {r})")
        with self._lock:
            self._P[k] = q
        return q

    def dS(self, k: int) -> tuple:
        """Derivative of S_k in v."""
        got = self._dS.get(k)
        if got is None:
            got = uderiv(self.S(k))
            with self._lock:
                self._dS[k] = got
        return got


_cache = ChebCache()


def cache() -> ChebCache:
    return _cache


def S_coeffs(k: int) -> tuple:
    return _cache.S(k)


def T_coeffs(k: int) -> tuple:
    return _cache.T(k)


def P_coeffs(k: int) -> tuple:
    return _cache.P(k)


def dS_coeffs(k: int) -> tuple:
    return _cache.dS(k)


def _poly(coeffs, vars_, var="v"):
    return MultiPoly.from_univariate(coeffs, var, vars_)


def S(k: int, vars_=VARS, var: str = "v") -> MultiPoly:
    return _poly(_cache.S(k), vars_, var)


def T(k: int, vars_=VARS, var: str = "v") -> MultiPoly:
    return _poly(_cache.T(k), vars_, var)


def P(k: int, vars_=VARS, var: str = "v") -> MultiPoly:
    return _poly(_cache.P(k), vars_, var)


def dS(k: int, vars_=VARS, var: str = "v") -> MultiPoly:
    return _poly(_cache.dS(k), vars_, var)


def _laurent_cleared(coeffs, shift):
    """a^shift * c(a + 1/a) as a polynomial in a, for deg c <= shift."""
    out = ()
    a2p1 = (1, 0, 1)
    power = (1,)
    for j, c in enumerate(coeffs):
        if c:
            out = uadd(out, uscale(umul(power, (0,) * (shift - j) + (1,)), c))
        power = umul(power, a2p1)
    return out


def identity_suite(k_max: int) -> dict:
    """Check the evaluation and Laurent identities of S and T for 0 <= k <= k_max.

    Returns a report with ``ok`` and, on failure, the first ``(k, identity)``.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    checks = 0

    def fail(k, name):
        return {"ok": False, "k_max": k_max, "checks": checks, "first_failure": {"k": k, "identity": name}}

    for k in range(-2, k_max + 1):
        if usub(uadd(_cache.S(k + 2), _cache.S(k)), umul(_V, _cache.S(k + 1))):
            return fail(k, "S recursion")
        if usub(uadd(_cache.T(k + 2), _cache.T(k)), umul(_V, _cache.T(k + 1))):
            return fail(k, "T recursion")
        checks += 2
    for k in range(0, k_max + 1):
        s = _cache.S(k)
        if ueval(s, 2) != k + 1:
            return fail(k, "S_k(2) = k+1")
        if ueval(s, -2) != (-1) ** k * (k + 1):
            return fail(k, "S_k(-2) = (-1)^k (k+1)")
        # (a - 1/a) S_k(a + 1/a) = a^(k+1) - a^-(k+1), times a^(k+1)
        lhs = umul((-1, 0, 1), _laurent_cleared(s, k))
        rhs = ((-1,) + (0,) * (2 * k + 1) + (1,))
        if lhs != rhs:
            return fail(k, "(a-1/a) S_k(a+1/a) = a^(k+1) - a^(-k-1)")
        # T_k(a + 1/a) = a^k + a^-k, times a^k
        lhs = _laurent_cleared(_cache.T(k), k)
        rhs = (2,) if k == 0 else ((1,) + (0,) * (2 * k - 1) + (1,))
        if lhs != rhs:
            return fail(k, "T_k(a+1/a) = a^k + a^(-k)")
        # P_k polynomial (raises DivisionFailure otherwise) and defining relation
        p = _cache.P(k)
        if usub(uadd(umul((-2, 1), p), uadd(s, (1,))), _cache.S(k + 1)):
            return fail(k, "(v-2) P_k = S_(k+1) - S_k - 1")
        if k >= 2 and usub(_cache.T(k), usub(s, _cache.S(k - 2))):
            return fail(k, "T_k = S_k - S_(k-2)")
        checks += 6 + (k >= 2)
    return {"ok": True, "k_max": k_max, "checks": checks, "first_failure": None}


def separability_check(n: int) -> bool:
    """True iff S_n - S_{n-2} has no repeated root."""
    if n < 2:
        raise ValueError("n must be at least 2")
    q = usub(_cache.S(n), _cache.S(n - 2))
    return ugcd(q, uderiv(q)) == (1,)


def parity_split_coeffs(n: int) -> tuple[tuple, tuple]:
    if n < 2:
        raise ValueError("n must be at least 2")
    s1 = _cache.S(n - 1)
    s2 = _cache.S(n - 2)
    g_odd = ugcd(s1, usub(s2, (1,)))
    g_even = ugcd(s1, uadd(s2, (1,)))
    if umul(g_odd, g_even) != umonic(s1):
        raise ProductMismatch(f"g_odd * g_even != monic(S_{n-1}) for n={n}")
    if ugcd(g_odd, g_even) != (1,):
        raise ProductMismatch(f"parity factors share a root for n={n}")
    return g_odd, g_even


def parity_split(n: int, vars_=VARS, var: str = "v") -> tuple[MultiPoly, MultiPoly]:
    """Split monic(S_{n-1}) by the sign of S_{n-2} at its roots.

    ``g_odd`` collects roots where S_{n-2} = 1, ``g_even`` those where it is -1.
    """
    g_odd, g_even = parity_split_coeffs(n)
    return _poly(g_odd, vars_, var), _poly(g_even, vars_, var)
