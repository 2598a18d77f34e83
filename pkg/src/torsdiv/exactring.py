"""Exact coefficient rings.

Rationals are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator).  On top of that this module provides prime fields
``F_p``, the rings ``Z/p^N`` and univariate quotient rings ``Q[v]/(g)``.
All values are immutable.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]


class NotAUnit(ArithmeticError):
    """Raised when inverting a zero divisor.

    For quotient rings ``factor`` holds the nontrivial gcd with the modulus
    (a univariate coefficient tuple), which lets callers split the modulus.
    """

    def __init__(self, msg, factor=None):
        super().__init__(msg)
        self.factor = factor


class BadDenominator(ArithmeticError):
    """A rational denominator vanishes in the target ring."""


class MixedModulus(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _check_odd_prime(p: int) -> None:
    if not isinstance(p, int) or p <= 2 or not is_prime(p):
        raise ValueError(f"modulus must be an odd prime, got {p!r}")


def normalize_rational(c):
    """Collapse integral Fractions to int; keep other rationals as Fraction."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def rational_to_str(c: Number) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def rational_from_str(s: str) -> Number:
    return normalize_rational(Fraction(s))


# ---------------------------------------------------------------------------
# F_p and Z/p^N


class FpElem:
    __slots__ = ("r", "p")

    def __init__(self, r: int, p: int, _checked: bool = False):
        if not _checked:
            _check_odd_prime(p)
        self.r = r % p
        self.p = p

    @classmethod
    def from_rational(cls, c: Number, p: int) -> "FpElem":
        c = Fraction(c)
        if c.denominator % p == 0:
            raise BadDenominator(f"denominator of {c} vanishes mod {p}")
        return cls(c.numerator * pow(c.denominator, -1, p), p, True)

    def _lift(self, other):
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise MixedModulus(f"F_{self.p} vs F_{other.p}")
            return other.r
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return FpElem.from_rational(other, self.p).r
        return NotImplemented

    def _new(self, r):
        return FpElem(r, self.p, True)

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(self.r + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(self.r - o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.r)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(self.r * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.r)

    def __pow__(self, k: int):
        if k < 0:
            return inv(self) ** (-k)
        return self._new(pow(self.r, k, self.p))

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self * inv(self._new(o))

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.r == other.r
        if isinstance(other, (int, Fraction)):
            try:
                return self.r == self._lift(other) % self.p
            except BadDenominator:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.r, self.p))

    def __bool__(self):
        return self.r != 0

    def __int__(self):
        return self.r

    def __repr__(self):
        return f"FpElem({self.r}, {self.p})"


class ZpnElem:
    """Residue class modulo ``p**N``."""

    __slots__ = ("r", "p", "N", "modulus")

    def __init__(self, r: int, p: int, N: int, _checked: bool = False):
        if not _checked:
            _check_odd_prime(p)
            if N < 1:
                raise ValueError("precision N must be >= 1")
        self.p = p
        self.N = N
        self.modulus = p**N
        self.r = r % self.modulus

    @classmethod
    def from_rational(cls, c: Number, p: int, N: int) -> "ZpnElem":
        c = Fraction(c)
        if c.denominator % p == 0:
            raise BadDenominator(f"denominator of {c} is not a p-adic unit (p={p})")
        m = p**N
        return cls(c.numerator * pow(c.denominator, -1, m), p, N, True)

    def _lift(self, other):
        if isinstance(other, ZpnElem):
            if (other.p, other.N) != (self.p, self.N):
                raise MixedModulus("different Z/p^N rings")
            return other.r
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return ZpnElem.from_rational(other, self.p, self.N).r
        return NotImplemented

    def _new(self, r):
        return ZpnElem(r, self.p, self.N, True)

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(self.r + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(self.r - o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.r)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._new(self.r * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.r)

    def __pow__(self, k: int):
        if k < 0:
            return inv(self) ** (-k)
        return self._new(pow(self.r, k, self.modulus))

    def __eq__(self, other):
        if isinstance(other, ZpnElem):
            return (self.p, self.N, self.r) == (other.p, other.N, other.r)
        if isinstance(other, int):
            return self.r == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.r, self.p, self.N))

    def __bool__(self):
        return self.r != 0

    def valuation(self) -> int:
        """Largest k <= N with p^k dividing the residue."""
        if self.r == 0:
            return self.N
        k, r = 0, self.r
        while r % self.p == 0:
            r //= self.p
            k += 1
        return k

    def is_unit(self) -> bool:
        return self.r % self.p != 0

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "r": self.r}

    @classmethod
    def from_json(cls, d: dict) -> "ZpnElem":
        return cls(int(d["r"]), int(d["p"]), int(d["N"]))

    def __repr__(self):
        return f"ZpnElem({self.r}, {self.p}, {self.N})"


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q: tuples of coefficients, low degree first


def utrim(a: Sequence[Number]) -> tuple:
    a = [normalize_rational(c) for c in a]
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def udeg(a: Sequence[Number]) -> int:
    return len(a) - 1  # -1 for the zero polynomial


def uadd(a, b) -> tuple:
    n = max(len(a), len(b))
    return utrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def usub(a, b) -> tuple:
    n = max(len(a), len(b))
    return utrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def umul(a, b) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return utrim(out)


def uscale(a, c) -> tuple:
    return utrim([c * x for x in a])


def udivmod(a, b) -> tuple[tuple, tuple]:
    """Euclidean division over a field (Q by default)."""
    b = utrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(utrim(a))
    db, ilb = len(b) - 1, inv(b[-1])
    if len(r) - 1 < db:
        return (), tuple(r)
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db]
        if c == 0:
            continue
        c = normalize_rational(c * ilb)
        q[k] = c
        for j in range(db + 1):
            r[k + j] -= c * b[j]
    return utrim(q), utrim(r[:db])


def umonic(a) -> tuple:
    a = utrim(a)
    if not a:
        return ()
    return uscale(a, inv(a[-1]))


def ugcd(a, b) -> tuple:
    """Monic gcd over a field (gcd(0, 0) = 0)."""
    a, b = utrim(a), utrim(b)
    while b:
        _, r = udivmod(a, b)
        a, b = b, umonic(r)
    return umonic(a)


def uxgcd(a, b) -> tuple[tuple, tuple, tuple]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = utrim(a), utrim(b)
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = udivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, usub(s0, umul(q, s1))
        t0, t1 = t1, usub(t0, umul(q, t1))
    if not r0:
        return (), s0, t0
    lc = inv(r0[-1])
    return uscale(r0, lc), uscale(s0, lc), uscale(t0, lc)


def uderiv(a) -> tuple:
    return utrim([i * a[i] for i in range(1, len(a))])


def ueval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Q[v]/(g)


class QuotElem:
    """Element of Q[v]/(g) in normal form (degree < deg g)."""

    __slots__ = ("rep", "modulus")

    def __init__(self, rep, modulus, _reduced: bool = False):
        modulus = tuple(modulus)
        if not _reduced:
            modulus = utrim(modulus)
            if len(modulus) < 2 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree >= 1")
            _, rep = udivmod(rep, modulus)
        self.rep = tuple(rep)
        self.modulus = modulus

    def _other(self, other):
        if isinstance(other, QuotElem):
            if other.modulus != self.modulus:
                raise MixedModulus("QuotElem moduli differ")
            return other.rep
        if isinstance(other, (int, Fraction)):
            return utrim((other,))
        return NotImplemented

    def _new(self, rep):
        _, r = udivmod(rep, self.modulus)
        return QuotElem(r, self.modulus, True)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else QuotElem(uadd(self.rep, o), self.modulus, True)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else QuotElem(usub(self.rep, o), self.modulus, True)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else QuotElem(usub(o, self.rep), self.modulus, True)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._new(umul(self.rep, o))

    __rmul__ = __mul__

    def __neg__(self):
        return QuotElem(uscale(self.rep, -1), self.modulus, True)

    def __pow__(self, k: int):
        if k < 0:
            return inv(self) ** (-k)
        result = QuotElem((1,), self.modulus)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuotElem(uscale(self.rep, Fraction(1) / Fraction(other)), self.modulus, True)
        return self * inv(other)

    def __eq__(self, other):
        if isinstance(other, QuotElem):
            return self.modulus == other.modulus and self.rep == other.rep
        if isinstance(other, (int, Fraction)):
            return self.rep == utrim((other,))
        return NotImplemented

    def __hash__(self):
        return hash((self.rep, self.modulus))

    def __bool__(self):
        return bool(self.rep)

    def __repr__(self):
        return f"QuotElem({list(map(str, self.rep))}, mod {list(map(str, self.modulus))})"


def quot_reduce(p, g) -> QuotElem:
    """Reduce a univariate polynomial ``p`` modulo the monic ``g``.

    Both arguments are coefficient sequences (lowest degree first) or
    univariate :class:`~torsdiv.mpoly.MultiPoly` objects.
    """
    return QuotElem(_as_coeffs(p), _as_coeffs(g))


def _as_coeffs(p):
    if hasattr(p, "univariate_coeffs"):
        return p.univariate_coeffs()
    return tuple(p)


def inv(a):
    """Multiplicative inverse in the ring of ``a``; raises :class:`NotAUnit`."""
    if isinstance(a, FpElem):
        if a.r == 0:
            raise NotAUnit(f"0 is not invertible in F_{a.p}")
        return FpElem(pow(a.r, -1, a.p), a.p, True)
    if isinstance(a, ZpnElem):
        if a.r % a.p == 0:
            raise NotAUnit(f"{a.r} is divisible by p={a.p}")
        return ZpnElem(pow(a.r, -1, a.modulus), a.p, a.N, True)
    if isinstance(a, QuotElem):
        g, s, _ = uxgcd(a.rep, a.modulus)
        if g != (1,):
            raise NotAUnit("zero divisor in Q[v]/(g)", factor=g if g else a.modulus)
        return QuotElem(s, a.modulus)
    if isinstance(a, (int, Fraction)):
        if a == 0:
            raise NotAUnit("0 is not invertible in Q")
        return normalize_rational(1 / Fraction(a))
    raise TypeError(f"unsupported ring element {a!r}")


# ---------------------------------------------------------------------------
# ring tags


class Ring:
    """Tag describing a coefficient ring; ``coerce`` embeds rationals."""

    name = "?"
    is_field = True

    def coerce(self, c):
        raise NotImplementedError

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()

    def __repr__(self):
        return self.name


class RationalField(Ring):
    name = "QQ"

    def coerce(self, c):
        if isinstance(c, (int, Fraction)):
            return normalize_rational(c)
        raise TypeError(f"cannot coerce {c!r} into QQ")


class PrimeField(Ring):
    def __init__(self, p: int):
        _check_odd_prime(p)
        self.p = p
        self.name = f"GF({p})"

    def _key(self):
        return (self.p,)

    def coerce(self, c):
        if isinstance(c, FpElem):
            if c.p != self.p:
                raise MixedModulus("field mismatch")
            return c
        return FpElem.from_rational(c, self.p)


class PadicResidueRing(Ring):
    is_field = False

    def __init__(self, p: int, N: int):
        _check_odd_prime(p)
        self.p, self.N = p, N
        self.name = f"Z/{p}^{N}"

    def _key(self):
        return (self.p, self.N)

    def coerce(self, c):
        if isinstance(c, ZpnElem):
            return c
        return ZpnElem.from_rational(c, self.p, self.N)


class QuotientRing(Ring):
    """Q[v]/(g); a field only when g is irreducible (not checked)."""

    def __init__(self, g, var: str = "v"):
        g = utrim(_as_coeffs(g))
        if len(g) < 2:
            raise ValueError("modulus must have degree >= 1")
        self.g = umonic(g)
        self.var = var
        self.name = f"QQ[{var}]/({_upoly_str(self.g, var)})"

    def _key(self):
        return (self.g,)

    def coerce(self, c):
        if isinstance(c, QuotElem):
            if c.modulus != self.g:
                raise MixedModulus("QuotElem moduli differ")
            return c
        return QuotElem(utrim((c,)), self.g, True)

    def gen(self) -> QuotElem:
        return QuotElem((0, 1), self.g)


def _upoly_str(a, var="v") -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and c == 1:
            parts.append(f"+{mono}")
        elif mono and c == -1:
            parts.append(f"-{mono}")
        else:
            s = rational_to_str(c)
            s = s if s.startswith("-") else "+" + s
            parts.append(s + ("*" + mono if mono else ""))
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)
