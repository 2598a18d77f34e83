"""Exact 2x2 matrices, free-group words and representation-level oracles.

Words use one letter per generator; an uppercase letter is the inverse
(``"mUMu"`` is m mu^-1 m^-1 mu, with ``u`` standing for mu).  Powers may
also be written ``a^-3``.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import _accel
from . import chebfam as cf
from .exactring import FpElem, inv, is_prime, ueval

CENSUS_CAP = 211
DEFAULT_SEED = 20240607


class IdentityFailure(AssertionError):
    pass


class Violation(AssertionError):
    pass


class DenominatorZero(ZeroDivisionError):
    pass


class CapExceeded(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrices


class Mat2:
    __slots__ = ("a11", "a12", "a21", "a22")

    def __init__(self, a11, a12, a21, a22):
        self.a11, self.a12, self.a21, self.a22 = a11, a12, a21, a22

    @classmethod
    def identity(cls, like=1):
        one = like ** 0 if not isinstance(like, int) else 1
        return cls(one, 0 * one, 0 * one, one)

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )

    def scale(self, c) -> "Mat2":
        return Mat2(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    def __add__(self, o):
        return Mat2(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)

    def __sub__(self, o):
        return Mat2(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self):
        return self.a11 + self.a22

    def inverse(self) -> "Mat2":
        d = self.det()
        adj = Mat2(self.a22, -self.a12, -self.a21, self.a11)
        if d == 1:
            return adj
        return adj.scale(inv(d))

    def __pow__(self, k: int) -> "Mat2":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Mat2.identity(self.a11 if not isinstance(self.a11, int) else 1)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def is_identity(self) -> bool:
        return self.a11 == 1 and self.a12 == 0 and self.a21 == 0 and self.a22 == 1

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries())

    def __eq__(self, o):
        return isinstance(o, Mat2) and all(a == b for a, b in zip(self.entries(), o.entries()))

    def __hash__(self):
        return hash(self.entries())

    def __repr__(self):
        return f"Mat2({self.a11}, {self.a12}, {self.a21}, {self.a22})"


# ---------------------------------------------------------------------------
# words


_TOKEN = re.compile(r"([A-Za-z])(?:\^\(?(-?\d+)\)?)?")


class Word:
    """Freely reduced word: a tuple of (generator letter, nonzero exponent)."""

    __slots__ = ("syllables",)

    def __init__(self, syllables=()):
        out: list[list] = []
        for g, e in syllables:
            if e == 0:
                continue
            if out and out[-1][0] == g:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([g, e])
        self.syllables = tuple((g, e) for g, e in out)

    @classmethod
    def parse(cls, s: str) -> "Word":
        s = s.replace(" ", "").replace("*", "")
        syl = []
        pos = 0
        while pos < len(s):
            m = _TOKEN.match(s, pos)
            if not m:
                raise ValueError(f"cannot parse word {s!r} at {pos}")
            letter, exp = m.group(1), int(m.group(2)) if m.group(2) else 1
            if letter.isupper():
                letter, exp = letter.lower(), -exp
            syl.append((letter, exp))
            pos = m.end()
        return cls(syl)

    def __mul__(self, o: "Word") -> "Word":
        return Word(self.syllables + o.syllables)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.syllables))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.syllables * abs(k))

    def letters(self) -> str:
        return "".join((g if e > 0 else g.upper()) * abs(e) for g, e in self.syllables)

    def __len__(self):
        return sum(abs(e) for _, e in self.syllables)

    def exponent_sum(self, g: str) -> int:
        return sum(e for h, e in self.syllables if h == g)

    def substitute(self, images: Mapping[str, "Word"]) -> "Word":
        out = Word()
        for g, e in self.syllables:
            out = out * (images[g] ** e if g in images else Word([(g, e)]))
        return out

    def cyclic_reduction(self) -> "Word":
        s = list(self.letters())
        while len(s) >= 2 and s[0] != s[-1] and s[0].lower() == s[-1].lower():
            s = s[1:-1]
        return Word.parse("".join(s))

    def __eq__(self, o):
        return isinstance(o, Word) and self.syllables == o.syllables

    def __hash__(self):
        return hash(self.syllables)

    def __str__(self):
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables) or "1"

    def __repr__(self):
        return f"Word({self.letters()!r})"


def cyclically_equivalent(w1: Word, w2: Word) -> bool:
    """Whether w2 is a cyclic rotation of w1 or of w1^-1 (after cyclic reduction)."""
    a = w1.cyclic_reduction().letters()
    b = w2.cyclic_reduction().letters()
    if len(a) != len(b):
        return False
    ai = w1.cyclic_reduction().inverse().letters()
    return b in a + a or b in ai + ai


def commutator(a: Word, b: Word) -> Word:
    return a * b * a.inverse() * b.inverse()


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    name: str
    generators: tuple
    relators: tuple

    def holds(self, assignment) -> bool:
        return all(eval_word(r, assignment).is_identity() for r in self.relators)


def twisted_omega(n: int) -> Word:
    """omega = (mu m mu^-1 m^-1)^n m (m^-1 mu^-1 m mu)^n."""
    return Word.parse("umUM") ** n * Word.parse("m") * Word.parse("MUmu") ** n


def twisted_whitehead(n: int) -> Presentation:
    """W_{2n-1}: m omega = omega m."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = Word.parse("m")
    om = twisted_omega(n)
    return Presentation(f"twisted_whitehead_{n}", ("m", "u"), (commutator(m, om),))


def whitehead_word() -> Word:
    return Word.parse("umUMUmu")


def _named():
    m, u = Word.parse("m"), Word.parse("u")
    w = whitehead_word()
    comm = (commutator(u, m) * commutator(u.inverse(), m) * commutator(u.inverse(), m.inverse())
            * commutator(u, m.inverse()))
    return {
        # the form that agrees with the rewritten relation m w = w m
        "whitehead_pi1": Presentation("whitehead_pi1", ("m", "u"), (commutator(m, w),)),
        "whitehead_commutator": Presentation("whitehead_commutator", ("m", "u"), (comm,)),
        # as typeset before the rewrite; kept for comparison, see tests
        "whitehead_printed": Presentation("whitehead_printed", ("m", "u"), (m * w * u.inverse() * w.inverse(),)),
        "whitehead_ab": Presentation("whitehead_ab", ("a", "b"), (Word.parse("ba^-3bab^-2a^3b^-1a^-1b"),)),
    }


PRESENTATIONS = _named()

# peripheral words in the (a, b) presentation
PERIPHERAL = {
    "mu'": Word.parse("a^-2b"),
    "lambda'": Word.parse("a^-2bab^-2ab"),
    "m'": Word.parse("b^-1a"),
    "l'": Word.parse("b^-1ab^-1aba^-3ba"),
}
AB_SUBSTITUTION = {"m": Word.parse("bA"), "u": Word.parse("aBa")}


def presentation(name: str, n: int | None = None) -> Presentation:
    if name == "twisted_whitehead":
        return twisted_whitehead(n or 1)
    try:
        return PRESENTATIONS[name]
    except KeyError:
        raise ValueError(f"unknown presentation {name!r}") from None


def eval_word(w: Word | str, assignment: Mapping[str, Mat2]) -> Mat2:
    if isinstance(w, str):
        w = Word.parse(w)
    some = next(iter(assignment.values()))
    out = Mat2.identity(some.a11 if not isinstance(some.a11, int) else 1)
    cache: dict = {}
    for g, e in w.syllables:
        if g not in assignment:
            raise KeyError(f"generator {g!r} has no matrix")
        key = (g, e)
        if key not in cache:
            cache[key] = assignment[g] ** e
        out = out * cache[key]
    return out


def encode_word(w: Word) -> list[int]:
    """Letter codes for the census kernel (m, m^-1, mu, mu^-1) -> (0, 1, 2, 3)."""
    code = {("m", 1): 0, ("m", -1): 1, ("u", 1): 2, ("u", -1): 3}
    out = []
    for g, e in w.syllables:
        out.extend([code[(g, 1 if e > 0 else -1)]] * abs(e))
    return out


# ---------------------------------------------------------------------------
# Riley form


@dataclass(frozen=True)
class RileyParams:
    s1: object
    s2: object
    u: object

    def matrices(self) -> dict[str, Mat2]:
        s1, s2, u = self.s1, self.s2, self.u
        A = Mat2(s1, 1 * s1 ** 0, 0 * s1, inv(s1))
        B = Mat2(s2, 0 * s2, u, inv(s2))
        return {"m": A, "u": B}


def traces(p: RileyParams):
    s1i, s2i = inv(p.s1), inv(p.s2)
    x = p.s1 + s1i
    y = p.s2 + s2i
    z = p.s1 * p.s2 + s1i * s2i + p.u
    v = x * x + y * y + z * z - x * y * z - 2
    return x, y, z, v


def _family_value(n, x, y, z, v):
    S = lambda k: ueval(cf.S_coeffs(k), v)  # noqa: E731
    return x * y * S(n - 1) - (x * y - z) * S(n - 2) - z * S(n)


def relator_oracle(n: int, p: int, backend: str | None = None, strict: bool = False) -> dict:
    """Exhaustive Riley census over F_p for W_{2n-1}.

    Whenever the relator holds with u != 0, f_n * S_{n-1} must vanish at
    the traces.  ``strict`` raises :class:`Violation` on any counterexample.
    """
    if not (isinstance(p, int) and p > 2 and is_prime(p)):
        raise ValueError("p must be an odd prime")
    if p > CENSUS_CAP:
        raise CapExceeded(f"p={p} exceeds the census cap {CENSUS_CAP}")
    word = encode_word(twisted_whitehead(n).relators[0])
    status = _accel.census(word, n, p, backend)
    holds = status > 0
    nonab = holds.copy()
    nonab[:, :, 0] = False
    bad = np.argwhere(status == 2)
    report = {
        "n": n,
        "p": p,
        "tested": int(status.size),
        "relator_holds": int(holds.sum()),
        "relator_holds_u_nonzero": int(nonab.sum()),
        "violations": int(len(bad)),
        "violation_triples": [[int(i) + 1, int(j) + 1, int(k)] for i, j, k in bad[:10]],
        "backend": backend or _accel.default_backend(),
    }
    if strict and report["violations"]:
        raise Violation(f"relator holds but f_n*S_(n-1) != 0 at {report['violation_triples']}")
    return report


def census_solutions(n: int, p: int, backend: str | None = None) -> list[tuple[int, int, int]]:
    """Triples (s1, s2, u) with u != 0 satisfying the W_{2n-1} relator over F_p."""
    word = encode_word(twisted_whitehead(n).relators[0])
    status = _accel.census(word, n, p, backend)
    idx = np.argwhere(status > 0)
    return [(int(i) + 1, int(j) + 1, int(k)) for i, j, k in idx if k != 0]


# ---------------------------------------------------------------------------
# order three and the triangle group


COMPANION = Mat2(0, 1, -1, -1)


def _random_unimodular_conjugator(rng: random.Random, span: int = 9) -> Mat2:
    while True:
        P = Mat2(*(Fraction(rng.randint(-span, span)) for _ in range(4)))
        if P.det() != 0:
            return P


def random_order3(rng: random.Random) -> Mat2:
    """A random rational conjugate of the companion matrix of v^2 + v + 1."""
    P = _random_unimodular_conjugator(rng)
    return P * COMPANION * P.inverse()


def order3_symbolic() -> dict:
    """Generic trace -1, det 1 matrix: A^2 + A + I and A^3 - I vanish modulo
    the ideal (a11 + a22 + 1, a11*a22 - a12*a21 - 1)."""
    from .groebner import IdealBasis, buchberger
    from .mpoly import MultiPoly

    vars_ = ("a11", "a12", "a21", "a22")
    a11, a12, a21, a22 = MultiPoly.gens(vars_)
    G = buchberger(IdealBasis([a11 + a22 + 1, a11 * a22 - a12 * a21 - 1]))
    A = Mat2(a11, a12, a21, a22)
    I = Mat2(*(MultiPoly.const(c, vars_) for c in (1, 0, 0, 1)))
    ch = A * A + A + I
    cube = A * A * A - I
    ch_ok = all(G.normal_form(e).is_zero() for e in ch.entries())
    cube_ok = all(G.normal_form(e).is_zero() for e in cube.entries())
    # the same through the substitution a22 := -1 - a11, a12 := -(1 + a11 + a11^2)/a21
    # cleared by a21: entries of a21^3 (A^3 - I) expand to zero
    sub_ok = True
    for e in cube.entries():
        q = e.subs("a22", -1 - a11)
        # multiply through by a21^k, replace a12*a21 by -(1 + a11 + a11^2)
        q = _clear_det(q, a11, a21)
        sub_ok = sub_ok and q.is_zero()
    return {"ok": ch_ok and cube_ok and sub_ok, "cayley_hamilton": ch_ok, "cube_is_identity": cube_ok,
            "substitution_route": sub_ok, "gb_hash": G.hash()}


def _clear_det(q, a11, a21):
    from .mpoly import MultiPoly

    rel = -(1 + a11 + a11 * a11)  # value of a12*a21 on the locus
    out = MultiPoly({}, q.vars)
    for k, c in q.coeffs_in("a12").items():
        # a12^k = (a12 a21)^k / a21^k; multiply the whole thing by a21^deg
        out = out + c * rel ** k * a21 ** (q.degree("a12") - k)
    return out


def order3_suite(samples: int = 100, seed: int = DEFAULT_SEED) -> dict:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sym = order3_symbolic()
    rng = random.Random(seed)
    bad = []
    for i in range(samples):
        A = random_order3(rng)
        ok = A.trace() == -1 and A.det() == 1 and (A ** 3).is_identity() \
            and (A * A - A.scale(A.trace()) + Mat2.identity(Fraction(1))).is_zero()
        if not ok:
            bad.append(i)
    fixed = {
        "companion": (COMPANION ** 3).is_identity(),
        "conjugate": (Mat2(-1, 1, -1, 0) ** 3).is_identity(),
        "unipotent_is_not_order3": not (Mat2(1, 1, 0, 1) ** 3).is_identity(),
    }
    ok = sym["ok"] and not bad and all(fixed.values())
    return {"ok": ok, "samples": samples, "seed": seed, "symbolic": sym, "fixed": fixed,
            "failed_samples": bad}


def whitehead_peripheral_check(samples: int = 100, seed: int = DEFAULT_SEED) -> dict:
    """Sampled pairs of order-three matrices satisfy the (-3,-3) surgery relations."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    rel = PRESENTATIONS["whitehead_ab"].relators[0]
    pairs = [(COMPANION, Mat2(-1, 1, -1, 0)), (COMPANION, COMPANION)]
    while len(pairs) < samples + 2:
        pairs.append((random_order3(rng), random_order3(rng)))
    failures = []
    tr_ab = set()
    for idx, (A, B) in enumerate(pairs):
        g = {"a": A, "b": B}
        ev = {k: eval_word(w, g) for k, w in PERIPHERAL.items()}
        checks = {
            "a3": (A ** 3).is_identity(),
            "b3": (B ** 3).is_identity(),
            "relator": eval_word(rel, g).is_identity(),
            "m'^3 = l'": ev["m'"] ** 3 == ev["l'"],
            "mu'^3 = lambda'": ev["mu'"] ** 3 == ev["lambda'"],
        }
        if not all(checks.values()):
            failures.append({"index": idx, "failed": [k for k, ok in checks.items() if not ok],
                             "A": [str(e) for e in A.entries()], "B": [str(e) for e in B.entries()]})
        tr_ab.add((A * B).trace())
    return {"ok": not failures, "samples": samples, "seed": seed, "pairs_checked": len(pairs),
            "failures": failures, "distinct_tr_ab": len(tr_ab)}


# ---------------------------------------------------------------------------
# longitude


LONGITUDE_CAVEAT = ("values follow the closed formulas verbatim; whether they describe the longitude "
                    "or its inverse depends on orientation conventions, see longitude_check")


def longitude_eval(p: RileyParams, n: int, branch: str = "geometric") -> tuple:
    """Diagonal entry and corner entry of the longitude image."""
    x, y, z, v = traces(p)
    s1 = p.s1
    if branch == "nongeometric":
        if ueval(cf.S_coeffs(n - 1), v) != 0:
            raise ValueError("nongeometric branch requires S_{n-1}(v) = 0")
        one = s1 ** 0 if not isinstance(s1, int) else 1
        return one, 0 * one
    if branch != "geometric":
        raise ValueError(f"unknown branch {branch!r}")
    den1 = -inv(s1) * y + z
    den2 = x * y * z - y * y - z * z
    if den1 == 0 or den2 == 0:
        raise DenominatorZero("longitude formula denominator vanishes")
    return (s1 * y - z) * inv(den1), y * (x * y - 2 * z) * inv(den2)


def longitude_check(n: int, p: int, backend: str | None = None) -> dict:
    """Evaluate the longitude formulas on census solutions over F_p.

    On geometric samples the matrix [[l, *], [0, 1/l]] must commute with
    rho(a); it is also compared with rho(m omega^-1) and rho(omega m^-1).
    On samples with S_{n-1}(v) = 0, rho(omega m^-1) is compared with I.
    """
    om = twisted_omega(n)
    cand = om * Word.parse("M")
    counts = {"geometric": 0, "commutes": 0, "equals_m_omega_inv": 0, "equals_omega_m_inv": 0,
              "nongeometric": 0, "nongeometric_identity": 0, "skipped": 0}
    for s1, s2, u in census_solutions(n, p, backend):
        par = RileyParams(FpElem(s1, p), FpElem(s2, p), FpElem(u, p))
        x, y, z, v = traces(par)
        g = par.matrices()
        if ueval(cf.S_coeffs(n - 1), v) == 0:
            counts["nongeometric"] += 1
            counts["nongeometric_identity"] += eval_word(cand, g).is_identity()
            continue
        if _family_value(n, x, y, z, v) != 0 or par.s1 == inv(par.s1):
            counts["skipped"] += 1
            continue
        try:
            l, st = longitude_eval(par, n)
        except DenominatorZero:
            counts["skipped"] += 1
            continue
        Lam = Mat2(l, st, 0 * l, inv(l))
        A = g["m"]
        counts["geometric"] += 1
        counts["commutes"] += (A * Lam == Lam * A)
        W = eval_word(cand, g)
        counts["equals_omega_m_inv"] += (W == Lam)
        counts["equals_m_omega_inv"] += (W.inverse() == Lam)
    ok = counts["commutes"] == counts["geometric"]
    return {"ok": ok, "n": n, "p": p, "counts": counts, "caveat": LONGITUDE_CAVEAT}


__all__ = [
    "Mat2", "Word", "Presentation", "RileyParams", "PRESENTATIONS", "PERIPHERAL", "AB_SUBSTITUTION",
    "presentation", "twisted_whitehead", "twisted_omega", "whitehead_word", "eval_word", "traces",
    "relator_oracle", "census_solutions", "order3_suite", "order3_symbolic", "whitehead_peripheral_check",
    "longitude_eval", "longitude_check", "cyclically_equivalent", "commutator", "encode_word",
    "IdentityFailure", "Violation", "DenominatorZero", "CapExceeded", "CENSUS_CAP", "DEFAULT_SEED",
]
