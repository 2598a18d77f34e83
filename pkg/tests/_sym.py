"""sympy bridge used as an independent oracle."""
import sympy

from torsdiv.mpoly import VARS, MultiPoly

SYMS = sympy.symbols(VARS)


def to_sympy(p: MultiPoly, syms=SYMS):
    return sympy.Add(*[sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s**k for s, k in zip(syms, e)])
                       for e, c in p.terms.items()])


def monic_set(exprs, syms=SYMS, order="grevlex"):
    out = set()
    for e in exprs:
        P = sympy.Poly(e, *syms)
        out.add(sympy.expand(P.as_expr() / P.LC(order=order)))
    return out


def sympy_saturated_gb(gens, units):
    t = sympy.Symbol("t_sat")
    pi = sympy.Mul(*[to_sympy(u) for u in units])
    G = sympy.groebner([to_sympy(g) for g in gens] + [t * pi - 1], t, *SYMS, order="lex")
    kept = [g for g in G.exprs if t not in g.free_symbols]
    return monic_set(sympy.groebner(kept, *SYMS, order="grevlex").exprs)
