import itertools

import numpy as np
import pytest

from torsdiv import _accel
from torsdiv import linkcheck as lc
from torsdiv import replab as rl
from torsdiv.exactring import GF, FpElem
from torsdiv.mpoly import evaluate

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _census_oracle(n, p):
    """Status array rebuilt from exact Mat2 products over F_p."""
    rel = rl.twisted_whitehead(n).relators[0]
    out = np.zeros((p - 1, p - 1, p), dtype=np.int8)
    for s1, s2, u in itertools.product(range(1, p), range(1, p), range(p)):
        par = rl.RileyParams(FpElem(s1, p), FpElem(s2, p), FpElem(u, p))
        if not rl.eval_word(rel, par.matrices()).is_identity():
            continue
        x, y, z, v = rl.traces(par)
        fS = rl._family_value(n, x, y, z, v) * FpElem(int(_s(n - 1, v)), p)
        out[s1 - 1, s2 - 1, u] = 1 if (u == 0 or fS == 0) else 2
    return out


def _s(k, v):
    from torsdiv import chebfam as cf
    from torsdiv.exactring import ueval

    return ueval(cf.S_coeffs(k), v)


@pytest.mark.parametrize("n,p", [(1, 3), (1, 5), (2, 5), (3, 3), (2, 7)])
def test_census_numpy_matches_exact_oracle(n, p):
    word = rl.encode_word(rl.twisted_whitehead(n).relators[0])
    got = _accel.census(word, n, p, "numpy")
    assert np.array_equal(got, _census_oracle(n, p))


@needs_numba
@pytest.mark.parametrize("n,p", [(1, 7), (2, 11), (3, 13)])
def test_census_backends_agree(n, p):
    word = rl.encode_word(rl.twisted_whitehead(n).relators[0])
    assert np.array_equal(_accel.census(word, n, p, "numba"), _accel.census(word, n, p, "numpy"))


@pytest.mark.parametrize("n,p", [(1, 5), (2, 7), (3, 5)])
def test_points_match_polynomial_evaluation(n, p):
    vals = _accel.points(n, p, "numpy")
    fp = lc.family_polys(n)
    polys = [fp.f_exp, fp.tau_exp, lc.reducible_poly(), *fp.exp_partials]
    rng = np.random.default_rng(n * 100 + p)
    for a, b, c in rng.integers(0, p, size=(25, 3)):
        pt = (int(a), int(b), int(c), 0)
        for k, P in enumerate(polys):
            want = evaluate(P, pt, ring=GF(p))
            assert int(vals[k, a, b, c]) == int(want), (k, pt)


@needs_numba
@pytest.mark.parametrize("n,p", [(1, 5), (2, 11), (3, 7)])
def test_points_backends_agree(n, p):
    assert np.array_equal(_accel.points(n, p, "numba"), _accel.points(n, p, "numpy"))


def _naive_series_mul(A, B, D, M):
    out = [[0] * (D + 1) for _ in range(D + 1)]
    for i1, j1, i2, j2 in itertools.product(range(D + 1), repeat=4):
        if i1 + j1 <= D and i2 + j2 <= D and i1 + i2 + j1 + j2 <= D:
            out[i1 + i2][j1 + j2] = (out[i1 + i2][j1 + j2] + int(A[i1, j1]) * int(B[i2, j2])) % M
    return out


@pytest.mark.parametrize("backend", ["numpy", pytest.param("numba", marks=needs_numba)])
@pytest.mark.parametrize("M", [5**3, 11**8, 101**8])
def test_series_mul(backend, M):
    D = 4
    rng = np.random.default_rng(M % 1000)
    mk = lambda: np.array([[int(t) % M for t in row] for row in rng.integers(0, 2**62, size=(D + 1, D + 1))],  # noqa: E731
                          dtype=np.int64 if _accel.series_fits_int64(M) else object)
    A, B = mk(), mk()
    got = _accel.series_mul(A, B, D, M, backend)
    want = _naive_series_mul(A, B, D, M)
    assert [[int(got[i, j]) for j in range(D + 1 - i)] for i in range(D + 1)] == \
        [[want[i][j] for j in range(D + 1 - i)] for i in range(D + 1)]


def test_backend_resolution():
    assert _accel.resolve_backend("numpy") == "numpy"
    assert _accel.resolve_backend("auto") in ("numba", "numpy")
    with pytest.raises(ValueError):
        _accel.resolve_backend("cuda")
