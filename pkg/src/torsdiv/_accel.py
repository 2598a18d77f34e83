"""Finite-field hot loops, in a numba flavour and a plain numpy flavour.

The backend is picked by ``TORSDIV_BACKEND`` (``numba`` or ``numpy``);
without it numba is used when importable.  Every public function also
accepts ``backend=`` to force one path, which the tests use to check
that both agree.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if not os.environ.get("NUMBA_THREADING_LAYER"):
        # skip the TBB probe, which warns on older TBB installs
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

# generator codes used in encoded words: 0 = m, 1 = m^-1, 2 = mu, 3 = mu^-1
M_, MI_, U_, UI_ = 0, 1, 2, 3


def default_backend() -> str:
    want = os.environ.get("TORSDIV_BACKEND", "").strip().lower()
    if want == "numpy":
        return "numpy"
    if want == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("TORSDIV_BACKEND=numba but numba is not installed")
        return "numba"
    if want:
        raise ValueError(f"unknown TORSDIV_BACKEND {want!r}")
    return "numba" if HAVE_NUMBA else "numpy"


def resolve_backend(backend: str | None = "auto") -> str:
    """Concrete backend name without consulting the environment."""
    if backend in (None, "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    return _pick(backend)


def _pick(backend):
    b = backend or default_backend()
    if b == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    return b


# ---------------------------------------------------------------------------
# Riley census: status per (s1, s2, u); 0 relator fails, 1 holds and the
# polynomial vanishes (or u = 0, not asserted), 2 violation


def _census_numpy(word, n, p):
    s = np.arange(1, p, dtype=np.int64)
    inv = np.array([pow(int(a), p - 2, p) for a in s], dtype=np.int64)
    S1, S2, U = np.meshgrid(np.arange(p - 1), np.arange(p - 1), np.arange(p), indexing="ij")
    s1, s1i = s[S1], inv[S1]
    s2, s2i = s[S2], inv[S2]
    u = U.astype(np.int64)
    zero = np.zeros_like(u)
    one = np.ones_like(u)
    # matrices as 4-tuples of arrays (a11, a12, a21, a22)
    gens = {
        M_: (s1, one, zero, s1i),
        MI_: (s1i, (p - 1) * one, zero, s1),
        U_: (s2, zero, u, s2i),
        UI_: (s2i, zero, (p - u) % p, s2),
    }
    a11, a12, a21, a22 = one.copy(), zero.copy(), zero.copy(), one.copy()
    for g in word:
        b11, b12, b21, b22 = gens[int(g)]
        a11, a12, a21, a22 = (
            (a11 * b11 + a12 * b21) % p,
            (a11 * b12 + a12 * b22) % p,
            (a21 * b11 + a22 * b21) % p,
            (a21 * b12 + a22 * b22) % p,
        )
    holds = (a11 == 1) & (a12 == 0) & (a21 == 0) & (a22 == 1)
    x = (s1 + s1i) % p
    y = (s2 + s2i) % p
    z = (s1 * s2 + s1i * s2i + u) % p
    v = (x * x + y * y + z * z - x * y % p * z - 2) % p
    Sm2, Sm1 = np.zeros_like(v), one.copy()   # S_{-1}, S_0
    seq = [Sm2, Sm1]
    for _ in range(n):
        seq.append((v * seq[-1] - seq[-2]) % p)
    # seq[k+1] = S_k
    Sn, Sn1, Sn2 = seq[n + 1], seq[n], seq[n - 1]
    xy = x * y % p
    f = (xy * Sn1 - (xy - z) * Sn2 - z * Sn) % p
    val = f * Sn1 % p
    status = np.where(holds, np.where((u == 0) | (val == 0), 1, 2), 0).astype(np.int8)
    return status


if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _census_numba_kernel(word, n, p, inv):
        out = np.zeros((p - 1, p - 1, p), dtype=np.int8)
        for i in prange(p - 1):
            s1 = i + 1
            s1i = inv[i]
            for j in range(p - 1):
                s2 = j + 1
                s2i = inv[j]
                for u in range(p):
                    a11, a12, a21, a22 = 1, 0, 0, 1
                    for g in word:
                        if g == 0:
                            b11, b12, b21, b22 = s1, 1, 0, s1i
                        elif g == 1:
                            b11, b12, b21, b22 = s1i, p - 1, 0, s1
                        elif g == 2:
                            b11, b12, b21, b22 = s2, 0, u, s2i
                        else:
                            b11, b12, b21, b22 = s2i, 0, (p - u) % p, s2
                        c11 = (a11 * b11 + a12 * b21) % p
                        c12 = (a11 * b12 + a12 * b22) % p
                        c21 = (a21 * b11 + a22 * b21) % p
                        c22 = (a21 * b12 + a22 * b22) % p
                        a11, a12, a21, a22 = c11, c12, c21, c22
                    if not (a11 == 1 and a12 == 0 and a21 == 0 and a22 == 1):
                        continue
                    x = (s1 + s1i) % p
                    y = (s2 + s2i) % p
                    z = (s1 * s2 + s1i * s2i + u) % p
                    v = (x * x + y * y + z * z - (x * y % p) * z - 2) % p
                    # walk from (S_{-1}, S_0) to (S_{n-1}, S_n)
                    prev, cur = 0, 1
                    for _ in range(n):
                        prev, cur = cur, (v * cur - prev) % p
                    sk = cur
                    skm1 = prev
                    skm2 = (v * skm1 - sk) % p
                    xy = x * y % p
                    f = (xy * skm1 - (xy - z) * skm2 - z * sk) % p
                    val = f * skm1 % p
                    if u == 0 or val == 0:
                        out[i, j, u] = 1
                    else:
                        out[i, j, u] = 2
        return out


def census(word, n: int, p: int, backend: str | None = None) -> np.ndarray:
    """Status array of shape (p-1, p-1, p) indexed by (s1-1, s2-1, u)."""
    word = np.asarray(word, dtype=np.int64)
    if _pick(backend) == "numba":
        inv = np.array([pow(a, p - 2, p) for a in range(1, p)], dtype=np.int64)
        return _census_numba_kernel(word, n, p, inv)
    return _census_numpy(word, n, p)


# ---------------------------------------------------------------------------
# point enumeration on F_p^3: returns an int64 array of shape (7, p, p, p)
# holding f, tau, reducible, f_x, f_y, f_z (all of the expanded f_n) and v


def _points_numpy(n, p):
    a, b, c = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64),
                          np.arange(p, dtype=np.int64), indexing="ij")
    return np.stack(_point_values_np(a, b, c, n, p))


def _point_values_np(a, b, c, n, p):
    ab = a * b % p
    v = (a * a + b * b + c * c - ab * c - 2) % p
    # S_k and dS_k for k = -2 .. n
    S = {-2: np.full_like(v, p - 1), -1: np.zeros_like(v)}
    dS = {-2: np.zeros_like(v), -1: np.zeros_like(v)}
    for k in range(0, n + 1):
        S[k] = (v * S[k - 1] - S[k - 2]) % p
        dS[k] = (S[k - 1] + v * dS[k - 1] - dS[k - 2]) % p
    # P_{n-2}: P_{-1}=0, P_0=1, P_{k+1} = v P_k - P_{k-1} + 1
    Pm, P0 = np.zeros_like(v), np.ones_like(v)
    if n - 2 == -1:
        Pn2 = Pm
    else:
        prev, cur = Pm, P0
        for _ in range(n - 2):
            prev, cur = cur, (v * cur - prev + 1) % p
        Pn2 = cur
    f = (ab * S[n - 1] - (ab - c) * S[n - 2] - c * S[n]) % p
    dv = (ab * dS[n - 1] - (ab - c) * dS[n - 2] - c * dS[n]) % p
    fx = (b * (S[n - 1] - S[n - 2]) + dv * (2 * a - b * c)) % p
    fy = (a * (S[n - 1] - S[n - 2]) + dv * (2 * b - a * c)) % p
    fz = (S[n - 2] - S[n] + dv * (2 * c - ab)) % p
    tau = ((2 - a - b + c) * S[n - 1] + (4 - 2 * a - 2 * b + ab) * Pn2) % p
    red = (v - 2) % p
    return f, tau, red, fx, fy, fz, v


if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _points_numba_kernel(n, p):
        out = np.zeros((7, p, p, p), dtype=np.int64)
        for a in prange(p):
            S = np.zeros(n + 3, dtype=np.int64)  # S[k+2] = S_k
            dS = np.zeros(n + 3, dtype=np.int64)
            for b in range(p):
                ab = a * b % p
                for c in range(p):
                    v = (a * a + b * b + c * c - ab * c - 2) % p
                    S[0] = p - 1
                    S[1] = 0
                    dS[0] = 0
                    dS[1] = 0
                    for k in range(2, n + 3):
                        S[k] = (v * S[k - 1] - S[k - 2]) % p
                        dS[k] = (S[k - 1] + v * dS[k - 1] - dS[k - 2]) % p
                    sn, sn1, sn2 = S[n + 2], S[n + 1], S[n]
                    dn, dn1, dn2 = dS[n + 2], dS[n + 1], dS[n]
                    if n == 1:
                        pn2 = 0
                    else:
                        prev, cur = 0, 1
                        for _ in range(n - 2):
                            prev, cur = cur, (v * cur - prev + 1) % p
                        pn2 = cur
                    f = (ab * sn1 - (ab - c) * sn2 - c * sn) % p
                    dv = (ab * dn1 - (ab - c) * dn2 - c * dn) % p
                    out[0, a, b, c] = f
                    out[1, a, b, c] = ((2 - a - b + c) * sn1 + (4 - 2 * a - 2 * b + ab) * pn2) % p
                    out[2, a, b, c] = (v - 2) % p
                    out[3, a, b, c] = (b * (sn1 - sn2) + dv * (2 * a - b * c)) % p
                    out[4, a, b, c] = (a * (sn1 - sn2) + dv * (2 * b - a * c)) % p
                    out[5, a, b, c] = (sn2 - sn + dv * (2 * c - ab)) % p
                    out[6, a, b, c] = v
        return out


def points(n: int, p: int, backend: str | None = None) -> np.ndarray:
    """Values of (f, tau, reducible, f_x, f_y, f_z, v) on all of F_p^3."""
    if _pick(backend) == "numba":
        return _points_numba_kernel(n, p)
    return _points_numpy(n, p)


# ---------------------------------------------------------------------------
# truncated bivariate series product modulo M (total degree <= D)


def _series_mul_numpy(A, B, D, M):
    out = np.zeros((D + 1, D + 1), dtype=A.dtype)
    for i in range(D + 1):
        for j in range(D + 1 - i):
            a = A[i, j]
            if a == 0:
                continue
            # contributions to (i+k, j+l) with i+k+j+l <= D
            rem = D - i - j
            for k in range(rem + 1):
                out[i + k, j:j + rem - k + 1] = (out[i + k, j:j + rem - k + 1] + a * B[k, :rem - k + 1]) % M
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _series_mul_numba_kernel(A, B, D, M):
        out = np.zeros((D + 1, D + 1), dtype=np.int64)
        for i in range(D + 1):
            for j in range(D + 1 - i):
                a = A[i, j]
                if a == 0:
                    continue
                for k in range(D + 1 - i - j):
                    for l in range(D + 1 - i - j - k):
                        out[i + k, j + l] = (out[i + k, j + l] + a * B[k, l]) % M
        return out


def series_fits_int64(M: int) -> bool:
    """Whether products of residues mod M stay inside int64."""
    return (M - 1) * (M - 1) + (M - 1) < 2**63


def series_mul(A: np.ndarray, B: np.ndarray, D: int, M: int, backend: str | None = None) -> np.ndarray:
    if A.dtype == object or not series_fits_int64(M):
        return _series_mul_numpy(A.astype(object), B.astype(object), D, M)
    if _pick(backend) == "numba":
        return _series_mul_numba_kernel(A, B, D, M)
    return _series_mul_numpy(A, B, D, M)
