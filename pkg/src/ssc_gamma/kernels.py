"""Hot loops over coset representatives.

Each kernel has a numba ``@njit`` body and a pure-numpy twin.  Set
``SSC_GAMMA_NO_NUMBA=1`` to force the numpy path (also used automatically
when numba is missing).  Both paths must agree to rounding; see
``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SSC_GAMMA_NO_NUMBA", "") not in ("1", "true", "yes")

# products A*X must stay below 2**63
INT64_SAFE = 2 ** 31


def _njit(fn):
    if HAVE_NUMBA:
        return nb.njit(cache=True)(fn)
    return fn


@_njit
def _phase_sum_jit(X, A, mod, logtab, tame_num, tame_den, p):
    re = 0.0
    im = 0.0
    two_pi = 2.0 * np.pi
    for j in range(X.shape[0]):
        x = X[j]
        ang = ((A * (x % mod)) % mod) / mod
        if tame_num != 0:
            ang += (logtab[x % p] * tame_num % tame_den) / tame_den
        re += np.cos(two_pi * ang)
        im += np.sin(two_pi * ang)
    return re, im


def _phase_sum_np(X, A, mod, logtab, tame_num, tame_den, p):
    ang = ((A * (X % mod)) % mod) / mod
    if tame_num != 0:
        ang = ang + (logtab[X % p] * tame_num % tame_den) / tame_den
    z = np.exp(2j * np.pi * ang)
    return float(z.real.sum()), float(z.imag.sum())


def phase_sum(X, A: int, mod: int, logtab, tame_num: int, tame_den: int, p: int,
              use_numba: bool | None = None) -> complex:
    """``sum_j exp(2 pi i (A X_j / mod + tame(X_j mod p)))``.

    ``X`` holds integer representatives prime to p (unit cosets); the tame
    part is ``logtab[X mod p] * tame_num / tame_den`` with ``logtab`` the
    discrete-log table of a fixed residue generator.
    """
    if mod > INT64_SAFE:
        raise OverflowError("modulus too large for the int64 kernels")
    X = np.ascontiguousarray(X, dtype=np.int64)
    logtab = np.ascontiguousarray(logtab, dtype=np.int64)
    A = int(A) % mod if mod > 1 else 0
    mod = max(int(mod), 1)
    jit = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    fn = _phase_sum_jit if jit else _phase_sum_np
    re, im = fn(X, A, mod, logtab, int(tame_num), max(int(tame_den), 1), int(p))
    return complex(re, im)


@_njit
def _count_congruent_jit(X, Y, mod):
    n = 0
    for j in range(X.shape[0]):
        if (X[j] - Y[j]) % mod == 0:
            n += 1
    return n


def count_congruent(X, Y, mod: int, use_numba: bool | None = None) -> int:
    """Number of indices with ``X_j = Y_j (mod mod)``."""
    X = np.ascontiguousarray(X, dtype=np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.int64)
    jit = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    if jit:
        return int(_count_congruent_jit(X, Y, int(mod)))
    return int(np.count_nonzero((X - Y) % mod == 0))


def unit_grid(p: int, digits: int, start: int = 0, step: int = 1, count: int | None = None):
    """Integers ``start + step*j`` (j < count) that are prime to p.

    With defaults: all units modulo ``p^digits``.
    """
    if count is None:
        count = p ** digits
    X = start + step * np.arange(count, dtype=np.int64)
    return X[X % p != 0]
