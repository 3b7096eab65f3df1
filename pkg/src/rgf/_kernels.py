"""Hot loops over outcome tables.

Each kernel has a numba implementation and a pure-numpy one with the same
signature and the same results.  numba is used when importable unless the
environment variable ``RGF_NO_NUMBA`` is set to a non-empty value other
than ``0``.

Profile codes are mixed-radix with agent 1 most significant:
``code = sum(p_i * M**(n-1-i))`` where ``p_i`` indexes the lexicographic
list of the ``M = m!`` rankings.
"""

from __future__ import annotations

import os

import numpy as np

# deviation-scan kinds
SP = 0  # any strictly better outcome
RF = 1  # strictly better and not rescued by some consistent counterfactual
MONO = 2  # aux marks monotonic transformations; outcome drops below f(P)
MASKIN = 3  # aux marks Maskin transformations; outcome changes

_flag = os.environ.get("RGF_NO_NUMBA", "")
_WANT_NUMBA = _flag in ("", "0")

try:
    if not _WANT_NUMBA:
        raise ImportError
    import numba as _nb
except ImportError:
    _nb = None

BACKEND = "numba" if _nb is not None else "numpy"

_NOT_FOUND = (-1, -1, -1)


def strides(n: int, M: int) -> np.ndarray:
    return np.array([M ** (n - 1 - i) for i in range(n)], dtype=np.int64)


# ---------------------------------------------------------------------------
# numpy implementations


def _rescue_numpy(table, rank, n, M, agent):
    m = rank.shape[1]
    ti = np.moveaxis(table.reshape((M,) * n), agent, 0).reshape(M, -1)
    out = np.zeros((M, M, m), dtype=np.bool_)
    for p in range(M):
        truthful = ti[p]
        rp = rank[p]
        better = rp[truthful][None, :] > rp[ti]
        for o in np.unique(truthful):
            out[p, :, o] = (better[:, truthful == o]).any(axis=1)
    return out


def _cond_numpy(kind, rp_d, rp_o, aux_vals, d, o):
    if kind == SP:
        return rp_d > rp_o
    if kind == RF:
        return (rp_d > rp_o) & ~aux_vals
    if kind == MONO:
        return aux_vals & (rp_d < rp_o)
    return aux_vals & (d != o)


def _scan_numpy(table, rank, n, M, aux, kind, codes):
    st = strides(n, M)
    chunk = max(1, (1 << 21) // M)
    for lo in range(0, len(codes), chunk):
        c = codes[lo:lo + chunk]
        o = table[c].astype(np.int64)
        best = None  # (pos, agent, q)
        for i in range(n):
            p = (c // st[i]) % M
            base = c - p * st[i]
            qs = np.arange(M, dtype=np.int64)
            d = table[base[:, None] + qs[None, :] * st[i]].astype(np.int64)
            rp_d = rank[p[:, None], d]
            rp_o = rank[p, o][:, None]
            aux_vals = aux[i, p[:, None], qs[None, :], o[:, None]] if kind != SP else None
            viol = _cond_numpy(kind, rp_d, rp_o, aux_vals, d, o[:, None])
            viol &= qs[None, :] != p[:, None]
            rows = np.flatnonzero(viol.any(axis=1))
            if rows.size:
                pos = int(rows[0])
                if best is None or pos < best[0]:
                    best = (pos, i, int(np.argmax(viol[pos])))
        if best is not None:
            return lo + best[0], best[1], best[2]
    return _NOT_FOUND


# ---------------------------------------------------------------------------
# numba implementations

if _nb is not None:

    @_nb.njit(cache=True, nogil=True)
    def _rescue_numba(table, rank, n, M, agent):
        m = rank.shape[1]
        out = np.zeros((M, M, m), dtype=np.bool_)
        s = M ** (n - 1 - agent)
        rest = M ** (n - 1)
        for r in range(rest):
            hi = r // s
            lo = r % s
            base = hi * s * M + lo
            for p in range(M):
                o = table[base + p * s]
                ro = rank[p, o]
                for q in range(M):
                    if ro > rank[p, table[base + q * s]]:
                        out[p, q, o] = True
        return out

    @_nb.njit(cache=True, nogil=True)
    def _scan_numba(table, rank, n, M, aux, kind, codes):
        st = np.empty(n, dtype=np.int64)
        for i in range(n):
            st[i] = M ** (n - 1 - i)
        for pos in range(codes.shape[0]):
            c = codes[pos]
            o = table[c]
            for i in range(n):
                p = (c // st[i]) % M
                base = c - p * st[i]
                ro = rank[p, o]
                for q in range(M):
                    if q == p:
                        continue
                    d = table[base + q * st[i]]
                    rd = rank[p, d]
                    if kind == SP:
                        hit = rd > ro
                    elif kind == RF:
                        hit = rd > ro and not aux[i, p, q, o]
                    elif kind == MONO:
                        hit = aux[i, p, q, o] and rd < ro
                    else:
                        hit = aux[i, p, q, o] and d != o
                    if hit:
                        return pos, i, q
        return -1, -1, -1


def rescue_table(table: np.ndarray, rank: np.ndarray, n: int, M: int, agent: int) -> np.ndarray:
    """``out[p, q, o]``: some others' report makes truthful ``p`` yield ``o`` and
    misreport ``q`` yield something ``p`` ranks strictly below ``o``."""
    if BACKEND == "numba":
        return _rescue_numba(table, rank, n, M, agent)
    return _rescue_numpy(table, rank, n, M, agent)


def scan_deviations(table, rank, n, M, aux, kind, codes) -> tuple[int, int, int]:
    """First ``(position in codes, agent, misreport)`` violating ``kind``; ``(-1, -1, -1)`` if none.

    ``aux`` is a boolean array indexed ``[agent, p, q, o]`` (ignored for SP).
    """
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    if BACKEND == "numba":
        r = _scan_numba(table, rank, n, M, aux, kind, codes)
        return int(r[0]), int(r[1]), int(r[2])
    return _scan_numpy(table, rank, n, M, aux, kind, codes)


def force_backend(name: str) -> None:
    """Switch backends at runtime (benchmarks and cross-backend tests)."""
    global BACKEND
    if name == "numba" and _nb is None:
        raise RuntimeError("numba backend unavailable")
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    BACKEND = name
