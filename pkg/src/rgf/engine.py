"""Outcome tables, profile codes, sampling and the parallel first-hit search.

A profile is encoded as ``sum(p_i * M**(n-1-i))`` where ``p_i`` is the
lexicographic index of agent ``i``'s ranking and ``M = m!``.  The all-first
profile encodes to 0 and the last agent varies fastest, matching
:func:`rgf.prefcore.enumerate_profiles`.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .prefcore import (
    DomainError,
    Profile,
    Preference,
    SpaceTooLarge,
    permutation_tables,
    preference_count,
    preference_from_index,
    preference_index,
)
from .rules import (
    ContractError,
    Family,
    RuleSpec,
    condorcet_variant_winners,
    evaluate,
)

TABLE_BUDGET = 2**26
CACHE_MAGIC = b"RGF1"
_HEADER = struct.Struct("<4sHH32s")
_CHUNK = 1 << 16
SCORE_SUM_BUDGET = 50_000_000


# ---------------------------------------------------------------------------
# codes


def strides(n: int, m: int) -> np.ndarray:
    return _kernels.strides(n, preference_count(m))


def encode(profile: Profile) -> int:
    M = preference_count(profile.m)
    code = 0
    for pref in profile.prefs:
        code = code * M + preference_index(pref)
    return code


def decode(n: int, m: int, code: int) -> Profile:
    M = preference_count(m)
    if not 0 <= code < M**n:
        raise DomainError(f"profile code {code} out of range for n={n}, m={m}")
    digits = []
    for _ in range(n):
        code, d = divmod(code, M)
        digits.append(d)
    return Profile(tuple(preference_from_index(m, d) for d in reversed(digits)))


def code_digits(codes: np.ndarray, n: int, m: int) -> np.ndarray:
    """Per-agent preference indices, shape ``(len(codes), n)``."""
    st = strides(n, m)
    M = preference_count(m)
    return (np.asarray(codes, dtype=np.int64)[:, None] // st[None, :]) % M


def digits_to_codes(digits: np.ndarray, m: int) -> np.ndarray:
    n = digits.shape[1]
    return (np.asarray(digits, dtype=np.int64) * strides(n, m)[None, :]).sum(axis=1)


# ---------------------------------------------------------------------------
# workers


def resolve_workers(workers: int | None = None) -> int:
    """``RGF_WORKERS`` wins over the argument; default is the CPU count."""
    env = os.environ.get("RGF_WORKERS")
    if env:
        try:
            workers = int(env)
        except ValueError:
            raise DomainError(f"RGF_WORKERS={env!r} is not an integer") from None
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise DomainError(f"worker count must be positive, got {workers}")
    return workers


def split_range(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total)) if total else 1
    bounds = [total * k // parts for k in range(parts + 1)]
    return [(bounds[k], bounds[k + 1]) for k in range(parts)]


def first_hit(search: Callable[[int, int], tuple | None], total: int, workers: int | None = None):
    """Run ``search(lo, hi)`` over contiguous ranges; return the hit from the lowest range.

    ``search`` must return the earliest hit inside its range or ``None``.  The
    result is the same for every worker count.
    """
    w = resolve_workers(workers)
    ranges = split_range(total, w)
    if w == 1 or len(ranges) == 1:
        for lo, hi in ranges:
            hit = search(lo, hi)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=w) as pool:
        futures = [pool.submit(search, lo, hi) for lo, hi in ranges]
        for k, fut in enumerate(futures):
            hit = fut.result()
            if hit is not None:
                for later in futures[k + 1:]:
                    later.cancel()
                return hit
    return None


# ---------------------------------------------------------------------------
# vectorized evaluation


def _resolve_ties(spec: RuleSpec, winners: np.ndarray, digits: np.ndarray, rank: np.ndarray) -> np.ndarray:
    tb = spec.tiebreak
    m = winners.shape[1]
    if tb.kind == "order":
        prio = np.empty(m, dtype=np.int64)
        prio[list(tb.order)] = np.arange(m)
        return np.where(winners, prio[None, :], m).argmin(axis=1)
    if tb.kind == "agent":
        prio = m - rank[digits[:, tb.agent - 1]].astype(np.int64)
        return np.where(winners, prio, m).argmin(axis=1)
    counts = winners.sum(axis=1)
    if (counts > 2).any():
        raise ContractError("star relation applied to more than two candidates")
    first = winners.argmax(axis=1)
    last = m - 1 - winners[:, ::-1].argmax(axis=1)
    rel = np.zeros((m, m), dtype=bool)
    for a, b in tb.relation:
        rel[a, b] = True
    return np.where(rel[first, last], first, last)


def _argmax_set(values: np.ndarray) -> np.ndarray:
    return values == values.max(axis=1, keepdims=True)


def _tally(ranks: np.ndarray) -> np.ndarray:
    """``C[:, a, b]`` from per-agent bottom-up ranks of shape ``(N, n, m)``."""
    return (ranks[:, :, :, None] > ranks[:, :, None, :]).sum(axis=1)


def _generic(spec: RuleSpec, digits: np.ndarray, perms: np.ndarray) -> np.ndarray:
    out = np.empty(len(digits), dtype=np.int64)
    for k, row in enumerate(digits):
        prof = Profile(tuple(Preference(tuple(perms[d])) for d in row))
        out[k] = evaluate(spec, prof)
    return out


def batch_outcomes(spec: RuleSpec, digits: np.ndarray) -> np.ndarray:
    """Outcomes for many profiles given as preference-index rows."""
    n, m = spec.n, spec.m
    digits = np.asarray(digits, dtype=np.int64)
    if digits.ndim != 2 or digits.shape[1] != n:
        raise DomainError(f"expected digit rows of width n={n}")
    perms, rank = permutation_tables(m)
    fam = spec.family
    N = len(digits)
    if N == 0:
        return np.empty(0, dtype=np.int64)
    ranks = rank[digits].astype(np.int64)  # (N, n, m)
    if fam is Family.MAXMIN:
        return _resolve_ties(spec, _argmax_set(ranks.min(axis=1)), digits, rank)
    if fam is Family.SCORING:
        sv = np.array(spec.scores.integer_scores(), dtype=np.int64)
        return _resolve_ties(spec, _argmax_set(sv[ranks - 1].sum(axis=1)), digits, rank)
    if fam is Family.DICTATORSHIP:
        return perms[digits[:, spec.agent - 1], 0].astype(np.int64)
    if fam is Family.BOTTOM:
        return perms[digits[:, spec.agent - 1], m - 1].astype(np.int64)
    if fam is Family.CONSTANT:
        return np.full(N, spec.alternative, dtype=np.int64)
    tops = perms[digits, 0].astype(np.int64)  # (N, n)
    if fam is Family.MAXTOP:
        prio = np.empty(m, dtype=np.int64)
        prio[list(spec.order)] = np.arange(m)
        return np.asarray(spec.order, dtype=np.int64)[prio[tops].min(axis=1)]
    if fam is Family.TOPS_TABLE:
        tcode = (tops * (m ** np.arange(n - 1, -1, -1))[None, :]).sum(axis=1)
        return np.asarray(spec.table, dtype=np.int64)[tcode]
    if fam is Family.EXTENDED_MAJORITY:
        x, y = spec.order
        win = np.zeros(1 << n, dtype=bool)
        for coalition in spec.committee.winning:
            win[sum(1 << (i - 1) for i in coalition)] = True
        mask = ((tops == x) * (1 << np.arange(n))[None, :]).sum(axis=1)
        return np.where(win[mask], x, y)
    C = _tally(ranks)
    idx = np.arange(N)
    if fam is Family.SUCCESSIVE_ELIMINATION:
        survivor = np.full(N, spec.order[0], dtype=np.int64)
        for ch in spec.order[1:]:
            # the survivor always precedes the challenger in the agenda, so it wins ties
            survivor = np.where(C[idx, ch, survivor] > C[idx, survivor, ch], ch, survivor)
        return survivor
    beats = C > C.transpose(0, 2, 1)
    cw_mask = beats.sum(axis=2) == m - 1
    has_cw = cw_mask.any(axis=1)
    cw = cw_mask.argmax(axis=1)
    if fam is Family.CONDORCET:
        v = spec.variant
        if v == "simpson":
            masked = C + np.eye(m, dtype=np.int64)[None] * (n + 1)
            winners = _argmax_set(masked.min(axis=2))
        elif v == "copeland":
            winners = _argmax_set(beats.sum(axis=2) - beats.sum(axis=1))
        elif v == "black":
            winners = _argmax_set(ranks.sum(axis=1))
        else:
            winners = np.zeros((N, m), dtype=bool)
            for k in np.flatnonzero(~has_cw):
                prof = Profile(tuple(Preference(tuple(perms[d])) for d in digits[k]))
                winners[k, list(condorcet_variant_winners(prof, v))] = True
            winners[has_cw, 0] = True  # placeholder; overwritten by the Condorcet winner
        return np.where(has_cw, cw, _resolve_ties(spec, winners, digits, rank))
    return _generic(spec, digits, perms)


# ---------------------------------------------------------------------------
# outcome tables


@dataclass(frozen=True)
class OutcomeTable:
    spec: RuleSpec
    outcomes: np.ndarray  # int8, length (m!)^n, read-only

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def M(self) -> int:
        return preference_count(self.spec.m)

    def __len__(self) -> int:
        return len(self.outcomes)

    def lookup(self, profile: Profile) -> int:
        return int(self.outcomes[encode(profile)])

    def save(self, path: str | Path) -> None:
        header = _HEADER.pack(CACHE_MAGIC, self.n, self.m, self.spec.digest())
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(self.outcomes.astype("<i1").tobytes())

    @classmethod
    def load(cls, path: str | Path, spec: RuleSpec) -> "OutcomeTable | None":
        """The cached table, or ``None`` when the file is missing, damaged or for another rule."""
        try:
            raw = Path(path).read_bytes()
        except OSError:
            return None
        if len(raw) < _HEADER.size:
            return None
        magic, n, m, digest = _HEADER.unpack_from(raw)
        if magic != CACHE_MAGIC or (n, m) != (spec.n, spec.m) or digest != spec.digest():
            return None
        body = np.frombuffer(raw, dtype="<i1", offset=_HEADER.size).astype(np.int8)
        if len(body) != preference_count(m) ** n:
            return None
        body.flags.writeable = False
        return cls(spec, body)


def table_size(n: int, m: int) -> int:
    return preference_count(m) ** n


def build_outcome_table(
    spec: RuleSpec,
    budget: int = TABLE_BUDGET,
    workers: int | None = None,
    spot_checks: int = 16,
) -> OutcomeTable:
    size = table_size(spec.n, spec.m)
    if size > budget:
        raise SpaceTooLarge(f"outcome table needs {size} entries, budget is {budget}")
    out = np.empty(size, dtype=np.int8)

    def fill(lo: int, hi: int) -> None:
        for start in range(lo, hi, _CHUNK):
            stop = min(hi, start + _CHUNK)
            digits = code_digits(np.arange(start, stop), spec.n, spec.m)
            out[start:stop] = batch_outcomes(spec, digits)

    ranges = split_range(size, resolve_workers(workers))
    if len(ranges) == 1:
        fill(*ranges[0])
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            for fut in [pool.submit(fill, lo, hi) for lo, hi in ranges]:
                fut.result()
    if spot_checks:
        rng = np.random.default_rng(0)
        for code in rng.integers(0, size, size=min(spot_checks, size)):
            expect = evaluate(spec, decode(spec.n, spec.m, int(code)))
            if out[code] != expect:
                raise AssertionError(f"table entry {code} is {out[code]}, direct evaluation gives {expect}")
    out.flags.writeable = False
    return OutcomeTable(spec, out)


def cache_path(spec: RuleSpec, directory: str | Path) -> Path:
    h = hashlib.sha256(spec.describe().encode()).hexdigest()[:16]
    return Path(directory) / f"{spec.family.value}-{spec.n}x{spec.m}-{h}.rgf"


def cached_outcome_table(spec: RuleSpec, directory: str | Path, **kwargs) -> OutcomeTable:
    path = cache_path(spec, directory)
    table = OutcomeTable.load(path, spec)
    if table is None:
        table = build_outcome_table(spec, **kwargs)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
    return table


# ---------------------------------------------------------------------------
# sampling


def sampled_digits(n: int, m: int, count: int, seed: int) -> np.ndarray:
    if count < 0:
        raise DomainError(f"sample count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    return rng.integers(0, preference_count(m), size=(count, n), dtype=np.int64)


def sampled_profiles(n: int, m: int, count: int, seed: int) -> list[Profile]:
    """Uniform profiles: each agent's ranking drawn independently and uniformly."""
    perms, _ = permutation_tables(m)
    return [
        Profile(tuple(Preference(tuple(perms[d])) for d in row))
        for row in sampled_digits(n, m, count, seed)
    ]


# ---------------------------------------------------------------------------
# anonymous scoring rules beyond table range


class ScoreSumModel:
    """Exact deviation analysis for scoring rules with a fixed-order tie-break.

    The outcome depends only on the summed score vector, and rankings that
    award identical per-alternative scores are interchangeable.  The others'
    reports therefore matter only as a multiset of score classes, which keeps
    the inner quantifier of the regret-free test small even when ``(m!)^(n-1)``
    is astronomical.
    """

    def __init__(self, spec: RuleSpec, budget: int = SCORE_SUM_BUDGET):
        if not self.applicable(spec):
            raise ContractError("score-sum model needs a scoring rule with a fixed-order tie-break")
        self.spec = spec
        n, m = spec.n, spec.m
        _, rank = permutation_tables(m)
        self.rank = rank.astype(np.int64)
        sv = np.array(spec.scores.integer_scores(), dtype=np.int64)
        self.contrib = sv[self.rank - 1]  # (M, m)
        self.classes, inverse = np.unique(self.contrib, axis=0, return_inverse=True)
        self.cls = inverse.reshape(-1)
        C = len(self.classes)
        S = math.comb(C + n - 2, n - 1)
        if S * C * m > budget:
            raise SpaceTooLarge(f"score-sum model needs {S * C * m} cells, budget is {budget}")
        combos = np.array(list(itertools.combinations_with_replacement(range(C), n - 1)), dtype=np.int64)
        self.others = self.classes[combos].sum(axis=1) if n > 1 else np.zeros((1, m), dtype=np.int64)
        self.prio = np.empty(m, dtype=np.int64)
        self.prio[list(spec.tiebreak.order)] = np.arange(m)
        # outcome for (own class, others' multiset)
        self.grid = self.outcome(self.classes[:, None, :] + self.others[None, :, :])
        self.first_member = np.array([np.flatnonzero(self.cls == c)[0] for c in range(C)])
        self._rescue: dict[int, np.ndarray] = {}

    @staticmethod
    def applicable(spec: RuleSpec) -> bool:
        return spec.family is Family.SCORING and spec.tiebreak.kind == "order"

    def outcome(self, totals: np.ndarray) -> np.ndarray:
        best = totals.max(axis=-1, keepdims=True)
        return np.where(totals == best, self.prio, self.spec.m).argmin(axis=-1)

    def rescue(self, p: int) -> np.ndarray:
        """``out[c, o]``: some others' report yields ``o`` for truthful ``p`` and worse for class ``c``."""
        hit = self._rescue.get(p)
        if hit is None:
            truthful = self.grid[self.cls[p]]
            r = self.rank[p]
            better = r[truthful][None, :] > r[self.grid]
            hit = np.zeros((len(self.classes), self.spec.m), dtype=bool)
            for o in np.unique(truthful):
                hit[:, o] = better[:, truthful == o].any(axis=1)
            self._rescue[p] = hit
        return hit

    def scan(self, digits: np.ndarray, regret_free: bool) -> tuple[int, int, int] | None:
        """First ``(row, agent, misreport)`` manipulation (regret-free violation if asked)."""
        contrib = self.contrib
        totals = contrib[digits].sum(axis=1)
        base = self.outcome(totals)
        for row in range(len(digits)):
            for i in range(self.spec.n):
                p = int(digits[row, i])
                rest = totals[row] - contrib[p]
                o = int(base[row])
                dev = self.outcome(self.classes + rest[None, :])
                bad = self.rank[p, dev] > self.rank[p, o]
                if regret_free:
                    bad &= ~self.rescue(p)[:, o]
                if bad.any():
                    return row, i, int(self.first_member[bad].min())
        return None

    def all_counterfactuals_safe(self, p: int, q: int, o: int) -> bool:
        """True iff no others' report consistent with ``o`` makes misreport ``q`` strictly worse."""
        return not bool(self.rescue(p)[self.cls[q], o])


def as_digits(profiles: Sequence[Profile]) -> np.ndarray:
    return np.array([[preference_index(p) for p in prof.prefs] for prof in profiles], dtype=np.int64)
