"""Decision procedures for axioms over a finite (n, m) scope.

Every checker returns a :class:`Verdict`.  A violation always carries the
first witness in the fixed enumeration order (profile code, then agent, then
misreport index), so results do not depend on the worker count.

Two independent routes exist.  The ``table`` route reads outcomes from a
precomputed :class:`~rgf.engine.OutcomeTable` (or vectorized evaluation) and
runs the deviation scans in :mod:`rgf._kernels`.  The ``direct`` route walks
profiles one by one through :func:`rgf.rules.evaluate` and follows each
definition literally.  Tests use the latter to audit the former.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator

import numpy as np

from . import _kernels
from .engine import (
    TABLE_BUDGET,
    OutcomeTable,
    ScoreSumModel,
    batch_outcomes,
    build_outcome_table,
    code_digits,
    decode,
    digits_to_codes,
    encode,
    first_hit,
    resolve_workers,
    sampled_digits,
    table_size,
)
from .prefcore import (
    DomainError,
    Preference,
    Profile,
    SpaceTooLarge,
    enumerate_preferences,
    enumerate_profiles,
    permutation_tables,
    permute_agents,
    permute_profile_alternatives,
    preference_count,
    preference_from_index,
    preference_index,
    prefers,
    rank_of,
    weakly_prefers,
)
from .rules import RuleSpec, condorcet_winner, evaluate

EXHAUSTIVE_BUDGET = 2_000_000
INNER_BUDGET = 2_000_000
AUX_BUDGET = 1 << 28

HOLDS = "Holds"
VIOLATED = "Violated"

DEVIATION_AXIOMS = ("strategy_proof", "regret_free", "monotone", "maskin_monotone")
SIMPLE_AXIOMS = ("efficient", "unanimous", "anonymous", "neutral", "dictatorial")
AXIOMS = DEVIATION_AXIOMS + ("tops_only", "condorcet_consistent") + SIMPLE_AXIOMS

_KIND = {
    "strategy_proof": _kernels.SP,
    "regret_free": _kernels.RF,
    "monotone": _kernels.MONO,
    "maskin_monotone": _kernels.MASKIN,
}


@dataclass(frozen=True)
class Exhaustive:
    def describe(self) -> str:
        return "exhaustive"


@dataclass(frozen=True)
class Sampled:
    count: int
    seed: int

    def describe(self) -> str:
        return f"sampled({self.count}, seed {self.seed})"


Mode = Exhaustive | Sampled


@dataclass(frozen=True)
class Witness:
    """Self-contained certificate of a violation; see :func:`recheck`.

    Fields are used per axiom: deviation axioms fill ``profile``, ``agent``
    (1-based) and ``misreport``; ``tops_only`` pairs ``profile`` with
    ``other``; the symmetry axioms add the ``permutation`` (0-based) that maps
    ``profile`` to ``other``; ``alternative`` names the dominating alternative
    (efficient), the Condorcet winner, or the demoted outcome (monotone);
    ``profiles`` lists, per agent, a profile where that agent's top loses
    (non-dictatorial).
    """

    axiom: str
    profile: Profile
    agent: int | None = None
    misreport: Preference | None = None
    other: Profile | None = None
    permutation: tuple[int, ...] | None = None
    alternative: int | None = None
    counterfactuals_safe: bool = False
    profiles: tuple[Profile, ...] = ()


@dataclass(frozen=True)
class Verdict:
    axiom: str
    status: str
    coverage: Mode
    witness: Witness | None = None
    dictator: int | None = None
    route: str = field(default="table", compare=False)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


def _verdict(axiom, mode, witness, route, **kw) -> Verdict:
    return Verdict(axiom, VIOLATED if witness is not None else HOLDS, mode, witness, route=route, **kw)


# ---------------------------------------------------------------------------
# shared helpers


def _check_scope(spec: RuleSpec, mode: Mode, budget: int) -> None:
    if isinstance(mode, Exhaustive):
        size = table_size(spec.n, spec.m)
        if size > budget:
            raise SpaceTooLarge(
                f"(m!)^n = {size} exceeds the exhaustive budget {budget}; use sampled mode"
            )
    elif mode.count < 0:
        raise DomainError("sample count must be non-negative")


def is_monotonic_transformation(p: Preference, q: Preference, x: int) -> bool:
    """``q`` keeps every position at or below ``x``'s position in ``p`` unchanged."""
    k = rank_of(p, x)
    return p.ranking[p.m - k:] == q.ranking[q.m - k:]


def is_maskin_transformation(p: Preference, q: Preference, x: int) -> bool:
    """Whatever ``q`` puts above ``x``, ``p`` already put above ``x``."""
    return all(prefers(p, y, x) for y in range(p.m) if prefers(q, y, x))


def _mono_aux(m: int) -> np.ndarray:
    """``aux[p, q, o]`` for monotonic transformations."""
    perms, rank = permutation_tables(m)
    M = len(perms)
    out = np.zeros((M, M, m), dtype=bool)
    for p in range(M):
        for o in range(m):
            k = int(rank[p, o])
            out[p, :, o] = (perms[:, m - k:] == perms[p, m - k:][None, :]).all(axis=1)
    return out


def _maskin_aux(m: int) -> np.ndarray:
    _, rank = permutation_tables(m)
    rank = rank.astype(np.int64)
    # upper[p, o] = bitmask of alternatives ranked above o in p
    above = rank[:, None, :] > rank[:, :, None]  # (M, o, y)
    upper = (above * (1 << np.arange(m))[None, None, :]).sum(axis=2)
    return (upper[None, :, :] & ~upper[:, None, :]) == 0  # [p, q, o]


def _deviation_aux(axiom: str, table: np.ndarray, rank: np.ndarray, n: int, m: int, workers) -> np.ndarray:
    M = preference_count(m)
    if n * M * M * m > AUX_BUDGET:
        raise SpaceTooLarge(f"deviation auxiliary array for m={m}, n={n} exceeds budget")
    if axiom == "strategy_proof":
        return np.zeros((n, 1, 1, 1), dtype=bool)
    if axiom == "regret_free":
        w = min(resolve_workers(workers), n)
        if w == 1:
            parts = [_kernels.rescue_table(table, rank, n, M, i) for i in range(n)]
        else:
            with ThreadPoolExecutor(max_workers=w) as pool:
                parts = list(pool.map(lambda i: _kernels.rescue_table(table, rank, n, M, i), range(n)))
        return np.stack(parts)
    base = _mono_aux(m) if axiom == "monotone" else _maskin_aux(m)
    return np.broadcast_to(base[None], (n,) + base.shape)


def _outer_codes(spec: RuleSpec, mode: Mode) -> tuple[int, Callable[[int, int], np.ndarray]]:
    if isinstance(mode, Exhaustive):
        total = table_size(spec.n, spec.m)
        return total, lambda lo, hi: np.arange(lo, hi, dtype=np.int64)
    codes = digits_to_codes(sampled_digits(spec.n, spec.m, mode.count, mode.seed), spec.m)
    return len(codes), lambda lo, hi: codes[lo:hi]


def _outer_profiles(spec: RuleSpec, mode: Mode) -> Iterator[Profile]:
    if isinstance(mode, Exhaustive):
        return enumerate_profiles(spec.n, spec.m, budget=table_size(spec.n, spec.m))
    digits = sampled_digits(spec.n, spec.m, mode.count, mode.seed)
    return (Profile(tuple(preference_from_index(spec.m, int(d)) for d in row)) for row in digits)


def _table_fits(spec: RuleSpec) -> bool:
    return table_size(spec.n, spec.m) <= TABLE_BUDGET


def _get_table(spec: RuleSpec, table: OutcomeTable | None, workers) -> OutcomeTable:
    if table is not None:
        if table.spec != spec:
            raise DomainError("outcome table was built for a different rule")
        return table
    return build_outcome_table(spec, workers=workers)


# ---------------------------------------------------------------------------
# deviation axioms: table route


def _deviation_table(spec, axiom, mode, workers, table) -> Verdict:
    n, m = spec.n, spec.m
    M = preference_count(m)
    T = _get_table(spec, table, workers).outcomes
    _, rank = permutation_tables(m)
    aux = _deviation_aux(axiom, T, rank, n, m, workers)
    kind = _KIND[axiom]
    total, codes_of = _outer_codes(spec, mode)

    def search(lo, hi):
        codes = codes_of(lo, hi)
        pos, i, q = _kernels.scan_deviations(T, rank, n, M, aux, kind, codes)
        return None if pos < 0 else (int(codes[pos]), i, q)

    hit = first_hit(search, total, workers)
    witness = None
    if hit is not None:
        code, i, q = hit
        prof = decode(n, m, code)
        mis = preference_from_index(m, q)
        alt = None
        if axiom == "monotone":
            alt = int(T[encode(prof.replace(i + 1, mis))])
        witness = Witness(axiom, prof, agent=i + 1, misreport=mis, alternative=alt,
                          counterfactuals_safe=axiom == "regret_free")
    return _verdict(axiom, mode, witness, "table")


def _deviation_score_sum(spec, axiom, mode) -> Verdict:
    model = ScoreSumModel(spec)
    total, codes_of = _outer_codes(spec, mode)
    digits = code_digits(codes_of(0, total), spec.n, spec.m)
    hit = model.scan(digits, regret_free=axiom == "regret_free")
    witness = None
    if hit is not None:
        row, i, q = hit
        prof = Profile(tuple(preference_from_index(spec.m, int(d)) for d in digits[row]))
        witness = Witness(axiom, prof, agent=i + 1, misreport=preference_from_index(spec.m, q),
                          counterfactuals_safe=axiom == "regret_free")
    return _verdict(axiom, mode, witness, "score-sum")


# ---------------------------------------------------------------------------
# deviation axioms: direct route


class _Direct:
    """Memoized literal evaluation of one rule."""

    def __init__(self, spec: RuleSpec):
        self.spec = spec
        self.prefs = enumerate_preferences(spec.m)
        self.f = lru_cache(maxsize=None)(lambda prof: evaluate(spec, prof))
        self._safe: dict[tuple[int, Preference, Preference, int], bool] = {}

    def all_counterfactuals_safe(self, i: int, p: Preference, q: Preference, o: int) -> bool:
        """For every others' report where truthful ``p`` yields ``o``, ``q`` does at least as well."""
        key = (i, p, q, o)
        if key not in self._safe:
            self._safe[key] = _inner_forall(self.spec, i, p, q, o, self.f, self.prefs)
        return self._safe[key]


def _inner_forall(spec, i, p, q, o, f, prefs) -> bool:
    n, m = spec.n, spec.m
    if preference_count(m) ** (n - 1) > INNER_BUDGET:
        raise SpaceTooLarge(
            f"inner scan over (m!)^(n-1) = {preference_count(m) ** (n - 1)} subprofiles exceeds {INNER_BUDGET}"
        )
    for rest in itertools.product(prefs, repeat=n - 1):
        truthful = Profile(rest[: i - 1] + (p,) + rest[i - 1:])
        if f(truthful) != o:
            continue
        if not weakly_prefers(p, f(truthful.replace(i, q)), o):
            return False
    return True


def _deviation_violation(axiom, d: _Direct, prof: Profile, i: int, q: Preference, o: int) -> bool:
    p = prof[i]
    out = d.f(prof.replace(i, q))
    if axiom == "strategy_proof":
        return prefers(p, out, o)
    if axiom == "regret_free":
        return prefers(p, out, o) and d.all_counterfactuals_safe(i, p, q, o)
    if axiom == "monotone":
        return is_monotonic_transformation(p, q, o) and prefers(p, o, out)
    return is_maskin_transformation(p, q, o) and out != o


def _deviation_direct(spec, axiom, mode) -> Verdict:
    d = _Direct(spec)
    for prof in _outer_profiles(spec, mode):
        o = d.f(prof)
        for i in range(1, spec.n + 1):
            for q in d.prefs:
                if q == prof[i]:
                    continue
                if _deviation_violation(axiom, d, prof, i, q, o):
                    alt = d.f(prof.replace(i, q)) if axiom == "monotone" else None
                    w = Witness(axiom, prof, agent=i, misreport=q, alternative=alt,
                                counterfactuals_safe=axiom == "regret_free")
                    return _verdict(axiom, mode, w, "direct")
    return _verdict(axiom, mode, None, "direct")


# ---------------------------------------------------------------------------
# other axioms: vectorized route


class _Outcomes:
    """Outcomes for digit rows, from a table when one is available."""

    def __init__(self, spec: RuleSpec, table: OutcomeTable | None, workers):
        self.spec = spec
        self.table = None
        if table is not None or _table_fits(spec):
            self.table = _get_table(spec, table, workers).outcomes

    def __call__(self, digits: np.ndarray) -> np.ndarray:
        if self.table is not None:
            return self.table[digits_to_codes(digits, self.spec.m)].astype(np.int64)
        return batch_outcomes(self.spec, digits)


def _digit_chunks(spec: RuleSpec, mode: Mode, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    total, codes_of = _outer_codes(spec, mode)
    for lo in range(0, total, chunk):
        yield code_digits(codes_of(lo, min(total, lo + chunk)), spec.n, spec.m)


def _first_row(mask: np.ndarray) -> int | None:
    rows = np.flatnonzero(mask)
    return int(rows[0]) if rows.size else None


def _profile_of(digits_row, m: int) -> Profile:
    return Profile(tuple(preference_from_index(m, int(d)) for d in digits_row))


def _tops_only_vec(spec, mode, f) -> Witness | None:
    m = spec.m
    perms, _ = permutation_tables(m)
    block = preference_count(m) // m  # rankings with a given top are contiguous
    for digits in _digit_chunks(spec, mode):
        reps = perms[digits, 0].astype(np.int64) * block
        row = _first_row(f(digits) != f(reps))
        if row is not None:
            return Witness("tops_only", _profile_of(reps[row], m), other=_profile_of(digits[row], m))
    return None


def _condorcet_vec(spec, mode, f) -> Witness | None:
    n, m = spec.n, spec.m
    _, rank = permutation_tables(m)
    for digits in _digit_chunks(spec, mode):
        r = rank[digits].astype(np.int64)
        C = (r[:, :, :, None] > r[:, :, None, :]).sum(axis=1)
        beats = C > C.transpose(0, 2, 1)
        cw_mask = beats.sum(axis=2) == m - 1
        has = cw_mask.any(axis=1)
        cw = cw_mask.argmax(axis=1)
        row = _first_row(has & (f(digits) != cw))
        if row is not None:
            return Witness("condorcet_consistent", _profile_of(digits[row], m), alternative=int(cw[row]))
    return None


def _efficient_vec(spec, mode, f) -> Witness | None:
    m = spec.m
    _, rank = permutation_tables(m)
    for digits in _digit_chunks(spec, mode):
        r = rank[digits].astype(np.int64)  # (N, n, m)
        o = f(digits)
        ro = np.take_along_axis(r, o[:, None, None].repeat(r.shape[1], axis=1), axis=2)
        dominated = (r > ro).all(axis=1)  # (N, m)
        row = _first_row(dominated.any(axis=1))
        if row is not None:
            y = int(np.argmax(dominated[row]))
            return Witness("efficient", _profile_of(digits[row], m), alternative=y)
    return None


def _unanimous_vec(spec, mode, f) -> Witness | None:
    m = spec.m
    perms, _ = permutation_tables(m)
    for digits in _digit_chunks(spec, mode):
        tops = perms[digits, 0].astype(np.int64)
        same = (tops == tops[:, :1]).all(axis=1)
        row = _first_row(same & (f(digits) != tops[:, 0]))
        if row is not None:
            return Witness("unanimous", _profile_of(digits[row], m), alternative=int(tops[row, 0]))
    return None


def _adjacent(k: int, size: int) -> tuple[int, ...]:
    pi = list(range(size))
    pi[k], pi[k + 1] = pi[k + 1], pi[k]
    return tuple(pi)


def _anonymous_vec(spec, mode, f) -> Witness | None:
    n, m = spec.n, spec.m
    gens = [_adjacent(k, n) for k in range(n - 1)]
    for digits in _digit_chunks(spec, mode):
        o = f(digits)
        bad = np.stack([o != f(digits[:, list(pi)]) for pi in gens], axis=1) if gens else np.zeros((len(o), 0), bool)
        row = _first_row(bad.any(axis=1))
        if row is not None:
            pi = gens[int(np.argmax(bad[row]))]
            prof = _profile_of(digits[row], m)
            return Witness("anonymous", prof, other=permute_agents(pi, prof), permutation=pi)
    return None


def _neutral_vec(spec, mode, f) -> Witness | None:
    m = spec.m
    perms, _ = permutation_tables(m)
    gens = [_adjacent(k, m) for k in range(m - 1)]
    maps = []
    for tau in gens:
        t = np.asarray(tau)
        moved = t[perms.astype(np.int64)]  # relabelled rankings
        maps.append(np.array([preference_index(Preference(tuple(r))) for r in moved], dtype=np.int64))
    for digits in _digit_chunks(spec, mode):
        o = f(digits)
        bad = np.stack([f(pm[digits]) != np.asarray(tau)[o] for tau, pm in zip(gens, maps)], axis=1)
        row = _first_row(bad.any(axis=1))
        if row is not None:
            tau = gens[int(np.argmax(bad[row]))]
            prof = _profile_of(digits[row], m)
            return Witness("neutral", prof, other=permute_profile_alternatives(tau, prof), permutation=tau)
    return None


def _dictatorial_vec(spec, mode, f) -> tuple[int | None, Witness | None]:
    n, m = spec.n, spec.m
    perms, _ = permutation_tables(m)
    firsts: list[Profile | None] = [None] * n
    for digits in _digit_chunks(spec, mode):
        o = f(digits)
        tops = perms[digits, 0].astype(np.int64)
        for i in range(n):
            if firsts[i] is None:
                row = _first_row(o != tops[:, i])
                if row is not None:
                    firsts[i] = _profile_of(digits[row], m)
        if all(p is not None for p in firsts):
            break
    for i, p in enumerate(firsts):
        if p is None:
            return i + 1, None
    return None, Witness("dictatorial", firsts[0], profiles=tuple(firsts))


# ---------------------------------------------------------------------------
# other axioms: direct route


def _simple_direct(spec, axiom, mode) -> tuple[int | None, Witness | None]:
    n, m = spec.n, spec.m
    f = lru_cache(maxsize=None)(lambda prof: evaluate(spec, prof))
    profiles = _outer_profiles(spec, mode)
    if axiom == "dictatorial":
        firsts: list[Profile | None] = [None] * n
        for prof in profiles:
            out = f(prof)
            for i in range(n):
                if firsts[i] is None and out != prof.prefs[i].top:
                    firsts[i] = prof
        for i, p in enumerate(firsts):
            if p is None:
                return i + 1, None
        return None, Witness("dictatorial", firsts[0], profiles=tuple(firsts))
    if axiom == "tops_only":
        # compare each profile with the lowest-coded one sharing its tops
        for prof in profiles:
            rep = Profile(tuple(_first_with_top(m, t) for t in prof.tops()))
            if f(rep) != f(prof):
                return None, Witness("tops_only", rep, other=prof)
        return None, None
    for prof in profiles:
        out = f(prof)
        if axiom == "efficient":
            for y in range(m):
                if all(prefers(p, y, out) for p in prof.prefs):
                    return None, Witness("efficient", prof, alternative=y)
        elif axiom == "unanimous":
            tops = set(prof.tops())
            if len(tops) == 1 and out not in tops:
                return None, Witness("unanimous", prof, alternative=next(iter(tops)))
        elif axiom == "condorcet_consistent":
            cw = condorcet_winner(prof)
            if cw is not None and out != cw:
                return None, Witness("condorcet_consistent", prof, alternative=cw)
        elif axiom == "anonymous":
            for pi in itertools.permutations(range(n)):
                other = permute_agents(pi, prof)
                if f(other) != out:
                    return None, Witness("anonymous", prof, other=other, permutation=pi)
        elif axiom == "neutral":
            for pi in itertools.permutations(range(m)):
                other = permute_profile_alternatives(pi, prof)
                if f(other) != pi[out]:
                    return None, Witness("neutral", prof, other=other, permutation=pi)
        else:
            raise DomainError(f"unknown axiom {axiom!r}")
    return None, None


def _first_with_top(m: int, top: int) -> Preference:
    return Preference((top,) + tuple(x for x in range(m) if x != top))


# ---------------------------------------------------------------------------
# public checkers


def check(
    spec: RuleSpec,
    axiom: str,
    mode: Mode | None = None,
    *,
    route: str = "auto",
    workers: int | None = None,
    table: OutcomeTable | None = None,
    budget: int = EXHAUSTIVE_BUDGET,
) -> Verdict:
    """Check one axiom.  ``route`` is ``auto``, ``table`` or ``direct``."""
    mode = mode or Exhaustive()
    if axiom not in AXIOMS:
        raise DomainError(f"unknown axiom {axiom!r}; known: {', '.join(AXIOMS)}")
    if route not in ("auto", "table", "direct"):
        raise DomainError(f"unknown route {route!r}")
    _check_scope(spec, mode, budget)
    if axiom in DEVIATION_AXIOMS:
        if route == "direct":
            return _deviation_direct(spec, axiom, mode)
        if table is not None or _table_fits(spec):
            return _deviation_table(spec, axiom, mode, workers, table)
        if route == "auto" and axiom in ("strategy_proof", "regret_free") and ScoreSumModel.applicable(spec):
            return _deviation_score_sum(spec, axiom, mode)
        if route == "auto":
            return _deviation_direct(spec, axiom, mode)
        raise SpaceTooLarge("outcome table does not fit the memory budget")
    if route == "direct":
        dictator, w = _simple_direct(spec, axiom, mode)
        return _verdict(axiom, mode, w, "direct", dictator=dictator)
    f = _Outcomes(spec, table, workers)
    dictator = None
    if axiom == "tops_only":
        w = _tops_only_vec(spec, mode, f)
    elif axiom == "condorcet_consistent":
        w = _condorcet_vec(spec, mode, f)
    elif axiom == "efficient":
        w = _efficient_vec(spec, mode, f)
    elif axiom == "unanimous":
        w = _unanimous_vec(spec, mode, f)
    elif axiom == "anonymous":
        w = _anonymous_vec(spec, mode, f)
    elif axiom == "neutral":
        w = _neutral_vec(spec, mode, f)
    else:
        dictator, w = _dictatorial_vec(spec, mode, f)
    return _verdict(axiom, mode, w, "table", dictator=dictator)


def check_strategy_proof(spec, mode=None, **kw) -> Verdict:
    return check(spec, "strategy_proof", mode, **kw)


def check_regret_free(spec, mode=None, **kw) -> Verdict:
    return check(spec, "regret_free", mode, **kw)


def check_tops_only(spec, mode=None, **kw) -> Verdict:
    return check(spec, "tops_only", mode, **kw)


def check_monotone(spec, mode=None, **kw) -> Verdict:
    return check(spec, "monotone", mode, **kw)


def check_maskin_monotone(spec, mode=None, **kw) -> Verdict:
    return check(spec, "maskin_monotone", mode, **kw)


def check_condorcet_consistent(spec, mode=None, **kw) -> Verdict:
    return check(spec, "condorcet_consistent", mode, **kw)


def check_simple_axiom(spec, axiom, mode=None, **kw) -> Verdict:
    if axiom not in SIMPLE_AXIOMS:
        raise DomainError(f"{axiom!r} is not one of {', '.join(SIMPLE_AXIOMS)}")
    return check(spec, axiom, mode, **kw)


# ---------------------------------------------------------------------------
# recheck


def all_counterfactuals_safe(spec: RuleSpec, agent: int, p: Preference, q: Preference, o: int) -> bool:
    """Inner quantifier of the regret-free test, evaluated from scratch."""
    if preference_count(spec.m) ** (spec.n - 1) <= INNER_BUDGET:
        f = lru_cache(maxsize=None)(lambda prof: evaluate(spec, prof))
        return _inner_forall(spec, agent, p, q, o, f, enumerate_preferences(spec.m))
    if ScoreSumModel.applicable(spec):
        model = ScoreSumModel(spec)
        return model.all_counterfactuals_safe(preference_index(p), preference_index(q), o)
    raise SpaceTooLarge("inner subprofile space too large to recheck for this rule")


def _shape_ok(spec: RuleSpec, prof: Profile | None) -> bool:
    return prof is not None and (prof.n, prof.m) == (spec.n, spec.m)


def recheck(spec: RuleSpec, w: Witness) -> bool:
    """Re-evaluate the witness's defining quantifiers; true iff it shows a violation."""
    f = lambda prof: evaluate(spec, prof)
    if not _shape_ok(spec, w.profile):
        return False
    P = w.profile
    a = w.axiom
    if a in DEVIATION_AXIOMS:
        if w.agent is None or w.misreport is None or not 1 <= w.agent <= spec.n or w.misreport.m != spec.m:
            return False
        i, q = w.agent, w.misreport
        p = P[i]
        if q == p:
            return False
        o = f(P)
        out = f(P.replace(i, q))
        if a == "strategy_proof":
            return prefers(p, out, o)
        if a == "regret_free":
            return prefers(p, out, o) and all_counterfactuals_safe(spec, i, p, q, o)
        if a == "monotone":
            ok = is_monotonic_transformation(p, q, o) and prefers(p, o, out)
            return ok and (w.alternative is None or w.alternative == out)
        return is_maskin_transformation(p, q, o) and out != o
    if a == "tops_only":
        return _shape_ok(spec, w.other) and P.tops() == w.other.tops() and f(P) != f(w.other)
    if a == "condorcet_consistent":
        cw = condorcet_winner(P)
        return cw is not None and f(P) != cw and w.alternative in (None, cw)
    if a == "efficient":
        y = w.alternative
        return y is not None and 0 <= y < spec.m and all(prefers(p, y, f(P)) for p in P.prefs)
    if a == "unanimous":
        tops = set(P.tops())
        return len(tops) == 1 and f(P) not in tops
    if a == "anonymous":
        pi = w.permutation
        if pi is None or sorted(pi) != list(range(spec.n)):
            return False
        other = permute_agents(pi, P)
        return (w.other is None or w.other == other) and f(P) != f(other)
    if a == "neutral":
        pi = w.permutation
        if pi is None or sorted(pi) != list(range(spec.m)):
            return False
        other = permute_profile_alternatives(pi, P)
        return (w.other is None or w.other == other) and f(other) != pi[f(P)]
    if a == "dictatorial":
        profs = w.profiles
        if len(profs) != spec.n or not all(_shape_ok(spec, x) for x in profs):
            return False
        return all(f(x) != x.prefs[i].top for i, x in enumerate(profs))
    raise DomainError(f"unknown axiom {a!r}")


def check_all(spec: RuleSpec, axioms: Iterable[str], mode: Mode | None = None, **kw) -> dict[str, Verdict]:
    return {a: check(spec, a, mode, **kw) for a in axioms}
