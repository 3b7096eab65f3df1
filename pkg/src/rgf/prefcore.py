"""Alternatives, strict preferences, profiles and the enumeration of their spaces.

Positions follow the bottom-up convention used by every formula in the
library: position 1 is an agent's worst alternative and position ``m`` is
the top.  Rankings are stored best-to-worst; use :func:`rank_of` and
:func:`alternative_at` rather than indexing ``ranking`` directly.
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_ALTERNATIVES = 8
DEFAULT_PROFILE_BUDGET = 2**31


class DomainError(ValueError):
    """An alternative, position or permutation outside its valid range."""


class SpaceTooLarge(RuntimeError):
    """Exhaustive enumeration refused; use sampled mode instead."""


def default_labels(m: int) -> tuple[str, ...]:
    if m > len(string.ascii_lowercase):
        raise DomainError(f"no default labels for m={m}")
    return tuple(string.ascii_lowercase[:m])


@dataclass(frozen=True)
class AlternativeSet:
    """Labels for alternatives ``0..m-1``."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise DomainError(f"duplicate alternative labels: {self.labels}")
        if not self.labels:
            raise DomainError("empty alternative set")

    @classmethod
    def default(cls, m: int) -> "AlternativeSet":
        return cls(default_labels(m))

    @property
    def m(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"unknown alternative {label!r}; known: {', '.join(self.labels)}") from None

    def label(self, x: int) -> str:
        if not 0 <= x < self.m:
            raise DomainError(f"alternative index {x} out of range for m={self.m}")
        return self.labels[x]


@dataclass(frozen=True)
class Preference:
    """A strict ranking, best first."""

    ranking: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(int(x) for x in self.ranking))
        if sorted(self.ranking) != list(range(len(self.ranking))):
            raise DomainError(f"ranking {self.ranking} is not a permutation of 0..{len(self.ranking) - 1}")

    @classmethod
    def parse(cls, text: str, labels: AlternativeSet | None = None) -> "Preference":
        """Build from ``"a>b>c"`` (or ``"a,b,c"``), best first."""
        sep = ">" if ">" in text else ","
        tokens = [t.strip() for t in text.split(sep) if t.strip()]
        labels = labels or AlternativeSet.default(len(tokens))
        return cls(tuple(labels.index(t) for t in tokens))

    @property
    def m(self) -> int:
        return len(self.ranking)

    @property
    def top(self) -> int:
        return self.ranking[0]

    @property
    def bottom(self) -> int:
        return self.ranking[-1]

    def render(self, labels: AlternativeSet | None = None) -> str:
        labels = labels or AlternativeSet.default(self.m)
        return ">".join(labels.label(x) for x in self.ranking)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Profile:
    """An ordered list of preferences, agent 1 first."""

    prefs: tuple[Preference, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefs", tuple(self.prefs))
        if not self.prefs:
            raise DomainError("a profile needs at least one agent")
        m = self.prefs[0].m
        if any(p.m != m for p in self.prefs):
            raise DomainError("all preferences in a profile must rank the same alternatives")

    @classmethod
    def parse(cls, rows: Sequence[str] | str, labels: AlternativeSet | None = None) -> "Profile":
        if isinstance(rows, str):
            rows = [r for r in rows.replace(";", "\n").splitlines() if r.strip()]
        return cls(tuple(Preference.parse(r, labels) for r in rows))

    @property
    def n(self) -> int:
        return len(self.prefs)

    @property
    def m(self) -> int:
        return self.prefs[0].m

    def __getitem__(self, agent: int) -> Preference:
        """1-based agent access."""
        if not 1 <= agent <= self.n:
            raise DomainError(f"agent {agent} out of range 1..{self.n}")
        return self.prefs[agent - 1]

    def replace(self, agent: int, pref: Preference) -> "Profile":
        """The profile with agent ``agent`` (1-based) reporting ``pref``."""
        if not 1 <= agent <= self.n:
            raise DomainError(f"agent {agent} out of range 1..{self.n}")
        prefs = list(self.prefs)
        prefs[agent - 1] = pref
        return Profile(tuple(prefs))

    def tops(self) -> tuple[int, ...]:
        return tuple(p.top for p in self.prefs)

    def render(self, labels: AlternativeSet | None = None) -> list[str]:
        return [p.render(labels) for p in self.prefs]

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.prefs) + ")"


def _check_alt(pref: Preference, x: int) -> None:
    if not 0 <= x < pref.m:
        raise DomainError(f"alternative {x} out of range for m={pref.m}")


def rank_of(pref: Preference, x: int) -> int:
    """Position of ``x`` counted from the bottom (1 = worst, m = top)."""
    _check_alt(pref, x)
    return pref.m - pref.ranking.index(x)


def alternative_at(pref: Preference, k: int) -> int:
    """The alternative in position ``k`` from the bottom."""
    if not 1 <= k <= pref.m:
        raise DomainError(f"position {k} out of range 1..{pref.m}")
    return pref.ranking[pref.m - k]


def prefers(pref: Preference, x: int, y: int) -> bool:
    return rank_of(pref, x) > rank_of(pref, y)


def weakly_prefers(pref: Preference, x: int, y: int) -> bool:
    return x == y or prefers(pref, x, y)


def pairwise_tally(profile: Profile) -> np.ndarray:
    """``counts[a, b]`` = number of agents ranking ``a`` above ``b``; diagonal is zero."""
    m = profile.m
    counts = np.zeros((m, m), dtype=np.int64)
    for pref in profile.prefs:
        r = pref.ranking
        for hi in range(m):
            for lo in range(hi + 1, m):
                counts[r[hi], r[lo]] += 1
    return counts


def _check_perm(pi: Sequence[int], size: int, what: str) -> tuple[int, ...]:
    pi = tuple(int(v) for v in pi)
    if len(pi) != size or sorted(pi) != list(range(size)):
        raise DomainError(f"{what} permutation {pi} is not a bijection on 0..{size - 1}")
    return pi


def permute_alternatives(pi: Sequence[int], pref: Preference) -> Preference:
    """Relabel alternatives: ``x`` becomes ``pi[x]``; positions are kept."""
    pi = _check_perm(pi, pref.m, "alternative")
    return Preference(tuple(pi[x] for x in pref.ranking))


def permute_profile_alternatives(pi: Sequence[int], profile: Profile) -> Profile:
    return Profile(tuple(permute_alternatives(pi, p) for p in profile.prefs))


def permute_agents(pi: Sequence[int], profile: Profile) -> Profile:
    """``result`` has agent ``i`` reporting the preference of agent ``pi[i]`` (0-based)."""
    pi = _check_perm(pi, profile.n, "agent")
    return Profile(tuple(profile.prefs[pi[i]] for i in range(profile.n)))


def _check_m(m: int) -> None:
    if not 1 <= m <= MAX_ALTERNATIVES:
        raise DomainError(f"m={m} outside supported range 1..{MAX_ALTERNATIVES}")


def preference_count(m: int) -> int:
    _check_m(m)
    return math.factorial(m)


def enumerate_preferences(m: int) -> list[Preference]:
    """All m! rankings in lexicographic order of the best-to-worst sequence."""
    _check_m(m)
    return [Preference(r) for r in itertools.permutations(range(m))]


def profile_space_size(n: int, m: int) -> int:
    return preference_count(m) ** n


def enumerate_profiles(n: int, m: int, budget: int = DEFAULT_PROFILE_BUDGET) -> Iterator[Profile]:
    """All (m!)^n profiles, odometer order with the last agent varying fastest."""
    if n < 1:
        raise DomainError(f"n={n} must be positive")
    size = profile_space_size(n, m)
    if size > budget:
        raise SpaceTooLarge(
            f"profile space (m!)^n = {size} exceeds budget {budget}; use sampled mode"
        )
    prefs = enumerate_preferences(m)
    return (Profile(combo) for combo in itertools.product(prefs, repeat=n))


def permutation_tables(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense lookup tables for preference index arithmetic.

    Returns ``(perms, rank)`` where ``perms[p]`` is ranking ``p`` best-to-worst
    and ``rank[p, x]`` is the bottom-up position of ``x`` under ranking ``p``.
    """
    _check_m(m)
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int8).reshape(-1, m)
    rank = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    rank[rows, perms] = np.arange(m, 0, -1, dtype=np.int8)[None, :]
    return perms, rank


def preference_index(pref: Preference) -> int:
    """Index of ``pref`` in :func:`enumerate_preferences` order (Lehmer code)."""
    remaining = list(range(pref.m))
    idx = 0
    for pos, x in enumerate(pref.ranking):
        j = remaining.index(x)
        idx += j * math.factorial(pref.m - 1 - pos)
        remaining.pop(j)
    return idx


def preference_from_index(m: int, idx: int) -> Preference:
    count = preference_count(m)
    if not 0 <= idx < count:
        raise DomainError(f"preference index {idx} out of range for m={m}")
    remaining = list(range(m))
    ranking = []
    for pos in range(m):
        f = math.factorial(m - 1 - pos)
        j, idx = divmod(idx, f)
        ranking.append(remaining.pop(j))
    return Preference(tuple(ranking))
