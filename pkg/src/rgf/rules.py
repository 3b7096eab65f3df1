"""Voting rules: one declarative :class:`RuleSpec` and one evaluator.

Every family resolves to a single alternative.  Irresolute stages (maxmin
winners, scoring winners, Condorcet-variant winners) are exposed as plain
functions returning sets so they can be audited and tested on their own.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .prefcore import (
    AlternativeSet,
    DomainError,
    Profile,
    SpaceTooLarge,
    pairwise_tally,
    rank_of,
)

YOUNG_MAX_AGENTS = 20
DODGSON_BUDGET = 2_000_000


class ContractError(RuntimeError):
    """A rule was asked to do something its configuration forbids."""


class RuleSpecError(ValueError):
    """A RuleSpec violates one of its construction invariants."""


# ---------------------------------------------------------------------------
# tie-breaking


@dataclass(frozen=True)
class TieBreak:
    kind: str  # "order" | "agent" | "relation"
    order: tuple[int, ...] = ()
    agent: int = 0
    relation: frozenset[tuple[int, int]] = frozenset()

    @classmethod
    def fixed(cls, order: Sequence[int]) -> "TieBreak":
        order = tuple(int(x) for x in order)
        if sorted(order) != list(range(len(order))):
            raise RuleSpecError(f"tie-break order {order} is not a permutation")
        return cls("order", order=order)

    @classmethod
    def by_agent(cls, agent: int) -> "TieBreak":
        if agent < 1:
            raise RuleSpecError(f"tie-break agent {agent} must be >= 1")
        return cls("agent", agent=int(agent))

    @classmethod
    def star(cls, beats: Iterable[tuple[int, int]], m: int) -> "TieBreak":
        """Complete antisymmetric relation given by its ``(winner, loser)`` pairs."""
        rel = frozenset((int(a), int(b)) for a, b in beats)
        for a, b in itertools.combinations(range(m), 2):
            if ((a, b) in rel) == ((b, a) in rel):
                raise RuleSpecError(f"relation must decide exactly one of {a}>{b}, {b}>{a}")
        if any(a == b or not (0 <= a < m and 0 <= b < m) for a, b in rel):
            raise RuleSpecError("relation pairs must be distinct alternatives in range")
        return cls("relation", relation=rel)

    def validate(self, n: int, m: int) -> None:
        if self.kind == "order":
            if len(self.order) != m:
                raise RuleSpecError(f"tie-break order has {len(self.order)} alternatives, m={m}")
        elif self.kind == "agent":
            if not 1 <= self.agent <= n:
                raise RuleSpecError(f"tie-break agent {self.agent} not in 1..{n}")
        elif self.kind == "relation":
            if any(not (0 <= a < m and 0 <= b < m) for a, b in self.relation):
                raise RuleSpecError("relation mentions alternatives outside 0..m-1")
            if len(self.relation) != m * (m - 1) // 2:
                raise RuleSpecError("relation is not complete")
        else:
            raise RuleSpecError(f"unknown tie-break kind {self.kind!r}")

    @property
    def anonymous(self) -> bool:
        return self.kind in ("order", "relation")

    def describe(self) -> str:
        if self.kind == "order":
            return "order:" + ",".join(map(str, self.order))
        if self.kind == "agent":
            return f"agent:{self.agent}"
        return "relation:" + ",".join(f"{a}>{b}" for a, b in sorted(self.relation))


def break_tie(candidates: Iterable[int], tb: TieBreak, profile: Profile | None = None) -> int:
    cands = sorted(set(candidates))
    if not cands:
        raise ContractError("cannot break a tie among zero candidates")
    if len(cands) == 1:
        return cands[0]
    if tb.kind == "order":
        pos = {x: k for k, x in enumerate(tb.order)}
        return min(cands, key=pos.__getitem__)
    if tb.kind == "agent":
        if profile is None:
            raise ContractError("agent tie-break needs the profile")
        ranking = profile[tb.agent].ranking
        return min(cands, key=ranking.index)
    if len(cands) > 2:
        raise ContractError(
            f"star relation applied to {len(cands)} candidates; it is only defined for pairs"
        )
    a, b = cands
    return a if (a, b) in tb.relation else b


# ---------------------------------------------------------------------------
# score vectors and committees


@dataclass(frozen=True)
class ScoreVector:
    """Scores ``s_1 <= ... <= s_m`` for positions counted from the bottom."""

    s: tuple[Fraction, ...]

    def __post_init__(self):
        s = tuple(Fraction(v) for v in self.s)
        object.__setattr__(self, "s", s)
        if len(s) < 2:
            raise RuleSpecError("score vector needs at least two positions")
        if any(a > b for a, b in zip(s, s[1:])):
            raise RuleSpecError(f"scores must be weakly increasing from the bottom: {self.describe()}")
        if not s[0] < s[-1]:
            raise RuleSpecError("scores must satisfy s_1 < s_m")

    @property
    def m(self) -> int:
        return len(self.s)

    def __getitem__(self, k: int) -> Fraction:
        """1-based position access."""
        return self.s[k - 1]

    @classmethod
    def borda(cls, m: int) -> "ScoreVector":
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def dowdall(cls, m: int) -> "ScoreVector":
        return cls(tuple(Fraction(1, m - k + 1) for k in range(1, m + 1)))

    @classmethod
    def approval(cls, m: int, k: int) -> "ScoreVector":
        """Top ``k`` positions score 1, the rest 0."""
        if not 1 <= k <= m - 1:
            raise RuleSpecError(f"k-approval needs 1 <= k <= m-1, got k={k}, m={m}")
        return cls(tuple(0 if pos <= m - k else 1 for pos in range(1, m + 1)))

    @classmethod
    def plurality(cls, m: int) -> "ScoreVector":
        return cls.approval(m, 1)

    @classmethod
    def negative_plurality(cls, m: int) -> "ScoreVector":
        return cls.approval(m, m - 1)

    def integer_scores(self) -> tuple[int, ...]:
        """The same vector scaled by the common denominator; argmax-equivalent."""
        lcm = 1
        for v in self.s:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        return tuple(int(v * lcm) for v in self.s)

    def describe(self) -> str:
        return ",".join(str(v) for v in self.s)


def k_star(sv: ScoreVector) -> int:
    """Highest position whose score is below the maximal score."""
    top = sv.s[-1]
    for k in range(sv.m - 1, 0, -1):
        if sv[k] < top:
            return k
    raise ContractError("score vector with s_1 = s_m has no k*")  # unreachable for valid vectors


@dataclass(frozen=True)
class Committee:
    """Upward-closed family of winning coalitions over agents ``1..n``."""

    n: int
    winning: frozenset[frozenset[int]]

    def __post_init__(self):
        agents = set(range(1, self.n + 1))
        win = frozenset(frozenset(s) for s in self.winning)
        object.__setattr__(self, "winning", win)
        for s in win:
            if not s <= agents:
                raise RuleSpecError(f"coalition {sorted(s)} mentions agents outside 1..{self.n}")
            for extra in agents - s:
                if s | {extra} not in win:
                    raise RuleSpecError(
                        f"committee not upward closed: {sorted(s)} wins but {sorted(s | {extra})} does not"
                    )

    @classmethod
    def from_minimal(cls, n: int, minimal: Iterable[Iterable[int]]) -> "Committee":
        minimal = [frozenset(c) for c in minimal]
        agents = range(1, n + 1)
        win = set()
        for r in range(n + 1):
            for combo in itertools.combinations(agents, r):
                s = frozenset(combo)
                if any(c <= s for c in minimal):
                    win.add(s)
        return cls(n, frozenset(win))

    @classmethod
    def majority(cls, n: int) -> "Committee":
        q = n // 2 + 1
        return cls.from_minimal(n, itertools.combinations(range(1, n + 1), q))

    @classmethod
    def veto(cls, n: int) -> "Committee":
        return cls.from_minimal(n, [range(1, n + 1)])

    def minimal(self) -> list[tuple[int, ...]]:
        return sorted(
            (tuple(sorted(s)) for s in self.winning if not any(t < s for t in self.winning)),
            key=lambda c: (len(c), c),
        )

    def __contains__(self, coalition) -> bool:
        return frozenset(coalition) in self.winning


# ---------------------------------------------------------------------------
# rule descriptions


class Family(str, Enum):
    EXTENDED_MAJORITY = "extended_majority"
    MAXMIN = "maxmin"
    SCORING = "scoring"
    CONDORCET = "condorcet"
    SUCCESSIVE_ELIMINATION = "successive_elimination"
    DICTATORSHIP = "dictatorship"
    CONSTANT = "constant"
    REMARK4X3 = "remark4x3"
    MAXTOP = "maxtop"
    BOTTOM = "bottom"
    TOPS_TABLE = "tops_table"


CONDORCET_VARIANTS = ("simpson", "copeland", "young", "dodgson", "fishburn", "black")


@dataclass(frozen=True)
class RuleSpec:
    family: Family
    n: int
    m: int
    tiebreak: TieBreak | None = None
    scores: ScoreVector | None = None
    variant: str | None = None
    order: tuple[int, ...] = ()
    agent: int = 0
    alternative: int = 0
    committee: Committee | None = None
    table: tuple[int, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "order", tuple(int(x) for x in self.order))
        object.__setattr__(self, "table", tuple(int(x) for x in self.table))
        if self.n < 1 or self.m < 2:
            raise RuleSpecError(f"need n >= 1 and m >= 2, got n={self.n}, m={self.m}")
        fam = self.family
        if fam in (Family.MAXMIN, Family.SCORING, Family.CONDORCET):
            if self.tiebreak is None:
                raise RuleSpecError(f"{fam.value} needs a tie-break")
            self.tiebreak.validate(self.n, self.m)
            if self.tiebreak.kind == "relation":
                if fam is Family.CONDORCET or self.n != 2:
                    raise RuleSpecError(
                        "a star-relation tie-break is only legal for maxmin/scoring with n=2"
                    )
        if fam is Family.SCORING:
            if self.scores is None or self.scores.m != self.m:
                raise RuleSpecError("scoring rule needs a score vector of length m")
        if fam is Family.CONDORCET and self.variant not in CONDORCET_VARIANTS:
            raise RuleSpecError(f"unknown Condorcet variant {self.variant!r}")
        if fam in (Family.SUCCESSIVE_ELIMINATION, Family.MAXTOP, Family.REMARK4X3):
            if sorted(self.order) != list(range(self.m)):
                raise RuleSpecError(f"{fam.value} needs an order over all {self.m} alternatives")
        if fam is Family.REMARK4X3 and (self.n, self.m) != (4, 3):
            raise RuleSpecError("the bottom-count rule is only defined for n=4, m=3")
        if fam in (Family.DICTATORSHIP, Family.BOTTOM) and not 1 <= self.agent <= self.n:
            raise RuleSpecError(f"agent {self.agent} not in 1..{self.n}")
        if fam is Family.CONSTANT and not 0 <= self.alternative < self.m:
            raise RuleSpecError(f"constant alternative {self.alternative} out of range")
        if fam is Family.EXTENDED_MAJORITY:
            if self.m != 2:
                raise RuleSpecError("extended majority voting is defined for m=2")
            if self.committee is None or self.committee.n != self.n:
                raise RuleSpecError("extended majority needs a committee over all n agents")
            if sorted(self.order) != [0, 1]:
                raise RuleSpecError("extended majority needs order=(x, y)")
        if fam is Family.TOPS_TABLE:
            if len(self.table) != self.m**self.n or any(not 0 <= v < self.m for v in self.table):
                raise RuleSpecError("tops table must map all m^n top vectors into 0..m-1")

    # convenience constructors ------------------------------------------------

    @classmethod
    def maxmin(cls, n: int, m: int, tiebreak: TieBreak, name: str = "") -> "RuleSpec":
        return cls(Family.MAXMIN, n, m, tiebreak=tiebreak, name=name)

    @classmethod
    def scoring(cls, n: int, m: int, scores: ScoreVector, tiebreak: TieBreak, name: str = "") -> "RuleSpec":
        return cls(Family.SCORING, n, m, tiebreak=tiebreak, scores=scores, name=name)

    @classmethod
    def condorcet(cls, n: int, m: int, variant: str, tiebreak: TieBreak, name: str = "") -> "RuleSpec":
        return cls(Family.CONDORCET, n, m, tiebreak=tiebreak, variant=variant, name=name)

    @classmethod
    def successive_elimination(cls, n: int, m: int, order: Sequence[int], name: str = "") -> "RuleSpec":
        return cls(Family.SUCCESSIVE_ELIMINATION, n, m, order=tuple(order), name=name)

    @classmethod
    def dictatorship(cls, n: int, m: int, agent: int, name: str = "") -> "RuleSpec":
        return cls(Family.DICTATORSHIP, n, m, agent=agent, name=name)

    @classmethod
    def constant(cls, n: int, m: int, alternative: int, name: str = "") -> "RuleSpec":
        return cls(Family.CONSTANT, n, m, alternative=alternative, name=name)

    @classmethod
    def remark4x3(cls, order: Sequence[int] = (0, 1, 2), name: str = "") -> "RuleSpec":
        return cls(Family.REMARK4X3, 4, 3, order=tuple(order), name=name)

    @classmethod
    def maxtop(cls, n: int, m: int, order: Sequence[int], name: str = "") -> "RuleSpec":
        return cls(Family.MAXTOP, n, m, order=tuple(order), name=name)

    @classmethod
    def bottom(cls, n: int, m: int, agent: int, name: str = "") -> "RuleSpec":
        return cls(Family.BOTTOM, n, m, agent=agent, name=name)

    @classmethod
    def extended_majority(cls, committee: Committee, x: int = 0, y: int = 1, name: str = "") -> "RuleSpec":
        return cls(Family.EXTENDED_MAJORITY, committee.n, 2, committee=committee, order=(x, y), name=name)

    @classmethod
    def tops_table(cls, n: int, m: int, table: Sequence[int], name: str = "") -> "RuleSpec":
        return cls(Family.TOPS_TABLE, n, m, table=tuple(table), name=name)

    # identity ----------------------------------------------------------------

    def describe(self) -> str:
        """Canonical one-line description; stable across runs (used for hashing)."""
        parts = [f"family={self.family.value}", f"n={self.n}", f"m={self.m}"]
        if self.tiebreak is not None:
            parts.append(f"tiebreak={self.tiebreak.describe()}")
        if self.scores is not None:
            parts.append(f"scores={self.scores.describe()}")
        if self.variant:
            parts.append(f"variant={self.variant}")
        if self.order:
            parts.append("order=" + ",".join(map(str, self.order)))
        if self.family in (Family.DICTATORSHIP, Family.BOTTOM):
            parts.append(f"agent={self.agent}")
        if self.family is Family.CONSTANT:
            parts.append(f"alternative={self.alternative}")
        if self.committee is not None:
            parts.append("committee=" + "|".join(",".join(map(str, c)) for c in self.committee.minimal()))
        if self.table:
            parts.append("table=" + "".join(map(str, self.table)))
        return ";".join(parts)

    def digest(self) -> bytes:
        return hashlib.sha256(self.describe().encode()).digest()

    @property
    def label(self) -> str:
        return self.name or self.describe()


# ---------------------------------------------------------------------------
# maxmin and scoring


def minimal_position(profile: Profile, x: int) -> int:
    return min(rank_of(p, x) for p in profile.prefs)


def maxmin_winners(profile: Profile) -> set[int]:
    mp = [minimal_position(profile, x) for x in range(profile.m)]
    best = max(mp)
    return {x for x, v in enumerate(mp) if v == best}


def score(profile: Profile, x: int, sv: ScoreVector) -> Fraction:
    if sv.m != profile.m:
        raise DomainError(f"score vector has length {sv.m}, profile has m={profile.m}")
    return sum((sv[rank_of(p, x)] for p in profile.prefs), Fraction(0))


def scoring_winners(profile: Profile, sv: ScoreVector) -> set[int]:
    scores = [score(profile, x, sv) for x in range(profile.m)]
    best = max(scores)
    return {x for x, v in enumerate(scores) if v == best}


# ---------------------------------------------------------------------------
# pairwise-majority machinery


def condorcet_winner(profile: Profile) -> int | None:
    c = pairwise_tally(profile)
    for a in range(profile.m):
        if all(c[a, b] > c[b, a] for b in range(profile.m) if b != a):
            return a
    return None


def weak_condorcet_winners(profile: Profile) -> set[int]:
    c = pairwise_tally(profile)
    return {a for a in range(profile.m) if all(c[a, b] >= c[b, a] for b in range(profile.m) if b != a)}


def simpson_score(profile: Profile, a: int) -> int:
    c = pairwise_tally(profile)
    return int(min(c[a, b] for b in range(profile.m) if b != a))


def copeland_score(profile: Profile, a: int) -> int:
    c = pairwise_tally(profile)
    others = [b for b in range(profile.m) if b != a]
    return sum(1 for b in others if c[a, b] > c[b, a]) - sum(1 for b in others if c[b, a] > c[a, b])


def young_score(profile: Profile, a: int) -> int:
    """Largest coalition within which ``a`` is a weak Condorcet winner.

    The support condition is ``2 * |{i in N' : a P_i b}| >= |N'|`` for every
    other alternative ``b``; the empty coalition always qualifies.
    """
    n = profile.n
    if n > YOUNG_MAX_AGENTS:
        raise SpaceTooLarge(f"Young score enumerates 2^n coalitions; n={n} > {YOUNG_MAX_AGENTS}")
    m = profile.m
    # above[i][b]: agent i ranks a above b
    above = [[rank_of(p, a) > rank_of(p, b) for b in range(m)] for p in profile.prefs]
    best = 0
    for mask in range(1 << n):
        size = bin(mask).count("1")
        if size <= best:
            continue
        members = [i for i in range(n) if mask >> i & 1]
        if all(2 * sum(above[i][b] for i in members) >= size for b in range(m) if b != a):
            best = size
    return best


def dodgson_score(profile: Profile, a: int, budget: int = DODGSON_BUDGET) -> int:
    """Fewest adjacent swaps after which ``a`` ties or beats every rival.

    Only swaps that lift ``a`` change its pairwise counts, so the search runs
    over how far ``a`` is lifted in each ballot.
    """
    n, m = profile.n, profile.m
    c = pairwise_tally(profile)
    need = {b: max(0, -(-n // 2) - int(c[a, b])) for b in range(m) if b != a}
    if not any(need.values()):
        return 0
    # for each voter: the alternatives directly above a, nearest first
    above = []
    for p in profile.prefs:
        idx = p.ranking.index(a)
        above.append(list(reversed(p.ranking[:idx])))
    size = math.prod(len(u) + 1 for u in above)
    if size > budget:
        raise SpaceTooLarge(f"Dodgson search space {size} exceeds budget {budget}")
    best = None
    for lifts in itertools.product(*(range(len(u) + 1) for u in above)):
        cost = sum(lifts)
        if best is not None and cost >= best:
            continue
        gained = dict.fromkeys(need, 0)
        for u, l in zip(above, lifts):
            for b in u[:l]:
                if b in gained:
                    gained[b] += 1
        if all(gained[b] >= need[b] for b in need):
            best = cost
    assert best is not None  # lifting a to every top always suffices
    return best


def fishburn_relation(profile: Profile) -> np.ndarray:
    """``F[a, b]`` true iff ``a F_P b`` as displayed in the two-clause definition."""
    c = pairwise_tally(profile)
    m = profile.m
    beats = c > c.T  # beats[x, y]: x beats y
    F = np.zeros((m, m), dtype=bool)
    for a in range(m):
        for b in range(m):
            clause1 = all(beats[x, b] for x in range(m) if beats[x, a])
            clause2 = any(beats[w, b] and c[a, w] >= c[w, a] for w in range(m))
            F[a, b] = clause1 and clause2
    return F


def fishburn_maximals(profile: Profile) -> set[int]:
    F = fishburn_relation(profile)
    return {b for b in range(profile.m) if not any(F[a, b] for a in range(profile.m) if a != b)}


def borda_winners(profile: Profile) -> set[int]:
    return scoring_winners(profile, ScoreVector.borda(profile.m))


def black_winners(profile: Profile) -> set[int]:
    cw = condorcet_winner(profile)
    return {cw} if cw is not None else borda_winners(profile)


def _argbest(values: Sequence, maximize: bool = True) -> set[int]:
    best = max(values) if maximize else min(values)
    return {x for x, v in enumerate(values) if v == best}


def condorcet_variant_winners(profile: Profile, variant: str) -> set[int]:
    m = profile.m
    if variant == "simpson":
        return _argbest([simpson_score(profile, a) for a in range(m)])
    if variant == "copeland":
        return _argbest([copeland_score(profile, a) for a in range(m)])
    if variant == "young":
        return _argbest([young_score(profile, a) for a in range(m)])
    if variant == "dodgson":
        return _argbest([dodgson_score(profile, a) for a in range(m)], maximize=False)
    if variant == "fishburn":
        return fishburn_maximals(profile)
    if variant == "black":
        return black_winners(profile)
    raise RuleSpecError(f"unknown Condorcet variant {variant!r}")


def successive_elimination_winner(order: Sequence[int], profile: Profile) -> int:
    return successive_elimination_rounds(order, profile)[-1][2]


def successive_elimination_rounds(order: Sequence[int], profile: Profile) -> list[tuple[int, int, int]]:
    """``(survivor, challenger, winner)`` per round; the agenda order breaks ties."""
    c = pairwise_tally(profile)
    pos = {x: k for k, x in enumerate(order)}
    survivor = order[0]
    rounds = []
    for challenger in order[1:]:
        if c[survivor, challenger] > c[challenger, survivor]:
            win = survivor
        elif c[challenger, survivor] > c[survivor, challenger]:
            win = challenger
        else:
            win = min(survivor, challenger, key=pos.__getitem__)
        rounds.append((survivor, challenger, win))
        survivor = win
    return rounds


def extended_majority_winner(committee: Committee, x: int, y: int, profile: Profile) -> int:
    supporters = {i for i, p in enumerate(profile.prefs, start=1) if p.top == x}
    return x if supporters in committee else y


def bottom_count(profile: Profile, x: int) -> int:
    return sum(1 for p in profile.prefs if p.bottom == x)


def bottom_count_winner(order: Sequence[int], profile: Profile) -> int:
    cw = condorcet_winner(profile)
    if cw is not None:
        return cw
    counts = [bottom_count(profile, x) for x in range(profile.m)]
    least = min(counts)
    minimizers = [x for x in range(profile.m) if counts[x] == least]
    c = pairwise_tally(profile)
    kept = [x for x in minimizers if all(c[x, y] >= 2 for y in minimizers if y != x)]
    pool = kept or minimizers
    return break_tie(pool, TieBreak.fixed(order))


def tops_code(profile: Profile) -> int:
    code = 0
    for p in profile.prefs:
        code = code * profile.m + p.top
    return code


# ---------------------------------------------------------------------------
# evaluation


def winner_set(spec: RuleSpec, profile: Profile) -> set[int] | None:
    """The irresolute first stage of a two-stage rule (``None`` for other families)."""
    if spec.family is Family.MAXMIN:
        return maxmin_winners(profile)
    if spec.family is Family.SCORING:
        return scoring_winners(profile, spec.scores)
    if spec.family is Family.CONDORCET:
        return condorcet_variant_winners(profile, spec.variant)
    return None


def evaluate(spec: RuleSpec, profile: Profile) -> int:
    if (profile.n, profile.m) != (spec.n, spec.m):
        raise DomainError(
            f"rule is defined for n={spec.n}, m={spec.m}; profile has n={profile.n}, m={profile.m}"
        )
    fam = spec.family
    if fam in (Family.MAXMIN, Family.SCORING):
        return break_tie(winner_set(spec, profile), spec.tiebreak, profile)
    if fam is Family.CONDORCET:
        cw = condorcet_winner(profile)
        if cw is not None:
            return cw
        return break_tie(winner_set(spec, profile), spec.tiebreak, profile)
    if fam is Family.SUCCESSIVE_ELIMINATION:
        return successive_elimination_winner(spec.order, profile)
    if fam is Family.DICTATORSHIP:
        return profile[spec.agent].top
    if fam is Family.CONSTANT:
        return spec.alternative
    if fam is Family.REMARK4X3:
        return bottom_count_winner(spec.order, profile)
    if fam is Family.MAXTOP:
        return break_tie(profile.tops(), TieBreak.fixed(spec.order))
    if fam is Family.BOTTOM:
        return profile[spec.agent].bottom
    if fam is Family.EXTENDED_MAJORITY:
        x, y = spec.order
        return extended_majority_winner(spec.committee, x, y, profile)
    if fam is Family.TOPS_TABLE:
        return spec.table[tops_code(profile)]
    raise RuleSpecError(f"unhandled family {fam}")  # pragma: no cover


def explain(spec: RuleSpec, profile: Profile, labels: AlternativeSet | None = None) -> list[str]:
    """Human-readable intermediate quantities for auditing a tally."""
    labels = labels or AlternativeSet.default(profile.m)
    L = labels.label
    fmt_set = lambda s: "{" + ", ".join(L(x) for x in sorted(s)) + "}"
    lines = []
    fam = spec.family
    if fam is Family.MAXMIN:
        mp = ", ".join(f"{L(x)}={minimal_position(profile, x)}" for x in range(profile.m))
        lines.append(f"minimal positions: {mp}")
        lines.append(f"maxmin winners: {fmt_set(maxmin_winners(profile))}")
    elif fam is Family.SCORING:
        sc = ", ".join(f"{L(x)}={score(profile, x, spec.scores)}" for x in range(profile.m))
        lines.append(f"scores: {sc}")
        lines.append(f"scoring winners: {fmt_set(scoring_winners(profile, spec.scores))}")
    elif fam is Family.CONDORCET or fam is Family.REMARK4X3:
        cw = condorcet_winner(profile)
        lines.append("condorcet winner: " + (L(cw) if cw is not None else "none"))
        if fam is Family.CONDORCET:
            lines.append(f"{spec.variant} winners: {fmt_set(winner_set(spec, profile))}")
        else:
            bc = ", ".join(f"{L(x)}={bottom_count(profile, x)}" for x in range(profile.m))
            lines.append(f"bottom counts: {bc}")
    elif fam is Family.SUCCESSIVE_ELIMINATION:
        for k, (s, ch, w) in enumerate(successive_elimination_rounds(spec.order, profile), 1):
            lines.append(f"round {k}: {L(s)} vs {L(ch)} -> {L(w)}")
    if fam in (Family.MAXMIN, Family.SCORING, Family.CONDORCET) or fam is Family.SUCCESSIVE_ELIMINATION:
        c = pairwise_tally(profile)
        rows = [" ".join(str(int(c[a, b])) if a != b else "-" for b in range(profile.m)) for a in range(profile.m)]
        lines.append("pairwise tally rows: " + " | ".join(f"{L(a)}: {r}" for a, r in enumerate(rows)))
    lines.append(f"winner: {L(evaluate(spec, profile))}")
    return lines
