import itertools
from collections import deque
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rgf.prefcore import Preference, Profile, enumerate_profiles, pairwise_tally, rank_of
from rgf.rules import (
    CONDORCET_VARIANTS,
    Committee,
    ContractError,
    RuleSpec,
    RuleSpecError,
    ScoreVector,
    TieBreak,
    black_winners,
    bottom_count,
    break_tie,
    condorcet_variant_winners,
    condorcet_winner,
    copeland_score,
    dodgson_score,
    evaluate,
    explain,
    extended_majority_winner,
    fishburn_maximals,
    k_star,
    maxmin_winners,
    minimal_position,
    score,
    scoring_winners,
    simpson_score,
    successive_elimination_winner,
    weak_condorcet_winners,
    young_score,
)

P = Profile.parse
CYCLIC = P("a>b>c; b>c>a; c>a>b")
A7_SIMPSON = P("b>a>c; c>b>a; c>b>a; a>c>b")
A7_COPELAND = P("b>a>c; c>a>b; c>b>a; a>c>b")
SE_EXAMPLE = P("a>b>d>c; a>c>d>b; c>d>a>b; c>b>d>a; d>b>a>c")
a, b, c, d = range(4)


def unanimous(n, text="a>b>c"):
    return Profile.parse([text] * n)


# --- oracles written independently of the library ---------------------------


def oracle_positions(prof, x):
    # position from the bottom by scanning the ranking backwards
    return [next(k for k, y in enumerate(reversed(p.ranking), 1) if y == x) for p in prof.prefs]


def oracle_tally(prof, x, y):
    return sum(1 for p in prof.prefs if p.ranking.index(x) < p.ranking.index(y))


def oracle_weak_cw(prof, x):
    return all(2 * oracle_tally(prof, x, y) >= prof.n for y in range(prof.m) if y != x)


def oracle_dodgson(prof, x, limit=12):
    """Breadth-first search over all profiles reachable by adjacent swaps."""
    start = tuple(p.ranking for p in prof.prefs)
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, dist = frontier.popleft()
        if oracle_weak_cw(Profile(tuple(Preference(r) for r in state)), x):
            return dist
        if dist == limit:
            continue
        for i, r in enumerate(state):
            for k in range(len(r) - 1):
                s = list(r)
                s[k], s[k + 1] = s[k + 1], s[k]
                nxt = state[:i] + (tuple(s),) + state[i + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append((nxt, dist + 1))
    raise AssertionError("no Dodgson solution within limit")


def oracle_young(prof, x):
    for size in range(prof.n, -1, -1):
        for members in itertools.combinations(prof.prefs, size):
            sub = Profile(members) if members else None
            if sub is None or all(2 * oracle_tally(sub, x, y) >= size for y in range(prof.m) if y != x):
                return size
    return 0


# --- positions and scores ---------------------------------------------------


def test_minimal_positions():
    assert [minimal_position(CYCLIC, x) for x in range(3)] == [1, 1, 1]
    assert [minimal_position(unanimous(3), x) for x in range(3)] == [3, 2, 1]
    assert [minimal_position(P("a>b>c; b>a>c"), x) for x in range(3)] == [2, 2, 1]


def test_maxmin_winner_sets():
    assert maxmin_winners(P("a>b>c; b>a>c")) == {a, b}
    assert maxmin_winners(unanimous(2)) == {a}
    assert maxmin_winners(CYCLIC) == {a, b, c}


def test_scores():
    borda = ScoreVector.borda(3)
    assert all(score(CYCLIC, x, borda) == 6 for x in range(3))
    plur = ScoreVector.plurality(3)
    assert [score(unanimous(3), x, plur) for x in range(3)] == [3, 0, 0]
    assert score(P("a>b>c; b>c>a"), b, borda) == 5
    assert scoring_winners(CYCLIC, borda) == {a, b, c}
    assert scoring_winners(unanimous(3), plur) == {a}
    assert scoring_winners(P("a>b>c; b>a>c"), ScoreVector.negative_plurality(3)) == {a, b}


def test_k_star():
    assert k_star(ScoreVector((0, 1, 1, 1))) == 1
    assert k_star(ScoreVector((0, 0, 0, 1))) == 3
    assert k_star(ScoreVector((0, 0, 1, 1))) == 2


def test_score_vector_validation():
    with pytest.raises(RuleSpecError):
        ScoreVector((1, 0, 2))
    with pytest.raises(RuleSpecError):
        ScoreVector((1, 1, 1))
    assert ScoreVector.dowdall(3).s == (Fraction(1, 3), Fraction(1, 2), Fraction(1))
    assert ScoreVector.dowdall(3).integer_scores() == (2, 3, 6)


@given(st.integers(1, 5), st.integers(0, 4), st.data())
def test_affine_invariance_of_scoring_winners(alpha, beta, data):
    m = data.draw(st.integers(3, 5))
    raw = sorted(data.draw(st.lists(st.integers(0, 6), min_size=m, max_size=m)))
    if raw[0] == raw[-1]:
        raw[-1] += 1
    sv = ScoreVector(tuple(raw))
    moved = ScoreVector(tuple(alpha * v + beta for v in raw))
    n = data.draw(st.integers(1, 4))
    prof = Profile(tuple(Preference(tuple(data.draw(st.permutations(list(range(m)))))) for _ in range(n)))
    assert scoring_winners(prof, sv) == scoring_winners(prof, moved)


def test_score_matches_position_oracle():
    sv = ScoreVector.dowdall(4)
    for prof in itertools.islice(enumerate_profiles(2, 4), 0, 576, 7):
        for x in range(4):
            assert score(prof, x, sv) == sum(sv[k] for k in oracle_positions(prof, x))


# --- pairwise machinery -----------------------------------------------------


def test_pairwise_examples():
    t = pairwise_tally(CYCLIC)
    assert (t[a, b], t[b, a]) == (2, 1)
    t = pairwise_tally(A7_COPELAND)
    assert (t[c, b], t[a, c], t[c, a]) == (3, 2, 2)


def test_condorcet_winners():
    assert condorcet_winner(CYCLIC) is None
    assert condorcet_winner(unanimous(3)) == a
    x, y, z = range(3)
    assert condorcet_winner(P("a>b>c; b>c>a; b>c>a; c>b>a")) == y
    assert weak_condorcet_winners(P("a>b>c; b>a>c")) == {a, b}


def test_simpson_and_copeland_scores():
    assert [simpson_score(A7_SIMPSON, x) for x in range(3)] == [1, 1, 2]
    assert simpson_score(unanimous(4), a) == 4
    assert [simpson_score(CYCLIC, x) for x in range(3)] == [1, 1, 1]
    assert [copeland_score(A7_COPELAND, x) for x in range(3)] == [0, -1, 1]
    assert [copeland_score(CYCLIC, x) for x in range(3)] == [0, 0, 0]
    assert copeland_score(unanimous(3), a) == 2


def test_young_scores():
    assert young_score(unanimous(3), a) == 3
    assert young_score(CYCLIC, a) == 2


def test_dodgson_scores():
    assert dodgson_score(unanimous(3), a) == 0
    assert dodgson_score(CYCLIC, a) == 1
    assert dodgson_score(P("a>b>c; b>a>c"), a) == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_young_and_dodgson_match_oracles(n):
    profs = list(enumerate_profiles(n, 3))
    for prof in profs[:: 7 if n == 4 else 1]:
        for x in range(3):
            assert young_score(prof, x) == oracle_young(prof, x)
            assert dodgson_score(prof, x) == oracle_dodgson(prof, x)


def test_dodgson_matches_bfs_at_four_alternatives():
    for prof in itertools.islice(enumerate_profiles(3, 4), 0, 13824, 331):
        for x in range(4):
            assert dodgson_score(prof, x) == oracle_dodgson(prof, x)


def test_fishburn_and_black():
    assert fishburn_maximals(A7_SIMPSON) == {c}
    assert a in fishburn_maximals(unanimous(3))
    assert fishburn_maximals(CYCLIC) == {a, b, c}
    assert black_winners(A7_COPELAND) == {c}
    assert black_winners(unanimous(2)) == {a}
    assert black_winners(CYCLIC) == {a, b, c}


def test_variant_winner_sets_on_reference_profiles():
    for v in ("simpson", "young", "dodgson", "fishburn"):
        assert condorcet_variant_winners(A7_SIMPSON, v) == {c}, v
    for v in ("copeland", "black"):
        assert condorcet_variant_winners(A7_COPELAND, v) == {c}, v
    lifted = A7_SIMPSON.replace(1, Preference.parse("a>b>c"))
    for v in ("simpson", "young", "dodgson", "fishburn"):
        assert condorcet_variant_winners(lifted, v) == {a, c}, v
    lifted = A7_COPELAND.replace(1, Preference.parse("a>b>c"))
    for v in ("copeland", "black"):
        assert condorcet_variant_winners(lifted, v) == {a, c}, v


@pytest.mark.parametrize("n", [3, 4])
def test_condorcet_winner_leads_every_variant(n):
    for prof in enumerate_profiles(n, 3):
        cw = condorcet_winner(prof)
        if cw is None:
            continue
        for v in CONDORCET_VARIANTS:
            assert condorcet_variant_winners(prof, v) == {cw}, (v, prof)
            assert evaluate(RuleSpec.condorcet(n, 3, v, TieBreak.by_agent(2)), prof) == cw


# --- other families ---------------------------------------------------------


def test_successive_elimination_example():
    assert successive_elimination_winner((a, b, c, d), SE_EXAMPLE) == d
    dev = SE_EXAMPLE.replace(1, Preference.parse("b>a>d>c"))
    assert successive_elimination_winner((a, b, c, d), dev) == c
    assert successive_elimination_winner((c, a, b), unanimous(3)) == a


def test_extended_majority():
    x, y = 0, 1
    tops = lambda *t: Profile(tuple(Preference((v, 1 - v)) for v in t))
    maj = Committee.majority(3)
    assert extended_majority_winner(maj, x, y, tops(x, x, y)) == x
    assert extended_majority_winner(maj, x, y, tops(y, y, x)) == y
    assert extended_majority_winner(Committee.veto(3), x, y, tops(x, x, y)) == y


def test_committee_must_be_upward_closed():
    with pytest.raises(RuleSpecError):
        Committee(2, frozenset({frozenset({1})}))


def test_bottom_count():
    x, y, z = range(3)
    assert bottom_count(P("a>c>b; b>c>a; b>c>a; c>b>a"), x) == 3
    assert bottom_count(unanimous(3), c) == 3
    assert [bottom_count(CYCLIC, v) for v in range(3)] == [1, 1, 1]


def test_bottom_count_rule_examples():
    spec = RuleSpec.remark4x3()
    x, y, z = range(3)
    star = ["b>c>a", "b>c>a", "c>b>a"]
    assert evaluate(spec, P(["a>b>c"] + star)) == y
    assert evaluate(spec, P(["a>c>b"] + star)) == z


def test_break_tie():
    cyc = P("a>b>c; b>c>a")
    assert break_tie({a, b}, TieBreak.fixed((b, a, c))) == b
    assert break_tie({a, b}, TieBreak.by_agent(2), cyc) == b
    star = TieBreak.star([(a, b), (b, c), (c, a)], 3)
    assert break_tie({b, c}, star) == b
    with pytest.raises(ContractError):
        break_tie({a, b, c}, star)


def test_rule_spec_invariants():
    star = TieBreak.star([(a, b), (b, c), (c, a)], 3)
    with pytest.raises(RuleSpecError):
        RuleSpec.maxmin(3, 3, star)
    with pytest.raises(RuleSpecError):
        RuleSpec.condorcet(2, 3, "simpson", star)
    with pytest.raises(RuleSpecError):
        RuleSpec.remark4x3().__class__("remark4x3", 3, 3, order=(0, 1, 2))
    with pytest.raises(RuleSpecError):
        RuleSpec.maxmin(2, 3, TieBreak.by_agent(3))
    with pytest.raises(RuleSpecError):
        RuleSpec.condorcet(3, 3, "kemeny", TieBreak.fixed((0, 1, 2)))


def test_examples_from_evaluate():
    assert evaluate(RuleSpec.maxmin(2, 3, TieBreak.fixed((0, 1, 2))), P("a>b>c; b>a>c")) == a
    assert evaluate(RuleSpec.successive_elimination(5, 4, (0, 1, 2, 3)), SE_EXAMPLE) == d


# --- cross-checks over whole spaces -----------------------------------------


def test_plurality_equals_most_tops():
    spec = RuleSpec.scoring(3, 3, ScoreVector.plurality(3), TieBreak.fixed((2, 0, 1)))
    for prof in enumerate_profiles(3, 3):
        counts = [prof.tops().count(x) for x in range(3)]
        best = [x for x in (2, 0, 1) if counts[x] == max(counts)]
        assert evaluate(spec, prof) == best[0]


def test_maxmin_matches_scoring_134_at_two_agents():
    sv = ScoreVector((1, 3, 4))
    profs = list(enumerate_profiles(2, 3))
    assert len(profs) == 36
    for prof in profs:
        assert maxmin_winners(prof) == scoring_winners(prof, sv)


def _catalog_specs(n, m):
    fixed = TieBreak.fixed(range(m))
    specs = [
        RuleSpec.maxmin(n, m, fixed),
        RuleSpec.maxmin(n, m, TieBreak.by_agent(1)),
        RuleSpec.scoring(n, m, ScoreVector.borda(m), fixed),
        RuleSpec.scoring(n, m, ScoreVector.plurality(m), TieBreak.by_agent(n)),
        RuleSpec.scoring(n, m, ScoreVector.dowdall(m), fixed),
        RuleSpec.successive_elimination(n, m, tuple(reversed(range(m)))),
        RuleSpec.dictatorship(n, m, 1),
        RuleSpec.maxtop(n, m, tuple(range(m))),
    ]
    specs += [RuleSpec.condorcet(n, m, v, fixed) for v in CONDORCET_VARIANTS]
    return specs


@pytest.mark.parametrize("n", [1, 2, 3])
def test_unanimity_across_families(n):
    for spec in _catalog_specs(n, 3):
        for top in range(3):
            rest = [x for x in range(3) if x != top]
            for prof in enumerate_profiles(n, 3):
                if set(prof.tops()) == {top}:
                    assert evaluate(spec, prof) == top, spec.describe()
                    break
    const = RuleSpec.constant(2, 3, a)
    assert evaluate(const, unanimous(2, "b>a>c")) == a


@pytest.mark.parametrize("n", [2, 3])
def test_evaluate_stays_in_winner_set(n):
    from rgf.rules import winner_set

    for spec in _catalog_specs(n, 3):
        for prof in enumerate_profiles(n, 3):
            ws = winner_set(spec, prof)
            if ws is not None and condorcet_winner(prof) is None:
                assert evaluate(spec, prof) in ws


def test_explain_mentions_intermediate_sets():
    spec = RuleSpec.maxmin(2, 3, TieBreak.fixed((0, 1, 2)))
    lines = explain(spec, P("a>b>c; b>a>c"))
    assert "minimal positions: a=2, b=2, c=1" in lines
    assert lines[-1] == "winner: a"
    se_lines = explain(RuleSpec.successive_elimination(5, 4, (0, 1, 2, 3)), SE_EXAMPLE)
    assert se_lines[0] == "round 1: a vs b -> a"


def test_digest_is_stable_and_name_free():
    s1 = RuleSpec.maxmin(2, 3, TieBreak.fixed((0, 1, 2)), name="x")
    s2 = RuleSpec.maxmin(2, 3, TieBreak.fixed((0, 1, 2)), name="y")
    assert s1 == s2 and s1.digest() == s2.digest()
    assert s1.digest() != RuleSpec.maxmin(2, 3, TieBreak.fixed((1, 0, 2))).digest()


@pytest.mark.parametrize("agent", [1, 2])
def test_agent_tiebroken_maxmin_equals_negative_plurality(agent):
    # the winner sets differ on unanimous profiles ({top} against {top, second})
    # but the agent tie-break always resolves both to the same alternative
    tb = TieBreak.by_agent(agent)
    mm = RuleSpec.maxmin(2, 3, tb)
    neg = RuleSpec.scoring(2, 3, ScoreVector.negative_plurality(3), tb)
    split = 0
    for prof in enumerate_profiles(2, 3):
        assert evaluate(mm, prof) == evaluate(neg, prof)
        if maxmin_winners(prof) != scoring_winners(prof, ScoreVector.negative_plurality(3)):
            assert prof.prefs[0] == prof.prefs[1]
            split += 1
    assert split == 6
