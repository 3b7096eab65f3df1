import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rgf.prefcore import (
    AlternativeSet,
    DomainError,
    Preference,
    Profile,
    SpaceTooLarge,
    alternative_at,
    enumerate_preferences,
    enumerate_profiles,
    pairwise_tally,
    permutation_tables,
    permute_agents,
    permute_alternatives,
    permute_profile_alternatives,
    preference_from_index,
    preference_index,
    prefers,
    rank_of,
)


def prefs_of(m):
    return st.permutations(list(range(m))).map(lambda r: Preference(tuple(r)))


def profiles(n_max=4, m_max=5):
    return st.integers(2, m_max).flatmap(
        lambda m: st.lists(prefs_of(m), min_size=1, max_size=n_max).map(lambda ps: Profile(tuple(ps)))
    )


def test_positions_count_from_the_bottom():
    p = Preference.parse("a>b>c")
    assert rank_of(p, 0) == 3 and rank_of(p, 2) == 1
    assert alternative_at(p, 3) == 0 and alternative_at(p, 1) == 2
    assert p.top == 0 and p.bottom == 2


@given(prefs_of(5))
def test_rank_and_position_are_inverse(p):
    for x in range(p.m):
        assert alternative_at(p, rank_of(p, x)) == x


def test_out_of_range_is_domain_error():
    p = Preference.parse("a>b>c")
    with pytest.raises(DomainError):
        rank_of(p, 3)
    with pytest.raises(DomainError):
        alternative_at(p, 0)
    with pytest.raises(DomainError):
        Preference((0, 0, 1))
    with pytest.raises(DomainError):
        AlternativeSet.default(3).index("q")


def test_enumeration_sizes_and_order():
    assert len(enumerate_preferences(3)) == 6
    assert enumerate_preferences(3)[0].ranking == (0, 1, 2)
    assert enumerate_preferences(3)[-1].ranking == (2, 1, 0)
    profs = list(enumerate_profiles(2, 3))
    assert len(profs) == 36
    # last agent varies fastest
    assert profs[1].prefs[0] == profs[0].prefs[0] and profs[1].prefs[1] != profs[0].prefs[1]
    assert len(set(profs)) == 36


def test_enumeration_budget():
    with pytest.raises(SpaceTooLarge):
        enumerate_profiles(3, 6, budget=1000)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_preference_index_matches_enumeration(m):
    for k, p in enumerate(enumerate_preferences(m)):
        assert preference_index(p) == k
        assert preference_from_index(m, k) == p


def test_permutation_tables_agree_with_rank_of():
    perms, rank = permutation_tables(4)
    for k, p in enumerate(enumerate_preferences(4)):
        assert tuple(perms[k]) == p.ranking
        assert [rank[k, x] for x in range(4)] == [rank_of(p, x) for x in range(4)]


@given(profiles())
def test_pairwise_tally_is_complementary(prof):
    c = pairwise_tally(prof)
    m = prof.m
    for a, b in itertools.permutations(range(m), 2):
        assert c[a, b] + c[b, a] == prof.n
        assert c[a, b] == sum(prefers(p, a, b) for p in prof.prefs)
    assert np.all(np.diag(c) == 0)


@given(profiles(), st.data())
def test_permutations_preserve_structure(prof, data):
    pi = tuple(data.draw(st.permutations(list(range(prof.m)))))
    moved = permute_profile_alternatives(pi, prof)
    c, cm = pairwise_tally(prof), pairwise_tally(moved)
    for a, b in itertools.permutations(range(prof.m), 2):
        assert cm[pi[a], pi[b]] == c[a, b]
    sigma = tuple(data.draw(st.permutations(list(range(prof.n)))))
    shuffled = permute_agents(sigma, prof)
    assert sorted(shuffled.prefs, key=lambda p: p.ranking) == sorted(prof.prefs, key=lambda p: p.ranking)


def test_permute_alternatives_relabels():
    p = Preference.parse("a>b>c")
    assert permute_alternatives((1, 2, 0), p).ranking == (1, 2, 0)
    with pytest.raises(DomainError):
        permute_alternatives((0, 0, 1), p)


def test_profile_parse_and_replace():
    prof = Profile.parse("a>b>c; c>a>b")
    assert prof.n == 2 and prof[2].ranking == (2, 0, 1)
    swapped = prof.replace(1, Preference.parse("b>a>c"))
    assert swapped[1].top == 1 and prof[1].top == 0
    assert prof.render() == ["a>b>c", "c>a>b"]
    with pytest.raises(DomainError):
        prof[3]


def test_profile_space_size():
    from rgf.prefcore import profile_space_size

    assert profile_space_size(3, 4) == math.factorial(4) ** 3
