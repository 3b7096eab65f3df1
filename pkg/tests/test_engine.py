import os

import numpy as np
import pytest

from rgf import engine
from rgf.engine import (
    OutcomeTable,
    ScoreSumModel,
    as_digits,
    batch_outcomes,
    build_outcome_table,
    cache_path,
    cached_outcome_table,
    code_digits,
    decode,
    digits_to_codes,
    encode,
    first_hit,
    resolve_workers,
    sampled_digits,
    sampled_profiles,
    split_range,
)
from rgf.prefcore import Preference, Profile, SpaceTooLarge, enumerate_profiles
from rgf.rules import RuleSpec, ScoreVector, TieBreak, evaluate

from specs import family_specs, two_alternative_specs


def test_round_trip_and_base_case():
    profs = list(enumerate_profiles(2, 3))
    assert [encode(p) for p in profs] == list(range(36))
    assert all(decode(2, 3, encode(p)) == p for p in profs)
    assert encode(Profile.parse("a>b>c; a>b>c; a>b>c")) == 0
    assert len({encode(p) for p in enumerate_profiles(3, 3)}) == 216


def test_digits_and_codes_agree():
    codes = np.arange(0, 13824, 17)
    digits = code_digits(codes, 3, 4)
    assert np.array_equal(digits_to_codes(digits, 4), codes)
    profs = [decode(3, 4, int(c)) for c in codes[:20]]
    assert np.array_equal(as_digits(profs), digits[:20])


@pytest.mark.parametrize("n,m", [(1, 3), (2, 3), (3, 3)])
def test_batch_outcomes_match_evaluate_exhaustively(n, m):
    profs = list(enumerate_profiles(n, m))
    digits = as_digits(profs)
    for spec in family_specs(n, m):
        got = batch_outcomes(spec, digits)
        want = [evaluate(spec, p) for p in profs]
        assert got.tolist() == want, spec.describe()


@pytest.mark.parametrize("n,m", [(4, 3), (3, 4), (5, 4), (2, 5)])
def test_batch_outcomes_match_evaluate_on_samples(n, m):
    digits = sampled_digits(n, m, 150, seed=n + m)
    profs = [decode(n, m, int(c)) for c in digits_to_codes(digits, m)]
    for spec in family_specs(n, m):
        assert batch_outcomes(spec, digits).tolist() == [evaluate(spec, p) for p in profs], spec.describe()


def test_batch_outcomes_for_two_alternatives_and_bottom_count_rule():
    for n in (2, 3, 4):
        profs = list(enumerate_profiles(n, 2))
        for spec in two_alternative_specs(n):
            assert batch_outcomes(spec, as_digits(profs)).tolist() == [evaluate(spec, p) for p in profs]
    spec = RuleSpec.remark4x3()
    profs = list(enumerate_profiles(4, 3))
    assert batch_outcomes(spec, as_digits(profs)).tolist() == [evaluate(spec, p) for p in profs]


def test_borda_table_examples():
    spec = RuleSpec.scoring(2, 3, ScoreVector.borda(3), TieBreak.fixed((0, 1, 2)))
    table = build_outcome_table(spec)
    assert len(table) == 36 and set(table.outcomes.tolist()) <= {0, 1, 2}
    for top in range(3):
        rest = [x for x in range(3) if x != top]
        pref = Preference((top, *rest))
        assert table.lookup(Profile((pref, pref))) == top
    spec3 = RuleSpec.scoring(3, 3, ScoreVector.borda(3), TieBreak.fixed((0, 1, 2)))
    t3 = build_outcome_table(spec3)
    assert all(t3.lookup(p) == evaluate(spec3, p) for p in enumerate_profiles(3, 3))


def test_table_is_read_only_and_budgeted():
    spec = RuleSpec.dictatorship(2, 3, 1)
    table = build_outcome_table(spec)
    with pytest.raises(ValueError):
        table.outcomes[0] = 1
    with pytest.raises(SpaceTooLarge):
        build_outcome_table(RuleSpec.dictatorship(3, 5, 1), budget=1000)


def test_table_build_is_worker_independent():
    spec = RuleSpec.condorcet(3, 4, "copeland", TieBreak.fixed(range(4)))
    one = build_outcome_table(spec, workers=1).outcomes
    three = build_outcome_table(spec, workers=3).outcomes
    assert np.array_equal(one, three)


def test_cache_round_trip_and_invalidation(tmp_path):
    spec = RuleSpec.maxmin(3, 3, TieBreak.fixed((0, 1, 2)))
    table = cached_outcome_table(spec, tmp_path)
    path = cache_path(spec, tmp_path)
    raw = path.read_bytes()
    assert raw[:4] == b"RGF1" and len(raw) == 4 + 2 + 2 + 32 + 216
    again = OutcomeTable.load(path, spec)
    assert again is not None and np.array_equal(again.outcomes, table.outcomes)
    other = RuleSpec.maxmin(3, 3, TieBreak.fixed((1, 0, 2)))
    assert OutcomeTable.load(path, other) is None
    path.write_bytes(raw[:-5])
    assert OutcomeTable.load(path, spec) is None
    # a damaged cache is rebuilt rather than trusted
    rebuilt = cached_outcome_table(spec, tmp_path)
    assert np.array_equal(rebuilt.outcomes, table.outcomes)
    assert OutcomeTable.load(tmp_path / "missing.rgf", spec) is None


def test_sampling_is_deterministic():
    a = sampled_profiles(3, 4, 50, seed=9)
    assert a == sampled_profiles(3, 4, 50, seed=9)
    assert a != sampled_profiles(3, 4, 50, seed=10)
    assert sampled_profiles(3, 4, 0, seed=9) == []


def test_sampling_is_uniform():
    draws = sampled_digits(1, 3, 60_000, seed=123)[:, 0]
    counts = np.bincount(draws, minlength=6)
    assert np.all(np.abs(counts - 10_000) <= 500), counts
    chi2 = float(((counts - 10_000) ** 2 / 10_000).sum())
    assert chi2 < 20.5  # 5 degrees of freedom, p = 0.001


def test_split_range_covers_contiguously():
    for total in (0, 1, 7, 100):
        for parts in (1, 2, 3, 8):
            ranges = split_range(total, parts)
            flat = [x for lo, hi in ranges for x in range(lo, hi)]
            assert flat == list(range(total))


def test_first_hit_returns_lowest_range_hit():
    hits = {13, 57, 91}

    def search(lo, hi):
        found = [h for h in sorted(hits) if lo <= h < hi]
        return found[0] if found else None

    for w in (1, 2, 4, 7):
        assert first_hit(search, 100, workers=w) == 13
    assert first_hit(lambda lo, hi: None, 100, workers=3) is None


def test_worker_env_override(monkeypatch):
    monkeypatch.setenv("RGF_WORKERS", "3")
    assert resolve_workers(1) == 3
    monkeypatch.delenv("RGF_WORKERS")
    assert resolve_workers(2) == 2
    assert resolve_workers(None) == (os.cpu_count() or 1)


def test_score_sum_model_matches_table_route():
    from rgf import _kernels
    from rgf.axioms import _deviation_aux
    from rgf.prefcore import permutation_tables

    for sv in (ScoreVector.borda(4), ScoreVector.approval(4, 2), ScoreVector.plurality(4)):
        spec = RuleSpec.scoring(3, 4, sv, TieBreak.fixed((2, 0, 3, 1)))
        model = ScoreSumModel(spec)
        table = build_outcome_table(spec).outcomes
        _, rank = permutation_tables(4)
        digits = sampled_digits(3, 4, 400, seed=4)
        codes = digits_to_codes(digits, 4)
        assert np.array_equal(model.outcome(model.contrib[digits].sum(axis=1)), table[codes])
        for axiom, kind, rf in (("strategy_proof", _kernels.SP, False), ("regret_free", _kernels.RF, True)):
            aux = _deviation_aux(axiom, table, rank, 3, 4, 1)
            pos, i, q = _kernels.scan_deviations(table, rank, 3, 4 * 3 * 2, aux, kind, codes)
            got = model.scan(digits, rf)
            if pos < 0:
                assert got is None
            else:
                assert got == (pos, i, q)


def test_score_sum_model_rejects_other_rules():
    from rgf.rules import ContractError

    with pytest.raises(ContractError):
        ScoreSumModel(RuleSpec.maxmin(3, 3, TieBreak.fixed((0, 1, 2))))
    assert not ScoreSumModel.applicable(RuleSpec.scoring(3, 3, ScoreVector.borda(3), TieBreak.by_agent(1)))
