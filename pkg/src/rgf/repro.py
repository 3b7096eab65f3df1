"""Registry of reproduction scenarios and the summary report built from them.

Each scenario pairs a rule with an axiom, a scope and an expected verdict.
Directed scenarios carry a hand-built witness that is rechecked rather than
searched for.  The property scenario checks that, over seeded random
tops-only rules, regret-free truth-telling never occurs without
strategy-proofness.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .axioms import (
    HOLDS,
    VIOLATED,
    Exhaustive,
    Sampled,
    Verdict,
    Witness,
    check,
    recheck,
)
from .formats import witness_to_json
from .prefcore import Preference, Profile
from .rules import CONDORCET_VARIANTS, Committee, RuleSpec, ScoreVector, TieBreak


@dataclass(frozen=True)
class Directed:
    witness: Witness

    def describe(self) -> str:
        return "directed"


@dataclass(frozen=True)
class Property:
    count: int
    seed: int

    def describe(self) -> str:
        return f"property({self.count} rules, seed {self.seed})"


@dataclass(frozen=True)
class Scenario:
    id: str
    spec: RuleSpec | None
    axiom: str
    scope: tuple[int, int]
    mode: Exhaustive | Sampled | Directed | Property
    expected: str
    claim: str


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    verdict: Verdict
    expected: str
    match: bool
    elapsed: float
    note: str = ""


# ---------------------------------------------------------------------------
# rule shorthands

_NAMES = ("a", "b", "c", "d", "e", "f", "g", "h")


def _fixed(m: int) -> TieBreak:
    return TieBreak.fixed(range(m))


def a_maxmin(n, m):
    return RuleSpec.maxmin(n, m, _fixed(m), name=f"A-maxmin {n}x{m}")


def n_maxmin(n, m, agent=1):
    return RuleSpec.maxmin(n, m, TieBreak.by_agent(agent), name=f"N-maxmin(agent {agent}) {n}x{m}")


def a_scoring(n, m, sv, label):
    return RuleSpec.scoring(n, m, sv, _fixed(m), name=f"A-{label} {n}x{m}")


def n_scoring(n, m, sv, label, agent=1):
    return RuleSpec.scoring(n, m, sv, TieBreak.by_agent(agent), name=f"N-{label}(agent {agent}) {n}x{m}")


def condorcet_rule(variant, n, m, regime):
    tb = _fixed(m) if regime == "A" else TieBreak.by_agent(1)
    return RuleSpec.condorcet(n, m, variant, tb, name=f"{regime}-{variant} {n}x{m}")


def _order_name(order) -> str:
    return "".join(_NAMES[x] for x in order)


def star_relations(m: int = 3) -> list[frozenset]:
    pairs = list(itertools.combinations(range(m), 2))
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        out.append(frozenset((a, b) if keep else (b, a) for (a, b), keep in zip(pairs, bits)))
    return out


def _relation_name(rel) -> str:
    return ",".join(f"{_NAMES[a]}>{_NAMES[b]}" for a, b in sorted(rel))


def _pref(text: str) -> Preference:
    return Preference.parse(text)


def _prof(*rows: str) -> Profile:
    return Profile.parse(list(rows))


def _deviation(axiom, profile, agent, misreport, alternative=None) -> Directed:
    return Directed(Witness(axiom, profile, agent=agent, misreport=_pref(misreport), alternative=alternative,
                            counterfactuals_safe=axiom == "regret_free"))


# ---------------------------------------------------------------------------
# catalog

_RF = "regret_free"


def _scenario(id, spec, axiom, mode, expected, claim) -> Scenario:
    scope = (spec.n, spec.m) if spec is not None else (3, 3)
    return Scenario(id, spec, axiom, scope, mode, expected, claim)


@lru_cache(maxsize=1)
def _catalog() -> tuple[Scenario, ...]:
    E = Exhaustive()
    out: list[Scenario] = []
    add = lambda *args: out.append(_scenario(*args))

    maxmin_claim = "A-maxmin is regret-free iff n >= m-1 or n divides m-1"
    for n, m in [(2, 3), (3, 3), (3, 4), (2, 5), (4, 3)]:
        add(f"T1-pos-{n}x{m}", a_maxmin(n, m), _RF, E, HOLDS, maxmin_claim)
    add("T1-neg-2x4", a_maxmin(2, 4), _RF, E, VIOLATED, maxmin_claim)
    for n, m in [(2, 3), (2, 4), (3, 3), (4, 3)]:
        add(f"T1-N-{n}x{m}", n_maxmin(n, m), _RF, E, HOLDS, "every N-maxmin rule is regret-free")

    negpl_claim = "A-negative plurality is regret-free iff n >= m-1"
    for n, m in [(3, 3), (2, 3)]:
        add(f"T2-pos-{n}x{m}", a_scoring(n, m, ScoreVector.negative_plurality(m), "negpl"), _RF, E, HOLDS, negpl_claim)
    add("T2-neg-2x4", a_scoring(2, 4, ScoreVector.negative_plurality(4), "negpl"), _RF, E, VIOLATED, negpl_claim)
    for n, m in [(2, 4), (3, 3)]:
        add(f"T2-N-{n}x{m}", n_scoring(n, m, ScoreVector.negative_plurality(m), "negpl"), _RF, E, HOLDS,
            "every N-negative plurality rule is regret-free")

    t3_claim = "Borda, plurality and Dowdall rules are not regret-free"
    t3 = {
        "A-borda": a_scoring(3, 3, ScoreVector.borda(3), "borda"),
        "N-borda": n_scoring(3, 3, ScoreVector.borda(3), "borda"),
        "A-plurality": a_scoring(3, 3, ScoreVector.plurality(3), "plurality"),
        "A-dowdall": a_scoring(3, 3, ScoreVector.dowdall(3), "dowdall"),
    }
    for key, spec in t3.items():
        add(f"T3-{key}-3x3", spec, _RF, E, VIOLATED, t3_claim)
    t3_profile = _prof("a>c>b", "c>b>a", "b>a>c")
    for key in ("A-borda", "A-plurality", "A-dowdall"):
        add(f"T3-directed-{key}", t3[key], _RF, _deviation(_RF, t3_profile, 2, "b>c>a"), VIOLATED,
            "all-tie profile where agent 2 lifts b over c")

    approval_claim = "A-(m-k*)-approval is regret-free iff k* n = m-1"
    add("T4-pos-3x7", a_scoring(3, 7, ScoreVector.approval(7, 5), "5-approval"), _RF, Sampled(5000, 7), HOLDS,
        approval_claim + " (sampled; not a certificate)")
    t4_truth = _prof("b>c>d>e>f>a>h>g", "b>a>c>d>e>f>g>h", "b>a>c>d>e>f>g>h")
    add("T4-neg-directed-3x8", a_scoring(3, 8, ScoreVector.approval(8, 6), "6-approval"), _RF,
        _deviation(_RF, t4_truth, 1, "b>c>d>e>f>h>a>g"), VIOLATED,
        "k* n < m-1: agent 1 pushes the winner a into the unapproved positions")

    t5 = a_scoring(3, 4, ScoreVector.approval(4, 2), "2-approval")
    t5_claim = "scoring rules with s(k*-1) = s(k*) and k* n >= m-1 are not regret-free"
    add("T5-2approval-3x4", t5, _RF, E, VIOLATED, t5_claim)
    add("T5-directed", t5, _RF, _deviation(_RF, _prof("a>b>c>d", "c>d>b>a", "a>b>d>c"), 2, "c>b>d>a"),
        VIOLATED, t5_claim)

    cc_claim = "no Condorcet consistent and monotone rule is regret-free"
    a7_first = _prof("b>a>c", "c>b>a", "c>b>a", "a>c>b")
    a7_second = _prof("b>a>c", "c>a>b", "c>b>a", "a>c>b")
    for variant in CONDORCET_VARIANTS:
        for regime in ("A", "N"):
            spec = condorcet_rule(variant, 3, 3, regime)
            add(f"T6-{regime}-{variant}-monotone", spec, "monotone", E, HOLDS, "these Condorcet rules are monotone")
            add(f"T6-{regime}-{variant}-rftt", spec, _RF, E, VIOLATED, cc_claim)
            big = condorcet_rule(variant, 4, 3, regime)
            prof = a7_second if variant in ("copeland", "black") else a7_first
            add(f"T6-directed-{regime}-{variant}", big, _RF, _deviation(_RF, prof, 1, "a>b>c"), VIOLATED,
                "agent 1 turns the sole winner c into a tie with a")

    remark = RuleSpec.remark4x3(name="bottom-count rule 4x3")
    remark_claim = "with four agents and three alternatives a Condorcet consistent, monotone, regret-free rule exists"
    add("Remark-4x3", remark, _RF, E, HOLDS, remark_claim)
    add("Remark-4x3-condorcet", remark, "condorcet_consistent", E, HOLDS, remark_claim)
    add("Remark-4x3-monotone", remark, "monotone", E, HOLDS, remark_claim)

    se = RuleSpec.successive_elimination(3, 3, (0, 1, 2), name="SE(abc) 3x3")
    add("T8-3x3", se, _RF, E, VIOLATED, "no successive elimination rule is regret-free")
    add("T8-directed", se, _RF, _deviation(_RF, _prof("a>b>c", "c>a>b", "b>c>a"), 1, "b>a>c"), VIOLATED,
        "cyclic profile; agent 1 drops a below b")
    se5 = RuleSpec.successive_elimination(5, 4, (0, 1, 2, 3), name="SE(abcd) 5x4")
    mono_profile = _prof("a>b>d>c", "a>c>d>b", "c>d>a>b", "c>b>d>a", "d>b>a>c")
    add("T8-monotonicity-5x4", se5, "monotone", _deviation("monotone", mono_profile, 1, "b>a>d>c", alternative=2),
        VIOLATED, "successive elimination is not monotone")
    add("CC-se-3x3", se, "condorcet_consistent", E, HOLDS, "successive elimination is Condorcet consistent")
    add("CC-A-plurality-3x3", t3["A-plurality"], "condorcet_consistent", E, VIOLATED,
        "plurality can miss the Condorcet winner")
    add("Maskin-A-simpson-3x3", condorcet_rule("simpson", 3, 3, "A"), "maskin_monotone", E, VIOLATED,
        "Maskin monotonicity is incompatible with Condorcet consistency")

    t7_claim = "for n=2, m=3 the neutral regret-free rules are N-maxmin rules and dictatorships"
    t7_rules = []
    for agent in (1, 2):
        t7_rules.append((f"N-maxmin{agent}", n_maxmin(2, 3, agent)))
        t7_rules.append((f"N-negpl{agent}", n_scoring(2, 3, ScoreVector.negative_plurality(3), "negpl", agent)))
        t7_rules.append((f"dict{agent}", RuleSpec.dictatorship(2, 3, agent, name=f"dictator {agent} 2x3")))
    for key, spec in t7_rules:
        add(f"T7-{key}-rftt", spec, _RF, E, HOLDS, t7_claim)
        add(f"T7-{key}-neutral", spec, "neutral", E, HOLDS, t7_claim)
    se23 = RuleSpec.successive_elimination(2, 3, (0, 1, 2), name="SE(abc) 2x3")
    add("T7-se-rftt", se23, _RF, E, HOLDS, "independence: successive elimination is regret-free")
    add("T7-se-neutral", se23, "neutral", E, VIOLATED, "independence: successive elimination is not neutral")
    bottom = RuleSpec.bottom(2, 3, 1, name="bottom of agent 1 2x3")
    add("T7-bottom-neutral", bottom, "neutral", E, HOLDS, "independence: the bottom rule is neutral")
    add("T7-bottom-rftt", bottom, _RF, E, VIOLATED, "independence: the bottom rule is not regret-free")

    t9_claim = "for n=2, m=3 the efficient anonymous regret-free rules are successive elimination and A-maxmin*"
    for rel in star_relations(3):
        spec = RuleSpec.maxmin(2, 3, TieBreak.star(rel, 3), name=f"A-maxmin*({_relation_name(rel)}) 2x3")
        tag = "".join(_NAMES[a] + _NAMES[b] for a, b in sorted(rel))
        for ax in (_RF, "efficient", "anonymous"):
            add(f"T9-star-{tag}-{ax}", spec, ax, E, HOLDS, t9_claim)
    for order in itertools.permutations(range(3)):
        spec = RuleSpec.successive_elimination(2, 3, order, name=f"SE({_order_name(order)}) 2x3")
        for ax in (_RF, "efficient", "anonymous"):
            add(f"T9-se-{_order_name(order)}-{ax}", spec, ax, E, HOLDS, t9_claim)
    const = RuleSpec.constant(2, 3, 0, name="constant a 2x3")
    add("T9-constant-rftt", const, _RF, E, HOLDS, "independence: constant rule")
    add("T9-constant-anonymous", const, "anonymous", E, HOLDS, "independence: constant rule")
    add("T9-constant-efficient", const, "efficient", E, VIOLATED, "independence: constant rule")
    dic = RuleSpec.dictatorship(2, 3, 1, name="dictator 1 2x3")
    add("T9-dictator-rftt", dic, _RF, E, HOLDS, "independence: dictatorship")
    add("T9-dictator-efficient", dic, "efficient", E, HOLDS, "independence: dictatorship")
    add("T9-dictator-anonymous", dic, "anonymous", E, VIOLATED, "independence: dictatorship")
    maxtop = RuleSpec.maxtop(2, 3, (0, 1, 2), name="max-top(abc) 2x3")
    add("T9-maxtop-efficient", maxtop, "efficient", E, HOLDS, "independence: max-top rule")
    add("T9-maxtop-anonymous", maxtop, "anonymous", E, HOLDS, "independence: max-top rule")
    add("T9-maxtop-rftt", maxtop, _RF, E, VIOLATED, "independence: max-top rule")

    add("P1-tops-only-3x3", None, _RF, Property(200, 2024), HOLDS,
        "a tops-only regret-free rule is strategy-proof")

    emv = RuleSpec.extended_majority(Committee.majority(3), 0, 1, name="extended majority 3x2")
    add("EMV-extmaj-sp-3x2", emv, "strategy_proof", E, HOLDS, "with two alternatives extended majority voting is strategy-proof")
    add("EMV-extmaj-rftt-3x2", emv, _RF, E, HOLDS, "with two alternatives extended majority voting is regret-free")
    add("EMV-extmaj-tops-3x2", emv, "tops_only", E, HOLDS, "every two-alternative rule is tops-only")
    return tuple(out)


def scenario_catalog() -> list[Scenario]:
    return list(_catalog())


def get_scenario(scenario_id: str) -> Scenario:
    for sc in _catalog():
        if sc.id == scenario_id:
            return sc
    raise KeyError(f"unknown scenario id {scenario_id!r}")


# ---------------------------------------------------------------------------
# running


def random_tops_rules(n: int, m: int, count: int, seed: int) -> list[RuleSpec]:
    """Seeded random tops-only rules.

    Each rule first draws its range size uniformly from ``1..m`` and a random
    range of that size, then maps every top vector uniformly into the range.
    Small ranges make regret-free rules (such as constants) common enough for
    the implication to be exercised.
    """
    rng = np.random.default_rng(seed)
    rules = []
    for k in range(count):
        size = int(rng.integers(1, m + 1))
        image = rng.choice(m, size=size, replace=False)
        table = image[rng.integers(0, size, size=m**n)]
        rules.append(RuleSpec.tops_table(n, m, table.tolist(), name=f"tops-rule #{k}"))
    return rules


def _run_property(sc: Scenario, workers) -> tuple[Verdict, str]:
    n, m = sc.scope
    rf_count = 0
    for spec in random_tops_rules(n, m, sc.mode.count, sc.mode.seed):
        rf = check(spec, "regret_free", workers=workers)
        if rf.holds:
            rf_count += 1
            sp = check(spec, "strategy_proof", workers=workers)
            if not sp.holds:
                return sp, f"{spec.label}: regret-free but manipulable"
    return Verdict(sc.axiom, HOLDS, sc.mode, route="property"), f"{rf_count}/{sc.mode.count} rules regret-free, all strategy-proof"


def run_scenario(scenario_id: str | Scenario, workers: int | None = None) -> ScenarioResult:
    sc = scenario_id if isinstance(scenario_id, Scenario) else get_scenario(scenario_id)
    start = time.perf_counter()
    note = ""
    if isinstance(sc.mode, Directed):
        ok = recheck(sc.spec, sc.mode.witness)
        verdict = Verdict(sc.axiom, VIOLATED if ok else HOLDS, sc.mode, sc.mode.witness if ok else None,
                          route="recheck")
        note = "witness rechecks" if ok else "witness does not recheck"
    elif isinstance(sc.mode, Property):
        verdict, note = _run_property(sc, workers)
    else:
        verdict = check(sc.spec, sc.axiom, sc.mode, workers=workers)
    elapsed = time.perf_counter() - start
    return ScenarioResult(sc, verdict, sc.expected, verdict.status == sc.expected, elapsed, note)


def run_all(ids: list[str] | None = None, workers: int | None = None) -> list[ScenarioResult]:
    scenarios = _catalog() if ids is None else [get_scenario(i) for i in ids]
    return [run_scenario(sc, workers) for sc in scenarios]


# ---------------------------------------------------------------------------
# reporting

SUMMARY_ROWS = (
    ("A-maxmin: regret-free iff n >= m-1 or n | m-1", "T1-pos-", "T1-neg-"),
    ("N-maxmin: all regret-free", "T1-N-"),
    ("A-negative plurality: regret-free iff n >= m-1", "T2-pos-", "T2-neg-"),
    ("N-negative plurality: all regret-free", "T2-N-"),
    ("Borda, plurality, Dowdall: none regret-free", "T3-"),
    ("A-(m-k*)-approval: regret-free iff k* n = m-1", "T4-"),
    ("scoring with s(k*-1) = s(k*), k* n >= m-1: not regret-free", "T5-"),
    ("Condorcet consistent + monotone => none regret-free", "T6-"),
    ("n=4, m=3: bottom-count rule is Condorcet consistent, monotone, regret-free", "Remark-"),
    ("successive elimination: none regret-free", "T8-"),
    ("n=2, m=3: neutral + regret-free <=> N-maxmin or dictatorship", "T7-"),
    ("n=2, m=3: efficient + anonymous + regret-free <=> successive elimination or A-maxmin*", "T9-"),
    ("tops-only + regret-free => strategy-proof", "P1-"),
    ("m=2: extended majority voting is strategy-proof", "EMV-"),
)


def summary_table(results: list[ScenarioResult]) -> list[dict]:
    rows = []
    for label, *prefixes in SUMMARY_ROWS:
        hits = [r for r in results if any(r.scenario.id.startswith(p) for p in prefixes)]
        if not hits:
            continue
        coverage = sorted({r.scenario.mode.describe().split("(")[0] for r in hits})
        scopes = sorted({f"{r.scenario.scope[0]}x{r.scenario.scope[1]}" for r in hits})
        rows.append({
            "row": label,
            "status": "CONFIRMED" if all(r.match for r in hits) else "MISMATCH",
            "scenarios": len(hits),
            "scopes": ",".join(scopes),
            "coverage": ",".join(coverage),
        })
    return rows


def results_tsv(results: list[ScenarioResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["id", "rule", "axiom", "n", "m", "mode", "expected", "status", "match", "elapsed_s"])
    for r in results:
        sc = r.scenario
        rule = sc.spec.label if sc.spec is not None else "random tops-only rules"
        w.writerow([sc.id, rule, sc.axiom, sc.scope[0], sc.scope[1], sc.mode.describe(), r.expected,
                    r.verdict.status, "MATCH" if r.match else "MISMATCH", f"{r.elapsed:.3f}"])
    w.writerow([])
    w.writerow(["summary", "status", "scenarios", "scopes", "coverage"])
    for row in summary_table(results):
        w.writerow([row["row"], row["status"], row["scenarios"], row["scopes"], row["coverage"]])
    return buf.getvalue()


def report_document(results: list[ScenarioResult]) -> dict:
    items = []
    for r in results:
        sc = r.scenario
        item = {
            "id": sc.id,
            "rule": sc.spec.describe() if sc.spec is not None else None,
            "axiom": sc.axiom,
            "scope": list(sc.scope),
            "mode": sc.mode.describe(),
            "expected": r.expected,
            "status": r.verdict.status,
            "match": r.match,
            "elapsed": round(r.elapsed, 6),
            "claim": sc.claim,
        }
        if r.note:
            item["note"] = r.note
        if r.verdict.witness is not None and sc.spec is not None:
            item["witness"] = witness_to_json(sc.spec, r.verdict.witness)
        items.append(item)
    return {"version": "rgf/1", "kind": "report", "results": items, "summary": summary_table(results)}


def write_report(results: list[ScenarioResult], path) -> None:
    path = str(path)
    if path.endswith(".json"):
        with open(path, "w") as fh:
            json.dump(report_document(results), fh, indent=2)
    else:
        with open(path, "w") as fh:
            fh.write(results_tsv(results))
