"""Text formats: profile files, rule configs and the JSON witness document.

Profile file::

    # comments start with '#'
    alternatives: x, y, z        (optional; otherwise taken from the first ballot)
    2: x > y > z                 (multiplicity, then ranking best first)
    y > z > x                    (multiplicity defaults to 1)

Rule config, one ``key = value`` per line::

    family = scoring
    scores = 1/3, 1/2, 1         (or borda, plurality, negative_plurality, dowdall, approval:K)
    tiebreak = order:a,b,c       (or agent:1, or relation:a>b,b>c,c>a)
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any

from .axioms import AXIOMS, Witness
from .prefcore import AlternativeSet, DomainError, Preference, Profile, default_labels
from .rules import CONDORCET_VARIANTS, Committee, Family, RuleSpec, RuleSpecError, ScoreVector, TieBreak

VERSION = "rgf/1"


class FormatError(ValueError):
    """Malformed input file; the message names the offending line."""


# ---------------------------------------------------------------------------
# profiles


_BALLOT = re.compile(r"^\s*(?:(\d+)\s*:)?\s*(.+?)\s*$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_profile(text: str) -> tuple[Profile, AlternativeSet]:
    labels: AlternativeSet | None = None
    prefs: list[Preference] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if sep and head.strip().lower() == "alternatives":
            if labels is not None or prefs:
                raise FormatError(f"line {lineno}: the alternatives header must come first and only once")
            names = [t.strip() for t in rest.split(",") if t.strip()]
            try:
                labels = AlternativeSet(tuple(names))
            except DomainError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            continue
        mult, ranking = _BALLOT.match(line).groups()
        k = 1 if mult is None else int(mult)
        if k < 1:
            raise FormatError(f"line {lineno}: multiplicity must be at least 1")
        tokens = [t.strip() for t in ranking.split(">")]
        if any(not t for t in tokens):
            raise FormatError(f"line {lineno}: empty alternative in ballot {ranking!r}")
        dupes = sorted({t for t in tokens if tokens.count(t) > 1})
        if dupes:
            raise FormatError(f"line {lineno}: duplicate alternative {', '.join(dupes)}")
        if labels is None:
            labels = AlternativeSet(tuple(sorted(tokens)))
        unknown = [t for t in tokens if t not in labels.labels]
        if unknown:
            raise FormatError(f"line {lineno}: unknown alternative {', '.join(unknown)}")
        missing = [t for t in labels.labels if t not in tokens]
        if missing:
            raise FormatError(f"line {lineno}: ballot does not rank {', '.join(missing)}")
        pref = Preference(tuple(labels.index(t) for t in tokens))
        prefs.extend([pref] * k)
    if not prefs:
        raise FormatError("profile file contains no ballots")
    return Profile(tuple(prefs)), labels


def render_profile(profile: Profile, labels: AlternativeSet | None = None) -> str:
    labels = labels or AlternativeSet.default(profile.m)
    lines = ["alternatives: " + ", ".join(labels.labels)]
    lines += ["1: " + " > ".join(labels.label(x) for x in p.ranking) for p in profile.prefs]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rule configs

_KEYS = {"family", "variant", "scores", "tiebreak", "order", "committee", "agent", "alternative", "table", "name"}
_NAMED_SCORES = {
    "borda": ScoreVector.borda,
    "plurality": ScoreVector.plurality,
    "negative_plurality": ScoreVector.negative_plurality,
    "dowdall": ScoreVector.dowdall,
}


def _labels_list(text: str, labels: AlternativeSet) -> tuple[int, ...]:
    return tuple(labels.index(t.strip()) for t in text.split(",") if t.strip())


def _parse_scores(text: str, m: int) -> ScoreVector:
    key = text.strip().lower()
    if key in _NAMED_SCORES:
        return _NAMED_SCORES[key](m)
    if key.startswith("approval:"):
        return ScoreVector.approval(m, int(key.split(":", 1)[1]))
    try:
        values = tuple(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise RuleSpecError(f"cannot read scores {text!r}") from None
    return ScoreVector(values)


def _parse_tiebreak(text: str, m: int, labels: AlternativeSet) -> TieBreak:
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    if kind == "order":
        return TieBreak.fixed(_labels_list(body, labels))
    if kind == "agent":
        return TieBreak.by_agent(int(body))
    if kind == "relation":
        pairs = []
        for tok in body.split(","):
            a, sep, b = tok.partition(">")
            if not sep:
                raise RuleSpecError(f"relation pair {tok!r} must look like x>y")
            pairs.append((labels.index(a.strip()), labels.index(b.strip())))
        return TieBreak.star(pairs, m)
    raise RuleSpecError(f"unknown tie-break kind {kind!r}; use order:, agent: or relation:")


def _parse_committee(text: str, n: int) -> Committee:
    coalitions = []
    for group in text.split("|"):
        members = [int(t) for t in group.replace(",", " ").split()]
        coalitions.append(members)
    return Committee.from_minimal(n, coalitions)


def parse_rule_config(text: str, n: int, m: int, labels: AlternativeSet | None = None) -> RuleSpec:
    labels = labels or AlternativeSet.default(m)
    if labels.m != m:
        raise FormatError(f"{labels.m} alternative labels given for m={m}")
    entries: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep:
            raise FormatError(f"line {lineno}: expected key = value")
        if key not in _KEYS:
            raise FormatError(f"line {lineno}: unknown key {key!r}; known: {', '.join(sorted(_KEYS))}")
        if key in entries:
            raise FormatError(f"line {lineno}: {key} given twice (first on line {entries[key][0]})")
        entries[key] = (lineno, value.strip())
    if "family" not in entries:
        raise FormatError("rule config has no family line")

    def value(key):
        return entries[key][1] if key in entries else None

    def fail(key, exc):
        where = entries[key][0] if key in entries else entries["family"][0]
        raise FormatError(f"line {where}: {exc}") from None

    current = "family"
    try:
        fam = Family(value("family").lower())
        kwargs: dict[str, Any] = {}
        if value("tiebreak") is not None:
            current = "tiebreak"
            kwargs["tiebreak"] = _parse_tiebreak(value("tiebreak"), m, labels)
            kwargs["tiebreak"].validate(n, m)
        if value("scores") is not None:
            current = "scores"
            kwargs["scores"] = _parse_scores(value("scores"), m)
        if value("variant") is not None:
            current = "variant"
            v = value("variant").lower()
            if v not in CONDORCET_VARIANTS:
                raise RuleSpecError(f"unknown variant {v!r}; known: {', '.join(CONDORCET_VARIANTS)}")
            kwargs["variant"] = v
        if value("order") is not None:
            current = "order"
            kwargs["order"] = _labels_list(value("order"), labels)
        if value("agent") is not None:
            current = "agent"
            kwargs["agent"] = int(value("agent"))
        if value("alternative") is not None:
            current = "alternative"
            kwargs["alternative"] = labels.index(value("alternative"))
        if value("committee") is not None:
            current = "committee"
            kwargs["committee"] = _parse_committee(value("committee"), n)
        if value("table") is not None:
            current = "table"
            kwargs["table"] = tuple(labels.index(t.strip()) for t in value("table").split(","))
        if fam is Family.EXTENDED_MAJORITY:
            kwargs.setdefault("order", (0, 1))
        current = "family"
        return RuleSpec(fam, n, m, name=value("name") or "", **kwargs)
    except (RuleSpecError, DomainError, ValueError) as exc:
        fail(current, exc)


def rule_to_config(spec: RuleSpec, labels: AlternativeSet | None = None) -> str:
    labels = labels or AlternativeSet.default(spec.m)
    L = labels.label
    lines = [f"family = {spec.family.value}"]
    if spec.name:
        lines.append(f"name = {spec.name}")
    tb = spec.tiebreak
    if tb is not None:
        if tb.kind == "order":
            lines.append("tiebreak = order:" + ",".join(L(x) for x in tb.order))
        elif tb.kind == "agent":
            lines.append(f"tiebreak = agent:{tb.agent}")
        else:
            lines.append("tiebreak = relation:" + ",".join(f"{L(a)}>{L(b)}" for a, b in sorted(tb.relation)))
    if spec.scores is not None:
        lines.append("scores = " + ", ".join(str(v) for v in spec.scores.s))
    if spec.variant:
        lines.append(f"variant = {spec.variant}")
    if spec.order:
        lines.append("order = " + ",".join(L(x) for x in spec.order))
    if spec.family in (Family.DICTATORSHIP, Family.BOTTOM):
        lines.append(f"agent = {spec.agent}")
    if spec.family is Family.CONSTANT:
        lines.append(f"alternative = {L(spec.alternative)}")
    if spec.committee is not None:
        lines.append("committee = " + " | ".join(",".join(map(str, c)) for c in spec.committee.minimal()))
    if spec.table:
        lines.append("table = " + ",".join(L(x) for x in spec.table))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# witness JSON


def _ranking(pref: Preference, labels: AlternativeSet) -> list[str]:
    return [labels.label(x) for x in pref.ranking]


def _profile_json(prof: Profile, labels: AlternativeSet) -> list[list[str]]:
    return [_ranking(p, labels) for p in prof.prefs]


def witness_to_json(spec: RuleSpec, w: Witness, labels: AlternativeSet | None = None) -> dict:
    labels = labels or AlternativeSet.default(spec.m)
    doc: dict[str, Any] = {
        "version": VERSION,
        "kind": "witness",
        "axiom": w.axiom,
        "n": spec.n,
        "m": spec.m,
        "alternatives": list(labels.labels),
        "rule": rule_to_config(spec, labels).splitlines(),
        "profile": _profile_json(w.profile, labels),
    }
    if w.agent is not None:
        doc["agent"] = w.agent
    if w.misreport is not None:
        doc["misreport"] = _ranking(w.misreport, labels)
    if w.other is not None:
        doc["other"] = _profile_json(w.other, labels)
    if w.permutation is not None:
        doc["permutation"] = list(w.permutation)
    if w.alternative is not None:
        doc["alternative"] = labels.label(w.alternative)
    if w.axiom == "regret_free":
        doc["counterfactuals_safe"] = w.counterfactuals_safe
    if w.profiles:
        doc["profiles"] = [_profile_json(p, labels) for p in w.profiles]
    return doc


def witness_from_json(doc: dict) -> tuple[RuleSpec, Witness, AlternativeSet]:
    if doc.get("version") != VERSION:
        raise FormatError(f"unsupported witness version {doc.get('version')!r}; expected {VERSION}")
    if doc.get("kind") != "witness":
        raise FormatError("document is not a witness")
    try:
        labels = AlternativeSet(tuple(doc["alternatives"]))
        n, m = int(doc["n"]), int(doc["m"])
        spec = parse_rule_config("\n".join(doc["rule"]), n, m, labels)
        axiom = doc["axiom"]
        if axiom not in AXIOMS:
            raise FormatError(f"unknown axiom {axiom!r}")

        def pref(tokens):
            return Preference(tuple(labels.index(t) for t in tokens))

        def prof(rows):
            return Profile(tuple(pref(r) for r in rows))

        w = Witness(
            axiom,
            prof(doc["profile"]),
            agent=doc.get("agent"),
            misreport=pref(doc["misreport"]) if "misreport" in doc else None,
            other=prof(doc["other"]) if "other" in doc else None,
            permutation=tuple(doc["permutation"]) if "permutation" in doc else None,
            alternative=labels.index(doc["alternative"]) if "alternative" in doc else None,
            counterfactuals_safe=bool(doc.get("counterfactuals_safe", False)),
            profiles=tuple(prof(p) for p in doc.get("profiles", [])),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"witness document is missing or mangles field {exc}") from None
    except DomainError as exc:
        raise FormatError(str(exc)) from None
    return spec, w, labels


def labels_for(m: int, text: str | None = None) -> AlternativeSet:
    if text:
        labels = AlternativeSet(tuple(t.strip() for t in text.split(",") if t.strip()))
        if labels.m != m:
            raise FormatError(f"{labels.m} alternative labels given for m={m}")
        return labels
    return AlternativeSet(default_labels(m))
