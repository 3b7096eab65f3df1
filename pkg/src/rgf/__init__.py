"""Exhaustive and sampled axiom checks for voting rules at small scale."""

from .axioms import Exhaustive, Sampled, Verdict, Witness, check, recheck
from .engine import build_outcome_table, decode, encode, sampled_profiles
from .prefcore import AlternativeSet, Preference, Profile
from .rules import RuleSpec, ScoreVector, TieBreak, evaluate

__all__ = [
    "AlternativeSet", "Exhaustive", "Preference", "Profile", "RuleSpec", "Sampled", "ScoreVector",
    "TieBreak", "Verdict", "Witness", "build_outcome_table", "check", "decode", "encode", "evaluate",
    "recheck", "sampled_profiles",
]
