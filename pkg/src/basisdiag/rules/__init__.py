"""Rewrite rules, matching, the spider normalizer and equality proofs."""
from .core import (
    Bindings, BoxBinding, Match, ProofTrace, RewriteRule, Step, apply, expand_tags, find_matches,
    instantiate,
)
from .normalize import NotProved, Proof, normalize, prove_equal, replay
from .registry import FAMILIES, certificates, certify, check_rules, get_rule, registry, rules_in

__all__ = [
    "Bindings", "BoxBinding", "FAMILIES", "Match", "NotProved", "Proof", "ProofTrace",
    "RewriteRule", "Step", "apply", "certificates", "certify", "check_rules", "expand_tags",
    "find_matches", "get_rule", "instantiate", "normalize", "prove_equal", "registry", "replay",
    "rules_in",
]
