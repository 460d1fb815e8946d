"""Composite logic reasoning engine over a shared first-order knowledge base.

Eight cooperating engines: strict derivation with negation as failure,
minimal-model defaults, Kripke/trace modal checking, defeasible rules with
entrenchment tiers, abstract argumentation, abduction, counterfactuals,
and state-space planning, plus a pipeline orchestrator and an LLM bridge
with a scripted offline transport.
"""

from .terms import (
    Compound,
    Constant,
    KnowledgeBase,
    Literal,
    Rule,
    RuleKind,
    Sign,
    Substitution,
    Tier,
    Variable,
    unify,
)
from .parser import (
    Scenario,
    parse_kb,
    parse_literal_text,
    parse_scenario,
    parse_scenario_file,
    render_kb,
    render_scenario,
)
from .derive import derive, ground

__all__ = [
    "Compound",
    "Constant",
    "KnowledgeBase",
    "Literal",
    "Rule",
    "RuleKind",
    "Scenario",
    "Sign",
    "Substitution",
    "Tier",
    "Variable",
    "derive",
    "ground",
    "parse_kb",
    "parse_literal_text",
    "parse_scenario",
    "parse_scenario_file",
    "render_kb",
    "render_scenario",
    "unify",
]
