"""Minimal abductive explanations: subset-minimal hypothesis sets over the
declared abducibles whose addition makes the observation derivable.

Enumeration runs in increasing subset size with supersets of found
explanations pruned, and the derivation engine is the only oracle used,
so what this returns is exactly what ``derive`` certifies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .derive import answers_in_model, ground, least_model
from .errors import BoundExceededError
from .terms import (
    KnowledgeBase,
    Literal,
    Rule,
    RuleKind,
    Sign,
    Term,
    functor_arity,
    is_ground,
)

ABDUCIBLE_LIMIT = 20

Hypotheses = frozenset[Term]


@dataclass(frozen=True)
class AbductionProblem:
    """Strict-rule KB, ground atoms permitted as hypotheses, an observation
    conjunction, and forbidden atom conjunctions."""

    kb: KnowledgeBase
    abducibles: frozenset[Term]
    observation: tuple[Literal, ...]
    constraints: tuple[tuple[Literal, ...], ...] = ()

    def __post_init__(self):
        head_preds = {r.head.predicate for r in self.kb.rules}
        vocabulary = self.kb.predicates() | {
            functor_arity(a)[0] for a in self.abducibles
        }
        for atom in self.abducibles:
            if not is_ground(atom):
                raise ValueError(f"abducible must be ground: {atom}")
            if functor_arity(atom)[0] in head_preds:
                raise ValueError(
                    f"abducible {atom} appears as a rule head in the KB"
                )
        for lit in self.observation:
            if not is_ground(lit.atom):
                raise ValueError(f"observation must be ground: {lit}")
            if lit.sign is Sign.NEG:
                raise ValueError(
                    f"negative observations are expressed with naf, not neg: {lit}"
                )
            if lit.predicate not in vocabulary:
                raise ValueError(f"observation predicate unknown to the KB: {lit}")


def _entails(problem: AbductionProblem, hypotheses: Hypotheses) -> bool:
    facts = tuple(
        Rule(label=f"__hyp_{i}", head=Literal(atom, Sign.POS))
        for i, atom in enumerate(sorted(hypotheses, key=str))
    )
    kb = problem.kb.with_rules(facts)
    strict = KnowledgeBase(
        tuple(r for r in kb.rules if r.kind is RuleKind.STRICT),
        kb.entity_decls,
        kb.constant_domain,
    )
    model, _ = least_model(ground(strict))
    if not all(answers_in_model(model, lit) for lit in problem.observation):
        return False
    for conjunction in problem.constraints:
        if conjunction and all(answers_in_model(model, lit) for lit in conjunction):
            return False
    return True


def explanations(problem: AbductionProblem) -> tuple[Hypotheses, ...]:
    """Exactly the subset-minimal hypothesis sets that entail the
    observation without violating any constraint; ``(frozenset(),)`` when
    the observation already holds.  Deterministic order: size, then names.
    """
    if len(problem.abducibles) > ABDUCIBLE_LIMIT:
        raise BoundExceededError(
            f"{len(problem.abducibles)} abducibles exceeds the bound of {ABDUCIBLE_LIMIT}"
        )
    candidates = sorted(problem.abducibles, key=str)
    found: list[Hypotheses] = []
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            hyp = frozenset(combo)
            # supersets of an explanation are never minimal
            if any(prior <= hyp for prior in found):
                continue
            if _entails(problem, hyp):
                found.append(hyp)
    return tuple(found)
