"""Abnormality-minimizing model enumeration (circumscription) with cautious
entailment over the minimal models.

Interpretations are enumerated exhaustively over the atoms mentioned by the
ground theory, so this is strictly a desk-scale engine.  Both negation
forms read classically here (atom absent from the interpretation); the
naf/classical distinction only matters to the derivation engine.

Model preference is two-leveled: a model is discarded when another model
with the same fixed-predicate atoms has a strictly smaller minimized
extension, or the same minimized extension and strictly fewer atoms
overall.  The second level keeps varied predicates from floating true
without support, which is what makes the penguin exception actually
retract the flying conclusion instead of merely disputing it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .derive import ground
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

#: A model is the set of ground atoms it makes true.
Model = frozenset[Term]

HERBRAND_LIMIT = 24

HOLDS = "holds"
FAILS = "fails"
DISPUTED = "disputed"


@dataclass(frozen=True)
class DefaultTheory:
    """A knowledge base plus a partition of its predicates into minimized
    (the abnormality predicates), fixed, and varied."""

    kb: KnowledgeBase
    minimized: frozenset[str]
    fixed: frozenset[str]
    varied: frozenset[str]

    def __post_init__(self):
        preds = self.kb.predicates()
        parts = (self.minimized, self.fixed, self.varied)
        union = self.minimized | self.fixed | self.varied
        if union != preds or sum(len(p) for p in parts) != len(union):
            raise ValueError(
                "minimized/fixed/varied must partition the KB predicates "
                f"{sorted(preds)}, got {sorted(union)}"
            )


def default_theory(
    kb: KnowledgeBase,
    minimized=(),
    fixed: Optional[frozenset[str]] = None,
    varied: Optional[frozenset[str]] = None,
) -> DefaultTheory:
    """Build a theory with the default partition: fact predicates fixed,
    everything not minimized or fixed varied."""
    minimized = frozenset(minimized)
    preds = kb.predicates()
    if fixed is None:
        fixed = frozenset(r.head.predicate for r in kb.facts()) - minimized
    else:
        fixed = frozenset(fixed) - minimized
    if varied is None:
        varied = preds - minimized - fixed
    else:
        varied = frozenset(varied)
    return DefaultTheory(kb, minimized, fixed, varied)


def _strict_ground_rules(kb: KnowledgeBase) -> tuple[Rule, ...]:
    strict = KnowledgeBase(
        tuple(r for r in kb.rules if r.kind is RuleKind.STRICT),
        kb.entity_decls,
        kb.constant_domain,
    )
    return ground(strict)


def _herbrand_base(rules) -> tuple[Term, ...]:
    atoms = set()
    for rule in rules:
        for lit in (rule.head, *rule.body):
            atoms.add(lit.atom)
    return tuple(sorted(atoms, key=str))


def _literal_true(lit: Literal, interp: frozenset[Term]) -> bool:
    inside = lit.atom in interp
    return inside if lit.sign is Sign.POS else not inside


def _satisfies(rules, interp: frozenset[Term]) -> bool:
    for rule in rules:
        if all(_literal_true(b, interp) for b in rule.body):
            if not _literal_true(rule.head, interp):
                return False
    return True


def _restrict(interp: Model, predicates: frozenset[str]) -> Model:
    return frozenset(a for a in interp if functor_arity(a)[0] in predicates)


def minimal_models(theory: DefaultTheory) -> tuple[Model, ...]:
    """Exactly the models whose minimized extension is subset-minimal among
    models agreeing on the fixed predicates (ties broken by overall atom
    minimality); deterministic order by size then atom names."""
    rules = _strict_ground_rules(theory.kb)
    base = _herbrand_base(rules)
    if len(base) > HERBRAND_LIMIT:
        raise BoundExceededError(
            f"Herbrand base has {len(base)} atoms, exhaustive bound is {HERBRAND_LIMIT}"
        )

    models: list[Model] = []
    for bits in itertools.product((False, True), repeat=len(base)):
        interp = frozenset(a for a, keep in zip(base, bits) if keep)
        if _satisfies(rules, interp):
            models.append(interp)

    def beats(a: Model, b: Model) -> bool:
        """Whether model a is strictly preferred to model b."""
        if _restrict(a, theory.fixed) != _restrict(b, theory.fixed):
            return False
        min_a, min_b = _restrict(a, theory.minimized), _restrict(b, theory.minimized)
        if min_a < min_b:
            return True
        return min_a == min_b and a < b

    minimal = [m for m in models if not any(beats(other, m) for other in models)]
    return tuple(sorted(minimal, key=lambda m: (len(m), sorted(str(a) for a in m))))


def circumscribed_entails(theory: DefaultTheory, query: Literal) -> str:
    """Cautious verdict over the minimal models: ``holds`` when the query
    is true in all of them, ``fails`` when false in all, else ``disputed``."""
    if not is_ground(query.atom):
        raise ValueError("circumscribed entailment needs a ground query")
    if query.sign is Sign.NAF:
        raise ValueError("naf queries are not meaningful under circumscription")
    models = minimal_models(theory)
    truths = [_literal_true(query, m) for m in models]
    if all(truths):
        return HOLDS
    if not any(truths):
        return FAILS
    return DISPUTED
