"""Defeasible conclusions from Toulmin-structured rules under an
entrenchment-tier strength lattice.

A queried literal presumably holds when some rule chain derives it, no
applicable contrary rule of stronger or incomparable force derives its
complement, and no rebuttal condition of a rule used in the chain is
derivable.  A blocked derivation is reported as defeated together with the
defeater's label; strict derivations are immune to defeasible attack.
Defeat is pairwise (single rule against single rule): contrary heads rebut,
a rule's own rebuttal conditions undercut it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .derive import ModelAtom, SupportRecord, ground, least_model
from .errors import MvlogicError
from .terms import (
    KnowledgeBase,
    Literal,
    Rule,
    RuleKind,
    Sign,
    is_ground,
    match,
)

STRONGER = "stronger"
WEAKER = "weaker"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class ToulminRule:
    """A defeasible rule with its backing (provenance only), rebuttal
    conditions (each a literal conjunction), and report qualifier."""

    base: Rule
    backing: Optional[str] = None
    rebuttals: tuple[tuple[Literal, ...], ...] = ()
    qualifier: str = "presumably"

    def __post_init__(self):
        if self.base.kind is not RuleKind.DEFEASIBLE:
            raise ValueError(f"rule {self.base.label} is not defeasible")
        if self.base.tier is None:
            raise ValueError(f"rule {self.base.label} carries no entrenchment tier")

    @property
    def label(self) -> str:
        return self.base.label


def compare_strength(r1: ToulminRule, r2: ToulminRule) -> str:
    """Tier order decides first; equal tiers fall back to explicit
    priorities; otherwise rules are equal only to themselves."""
    t1, t2 = r1.base.tier, r2.base.tier
    if t1.stronger_than(t2):
        return STRONGER
    if t2.stronger_than(t1):
        return WEAKER
    p1, p2 = r1.base.priority, r2.base.priority
    if p1 is not None and p2 is not None:
        if p1 > p2:
            return STRONGER
        if p1 < p2:
            return WEAKER
    if r1.label == r2.label and p1 == p2:
        return EQUAL
    return INCOMPARABLE


class Status(Enum):
    PRESUMABLY_HOLDS = "presumably-holds"
    DEFEATED = "defeated"
    NOT_DERIVABLE = "not-derivable"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class JustificationNode:
    """One rule application; naf conditions appear as leaf checks with no
    rule label."""

    literal: Literal
    rule_label: Optional[str]
    children: tuple["JustificationNode", ...] = ()

    def labels(self) -> frozenset[str]:
        here = frozenset([self.rule_label]) if self.rule_label else frozenset()
        for child in self.children:
            here |= child.labels()
        return here


@dataclass(frozen=True)
class LabeledConclusion:
    literal: Literal
    status: Status
    defeater: Optional[str] = None
    justification: Optional[JustificationNode] = None
    qualifier: Optional[str] = None

    def __post_init__(self):
        if (self.defeater is not None) != (self.status is Status.DEFEATED):
            raise ValueError("defeater is recorded exactly when status is defeated")


def _combined_kb(kb: KnowledgeBase, rules: tuple[ToulminRule, ...]) -> KnowledgeBase:
    strict = tuple(r for r in kb.rules if r.kind is RuleKind.STRICT)
    bases = tuple(t.base for t in rules)
    return KnowledgeBase(strict, kb.entity_decls, kb.constant_domain).with_rules(bases)


def _model_key(lit: Literal) -> ModelAtom:
    return (lit.sign is not Sign.NEG, lit.atom)


def _build_tree(
    lit: Literal, supports: dict[ModelAtom, SupportRecord]
) -> JustificationNode:
    if lit.sign is Sign.NAF:
        return JustificationNode(lit, None)
    record = supports[_model_key(lit)]
    children = tuple(_build_tree(b, supports) for b in record.body)
    return JustificationNode(lit, record.rule_label, children)


def _application_binding(rule: Rule, record: SupportRecord) -> dict:
    """Recover the grounding substitution of a fired rule instance."""
    binding = match(rule.head.atom, record.head.atom)
    if binding is None:
        raise MvlogicError(f"support record does not fit rule {rule.label}")
    for lit, ground_lit in zip(rule.body, record.body):
        binding = match(lit.atom, ground_lit.atom, binding)
        if binding is None:
            raise MvlogicError(f"support record does not fit rule {rule.label}")
    return binding


def _conjunction_satisfiable(
    conjunction: tuple[Literal, ...],
    model: frozenset[ModelAtom],
    binding: dict,
) -> list[dict]:
    """Bindings extending ``binding`` under which every literal of the
    conjunction holds in the model; naf literals filter."""
    positives = sorted((atom for sign, atom in model if sign), key=str)
    negatives = sorted((atom for sign, atom in model if not sign), key=str)
    solutions = [dict(binding)]
    for lit in conjunction:
        pool = negatives if lit.sign is Sign.NEG else positives
        if lit.sign is Sign.NAF:
            solutions = [
                b
                for b in solutions
                if not any(match(lit.atom, atom, b) is not None for atom in positives)
            ]
        else:
            solutions = [
                extended
                for b in solutions
                for atom in pool
                if (extended := match(lit.atom, atom, b)) is not None
            ]
        if not solutions:
            return []
    return solutions


def _is_undercut(
    rule: ToulminRule, model: frozenset[ModelAtom], binding: dict
) -> bool:
    return any(
        _conjunction_satisfiable(conj, model, binding) for conj in rule.rebuttals
    )


def _applicable_instances(
    rule: ToulminRule, head: Literal, model: frozenset[ModelAtom]
) -> list[dict]:
    """Bindings making the rule derive exactly ``head`` with its body
    satisfied in the model and none of its rebuttals triggered."""
    if rule.base.head.sign is not head.sign:
        return []
    binding = match(rule.base.head.atom, head.atom)
    if binding is None:
        return []
    satisfied = _conjunction_satisfiable(rule.base.body, model, binding)
    return [b for b in satisfied if not _is_undercut(rule, model, b)]


def _strength_sort_key(rule: ToulminRule):
    prio = rule.base.priority if rule.base.priority is not None else -1
    return (rule.base.tier.value, -prio, rule.label)


def conclude(
    kb: KnowledgeBase, rules: tuple[ToulminRule, ...], query: Literal
) -> LabeledConclusion:
    """Qualified status of a ground query under the strict KB plus the
    given Toulmin rules.

    Defeasible rules present inside ``kb`` are ignored; the ``rules``
    argument is the authoritative defeasible layer.
    """
    if not is_ground(query.atom) or query.sign is Sign.NAF:
        raise ValueError("conclude needs a ground, non-naf query")

    by_label = {t.label: t for t in rules}
    combined = _combined_kb(kb, rules)
    model, supports = least_model(ground(combined))

    strict_only = KnowledgeBase(
        tuple(r for r in combined.rules if r.kind is RuleKind.STRICT),
        combined.entity_decls,
        combined.constant_domain,
    )
    strict_model, strict_supports = least_model(ground(strict_only))

    key = _model_key(query)
    if key not in model:
        return LabeledConclusion(query, Status.NOT_DERIVABLE)

    tree = _build_tree(query, supports)
    top_label = tree.rule_label
    top_toulmin = by_label.get(top_label)
    qualifier = top_toulmin.qualifier if top_toulmin else None

    if key in strict_model:
        # Strictly derivable conclusions cannot be defeated by rules.
        strict_tree = _build_tree(query, strict_supports)
        return LabeledConclusion(
            query, Status.PRESUMABLY_HOLDS, justification=strict_tree
        )

    # Undercutting: a rebuttal condition of any used rule is derivable.
    used_toulmin: list[ToulminRule] = []
    for literal, label in _rule_applications(tree):
        used = by_label.get(label)
        if used is None:
            continue
        used_toulmin.append(used)
        binding = _application_binding(used.base, supports[_model_key(literal)])
        if _is_undercut(used, model, binding):
            return LabeledConclusion(
                query,
                Status.DEFEATED,
                defeater=label,
                justification=tree,
                qualifier=qualifier,
            )

    # Rebutting: an applicable contrary rule of stronger or incomparable
    # force derives the complement.
    complement = query.complement()
    if _model_key(complement) in strict_model:
        strict_defeater = strict_supports[_model_key(complement)].rule_label
        return LabeledConclusion(
            query,
            Status.DEFEATED,
            defeater=strict_defeater,
            justification=tree,
            qualifier=qualifier,
        )

    # Rebutting strength is assessed against the weakest defeasible rule in
    # the chain; for single-step chains that is the top rule itself.
    target = top_toulmin
    if target is None and used_toulmin:
        target = max(used_toulmin, key=_strength_sort_key)

    blockers = []
    for contrary in rules:
        if contrary.label == top_label:
            continue
        if not _applicable_instances(contrary, complement, model):
            continue
        ordering = compare_strength(contrary, target) if target else WEAKER
        if ordering in (STRONGER, INCOMPARABLE):
            blockers.append(contrary)

    if blockers:
        defeater = min(blockers, key=_strength_sort_key)
        return LabeledConclusion(
            query,
            Status.DEFEATED,
            defeater=defeater.label,
            justification=tree,
            qualifier=qualifier,
        )

    return LabeledConclusion(
        query,
        Status.PRESUMABLY_HOLDS,
        justification=tree,
        qualifier=qualifier,
    )


def _rule_applications(tree: JustificationNode):
    """All (literal, rule label) applications in the tree, pre-order,
    deduplicated."""
    seen = set()
    stack = [tree]
    while stack:
        node = stack.pop(0)
        if node.rule_label is not None:
            key = (node.literal, node.rule_label)
            if key not in seen:
                seen.add(key)
                yield node.literal, node.rule_label
        stack[0:0] = list(node.children)
