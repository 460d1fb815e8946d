"""Grounding, stratification, and least-model query answering for the
strict Horn fragment with negation as failure.

Classically negated atoms (``neg p``) are kept as a separate atom space:
deriving ``neg p`` never erases ``p``, and conflicts between the two are
the defeasible layer's business, not this module's.  Negation as failure
must be stratified; the unique stratified least model is computed stratum
by stratum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import GroundingError, StratificationError
from .terms import (
    Compound,
    KnowledgeBase,
    Literal,
    Rule,
    RuleKind,
    Sign,
    Substitution,
    Term,
    is_ground,
    match,
)

#: Model atoms are keyed by sign so that p and neg p coexist.
ModelAtom = tuple[bool, Term]  # (positive?, ground atom)


def _model_key(lit: Literal) -> ModelAtom:
    return (lit.sign is not Sign.NEG, lit.atom)


def _nests_compound(term: Term) -> bool:
    if isinstance(term, Compound):
        return any(isinstance(a, Compound) for a in term.args)
    return False


def _check_datalog(rule: Rule) -> None:
    for lit in (rule.head, *rule.body):
        atom = lit.atom
        if isinstance(atom, Compound) and any(_nests_compound(a) for a in atom.args):
            raise GroundingError(
                f"rule {rule.label}: nested compound term would not ground finitely"
            )


def ground(kb: KnowledgeBase) -> tuple[Rule, ...]:
    """All instantiations of the KB's rules over its constant domain.

    Output rules are variable-free and keep their source rule's label.
    Requires the Datalog-like restriction (no compound nested in a
    compound); violations raise GroundingError naming the rule.
    """
    constants = sorted(kb.constant_domain, key=lambda c: c.name)
    out: list[Rule] = []
    seen: set[tuple] = set()
    for rule in kb.rules:
        _check_datalog(rule)
        variables = rule.variables()
        if not variables:
            out.append(rule)
            continue
        for combo in itertools.product(constants, repeat=len(variables)):
            theta = Substitution.of(dict(zip(variables, combo)))
            inst = Rule(
                label=rule.label,
                head=theta.apply_literal(rule.head),
                body=tuple(theta.apply_literal(b) for b in rule.body),
                kind=rule.kind,
                tier=rule.tier,
                priority=rule.priority,
            )
            key = (inst.label, inst.head, inst.body)
            if key not in seen:
                seen.add(key)
                out.append(inst)
    return tuple(out)


# ---------------------------------------------------------------------------
# Stratification
# ---------------------------------------------------------------------------


def _pred_key(lit: Literal) -> str:
    name = lit.predicate
    return f"neg {name}" if lit.sign is Sign.NEG else name


def stratify(rules: Iterable[Rule]) -> list[frozenset[str]]:
    """Predicate strata in evaluation order; raises StratificationError
    (listing the cycle) when a predicate depends on its own negation."""
    rules = tuple(rules)
    preds: set[str] = set()
    pos_edges: dict[str, set[str]] = {}
    neg_edges: dict[str, set[str]] = {}
    for rule in rules:
        head = _pred_key(rule.head)
        preds.add(head)
        for lit in rule.body:
            dep = lit.predicate if lit.sign is Sign.NAF else _pred_key(lit)
            preds.add(dep)
            target = neg_edges if lit.sign is Sign.NAF else pos_edges
            target.setdefault(head, set()).add(dep)

    # Longest-path stratum numbers; a negative cycle makes them diverge.
    stratum = {p: 0 for p in preds}
    for _ in range(len(preds) + 1):
        changed = False
        for head in preds:
            for dep in pos_edges.get(head, ()):
                if stratum[head] < stratum[dep]:
                    stratum[head] = stratum[dep]
                    changed = True
            for dep in neg_edges.get(head, ()):
                if stratum[head] < stratum[dep] + 1:
                    stratum[head] = stratum[dep] + 1
                    changed = True
        if not changed:
            break
    else:
        raise StratificationError(_find_negative_cycle(preds, pos_edges, neg_edges))

    levels = sorted(set(stratum.values()))
    return [frozenset(p for p in preds if stratum[p] == level) for level in levels]


def _find_negative_cycle(preds, pos_edges, neg_edges) -> list[str]:
    """Some cycle containing a negative edge, for error reporting."""
    edges: dict[str, set[str]] = {}
    for src in preds:
        edges[src] = set(pos_edges.get(src, ())) | set(neg_edges.get(src, ()))

    def cycle_from(start: str) -> Optional[list[str]]:
        stack = [(start, [start])]
        while stack:
            node, path = stack.pop()
            for nxt in edges.get(node, ()):
                if nxt == start:
                    return path + [start]
                if nxt not in path:
                    stack.append((nxt, path + [nxt]))
        return None

    for src, targets in neg_edges.items():
        for dep in targets:
            path = cycle_from(dep)
            if path and src in path:
                return path
            # dep reaches back to src: close the loop through the neg edge
            back = _path_between(edges, dep, src)
            if back is not None:
                return [src] + back
    return sorted(preds)


def _path_between(edges, start, goal) -> Optional[list[str]]:
    stack = [(start, [start])]
    seen = {start}
    while stack:
        node, path = stack.pop()
        if node == goal:
            return path
        for nxt in edges.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, path + [nxt]))
    return None


# ---------------------------------------------------------------------------
# Least model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportRecord:
    """How an atom first entered the model: the rule instance that fired."""

    rule_label: str
    head: Literal
    body: tuple[Literal, ...]


def least_model(
    ground_rules: tuple[Rule, ...],
) -> tuple[frozenset[ModelAtom], dict[ModelAtom, SupportRecord]]:
    """Stratified least model of a ground program, plus one support record
    per derived atom (the first rule application that produced it)."""
    strata = stratify(ground_rules)
    level_of: dict[str, int] = {}
    for i, stratum in enumerate(strata):
        for pred in stratum:
            level_of[pred] = i

    model: set[ModelAtom] = set()
    supports: dict[ModelAtom, SupportRecord] = {}

    def satisfied(lit: Literal) -> bool:
        if lit.sign is Sign.NAF:
            return (True, lit.atom) not in model
        return _model_key(lit) in model

    for level in range(len(strata)):
        rules_here = [
            r for r in ground_rules if level_of[_pred_key(r.head)] == level
        ]
        changed = True
        while changed:
            changed = False
            for rule in rules_here:
                key = _model_key(rule.head)
                if key in model:
                    continue
                if all(satisfied(b) for b in rule.body):
                    model.add(key)
                    supports[key] = SupportRecord(rule.label, rule.head, rule.body)
                    changed = True

    return frozenset(model), supports


def derive(kb: KnowledgeBase, query: Literal) -> tuple[Substitution, ...]:
    """All substitutions under which the query holds in the stratified
    least model of the strict rules; empty means not derivable.

    Negative queries (naf or classical) must be ground and answer with a
    single empty substitution when they hold.
    """
    strict = tuple(r for r in kb.rules if r.kind is RuleKind.STRICT)
    model, _ = least_model(ground(KnowledgeBase(strict, kb.entity_decls, kb.constant_domain)))
    return answers_in_model(model, query)


def answers_in_model(
    model: frozenset[ModelAtom], query: Literal
) -> tuple[Substitution, ...]:
    if query.sign in (Sign.NAF, Sign.NEG) and not is_ground(query.atom):
        if query.sign is Sign.NAF:
            raise ValueError("naf queries must be ground")

    if query.sign is Sign.NAF:
        holds = (True, query.atom) not in model
        return (Substitution(),) if holds else ()

    positive = query.sign is Sign.POS
    if is_ground(query.atom):
        holds = (positive, query.atom) in model
        return (Substitution(),) if holds else ()

    found: dict[tuple, Substitution] = {}
    for sign, atom in model:
        if sign is not positive:
            continue
        bound = match(query.atom, atom)
        if bound is not None:
            theta = Substitution.of(bound)
            found.setdefault(theta.pairs, theta)
    return tuple(sorted(found.values(), key=str))


def model_holds(model: frozenset[ModelAtom], lit: Literal) -> bool:
    """Ground literal truth in a model (existential over any variables)."""
    return bool(answers_in_model(model, lit))
