"""First-order syntax shared by every reasoning module.

Naming follows the corpus source conventions: variables start uppercase,
constants and functors are lowercase identifiers, bare integers, or quoted
atoms such as ``'Sir Brian'``.  All values are immutable and hashable, so
knowledge bases can be shared freely between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Union


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return render_name(self.name)


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound terms need at least one argument")

    def __str__(self) -> str:
        return render_name(self.functor) + "(" + ",".join(str(a) for a in self.args) + ")"


Term = Union[Variable, Constant, Compound]
#: An atom is a predicate applied to arguments, or a 0-ary predicate name.
Atom = Union[Compound, Constant]

_BARE_NAME = re.compile(r"^(?:[a-z][A-Za-z0-9_]*|[0-9]+)$")


def render_name(name: str) -> str:
    """Quote a constant/functor name unless it is bare-safe."""
    if _BARE_NAME.match(name):
        return name
    return "'" + name + "'"


def is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    if isinstance(term, Compound):
        return all(is_ground(a) for a in term.args)
    return True


def term_variables(term: Term) -> Iterator[Variable]:
    if isinstance(term, Variable):
        yield term
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_variables(arg)


def functor_arity(atom: Atom) -> tuple[str, int]:
    """Predicate key of an atom: ``(name, arity)``."""
    if isinstance(atom, Compound):
        return atom.functor, len(atom.args)
    return atom.name, 0


class Sign(Enum):
    POS = "pos"
    NAF = "naf"          # negation as failure: "not p"
    NEG = "neg"          # classical negation: "neg p"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """An atom under exactly one sign.

    ``NAF`` and ``NEG`` are distinct and never conflated: ``not p`` holds
    when ``p`` cannot be derived, ``neg p`` only when ``neg p`` itself is
    derived.
    """

    atom: Atom
    sign: Sign = Sign.POS

    def __post_init__(self):
        if isinstance(self.atom, Variable):
            raise ValueError("a literal's atom cannot be a bare variable")

    def __str__(self) -> str:
        if self.sign is Sign.POS:
            return str(self.atom)
        keyword = "not" if self.sign is Sign.NAF else "neg"
        return f"{keyword} {self.atom}"

    @property
    def predicate(self) -> str:
        return functor_arity(self.atom)[0]

    def complement(self) -> "Literal":
        """Classical complement: flips POS and NEG; undefined for NAF."""
        if self.sign is Sign.POS:
            return Literal(self.atom, Sign.NEG)
        if self.sign is Sign.NEG:
            return Literal(self.atom, Sign.POS)
        raise ValueError("naf literals have no classical complement")


class RuleKind(Enum):
    STRICT = "strict"
    DEFEASIBLE = "defeasible"


class Tier(Enum):
    """Entrenchment tiers, strongest first; used to resolve rule defeats."""

    LOGICAL = 0
    PHYSICAL = 1
    ECONOMIC = 2
    LEGAL = 3
    SOCIAL = 4
    CULTURAL = 5
    PERSONAL = 6

    def stronger_than(self, other: "Tier") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        return self.name.lower()


TIER_BY_NAME = {t.name.lower(): t for t in Tier}


@dataclass(frozen=True)
class Rule:
    """A labeled rule ``head :- body`` (or ``head ~> body`` when defeasible).

    A fact is a rule with an empty body.  Heads are positive or classically
    negative, never naf.
    """

    label: str
    head: Literal
    body: tuple[Literal, ...] = ()
    kind: RuleKind = RuleKind.STRICT
    tier: Optional[Tier] = None
    priority: Optional[int] = None

    def __post_init__(self):
        if self.head.sign is Sign.NAF:
            raise ValueError(f"rule {self.label}: head cannot be naf-negative")

    @property
    def is_fact(self) -> bool:
        return not self.body

    def variables(self) -> tuple[Variable, ...]:
        seen: dict[Variable, None] = {}
        for lit in (self.head, *self.body):
            for v in term_variables(lit.atom):
                seen.setdefault(v)
        return tuple(seen)

    def constants(self) -> Iterator[Constant]:
        for lit in (self.head, *self.body):
            yield from _term_constants(lit.atom)


def _term_constants(term: Term) -> Iterator[Constant]:
    if isinstance(term, Constant):
        yield term
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from _term_constants(arg)


@dataclass(frozen=True)
class KnowledgeBase:
    """Rules plus entity declarations over a finite constant domain."""

    rules: tuple[Rule, ...] = ()
    entity_decls: tuple[tuple[str, tuple[Constant, ...]], ...] = ()
    constant_domain: frozenset[Constant] = frozenset()

    def __post_init__(self):
        labels = [r.label for r in self.rules]
        dup = _first_duplicate(labels)
        if dup is not None:
            raise ValueError(f"duplicate rule label: {dup}")
        mentioned = set()
        for rule in self.rules:
            mentioned.update(rule.constants())
        for _, instances in self.entity_decls:
            mentioned.update(instances)
        if not mentioned <= self.constant_domain:
            missing = sorted(str(c) for c in mentioned - self.constant_domain)
            raise ValueError("constants outside domain: " + ", ".join(missing))

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def strict_rules(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind is RuleKind.STRICT)

    def facts(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.is_fact)

    def predicates(self) -> frozenset[str]:
        names = set()
        for rule in self.rules:
            names.add(rule.head.predicate)
            for lit in rule.body:
                names.add(lit.predicate)
        return frozenset(names)

    def with_rules(self, extra: tuple[Rule, ...]) -> "KnowledgeBase":
        """A new KB with ``extra`` appended; the domain grows as needed."""
        new_constants = set(self.constant_domain)
        for rule in extra:
            new_constants.update(rule.constants())
        return KnowledgeBase(
            rules=self.rules + tuple(extra),
            entity_decls=self.entity_decls,
            constant_domain=frozenset(new_constants),
        )

    def without_rules(self, labels) -> "KnowledgeBase":
        dropped = set(labels)
        return KnowledgeBase(
            rules=tuple(r for r in self.rules if r.label not in dropped),
            entity_decls=self.entity_decls,
            constant_domain=self.constant_domain,
        )


def _first_duplicate(items):
    seen = set()
    for item in items:
        if item in seen:
            return item
        seen.add(item)
    return None


@dataclass(frozen=True)
class Substitution:
    """An idempotent variable binding map (occurs check enforced by unify)."""

    pairs: tuple[tuple[Variable, Term], ...] = ()
    _map: Mapping[Variable, Term] = field(
        default=None, compare=False, repr=False, hash=False
    )

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.pairs))

    @staticmethod
    def of(mapping: Mapping[Variable, Term]) -> "Substitution":
        pairs = tuple(sorted(mapping.items(), key=lambda kv: kv[0].name))
        return Substitution(pairs)

    def get(self, var: Variable) -> Optional[Term]:
        return self._map.get(var)

    def apply(self, term: Term) -> Term:
        if isinstance(term, Variable):
            return self._map.get(term, term)
        if isinstance(term, Compound):
            return Compound(term.functor, tuple(self.apply(a) for a in term.args))
        return term

    def apply_literal(self, lit: Literal) -> Literal:
        return Literal(self.apply(lit.atom), lit.sign)

    def __len__(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        if not self.pairs:
            return "{}"
        return "{" + ", ".join(f"{v} -> {t}" for v, t in self.pairs) + "}"


EMPTY_SUBSTITUTION = Substitution()


def unify(t1: Term, t2: Term) -> Optional[Substitution]:
    """Most general unifier of two terms, or None when none exists.

    The result is idempotent and the occurs check is enforced, so no
    variable is ever bound to a term containing itself.
    """
    bindings: dict[Variable, Term] = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Variable) and t in bindings:
            t = bindings[t]
        return t

    def occurs(var: Variable, t: Term) -> bool:
        t = walk(t)
        if t == var:
            return True
        if isinstance(t, Compound):
            return any(occurs(var, a) for a in t.args)
        return False

    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a), walk(b)
        if a == b:
            continue
        if isinstance(a, Variable):
            if occurs(a, b):
                return None
            bindings[a] = b
        elif isinstance(b, Variable):
            if occurs(b, a):
                return None
            bindings[b] = a
        elif (
            isinstance(a, Compound)
            and isinstance(b, Compound)
            and a.functor == b.functor
            and len(a.args) == len(b.args)
        ):
            stack.extend(zip(a.args, b.args))
        else:
            return None

    def resolve(t: Term) -> Term:
        t = walk(t)
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(resolve(a) for a in t.args))
        return t

    return Substitution.of({v: resolve(t) for v, t in bindings.items()})


def match(pattern: Term, ground: Term, bindings: Optional[dict] = None) -> Optional[dict]:
    """One-sided unification: bind pattern variables against a ground term.

    Extends ``bindings`` (not mutated) and returns the extended map, or
    None when the pattern does not cover the term.
    """
    out = dict(bindings) if bindings else {}

    def go(p: Term, g: Term) -> bool:
        if isinstance(p, Variable):
            bound = out.get(p)
            if bound is None:
                out[p] = g
                return True
            return bound == g
        if isinstance(p, Constant):
            return p == g
        if isinstance(p, Compound):
            return (
                isinstance(g, Compound)
                and g.functor == p.functor
                and len(g.args) == len(p.args)
                and all(go(pa, ga) for pa, ga in zip(p.args, g.args))
            )
        return False

    return out if go(pattern, ground) else None
