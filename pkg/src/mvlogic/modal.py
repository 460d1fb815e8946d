"""Finite Kripke-structure model checking plus linear temporal evaluation
over finite traces.

Four operator families share one formula AST: necessity/possibility
(``box``/``dia`` over the alethic relation), obligation/permission/
prohibition (``ob``/``pm``/``fb`` over the deontic relation), belief
(``bel(agent)`` over one relation per agent), and future/past temporal
operators (``always``/``eventually``/``hist``/``past``), which are only
meaningful on traces.  No frame conditions are imposed on any relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Tuple, Union

from .errors import MvlogicError
from .terms import Term, is_ground, match

ALETHIC = "alethic"
DEONTIC = "deontic"

#: Relation keys: "alethic", "deontic", or ("belief", agent).
ModalityKey = Union[str, Tuple[str, str]]


def belief_key(agent: str) -> ModalityKey:
    return ("belief", agent)


def render_modality(key: ModalityKey) -> str:
    if isinstance(key, tuple):
        return f"{key[0]}({key[1]})"
    return key


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------


class Formula:
    """Marker base class for formula nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    """A ground atom, or a pattern with variables matched against the
    atoms true at a world/state (variables are read existentially)."""

    pattern: Term


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True)
class Dia(Formula):
    sub: Formula


@dataclass(frozen=True)
class Ob(Formula):
    sub: Formula


@dataclass(frozen=True)
class Pm(Formula):
    sub: Formula


@dataclass(frozen=True)
class Fb(Formula):
    sub: Formula


@dataclass(frozen=True)
class Bel(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Always(Formula):
    sub: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    sub: Formula


@dataclass(frozen=True)
class Hist(Formula):
    sub: Formula


@dataclass(frozen=True)
class Past(Formula):
    sub: Formula


_TEMPORAL = (Always, Eventually, Hist, Past)
_WORLD_MODAL = (Box, Dia, Ob, Pm, Fb, Bel)


def render_formula(f: Formula) -> str:
    """Prefix mini-syntax, e.g. ``(ob attend)``, ``(bel alice p)``."""
    if isinstance(f, Atom):
        return str(f.pattern)
    if isinstance(f, Not):
        return f"(not {render_formula(f.sub)})"
    if isinstance(f, And):
        return f"(and {render_formula(f.left)} {render_formula(f.right)})"
    if isinstance(f, Or):
        return f"(or {render_formula(f.left)} {render_formula(f.right)})"
    if isinstance(f, Implies):
        return f"(implies {render_formula(f.left)} {render_formula(f.right)})"
    if isinstance(f, Bel):
        return f"(bel {f.agent} {render_formula(f.sub)})"
    name = type(f).__name__.lower()
    return f"({name} {render_formula(f.sub)})"


def parse_formula(text: str) -> Formula:
    """Parse the prefix mini-syntax; see the package grammar reference."""
    from .parser import parse_formula_text

    return parse_formula_text(text)


# ---------------------------------------------------------------------------
# Models and traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KripkeModel:
    """Finite worlds, one labeled accessibility relation per modality, and
    a per-world valuation of ground atoms."""

    worlds: frozenset[str]
    relations: Mapping[ModalityKey, frozenset[tuple[str, str]]]
    valuation: Mapping[str, frozenset[Term]]

    def __post_init__(self):
        relations = {k: frozenset(v) for k, v in dict(self.relations).items()}
        valuation = {w: frozenset(v) for w, v in dict(self.valuation).items()}
        for w in self.worlds:
            valuation.setdefault(w, frozenset())
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "valuation", valuation)
        for key, pairs in relations.items():
            for a, b in pairs:
                if a not in self.worlds or b not in self.worlds:
                    raise ValueError(
                        f"relation {render_modality(key)} mentions undeclared world"
                    )
        stray = set(valuation) - set(self.worlds)
        if stray:
            raise ValueError("valuation for undeclared worlds: " + ", ".join(sorted(stray)))
        for atoms in valuation.values():
            for atom in atoms:
                if not is_ground(atom):
                    raise ValueError(f"valuation atom not ground: {atom}")

    def successors(self, key: ModalityKey, world: str) -> frozenset[str]:
        if key not in self.relations:
            raise MvlogicError(f"no relation declared for modality {render_modality(key)}")
        return frozenset(b for a, b in self.relations[key] if a == world)


@dataclass(frozen=True)
class Trace:
    """A nonempty sequence of states, each a set of ground atoms.

    Accepts planner states (anything with a ``fluents`` attribute) or raw
    atom iterables; both normalize to frozensets.
    """

    states: tuple[frozenset[Term], ...]

    def __post_init__(self):
        normalized = tuple(
            frozenset(getattr(s, "fluents", s)) for s in self.states
        )
        if not normalized:
            raise ValueError("a trace needs at least one state")
        object.__setattr__(self, "states", normalized)

    def __len__(self) -> int:
        return len(self.states)


def atom_holds(pattern: Term, atoms: Iterable[Term]) -> bool:
    """True when some atom in the set matches the pattern."""
    if is_ground(pattern):
        return pattern in set(atoms)
    return any(match(pattern, a) is not None for a in atoms)


def eval_boolean(f: Formula, atoms: frozenset[Term]) -> bool:
    """Evaluate the propositional fragment against one atom set."""
    if isinstance(f, Atom):
        return atom_holds(f.pattern, atoms)
    if isinstance(f, Not):
        return not eval_boolean(f.sub, atoms)
    if isinstance(f, And):
        return eval_boolean(f.left, atoms) and eval_boolean(f.right, atoms)
    if isinstance(f, Or):
        return eval_boolean(f.left, atoms) or eval_boolean(f.right, atoms)
    if isinstance(f, Implies):
        return (not eval_boolean(f.left, atoms)) or eval_boolean(f.right, atoms)
    raise MvlogicError(f"not a propositional formula: {render_formula(f)}")


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


def check_world(model: KripkeModel, world: str, f: Formula) -> bool:
    """Standard Kripke semantics at one world.

    ``box``/``dia`` quantify over alethic successors, ``ob``/``pm``/``fb``
    over deontic ones (``fb p`` = ``ob (not p)``), ``bel(a)`` over agent
    ``a``'s belief successors.  Temporal operators are rejected here; they
    belong to traces.
    """
    if world not in model.worlds:
        raise MvlogicError(f"unknown world: {world}")
    if isinstance(f, Atom):
        return atom_holds(f.pattern, model.valuation[world])
    if isinstance(f, Not):
        return not check_world(model, world, f.sub)
    if isinstance(f, And):
        return check_world(model, world, f.left) and check_world(model, world, f.right)
    if isinstance(f, Or):
        return check_world(model, world, f.left) or check_world(model, world, f.right)
    if isinstance(f, Implies):
        return (not check_world(model, world, f.left)) or check_world(model, world, f.right)
    if isinstance(f, Box):
        return all(check_world(model, v, f.sub) for v in model.successors(ALETHIC, world))
    if isinstance(f, Dia):
        return any(check_world(model, v, f.sub) for v in model.successors(ALETHIC, world))
    if isinstance(f, Ob):
        return all(check_world(model, v, f.sub) for v in model.successors(DEONTIC, world))
    if isinstance(f, Pm):
        return any(check_world(model, v, f.sub) for v in model.successors(DEONTIC, world))
    if isinstance(f, Fb):
        return all(
            not check_world(model, v, f.sub) for v in model.successors(DEONTIC, world)
        )
    if isinstance(f, Bel):
        return all(
            check_world(model, v, f.sub)
            for v in model.successors(belief_key(f.agent), world)
        )
    if isinstance(f, _TEMPORAL):
        raise MvlogicError(
            f"temporal operator in world-checking mode: {render_formula(f)}"
        )
    raise MvlogicError(f"unknown formula node: {f!r}")


def check_trace(trace: Trace, position: int, f: Formula) -> bool:
    """Finite-trace semantics at a 0-based position.

    ``eventually``/``always`` quantify over positions >= i, ``past``/``hist``
    over positions <= i; atoms are read from the state at i.
    """
    if not 0 <= position < len(trace):
        raise MvlogicError(f"trace position out of range: {position}")
    if isinstance(f, Atom):
        return atom_holds(f.pattern, trace.states[position])
    if isinstance(f, Not):
        return not check_trace(trace, position, f.sub)
    if isinstance(f, And):
        return check_trace(trace, position, f.left) and check_trace(trace, position, f.right)
    if isinstance(f, Or):
        return check_trace(trace, position, f.left) or check_trace(trace, position, f.right)
    if isinstance(f, Implies):
        return (not check_trace(trace, position, f.left)) or check_trace(
            trace, position, f.right
        )
    if isinstance(f, Always):
        return all(check_trace(trace, j, f.sub) for j in range(position, len(trace)))
    if isinstance(f, Eventually):
        return any(check_trace(trace, j, f.sub) for j in range(position, len(trace)))
    if isinstance(f, Hist):
        return all(check_trace(trace, j, f.sub) for j in range(position + 1))
    if isinstance(f, Past):
        return any(check_trace(trace, j, f.sub) for j in range(position + 1))
    if isinstance(f, _WORLD_MODAL):
        raise MvlogicError(f"world modality in trace mode: {render_formula(f)}")
    raise MvlogicError(f"unknown formula node: {f!r}")


# ---------------------------------------------------------------------------
# Dual normalization
# ---------------------------------------------------------------------------


def _neg(f: Formula) -> Formula:
    """Negate with double-negation collapse."""
    if isinstance(f, Not):
        return f.sub
    return Not(f)


def dual_normalize(f: Formula) -> Formula:
    """Rewrite into the universal core {box, ob, bel, always, hist, not,
    and, atoms}; the result is equivalent at every world and trace position.

    Existential operators become negated universals (``dia p`` ->
    ``not box not p``), ``fb p`` becomes ``ob (not p)``, and double
    negations collapse.
    """
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return _neg(dual_normalize(f.sub))
    if isinstance(f, And):
        return And(dual_normalize(f.left), dual_normalize(f.right))
    if isinstance(f, Or):
        return _neg(And(_neg(dual_normalize(f.left)), _neg(dual_normalize(f.right))))
    if isinstance(f, Implies):
        return _neg(And(dual_normalize(f.left), _neg(dual_normalize(f.right))))
    if isinstance(f, Box):
        return Box(dual_normalize(f.sub))
    if isinstance(f, Dia):
        return _neg(Box(_neg(dual_normalize(f.sub))))
    if isinstance(f, Ob):
        return Ob(dual_normalize(f.sub))
    if isinstance(f, Pm):
        return _neg(Ob(_neg(dual_normalize(f.sub))))
    if isinstance(f, Fb):
        return Ob(_neg(dual_normalize(f.sub)))
    if isinstance(f, Bel):
        return Bel(f.agent, dual_normalize(f.sub))
    if isinstance(f, Always):
        return Always(dual_normalize(f.sub))
    if isinstance(f, Eventually):
        return _neg(Always(_neg(dual_normalize(f.sub))))
    if isinstance(f, Hist):
        return Hist(dual_normalize(f.sub))
    if isinstance(f, Past):
        return _neg(Hist(_neg(dual_normalize(f.sub))))
    raise MvlogicError(f"unknown formula node: {f!r}")
