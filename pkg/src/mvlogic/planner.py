"""State-space planning with add/delete effects.

A state is a set of ground fluents; executing an action removes its delete
list and adds its add list, so every untouched fluent persists (which is
the whole treatment of the frame problem here).  Search is breadth-first
over ground states with lexicographic tie-breaking on ground-action order,
so the returned plan is the deterministic shortest one.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import BoundExceededError, MvlogicError, PreconditionError
from .modal import Trace
from .terms import (
    Constant,
    Literal,
    Sign,
    Substitution,
    Term,
    Variable,
    is_ground,
    match,
    term_variables,
)

STATE_SPACE_LIMIT = 10**6


@dataclass(frozen=True)
class FluentState:
    fluents: frozenset[Term]

    def __post_init__(self):
        object.__setattr__(self, "fluents", frozenset(self.fluents))
        for atom in self.fluents:
            if not is_ground(atom):
                raise ValueError(f"fluent must be ground: {atom}")

    def __contains__(self, atom: Term) -> bool:
        return atom in self.fluents

    def __iter__(self):
        return iter(sorted(self.fluents, key=str))


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[Constant, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}(" + ",".join(str(a) for a in self.args) + ")"

    def sort_key(self):
        return (self.name, tuple(a.name for a in self.args))


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class ActionSchema:
    """Typed parameters, a precondition conjunction (positive and naf
    literals), and ground-instantiating add/delete lists.

    Precondition-only variables are legal; they are bound by matching the
    state, and effect variables must come from the parameters or the
    preconditions.
    """

    name: str
    params: tuple[tuple[Variable, str], ...]
    preconditions: tuple[Literal, ...] = ()
    adds: tuple[Term, ...] = ()
    deletes: tuple[Term, ...] = ()

    def __post_init__(self):
        known = {v for v, _ in self.params}
        for lit in self.preconditions:
            if lit.sign is Sign.NEG:
                raise ValueError(
                    f"action {self.name}: states hold positive fluents only, "
                    "use naf in preconditions"
                )
            known.update(term_variables(lit.atom))
        for atom in (*self.adds, *self.deletes):
            free = set(term_variables(atom)) - known
            if free:
                names = ", ".join(sorted(v.name for v in free))
                raise ValueError(
                    f"action {self.name}: effect variables not bound anywhere: {names}"
                )


@dataclass(frozen=True)
class PlanningDomain:
    """A parsed planning section: object sorts, schemas, and optional
    initial state and goal."""

    sorts: tuple[tuple[str, tuple[Constant, ...]], ...] = ()
    schemas: tuple[ActionSchema, ...] = ()
    init: Optional[FluentState] = None
    goal: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class PlanningProblem:
    initial: FluentState
    goal: tuple[Literal, ...]
    schemas: tuple[ActionSchema, ...]
    objects: Mapping[str, tuple[Constant, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "objects", dict(self.objects))


def problem_from_domain(
    domain: PlanningDomain,
    init: Optional[FluentState] = None,
    goal: Optional[tuple[Literal, ...]] = None,
) -> PlanningProblem:
    initial = init if init is not None else domain.init
    wanted = goal if goal is not None else domain.goal
    if initial is None:
        raise MvlogicError("planning domain declares no initial state")
    if not wanted:
        raise MvlogicError("planning problem has no goal")
    return PlanningProblem(initial, tuple(wanted), domain.schemas, dict(domain.sorts))


# ---------------------------------------------------------------------------
# Matching and application
# ---------------------------------------------------------------------------


def solve_conjunction(
    literals, fluents: frozenset[Term], seed: Optional[dict] = None
) -> tuple[list[dict], Optional[Literal]]:
    """All bindings satisfying the conjunction against a fluent set, plus
    the first literal at which the solution set died (None on success)."""
    atoms = sorted(fluents, key=str)
    solutions = [dict(seed) if seed else {}]
    for lit in literals:
        if lit.sign is Sign.NEG:
            raise MvlogicError(
                f"states hold positive fluents only; use naf instead of: {lit}"
            )
        if lit.sign is Sign.NAF:
            solutions = [
                b
                for b in solutions
                if not any(match(lit.atom, a, b) is not None for a in atoms)
            ]
        else:
            solutions = [
                extended
                for b in solutions
                for a in atoms
                if (extended := match(lit.atom, a, b)) is not None
            ]
        if not solutions:
            return [], lit
    return solutions, None


def goal_satisfied(goal, state: FluentState) -> bool:
    solutions, _ = solve_conjunction(goal, state.fluents)
    return bool(solutions)


def _schema_for(action: GroundAction, schemas) -> ActionSchema:
    for schema in schemas:
        if schema.name == action.name and len(schema.params) == len(action.args):
            return schema
    raise MvlogicError(f"no action schema matches {action}")


def _effects(
    schema: ActionSchema, action: GroundAction, state: FluentState
) -> tuple[Optional[tuple[frozenset[Term], frozenset[Term]]], Optional[Literal]]:
    """(adds, deletes) for the action in the state, or the violated literal."""
    seed = {var: arg for (var, _), arg in zip(schema.params, action.args)}
    solutions, failed = solve_conjunction(schema.preconditions, state.fluents, seed)
    if not solutions:
        return None, failed
    outcomes = set()
    for binding in solutions:
        theta = Substitution.of(binding)
        adds = frozenset(theta.apply(a) for a in schema.adds)
        deletes = frozenset(theta.apply(d) for d in schema.deletes)
        outcomes.add((adds, deletes))
    if len(outcomes) > 1:
        raise MvlogicError(
            f"action {action} has ambiguous effects; preconditions underconstrain it"
        )
    adds, deletes = next(iter(outcomes))
    if adds & deletes:
        raise ValueError(
            f"action {action} instantiates overlapping add and delete lists"
        )
    return (adds, deletes), None


def apply_action(
    state: FluentState, action: GroundAction, schemas
) -> FluentState:
    """Successor state ``(state - deletes) | adds``; fluents not mentioned
    by the action persist unchanged.  Raises PreconditionError naming the
    first violated literal when the action does not apply."""
    schema = _schema_for(action, schemas)
    effects, failed = _effects(schema, action, state)
    if effects is None:
        raise PreconditionError(
            f"action {action} not applicable: precondition {failed} fails"
        )
    adds, deletes = effects
    return FluentState((state.fluents - deletes) | adds)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def ground_actions(problem: PlanningProblem) -> tuple[tuple[GroundAction, ActionSchema], ...]:
    """Every sort-respecting instantiation, lexicographically ordered."""
    out = []
    for schema in problem.schemas:
        pools = []
        for _, sort in schema.params:
            if sort not in problem.objects:
                raise MvlogicError(f"action {schema.name}: unknown sort {sort}")
            pools.append(sorted(problem.objects[sort], key=lambda c: c.name))
        for combo in itertools.product(*pools):
            out.append((GroundAction(schema.name, tuple(combo)), schema))
    out.sort(key=lambda pair: pair[0].sort_key())
    return tuple(out)


def _successor(
    state: FluentState, action: GroundAction, schema: ActionSchema
) -> Optional[FluentState]:
    try:
        effects, _ = _effects(schema, action, state)
    except ValueError:
        return None  # degenerate instantiation (overlapping effects)
    if effects is None:
        return None
    adds, deletes = effects
    return FluentState((state.fluents - deletes) | adds)


def plan_search(problem: PlanningProblem) -> Optional[Plan]:
    """Shortest plan by breadth-first search over ground states, or None
    when the goal is unreachable; ties break on lexicographic ground-action
    order.  Exploration is capped at 10^6 states."""
    if goal_satisfied(problem.goal, problem.initial):
        return Plan(())
    actions = ground_actions(problem)
    visited = {problem.initial}
    queue: deque[tuple[FluentState, tuple[GroundAction, ...]]] = deque()
    queue.append((problem.initial, ()))
    while queue:
        state, path = queue.popleft()
        for action, schema in actions:
            nxt = _successor(state, action, schema)
            if nxt is None or nxt in visited:
                continue
            steps = path + (action,)
            if goal_satisfied(problem.goal, nxt):
                return Plan(steps)
            visited.add(nxt)
            if len(visited) > STATE_SPACE_LIMIT:
                raise BoundExceededError(
                    f"state space exceeds the search bound of {STATE_SPACE_LIMIT}"
                )
            queue.append((nxt, steps))
    return None


def replay(
    problem: PlanningProblem, plan: Plan
) -> tuple[bool, Optional[int], list[FluentState]]:
    """Step the plan from the initial state.

    Returns (ok, failing step index, visited states).  A precondition
    failure reports the offending step; an unmet goal after the last step
    reports index len(plan).
    """
    states = [problem.initial]
    current = problem.initial
    for i, action in enumerate(plan.steps):
        try:
            current = apply_action(current, action, problem.schemas)
        except PreconditionError:
            return False, i, states
        states.append(current)
    if not goal_satisfied(problem.goal, current):
        return False, len(plan.steps), states
    return True, None, states


def validate_plan(problem: PlanningProblem, plan: Plan) -> bool:
    """True iff every step applies in sequence and the final state
    satisfies the goal."""
    ok, _, _ = replay(problem, plan)
    return ok


def trace_states(problem: PlanningProblem, plan: Plan) -> Trace:
    """The len(plan)+1 visited states as a trace for temporal checking."""
    ok, index, states = replay(problem, plan)
    if not ok:
        raise PreconditionError(f"plan invalid at step {index}")
    return Trace(tuple(states))
