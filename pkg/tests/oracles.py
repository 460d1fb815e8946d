"""Independent reference implementations used only to check the engines.

Each oracle deliberately takes a different algorithmic route from the
module it certifies: stable models by reduct-and-enumerate instead of
stratified iteration, argumentation semantics from first principles over
the powerset, and the monkey world as a four-slot tuple machine instead
of fluent sets.
"""

from collections import deque
from itertools import product

from mvlogic.terms import Literal, Sign

# ---------------------------------------------------------------------------
# Stable-model oracle for the derivation engine
# ---------------------------------------------------------------------------


def _key(lit: Literal):
    return (lit.sign is not Sign.NEG, lit.atom)


def _atom_space(ground_rules):
    atoms = set()
    for rule in ground_rules:
        atoms.add(_key(rule.head))
        for lit in rule.body:
            atoms.add((True, lit.atom) if lit.sign is Sign.NAF else _key(lit))
    return sorted(atoms, key=str)


def _reduct_least_model(ground_rules, candidate):
    """Least model of the reduct of the program w.r.t. the candidate set."""
    reduct = []
    for rule in ground_rules:
        keep = True
        positives = []
        for lit in rule.body:
            if lit.sign is Sign.NAF:
                if (True, lit.atom) in candidate:
                    keep = False
                    break
            else:
                positives.append(_key(lit))
        if keep:
            reduct.append((_key(rule.head), positives))
    model = set()
    changed = True
    while changed:
        changed = False
        for head, body in reduct:
            if head not in model and all(b in model for b in body):
                model.add(head)
                changed = True
    return frozenset(model)


def stable_models(ground_rules):
    """All stable models by exhaustive candidate enumeration; a stratified
    program has exactly one, the stratified least model."""
    space = _atom_space(ground_rules)
    found = []
    for bits in product((False, True), repeat=len(space)):
        candidate = frozenset(a for a, keep in zip(space, bits) if keep)
        if _reduct_least_model(ground_rules, candidate) == candidate:
            found.append(candidate)
    return found


# ---------------------------------------------------------------------------
# Argumentation from first principles
# ---------------------------------------------------------------------------


def subsets(items):
    items = sorted(items)
    for bits in product((False, True), repeat=len(items)):
        yield frozenset(i for i, keep in zip(items, bits) if keep)


def naive_conflict_free(args, attacks, subset):
    return not any(a in subset and b in subset for a, b in attacks)


def naive_defends(args, attacks, subset, argument):
    for attacker, target in attacks:
        if target != argument:
            continue
        if not any((member, attacker) in attacks for member in subset):
            return False
    return True


def naive_admissible(args, attacks):
    return [
        s
        for s in subsets(args)
        if naive_conflict_free(args, attacks, s)
        and all(naive_defends(args, attacks, s, member) for member in s)
    ]


def naive_complete(args, attacks):
    out = []
    for s in naive_admissible(args, attacks):
        defended = {a for a in args if naive_defends(args, attacks, s, a)}
        if defended == set(s):
            out.append(s)
    return out


def naive_grounded(args, attacks):
    complete = naive_complete(args, attacks)
    return min(complete, key=len) if complete else frozenset()


# ---------------------------------------------------------------------------
# The monkey world as a four-slot tuple machine
# ---------------------------------------------------------------------------

LOCATIONS = ("at_center", "at_door", "at_window")
HEIGHTS = ("on_ground", "on_box")
BANANA = ("has_banana", "no_banana")


def monkey_states():
    """Every (monkey loc, height, box loc, banana) combination."""
    return [
        (m, h, b, f)
        for m in LOCATIONS
        for h in HEIGHTS
        for b in LOCATIONS
        for f in BANANA
    ]


def monkey_moves(state):
    """Applicable (action name, args, successor) triples, per the four
    transition shapes of the classic puzzle."""
    monkey, height, box, banana = state
    moves = []
    if monkey == "at_center" and height == "on_box" and box == "at_center" and banana == "no_banana":
        moves.append(("get_banana", (), (monkey, height, box, "has_banana")))
    if height == "on_ground" and monkey == box:
        moves.append(("climb_box", (), (monkey, "on_box", box, banana)))
    if height == "on_ground" and monkey == box:
        for dest in LOCATIONS:
            if dest != monkey:
                moves.append(("push_box", (monkey, dest), (dest, height, dest, banana)))
    if height == "on_ground":
        for dest in LOCATIONS:
            if dest != monkey:
                moves.append(("walk", (monkey, dest), (dest, height, box, banana)))
    return moves


def monkey_shortest_plan(initial):
    """Breadth-first shortest action sequence to has_banana, or None."""
    if initial[3] == "has_banana":
        return []
    queue = deque([(initial, [])])
    seen = {initial}
    while queue:
        state, path = queue.popleft()
        for name, args, nxt in sorted(monkey_moves(state)):
            if nxt in seen:
                continue
            steps = path + [(name, args)]
            if nxt[3] == "has_banana":
                return steps
            seen.add(nxt)
            queue.append((nxt, steps))
    return None
