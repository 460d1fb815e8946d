"""Abstract argumentation frameworks and their extension semantics.

Two independent routes are provided on purpose: the grounded extension via
least fixpoint of the characteristic function, and every semantics via
exhaustive subset enumeration.  ``cross_check_grounded`` runs both and
insists they agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BoundExceededError, MvlogicError

BRUTE_FORCE_LIMIT = 20

CONFLICT_FREE = "conflict-free"
ADMISSIBLE = "admissible"
COMPLETE = "complete"
GROUNDED = "grounded"
PREFERRED = "preferred"
STABLE = "stable"

SEMANTICS = (CONFLICT_FREE, ADMISSIBLE, COMPLETE, GROUNDED, PREFERRED, STABLE)


@dataclass(frozen=True)
class ArgFramework:
    args: frozenset[str]
    attacks: frozenset[tuple[str, str]]

    def __post_init__(self):
        for a, b in self.attacks:
            if a not in self.args or b not in self.args:
                raise ValueError(f"attack ({a}, {b}) mentions an undeclared argument")

    def attackers(self, arg: str) -> frozenset[str]:
        return frozenset(a for a, b in self.attacks if b == arg)

    def targets(self, arg: str) -> frozenset[str]:
        return frozenset(b for a, b in self.attacks if a == arg)


@dataclass(frozen=True)
class Extension:
    members: frozenset[str]
    semantics: str


def char_fn(af: ArgFramework, subset: frozenset[str]) -> frozenset[str]:
    """The arguments defended by ``subset``: every attacker is counter-attacked."""
    attacked_by_subset = set()
    for member in subset:
        attacked_by_subset.update(af.targets(member))
    return frozenset(
        a for a in af.args if af.attackers(a) <= attacked_by_subset
    )


def conflict_free(af: ArgFramework, subset: frozenset[str]) -> bool:
    return not any(a in subset and b in subset for a, b in af.attacks)


def grounded_fixpoint(af: ArgFramework) -> frozenset[str]:
    """Least fixpoint of the characteristic function, iterated from the
    empty set; stabilizes within |args| steps."""
    current: frozenset[str] = frozenset()
    for _ in range(len(af.args) + 1):
        nxt = char_fn(af, current)
        if nxt == current:
            return current
        current = nxt
    raise MvlogicError("characteristic-function iteration failed to stabilize")


def _subsets(af: ArgFramework):
    members = sorted(af.args)
    for r in range(len(members) + 1):
        for combo in itertools.combinations(members, r):
            yield frozenset(combo)


def _admissible_sets(af: ArgFramework) -> list[frozenset[str]]:
    return [
        s for s in _subsets(af) if conflict_free(af, s) and s <= char_fn(af, s)
    ]


def grounded_by_enumeration(af: ArgFramework) -> frozenset[str]:
    """Brute-force oracle: the unique subset-minimal complete extension."""
    complete = [
        s for s in _subsets(af) if conflict_free(af, s) and s == char_fn(af, s)
    ]
    minimal = [s for s in complete if not any(o < s for o in complete)]
    if len(minimal) != 1:
        raise MvlogicError("grounded extension is not unique; framework is malformed")
    return minimal[0]


def cross_check_grounded(af: ArgFramework) -> frozenset[str]:
    """Compute grounded by both routes and fail loudly on disagreement."""
    fast = grounded_fixpoint(af)
    slow = grounded_by_enumeration(af)
    if fast != slow:
        raise MvlogicError(
            f"grounded mismatch: fixpoint {sorted(fast)} vs enumeration {sorted(slow)}"
        )
    return fast


def extensions(af: ArgFramework, semantics: str) -> tuple[Extension, ...]:
    """All extensions under the named semantics, sorted by size then member
    order.  Brute-force semantics are bounded at |args| <= 20."""
    if semantics not in SEMANTICS:
        raise MvlogicError(f"unknown semantics: {semantics}")
    if semantics == GROUNDED:
        found = [grounded_fixpoint(af)]
    else:
        if len(af.args) > BRUTE_FORCE_LIMIT:
            raise BoundExceededError(
                f"{len(af.args)} arguments exceeds the enumeration bound of {BRUTE_FORCE_LIMIT}"
            )
        if semantics == CONFLICT_FREE:
            found = [s for s in _subsets(af) if conflict_free(af, s)]
        elif semantics == ADMISSIBLE:
            found = _admissible_sets(af)
        elif semantics == COMPLETE:
            found = [
                s for s in _subsets(af) if conflict_free(af, s) and s == char_fn(af, s)
            ]
        elif semantics == PREFERRED:
            admissible = _admissible_sets(af)
            found = [s for s in admissible if not any(s < o for o in admissible)]
        else:  # stable: conflict-free and attacks every outside argument
            found = [
                s
                for s in _subsets(af)
                if conflict_free(af, s)
                and all(
                    any((m, outside) in af.attacks for m in s)
                    for outside in af.args - s
                )
            ]
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    return tuple(Extension(s, semantics) for s in ordered)
