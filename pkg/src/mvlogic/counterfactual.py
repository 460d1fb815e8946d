"""Counterfactual evaluation over a finite world set with an integer
similarity ranking centered on the actual world.

``would(A, B)`` holds when the closest A-worlds all satisfy B (vacuously
when no A-world exists); ``might`` is its existential dual; ``but_for``
is the causation test: A caused B when, at the closest worlds without A,
B fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import PreconditionError
from .modal import Formula, Not, eval_boolean, render_formula
from .terms import Term


@dataclass(frozen=True)
class SimilarityModel:
    """Worlds with valuations and a distance-from-actual rank.

    Strong centering is enforced: the actual world has rank 0 and is the
    only world with rank 0.  Ranks need not be contiguous.
    """

    worlds: frozenset[str]
    valuation: Mapping[str, frozenset[Term]]
    actual: str
    rank: Mapping[str, int]

    def __post_init__(self):
        valuation = {w: frozenset(v) for w, v in dict(self.valuation).items()}
        for w in self.worlds:
            valuation.setdefault(w, frozenset())
        rank = dict(self.rank)
        rank.setdefault(self.actual, 0)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "rank", rank)
        if self.actual not in self.worlds:
            raise ValueError(f"actual world {self.actual} not declared")
        if rank[self.actual] != 0:
            raise ValueError("the actual world must have rank 0")
        missing = sorted(set(self.worlds) - set(rank))
        if missing:
            raise ValueError("worlds without a rank: " + ", ".join(missing))
        for w, r in rank.items():
            if w != self.actual and r == 0:
                raise ValueError(f"only the actual world may have rank 0, got {w}")
            if r < 0:
                raise ValueError(f"ranks must be non-negative, got {w}: {r}")

    def satisfying(self, f: Formula) -> list[str]:
        return [w for w in sorted(self.worlds) if eval_boolean(f, self.valuation[w])]

    def closest(self, f: Formula) -> list[str]:
        """The minimal-rank worlds satisfying ``f`` (empty when none do)."""
        hits = self.satisfying(f)
        if not hits:
            return []
        best = min(self.rank[w] for w in hits)
        return [w for w in hits if self.rank[w] == best]


def would(model: SimilarityModel, antecedent: Formula, consequent: Formula) -> bool:
    """True iff no world satisfies the antecedent (vacuous truth) or every
    closest antecedent-world satisfies the consequent."""
    closest = model.closest(antecedent)
    if not closest:
        return True
    return all(eval_boolean(consequent, model.valuation[w]) for w in closest)


def is_vacuous(model: SimilarityModel, antecedent: Formula) -> bool:
    """Whether a ``would`` over this antecedent is vacuously true."""
    return not model.satisfying(antecedent)


def might(model: SimilarityModel, antecedent: Formula, consequent: Formula) -> bool:
    """Existential dual of ``would``: some closest antecedent-world
    satisfies the consequent (false when no antecedent-world exists)."""
    closest = model.closest(antecedent)
    return any(eval_boolean(consequent, model.valuation[w]) for w in closest)


def but_for(model: SimilarityModel, cause: Formula, effect: Formula) -> bool:
    """Causation test: requires cause and effect to be facts at the actual
    world, then asks whether the effect fails at the closest cause-free
    worlds."""
    actual_atoms = model.valuation[model.actual]
    if not eval_boolean(cause, actual_atoms):
        raise PreconditionError(
            f"but-for test undefined: cause {render_formula(cause)} is false at the actual world"
        )
    if not eval_boolean(effect, actual_atoms):
        raise PreconditionError(
            f"but-for test undefined: effect {render_formula(effect)} is false at the actual world"
        )
    return would(model, Not(cause), Not(effect))
