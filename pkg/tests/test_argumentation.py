import random

import pytest

from mvlogic.argumentation import (
    ADMISSIBLE,
    COMPLETE,
    GROUNDED,
    PREFERRED,
    STABLE,
    ArgFramework,
    BoundExceededError,
    char_fn,
    cross_check_grounded,
    extensions,
    grounded_by_enumeration,
    grounded_fixpoint,
)

from .oracles import naive_admissible, naive_complete, naive_grounded

CYCLE3 = ArgFramework(
    frozenset("abc"), frozenset({("a", "b"), ("b", "c"), ("c", "a")})
)
CHAIN = ArgFramework(frozenset("abc"), frozenset({("a", "b"), ("b", "c")}))
NO_ATTACKS = ArgFramework(frozenset("ab"), frozenset())


def members(exts):
    return [sorted(e.members) for e in exts]


# -- characteristic function ---------------------------------------------------


def test_char_fn_on_cycle_defends_nothing():
    assert char_fn(CYCLE3, frozenset()) == frozenset()


def test_char_fn_on_chain_defends_unattacked():
    assert char_fn(CHAIN, frozenset()) == frozenset({"a"})


def test_char_fn_without_attacks_defends_everything():
    assert char_fn(NO_ATTACKS, frozenset()) == frozenset("ab")


def test_attacks_must_mention_declared_arguments():
    with pytest.raises(ValueError):
        ArgFramework(frozenset("a"), frozenset({("a", "z")}))


# -- named semantics on the corpus frameworks ------------------------------------


def test_cycle_has_only_the_empty_viewpoint():
    assert members(extensions(CYCLE3, GROUNDED)) == [[]]
    assert members(extensions(CYCLE3, ADMISSIBLE)) == [[]]
    assert members(extensions(CYCLE3, PREFERRED)) == [[]]
    assert extensions(CYCLE3, STABLE) == ()


def test_chain_accepts_ends():
    assert members(extensions(CHAIN, GROUNDED)) == [["a", "c"]]
    assert members(extensions(CHAIN, STABLE)) == [["a", "c"]]


def test_no_conflict_accepts_all_under_every_semantics():
    for semantics in (GROUNDED, PREFERRED, STABLE):
        assert members(extensions(NO_ATTACKS, semantics)) == [["a", "b"]]


def test_self_attacker_never_joins_extensions():
    af = ArgFramework(frozenset("ab"), frozenset({("a", "a")}))
    assert members(extensions(af, PREFERRED)) == [["b"]]


def test_extension_ordering_is_size_then_lexicographic():
    af = ArgFramework(frozenset("abcd"), frozenset({("a", "b"), ("b", "a")}))
    ordered = members(extensions(af, COMPLETE))
    assert ordered == sorted(ordered, key=lambda m: (len(m), m))


def test_enumeration_bound():
    big = ArgFramework(frozenset(f"a{i}" for i in range(21)), frozenset())
    with pytest.raises(BoundExceededError):
        extensions(big, STABLE)
    assert grounded_fixpoint(big) == big.args  # fixpoint route has no bound


# -- randomized properties ---------------------------------------------------------


def random_framework(rng):
    n = rng.randint(1, 8)
    args = [f"a{i}" for i in range(n)]
    attacks = {
        (x, y) for x in args for y in args if rng.random() < 0.25
    }
    return ArgFramework(frozenset(args), frozenset(attacks))


def test_grounded_routes_agree_on_100_random_frameworks():
    rng = random.Random(2024)
    for _ in range(100):
        af = random_framework(rng)
        fast = grounded_fixpoint(af)
        assert fast == grounded_by_enumeration(af)
        assert fast == naive_grounded(af.args, af.attacks)
        assert cross_check_grounded(af) == fast


def test_inclusion_chain_on_100_random_frameworks():
    """stable <= preferred <= complete <= admissible, with zero violations."""
    rng = random.Random(512)
    for _ in range(100):
        af = random_framework(rng)
        admissible = {e.members for e in extensions(af, ADMISSIBLE)}
        complete = {e.members for e in extensions(af, COMPLETE)}
        preferred = {e.members for e in extensions(af, PREFERRED)}
        stable = {e.members for e in extensions(af, STABLE)}
        assert stable <= preferred <= complete <= admissible
        grounded = grounded_fixpoint(af)
        assert all(grounded <= c for c in complete)
        assert admissible == {s for s in naive_admissible(af.args, af.attacks)}
        assert complete == {s for s in naive_complete(af.args, af.attacks)}


def test_char_fn_is_monotone_and_fixpoint_stabilizes_quickly():
    rng = random.Random(99)
    for _ in range(100):
        af = random_framework(rng)
        args = sorted(af.args)
        small = frozenset(a for a in args if rng.random() < 0.4)
        big = small | frozenset(a for a in args if rng.random() < 0.4)
        assert char_fn(af, small) <= char_fn(af, big)
        current = frozenset()
        for _ in range(len(af.args)):
            nxt = char_fn(af, current)
            if nxt == current:
                break
            current = nxt
        assert char_fn(af, current) == current
