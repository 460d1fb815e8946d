import pytest

from mvlogic.errors import KbSyntaxError
from mvlogic.parser import (
    parse_kb,
    parse_literal_text,
    parse_scenario,
    parse_scenario_file,
    render_scenario,
)
from mvlogic.terms import Compound, Constant, RuleKind, Sign, Tier, Variable

CORPUS = [
    "tweety.mvl",
    "tweety_penguin.mvl",
    "choice.mvl",
    "property_access.mvl",
    "course_c32.mvl",
    "bermuda.mvl",
    "umbrella.mvl",
    "chain.mvl",
    "graduation.mvl",
    "garden.mvl",
    "study_exam.mvl",
    "accident.mvl",
    "accident_independent.mvl",
    "alice_bob.mvl",
    "deontic.mvl",
    "monkey.mvl",
    "monkey_noise.mvl",
    "robot_grid.mvl",
    "dragon.mvl",
    "story.mvl",
]


def test_single_fact():
    kb = parse_kb("bird(tweety).")
    assert len(kb.rules) == 1
    rule = kb.rules[0]
    assert rule.is_fact
    assert rule.head.atom == Compound("bird", (Constant("tweety"),))


def test_empty_source():
    kb = parse_kb("")
    assert kb.rules == ()


def test_default_rule_with_naf():
    kb = parse_kb("fly(X) :- bird(X), not ab(X).")
    rule = kb.rules[0]
    assert rule.kind is RuleKind.STRICT
    assert [lit.sign for lit in rule.body] == [Sign.POS, Sign.NAF]
    assert rule.body[1].atom == Compound("ab", (Variable("X"),))


def test_classical_negation_head():
    kb = parse_kb("neg fly(penguin) :- bird(penguin).")
    assert kb.rules[0].head.sign is Sign.NEG


def test_defeasible_annotations():
    source = (
        "owner(john).\n"
        "may_access(X) ~> owner(X) "
        '[label=owner_right, tier=legal, prio=2, rebut=(court_order(X)), backing="deed"].\n'
    )
    scenario = parse_scenario(source)
    rule = scenario.kb.rule("owner_right")
    assert rule.kind is RuleKind.DEFEASIBLE
    assert rule.tier is Tier.LEGAL
    assert rule.priority == 2
    wrapper = scenario.toulmin[0]
    assert wrapper.backing == "deed"
    assert wrapper.qualifier == "presumably"
    assert len(wrapper.rebuttals) == 1


def test_defeasible_rule_defaults_to_personal_tier():
    scenario = parse_scenario("p ~> q.\nq.")
    assert scenario.kb.rules[0].tier is Tier.PERSONAL


def test_syntax_error_carries_location():
    with pytest.raises(KbSyntaxError) as err:
        parse_kb("bird(tweety)\nfly(tweety).")
    assert err.value.line == 2


def test_duplicate_label_rejected():
    with pytest.raises(KbSyntaxError, match="duplicate"):
        parse_kb("p [label=r].\nq [label=r].")


def test_constant_outside_domain_rejected():
    with pytest.raises(KbSyntaxError, match="outside"):
        parse_kb("domain { a }\np(b).")


def test_quoted_constants_and_entities_order():
    scenario = parse_scenario(
        "entities([hero, place]).\n"
        "hero('Sir Brian').\n"
        "place('White Castle').\n"
        "place('Fortress of Draco').\n"
    )
    decls = scenario.kb.entity_decls
    assert [role for role, _ in decls] == ["hero", "place"]
    assert [c.name for c in decls[1][1]] == ["White Castle", "Fortress of Draco"]


def test_story_events_must_be_ground():
    with pytest.raises(KbSyntaxError):
        parse_scenario("story([capture(V, 'Marian')]).")


def test_section_keywords_stay_usable_as_predicates():
    kb = parse_kb("goal(rescue).\nworld(earth).\nrank(alice, 1).")
    assert {r.head.predicate for r in kb.rules} == {"goal", "world", "rank"}


def test_toulmin_annotations_need_defeasible_arrow():
    with pytest.raises(KbSyntaxError, match="defeasible"):
        parse_kb('p :- q [backing="x"].')


@pytest.mark.parametrize("name", CORPUS)
def test_round_trip_identity_on_corpus(name, scenario_path):
    """Rendering a parsed corpus file and re-parsing reproduces it exactly."""
    scenario = parse_scenario_file(scenario_path(name))
    assert parse_scenario(render_scenario(scenario)) == scenario


def test_shared_worlds_feed_both_model_kinds():
    """One file may declare worlds used by relations and by ranks; both
    models come back and the text round-trips."""
    source = (
        "world w0 { p }\n"
        "world w1 { q }\n"
        "rel alethic w0 w1\n"
        "actual w0\n"
        "rank w1 3\n"
    )
    scenario = parse_scenario(source)
    assert scenario.kripke is not None and scenario.similarity is not None
    assert scenario.kripke.valuation == scenario.similarity.valuation
    assert scenario.similarity.rank["w1"] == 3
    assert parse_scenario(render_scenario(scenario)) == scenario


def test_modalities_block_declares_empty_relations():
    from mvlogic.modal import check_world
    from mvlogic.parser import parse_formula_text

    scenario = parse_scenario("world w0 { }\nmodalities { deontic }\n")
    model = scenario.kripke
    assert model.relations["deontic"] == frozenset()
    # vacuous obligation over the declared-but-empty relation
    assert check_world(model, "w0", parse_formula_text("(ob p)")) is True
    assert parse_scenario(render_scenario(scenario)) == scenario


def test_round_trip_is_stable_text():
    source = "bird(tweety).\nfly(X) :- bird(X), not ab(X).\n"
    once = render_scenario(parse_scenario(source))
    twice = render_scenario(parse_scenario(once))
    assert once == twice


def test_parse_literal_text_rejects_trailing_garbage():
    with pytest.raises(KbSyntaxError):
        parse_literal_text("fly(tweety) extra")


def test_fixed_and_vary_blocks_round_trip():
    source = (
        "bird(tweety).\n"
        "fly(X) :- bird(X), not ab(X).\n"
        "ab(X) :- penguin(X).\n"
        "minimize { ab }\nfixed { bird }\nvary { fly, penguin }\n"
    )
    scenario = parse_scenario(source)
    assert scenario.fixed_decl == frozenset({"bird"})
    assert scenario.varied_decl == frozenset({"fly", "penguin"})
    assert parse_scenario(render_scenario(scenario)) == scenario


def test_custom_qualifier_round_trips():
    source = (
        "wet_grass.\n"
        'rained ~> wet_grass [label=morning_dew, tier=physical, qualifier="plausibly"].\n'
    )
    scenario = parse_scenario(source)
    assert scenario.toulmin[0].qualifier == "plausibly"
    assert parse_scenario(render_scenario(scenario)) == scenario
