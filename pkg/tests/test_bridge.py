import json

import pytest

from mvlogic.bridge import (
    PER_EVENT,
    PER_EVENT_TEMPLATE,
    WHOLE_STORY,
    WHOLE_STORY_TEMPLATE,
    BridgeSession,
    ChatMessage,
    FunctionCall,
    MockTransport,
    ToolParam,
    monkey_tool,
    narrate,
    prefix_story,
    render_story,
    run_function_loop,
    serialize_plan,
    split_paragraphs,
    transport_from_spec,
)
from mvlogic.errors import BridgeError, TransportError
from mvlogic.parser import parse_term_text
from mvlogic.planner import GroundAction, Plan, plan_search, problem_from_domain
from mvlogic.terms import Constant

EXPECTED_WIRE = (
    '[{"PLAN": [{"args": ["at_door", "at_window"], "functor": "walk"}, '
    '{"args": ["at_window", "at_center"], "functor": "push_box"}, '
    '{"args": [], "functor": "climb_box"}, '
    '{"args": [], "functor": "get_banana"}]}]'
)


def call_message(**arguments):
    return ChatMessage(
        "assistant",
        "",
        function_call=FunctionCall("get_monkey_plan", json.dumps(arguments)),
    )

DOOR_ARGS = dict(
    monkey_start_ground_location="at_door",
    monkey_start_height_location="on_ground",
    box_start_location="at_window",
    monkey_has_banana="no_banana",
)


# -- plan wire format -----------------------------------------------------------


def test_monkey_plan_serializes_byte_exactly(load_scenario):
    plan = plan_search(problem_from_domain(load_scenario("monkey.mvl").planning))
    assert serialize_plan(plan) == EXPECTED_WIRE


def test_zero_argument_actions_carry_empty_args(load_scenario):
    plan = plan_search(problem_from_domain(load_scenario("monkey.mvl").planning))
    steps = json.loads(serialize_plan(plan))[0]["PLAN"]
    by_name = {s["functor"]: s["args"] for s in steps}
    assert by_name["climb_box"] == []
    assert by_name["get_banana"] == []


def test_empty_plan_wire():
    assert serialize_plan(Plan(())) == '[{"PLAN": []}]'


def test_single_step_wire():
    plan = Plan((GroundAction("walk", (Constant("a"), Constant("b"))),))
    assert serialize_plan(plan) == '[{"PLAN": [{"args": ["a", "b"], "functor": "walk"}]}]'


def test_serialization_is_stable_and_injective(load_scenario):
    plan = plan_search(problem_from_domain(load_scenario("monkey.mvl").planning))
    assert serialize_plan(plan) == serialize_plan(plan)
    other = Plan(plan.steps[:-1])
    assert serialize_plan(other) != serialize_plan(plan)


# -- the function-calling loop -----------------------------------------------------


def make_session(load_scenario, responses):
    domain = load_scenario("monkey.mvl").planning
    schema, handler = monkey_tool(domain)
    calls = []

    def counting_handler(args):
        calls.append(args)
        return handler(args)

    session = BridgeSession(
        MockTransport(responses), tools=((schema, counting_handler),)
    )
    return session, calls


def test_loop_dispatches_one_function_round(load_scenario):
    final = ChatMessage("assistant", "Here is a sequence of actions...")
    session, calls = make_session(
        load_scenario, [call_message(**DOOR_ARGS), final]
    )
    answer = run_function_loop(session, "Get the bananas.")
    assert answer == "Here is a sequence of actions..."
    assert len(calls) == 1
    assert [m.role for m in session.history] == ["user", "assistant", "function", "assistant"]
    assert session.history[2].name == "get_monkey_plan"
    assert session.history[2].content == EXPECTED_WIRE


def test_loop_returns_plain_answers_without_dispatch(load_scenario):
    session, calls = make_session(
        load_scenario, [ChatMessage("assistant", "Prolog is a logic language.  ")]
    )
    answer = run_function_loop(session, "What is Prolog?")
    assert answer == "Prolog is a logic language."
    assert calls == []
    assert [m.role for m in session.history] == ["user", "assistant"]


def test_tools_are_offered_only_on_the_first_send(load_scenario):
    final = ChatMessage("assistant", "done")
    session, _ = make_session(load_scenario, [call_message(**DOOR_ARGS), final])
    run_function_loop(session, "go")
    transport = session.transport
    assert len(transport.calls[0][1]) == 1
    assert transport.calls[1][1] == ()


def test_unknown_function_name_is_rejected(load_scenario):
    bad = ChatMessage(
        "assistant", "", function_call=FunctionCall("get_weather", "{}")
    )
    session, _ = make_session(load_scenario, [bad])
    with pytest.raises(BridgeError, match="unknown function"):
        run_function_loop(session, "go")


def test_non_enum_argument_is_rejected(load_scenario):
    args = dict(DOOR_ARGS, monkey_start_ground_location="at_pool")
    session, _ = make_session(load_scenario, [call_message(**args)])
    with pytest.raises(BridgeError, match="at_pool"):
        run_function_loop(session, "go")


def test_missing_required_argument_is_rejected(load_scenario):
    args = {k: v for k, v in DOOR_ARGS.items() if k != "box_start_location"}
    session, _ = make_session(load_scenario, [call_message(**args)])
    with pytest.raises(BridgeError, match="missing"):
        run_function_loop(session, "go")


def test_malformed_arguments_are_rejected(load_scenario):
    bad = ChatMessage(
        "assistant", "", function_call=FunctionCall("get_monkey_plan", "{not json")
    )
    session, _ = make_session(load_scenario, [bad])
    with pytest.raises(BridgeError, match="malformed"):
        run_function_loop(session, "go")


def test_exhausted_mock_raises_transport_error(load_scenario):
    session, _ = make_session(load_scenario, [call_message(**DOOR_ARGS)])
    with pytest.raises(TransportError, match="exhausted"):
        run_function_loop(session, "go")


def test_goal_state_produces_empty_plan_wire(load_scenario):
    args = dict(DOOR_ARGS, monkey_has_banana="has_banana")
    final = ChatMessage("assistant", "Nothing to do.")
    session, _ = make_session(load_scenario, [call_message(**args), final])
    run_function_loop(session, "go")
    assert session.history[2].content == '[{"PLAN": []}]'


def test_tool_schema_wire_shape(load_scenario):
    schema, _ = monkey_tool(load_scenario("monkey.mvl").planning)
    wire = schema.to_wire()
    assert wire["name"] == "get_monkey_plan"
    assert wire["parameters"]["properties"]["monkey_start_ground_location"]["enum"] == [
        "at_center",
        "at_window",
        "at_door",
    ]
    assert set(wire["parameters"]["required"]) == set(DOOR_ARGS)


def test_transport_spec_errors():
    with pytest.raises(BridgeError, match="transport spec"):
        transport_from_spec("carrier-pigeon")


# -- live transport wire shape (no network involved) ----------------------------------


def test_http_transport_payload_shape(load_scenario, monkeypatch, tmp_path):
    """The live transport sends model id, message list, and function
    schemas under the expected field names, and reads choices[0].message."""
    import requests

    from mvlogic.bridge import HttpTransport

    captured = {}

    class FakeResponse:
        def raise_for_status(self):
            pass

        def json(self):
            return {
                "choices": [
                    {
                        "message": {
                            "role": "assistant",
                            "content": None,
                            "function_call": {
                                "name": "get_monkey_plan",
                                "arguments": json.dumps(DOOR_ARGS),
                            },
                        }
                    }
                ]
            }

    def fake_post(url, json=None, headers=None, timeout=None):
        captured.update(url=url, payload=json, headers=headers)
        return FakeResponse()

    monkeypatch.setattr(requests, "post", fake_post)
    monkeypatch.setenv("MVLOGIC_API_KEY", "sk-test")

    config = tmp_path / "live.json"
    config.write_text('{"endpoint": "https://example.invalid/v1/chat", "model": "m-1"}')
    transport = HttpTransport.from_config(config)
    schema, _ = monkey_tool(load_scenario("monkey.mvl").planning)
    reply = transport.send([ChatMessage("user", "plan please")], [schema])

    assert captured["url"] == "https://example.invalid/v1/chat"
    assert captured["headers"]["Authorization"] == "Bearer sk-test"
    payload = captured["payload"]
    assert payload["model"] == "m-1"
    assert payload["messages"] == [{"role": "user", "content": "plan please"}]
    assert payload["functions"][0]["name"] == "get_monkey_plan"
    assert payload["functions"][0]["parameters"]["required"]
    assert reply.function_call.name == "get_monkey_plan"


def test_http_transport_wraps_failures(monkeypatch, tmp_path):
    import requests

    from mvlogic.bridge import HttpTransport

    def explode(*args, **kwargs):
        raise requests.ConnectionError("refused")

    monkeypatch.setattr(requests, "post", explode)
    transport = HttpTransport("https://example.invalid", "m-1", api_key="k")
    with pytest.raises(TransportError, match="endpoint call failed"):
        transport.send([ChatMessage("user", "hi")])


# -- story annotation ---------------------------------------------------------------


def test_prefix_story_annotates_roles_in_declaration_order(load_scenario):
    scenario = load_scenario("story.mvl")
    annotated = prefix_story(scenario.story, scenario.kb.entity_decls)
    rendered = [str(e) for e in annotated]
    assert rendered[0] == "ride(villain:'Draco',place:'White Castle')"
    assert rendered[4] == "warn(sentinel:'Walt',hero:'Sir Brian',crime:capture)"


def test_prefix_story_drops_undeclared_arguments(load_scenario):
    scenario = load_scenario("story.mvl")
    event = parse_term_text("ride('Draco', 'Atlantis')")
    (annotated,) = prefix_story([event], scenario.kb.entity_decls)
    assert str(annotated) == "ride(villain:'Draco')"


def test_prefix_story_takes_first_matching_role():
    decls = (
        ("hero", (Constant("Walt"),)),
        ("sentinel", (Constant("Walt"),)),
    )
    event = parse_term_text("salute('Walt')")
    (annotated,) = prefix_story([event], decls)
    assert str(annotated) == "salute(hero:'Walt')"


# -- narration -----------------------------------------------------------------------


def test_per_event_narration_yields_ten_fragments(load_scenario, scenario_path):
    scenario = load_scenario("story.mvl")
    transport = MockTransport.from_script(scenario_path("narrate_events.json"))
    fragments = narrate(scenario.story, scenario.kb.entity_decls, PER_EVENT, transport)
    assert len(fragments) == 10
    assert fragments[8] == "Sir Brian frees Princess Marian."


def test_whole_story_narration_yields_three_paragraphs(load_scenario, scenario_path):
    scenario = load_scenario("story.mvl")
    transport = MockTransport.from_script(scenario_path("narrate_story.json"))
    fragments = narrate(scenario.story, scenario.kb.entity_decls, WHOLE_STORY, transport)
    assert len(fragments) == 3


def test_prompt_bytes_are_template_plus_annotated_events(load_scenario):
    scenario = load_scenario("story.mvl")
    transport = MockTransport([ChatMessage("assistant", "ok")])
    narrate(scenario.story, scenario.kb.entity_decls, PER_EVENT, transport)
    sent = transport.calls[0][0]
    assert [m.role for m in sent] == ["system", "user"]
    annotated = prefix_story(scenario.story, scenario.kb.entity_decls)
    assert sent[1].content == PER_EVENT_TEMPLATE + render_story(annotated)
    assert sent[1].content.startswith(
        "Please narrate separately each event of the following plot, "
        "skipping a line after the narrative of each event: ["
    )


def test_empty_event_list_sends_the_template_alone():
    transport = MockTransport([ChatMessage("assistant", "a quiet day")])
    fragments = narrate([], (), WHOLE_STORY, transport)
    assert fragments == ["a quiet day"]
    assert transport.calls[0][0][1].content == WHOLE_STORY_TEMPLATE


# -- reply splitting ---------------------------------------------------------------------


def test_split_on_blank_lines():
    assert split_paragraphs("A.\r\n\r\nB.") == ["A.", "B."]


def test_split_keeps_single_fragments():
    assert split_paragraphs("single line") == ["single line"]


def test_split_on_bare_linefeeds():
    assert split_paragraphs("x\ny\n") == ["x", "y"]


def test_split_trims_and_drops_empties():
    assert split_paragraphs("  one \r\n\r\n \r\n two \r\n") == ["one", "two"]


# -- message validation ----------------------------------------------------------------


def test_function_call_only_on_assistant_messages():
    with pytest.raises(ValueError):
        ChatMessage("user", "x", function_call=FunctionCall("f", "{}"))


def test_function_role_needs_a_name():
    with pytest.raises(ValueError):
        ChatMessage("function", "result")


def test_tool_names_must_be_unique(load_scenario):
    schema, handler = monkey_tool(load_scenario("monkey.mvl").planning)
    with pytest.raises(ValueError, match="unique"):
        BridgeSession(MockTransport([]), tools=((schema, handler), (schema, handler)))


def test_tool_params_need_choices():
    with pytest.raises(ValueError, match="enum"):
        ToolParam("p", ())
