"""Two-way integration between a chat model and the reasoning engine.

One direction is a single-round function-calling loop: the model may reply
with a tool invocation, the engine runs the bound operation, and the tool
result goes back for a final natural-language answer.  The other direction
is plot narration: ground story events are annotated with entity roles and
shipped to the model under fixed prompt templates.

Everything speaks through a pluggable transport.  The scripted mock makes
the whole path testable offline; the live transport talks to any
chat-completions endpoint compatible with the wire shapes used here.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .errors import BridgeError, TransportError
from .planner import FluentState, Plan, plan_search, problem_from_domain
from .terms import Compound, Constant, Literal, Term

API_KEY_ENV = "MVLOGIC_API_KEY"

WHOLE_STORY_TEMPLATE = "Please narrate the plot: "
PER_EVENT_TEMPLATE = (
    "Please narrate separately each event of the following plot, "
    "skipping a line after the narrative of each event: "
)

WHOLE_STORY = "whole-story"
PER_EVENT = "per-event"


# ---------------------------------------------------------------------------
# Wire objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToolParam:
    name: str
    choices: tuple[str, ...]
    required: bool = True

    def __post_init__(self):
        if not self.choices:
            raise ValueError(f"tool parameter {self.name} needs enum values")


@dataclass(frozen=True)
class ToolSchema:
    name: str
    description: str
    params: tuple[ToolParam, ...]

    def to_wire(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": {
                "type": "object",
                "properties": {
                    p.name: {"type": "string", "enum": list(p.choices)}
                    for p in self.params
                },
                "required": [p.name for p in self.params if p.required],
            },
        }

    def validate_args(self, args: dict) -> dict:
        for key in args:
            if not any(p.name == key for p in self.params):
                raise BridgeError(f"{self.name}: unknown argument {key}")
        out = {}
        for param in self.params:
            if param.name not in args:
                if param.required:
                    raise BridgeError(f"{self.name}: missing argument {param.name}")
                continue
            value = args[param.name]
            if value not in param.choices:
                raise BridgeError(
                    f"{self.name}: value {value!r} for {param.name} is not one of {list(param.choices)}"
                )
            out[param.name] = value
        return out


@dataclass(frozen=True)
class FunctionCall:
    name: str
    arguments: str  # structured text, parsed strictly against the schema


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str = ""
    function_call: Optional[FunctionCall] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant", "function"):
            raise ValueError(f"unknown chat role: {self.role}")
        if self.function_call is not None and self.role != "assistant":
            raise ValueError("only assistant messages carry a function_call")
        if self.role == "function" and not self.name:
            raise ValueError("function messages carry the function name")

    def to_wire(self) -> dict:
        out: dict = {"role": self.role, "content": self.content}
        if self.function_call is not None:
            out["function_call"] = {
                "name": self.function_call.name,
                "arguments": self.function_call.arguments,
            }
        if self.name is not None:
            out["name"] = self.name
        return out


def message_from_wire(data: dict) -> ChatMessage:
    call = None
    if data.get("function_call"):
        call = FunctionCall(
            name=data["function_call"]["name"],
            arguments=data["function_call"].get("arguments", "{}"),
        )
    return ChatMessage(
        role=data.get("role", "assistant"),
        content=data.get("content") or "",
        function_call=call,
        name=data.get("name"),
    )


# ---------------------------------------------------------------------------
# Transports
# ---------------------------------------------------------------------------


class Transport:
    """Sends a message list (plus optional tool schemas) and returns the
    reply message."""

    def send(
        self,
        messages: Sequence[ChatMessage],
        tools: Optional[Sequence[ToolSchema]] = None,
    ) -> ChatMessage:
        raise NotImplementedError


class MockTransport(Transport):
    """Replays a fixed response list in order; every call is recorded so
    tests can inspect the exact prompts that went out."""

    def __init__(self, responses: Iterable[ChatMessage]):
        self.responses = list(responses)
        self.calls: list[tuple[tuple[ChatMessage, ...], tuple[ToolSchema, ...]]] = []
        self._cursor = 0

    @classmethod
    def from_script(cls, path) -> "MockTransport":
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        return cls([message_from_wire(entry) for entry in data])

    def send(self, messages, tools=None):
        self.calls.append((tuple(messages), tuple(tools or ())))
        if self._cursor >= len(self.responses):
            raise TransportError("mock transport exhausted its scripted responses")
        reply = self.responses[self._cursor]
        self._cursor += 1
        return reply


class HttpTransport(Transport):
    """Chat-completions over HTTP.  Endpoint URL and model id come from a
    config file; the API key from the MVLOGIC_API_KEY environment variable."""

    def __init__(self, endpoint: str, model: str, api_key: Optional[str] = None, timeout: float = 60.0):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout

    @classmethod
    def from_config(cls, path) -> "HttpTransport":
        with open(path, encoding="utf-8") as handle:
            config = json.load(handle)
        return cls(endpoint=config["endpoint"], model=config["model"])

    def send(self, messages, tools=None):
        import requests

        payload: dict = {
            "model": self.model,
            "messages": [m.to_wire() for m in messages],
        }
        if tools:
            payload["functions"] = [t.to_wire() for t in tools]
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
            response.raise_for_status()
            body = response.json()
        except Exception as exc:  # noqa: BLE001 - every failure is a transport failure
            raise TransportError(f"endpoint call failed: {exc}") from exc
        try:
            return message_from_wire(body["choices"][0]["message"])
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed endpoint response: {exc}") from exc


def transport_from_spec(spec: str) -> Transport:
    """Build a transport from a CLI spec: ``mock:<script>`` or ``live:<config>``."""
    kind, _, path = spec.partition(":")
    if kind == "mock" and path:
        return MockTransport.from_script(path)
    if kind == "live" and path:
        return HttpTransport.from_config(path)
    raise BridgeError(f"unknown transport spec: {spec}")


# ---------------------------------------------------------------------------
# Function-calling loop
# ---------------------------------------------------------------------------

Handler = Callable[[dict], str]


@dataclass
class BridgeSession:
    """One conversation: a transport, the registered tools, and an
    append-only message history.  A session belongs to a single logical
    thread of control; run distinct sessions for concurrent conversations."""

    transport: Transport
    tools: tuple[tuple[ToolSchema, Handler], ...] = ()
    history: list[ChatMessage] = field(default_factory=list)

    def __post_init__(self):
        names = [schema.name for schema, _ in self.tools]
        if len(names) != len(set(names)):
            raise ValueError("tool names must be unique")

    def tool(self, name: str) -> tuple[ToolSchema, Handler]:
        for schema, handler in self.tools:
            if schema.name == name:
                return schema, handler
        raise BridgeError(f"unknown function name: {name}")


def run_function_loop(session: BridgeSession, prompt: str) -> str:
    """Send the prompt; when the reply requests a function, dispatch it,
    feed the result back, and return the final assistant text (at most one
    function round)."""
    user = ChatMessage("user", prompt)
    session.history.append(user)
    schemas = [schema for schema, _ in session.tools]
    reply = session.transport.send(list(session.history), schemas or None)
    session.history.append(reply)

    if reply.function_call is None:
        return reply.content.strip()

    schema, handler = session.tool(reply.function_call.name)
    try:
        raw_args = json.loads(reply.function_call.arguments)
    except json.JSONDecodeError as exc:
        raise BridgeError(f"malformed function arguments: {exc}") from exc
    if not isinstance(raw_args, dict):
        raise BridgeError("function arguments must be an object")
    args = schema.validate_args(raw_args)
    result = handler(args)

    session.history.append(ChatMessage("function", result, name=schema.name))
    final = session.transport.send(list(session.history))
    session.history.append(final)
    return final.content.strip()


# ---------------------------------------------------------------------------
# Plan wire format
# ---------------------------------------------------------------------------


def serialize_plan(plan: Plan) -> str:
    """Canonical byte-deterministic wire form: a one-element list whose
    object maps "PLAN" to {"args": [...], "functor": ...} steps, keys in
    alphabetical order; zero-argument actions carry empty args arrays."""
    steps = [
        {"args": [a.name for a in step.args], "functor": step.name}
        for step in plan.steps
    ]
    return json.dumps([{"PLAN": steps}], sort_keys=True)


# ---------------------------------------------------------------------------
# Story annotation and narration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnotatedEvent:
    functor: str
    parts: tuple[tuple[str, Term], ...]

    def __str__(self) -> str:
        if not self.parts:
            return self.functor
        inner = ",".join(f"{role}:{arg}" for role, arg in self.parts)
        return f"{self.functor}({inner})"


def prefix_story(events: Sequence[Term], entity_decls) -> tuple[AnnotatedEvent, ...]:
    """Annotate each event argument with its entity role.

    The role is the first declared one (in declaration order) whose
    instance set contains the argument; arguments matching no role are
    dropped, so arity may shrink.
    """
    annotated = []
    for event in events:
        if isinstance(event, Compound):
            functor, args = event.functor, event.args
        elif isinstance(event, Constant):
            functor, args = event.name, ()
        else:
            raise ValueError(f"story events must be ground atoms: {event}")
        parts = []
        for arg in args:
            for role, instances in entity_decls:
                if arg in instances:
                    parts.append((role, arg))
                    break
        annotated.append(AnnotatedEvent(functor, tuple(parts)))
    return tuple(annotated)


def render_story(events: Sequence[AnnotatedEvent]) -> str:
    return "[" + ",".join(str(e) for e in events) + "]"


def split_paragraphs(reply: str) -> list[str]:
    """Split on line breaks (blank lines and single CRLF/LF alike), trim
    each fragment, and drop empty ones."""
    fragments = []
    for chunk in reply.replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        chunk = chunk.strip()
        if chunk:
            fragments.append(chunk)
    return fragments


def narrate(
    events: Sequence[Term],
    entity_decls,
    mode: str,
    transport: Transport,
) -> list[str]:
    """Ship the annotated plot to the model under the mode's verbatim
    template and return the reply's fragments."""
    if mode not in (WHOLE_STORY, PER_EVENT):
        raise BridgeError(f"unknown narration mode: {mode}")
    template = WHOLE_STORY_TEMPLATE if mode == WHOLE_STORY else PER_EVENT_TEMPLATE
    if events:
        prompt = template + render_story(prefix_story(events, entity_decls))
    else:
        prompt = template
    messages = [
        ChatMessage("system", "You are a helpful assistant."),
        ChatMessage("user", prompt),
    ]
    reply = transport.send(messages)
    return split_paragraphs(reply.content)


# ---------------------------------------------------------------------------
# The plan tool
# ---------------------------------------------------------------------------

_LOCATIONS = ("at_center", "at_window", "at_door")


def monkey_tool(domain) -> tuple[ToolSchema, Handler]:
    """Bind the monkey planning domain to a get_monkey_plan tool.

    The handler rebuilds the initial state from the enum arguments, runs
    the planner toward has_banana, and returns the plan wire text.
    """
    schema = ToolSchema(
        name="get_monkey_plan",
        description=(
            "Gets the sequence of actions that lead the monkey to get the "
            "banana starting from a given state"
        ),
        params=(
            ToolParam("monkey_start_ground_location", _LOCATIONS),
            ToolParam("monkey_start_height_location", ("on_ground", "on_box")),
            ToolParam("box_start_location", _LOCATIONS),
            ToolParam("monkey_has_banana", ("has_banana", "no_banana")),
        ),
    )

    def handler(args: dict) -> str:
        monkey = Constant("monkey")
        box = Constant("box")
        fluents = {
            Compound("at", (monkey, Constant(args["monkey_start_ground_location"]))),
            Constant(args["monkey_start_height_location"]),
            Compound("at", (box, Constant(args["box_start_location"]))),
            Constant(args["monkey_has_banana"]),
        }
        problem = problem_from_domain(
            domain,
            init=FluentState(frozenset(fluents)),
            goal=(Literal(Constant("has_banana")),),
        )
        plan = plan_search(problem)
        if plan is None:
            return "false"
        return serialize_plan(plan)

    return schema, handler
