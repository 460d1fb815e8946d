"""Command-line entry point dispatching to every engine.

Exit codes: 0 for success (domain-level negative verdicts such as "no
plan" or "defeated" are successes; scripts branch on content), 1 for
malformed input or missing files, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import (
    abduction,
    argumentation,
    bridge,
    counterfactual,
    minimize,
    orchestrator,
    planner,
)
from .defeasible import Status, conclude
from .errors import MvlogicError
from .modal import Trace, check_trace, check_world
from .parser import (
    parse_formula_text,
    parse_literal_list_text,
    parse_literal_text,
    parse_scenario_file,
    render_scenario,
)

WIRE = "wire"
HUMAN = "human"


def _add_format(sub) -> None:
    sub.add_argument(
        "--format",
        choices=(HUMAN, WIRE),
        default=HUMAN,
        help="human-readable output (default) or the structured wire format",
    )


def _extension_str(members) -> str:
    return "{" + ", ".join(sorted(members)) + "}"


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_parse(args) -> int:
    scenario = parse_scenario_file(args.file)
    if args.format == WIRE:
        payload = {
            "rules": [r.label for r in scenario.kb.rules],
            "entities": [
                {"role": role, "instances": [str(c) for c in instances]}
                for role, instances in scenario.kb.entity_decls
            ],
            "constants": sorted(str(c) for c in scenario.kb.constant_domain),
        }
        print(json.dumps(payload, indent=2))
    else:
        print(render_scenario(scenario), end="")
    return 0


def cmd_query(args) -> int:
    scenario = parse_scenario_file(args.kb)
    from .derive import derive

    query = parse_literal_text(args.query)
    answers = derive(scenario.kb, query)
    if args.format == WIRE:
        print(
            json.dumps(
                [{v.name: str(t) for v, t in a.pairs} for a in answers]
            )
        )
        return 0
    if not answers:
        print("no")
    elif len(answers) == 1 and not answers[0].pairs:
        print("yes")
    else:
        for answer in answers:
            print(", ".join(f"{v.name} = {t}" for v, t in answer.pairs))
    return 0


def _theory_from(scenario, minimize_flag) -> minimize.DefaultTheory:
    minimized = set(scenario.minimized)
    if minimize_flag:
        minimized.update(p.strip() for p in minimize_flag.split(",") if p.strip())
    return minimize.default_theory(
        scenario.kb,
        minimized,
        fixed=scenario.fixed_decl,
        varied=scenario.varied_decl,
    )


def cmd_circumscribe(args) -> int:
    scenario = parse_scenario_file(args.kb)
    theory = _theory_from(scenario, args.minimize)
    verdict = minimize.circumscribed_entails(theory, parse_literal_text(args.query))
    print(verdict)
    return 0


def cmd_defeasible(args) -> int:
    scenario = parse_scenario_file(args.kb)
    conclusion = conclude(scenario.kb, scenario.toulmin, parse_literal_text(args.query))
    if args.format == WIRE:
        print(
            json.dumps(
                {
                    "query": str(conclusion.literal),
                    "status": str(conclusion.status),
                    "defeater": conclusion.defeater,
                    "qualifier": conclusion.qualifier,
                }
            )
        )
        return 0
    line = f"{conclusion.literal}: {conclusion.status}"
    if conclusion.status is Status.DEFEATED:
        line += f" [defeater={conclusion.defeater}]"
    elif conclusion.status is Status.PRESUMABLY_HOLDS and conclusion.qualifier:
        line += f" [qualifier={conclusion.qualifier}]"
    print(line)
    return 0


_APX_LINE = re.compile(r"^(arg|att)\(([^)]*)\)\.$")


def load_framework(path) -> argumentation.ArgFramework:
    """Read an AF from a ``.mvl`` knowledge base (argument/attacks facts)
    or from the line-oriented ``arg(a)./att(a,b).`` interchange format."""
    path = Path(path)
    if path.suffix == ".mvl":
        scenario = parse_scenario_file(path)
        return orchestrator.framework_from_kb(scenario.kb)
    args: set[str] = set()
    attacks: set[tuple[str, str]] = set()
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("%") or line.startswith("#"):
            continue
        m = _APX_LINE.match(line)
        if m is None:
            raise MvlogicError(f"unrecognized interchange line: {line}")
        fields = [f.strip() for f in m.group(2).split(",")]
        if m.group(1) == "arg" and len(fields) == 1:
            args.add(fields[0])
        elif m.group(1) == "att" and len(fields) == 2:
            attacks.add((fields[0], fields[1]))
            args.update(fields)
        else:
            raise MvlogicError(f"unrecognized interchange line: {line}")
    return argumentation.ArgFramework(frozenset(args), frozenset(attacks))


def cmd_af(args) -> int:
    af = load_framework(args.file)
    exts = argumentation.extensions(af, args.semantics)
    if args.render:
        from .report import render_af_graph

        members = set()
        for ext in exts:
            members.update(ext.members)
        render_af_graph(af, args.render, frozenset(members))
    if args.format == WIRE:
        print(json.dumps([sorted(e.members) for e in exts]))
        return 0
    if not exts:
        print(f"no {args.semantics} extension")
    for ext in exts:
        print(_extension_str(ext.members))
    return 0


def cmd_abduce(args) -> int:
    scenario = parse_scenario_file(args.kb)
    abducibles = frozenset(l.atom for l in parse_literal_list_text(args.abducibles))
    observation = parse_literal_list_text(args.observe)
    constraints = tuple(
        parse_literal_list_text(text) for text in (args.constraint or ())
    )
    problem = abduction.AbductionProblem(scenario.kb, abducibles, observation, constraints)
    found = abduction.explanations(problem)
    if args.format == WIRE:
        print(json.dumps([sorted(str(a) for a in h) for h in found]))
        return 0
    if not found:
        print("no explanation")
    for hypotheses in found:
        print("{" + ", ".join(sorted(str(a) for a in hypotheses)) + "}")
    return 0


def cmd_counterfactual(args) -> int:
    scenario = parse_scenario_file(args.model)
    model = scenario.similarity
    if model is None:
        raise MvlogicError(f"{args.model} declares no similarity model (actual/rank lines)")
    a = parse_formula_text(args.antecedent)
    b = parse_formula_text(args.consequent)
    if args.op == "would":
        verdict = counterfactual.would(model, a, b)
        suffix = " (vacuous)" if counterfactual.is_vacuous(model, a) else ""
    elif args.op == "might":
        verdict = counterfactual.might(model, a, b)
        suffix = ""
    else:
        verdict = counterfactual.but_for(model, a, b)
        suffix = ""
    print(("true" if verdict else "false") + suffix)
    return 0


def cmd_modal_check(args) -> int:
    formula = parse_formula_text(args.formula)
    if args.trace:
        with open(args.trace, encoding="utf-8") as handle:
            data = json.load(handle)
        from .parser import parse_term_text

        states = tuple(
            frozenset(parse_term_text(atom) for atom in state) for state in data
        )
        verdict = check_trace(Trace(states), args.at, formula)
    else:
        if not args.model:
            raise MvlogicError("modal-check needs --model (with --world) or --trace")
        scenario = parse_scenario_file(args.model)
        if scenario.kripke is None:
            raise MvlogicError(f"{args.model} declares no Kripke model (world/rel lines)")
        if not args.world:
            raise MvlogicError("--world is required when checking a model")
        verdict = check_world(scenario.kripke, args.world, formula)
    print("true" if verdict else "false")
    return 0


def cmd_plan(args) -> int:
    scenario = parse_scenario_file(args.domain)
    if scenario.planning is None:
        raise MvlogicError(f"{args.domain} declares no planning domain")
    init = None
    if args.init:
        atoms = frozenset(l.atom for l in parse_literal_list_text(args.init))
        init = planner.FluentState(atoms)
    goal = parse_literal_list_text(args.goal) if args.goal else None
    problem = planner.problem_from_domain(scenario.planning, init=init, goal=goal)
    plan = planner.plan_search(problem)
    if plan is None:
        print("no plan")
        return 0
    if args.emit_trace:
        trace = planner.trace_states(problem, plan)
        with open(args.emit_trace, "w", encoding="utf-8") as handle:
            json.dump(
                [sorted(str(a) for a in state) for state in trace.states], handle
            )
            handle.write("\n")
    if args.format == WIRE:
        print(bridge.serialize_plan(plan))
    else:
        for step in plan.steps:
            print(step)
    return 0


def cmd_pipeline(args) -> int:
    scenario = parse_scenario_file(args.kb)
    pipeline = orchestrator.load_pipeline(args.pipeline)
    query = parse_literal_text(args.query) if args.query else None
    result = orchestrator.run_pipeline(scenario, pipeline, query)
    if args.report_dir:
        from .report import write_pipeline_report

        for path in write_pipeline_report(result, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    if args.format == WIRE:
        print(
            json.dumps(
                [orchestrator.report_to_jsonable(r) for r in result.reports], indent=2
            )
        )
    else:
        for i, report in enumerate(result.reports):
            status = f"error: {report.error}" if report.error else report.summary
            print(f"[{i}] {report.stage}: {status}")
    return 0


def cmd_narrate(args) -> int:
    scenario = parse_scenario_file(args.story)
    if not scenario.story:
        raise MvlogicError(f"{args.story} declares no story events")
    transport = bridge.transport_from_spec(args.transport)
    fragments = bridge.narrate(
        scenario.story, scenario.kb.entity_decls, args.mode, transport
    )
    if args.format == WIRE:
        print(json.dumps(fragments))
    else:
        for fragment in fragments:
            print(fragment)
    return 0


def cmd_bridge(args) -> int:
    scenario = parse_scenario_file(args.domain)
    if scenario.planning is None:
        raise MvlogicError(f"{args.domain} declares no planning domain")
    transport = bridge.transport_from_spec(args.transport)
    session = bridge.BridgeSession(
        transport, tools=(bridge.monkey_tool(scenario.planning),)
    )
    answer = bridge.run_function_loop(session, args.prompt)
    if args.show_history:
        for message in session.history:
            call = (
                f" call={message.function_call.name}" if message.function_call else ""
            )
            print(f"-- {message.role}{call}: {message.content}", file=sys.stderr)
    print(answer)
    return 0


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mvlogic",
        description="Composite logic reasoning over .mvl knowledge bases",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate a file and print its canonical form")
    p.add_argument("file")
    _add_format(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("query", help="answer a query against the strict rules")
    p.add_argument("--kb", required=True)
    p.add_argument("query")
    _add_format(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("circumscribe", help="cautious entailment over minimal models")
    p.add_argument("--kb", required=True)
    p.add_argument("--minimize", help="comma-separated predicates to minimize")
    p.add_argument("--query", required=True)
    p.set_defaults(func=cmd_circumscribe)

    p = sub.add_parser("defeasible", help="qualified conclusion with defeat analysis")
    p.add_argument("--kb", required=True)
    p.add_argument("--query", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_defeasible)

    p = sub.add_parser("af", help="argumentation framework extensions")
    p.add_argument("file", help=".mvl with argument/attacks facts, or arg/att lines")
    p.add_argument(
        "--semantics",
        choices=("grounded", "admissible", "complete", "preferred", "stable"),
        default="grounded",
    )
    p.add_argument("--render", help="write the attack graph to this image file")
    _add_format(p)
    p.set_defaults(func=cmd_af)

    p = sub.add_parser("abduce", help="minimal abductive explanations")
    p.add_argument("--kb", required=True)
    p.add_argument("--abducibles", required=True, help="comma-separated ground atoms")
    p.add_argument("--observe", required=True, help="comma-separated observation literals")
    p.add_argument("--constraint", action="append", help="forbidden atom conjunction")
    _add_format(p)
    p.set_defaults(func=cmd_abduce)

    p = sub.add_parser("counterfactual", help="would / might / but-for evaluation")
    p.add_argument("--model", required=True)
    p.add_argument("--op", choices=("would", "might", "but-for"), default="would")
    p.add_argument("antecedent")
    p.add_argument("consequent")
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("modal-check", help="check a formula at a world or trace position")
    p.add_argument("--model", help=".mvl file with world/rel lines")
    p.add_argument("--world", help="world id to check at")
    p.add_argument("--trace", help="JSON trace file (list of atom lists)")
    p.add_argument("--at", type=int, default=0, help="trace position (default 0)")
    p.add_argument("formula")
    p.set_defaults(func=cmd_modal_check)

    p = sub.add_parser("plan", help="breadth-first planning over a domain file")
    p.add_argument("--domain", required=True)
    p.add_argument("--init", help="override the initial state (comma-separated atoms)")
    p.add_argument("--goal", help="override the goal (comma-separated literals)")
    p.add_argument("--emit-trace", help="write the state trace to this JSON file")
    _add_format(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("pipeline", help="run a composite reasoning pipeline")
    p.add_argument("--kb", required=True)
    p.add_argument("--pipeline", required=True, help="JSON pipeline spec file")
    p.add_argument("--query", help="default query for stages without one")
    p.add_argument("--report-dir", help="write report.json/report.csv and figures here")
    _add_format(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("narrate", help="narrate story events through a transport")
    p.add_argument("--story", required=True, help=".mvl file with entities and story")
    p.add_argument("--mode", choices=(bridge.WHOLE_STORY, bridge.PER_EVENT), required=True)
    p.add_argument("--transport", required=True, help="mock:<script.json> or live:<config.json>")
    _add_format(p)
    p.set_defaults(func=cmd_narrate)

    p = sub.add_parser("bridge", help="one function-calling round with the plan tool")
    p.add_argument("--domain", required=True, help=".mvl planning domain")
    p.add_argument("--transport", required=True, help="mock:<script.json> or live:<config.json>")
    p.add_argument("--prompt", required=True)
    p.add_argument("--show-history", action="store_true")
    p.set_defaults(func=cmd_bridge)

    return top


def main(argv=None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except MvlogicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
