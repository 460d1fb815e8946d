"""Composable reasoning pipelines over one knowledge base, plus temporal
goal-inference rules that turn observed events into planner goals.

Stages run in declaration order, each reading the knowledge base as
filtered or augmented by its predecessors: context filtering narrows the
rule set in focus, defeat analysis marks beaten rules inert, abduction may
adopt hypothesis facts (always tagged as assumptions, never silently
merged), and planning consumes whatever survives.  The first failing stage
aborts the run with its error in the final report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional

from . import abduction, argumentation, counterfactual, planner
from .defeasible import Status, conclude
from .errors import MvlogicError
from .modal import Atom, Formula, check_trace, check_world, render_formula
from .terms import (
    Compound,
    Literal,
    Rule,
    Sign,
    Substitution,
    match,
    term_variables,
)

STAGE_KINDS = (
    "circumscribe",
    "defeasible",
    "argue",
    "abduce",
    "counterfactual",
    "believe",
    "plan",
)


@dataclass(frozen=True)
class StageSpec:
    kind: str
    config: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STAGE_KINDS:
            raise ValueError(f"unknown stage kind: {self.kind}")
        object.__setattr__(self, "config", dict(self.config))


@dataclass(frozen=True)
class Pipeline:
    stages: tuple[StageSpec, ...] = ()


@dataclass(frozen=True)
class GoalInferenceRule:
    """When an event matches the trigger pattern, emit the goal formula
    instantiated with the trigger's bindings."""

    trigger: Compound
    goal: Formula

    def __post_init__(self):
        trigger_vars = set(term_variables(self.trigger))
        for var in _formula_variables(self.goal):
            if var.name.startswith("_"):
                continue  # wildcards are existential, not template slots
            if var not in trigger_vars:
                raise ValueError(
                    f"goal template variable {var.name} not bound by the trigger"
                )


def _formula_variables(f: Formula):
    if isinstance(f, Atom):
        yield from term_variables(f.pattern)
        return
    for attr in ("sub", "left", "right"):
        child = getattr(f, attr, None)
        if child is not None:
            yield from _formula_variables(child)


def substitute_formula(f: Formula, theta: Substitution) -> Formula:
    if isinstance(f, Atom):
        return Atom(theta.apply(f.pattern))
    fields = {}
    if hasattr(f, "agent"):
        fields["agent"] = f.agent
    for attr in ("sub", "left", "right"):
        child = getattr(f, attr, None)
        if child is not None:
            fields[attr] = substitute_formula(child, theta)
    return type(f)(**fields)


def infer_goals(
    rules, events
) -> tuple[tuple[Formula, Substitution], ...]:
    """Instantiated goal formulas for every event unifying with a trigger;
    duplicates removed, order follows event order."""
    out: list[tuple[Formula, Substitution]] = []
    seen = set()
    for event in events:
        for rule in rules:
            bound = match(rule.trigger, event)
            if bound is None:
                continue
            theta = Substitution.of(bound)
            goal = substitute_formula(rule.goal, theta)
            key = (render_formula(goal), theta.pairs)
            if key not in seen:
                seen.add(key)
                out.append((goal, theta))
    return tuple(out)


# ---------------------------------------------------------------------------
# Pipeline execution
# ---------------------------------------------------------------------------


@dataclass
class StageReport:
    stage: str
    summary: str
    outputs: dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass(frozen=True)
class PipelineResult:
    reports: tuple[StageReport, ...]
    scenario: Any  # the staged Scenario, for feeding into further pipelines


def load_pipeline(path) -> Pipeline:
    """Read a pipeline spec file: {"stages": [{"kind": ..., ...config}]}."""
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    stages = []
    for entry in data.get("stages", []):
        config = {k: v for k, v in entry.items() if k != "kind"}
        stages.append(StageSpec(entry["kind"], config))
    return Pipeline(tuple(stages))


def run_pipeline(scenario, pipeline: Pipeline, query: Optional[Literal] = None) -> PipelineResult:
    """Execute the stages in order against the scenario's knowledge base.

    ``scenario`` is a parsed document (or a bare KnowledgeBase, which gets
    wrapped).  Stage configs hold plain strings; literals and formulas in
    them are parsed on use.
    """
    from .parser import Scenario  # deferred: parser depends on this module

    if not hasattr(scenario, "kb"):
        scenario = Scenario(kb=scenario)

    reports: list[StageReport] = []
    current = scenario
    for spec in pipeline.stages:
        runner = _STAGES[spec.kind]
        try:
            current, report = runner(current, dict(spec.config), query)
        except (MvlogicError, ValueError, KeyError) as exc:
            reports.append(StageReport(spec.kind, "stage failed", error=str(exc)))
            break
        reports.append(report)
    return PipelineResult(tuple(reports), current)


def _parse_literal(text: str) -> Literal:
    from .parser import parse_literal_text

    return parse_literal_text(text)


def _parse_literal_list(text: str) -> tuple[Literal, ...]:
    from .parser import parse_literal_list_text

    return parse_literal_list_text(text)


def _parse_formula(text: str) -> Formula:
    from .parser import parse_formula_text

    return parse_formula_text(text)


def _rule_mentions(rule: Rule, focus: frozenset[str]) -> bool:
    if rule.head.predicate in focus:
        return True
    return any(lit.predicate in focus for lit in rule.body)


def _stage_circumscribe(scenario, config, query):
    """Delimit the context: keep only rules mentioning a focus predicate."""
    focus = frozenset(config.get("focus", ()))
    kept, dropped = [], []
    for rule in scenario.kb.rules:
        (kept if _rule_mentions(rule, focus) else dropped).append(rule.label)
    kb = scenario.kb.without_rules(dropped)
    toulmin = tuple(t for t in scenario.toulmin if t.label not in set(dropped))
    out = replace(scenario, kb=kb, toulmin=toulmin)
    report = StageReport(
        "circumscribe",
        f"kept {len(kept)} rules, dropped {len(dropped)}",
        {"focus": sorted(focus), "kept": kept, "dropped": dropped},
    )
    return out, report


def _stage_defeasible(scenario, config, query):
    """Conclude the configured queries; rules defeated on top go inert."""
    texts = config.get("queries")
    queries = [_parse_literal(t) for t in texts] if texts else []
    if not queries and query is not None:
        queries = [query]
    conclusions = []
    inert: list[str] = []
    for q in queries:
        conclusion = conclude(scenario.kb, scenario.toulmin, q)
        conclusions.append(conclusion)
        if conclusion.status is Status.DEFEATED and conclusion.justification:
            top = conclusion.justification.rule_label
            if top and any(t.label == top for t in scenario.toulmin):
                inert.append(top)
    kb = scenario.kb.without_rules(inert)
    toulmin = tuple(t for t in scenario.toulmin if t.label not in set(inert))
    out = replace(scenario, kb=kb, toulmin=toulmin)
    report = StageReport(
        "defeasible",
        f"{len(conclusions)} conclusions, {len(inert)} rules marked inert",
        {
            "conclusions": [
                {
                    "query": str(c.literal),
                    "status": str(c.status),
                    "defeater": c.defeater,
                    "qualifier": c.qualifier,
                }
                for c in conclusions
            ],
            "inert": inert,
        },
    )
    return out, report


def framework_from_kb(kb) -> argumentation.ArgFramework:
    """Read arg/att (or argument/attacks) facts into a framework."""
    args: set[str] = set()
    attacks: set[tuple[str, str]] = set()
    for rule in kb.facts():
        atom = rule.head.atom
        if rule.head.sign is not Sign.POS or not isinstance(atom, Compound):
            continue
        names = [str(a) for a in atom.args]
        if atom.functor in ("arg", "argument") and len(names) == 1:
            args.add(names[0])
        elif atom.functor in ("att", "attacks") and len(names) == 2:
            attacks.add((names[0], names[1]))
            args.update(names)
    return argumentation.ArgFramework(frozenset(args), frozenset(attacks))


def _stage_argue(scenario, config, query):
    """Compute extensions; optionally bind arguments to rule labels and
    mark rules for unaccepted arguments inert."""
    semantics = config.get("semantics", argumentation.GROUNDED)
    af = framework_from_kb(scenario.kb)
    exts = argumentation.extensions(af, semantics)
    accepted: set[str] = set()
    for ext in exts:
        accepted |= ext.members
    inert = []
    for arg, label in dict(config.get("bind", {})).items():
        if arg not in accepted and any(r.label == label for r in scenario.kb.rules):
            inert.append(label)
    kb = scenario.kb.without_rules(inert)
    toulmin = tuple(t for t in scenario.toulmin if t.label not in set(inert))
    out = replace(scenario, kb=kb, toulmin=toulmin)
    report = StageReport(
        "argue",
        f"{len(exts)} {semantics} extension(s)",
        {
            "semantics": semantics,
            "extensions": [sorted(e.members) for e in exts],
            "inert": inert,
            "_framework": af,
        },
    )
    return out, report


def _stage_abduce(scenario, config, query):
    """Enumerate explanations; under adopt=unique a single minimal
    explanation is added as assumption-tagged facts."""
    abducibles = frozenset(
        _parse_literal(t).atom for t in config.get("abducibles", ())
    )
    observe_cfg = config.get("observe") or ([str(query)] if query else [])
    observation = tuple(_parse_literal(t) for t in observe_cfg)
    constraints = tuple(
        tuple(_parse_literal(t) for t in group)
        for group in config.get("constraints", ())
    )
    problem = abduction.AbductionProblem(
        scenario.kb, abducibles, observation, constraints
    )
    found = abduction.explanations(problem)
    adopted: list[str] = []
    out = scenario
    if config.get("adopt") == "unique" and len(found) == 1:
        facts = []
        for i, atom in enumerate(sorted(found[0], key=str)):
            label = _fresh_label(scenario.kb, f"assume_{i + 1}")
            facts.append(Rule(label=label, head=Literal(atom)))
            adopted.append(label)
        kb = scenario.kb.with_rules(tuple(facts))
        out = replace(
            scenario, kb=kb, assumptions=scenario.assumptions + tuple(adopted)
        )
    report = StageReport(
        "abduce",
        f"{len(found)} minimal explanation(s)",
        {
            "observation": [str(l) for l in observation],
            "explanations": [sorted(str(a) for a in h) for h in found],
            "assumptions": adopted,
        },
    )
    return out, report


def _fresh_label(kb, prefix: str) -> str:
    labels = {r.label for r in kb.rules}
    if prefix not in labels:
        return prefix
    i = 2
    while f"{prefix}_{i}" in labels:
        i += 1
    return f"{prefix}_{i}"


def _stage_counterfactual(scenario, config, query):
    model = scenario.similarity
    if model is None:
        raise MvlogicError("counterfactual stage needs a similarity model in the scenario")
    op = config.get("op", "would")
    a = _parse_formula(config["a"])
    b = _parse_formula(config["b"])
    if op == "would":
        verdict = counterfactual.would(model, a, b)
        vacuous = counterfactual.is_vacuous(model, a)
    elif op == "might":
        verdict = counterfactual.might(model, a, b)
        vacuous = False
    elif op in ("but_for", "but-for"):
        verdict = counterfactual.but_for(model, a, b)
        vacuous = False
    else:
        raise MvlogicError(f"unknown counterfactual op: {op}")
    report = StageReport(
        "counterfactual",
        f"{op}({render_formula(a)}, {render_formula(b)}) = {str(verdict).lower()}",
        {"op": op, "verdict": verdict, "vacuous": vacuous},
    )
    return scenario, report


def _stage_believe(scenario, config, query):
    model = scenario.kripke
    if model is None:
        raise MvlogicError("believe stage needs a Kripke model in the scenario")
    world = config["world"]
    formulas = [_parse_formula(t) for t in config.get("formulas", ())]
    verdicts = [
        {"formula": render_formula(f), "verdict": check_world(model, world, f)}
        for f in formulas
    ]
    report = StageReport(
        "believe",
        f"checked {len(verdicts)} formula(s) at {world}",
        {"world": world, "verdicts": verdicts},
    )
    return scenario, report


def _stage_plan(scenario, config, query):
    """Plan over the surviving scenario; report hypothesis passthrough when
    there is nothing to plan with."""
    domain = scenario.planning
    if domain is None or not domain.schemas:
        report = StageReport(
            "plan",
            "no action schemas in scope; passing knowledge through",
            {"plan": None, "assumptions": list(scenario.assumptions)},
        )
        return scenario, report
    goal_text = config.get("goal")
    goal = _parse_literal_list(goal_text) if goal_text else None
    problem = planner.problem_from_domain(domain, goal=goal)
    plan = planner.plan_search(problem)
    outputs: dict[str, Any] = {
        "goal": [str(l) for l in problem.goal],
        "plan": [str(s) for s in plan.steps] if plan else None,
        "assumptions": list(scenario.assumptions),
    }
    summary = f"plan of length {len(plan)}" if plan else "no plan reachable"
    if plan is not None:
        trace = planner.trace_states(problem, plan)
        outputs["_trace"] = trace
        check_text = config.get("check")
        if check_text:
            f = _parse_formula(check_text)
            outputs["check"] = {
                "formula": render_formula(f),
                "verdict": check_trace(trace, 0, f),
            }
    report = StageReport("plan", summary, outputs)
    return scenario, report


_STAGES = {
    "circumscribe": _stage_circumscribe,
    "defeasible": _stage_defeasible,
    "argue": _stage_argue,
    "abduce": _stage_abduce,
    "counterfactual": _stage_counterfactual,
    "believe": _stage_believe,
    "plan": _stage_plan,
}


def report_to_jsonable(report: StageReport) -> dict:
    """Drop non-serializable working objects (underscore keys)."""
    outputs = {k: v for k, v in report.outputs.items() if not k.startswith("_")}
    return {
        "stage": report.stage,
        "summary": report.summary,
        "outputs": outputs,
        "error": report.error,
    }
