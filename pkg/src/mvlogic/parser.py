"""Parser and renderer for the ``.mvl`` knowledge-base dialect.

A file is a sequence of statements; ``%`` starts a line comment.  The
grammar, informally::

    clause      ::= head [ ':-' body | '~>' body ] [annotations] '.'
    head        ::= ['neg'] atom
    body        ::= lit (',' lit)*
    lit         ::= ['not' | 'neg'] atom
    atom        ::= name [ '(' term (',' term)* ')' ]
    term        ::= VARIABLE | '_' | INTEGER | name [ '(' term... ')' ]
    name        ::= lowercase identifier | 'quoted atom'
    annotations ::= '[' key '=' value (',' key '=' value)* ']'
                    keys: label, tier, prio, backing, qualifier,
                          rebut=(lit, ...)  (repeatable)

    domain { c1, c2, ... }                   finite constant domain
    entities([role1, role2, ...]).           entity roles, instances are
                                             unary facts role(constant).
    story([ev1, ev2, ...]).                  ground plot events
    when trigger(V, ...) then FORMULA .      goal-inference rule
    minimize { p, ... }   fixed { ... }   vary { ... }

    world w1 { atom, ... }                   Kripke/similarity worlds
    rel alethic w1 w2                        also: deontic, belief(agent)
    modalities { alethic, belief(bob) }      declare empty relations
    actual w0                                similarity centering
    rank w1 2                                similarity distance

    sort place { c1, c2 }                    planner object sorts
    action name(V: sort, ...) {              planner action schema
      pre: lit, ...
      add: atom, ...
      del: atom, ...
    }
    init { atom, ... }
    goal { lit, ... }

Formulas use a prefix mini-syntax: ``(ob attend)``, ``(bel alice p)``,
``(eventually free(_, 'Princess Marian'))``; operators are not, and, or,
implies, box, dia, ob, pm, fb, always, eventually, hist, past, bel.

Strict rules use ``:-``, defeasible rules ``~>``.  ``not`` is negation as
failure, ``neg`` classical negation.  Rules without an explicit label get
``r1``, ``r2``, ... in file order, and rendering always writes labels, so
parse/render round-trips are exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .counterfactual import SimilarityModel
from .defeasible import ToulminRule
from .errors import KbSyntaxError
from .modal import (
    ALETHIC,
    DEONTIC,
    Always,
    And,
    Atom,
    Bel,
    Box,
    Dia,
    Eventually,
    Fb,
    Formula,
    Hist,
    Implies,
    KripkeModel,
    ModalityKey,
    Not,
    Ob,
    Or,
    Past,
    Pm,
    belief_key,
    render_formula,
    render_modality,
)
from .orchestrator import GoalInferenceRule
from .planner import ActionSchema, FluentState, PlanningDomain
from .terms import (
    TIER_BY_NAME,
    Compound,
    Constant,
    KnowledgeBase,
    Literal,
    Rule,
    RuleKind,
    Sign,
    Term,
    Tier,
    Variable,
    is_ground,
    render_name,
)

# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"%[^\n]*"),
    ("ARROW", r"~>"),
    ("IF", r":-"),
    ("INT", r"[0-9]+"),
    ("IDENT", r"[a-z][A-Za-z0-9_]*"),
    ("VAR", r"[A-Z_][A-Za-z0-9_]*"),
    ("QUOTED", r"'[^'\n]*'"),
    ("STRING", r"\"[^\"\n]*\""),
    ("PUNCT", r"[(){}\[\],.:=]"),
]

_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise KbSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("WS", "COMMENT"):
            value = text
            if kind == "PUNCT":
                kind = text
            tokens.append(Token(kind, value, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parsed document
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """Everything one ``.mvl`` file can declare."""

    kb: KnowledgeBase = field(default_factory=KnowledgeBase)
    toulmin: tuple[ToulminRule, ...] = ()
    kripke: Optional[KripkeModel] = None
    similarity: Optional[SimilarityModel] = None
    planning: Optional[PlanningDomain] = None
    story: tuple[Term, ...] = ()
    goal_rules: tuple[GoalInferenceRule, ...] = ()
    minimized: frozenset[str] = frozenset()
    fixed_decl: Optional[frozenset[str]] = None
    varied_decl: Optional[frozenset[str]] = None
    assumptions: tuple[str, ...] = ()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self._wildcards = 0

    # -- token plumbing ------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise KbSyntaxError(
                f"expected {kind!r}, found {tok.value or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        return tok

    def error(self, message: str) -> KbSyntaxError:
        tok = self.peek()
        return KbSyntaxError(message, tok.line, tok.column)

    # -- document ------------------------------------------------------

    def parse_document(self) -> Scenario:
        rules: list[Rule] = []
        toulmin: list[ToulminRule] = []
        auto_label = 0
        explicit_domain: Optional[set[Constant]] = None
        entity_roles: list[str] = []
        story: list[Term] = []
        goal_rules: list[GoalInferenceRule] = []
        worlds: dict[str, frozenset[Term]] = {}
        relations: dict[ModalityKey, set[tuple[str, str]]] = {}
        actual: Optional[str] = None
        ranks: dict[str, int] = {}
        sorts: list[tuple[str, tuple[Constant, ...]]] = []
        schemas: list[ActionSchema] = []
        init_state: Optional[FluentState] = None
        plan_goal: tuple[Literal, ...] = ()
        minimized: set[str] = set()
        fixed_decl: Optional[set[str]] = None
        varied_decl: Optional[set[str]] = None

        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "IDENT" and self._section_shape(tok.value):
                keyword = tok.value
                if keyword == "domain":
                    explicit_domain = set(self._parse_constant_block())
                elif keyword == "entities":
                    entity_roles.extend(self._parse_entities())
                elif keyword == "story":
                    story.extend(self._parse_story())
                elif keyword == "when":
                    goal_rules.append(self._parse_goal_rule())
                elif keyword == "world":
                    name, atoms = self._parse_world()
                    if name in worlds:
                        raise self.error(f"world {name} declared twice")
                    worlds[name] = atoms
                elif keyword == "rel":
                    key, a, b = self._parse_rel()
                    relations.setdefault(key, set()).add((a, b))
                elif keyword == "modalities":
                    for key in self._parse_modalities():
                        relations.setdefault(key, set())
                elif keyword == "actual":
                    self.next()
                    actual = self.expect("IDENT").value
                elif keyword == "rank":
                    self.next()
                    world = self.expect("IDENT").value
                    ranks[world] = int(self.expect("INT").value)
                elif keyword == "sort":
                    sorts.append(self._parse_sort())
                elif keyword == "action":
                    schemas.append(self._parse_action())
                elif keyword == "init":
                    init_state = FluentState(frozenset(self._parse_atom_block("init")))
                elif keyword == "goal":
                    plan_goal = tuple(self._parse_literal_block("goal"))
                elif keyword == "minimize":
                    minimized.update(self._parse_name_block())
                elif keyword == "fixed":
                    fixed_decl = set(self._parse_name_block())
                elif keyword == "vary":
                    varied_decl = set(self._parse_name_block())
                else:  # unreachable
                    raise self.error(f"unhandled section {keyword}")
                continue

            rule, wrapper, labeled = self._parse_clause(auto_label + 1)
            if not labeled:
                auto_label += 1
            rules.append(rule)
            if wrapper is not None:
                toulmin.append(wrapper)

        kb = self._build_kb(rules, entity_roles, explicit_domain)
        kripke, similarity = self._build_models(worlds, relations, actual, ranks)
        planning = None
        if sorts or schemas or init_state is not None or plan_goal:
            planning = PlanningDomain(
                tuple(sorts), tuple(schemas), init_state, plan_goal
            )
        return Scenario(
            kb=kb,
            toulmin=tuple(toulmin),
            kripke=kripke,
            similarity=similarity,
            planning=planning,
            story=tuple(story),
            goal_rules=tuple(goal_rules),
            minimized=frozenset(minimized),
            fixed_decl=frozenset(fixed_decl) if fixed_decl is not None else None,
            varied_decl=frozenset(varied_decl) if varied_decl is not None else None,
        )

    def _section_shape(self, keyword: str) -> bool:
        """Section keywords are only sections in their expected shape, so
        ordinary predicates may reuse most of these names."""
        nxt = self.peek(1)
        if keyword in ("domain", "init", "goal", "minimize", "fixed", "vary", "modalities"):
            return nxt.kind == "{"
        if keyword in ("entities", "story"):
            return nxt.kind == "(" and self.peek(2).kind == "["
        if keyword == "world":
            return nxt.kind == "IDENT" and self.peek(2).kind == "{"
        if keyword in ("rel", "actual"):
            return nxt.kind == "IDENT"
        if keyword == "rank":
            return nxt.kind == "IDENT" and self.peek(2).kind == "INT"
        if keyword == "sort":
            return nxt.kind == "IDENT" and self.peek(2).kind == "{"
        if keyword == "action":
            return nxt.kind in ("IDENT", "QUOTED") and self.peek(2).kind == "("
        if keyword == "when":
            return nxt.kind in ("IDENT", "QUOTED")
        return False

    def _build_kb(self, rules, entity_roles, explicit_domain) -> KnowledgeBase:
        mentioned: set[Constant] = set()
        for rule in rules:
            mentioned.update(rule.constants())
        decls = []
        for role in entity_roles:
            instances = []
            for rule in rules:
                if (
                    rule.is_fact
                    and rule.head.sign is Sign.POS
                    and isinstance(rule.head.atom, Compound)
                    and rule.head.atom.functor == role
                    and len(rule.head.atom.args) == 1
                    and isinstance(rule.head.atom.args[0], Constant)
                ):
                    instances.append(rule.head.atom.args[0])
            decls.append((role, tuple(instances)))
            mentioned.update(instances)
        if explicit_domain is not None:
            outside = mentioned - explicit_domain
            if outside:
                names = ", ".join(sorted(str(c) for c in outside))
                raise KbSyntaxError(f"constants outside the declared domain: {names}")
            domain = frozenset(explicit_domain)
        else:
            domain = frozenset(mentioned)
        try:
            return KnowledgeBase(tuple(rules), tuple(decls), domain)
        except ValueError as exc:
            raise KbSyntaxError(str(exc)) from exc

    def _build_models(self, worlds, relations, actual, ranks):
        kripke = similarity = None
        if relations and not worlds:
            raise KbSyntaxError("relations declared without any world")
        if worlds and relations:
            kripke = KripkeModel(
                frozenset(worlds),
                {k: frozenset(v) for k, v in relations.items()},
                dict(worlds),
            )
        if actual is not None:
            if actual not in worlds:
                raise KbSyntaxError(f"actual world {actual} is not declared")
            try:
                similarity = SimilarityModel(frozenset(worlds), dict(worlds), actual, ranks)
            except ValueError as exc:
                raise KbSyntaxError(str(exc)) from exc
        return kripke, similarity

    # -- sections ------------------------------------------------------

    def _parse_constant_block(self) -> list[Constant]:
        self.next()  # keyword
        self.expect("{")
        out: list[Constant] = []
        while self.peek().kind != "}":
            term = self.parse_term()
            if not isinstance(term, Constant):
                raise self.error("domain members must be constants")
            out.append(term)
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return out

    def _parse_name_block(self) -> list[str]:
        self.next()
        self.expect("{")
        out = []
        while self.peek().kind != "}":
            out.append(self.expect("IDENT").value)
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return out

    def _parse_entities(self) -> list[str]:
        self.next()
        self.expect("(")
        self.expect("[")
        roles = []
        while self.peek().kind != "]":
            roles.append(self.expect("IDENT").value)
            if self.peek().kind == ",":
                self.next()
        self.expect("]")
        self.expect(")")
        self.expect(".")
        return roles

    def _parse_story(self) -> list[Term]:
        self.next()
        self.expect("(")
        self.expect("[")
        events = []
        while self.peek().kind != "]":
            event = self.parse_atom_term()
            if not is_ground(event):
                raise self.error("story events must be ground")
            events.append(event)
            if self.peek().kind == ",":
                self.next()
        self.expect("]")
        self.expect(")")
        self.expect(".")
        return events

    def _parse_goal_rule(self) -> GoalInferenceRule:
        self.next()  # when
        trigger = self.parse_atom_term()
        if not isinstance(trigger, Compound):
            raise self.error("goal-rule triggers must be compound event patterns")
        then = self.expect("IDENT")
        if then.value != "then":
            raise KbSyntaxError("expected 'then'", then.line, then.column)
        goal = self.parse_formula()
        self.expect(".")
        try:
            return GoalInferenceRule(trigger, goal)
        except ValueError as exc:
            raise self.error(str(exc)) from exc

    def _parse_world(self) -> tuple[str, frozenset[Term]]:
        self.next()
        name = self.expect("IDENT").value
        atoms = self._parse_atom_block_body()
        return name, frozenset(atoms)

    def _parse_modality_key(self) -> ModalityKey:
        tok = self.expect("IDENT")
        if tok.value == "belief":
            self.expect("(")
            agent = self.expect("IDENT").value
            self.expect(")")
            return belief_key(agent)
        if tok.value in (ALETHIC, DEONTIC):
            return tok.value
        raise KbSyntaxError(
            f"unknown modality {tok.value}; use alethic, deontic, or belief(agent)",
            tok.line,
            tok.column,
        )

    def _parse_rel(self):
        self.next()
        key = self._parse_modality_key()
        a = self.expect("IDENT").value
        b = self.expect("IDENT").value
        return key, a, b

    def _parse_modalities(self) -> list[ModalityKey]:
        self.next()
        self.expect("{")
        keys = []
        while self.peek().kind != "}":
            keys.append(self._parse_modality_key())
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return keys

    def _parse_sort(self) -> tuple[str, tuple[Constant, ...]]:
        self.next()
        name = self.expect("IDENT").value
        self.expect("{")
        members: list[Constant] = []
        while self.peek().kind != "}":
            term = self.parse_term()
            if not isinstance(term, Constant):
                raise self.error("sort members must be constants")
            members.append(term)
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return name, tuple(members)

    def _parse_action(self) -> ActionSchema:
        self.next()
        name_tok = self.next()
        name = self._name_of(name_tok)
        self.expect("(")
        params: list[tuple[Variable, str]] = []
        while self.peek().kind != ")":
            var_tok = self.expect("VAR")
            self.expect(":")
            sort = self.expect("IDENT").value
            params.append((Variable(var_tok.value), sort))
            if self.peek().kind == ",":
                self.next()
        self.expect(")")
        self.expect("{")
        pre: tuple[Literal, ...] = ()
        adds: tuple[Term, ...] = ()
        deletes: tuple[Term, ...] = ()
        while self.peek().kind != "}":
            key = self.expect("IDENT")
            self.expect(":")
            if key.value == "pre":
                pre = tuple(self._parse_literal_list())
            elif key.value == "add":
                adds = tuple(lit.atom for lit in self._parse_literal_list())
            elif key.value == "del":
                deletes = tuple(lit.atom for lit in self._parse_literal_list())
            else:
                raise KbSyntaxError(
                    f"expected pre/add/del, found {key.value}", key.line, key.column
                )
        self.expect("}")
        try:
            return ActionSchema(name, tuple(params), pre, adds, deletes)
        except ValueError as exc:
            raise self.error(str(exc)) from exc

    def _parse_atom_block(self, _context: str) -> list[Term]:
        self.next()
        return self._parse_atom_block_body()

    def _parse_atom_block_body(self) -> list[Term]:
        self.expect("{")
        atoms: list[Term] = []
        while self.peek().kind != "}":
            atom = self.parse_atom_term()
            if not is_ground(atom):
                raise self.error(f"expected a ground atom, found {atom}")
            atoms.append(atom)
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return atoms

    def _parse_literal_block(self, _context: str) -> list[Literal]:
        self.next()
        self.expect("{")
        literals: list[Literal] = []
        while self.peek().kind != "}":
            literals.append(self.parse_literal())
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return literals

    # -- clauses ---------------------------------------------------------

    def _parse_clause(self, next_auto: int):
        head = self.parse_literal()
        if head.sign is Sign.NAF:
            raise self.error("rule heads cannot be naf-negative")
        body: tuple[Literal, ...] = ()
        kind = RuleKind.STRICT
        tok = self.peek()
        if tok.kind in ("IF", "ARROW"):
            self.next()
            kind = RuleKind.STRICT if tok.kind == "IF" else RuleKind.DEFEASIBLE
            body = tuple(self._parse_literal_list())
        annotations = self._parse_annotations() if self.peek().kind == "[" else {}
        self.expect(".")

        label = annotations.get("label")
        labeled = label is not None
        if label is None:
            label = f"r{next_auto}"
        tier = annotations.get("tier")
        if kind is RuleKind.DEFEASIBLE and tier is None:
            tier = Tier.PERSONAL
        rule = Rule(
            label=label,
            head=head,
            body=body,
            kind=kind,
            tier=tier,
            priority=annotations.get("prio"),
        )
        wrapper = None
        if kind is RuleKind.DEFEASIBLE:
            wrapper = ToulminRule(
                base=rule,
                backing=annotations.get("backing"),
                rebuttals=tuple(annotations.get("rebut", ())),
                qualifier=annotations.get("qualifier", "presumably"),
            )
        elif any(k in annotations for k in ("backing", "qualifier", "rebut")):
            raise self.error("toulmin annotations require a defeasible rule (~>)")
        return rule, wrapper, labeled

    def _parse_literal_list(self) -> list[Literal]:
        literals = [self.parse_literal()]
        while self.peek().kind == ",":
            self.next()
            literals.append(self.parse_literal())
        return literals

    def _parse_annotations(self) -> dict:
        self.expect("[")
        out: dict = {}
        while self.peek().kind != "]":
            key = self.expect("IDENT").value
            self.expect("=")
            if key == "label":
                out["label"] = self.expect("IDENT").value
            elif key == "tier":
                tok = self.expect("IDENT")
                tier = TIER_BY_NAME.get(tok.value)
                if tier is None:
                    raise KbSyntaxError(
                        f"unknown tier {tok.value}", tok.line, tok.column
                    )
                out["tier"] = tier
            elif key == "prio":
                out["prio"] = int(self.expect("INT").value)
            elif key == "rebut":
                self.expect("(")
                conj = tuple(self._parse_literal_list())
                self.expect(")")
                out.setdefault("rebut", []).append(conj)
            elif key in ("backing", "qualifier"):
                tok = self.next()
                if tok.kind not in ("STRING", "QUOTED", "IDENT"):
                    raise KbSyntaxError(
                        f"{key} takes a string", tok.line, tok.column
                    )
                out[key] = tok.value.strip("\"'") if tok.kind != "IDENT" else tok.value
            else:
                raise self.error(f"unknown annotation key {key}")
            if self.peek().kind == ",":
                self.next()
        self.expect("]")
        return out

    # -- literals, atoms, terms ------------------------------------------

    def parse_literal(self) -> Literal:
        tok = self.peek()
        sign = Sign.POS
        if tok.kind == "IDENT" and tok.value in ("not", "neg"):
            follower = self.peek(1)
            if follower.kind in ("IDENT", "QUOTED"):
                self.next()
                sign = Sign.NAF if tok.value == "not" else Sign.NEG
        atom = self.parse_atom_term()
        if isinstance(atom, Variable):
            raise self.error("a literal cannot be a bare variable")
        return Literal(atom, sign)

    def parse_atom_term(self) -> Term:
        tok = self.next()
        if tok.kind not in ("IDENT", "QUOTED"):
            raise KbSyntaxError(
                f"expected an atom, found {tok.value!r}", tok.line, tok.column
            )
        name = self._name_of(tok)
        # an argument list opens only when the paren hugs the functor,
        # so "(and p (not q))" never reads p as a compound
        opener = self.peek()
        if opener.kind == "(" and (
            opener.line == tok.line
            and opener.column == tok.column + len(tok.value)
        ):
            self.next()
            args = [self.parse_term()]
            while self.peek().kind == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
            return Compound(name, tuple(args))
        return Constant(name)

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "VAR":
            self.next()
            if tok.value == "_":
                # fresh per occurrence, deterministic per document
                self._wildcards += 1
                return Variable(f"_G{self._wildcards}")
            return Variable(tok.value)
        if tok.kind == "INT":
            self.next()
            return Constant(tok.value)
        return self.parse_atom_term()

    def _name_of(self, tok: Token) -> str:
        return tok.value[1:-1] if tok.kind == "QUOTED" else tok.value

    # -- formulas ----------------------------------------------------------

    _UNARY = {
        "not": Not,
        "box": Box,
        "dia": Dia,
        "ob": Ob,
        "pm": Pm,
        "fb": Fb,
        "always": Always,
        "eventually": Eventually,
        "hist": Hist,
        "past": Past,
    }

    def parse_formula(self) -> Formula:
        tok = self.peek()
        if tok.kind != "(":
            return Atom(self.parse_atom_term())
        # distinguish "(op ...)" from a parenthesized grouping
        self.next()
        op = self.peek()
        if op.kind == "IDENT" and (
            op.value in self._UNARY or op.value in ("and", "or", "implies", "bel")
        ):
            self.next()
            if op.value in self._UNARY:
                sub = self.parse_formula()
                out: Formula = self._UNARY[op.value](sub)
            elif op.value == "bel":
                agent = self.expect("IDENT").value
                out = Bel(agent, self.parse_formula())
            else:
                parts = [self.parse_formula(), self.parse_formula()]
                while self.peek().kind != ")":
                    parts.append(self.parse_formula())
                if op.value == "implies" and len(parts) != 2:
                    raise self.error("implies takes exactly two formulas")
                node = And if op.value == "and" else (Or if op.value == "or" else Implies)
                out = parts[-1]
                for part in reversed(parts[:-1]):
                    out = node(part, out)
            self.expect(")")
            return out
        inner = self.parse_formula()
        self.expect(")")
        return inner


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def parse_scenario(source: str) -> Scenario:
    return _Parser(tokenize(source)).parse_document()


def parse_scenario_file(path) -> Scenario:
    with open(path, encoding="utf-8") as handle:
        return parse_scenario(handle.read())


def parse_kb(source: str) -> KnowledgeBase:
    """Parse source text and return its knowledge base."""
    return parse_scenario(source).kb


def parse_literal_text(text: str) -> Literal:
    parser = _Parser(tokenize(text))
    literal = parser.parse_literal()
    parser.expect("EOF")
    return literal


def parse_literal_list_text(text: str) -> tuple[Literal, ...]:
    """A comma-separated literal conjunction, e.g. CLI --goal values."""
    parser = _Parser(tokenize(text))
    literals = parser._parse_literal_list()
    parser.expect("EOF")
    return tuple(literals)


def parse_term_text(text: str) -> Term:
    parser = _Parser(tokenize(text))
    term = parser.parse_term()
    parser.expect("EOF")
    return term


def parse_formula_text(text: str) -> Formula:
    parser = _Parser(tokenize(text))
    formula = parser.parse_formula()
    parser.expect("EOF")
    return formula


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render_literal(lit: Literal) -> str:
    return str(lit)


def _render_rule(rule: Rule, wrapper: Optional[ToulminRule]) -> str:
    parts = [str(rule.head)]
    if rule.body:
        arrow = " :- " if rule.kind is RuleKind.STRICT else " ~> "
        parts.append(arrow + ", ".join(str(b) for b in rule.body))
    annotations = [f"label={rule.label}"]
    if rule.tier is not None:
        annotations.append(f"tier={rule.tier}")
    if rule.priority is not None:
        annotations.append(f"prio={rule.priority}")
    if wrapper is not None:
        for conj in wrapper.rebuttals:
            annotations.append("rebut=(" + ", ".join(str(l) for l in conj) + ")")
        if wrapper.backing is not None:
            annotations.append(f'backing="{wrapper.backing}"')
        if wrapper.qualifier != "presumably":
            annotations.append(f'qualifier="{wrapper.qualifier}"')
    return "".join(parts) + " [" + ", ".join(annotations) + "]."


def render_kb(kb: KnowledgeBase, toulmin: tuple[ToulminRule, ...] = ()) -> str:
    """Canonical text whose re-parse is structurally equal to the input."""
    wrappers = {t.label: t for t in toulmin}
    lines = []
    if kb.constant_domain:
        names = ", ".join(sorted(str(c) for c in kb.constant_domain))
        lines.append("domain { " + names + " }")
    if kb.entity_decls:
        lines.append("entities([" + ", ".join(role for role, _ in kb.entity_decls) + "]).")
    for rule in kb.rules:
        lines.append(_render_rule(rule, wrappers.get(rule.label)))
    return "\n".join(lines) + "\n"


def render_scenario(scenario: Scenario) -> str:
    lines = [render_kb(scenario.kb, scenario.toulmin).rstrip("\n")]
    if scenario.minimized:
        lines.append("minimize { " + ", ".join(sorted(scenario.minimized)) + " }")
    if scenario.fixed_decl is not None:
        lines.append("fixed { " + ", ".join(sorted(scenario.fixed_decl)) + " }")
    if scenario.varied_decl is not None:
        lines.append("vary { " + ", ".join(sorted(scenario.varied_decl)) + " }")

    worlds = {}
    if scenario.kripke is not None:
        worlds.update(scenario.kripke.valuation)
    if scenario.similarity is not None:
        worlds.update(scenario.similarity.valuation)
    for name in sorted(worlds):
        atoms = ", ".join(sorted(str(a) for a in worlds[name]))
        lines.append("world " + name + " { " + atoms + " }")
    if scenario.kripke is not None:
        for key in sorted(scenario.kripke.relations, key=render_modality):
            pairs = scenario.kripke.relations[key]
            if not pairs:
                lines.append("modalities { " + render_modality(key) + " }")
            for a, b in sorted(pairs):
                lines.append(f"rel {render_modality(key)} {a} {b}")
    if scenario.similarity is not None:
        lines.append(f"actual {scenario.similarity.actual}")
        for world in sorted(scenario.similarity.rank):
            if world != scenario.similarity.actual:
                lines.append(f"rank {world} {scenario.similarity.rank[world]}")

    if scenario.planning is not None:
        domain = scenario.planning
        for name, members in domain.sorts:
            lines.append(
                "sort " + name + " { " + ", ".join(str(m) for m in members) + " }"
            )
        for schema in domain.schemas:
            params = ", ".join(f"{v.name}: {sort}" for v, sort in schema.params)
            lines.append(f"action {render_name(schema.name)}({params}) {{")
            if schema.preconditions:
                lines.append("  pre: " + ", ".join(str(l) for l in schema.preconditions))
            if schema.adds:
                lines.append("  add: " + ", ".join(str(a) for a in schema.adds))
            if schema.deletes:
                lines.append("  del: " + ", ".join(str(d) for d in schema.deletes))
            lines.append("}")
        if domain.init is not None:
            lines.append("init { " + ", ".join(str(a) for a in domain.init) + " }")
        if domain.goal:
            lines.append("goal { " + ", ".join(str(l) for l in domain.goal) + " }")

    for rule in scenario.goal_rules:
        lines.append(f"when {rule.trigger} then {render_formula(rule.goal)}.")
    if scenario.story:
        lines.append("story([" + ", ".join(str(e) for e in scenario.story) + "]).")
    return "\n".join(line for line in lines if line) + "\n"
