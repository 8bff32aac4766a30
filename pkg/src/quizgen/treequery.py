"""Compiler and matcher for a small tree-pattern language over parse trees.

The language supports exact labels, label alternations, an anchored regex
form (``/VB.?/``), the ``__`` wildcard, immediate dominance (``<``),
dominance (``<<``) and negated constraints (``!<``, ``!<<``).  Matchers
applied to leaf nodes compare against the token surface, lowercased, so
``/VB.?/ < have|has`` picks out auxiliaries by word form.

Sisterhood and precedence relations are deliberately out of scope; adding a
relation means extending ``_RELATIONS`` and the constraint parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .corpus import ParseNode

_TOKEN_RE = re.compile(r"<<|<|!|\(|\)|=|__|/(?:[^/\\]|\\.)*/|[A-Za-z0-9'\-|.?]+")
_IDENT_RE = re.compile(r"[A-Za-z0-9'\-]+")


class PatternSyntaxError(Exception):
    def __init__(self, position: int, expected: str):
        super().__init__(f"at offset {position}: expected {expected}")
        self.position = position
        self.expected = expected


class DuplicateCapture(Exception):
    def __init__(self, name: str):
        super().__init__(f"capture {name!r} declared twice")
        self.name = name


@dataclass(frozen=True)
class NodeMatcher:
    """One node test: exact label, alternation, regex or wildcard."""
    kind: str  # "exact" | "alternation" | "regex" | "wildcard"
    labels: tuple[str, ...] = ()
    regex: Optional[re.Pattern] = None
    capture: Optional[str] = None

    def matches(self, node: ParseNode) -> bool:
        label = node.label.lower() if node.is_leaf else node.label
        if self.kind == "wildcard":
            return True
        if self.kind == "regex":
            return self.regex.fullmatch(label) is not None
        return label in self.labels


@dataclass(frozen=True)
class Constraint:
    relation: str  # "<" | "<<"
    negated: bool
    operand: "PatternAst"


@dataclass(frozen=True)
class PatternAst:
    matcher: NodeMatcher
    constraints: tuple[Constraint, ...] = ()

    def capture_names(self) -> list[str]:
        names = []
        if self.matcher.capture:
            names.append(self.matcher.capture)
        for c in self.constraints:
            if not c.negated:
                names.extend(c.operand.capture_names())
        return names

    def matcher_count(self) -> int:
        return 1 + sum(c.operand.matcher_count() for c in self.constraints)


@dataclass(frozen=True)
class MatchResult:
    root_node: ParseNode
    captures: dict[str, ParseNode] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Compilation


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens: list[tuple[int, str]] = []
        pos = 0
        while pos < len(source):
            if source[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(source, pos)
            if not m:
                raise PatternSyntaxError(pos, "a pattern token")
            self.tokens.append((pos, m.group()))
            pos = m.end()
        self.at = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.at][1] if self.at < len(self.tokens) else None

    def pos(self) -> int:
        if self.at < len(self.tokens):
            return self.tokens[self.at][0]
        return len(self.source)

    def take(self) -> str:
        tok = self.peek()
        self.at += 1
        return tok

    def pattern(self) -> PatternAst:
        matcher = self.node()
        constraints = []
        while self.peek() in ("<", "<<", "!"):
            negated = False
            if self.peek() == "!":
                self.take()
                negated = True
            rel = self.peek()
            if rel not in ("<", "<<"):
                raise PatternSyntaxError(self.pos(), "'<' or '<<'")
            self.take()
            constraints.append(Constraint(rel, negated, self.operand()))
        return PatternAst(matcher, tuple(constraints))

    def operand(self) -> PatternAst:
        if self.peek() == "(":
            self.take()
            inner = self.pattern()
            if self.peek() != ")":
                raise PatternSyntaxError(self.pos(), "')'")
            self.take()
            return inner
        return PatternAst(self.node())

    def node(self) -> NodeMatcher:
        tok = self.peek()
        if tok is None or tok in ("(", ")", "<", "<<", "!", "="):
            raise PatternSyntaxError(self.pos(), "a node descriptor")
        self.take()
        if tok == "__":
            matcher = NodeMatcher("wildcard")
        elif tok.startswith("/"):
            body = tok[1:-1]
            try:
                compiled = re.compile(body)
            except re.error as exc:
                raise PatternSyntaxError(self.pos(), f"a valid regex ({exc})")
            matcher = NodeMatcher("regex", regex=compiled)
        else:
            parts = tok.split("|")
            if any(not _IDENT_RE.fullmatch(p) for p in parts):
                raise PatternSyntaxError(self.pos(), "an identifier")
            kind = "exact" if len(parts) == 1 else "alternation"
            matcher = NodeMatcher(kind, labels=tuple(parts))
        if self.peek() == "=":
            self.take()
            name = self.peek()
            if name is None or not _IDENT_RE.fullmatch(name):
                raise PatternSyntaxError(self.pos(), "a capture name")
            self.take()
            matcher = NodeMatcher(matcher.kind, matcher.labels, matcher.regex, name)
        return matcher


def _check_captures(ast: PatternAst, inside_negation: bool, seen: set[str]) -> None:
    name = ast.matcher.capture
    if name is not None:
        if inside_negation:
            raise PatternSyntaxError(0, f"no capture inside a negated constraint ({name!r})")
        if name in seen:
            raise DuplicateCapture(name)
        seen.add(name)
    for c in ast.constraints:
        _check_captures(c.operand, inside_negation or c.negated, seen)


def compile(source: str) -> PatternAst:
    parser = _Parser(source)
    ast = parser.pattern()
    if parser.peek() is not None:
        raise PatternSyntaxError(parser.pos(), "end of pattern")
    _check_captures(ast, False, set())
    return ast


# ---------------------------------------------------------------------------
# Matching


def _related(node: ParseNode, relation: str) -> Iterator[ParseNode]:
    if relation == "<":
        yield from node.children
    else:  # proper descendants
        for child in node.children:
            yield from child.preorder()


def _assignments(node: ParseNode, ast: PatternAst) -> Iterator[dict[str, ParseNode]]:
    """All capture assignments under which ``ast`` holds at ``node``."""
    if not ast.matcher.matches(node):
        return
    base = {ast.matcher.capture: node} if ast.matcher.capture else {}
    partials = [base]
    for constraint in ast.constraints:
        if constraint.negated:
            hit = any(
                True
                for m in _related(node, constraint.relation)
                for _ in _assignments(m, constraint.operand)
            )
            if hit:
                return
            continue
        extended = []
        for m in _related(node, constraint.relation):
            for sub in _assignments(m, constraint.operand):
                for partial in partials:
                    merged = dict(partial)
                    merged.update(sub)
                    extended.append(merged)
        if not extended:
            return
        partials = extended
    yield from partials


def match_all(tree: ParseNode, pattern: PatternAst) -> list[MatchResult]:
    """Every (root node, capture assignment) satisfying the pattern.

    Results are deduplicated and ordered by pre-order position of the match
    root, then by the positions of the captured nodes in declaration order.
    """
    order = {id(nd): i for i, nd in enumerate(tree.preorder())}
    names = pattern.capture_names()
    seen = set()
    results = []
    for node in tree.preorder():
        for captures in _assignments(node, pattern):
            key = (id(node), tuple(id(captures[n]) for n in names))
            if key in seen:
                continue
            seen.add(key)
            results.append(MatchResult(node, captures))
    results.sort(key=lambda r: (
        order[id(r.root_node)],
        tuple(order[id(r.captures[n])] for n in names),
    ))
    return results
