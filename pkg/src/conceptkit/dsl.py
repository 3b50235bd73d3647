"""Controlled teaching language: one statement per line.

    noun    := "noun" ident ["under" ident]
    verb    := "verb" ident "from" ident "to" ident
               "in" "(" idlist ")" "out" "(" idlist ")" ["ext" "(" idlist ")"]
    adj     := "adj" ident ":" idlist
    rule    := "rule" ident ":" clause ("<=>" | "->") clause ["if" guardlist]
    fact    := "fact" ident "=" (ident | number)
    ask     := "ask" ident ["given" factlist]
    confirm := "yes" | "no"
    ident   := bareword | quoted string

A clause is a comma-separated conjunction. On the left of a rule it holds
either `feature=value` bindings (categorical) or `given(f, g)` conditions
(quantitative); on the right, bindings whose value may be an infix
arithmetic expression. Guards are `given(...)` or `nonzero(expr)`.
`#` starts a comment. Every command pretty-prints back to a line that
parses to an equal command.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import expressions as xp
from .errors import ParseError
from .model import CategoricalRule, Guard, QuantitativeRule, Rule

KEYWORDS = {"noun", "verb", "adj", "rule", "fact", "ask", "yes", "no",
            "from", "to", "in", "out", "ext", "under", "given", "if", "nonzero"}

_BAREWORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?")


# -- commands -------------------------------------------------------------------

@dataclass
class DeclareNoun:
    name: str
    under: Optional[str] = None
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        text = f"noun {quote_ident(self.name)}"
        if self.under:
            text += f" under {quote_ident(self.under)}"
        return text


@dataclass
class DeclareVerb:
    name: str
    source: str
    target: str
    inputs: list[str]
    outputs: list[str]
    externals: list[str] = field(default_factory=list)
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        def group(tag: str, names: list[str]) -> str:
            return f"{tag}(" + ", ".join(quote_ident(n) for n in names) + ")"
        text = (f"verb {quote_ident(self.name)} from {quote_ident(self.source)} "
                f"to {quote_ident(self.target)} {group('in', self.inputs)} "
                f"{group('out', self.outputs)}")
        if self.externals:
            text += f" {group('ext', self.externals)}"
        return text


@dataclass
class DeclareAdjective:
    name: str
    values: list[str]
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        return (f"adj {quote_ident(self.name)} : "
                + ", ".join(quote_ident(v) for v in self.values))


@dataclass
class DeclareRule:
    frame: str
    rule: Rule
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        return f"rule {quote_ident(self.frame)} : {render_rule_body(self.rule)}"


@dataclass
class StateFact:
    feature: str
    value: object
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        return f"fact {quote_ident(self.feature)} = {render_value(self.value)}"


@dataclass
class Ask:
    goal: str
    given: dict[str, object] = field(default_factory=dict)
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        text = f"ask {quote_ident(self.goal)}"
        if self.given:
            pairs = ", ".join(f"{quote_ident(k)}={render_value(v)}"
                              for k, v in self.given.items())
            text += f" given {pairs}"
        return text


@dataclass
class Confirm:
    answer: bool
    column: int = field(default=1, compare=False, repr=False)

    def render(self) -> str:
        return "yes" if self.answer else "no"


Command = Union[DeclareNoun, DeclareVerb, DeclareAdjective, DeclareRule,
                StateFact, Ask, Confirm]


def quote_ident(name: str) -> str:
    if _BAREWORD.fullmatch(name) and name not in KEYWORDS:
        return name
    return '"' + name.replace('"', '\\"') + '"'


def render_value(value: object) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return str(xp.Const(float(value)))
    return quote_ident(str(value))


def render_rule_body(rule: Rule) -> str:
    if isinstance(rule, CategoricalRule):
        arrow = "<=>" if rule.reciprocal else "->"
        ante = ", ".join(f"{quote_ident(f)}={quote_ident(v)}"
                         for f, v in rule.antecedent.items())
        cons = ", ".join(f"{quote_ident(f)}={quote_ident(v)}"
                         for f, v in rule.consequent.items())
        return f"{ante} {arrow} {cons}"
    givens = rule.given_features()
    left = "given(" + ", ".join(quote_ident(f) for f in givens) + ")"
    body = f"{left} -> {quote_ident(rule.target)} = {xp.render(rule.formula)}"
    nonzero = rule.nonzero_guards()
    if nonzero:
        body += " if " + ", ".join(f"nonzero({xp.render(g.expr)})" for g in nonzero)
    return body


# -- tokenizer --------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # WORD STRING NUMBER SYM END
    text: str
    column: int
    value: object = None


_SYMBOLS = ("<=>", "->", "(", ")", ",", ":", "=", "+", "-", "*", "/")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch == '"':
            j = i + 1
            buf = []
            while j < n:
                if text[j] == "\\" and j + 1 < n and text[j + 1] == '"':
                    buf.append('"')
                    j += 2
                    continue
                if text[j] == '"':
                    break
                buf.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string", column=col, expected=('"',))
            tokens.append(Token("STRING", "".join(buf), col, value="".join(buf)))
            i = j + 1
            continue
        m = _NUMBER.match(text, i)
        if m and (ch.isdigit() or ch == "."):
            literal = m.group(0)
            tokens.append(Token("NUMBER", literal, col, value=float(literal)))
            i = m.end()
            continue
        m = _BAREWORD.match(text, i)
        if m:
            tokens.append(Token("WORD", m.group(0), col))
            i = m.end()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYM", sym, col))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", column=col)
    tokens.append(Token("END", "", len(text) + 1))
    return tokens


# -- parser ---------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.current
        what = tok.text or "end of line"
        return ParseError(f"unexpected {what!r}", column=tok.column, expected=expected)

    def eat_sym(self, *symbols: str) -> Token:
        if self.current.kind == "SYM" and self.current.text in symbols:
            return self.advance()
        raise self.fail(symbols)

    def eat_word(self, *words: str) -> Token:
        if self.current.kind == "WORD" and self.current.text in words:
            return self.advance()
        raise self.fail(words)

    def at_word(self, word: str) -> bool:
        return self.current.kind == "WORD" and self.current.text == word

    def at_sym(self, *symbols: str) -> bool:
        return self.current.kind == "SYM" and self.current.text in symbols

    def ident(self) -> str:
        tok = self.current
        if tok.kind == "STRING":
            self.advance()
            return tok.value
        if tok.kind == "WORD" and tok.text not in KEYWORDS:
            self.advance()
            return tok.text
        raise self.fail(("identifier", "quoted string"))

    def idlist(self) -> list[str]:
        names = [self.ident()]
        while self.at_sym(","):
            self.advance()
            names.append(self.ident())
        return names

    def group(self, tag: str) -> list[str]:
        self.eat_word(tag)
        self.eat_sym("(")
        if self.at_sym(")"):
            self.advance()
            return []
        names = self.idlist()
        self.eat_sym(")")
        return names

    def simple_value(self) -> object:
        if self.current.kind == "NUMBER":
            return self.advance().value
        if self.at_sym("-") and self.tokens[self.pos + 1].kind == "NUMBER":
            self.advance()
            return -self.advance().value
        return self.ident()

    def end(self) -> None:
        if self.current.kind != "END":
            raise self.fail(("end of statement",))

    # expression grammar: expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)*
    def expression(self) -> xp.Expression:
        node = self.term()
        while self.at_sym("+", "-"):
            op = self.advance().text
            node = xp.BinOp(op, node, self.term())
        return node

    def term(self) -> xp.Expression:
        node = self.factor()
        while self.at_sym("*", "/"):
            op = self.advance().text
            node = xp.BinOp(op, node, self.factor())
        return node

    def factor(self) -> xp.Expression:
        if self.at_sym("-"):
            self.advance()
            inner = self.factor()
            if isinstance(inner, xp.Const):
                return xp.Const(-inner.value)
            return xp.BinOp("-", xp.Const(0.0), inner)
        if self.at_sym("("):
            self.advance()
            node = self.expression()
            self.eat_sym(")")
            return node
        tok = self.current
        if tok.kind == "NUMBER":
            self.advance()
            return xp.Const(tok.value)
        if tok.kind in ("WORD", "STRING"):
            name = self.ident()
            if name in xp.CONSTANTS:
                return xp.NamedConst(name)
            return xp.Var(name)
        raise self.fail(("number", "identifier", "("))


def parse_statement(text: str) -> Command:
    """Parse one line of the teaching language into a command."""
    tokens = tokenize(text)
    p = _Parser(tokens)
    tok = p.current
    if tok.kind != "WORD":
        raise p.fail(("noun", "verb", "adj", "rule", "fact", "ask", "yes", "no"))
    head = tok.text
    if head == "noun":
        p.advance()
        col = tok.column
        name = p.ident()
        under = None
        if p.at_word("under"):
            p.advance()
            under = p.ident()
        p.end()
        return DeclareNoun(name, under, column=col)
    if head == "verb":
        p.advance()
        name = p.ident()
        p.eat_word("from")
        source = p.ident()
        p.eat_word("to")
        target = p.ident()
        inputs = p.group("in")
        outputs = p.group("out")
        externals = p.group("ext") if p.at_word("ext") else []
        p.end()
        return DeclareVerb(name, source, target, inputs, outputs, externals,
                           column=tok.column)
    if head == "adj":
        p.advance()
        name = p.ident()
        p.eat_sym(":")
        values = p.idlist()
        p.end()
        return DeclareAdjective(name, values, column=tok.column)
    if head == "rule":
        p.advance()
        frame = p.ident()
        p.eat_sym(":")
        rule = _parse_rule_body(p)
        p.end()
        return DeclareRule(frame, rule, column=tok.column)
    if head == "fact":
        p.advance()
        feature = p.ident()
        p.eat_sym("=")
        value = p.simple_value()
        p.end()
        return StateFact(feature, value, column=tok.column)
    if head == "ask":
        p.advance()
        goal = p.ident()
        given: dict[str, object] = {}
        if p.at_word("given"):
            p.advance()
            while True:
                feature = p.ident()
                p.eat_sym("=")
                given[feature] = p.simple_value()
                if not p.at_sym(","):
                    break
                p.advance()
        p.end()
        return Ask(goal, given, column=tok.column)
    if head in ("yes", "no"):
        p.advance()
        p.end()
        return Confirm(head == "yes", column=tok.column)
    raise p.fail(("noun", "verb", "adj", "rule", "fact", "ask", "yes", "no"))


def _parse_rule_body(p: _Parser) -> Rule:
    """clause (<=>|->) clause [if guardlist]"""
    bindings: dict[str, str] = {}
    givens: list[str] = []
    while True:
        if p.at_word("given"):
            givens.extend(p.group("given"))
        else:
            feature = p.ident()
            p.eat_sym("=")
            bindings[feature] = str(p.simple_value())
        if p.at_sym(","):
            p.advance()
            continue
        break
    if bindings and givens:
        raise ParseError("mix of value bindings and given(...) on the left side",
                         column=p.current.column)
    arrow = p.eat_sym("<=>", "->").text

    if givens:
        if arrow != "->":
            raise ParseError("quantitative rules are one-sided; use ->",
                             column=p.current.column, expected=("->",))
        target = p.ident()
        p.eat_sym("=")
        formula = p.expression()
        guards = [Guard(kind="given", feature=f) for f in givens]
        guards.extend(_parse_guards(p))
        return QuantitativeRule(target=target, formula=formula, guards=guards)

    consequent: dict[str, str] = {}
    while True:
        feature = p.ident()
        p.eat_sym("=")
        consequent[feature] = str(p.simple_value())
        if p.at_sym(","):
            p.advance()
            continue
        break
    if p.at_word("if"):
        raise ParseError("guards belong to quantitative rules",
                         column=p.current.column)
    return CategoricalRule(antecedent=bindings, consequent=consequent,
                           reciprocal=(arrow == "<=>"))


def _parse_guards(p: _Parser) -> list[Guard]:
    guards: list[Guard] = []
    if not p.at_word("if"):
        return guards
    p.advance()
    while True:
        if p.at_word("nonzero"):
            p.advance()
            p.eat_sym("(")
            guards.append(Guard(kind="nonzero", expr=p.expression()))
            p.eat_sym(")")
        elif p.at_word("given"):
            for feature in p.group("given"):
                guards.append(Guard(kind="given", feature=feature))
        else:
            raise p.fail(("nonzero", "given"))
        if p.at_sym(","):
            p.advance()
            continue
        break
    return guards
