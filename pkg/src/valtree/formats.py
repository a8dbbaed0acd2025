"""Parsers for the shared text grammars: values, polynomials, chains,
families, tables, cuts, intervals and certificates.

Renderers live on the corresponding classes; every parser here accepts
exactly what those renderers emit (plus flexible whitespace) and reports
failures with a character offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .limits import (
    AFFINE,
    EXPLICIT,
    GEOMETRIC,
    GammaRule,
    IncreasingFamily,
    PARAMETRIC,
)
from .ordered_values import GroupValue, INFINITY, Interval
from .polynomials import Poly
from .quasicuts import LimitDescriptor, QuasiCut
from .topologies import Certificate
from .valuations import ValuationChain


class ParseError(ValueError):
    """A syntax error, carrying the character offset it occurred at."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


@dataclass
class _Token:
    kind: str  # "int" | "ident" | "sym" | "str" | "end"
    text: str
    pos: int


_SYMBOLS = set("{}[](),:;=+-*/^<>")


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(_Token("int", text[start:i], start))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(_Token("ident", text[start:i], start))
            continue
        if ch == '"':
            start = i
            i += 1
            while i < n and text[i] != '"':
                i += 1
            if i >= n:
                raise ParseError("unterminated quote", start)
            tokens.append(_Token("str", text[start + 1 : i], start))
            i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token("sym", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_sym(self, sym: str) -> _Token:
        tok = self.next()
        if tok.kind != "sym" or tok.text != sym:
            raise ParseError(f"expected {sym!r}, found {tok.text!r}", tok.pos)
        return tok

    def expect_ident(self, word: Optional[str] = None) -> _Token:
        tok = self.next()
        if tok.kind != "ident" or (word is not None and tok.text != word):
            raise ParseError(f"expected {word or 'a name'}, found {tok.text!r}", tok.pos)
        return tok

    def expect_int(self) -> int:
        tok = self.next()
        if tok.kind != "int":
            raise ParseError(f"expected an integer, found {tok.text!r}", tok.pos)
        return int(tok.text)

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == sym

    def at_ident(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"trailing input {tok.text!r}", tok.pos)


def _parse_rational(cur: _Cursor) -> Fraction:
    sign = 1
    if cur.at_sym("-"):
        cur.next()
        sign = -1
    elif cur.at_sym("+"):
        cur.next()
    num = cur.expect_int()
    if cur.at_sym("/"):
        cur.next()
        den = cur.expect_int()
        return Fraction(sign * num, den)
    return Fraction(sign * num)


# -- group values ------------------------------------------------------------


def _parse_value_tokens(cur: _Cursor) -> GroupValue:
    if cur.at_ident("inf"):
        cur.next()
        return INFINITY
    cur.expect_sym("(")
    coords = [_parse_rational(cur)]
    while cur.at_sym(","):
        cur.next()
        coords.append(_parse_rational(cur))
    cur.expect_sym(")")
    return GroupValue(*coords)


def parse_value(text: str) -> GroupValue:
    """Parse '(3/2,-1)' or 'inf'."""
    cur = _Cursor(text)
    value = _parse_value_tokens(cur)
    cur.expect_end()
    return value


# -- polynomials ---------------------------------------------------------------


def _parse_poly_tokens(cur: _Cursor, var: Optional[str] = None) -> Poly:
    coeffs: Dict[int, Fraction] = {}
    seen_var = var
    first = True
    while True:
        tok = cur.peek()
        sign = Fraction(1)
        if tok.kind == "sym" and tok.text in "+-":
            cur.next()
            if tok.text == "-":
                sign = Fraction(-1)
        elif not first:
            break
        first = False
        tok = cur.peek()
        coefficient = Fraction(1)
        have_coeff = False
        if tok.kind == "int":
            coefficient = _parse_rational(cur)
            have_coeff = True
            if cur.at_sym("*"):
                cur.next()
        tok = cur.peek()
        if tok.kind == "ident" and tok.text not in ("inf",):
            name = cur.next().text
            if seen_var is None:
                seen_var = name
            elif name != seen_var:
                raise ParseError(f"mixed variables {seen_var!r} and {name!r}", tok.pos)
            power = 1
            if cur.at_sym("^"):
                cur.next()
                power = cur.expect_int()
            coeffs[power] = coeffs.get(power, Fraction(0)) + sign * coefficient
        elif have_coeff:
            coeffs[0] = coeffs.get(0, Fraction(0)) + sign * coefficient
        else:
            raise ParseError(f"expected a term, found {tok.text!r}", tok.pos)
    if not coeffs:
        raise ParseError("empty polynomial", cur.peek().pos)
    top = max(coeffs)
    return Poly(tuple(coeffs.get(k, Fraction(0)) for k in range(top + 1)))


def parse_poly(text: str, var: Optional[str] = None) -> Poly:
    """Parse 'x^2 + 1/2*x - 3' (the '*' is optional on input)."""
    cur = _Cursor(text)
    poly = _parse_poly_tokens(cur, var)
    cur.expect_end()
    return poly


# -- chains ---------------------------------------------------------------------


def _parse_chain_tokens(cur: _Cursor) -> ValuationChain:
    cur.expect_ident("val")
    cur.expect_sym("{")
    cur.expect_ident("p")
    cur.expect_sym(":")
    prime = cur.expect_int()
    cur.expect_sym(",")
    cur.expect_ident("rank")
    cur.expect_sym(":")
    rank = cur.expect_int()
    cur.expect_sym(",")
    cur.expect_ident("root")
    cur.expect_sym(":")
    root = _parse_value_tokens(cur)
    cur.expect_sym(",")
    cur.expect_ident("steps")
    cur.expect_sym(":")
    cur.expect_sym("[")
    steps: List[Tuple[Poly, GroupValue]] = []
    while not cur.at_sym("]"):
        cur.expect_sym("(")
        phi = _parse_poly_tokens(cur, var="x")
        cur.expect_sym(",")
        gamma = _parse_value_tokens(cur)
        cur.expect_sym(")")
        steps.append((phi, gamma))
        if cur.at_sym(","):
            cur.next()
    cur.expect_sym("]")
    cur.expect_sym("}")
    return ValuationChain(prime, rank, root, tuple(steps))


def parse_chain(text: str) -> ValuationChain:
    """Parse 'val { p: 2, rank: 2, root: (0), steps: [ (x, (1/2)) ] }'."""
    cur = _Cursor(text)
    chain = _parse_chain_tokens(cur)
    cur.expect_end()
    return chain


# -- gamma rules and families ------------------------------------------------------


def parse_gamma_rule(text: str) -> GammaRule:
    """Parse 'i', '3/2 + i', '2*i', '1 - 1/2^i' or 'a - b*r^i'."""
    cur = _Cursor(text)
    tok = cur.peek()
    if tok.kind == "ident" and tok.text == "i":
        cur.next()
        cur.expect_end()
        return GammaRule(AFFINE, 0, 1)
    first = _parse_rational(cur)
    tok = cur.peek()
    if tok.kind == "sym" and tok.text == "*":
        cur.next()
        cur.expect_ident("i")
        cur.expect_end()
        return GammaRule(AFFINE, 0, first)
    if tok.kind == "end":
        raise ParseError("a constant sequence is not increasing", tok.pos)
    if tok.kind != "sym" or tok.text not in "+-":
        raise ParseError(f"expected '+' or '-', found {tok.text!r}", tok.pos)
    op = cur.next().text
    if cur.at_ident("i"):
        cur.next()
        cur.expect_end()
        if op == "-":
            raise ParseError("a decreasing sequence is not supported", tok.pos)
        return GammaRule(AFFINE, first, 1)
    second = _parse_rational(cur)
    tok = cur.peek()
    if tok.kind == "sym" and tok.text == "*":
        cur.next()
        if cur.at_ident("i"):
            cur.next()
            cur.expect_end()
            if op == "-":
                raise ParseError("a decreasing sequence is not supported", tok.pos)
            return GammaRule(AFFINE, first, second)
        ratio = _parse_rational(cur)
        cur.expect_sym("^")
        cur.expect_ident("i")
        cur.expect_end()
        if op != "-":
            raise ParseError("a growing geometric term is not supported", tok.pos)
        return GammaRule(GEOMETRIC, first, second, ratio)
    cur.expect_sym("^")
    cur.expect_ident("i")
    cur.expect_end()
    if op != "-":
        raise ParseError("a growing geometric term is not supported", tok.pos)
    return GammaRule(GEOMETRIC, first, 1, second)


def parse_family(text: str) -> IncreasingFamily:
    """Parse a parametric or explicit family block."""
    cur = _Cursor(text)
    cur.expect_ident("fam")
    cur.expect_sym("{")
    if cur.at_ident("explicit"):
        cur.next()
        cur.expect_sym(":")
        cur.expect_sym("[")
        members: List[ValuationChain] = []
        while not cur.at_sym("]"):
            members.append(_parse_chain_tokens(cur))
            if cur.at_sym(","):
                cur.next()
        cur.expect_sym("]")
        limit = None
        tail_stable = False
        while cur.at_sym(","):
            cur.next()
            if cur.at_ident("limit"):
                cur.next()
                cur.expect_sym(":")
                tok = cur.next()
                if tok.kind != "str":
                    raise ParseError("the limit descriptor must be quoted", tok.pos)
                limit = LimitDescriptor.parse(tok.text)
            elif cur.at_ident("tail"):
                cur.next()
                cur.expect_sym(":")
                cur.expect_ident("stable")
                tail_stable = True
            else:
                tok = cur.peek()
                raise ParseError(f"unknown family field {tok.text!r}", tok.pos)
        cur.expect_sym("}")
        cur.expect_end()
        return IncreasingFamily(
            EXPLICIT,
            members=members,
            declared_tail_stable=tail_stable,
            declared_limit=limit,
        )
    cur.expect_ident("base")
    cur.expect_sym(":")
    base = _parse_chain_tokens(cur)
    cur.expect_sym(",")
    cur.expect_ident("key")
    cur.expect_sym(":")
    key = _parse_poly_tokens(cur, var="x")
    cur.expect_sym(",")
    cur.expect_ident("gamma")
    cur.expect_sym(":")
    tok = cur.next()
    if tok.kind != "str":
        raise ParseError("the gamma rule must be quoted", tok.pos)
    rule = parse_gamma_rule(tok.text)
    declared: Optional[LimitDescriptor] = None
    if cur.at_sym(","):
        cur.next()
        cur.expect_ident("limit")
        cur.expect_sym(":")
        tok = cur.next()
        if tok.kind != "str":
            raise ParseError("the limit descriptor must be quoted", tok.pos)
        declared = LimitDescriptor.parse(tok.text)
    cur.expect_sym("}")
    cur.expect_end()
    family = IncreasingFamily(PARAMETRIC, base=base, key=key, rule=rule)
    if declared is not None and declared != family.declared_limit:
        raise ParseError(
            f"declared limit {declared} contradicts the rule's limit {family.declared_limit}",
            0,
        )
    return family


# -- tables ------------------------------------------------------------------------


def parse_table(text: str) -> Dict[Poly, GroupValue]:
    """Parse 'tab { (x) = (1); (x^2) = (3) }'."""
    cur = _Cursor(text)
    cur.expect_ident("tab")
    cur.expect_sym("{")
    table: Dict[Poly, GroupValue] = {}
    while not cur.at_sym("}"):
        cur.expect_sym("(")
        poly = _parse_poly_tokens(cur, var="x")
        cur.expect_sym(")")
        cur.expect_sym("=")
        value = _parse_value_tokens(cur)
        table[poly] = value
        if cur.at_sym(";"):
            cur.next()
    cur.expect_sym("}")
    cur.expect_end()
    return table


def render_table(table: Dict[Poly, GroupValue]) -> str:
    entries = sorted(table.items(), key=lambda kv: (len(kv[0].coeffs), kv[0].coeffs))
    body = "; ".join(f"({p.render()}) = {v}" for p, v in entries)
    return "tab { " + body + " }"


# -- cuts ---------------------------------------------------------------------------


def parse_cut(text: str) -> QuasiCut:
    """Parse 'cut:q', 'cut:q-', 'cut:q+' or 'cut:+inf'."""
    stripped = text.strip()
    if not stripped.startswith("cut:"):
        raise ParseError("a cut starts with 'cut:'", 0)
    body = stripped[4:]
    if body == "+inf":
        return QuasiCut.plus_infinity()
    if body.endswith("-"):
        return QuasiCut.below(Fraction(body[:-1]))
    if body.endswith("+"):
        return QuasiCut.above(Fraction(body[:-1]))
    try:
        return QuasiCut.principal(Fraction(body))
    except ValueError:
        raise ParseError(f"bad cut boundary {body!r}", 4)


# -- intervals and certificates -----------------------------------------------------


def _parse_interval_tokens(cur: _Cursor) -> Interval:
    if cur.at_sym("{"):
        cur.next()
        cur.expect_ident("y")
        tok = cur.next()
        if tok.kind != "sym" or tok.text != ">":
            raise ParseError(f"expected '>', found {tok.text!r}", tok.pos)
        lower = _parse_value_tokens(cur)
        cur.expect_sym("}")
        return Interval.above(lower)
    cur.expect_sym("(")
    lower: Optional[GroupValue]
    if cur.at_sym("-"):
        cur.next()
        cur.expect_ident("inf")
        lower = None
    else:
        lower = _parse_value_tokens(cur)
    cur.expect_sym(",")
    upper = _parse_value_tokens(cur)
    cur.expect_sym(")")
    return Interval.open(lower, upper)


def parse_interval(text: str) -> Interval:
    """Parse '(-inf,(1/2))', '((1/2),inf)' or '{y>(2)}'."""
    cur = _Cursor(text)
    iv = _parse_interval_tokens(cur)
    cur.expect_end()
    return iv


def parse_certificate(text: str) -> Certificate:
    """Parse the rendered certificate block back into an object."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or not lines[0].startswith("certificate {"):
        raise ParseError("a certificate starts with 'certificate {'", 0)
    head = lines[0][len("certificate {") :].strip()
    if not head.startswith("axiom:"):
        raise ParseError("missing axiom field", 0)
    axiom = head[len("axiom:") :].strip()
    constraints: List[Tuple[Poly, Interval]] = []
    narrative = ""
    for ln in lines[1:]:
        if ln == "}":
            break
        if ln.startswith("constraint:"):
            body = ln[len("constraint:") :].strip()
            sep = body.find(" in ")
            if sep < 0:
                raise ParseError("a constraint needs ' in '", 0)
            poly_part = body[:sep].strip()
            if not (poly_part.startswith("(") and poly_part.endswith(")")):
                raise ParseError("the constraint polynomial is parenthesised", 0)
            poly = parse_poly(poly_part[1:-1], var="x")
            window = parse_interval(body[sep + 4 :].strip())
            constraints.append((poly, window))
        elif ln.startswith("narrative:"):
            narrative = ln[len("narrative:") :].strip()
        else:
            narrative = (narrative + " " + ln).strip()
    return Certificate(axiom, tuple(constraints), narrative)
