"""SPDX-style license expression parsing.

Grammar, tightest binding first::

    WITH  >  AND  >  OR

A bare identifier parses to a single :class:`Leaf`. Operators are accepted
in upper or lower case. Identifiers keep the case they were written in, but
all comparisons between leaves are case-insensitive.

Usage::

    expr = parse_expression("GPL-2.0-only WITH Classpath-exception-2.0 OR MIT")
    render(normalize_expression(expr))
    # 'GPL-2.0-only WITH Classpath-exception-2.0 OR MIT'
    licenses_in(expr)
    # {'GPL-2.0-only', 'MIT'}
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Conjunction",
    "Disjunction",
    "ExpressionSyntaxError",
    "Leaf",
    "LicenseExpression",
    "licenses_in",
    "normalize_expression",
    "parse_expression",
    "render",
]


class ExpressionSyntaxError(ValueError):
    """Raised for malformed expressions. ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True, eq=False)
class Leaf:
    license_id: str
    or_later: bool = False
    exception: str | None = None

    @property
    def token(self) -> str:
        """The license token as written, including a ``+`` suffix."""
        return f"{self.license_id}+" if self.or_later else self.license_id

    def _key(self) -> tuple:
        exc = self.exception.casefold() if self.exception else None
        return ("leaf", self.license_id.casefold(), self.or_later, exc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Leaf):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


@dataclass(frozen=True, eq=False)
class Conjunction:
    children: tuple[LicenseExpression, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Conjunction):
            return NotImplemented
        return self.children == other.children

    def __hash__(self) -> int:
        return hash(("and", self.children))


@dataclass(frozen=True, eq=False)
class Disjunction:
    children: tuple[LicenseExpression, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Disjunction):
            return NotImplemented
        return self.children == other.children

    def __hash__(self) -> int:
        return hash(("or", self.children))


LicenseExpression = Union[Leaf, Conjunction, Disjunction]

_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([A-Za-z0-9.\-:_+]+))")
_OPERATORS = {"AND", "OR", "WITH", "and", "or", "with"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", bad)
        if m.group(1):
            tokens.append(("(", "(", m.start(1)))
        elif m.group(2):
            tokens.append((")", ")", m.start(2)))
        else:
            word = m.group(3)
            kind = word.upper() if word in _OPERATORS else "ID"
            tokens.append((kind, word, m.start(3)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _end_pos(self) -> int:
        return len(self.text)

    def _pos(self) -> int:
        tok = self._peek()
        return tok[2] if tok else self._end_pos()

    def parse(self) -> LicenseExpression:
        expr = self._or()
        tok = self._peek()
        if tok is not None:
            raise ExpressionSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return expr

    def _or(self) -> LicenseExpression:
        parts = [self._and()]
        while (tok := self._peek()) is not None and tok[0] == "OR":
            self.i += 1
            parts.append(self._and())
        return parts[0] if len(parts) == 1 else Disjunction(tuple(parts))

    def _and(self) -> LicenseExpression:
        parts = [self._with()]
        while (tok := self._peek()) is not None and tok[0] == "AND":
            self.i += 1
            parts.append(self._with())
        return parts[0] if len(parts) == 1 else Conjunction(tuple(parts))

    def _with(self) -> LicenseExpression:
        tok = self._peek()
        if tok is None:
            raise ExpressionSyntaxError("expected license or '('", self._end_pos())
        if tok[0] == "(":
            self.i += 1
            inner = self._or()
            close = self._peek()
            if close is None or close[0] != ")":
                raise ExpressionSyntaxError("expected ')'", self._pos())
            self.i += 1
            if (nxt := self._peek()) is not None and nxt[0] == "WITH":
                raise ExpressionSyntaxError("WITH must follow a license id", nxt[2])
            return inner
        if tok[0] != "ID":
            raise ExpressionSyntaxError(f"expected license, got {tok[1]!r}", tok[2])
        self.i += 1
        word = tok[1]
        or_later = word.endswith("+")
        license_id = word.rstrip("+") if or_later else word
        if not license_id or "+" in license_id:
            raise ExpressionSyntaxError(f"malformed license id {word!r}", tok[2])
        exception = None
        if (nxt := self._peek()) is not None and nxt[0] == "WITH":
            self.i += 1
            exc_tok = self._peek()
            if exc_tok is None or exc_tok[0] != "ID":
                raise ExpressionSyntaxError("expected exception id after WITH", self._pos())
            self.i += 1
            exception = exc_tok[1]
        return Leaf(license_id, or_later, exception)


def parse_expression(text: str) -> LicenseExpression:
    """Parse *text* into an expression tree.

    Chained operators at one level become a single n-ary node; explicit
    parentheses are kept as nesting (use :func:`normalize_expression` to
    flatten them).

    Raises:
        ExpressionSyntaxError: on empty input, unbalanced parentheses,
            dangling operators or empty operands.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def render(expr: LicenseExpression) -> str:
    """Canonical printer; :func:`parse_expression` reads its output back unchanged."""
    if isinstance(expr, Leaf):
        out = expr.token
        if expr.exception:
            out += f" WITH {expr.exception}"
        return out
    if isinstance(expr, Conjunction):
        return " AND ".join(
            f"({render(c)})" if not isinstance(c, Leaf) else render(c) for c in expr.children
        )
    return " OR ".join(
        f"({render(c)})" if isinstance(c, Disjunction) else render(c) for c in expr.children
    )


def _sort_key(expr: LicenseExpression) -> tuple[str, str]:
    text = render(expr)
    return (text.casefold(), text)


def normalize_expression(expr: LicenseExpression) -> LicenseExpression:
    """Flatten same-operator nesting, sort operands and drop duplicates."""
    if isinstance(expr, Leaf):
        return expr
    node_type = type(expr)
    flat: list[LicenseExpression] = []
    for child in expr.children:
        child = normalize_expression(child)
        if isinstance(child, node_type):
            flat.extend(child.children)
        else:
            flat.append(child)
    unique: list[LicenseExpression] = []
    for child in sorted(flat, key=_sort_key):
        if child not in unique:
            unique.append(child)
    if len(unique) == 1:
        return unique[0]
    return node_type(tuple(unique))


def leaves(expr: LicenseExpression) -> list[Leaf]:
    if isinstance(expr, Leaf):
        return [expr]
    out: list[Leaf] = []
    for child in expr.children:
        out.extend(leaves(child))
    return out


def licenses_in(expr: LicenseExpression) -> set[str]:
    """Distinct license tokens in *expr*; exceptions are not included.

    Tokens differing only by case are reported once (first spelling wins).
    """
    seen: dict[str, str] = {}
    for leaf in leaves(expr):
        seen.setdefault(leaf.token.casefold(), leaf.token)
    return set(seen.values())
