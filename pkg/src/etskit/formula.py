"""Formula AST, parser, printer, and lowering of derived connectives.

Grammar (tightest first): ``!`` and the modal prefixes ``K{..}``, ``S{..}``,
``H{..}`` bind alike, then ``&``, then ``|``, then right-associative ``->``.
``true`` and ``false`` are reserved atoms.  Coalitions are written inside
braces with comma or space separators and are canonicalized to sorted,
duplicate-free form, so structural equality of formulas is set equality on
coalitions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import FormulaSyntaxError, InputError
from .model import Coalition, coalition

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")
_RESERVED = ("true", "false")


class Formula:
    """Base class; concrete nodes are immutable and hashable."""

    __slots__ = ()


def _check_coalition(c) -> None:
    if tuple(sorted(set(c))) != tuple(c):
        raise InputError(f"coalition {c!r} is not sorted and duplicate-free")
    for a in c:
        if not _IDENT.match(a) or a in _RESERVED:
            raise InputError(f"bad agent identifier {a!r}")


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def __post_init__(self):
        if not _IDENT.match(self.name) or self.name in _RESERVED:
            raise InputError(f"bad variable name {self.name!r}")


@dataclass(frozen=True)
class TrueLit(Formula):
    pass


@dataclass(frozen=True)
class FalseLit(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    coalition: Coalition
    arg: Formula

    def __post_init__(self):
        _check_coalition(self.coalition)


@dataclass(frozen=True)
class Strat(Formula):
    coalition: Coalition
    arg: Formula

    def __post_init__(self):
        _check_coalition(self.coalition)


@dataclass(frozen=True)
class How(Formula):
    coalition: Coalition
    arg: Formula

    def __post_init__(self):
        _check_coalition(self.coalition)


def _cache_hash(cls):
    # The generated dataclass hash walks the whole subtree on every call,
    # which dominates sweep profiles; formulas are immutable, so compute
    # once and stash.
    generated = cls.__hash__

    def __hash__(self, _generated=generated):
        try:
            return object.__getattribute__(self, "_hash_cache")
        except AttributeError:
            h = _generated(self)
            object.__setattr__(self, "_hash_cache", h)
            return h

    cls.__hash__ = __hash__
    return cls


for _cls in (Var, TrueLit, FalseLit, Not, And, Or, Implies, Know, Strat, How):
    _cache_hash(_cls)


TRUE = TrueLit()
FALSE = FalseLit()

MODAL_KINDS = (Know, Strat, How)
_MODAL_LETTER = {Know: "K", Strat: "S", How: "H"}
_LETTER_MODAL = {"K": Know, "S": Strat, "H": How}


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"->|[!&|(){},]|[A-Za-z0-9_]+|\S")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = [(m.start(), m.group()) for m in _TOKEN.finditer(text)]
        self.pos = 0

    def error(self, msg: str) -> FormulaSyntaxError:
        at = self.tokens[self.pos][0] if self.pos < len(self.tokens) else len(self.text)
        return FormulaSyntaxError(msg, at)

    def peek(self) -> str | None:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.peek()
        if got != tok:
            raise self.error(f"expected {tok!r}, got "
                             f"{got!r}" if got else f"expected {tok!r}")
        self.pos += 1

    def parse(self) -> Formula:
        f = self.implication()
        if self.pos < len(self.tokens):
            raise self.error(f"unexpected token {self.peek()!r}")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in _LETTER_MODAL and self.pos + 1 < len(self.tokens) \
                and self.tokens[self.pos + 1][1] == "{":
            kind = _LETTER_MODAL[self.take()]
            self.expect("{")
            members: list[str] = []
            while self.peek() != "}":
                t = self.take()
                if t == ",":
                    continue
                if not _IDENT.match(t) or t in _RESERVED:
                    raise self.error(f"bad agent name {t!r} in coalition")
                members.append(t)
            self.expect("}")
            return kind(coalition(members), self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.implication()
            self.expect(")")
            return f
        if tok is None:
            raise self.error("unexpected end of input")
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if _IDENT.match(tok):
            self.take()
            return Var(tok)
        raise self.error(f"unexpected token {tok!r}")


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


# -- printing ---------------------------------------------------------------

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _pr(f: Formula, ctx: int) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, TrueLit):
        return "true"
    if isinstance(f, FalseLit):
        return "false"
    if isinstance(f, Not):
        return "!" + _pr(f.arg, _PREC_UNARY)
    if isinstance(f, MODAL_KINDS):
        head = _MODAL_LETTER[type(f)] + "{" + ",".join(f.coalition) + "}"
        return head + " " + _pr(f.arg, _PREC_UNARY)
    if isinstance(f, And):
        s = _pr(f.left, _PREC_AND) + " & " + _pr(f.right, _PREC_AND + 1)
        return f"({s})" if ctx > _PREC_AND else s
    if isinstance(f, Or):
        s = _pr(f.left, _PREC_OR) + " | " + _pr(f.right, _PREC_OR + 1)
        return f"({s})" if ctx > _PREC_OR else s
    if isinstance(f, Implies):
        s = _pr(f.left, _PREC_IMPLIES + 1) + " -> " + _pr(f.right, _PREC_IMPLIES)
        return f"({s})" if ctx > _PREC_IMPLIES else s
    raise InputError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    """Minimal-parentheses text; ``parse_formula`` round-trips it exactly."""
    return _pr(f, 0)


# -- derived connectives ----------------------------------------------------

def lower_derived(f: Formula) -> Formula:
    """Rewrite to the core fragment: And/Or/True become their standard
    abbreviations over ``!``, ``->``, and ``false``.  Idempotent."""
    if isinstance(f, (Var, TrueLit, FalseLit)):
        return Implies(FALSE, FALSE) if isinstance(f, TrueLit) else f
    if isinstance(f, Not):
        return Not(lower_derived(f.arg))
    if isinstance(f, And):
        return Not(Implies(lower_derived(f.left), Not(lower_derived(f.right))))
    if isinstance(f, Or):
        return Implies(Not(lower_derived(f.left)), lower_derived(f.right))
    if isinstance(f, Implies):
        return Implies(lower_derived(f.left), lower_derived(f.right))
    if isinstance(f, MODAL_KINDS):
        return type(f)(f.coalition, lower_derived(f.arg))
    raise InputError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield ``f`` and every subformula, parents before children."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, (And, Or, Implies)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, MODAL_KINDS):
        yield from subformulas(f.arg)


def variables(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def coalitions(f: Formula) -> frozenset[Coalition]:
    return frozenset(
        g.coalition for g in subformulas(f) if isinstance(g, MODAL_KINDS)
    )
