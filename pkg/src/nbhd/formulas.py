"""Modal formula DSL and the named axiom registry.

Grammar (ASCII, lowercase identifiers; "box" is a reserved word):

    formula := iff
    iff     := impl ("<->" impl)*
    impl    := or ("->" impl)?          right associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "box" unary | atom
    atom    := "T" | "F" | ident | "(" formula ")"
    ident   := [a-z][a-z0-9_]*

Or, Implies, Iff and F are sugar and are stored desugared, so the AST has
exactly five node shapes: Var, Top, Not, And, Box.  And has arity >= 0;
arity 0 renders as T and arity 1 renders as its item, so rendered output
always reparses to an equal AST.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import InvalidInputError, full_mask, up_cone


class Formula:
    """Base marker for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    items: tuple[Formula, ...]


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


TOP = Top()


def bot() -> Formula:
    return Not(TOP)


def disj(a: Formula, b: Formula) -> Formula:
    return Not(And((Not(a), Not(b))))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And((a, Not(b))))


def iff(a: Formula, b: Formula) -> Formula:
    return And((implies(a, b), implies(b, a)))


class ParseError(InvalidInputError):
    """Syntax error carrying the byte offset and the expected token set."""

    def __init__(self, offset: int, expected: tuple[str, ...], found: str):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        self.found = found
        super().__init__(f"at byte {offset}: expected one of {', '.join(self.expected)}; found {found}")


_TOKEN_RE = re.compile(r"[ \t\r\n]+|<->|->|[&|~()]|[a-z][a-z0-9_]*|[TF]")

_PRIMARY = ("'('", "'~'", "'box'", "'T'", "'F'", "identifier")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(pos, ("token",), repr(text[pos]))
        lexeme = m.group()
        if not lexeme.isspace():
            if lexeme[0].islower() and lexeme not in ("box",):
                kind = "ident"
            else:
                kind = lexeme
            tokens.append((kind, lexeme, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(tok[2], (f"'{kind}'",), repr(tok[1]) if tok[1] else "end of input")
        return self.take()

    def formula(self) -> Formula:
        node = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(tok[2], ("'&'", "'|'", "'->'", "'<->'", "end of input"), repr(tok[1]))
        return node

    def iff(self) -> Formula:
        node = self.impl()
        while self.peek()[0] == "<->":
            self.take()
            node = iff(node, self.impl())
        return node

    def impl(self) -> Formula:
        node = self.disj()
        if self.peek()[0] == "->":
            self.take()
            node = implies(node, self.impl())
        return node

    def disj(self) -> Formula:
        node = self.conj()
        while self.peek()[0] == "|":
            self.take()
            node = disj(node, self.conj())
        return node

    def conj(self) -> Formula:
        items = [self.unary()]
        while self.peek()[0] == "&":
            self.take()
            items.append(self.unary())
        if len(items) == 1:
            return items[0]
        return And(tuple(items))

    def unary(self) -> Formula:
        kind, lexeme, offset = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind == "box":
            self.take()
            return Box(self.unary())
        if kind == "T":
            self.take()
            return TOP
        if kind == "F":
            self.take()
            return bot()
        if kind == "ident":
            self.take()
            return Var(lexeme)
        if kind == "(":
            self.take()
            node = self.iff()
            self.expect(")")
            return node
        raise ParseError(offset, _PRIMARY, repr(lexeme) if lexeme else "end of input")


def parse(text: str) -> Formula:
    return _Parser(text).formula()


def render(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Not):
        return "~" + _render_tight(f.sub)
    if isinstance(f, Box):
        return "box " + _render_tight(f.sub)
    if isinstance(f, And):
        if not f.items:
            return "T"
        if len(f.items) == 1:
            return render(f.items[0])
        return " & ".join(_render_tight(item) for item in f.items)
    raise InvalidInputError(f"render: not a formula node: {f!r}")


def _render_tight(f: Formula) -> str:
    # Only And needs parentheses below & or under ~ / box.
    if isinstance(f, And) and len(f.items) != 1:
        return "(" + render(f) + ")"
    return render(f)


def free_vars(f: Formula) -> list[str]:
    """Variable names in first-occurrence order."""
    seen: list[str] = []

    def walk(node: Formula) -> None:
        if isinstance(node, Var):
            if node.name not in seen:
                seen.append(node.name)
        elif isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, Box):
            walk(node.sub)
        elif isinstance(node, And):
            for item in node.items:
                walk(item)

    walk(f)
    return seen


def is_box_free(f: Formula) -> bool:
    if isinstance(f, Box):
        return False
    if isinstance(f, Not):
        return is_box_free(f.sub)
    if isinstance(f, And):
        return all(is_box_free(item) for item in f.items)
    return True


def is_one_step(f: Formula) -> bool:
    """Boolean combination of T and boxed box-free formulas, no naked variables."""
    if isinstance(f, Box):
        return is_box_free(f.sub)
    if isinstance(f, Top):
        return True
    if isinstance(f, Not):
        return is_one_step(f.sub)
    if isinstance(f, And):
        return all(is_one_step(item) for item in f.items)
    return False


def modal_depth(f: Formula) -> int:
    if isinstance(f, Box):
        return 1 + modal_depth(f.sub)
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, And):
        return max((modal_depth(item) for item in f.items), default=0)
    return 0


# Named axioms.  Semantic tags stand in for formulas whose instantiation
# space would collapse anyway: on n points any family closed under binary
# intersections and upward closure is the up-cone of its minimum, so the
# unbounded closure axioms reduce to a shape test on the family.

SEM_PRINCIPAL = "principal"
SEM_PRINCIPAL_OR_EMPTY = "principal-or-empty"


@dataclass(frozen=True)
class Axiom:
    name: str
    formula: Formula | None
    one_step: bool
    kappa: int | None = None
    semantic: str | None = None


def famask_is_principal(famask: int, n: int) -> bool:
    """True when the family is the nonempty up-cone of its intersection."""
    if famask == 0:
        return False
    inter = full_mask(n)
    a = 0
    f = famask
    while f:
        if f & 1:
            inter &= a
        f >>= 1
        a += 1
    return famask == up_cone(inter, n).famask()


def semantic_predicate(tag: str):
    if tag == SEM_PRINCIPAL:
        return famask_is_principal
    if tag == SEM_PRINCIPAL_OR_EMPTY:
        return lambda famask, n: famask == 0 or famask_is_principal(famask, n)
    raise InvalidInputError(f"unknown semantic tag {tag!r}")


def _kappa_formula(k: int) -> Formula:
    names = [Var(f"v{i}") for i in range(1, k + 1)]
    boxes = And(tuple(Box(v) for v in names)) if k != 1 else Box(names[0])
    meet = And(tuple(names)) if k != 1 else names[0]
    return iff(boxes, Box(meet))


_FIXED_AXIOMS = {
    "M": ("box(u & v) -> box u", True),
    "C": ("box u & box v <-> box(u & v)", True),
    "N": ("box T", True),
    "Cont": ("box v <-> box ~v", True),
    "Conv": ("box(v & v1) & box(v | v2) -> box v", True),
    "CoConv": ("box v -> box(v & v1) | box(v | v2)", True),
    "T": ("box b -> b", False),
    "Four": ("box b -> box box b", False),
}

_CK_RE = re.compile(r"^Ck\((\d+)\)$")

REGISTRY_NAMES = tuple(_FIXED_AXIOMS) + ("Ck(k)", "CInf")


def expand_named(name: str, n: int | None = None) -> Axiom:
    """Resolve a registry name, with or without the leading '@'.

    Ck(k) keeps its k-variable formula while k < 2^n and degrades to the
    semantic shape test once instantiation values must repeat; CInf is
    always semantic.  When n is unknown, Ck(k) keeps the formula.
    """
    bare = name[1:] if name.startswith("@") else name
    if bare in _FIXED_AXIOMS:
        text, one_step = _FIXED_AXIOMS[bare]
        return Axiom(bare, parse(text), one_step)
    if bare == "CInf":
        return Axiom(bare, None, True, semantic=SEM_PRINCIPAL)
    m = _CK_RE.match(bare)
    if m:
        k = int(m.group(1))
        if k < 1:
            raise InvalidInputError("Ck(k): k must be at least 1")
        if n is not None and k >= (1 << n):
            return Axiom(bare, None, True, kappa=k, semantic=SEM_PRINCIPAL_OR_EMPTY)
        return Axiom(bare, _kappa_formula(k), True, kappa=k)
    raise InvalidInputError(f"unknown axiom name {name!r}")


@dataclass(frozen=True)
class AxiomSet:
    """Name-keyed collection of one-step axioms."""

    axioms: tuple[Axiom, ...]

    def __post_init__(self) -> None:
        names = [ax.name for ax in self.axioms]
        if len(set(names)) != len(names):
            raise InvalidInputError(f"axiom set: duplicate names in {names}")
        for ax in self.axioms:
            if not ax.one_step:
                raise InvalidInputError(f"axiom set: @{ax.name} is not a one-step axiom")

    def __iter__(self):
        return iter(self.axioms)

    def __len__(self) -> int:
        return len(self.axioms)

    def names(self) -> list[str]:
        return [ax.name for ax in self.axioms]

    def specs(self) -> list[str]:
        """Round-trippable spec strings, '@' for registry entries."""
        out = []
        for ax in self.axioms:
            if ax.semantic is not None or ax.name in _FIXED_AXIOMS or _CK_RE.match(ax.name):
                out.append("@" + ax.name)
            else:
                out.append(ax.name)
        return out


def axiom_set_from_specs(specs: list[str], n: int | None = None) -> AxiomSet:
    """Build an AxiomSet from '@Name' entries and inline one-step formulas."""
    axioms = []
    for spec in specs:
        spec = spec.strip()
        if not spec:
            raise InvalidInputError("axiom set: empty entry")
        if spec.startswith("@"):
            axioms.append(expand_named(spec, n))
        else:
            f = parse(spec)
            if not is_one_step(f):
                raise InvalidInputError(f"axiom set: {spec!r} is not one-step")
            axioms.append(Axiom(render(f), f, True))
    return AxiomSet(tuple(axioms))
