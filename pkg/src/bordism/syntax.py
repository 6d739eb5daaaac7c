"""Reading manifold expressions and fixed-point data from JSON or s-expressions.

S-expression grammar::

    manifold := point | (proj LINE LINE ...) | (prod M M ...) | (union M M ...)
    datum    := RATIONAL | mI | (e W [k]) | (Y W d [k])
              | (+ datum ...) | (* datum ...) | (- datum [datum]) | (^ datum k)
    LINE, W  := (int int ...)

Errors report the character offset of the offending token.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .borel import Weight
from .errors import ParseError, PreconditionError
from .fixedring import FixedDatum
from .geometry import DisjointUnion, ManifoldExpr, Point, Product, Proj, manifold_from_json
from .mu import MuElement

_TOKEN = re.compile(r"[()]|[^\s()]+")
_INT = re.compile(r"^[+-]?\d+$")
_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")
_GEN = re.compile(r"^m(\d+)$")


@dataclass
class Node:
    pos: int
    atom: str | None = None
    items: list | None = None

    @property
    def is_list(self) -> bool:
        return self.items is not None


def read_sexpr(text: str) -> Node:
    """Parse one s-expression; trailing input is an error."""
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(text)]
    if not tokens:
        raise ParseError("empty expression", pos=0)
    node, k = _read(tokens, 0, len(text))
    if k != len(tokens):
        raise ParseError(f"unexpected trailing input {tokens[k][0]!r}", pos=tokens[k][1])
    return node


def _read(tokens, k, end):
    tok, pos = tokens[k]
    if tok == ")":
        raise ParseError("unbalanced ')'", pos=pos)
    if tok != "(":
        return Node(pos, atom=tok), k + 1
    items = []
    k += 1
    while True:
        if k >= len(tokens):
            raise ParseError("missing ')'", pos=end)
        if tokens[k][0] == ")":
            return Node(pos, items=items), k + 1
        child, k = _read(tokens, k, end)
        items.append(child)


def _int(node: Node, what: str) -> int:
    if node.is_list or not _INT.match(node.atom):
        raise ParseError(f"expected an integer {what}", pos=node.pos)
    return int(node.atom)


def _vector(node: Node, what: str) -> tuple:
    if not node.is_list or not node.items:
        raise ParseError(f"expected a nonempty integer vector for {what}", pos=node.pos)
    return tuple(_int(c, f"entry of {what}") for c in node.items)


def _weight(node: Node) -> Weight:
    v = _vector(node, "a weight")
    try:
        return Weight(v)
    except PreconditionError as exc:
        raise ParseError(str(exc), pos=node.pos) from exc


# ---------------------------------------------------------------------------
# manifolds


def _manifold(node: Node) -> ManifoldExpr:
    if not node.is_list:
        if node.atom == "point":
            return Point()
        raise ParseError(f"unknown manifold {node.atom!r}", pos=node.pos)
    if not node.items or node.items[0].is_list:
        raise ParseError("expected a constructor name", pos=node.pos)
    head, args = node.items[0], node.items[1:]
    tag = head.atom
    if tag == "proj":
        if not args:
            raise ParseError("proj needs at least one line", pos=node.pos)
        lines = [_vector(a, "a line") for a in args]
        try:
            return Proj(tuple(lines))
        except PreconditionError as exc:
            raise ParseError(str(exc), pos=node.pos) from exc
    if tag == "prod":
        if len(args) < 2:
            raise ParseError("prod needs at least two factors", pos=node.pos)
        out = _manifold(args[0])
        for a in args[1:]:
            out = Product(out, _manifold(a))
        return out
    if tag == "union":
        if not args:
            raise ParseError("union needs at least one part", pos=node.pos)
        return DisjointUnion(tuple(_manifold(a) for a in args))
    raise ParseError(f"unknown manifold constructor {tag!r}", pos=head.pos)


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, pos=exc.pos) from exc


def parse_manifold(text: str, fmt: str = "json") -> ManifoldExpr:
    if fmt == "json":
        return manifold_from_json(_load_json(text))
    if fmt == "sexpr":
        return _manifold(read_sexpr(text))
    raise ParseError(f"unknown input format {fmt!r}")


# ---------------------------------------------------------------------------
# fixed-point data


def _datum(node: Node, rank: int | None) -> FixedDatum:
    if not node.is_list:
        a = node.atom
        if _RAT.match(a):
            return FixedDatum.const(MuElement.const(a), rank or 1)
        g = _GEN.match(a)
        if g and int(g.group(1)) >= 1:
            return FixedDatum.const(MuElement.gen(int(g.group(1))), rank or 1)
        raise ParseError(f"unknown symbol {a!r}", pos=node.pos)
    if not node.items or node.items[0].is_list:
        raise ParseError("expected an operator", pos=node.pos)
    op, args = node.items[0].atom, node.items[1:]
    if op == "e":
        if len(args) not in (1, 2):
            raise ParseError("(e W [k])", pos=node.pos)
        w = _weight(args[0])
        k = _int(args[1], "exponent") if len(args) == 2 else 1
        return FixedDatum.euler(w, k)
    if op == "Y":
        if len(args) not in (2, 3):
            raise ParseError("(Y W d [k])", pos=node.pos)
        w = _weight(args[0])
        d = _int(args[1], "level")
        if d < 2:
            raise ParseError("Y levels start at 2; write (e W -1) for level 1", pos=args[1].pos)
        k = _int(args[2], "power") if len(args) == 3 else 1
        if k < 0:
            raise ParseError("Y powers are nonnegative", pos=args[2].pos)
        return FixedDatum.y_class(w, d, k)
    if op in ("+", "*"):
        if not args:
            raise ParseError(f"({op} ...) needs an argument", pos=node.pos)
        parts = [_datum(a, rank) for a in args]
        parts = _unify(parts, node.pos)
        out = parts[0]
        for p in parts[1:]:
            out = out + p if op == "+" else out * p
        return out
    if op == "-":
        if len(args) == 1:
            return -_datum(args[0], rank)
        if len(args) == 2:
            a, b = _unify([_datum(args[0], rank), _datum(args[1], rank)], node.pos)
            return a - b
        raise ParseError("(- a) or (- a b)", pos=node.pos)
    if op == "^":
        if len(args) != 2:
            raise ParseError("(^ a k)", pos=node.pos)
        k = _int(args[1], "power")
        if k < 0:
            raise ParseError("negative powers only exist for e; use (e W -k)", pos=args[1].pos)
        return _datum(args[0], rank) ** k
    raise ParseError(f"unknown operator {op!r}", pos=node.items[0].pos)


def _unify(parts, pos):
    # constants parse with a provisional rank; lift them to the common one
    ranks = {p.rank for p in parts if p.weights()}
    if len(ranks) > 1:
        raise ParseError(f"weights of different ranks {sorted(ranks)}", pos=pos)
    if not ranks:
        return parts
    r = ranks.pop()
    out = []
    for p in parts:
        if p.rank != r:
            p = FixedDatum(r, p.terms())
        out.append(p)
    return out


def parse_fixed(text: str, fmt: str = "json", rank: int | None = None) -> FixedDatum:
    if fmt == "json":
        obj = _load_json(text)
        return FixedDatum.from_json(obj, rank=rank)
    if fmt == "sexpr":
        x = _datum(read_sexpr(text), rank)
        if rank is not None and x.rank != rank:
            if x.weights():
                raise ParseError(f"datum has rank {x.rank}, expected {rank}")
            x = FixedDatum(rank, x.terms())
        return x
    raise ParseError(f"unknown input format {fmt!r}")
