"""Tangle expressions: atoms glued by end-to-start merges.

The textual form is

    expr  ::= atom+ ('//' merge)*
    atom  ::= 'S[' label ']'
            | 'X[' label ',' label ']'       positive crossing
            | 'Xb[' label ',' label ']'      negative crossing
            | 'H[' name ';' label ',' label ']'
    merge ::= 'm[' label (',' label)* '>' label ']'

Atoms written next to each other are disjoint union, so every atom label in
an expression must be distinct.  ``m[a,b>k]`` glues the end of strand a to
the start of strand b and names the joined strand k; longer argument lists
fold left, ``m[a,b,c>k] == m[a,b>k] // m[k,c>k]``.  ``m[a,a>...]`` closes
strand a into a loop.  Labels are positive integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class TangleError(Exception):
    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)
        self.pos = pos


class TangleSyntaxError(TangleError):
    pass


class LabelClash(TangleError):
    """A label is introduced while an identically-named strand is live."""


class DeadLabel(TangleError):
    """A merge names a strand that is not live at that point."""


class ClosedTangle(TangleError):
    """The expression closes every strand; at least one must stay open."""


@dataclass(frozen=True)
class Strand:
    label: int


@dataclass(frozen=True)
class Crossing:
    """Two-strand crossing.  With sign +1 the `over` strand keeps
    coefficient 1 in the invariant rules and, in drawings, passes in front."""
    over: int
    under: int
    sign: int


@dataclass(frozen=True)
class HVertex:
    """Rigid two-strand contact; `up` enters the square bottom-to-top,
    `down` top-to-bottom.  `name` tags the contact's slip symbol."""
    name: str
    up: int
    down: int


@dataclass(frozen=True)
class Disjoint:
    left: "TangleExpr"
    right: "TangleExpr"


@dataclass(frozen=True)
class Merge:
    child: "TangleExpr"
    end: int
    start: int
    out: int


@dataclass(frozen=True)
class Relabel:
    child: "TangleExpr"
    old: int
    new: int


TangleExpr = Union[Strand, Crossing, HVertex, Disjoint, Merge, Relabel]

Atom = (Strand, Crossing, HVertex)


def atom_labels(atom) -> tuple[int, ...]:
    if isinstance(atom, Strand):
        return (atom.label,)
    if isinstance(atom, Crossing):
        return (atom.over, atom.under)
    if isinstance(atom, HVertex):
        return (atom.up, atom.down)
    raise TypeError(f"not an atom: {atom!r}")


def live_labels(expr: TangleExpr) -> frozenset[int]:
    """Labels of the strands still open after evaluating expr."""
    if isinstance(expr, Atom):
        return frozenset(atom_labels(expr))
    if isinstance(expr, Disjoint):
        left = live_labels(expr.left)
        right = live_labels(expr.right)
        both = left & right
        if both:
            raise LabelClash(f"label {min(both)} appears on both sides of a "
                             "disjoint union")
        return left | right
    if isinstance(expr, Merge):
        live = live_labels(expr.child)
        for lbl in {expr.end, expr.start}:
            if lbl not in live:
                raise DeadLabel(f"merge uses dead label {lbl}")
        if expr.end == expr.start:
            return live - {expr.end}
        rest = live - {expr.end, expr.start}
        if expr.out in rest:
            raise LabelClash(f"merge output label {expr.out} is already live")
        return rest | {expr.out}
    if isinstance(expr, Relabel):
        live = live_labels(expr.child)
        if expr.old not in live:
            raise DeadLabel(f"relabel of dead label {expr.old}")
        if expr.new != expr.old and expr.new in live:
            raise LabelClash(f"relabel target {expr.new} is already live")
        return (live - {expr.old}) | {expr.new}
    raise TypeError(f"not a tangle expression: {expr!r}")


def atoms(expr: TangleExpr) -> list:
    """All atoms in left-to-right order."""
    out = []

    def walk(e):
        if isinstance(e, Atom):
            out.append(e)
        elif isinstance(e, Disjoint):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, (Merge, Relabel)):
            walk(e.child)
        else:
            raise TypeError(f"not a tangle expression: {e!r}")

    walk(expr)
    return out


def merges(expr: TangleExpr) -> list:
    """Merge and relabel operations from the outside in, reordered to
    application order."""
    ops = []
    e = expr
    while isinstance(e, (Merge, Relabel)):
        ops.append(e)
        e = e.child
    ops.reverse()
    return ops


# ---------------------------------------------------------------------------
# parsing

_TOKENS = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                     r"|(?P<glue>//)|(?P<punct>[\[\],;>]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise TangleSyntaxError(f"bad character {rest[0]!r}", pos)
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.end = len(text)

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return (None, None, self.end)

    def take(self, kind=None, value=None):
        got, text, pos = self.peek()
        if kind is not None and got != kind:
            raise TangleSyntaxError(f"expected {value or kind}, got "
                                    f"{text if got else 'end of input'!r}", pos)
        if value is not None and text != value:
            raise TangleSyntaxError(f"expected {value!r}, got {text!r}", pos)
        self.i += 1
        return text, pos

    def label(self) -> tuple[int, int]:
        text, pos = self.take("num")
        value = int(text)
        if value <= 0:
            raise TangleSyntaxError("labels are positive integers", pos)
        return value, pos

    def parse(self) -> TangleExpr:
        expr = self.atom()
        while self.peek()[0] == "name":
            expr = Disjoint(expr, self.atom())
        while self.peek()[0] == "glue":
            self.take("glue")
            expr = self.merge(expr)
        kind, text, pos = self.peek()
        if kind is not None:
            raise TangleSyntaxError(f"unexpected {text!r}", pos)
        return expr

    def atom(self) -> TangleExpr:
        name, pos = self.take("name")
        if name == "S":
            self.take("punct", "[")
            lbl, _ = self.label()
            self.take("punct", "]")
            return Strand(lbl)
        if name in ("X", "Xb"):
            self.take("punct", "[")
            a, _ = self.label()
            self.take("punct", ",")
            b, bpos = self.label()
            self.take("punct", "]")
            if a == b:
                raise TangleSyntaxError("crossing needs two distinct strands",
                                        bpos)
            return Crossing(a, b, 1 if name == "X" else -1)
        if name == "H":
            self.take("punct", "[")
            kind = self.peek()[0]
            vname, _ = self.take("num" if kind == "num" else "name")
            self.take("punct", ";")
            u, _ = self.label()
            self.take("punct", ",")
            d, dpos = self.label()
            self.take("punct", "]")
            if u == d:
                raise TangleSyntaxError("contact needs two distinct strands",
                                        dpos)
            return HVertex(vname, u, d)
        raise TangleSyntaxError(f"unknown atom {name!r}", pos)

    def merge(self, expr: TangleExpr) -> TangleExpr:
        self.take("name", "m")
        self.take("punct", "[")
        args = [self.label()[0]]
        while self.peek()[1] == ",":
            self.take("punct", ",")
            args.append(self.label()[0])
        self.take("punct", ">")
        out, _ = self.label()
        self.take("punct", "]")
        if len(args) == 1:
            return Relabel(expr, args[0], out)
        acc = expr
        cur = args[0]
        for nxt in args[1:]:
            acc = Merge(acc, cur, nxt, out)
            cur = out
        return acc


def parse_expr(text: str) -> TangleExpr:
    """Parse and validate a tangle expression.

    Validation covers syntax, duplicate atom labels, merges of dead labels,
    and full closure (an expression must leave at least one open strand).
    """
    expr = _Parser(text).parse()
    live = live_labels(expr)   # raises LabelClash / DeadLabel
    if not live:
        raise ClosedTangle("expression closes every strand")
    return expr


# ---------------------------------------------------------------------------
# printing


def _atom_text(atom) -> str:
    if isinstance(atom, Strand):
        return f"S[{atom.label}]"
    if isinstance(atom, Crossing):
        head = "X" if atom.sign > 0 else "Xb"
        return f"{head}[{atom.over},{atom.under}]"
    if isinstance(atom, HVertex):
        return f"H[{atom.name};{atom.up},{atom.down}]"
    raise TypeError(f"not an atom: {atom!r}")


def canonical_text(expr: TangleExpr) -> str:
    parts = [" ".join(_atom_text(a) for a in atoms(expr))]
    pending = None   # (args, out) of a multi-merge being collapsed
    for op in merges(expr):
        if isinstance(op, Relabel):
            if pending:
                parts.append(_merge_text(*pending))
                pending = None
            parts.append(f"m[{op.old}>{op.new}]")
            continue
        if pending and op.end == pending[1] == op.out:
            pending[0].append(op.start)
            continue
        if pending:
            parts.append(_merge_text(*pending))
        pending = ([op.end, op.start], op.out)
    if pending:
        parts.append(_merge_text(*pending))
    return " // ".join(parts)


def _merge_text(args, out) -> str:
    return f"m[{','.join(str(a) for a in args)}>{out}]"


# ---------------------------------------------------------------------------
# strand pieces and chain order


def strand_pieces(expr: TangleExpr):
    """Trace which atom passages make up each final strand.

    Returns (pieces, closed): ``pieces`` maps each live label to its ordered
    list of passages, a passage being (atom_index, original_label); ``closed``
    lists the passage cycles of components closed by self-merges.
    """
    alist = atoms(expr)
    pieces: dict[int, list] = {}
    seen: dict[int, int] = {}
    for idx, atom in enumerate(alist):
        for lbl in atom_labels(atom):
            if lbl in seen:
                raise LabelClash(f"atom label {lbl} repeats")
            seen[lbl] = idx
            pieces[lbl] = [(idx, lbl)]
    closed = []
    for op in merges(expr):
        if isinstance(op, Relabel):
            pieces[op.new] = pieces.pop(op.old)
            continue
        if op.end == op.start:
            closed.append(pieces.pop(op.end))
            continue
        head = pieces.pop(op.end)
        tail = pieces.pop(op.start)
        pieces[op.out] = head + tail
    return pieces, closed


def vertex_chain_order(expr: TangleExpr) -> list[str]:
    """Contact names ordered by first passage, walking final strands by
    ascending label, then any closed components."""
    alist = atoms(expr)
    pieces, closed = strand_pieces(expr)
    order = []
    walks = [pieces[k] for k in sorted(pieces)] + closed
    for walk in walks:
        for idx, _ in walk:
            atom = alist[idx]
            if isinstance(atom, HVertex) and atom.name not in order:
                order.append(atom.name)
    return order


def _segments_after_contacts(walk, alist):
    """Split one strand walk after each contact passage.

    The contact passage stays with the piece it ends, so a strand passing
    k contacts yields k + 1 pieces, trailing tail included even if empty.
    """
    segs = [[]]
    for passage in walk:
        segs[-1].append(passage)
        if isinstance(alist[passage[0]], HVertex):
            segs.append([])
    return segs


def piece_writhes(expr: TangleExpr) -> list[tuple[int, int]]:
    """Writhe of every chain piece, as ``(piece_id, writhe)`` pairs.

    A piece is a maximal run of a final strand between contact passages;
    a crossing counts toward a piece only when the strand runs through
    both of its arcs inside that same piece.  Pieces are numbered from 0
    walking open strands by ascending label, then closed components.  A
    closed component splits cyclically, or forms one whole-loop piece
    when it meets no contact.  Every piece is listed, zero writhe or not.
    """
    alist = atoms(expr)
    pieces, closed = strand_pieces(expr)
    out: list[tuple[int, int]] = []

    def tally(segments):
        for seg in segments:
            seen = set()
            w = 0
            for idx, _ in seg:
                atom = alist[idx]
                if isinstance(atom, Crossing):
                    if idx in seen:
                        w += atom.sign
                    else:
                        seen.add(idx)
            out.append((len(out), w))

    for key in sorted(pieces):
        tally(_segments_after_contacts(pieces[key], alist))
    for walk in closed:
        hs = [i for i, p in enumerate(walk) if isinstance(alist[p[0]], HVertex)]
        if not hs:
            tally([list(walk)])
        else:
            rotated = walk[hs[0] + 1:] + walk[:hs[0] + 1]
            # the rotation ends on a contact, so drop the empty tail
            tally(_segments_after_contacts(rotated, alist)[:-1])
    return out
