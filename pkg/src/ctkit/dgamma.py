"""Doubled strand-merge engine for chains with hard contacts.

Every visible strand i carries a hidden parallel partner labeled -i, so a
state's matrix is indexed by both signs.  Hard contacts get their own rule,
with one slip symbol h_v per contact name v; crossings and plain strands
follow the doubled versions of the ordinary rules, and a merge of i onto j
merges the partners -i onto -j as well.

The scalar part of a one-strand state is the chain invariant.  On knots
(no contacts) it equals the Alexander polynomial evaluated at t**2.  It is
only defined up to a factor +/- t**k, and honest comparisons between
diagrams additionally require both to be 0-framed: every strand piece
between contact passages must have self-writhe 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tangle as tg
from .gamma import (GammaState, UnsupportedGenerator, eval_state,
                    merge_state)
from .symcalc import (LaurentNormal, MultiPoly, RatFun, poly_text,
                      unit_normalize)

_ONE = RatFun.const(1)


def h_symbol(name: str) -> str:
    return f"h{name}"


def dstate_strand(label: int) -> GammaState:
    i = label
    m = {(i, i): _ONE, (-i, -i): _ONE}
    return GammaState(_ONE, m, frozenset((i, -i)))


def dstate_crossing(over: int, under: int, sign: int) -> GammaState:
    i, j = over, under
    t = RatFun.var("t")
    if sign > 0:
        tt = t * t
        m = {
            (i, i): _ONE, (-i, -i): _ONE,
            (j, j): tt, (-j, -j): tt,
            (i, j): (1 - t) * t, (i, -j): (1 - t) * t,
            (-i, j): 1 - t, (-i, -j): 1 - t,
        }
    else:
        s = t ** -1
        ss = s * s
        m = {
            (i, i): _ONE, (-i, -i): _ONE,
            (j, j): ss, (-j, -j): ss,
            (i, j): 1 - s, (i, -j): 1 - s,
            (-i, j): (1 - s) * s, (-i, -j): (1 - s) * s,
        }
    return GammaState(_ONE, m, frozenset((i, -i, j, -j)))


def dstate_contact(name: str, up: int, down: int) -> GammaState:
    i, j = up, down
    t = RatFun.var("t")
    h = RatFun.var(h_symbol(name))
    m = {
        (-i, -i): t,
        (j, -j): t,
        (-j, -i): 1 - t,
        (-i, -j): 1 - t,
        (i, -j): (1 - h) * t,
        (-j, -j): -(1 - h) * t,
        (-j, j): 1 - h,
        (-j, i): _ONE,
        (i, j): h,
    }
    return GammaState(_ONE, m, frozenset((i, -i, j, -j)))


def datom_state(atom) -> GammaState:
    if isinstance(atom, tg.Strand):
        return dstate_strand(atom.label)
    if isinstance(atom, tg.Crossing):
        return dstate_crossing(atom.over, atom.under, atom.sign)
    if isinstance(atom, tg.HVertex):
        return dstate_contact(atom.name, atom.up, atom.down)
    raise UnsupportedGenerator(f"unknown atom {atom!r}")


def dmerge_state(state: GammaState, end: int, start: int,
                 out: int | None = None) -> GammaState:
    state = merge_state(state, end, start, out)
    return merge_state(state, -end, -start, None if out is None else -out)


def _drelabel(state: GammaState, old: int, new: int) -> GammaState:
    m = {}
    swap = {old: new, -old: -new}
    for (i, j), v in state.matrix.items():
        m[(swap.get(i, i), swap.get(j, j))] = v
    labels = frozenset(swap.get(l, l) for l in state.labels)
    return GammaState(state.omega, m, labels)


def eval_dgamma(expr) -> GammaState:
    """Doubled state of an expression (text or AST)."""
    if isinstance(expr, str):
        expr = tg.parse_expr(expr)
    return eval_state(expr, atom_fn=datom_state, merge=dmerge_state,
                      relabel=_drelabel)


@dataclass(frozen=True)
class InvariantReport:
    """Unit-normalized scalar invariant of a one-strand chain.

    value is the normal form with contact symbols renamed h1, h2, ... in
    the order the chain first passes each contact; the original scalar is
    unit_sign * t**unit_exponent * value after that renaming.
    """

    value: MultiPoly
    unit_exponent: int
    unit_sign: int
    h_map: dict
    omega: RatFun
    strand: int

    def text(self) -> str:
        return poly_text(self.value)


def dgamma1(expr) -> InvariantReport:
    """Normalized scalar invariant of a single-strand expression."""
    if isinstance(expr, str):
        expr = tg.parse_expr(expr)
    state = eval_dgamma(expr)
    open_labels = sorted(l for l in state.labels if l > 0)
    if len(open_labels) != 1:
        raise tg.TangleError(
            f"scalar invariant needs one open strand, found {open_labels}")
    names = tg.vertex_chain_order(expr)
    h_map = {name: f"h{k}" for k, name in enumerate(names, start=1)}
    omega = _rename_h(state.omega, h_map)
    normal = unit_normalize(omega)
    return InvariantReport(normal.poly, normal.unit_exponent,
                           normal.unit_sign, h_map, omega, open_labels[0])


def _rename_h(f: RatFun, h_map: dict) -> RatFun:
    mapping = {h_symbol(old): new for old, new in h_map.items()}
    if all(k == v for k, v in mapping.items()):
        return f
    # two phases, in case source and target names overlap
    tmp = {k: f"_{i}_" for i, k in enumerate(mapping)}
    back = {f"_{i}_": mapping[k] for i, k in enumerate(mapping)}
    return RatFun(f.num.rename(tmp).rename(back),
                  f.den.rename(tmp).rename(back))


def normalized(expr) -> LaurentNormal:
    rep = dgamma1(expr)
    return LaurentNormal(rep.value, rep.unit_exponent, rep.unit_sign)
