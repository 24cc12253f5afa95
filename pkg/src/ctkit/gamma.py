"""Strand-merge invariant engine.

A tangle state is a pair (omega, A): a scalar and a sparse matrix A[i, j]
indexed by live strand labels, both exact rational functions.  Generators:

    strand i          -> (1, A[i,i] = 1)
    crossing (i over j, sign s) ->
        (1, A[i,i] = 1, A[i,j] = 1 - t**s, A[j,j] = t**s)

Merging the end of strand e onto the start of strand s into a strand named k
multiplies omega by (1 - A[e,s]) and eliminates row e and column s:

    A'[i,j] = A[i,j] + A[i,s] * A[e,j] / (1 - A[e,s])

with row s and column e relabeled to k.  Merging a strand onto itself
(e == s) closes a loop: same elimination, no surviving label.  The merge is
degenerate when A[e,s] = 1.

The elimination is a Schur complement step, so a fold of many merges is
fraction-free Gaussian elimination in disguise: entries stay quotients of
minors of one polynomial matrix.  States therefore hold a numerator matrix
over a single shared denominator (the running pivot), updated by Bareiss's
rule with an exact division per entry instead of a gcd per operation.  The
`matrix` attribute materializes ordinary reduced rational entries on first
access.
"""

from __future__ import annotations

from .symcalc import Divider, MultiPoly, RatFun, div_exact, ratfun_text
from . import tangle as tg


class GammaError(Exception):
    pass


class DegenerateMerge(GammaError):
    """The merge pivot 1 - A[e,s] vanished; the state has no finite image."""


class UnsupportedGenerator(GammaError):
    """The engine has no rule for this atom (plain evaluation meets an H
    contact only when given an explicit h_rule)."""


_ZERO = RatFun.const(0)
_ONE = RatFun.const(1)
_ONE_P = MultiPoly.const(1)


class GammaState:
    """Scalar part, sparse matrix, and the set of live strand labels.

    Internally the matrix lives as polynomial numerators over one shared
    denominator; requesting `matrix` builds the reduced rational entries.
    """

    __slots__ = ("omega", "labels", "_numer", "_den", "_matrix")

    def __init__(self, omega: RatFun, matrix: dict | None = None,
                 labels: frozenset = frozenset(), *,
                 numer: dict | None = None, den: MultiPoly | None = None):
        self.omega = omega
        self.labels = labels
        if numer is not None:
            self._numer = numer
            self._den = _ONE_P if den is None else den
            self._matrix = None
        else:
            self._matrix = dict(matrix or {})
            self._numer = None
            self._den = None

    @property
    def matrix(self) -> dict:
        if self._matrix is None:
            den = self._den
            if den.is_one():
                self._matrix = {ij: RatFun(n, None, _reduced=True)
                                for ij, n in self._numer.items()}
            else:
                self._matrix = {ij: RatFun(n, den)
                                for ij, n in self._numer.items()}
        return self._matrix

    def parts(self):
        """(numerator dict, shared denominator) view of the matrix."""
        if self._numer is None:
            dens = []
            for f in self._matrix.values():
                if not f.den_is_one() and all(f.den != d for d in dens):
                    dens.append(f.den)
            den = _ONE_P
            for d in dens:
                den = den * d
            if den.is_one():
                numer = {ij: f.num for ij, f in self._matrix.items()}
            else:
                numer = {ij: f.num * div_exact(den, f.den)
                         for ij, f in self._matrix.items()}
            self._numer = numer
            self._den = den
        return self._numer, self._den

    def entry(self, i: int, j: int) -> RatFun:
        return self.matrix.get((i, j), _ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GammaState):
            return NotImplemented
        if self.labels != other.labels or self.omega != other.omega:
            return False
        keys = set(self.matrix) | set(other.matrix)
        return all(self.entry(*k) == other.entry(*k) for k in keys)

    def text(self) -> str:
        rows = [f"omega = {ratfun_text(self.omega)}"]
        for (i, j) in sorted(self.matrix):
            rows.append(f"A[{i},{j}] = {ratfun_text(self.matrix[(i, j)])}")
        return "\n".join(rows)


def state_strand(label: int) -> GammaState:
    return GammaState(_ONE, {(label, label): _ONE}, frozenset((label,)))


def state_crossing(over: int, under: int, sign: int) -> GammaState:
    ts = RatFun.var("t", 1 if sign > 0 else -1)
    m = {
        (over, over): _ONE,
        (over, under): _ONE - ts,
        (under, under): ts,
    }
    return GammaState(_ONE, m, frozenset((over, under)))


def atom_state(atom, h_rule=None) -> GammaState:
    if isinstance(atom, tg.Strand):
        return state_strand(atom.label)
    if isinstance(atom, tg.Crossing):
        return state_crossing(atom.over, atom.under, atom.sign)
    if isinstance(atom, tg.HVertex):
        if h_rule is None:
            raise UnsupportedGenerator(
                "no rule for contact atoms in plain evaluation")
        return h_rule(atom)
    raise UnsupportedGenerator(f"unknown atom {atom!r}")


def disjoint_state(a: GammaState, b: GammaState) -> GammaState:
    if a.labels & b.labels:
        raise tg.LabelClash("disjoint states share a label")
    na, da = a.parts()
    nb, db = b.parts()
    if db.is_one():
        den = da
        numer = dict(na)
        if da.is_one():
            numer.update(nb)
        else:
            # a lazily joined block matches the uniform elimination state:
            # entries the pivots never touched carry the running pivot
            for ij, v in nb.items():
                numer[ij] = v * da
    elif da.is_one():
        return disjoint_state(b, a)
    elif da == db:
        den = da
        numer = dict(na)
        numer.update(nb)
    else:
        den = da * db
        numer = {ij: v * db for ij, v in na.items()}
        for ij, v in nb.items():
            numer[ij] = v * da
    return GammaState(a.omega * b.omega, labels=a.labels | b.labels,
                      numer=numer, den=den)


def merge_state(state: GammaState, end: int, start: int,
                out: int | None = None) -> GammaState:
    """Glue the end of `end` to the start of `start`, naming the result
    `out`.  With end == start the strand closes and `out` is ignored."""
    if end not in state.labels:
        raise tg.DeadLabel(f"merge uses dead label {end}")
    if start not in state.labels:
        raise tg.DeadLabel(f"merge uses dead label {start}")
    closing = end == start
    if not closing:
        if out is None:
            raise GammaError("merge needs an output label")
        if out in state.labels - {end, start}:
            raise tg.LabelClash(f"merge output label {out} is already live")
    N, D = state.parts()
    nes = N.get((end, start))
    pivot = D if nes is None else D - nes
    if pivot.is_zero():
        raise DegenerateMerge(f"pivot vanishes merging {end} onto {start}")

    row = {}
    col = {}
    rest = {}
    for (i, j), v in N.items():
        ie, js = i == end, j == start
        if ie and js:
            continue
        elif ie:
            row[j] = v
        elif js:
            col[i] = v
        else:
            rest[(i, j)] = v

    cross = {}
    for i, ci in col.items():
        for j, rj in row.items():
            key = (i, j)
            acc = cross.get(key)
            v = ci * rj if acc is None else acc + ci * rj
            if v.is_zero():
                cross.pop(key, None)
            else:
                cross[key] = v

    # Bareiss step: raw update (v * pivot + cross) over D * pivot, with the
    # old denominator D dividing out of every entry on an elimination chain.
    scaled = pivot != D
    omega = state.omega if not scaled else state.omega * RatFun(pivot, D)
    new = {}
    den = pivot
    if D.is_one():
        for ij, v in rest.items():
            new[ij] = v * pivot if scaled else v
        for ij, c in cross.items():
            v = new.get(ij)
            v = c if v is None else v + c
            if v.is_zero():
                new.pop(ij, None)
            else:
                new[ij] = v
    else:
        exact = True
        divider = Divider(D)
        if scaled:
            for ij in rest.keys() | cross.keys():
                raw = rest[ij] * pivot if ij in rest else None
                c = cross.get(ij)
                if c is not None:
                    raw = c if raw is None else raw + c
                if raw.is_zero():
                    continue
                q = divider.divide(raw)
                if q is None:
                    exact = False
                    break
                new[ij] = q
        else:
            new.update(rest)
            for ij, c in cross.items():
                q = divider.divide(c)
                if q is None:
                    exact = False
                    break
                v = new.get(ij)
                v = q if v is None else v + q
                if v.is_zero():
                    new.pop(ij, None)
                else:
                    new[ij] = v
        if not exact:
            # a state built off any elimination chain: keep the quotient form
            den = D * pivot
            new = {}
            for ij in rest.keys() | cross.keys():
                raw = rest[ij] * pivot if ij in rest else None
                c = cross.get(ij)
                if c is not None:
                    raw = c if raw is None else raw + c
                if not raw.is_zero():
                    new[ij] = raw

    if closing:
        drop_i, drop_j = end, start
        new = {(i, j): v for (i, j), v in new.items()
               if i != drop_i and j != drop_j}
        labels = state.labels - {end}
    else:
        renamed = {}
        for (i, j), v in new.items():
            key = (out if i == start else i, out if j == end else j)
            acc = renamed.get(key)
            v = v if acc is None else acc + v
            if v.is_zero():
                renamed.pop(key, None)
            else:
                renamed[key] = v
        new = renamed
        labels = (state.labels - {end, start}) | {out}
    return GammaState(omega, labels=frozenset(labels), numer=new, den=den)


def relabel_state(state: GammaState, old: int, new: int) -> GammaState:
    numer, den = state.parts()
    m = {}
    for (i, j), v in numer.items():
        m[(new if i == old else i, new if j == old else j)] = v
    labels = (state.labels - {old}) | {new}
    return GammaState(state.omega, labels=frozenset(labels),
                      numer=m, den=den)


def eval_state(expr, h_rule=None, merge=merge_state,
               atom_fn=None, relabel=relabel_state) -> GammaState:
    """Evaluate a tangle expression to its state.

    Disjoint pieces are kept separate until a merge actually needs them,
    then unioned in; this keeps each elimination local to the strands it
    touches."""
    if atom_fn is None:
        def atom_fn(a):
            return atom_state(a, h_rule)

    def components(e) -> list:
        if isinstance(e, tg.Atom):
            return [atom_fn(e)]
        if isinstance(e, tg.Disjoint):
            return components(e.left) + components(e.right)
        if isinstance(e, tg.Relabel):
            comps = components(e.child)
            for idx, st in enumerate(comps):
                if e.old in st.labels:
                    if e.new != e.old and any(e.new in c.labels for c in comps):
                        raise tg.LabelClash(
                            f"relabel target {e.new} is already live")
                    comps[idx] = relabel(st, e.old, e.new)
                    return comps
            raise tg.DeadLabel(f"relabel of dead label {e.old}")
        if isinstance(e, tg.Merge):
            comps = components(e.child)
            touched = [st for st in comps
                       if e.end in st.labels or e.start in st.labels]
            if not touched:
                raise tg.DeadLabel(
                    f"merge uses dead labels {e.end}, {e.start}")
            for st in touched:
                comps.remove(st)
            joined = touched[0]
            for st in touched[1:]:
                joined = disjoint_state(joined, st)
            if e.end not in joined.labels or e.start not in joined.labels:
                missing = e.end if e.end not in joined.labels else e.start
                raise tg.DeadLabel(f"merge uses dead label {missing}")
            comps.append(merge(joined, e.end, e.start, e.out))
            return comps
        raise TypeError(f"not a tangle expression: {e!r}")

    comps = components(expr)
    state = comps[0]
    for st in comps[1:]:
        state = disjoint_state(state, st)
    return state


def eval_gamma(expr, h_rule=None) -> GammaState:
    """State of a tangle expression; `expr` may be AST or text."""
    if isinstance(expr, str):
        expr = tg.parse_expr(expr)
    return eval_state(expr, h_rule=h_rule)
