"""Machine checks for the moves both invariants must respect.

Each check is a pair of tangle expressions that draw the same object, plus
the relation their evaluated states must satisfy: exact equality for most
moves, a stated monomial unit for the single-strand twist under the plain
engine.  The doubled engine is not twist-invariant; there the twist checks
only measure and record the discrepancy, which is why framing matters
elsewhere in the package.

The module also carries the undetermined-coefficient analysis for the
naive single-copy treatment of a contact: it derives the coefficient
relations forced by the slide moves, confirms they pinch a looped contact
down to a scalar, and exhibits the resulting blindness to the two basic
two-contact chain configurations.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gct
from . import tangle as tg
from .dgamma import eval_dgamma
from .gamma import GammaState, eval_gamma
from .symcalc import RatFun, ratfun_text

__all__ = [
    "Equal", "UnitRatio", "DefectRecord", "MoveInstance", "MoveReport",
    "VerifyError", "check_move", "builtin_moves", "builtin_suite",
    "suite_passed", "embedded_instance", "naive_h_rule",
    "constrained_naive_rule", "NaiveExtensionReport", "naive_h_constraints",
]


class VerifyError(Exception):
    """A check could not be carried out (malformed move or system)."""


# ---------------------------------------------------------------------------
# Move instances


@dataclass(frozen=True)
class Equal:
    """Both sides must evaluate to identical states."""

    def describe(self) -> str:
        return "equal"


@dataclass(frozen=True)
class UnitRatio:
    """Matrices agree and the scalar parts differ by exactly t**power."""

    power: int

    def describe(self) -> str:
        return f"unit t^{self.power}"


@dataclass(frozen=True)
class DefectRecord:
    """No expectation; the comparison is recorded for inspection."""

    def describe(self) -> str:
        return "record"


@dataclass(frozen=True)
class MoveInstance:
    name: str
    lhs: str
    rhs: str
    expected: Equal | UnitRatio | DefectRecord


def _slide_pair(atoms: str) -> tuple[str, str]:
    # both slide orientations share the crossing fold; only the order of
    # gluing the contact legs onto the crossing tails differs
    return (f"{atoms} // m[3,5>3] // m[1,4>1] // m[6,2>2]",
            f"{atoms} // m[3,5>3] // m[4,1>1] // m[2,6>2]")


_R4_ATOMS = {
    "R4a": "H[9;1,2] X[3,4] Xb[5,6]",
    "R4b": "H[9;1,2] Xb[4,3] X[6,5]",
    "R4c": "H[9;1,2] X[3,6] Xb[5,4]",
    "R4d": "H[9;1,2] Xb[6,3] X[4,5]",
}

def _flip_signs(atoms: str) -> str:
    # swap X and Xb atom heads without touching labels
    return atoms.replace("Xb[", "@[").replace("X[", "Xb[").replace(
        "@[", "X[")


_R1_POS = MoveInstance("R1+", "X[1,2] // m[1,2>3]", "S[3]", UnitRatio(1))
_R1_NEG = MoveInstance("R1-", "Xb[1,2] // m[1,2>3]", "S[3]", UnitRatio(-1))
_R2 = MoveInstance(
    "R2",
    "X[1,3] Xb[2,4] // m[1,2>9] // m[3,4>10]",
    "S[9] S[10]",
    Equal())
_R3 = MoveInstance(
    "R3",
    "X[1,2] X[4,3] X[5,6] // m[1,4>1] // m[2,5>2] // m[3,6>3]",
    "X[1,6] X[2,3] X[4,5] // m[1,4>1] // m[2,5>2] // m[3,6>3]",
    Equal())
_HPASS = MoveInstance(
    "HPassThrough",
    "H[9;1,2] X[3,4] X[5,6] // m[4,1,3,5,2,6>9]",
    "H[9;1,2] X[3,4] X[5,6] // m[4,1,5,3,2,6>9]",
    Equal())


def _r4_instances() -> list[MoveInstance]:
    out = []
    for base, atoms in _R4_ATOMS.items():
        for suffix, text in ((("+"), atoms), (("-"), _flip_signs(atoms))):
            lhs, rhs = _slide_pair(text)
            out.append(MoveInstance(base + suffix, lhs, rhs, Equal()))
    return out


_GAMMA_MOVES = (_R1_POS, _R1_NEG, _R2, _R3)
_DGAMMA_MOVES = tuple(
    [_R2, _R3] + _r4_instances() + [
        _HPASS,
        MoveInstance(_R1_POS.name, _R1_POS.lhs, _R1_POS.rhs, DefectRecord()),
        MoveInstance(_R1_NEG.name, _R1_NEG.lhs, _R1_NEG.rhs, DefectRecord()),
    ])


def builtin_moves(engine: str) -> tuple[MoveInstance, ...]:
    """The built-in move list for one engine ("gamma" or "dgamma")."""
    if engine == "gamma":
        return _GAMMA_MOVES
    if engine == "dgamma":
        return _DGAMMA_MOVES
    raise VerifyError(f"unknown engine {engine!r}")


# ---------------------------------------------------------------------------
# Checking


@dataclass(frozen=True)
class MoveReport:
    move: str
    engine: str
    expected: str
    outcome: str
    passed: bool
    ratio: str | None = None
    matrix_diff: tuple[tuple[str, str, str], ...] = ()
    error: str | None = None

    def to_dict(self) -> dict:
        d = {"move": self.move, "engine": self.engine,
             "expected": self.expected, "outcome": self.outcome,
             "passed": self.passed}
        if self.ratio is not None:
            d["ratio"] = self.ratio
        if self.matrix_diff:
            d["matrix_diff"] = [list(row) for row in self.matrix_diff]
        if self.error is not None:
            d["error"] = self.error
        return d


def _monomial_unit(q: RatFun) -> int | None:
    """Exponent k when q == t**k, else None."""
    if not q.den.is_one() or not q.num.is_monomial():
        return None
    (exps, coeff), symbols = q.num.lead(), q.num.symbols
    if coeff != 1:
        return None
    k = 0
    for name, e in zip(symbols, exps):
        if not e:
            continue
        if name != "t":
            return None
        k = e
    return k


def _evaluate(text: str, engine: str) -> GammaState:
    if engine == "gamma":
        return eval_gamma(text)
    if engine == "dgamma":
        return eval_dgamma(text)
    raise VerifyError(f"unknown engine {engine!r}")


def check_move(m: MoveInstance, engine: str) -> MoveReport:
    """Evaluate both sides of a move and compare the states.

    Exact equality is reported as such; when only the scalar parts differ,
    and by a bare power of t, the report carries that unit.  Any other
    discrepancy lists the differing matrix entries.  Evaluation errors are
    caught into the report rather than raised.
    """
    expected = m.expected.describe()
    try:
        sl = _evaluate(m.lhs, engine)
        sr = _evaluate(m.rhs, engine)
    except Exception as exc:
        return MoveReport(m.name, engine, expected, "error", False,
                          error=f"{type(exc).__name__}: {exc}")

    keys = sorted(set(sl.matrix) | set(sr.matrix))
    diff = tuple(
        (f"{i},{j}", ratfun_text(sl.entry(i, j)), ratfun_text(sr.entry(i, j)))
        for i, j in keys if sl.entry(i, j) != sr.entry(i, j))
    ratio = None
    if not diff and not sr.omega.is_zero():
        ratio = sl.omega / sr.omega

    if not diff and ratio is not None and ratio.is_one():
        outcome = "equal"
        passed = isinstance(m.expected, (Equal, DefectRecord))
        return MoveReport(m.name, engine, expected, outcome, passed)

    if not diff and ratio is not None:
        k = _monomial_unit(ratio)
        outcome = f"unit t^{k}" if k is not None else "scalar differs"
        passed = (isinstance(m.expected, UnitRatio) and k == m.expected.power
                  or isinstance(m.expected, DefectRecord))
        return MoveReport(m.name, engine, expected, outcome, passed,
                          ratio=ratfun_text(ratio))

    outcome = "differs"
    passed = isinstance(m.expected, DefectRecord)
    return MoveReport(
        m.name, engine, expected, outcome, passed,
        ratio=None if ratio is None else ratfun_text(ratio),
        matrix_diff=diff)


def builtin_suite(engine: str) -> list[MoveReport]:
    """Run every built-in move for one engine."""
    return [check_move(m, engine) for m in builtin_moves(engine)]


def suite_passed(reports) -> bool:
    return all(r.passed for r in reports)


# ---------------------------------------------------------------------------
# Random embedding


def _shift_labels(expr, off: int):
    if isinstance(expr, tg.Strand):
        return tg.Strand(expr.label + off)
    if isinstance(expr, tg.Crossing):
        return tg.Crossing(expr.over + off, expr.under + off, expr.sign)
    if isinstance(expr, tg.HVertex):
        return tg.HVertex(expr.name, expr.up + off, expr.down + off)
    if isinstance(expr, tg.Disjoint):
        return tg.Disjoint(_shift_labels(expr.left, off),
                           _shift_labels(expr.right, off))
    if isinstance(expr, tg.Merge):
        return tg.Merge(_shift_labels(expr.child, off), expr.end + off,
                        expr.start + off, expr.out + off)
    if isinstance(expr, tg.Relabel):
        return tg.Relabel(_shift_labels(expr.child, off), expr.old + off,
                          expr.new + off)
    raise TypeError(f"not a tangle expression: {expr!r}")


def embedded_instance(m: MoveInstance, n: int = 2,
                      seed: int = 0) -> MoveInstance:
    """Splice a move into a random compiled contact diagram.

    Both sides get the identical ambient chain, with the move's open
    strands welded onto its end in label order, so an exact move must stay
    exact in context.  Only equality moves embed this way.
    """
    if not isinstance(m.expected, Equal):
        raise VerifyError(f"only exact moves embed; {m.name} is not one")
    ambient = gct.compile_diagram(gct.random_diagram(n, seed)).expr
    chain = max(tg.live_labels(ambient))
    off = 1000

    def spliced(text: str):
        # rebuild in the grammar's normal form: every atom up front, then
        # the replayed ops, then the welds, so the text round-trips
        side = _shift_labels(tg.parse_expr(text), off)
        expr = None
        for atom in tg.atoms(ambient) + tg.atoms(side):
            expr = atom if expr is None else tg.Disjoint(expr, atom)
        for op in tg.merges(ambient) + tg.merges(side):
            if isinstance(op, tg.Relabel):
                expr = tg.Relabel(expr, op.old, op.new)
            else:
                expr = tg.Merge(expr, op.end, op.start, op.out)
        for lbl in sorted(tg.live_labels(side)):
            expr = tg.Merge(expr, chain, lbl, chain)
        return tg.canonical_text(expr)

    return MoveInstance(f"{m.name}@{n}/{seed}", spliced(m.lhs),
                        spliced(m.rhs), Equal())


# ---------------------------------------------------------------------------
# The naive single-copy contact rule


def naive_h_rule(atom: tg.HVertex) -> GammaState:
    """Contact state with undetermined coefficients p0..p4."""
    i, j = atom.up, atom.down
    m = {(i, i): RatFun.var("p1"), (i, j): RatFun.var("p2"),
         (j, i): RatFun.var("p3"), (j, j): RatFun.var("p4")}
    return GammaState(RatFun.var("p0"), m, frozenset((i, j)))


def constrained_naive_rule(atom: tg.HVertex) -> GammaState:
    """The naive rule with the forced relations substituted in."""
    i, j = atom.up, atom.down
    p1 = RatFun.var("p1")
    q = 1 - p1
    m = {(i, i): p1, (i, j): q, (j, i): q, (j, j): p1}
    return GammaState(RatFun.var("p0"), m, frozenset((i, j)))


_UNKNOWNS = ("p2", "p3", "p4")


def _linear_rows(conditions):
    """Split each vanishing condition into unknown coefficients + rest."""
    zero = {u: RatFun.const(0) for u in _UNKNOWNS}
    rows = []
    for poly in conditions:
        f = RatFun(poly)
        const = f.substitute(dict.fromkeys(_UNKNOWNS, 0))
        coeffs = {}
        for u in _UNKNOWNS:
            point = dict.fromkeys(_UNKNOWNS, 0)
            point[u] = 1
            coeffs[u] = f.substitute(point) - const
        rebuilt = const
        for u in _UNKNOWNS:
            rebuilt = rebuilt + coeffs[u] * RatFun.var(u)
        if rebuilt != f:
            raise VerifyError("condition is not linear in p2, p3, p4")
        if const.is_zero() and all(c.is_zero() for c in coeffs.values()):
            continue
        rows.append((dict(zero, **coeffs), const))
    return rows


def _solve_rows(rows):
    """Gauss-Jordan over the rational-function field; wants full rank."""
    work = [dict(c, _const=k) for c, k in rows]
    pivots = {}
    for u in _UNKNOWNS:
        row = next((r for r in work
                    if r not in pivots.values() and not r[u].is_zero()), None)
        if row is None:
            raise VerifyError(f"slide conditions leave {u} free")
        inv = 1 / row[u]
        for key in list(row):
            row[key] = row[key] * inv
        for other in work:
            if other is row or other[u].is_zero():
                continue
            f = other[u]
            for key in list(other):
                other[key] = other[key] - f * row[key]
        pivots[u] = row
    for r in work:
        if r in pivots.values():
            continue
        if not r["_const"].is_zero():
            raise VerifyError("slide conditions are inconsistent")
    return {u: -pivots[u]["_const"] for u in _UNKNOWNS}


@dataclass(frozen=True)
class NaiveExtensionReport:
    relations: dict
    free: tuple[str, ...]
    conditions: int
    matches_cited: bool
    sufficient: bool
    pinched_omega: str
    pinched_ok: bool
    sp_blind: bool

    @property
    def ok(self) -> bool:
        return (self.matches_cited and self.sufficient and self.pinched_ok
                and self.sp_blind)

    def to_dict(self) -> dict:
        return {"relations": dict(self.relations), "free": list(self.free),
                "conditions": self.conditions,
                "matches_cited": self.matches_cited,
                "sufficient": self.sufficient,
                "pinched_omega": self.pinched_omega,
                "pinched_ok": self.pinched_ok, "sp_blind": self.sp_blind,
                "ok": self.ok}


_PINCH = "H[9;1,2] // m[1,2>7]"
_TWO_CONTACT = "H[8;1,2] H[9;3,4] // m[{}>5]"


def _equation_pairs():
    # the two slide moves with the crossing pair on the contact's own legs
    return [_slide_pair(_R4_ATOMS["R4a"]), _slide_pair(_R4_ATOMS["R4b"])]


def naive_h_constraints() -> NaiveExtensionReport:
    """Derive the coefficient relations the slide moves force.

    Evaluates both sides of the two slide equations under the
    undetermined-coefficient contact rule, collects the vanishing
    conditions, and solves them: a full-rank linear system in p2, p3, p4
    over the rational functions in everything else, leaving p0 and p1
    free.  Then confirms the solution is sufficient, collapses a looped
    contact to the scalar p0*p1, and makes the two basic two-contact
    chains indistinguishable.
    """
    conditions = []
    for lhs, rhs in _equation_pairs():
        sl = eval_gamma(lhs, h_rule=naive_h_rule)
        sr = eval_gamma(rhs, h_rule=naive_h_rule)
        dw = sl.omega - sr.omega
        if not dw.is_zero():
            conditions.append(dw.num)
        for key in set(sl.matrix) | set(sr.matrix):
            d = sl.entry(*key) - sr.entry(*key)
            if not d.is_zero():
                conditions.append(d.num)

    solution = _solve_rows(_linear_rows(conditions))
    p1 = RatFun.var("p1")
    cited = {"p2": 1 - p1, "p3": 1 - p1, "p4": p1}
    matches = all(solution[u] == cited[u] for u in _UNKNOWNS)

    sufficient = all(
        eval_gamma(lhs, h_rule=constrained_naive_rule)
        == eval_gamma(rhs, h_rule=constrained_naive_rule)
        for lhs, rhs in _equation_pairs())

    pinched = eval_gamma(_PINCH, h_rule=constrained_naive_rule)
    scalar = RatFun.var("p0") * p1
    pinched_ok = (pinched.omega == scalar
                  and dict(pinched.matrix) == {(7, 7): RatFun.const(1)})

    series = eval_gamma(_TWO_CONTACT.format("1,3,4,2"),
                        h_rule=constrained_naive_rule)
    parallel = eval_gamma(_TWO_CONTACT.format("1,2,3,4"),
                          h_rule=constrained_naive_rule)

    return NaiveExtensionReport(
        relations={u: ratfun_text(solution[u]) for u in _UNKNOWNS},
        free=("p0", "p1"),
        conditions=len(conditions),
        matches_cited=matches,
        sufficient=sufficient,
        pinched_omega=ratfun_text(pinched.omega),
        pinched_ok=pinched_ok,
        sp_blind=series == parallel)
