"""Exact multivariate rational arithmetic for the invariant engines.

Values live in Q(t, h1, h2, ...): rational functions whose numerators may be
Laurent in t (negative powers of t are allowed) while every other symbol is
strictly polynomial.  Coefficients are exact rationals (machine ints when
integral, `fractions.Fraction` otherwise); nothing
here ever touches a float.

Symbol order is fixed globally: t first, then the remaining symbols by
(alphabetic stem, numeric suffix), so "h2" sorts before "h10".  Monomials are
compared lexicographically on their exponent vectors under that symbol order.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction


class SymcalcError(Exception):
    pass


class DivisionByZero(SymcalcError):
    """Division by a rational function that is identically zero."""


class NotLaurent(SymcalcError):
    """Raised when a value expected to be a Laurent polynomial has a
    nonconstant denominator after reduction."""


class ZeroValue(SymcalcError):
    """Raised when the zero value is passed where a unit normalization is
    required (zero has no leading unit)."""


_SYM_RE = re.compile(r"([A-Za-z_]+?)(\d*)\Z")


def _symbol_key(name: str):
    # t always sorts first; everything else by stem then numeric suffix.
    if name == "t":
        return (0, "", -1, name)
    m = _SYM_RE.match(name)
    if m is None:
        return (1, name, -1, name)
    stem, digits = m.group(1), m.group(2)
    return (1, stem, int(digits) if digits else -1, name)


def _sort_symbols(names) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=_symbol_key))


class MultiPoly:
    """Sparse multivariate polynomial, Laurent in t only.

    ``terms`` maps exponent tuples (aligned with ``symbols``) to nonzero
    exact rationals, plain ints when integral.  Instances are normalized on construction: zero coefficients
    are dropped and symbols that appear in no term are projected away, so
    structural equality coincides with mathematical equality.
    """

    __slots__ = ("symbols", "terms")

    def __init__(self, symbols: tuple[str, ...], terms: dict):
        clean = {}
        for exps, coeff in terms.items():
            # plain ints where possible: Fraction arithmetic costs an
            # order of magnitude more and nearly every value is integral
            if not isinstance(coeff, int):
                if not isinstance(coeff, Fraction):
                    coeff = Fraction(coeff)
                if coeff.denominator == 1:
                    coeff = coeff.numerator
            if coeff == 0:
                continue
            clean[tuple(exps)] = coeff
        symbols = tuple(symbols)
        for exps in clean:
            for name, e in zip(symbols, exps):
                if e < 0 and name != "t":
                    raise SymcalcError(f"negative exponent on {name!r}")
        used = [i for i, name in enumerate(symbols)
                if any(e[i] for e in clean)]
        if len(used) != len(symbols):
            symbols = tuple(symbols[i] for i in used)
            clean = {tuple(e[i] for i in used): c for e, c in clean.items()}
        self.symbols = symbols
        self.terms = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(value) -> "MultiPoly":
        return MultiPoly((), {(): value})

    @staticmethod
    def var(name: str, exp: int = 1, coeff=1) -> "MultiPoly":
        if exp == 0:
            return MultiPoly.const(coeff)
        return MultiPoly((name,), {(exp,): coeff})

    # -- basic structure ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.symbols

    def as_const(self):
        if not self.is_const():
            raise SymcalcError("not a constant polynomial")
        return self.terms.get((), 0)

    def is_one(self) -> bool:
        return self.is_const() and self.as_const() == 1

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction)):
                return self == MultiPoly.const(other)
            return NotImplemented
        return self.symbols == other.symbols and self.terms == other.terms

    def __hash__(self):
        return hash((self.symbols, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MultiPoly({poly_text(self)!r})"

    # -- alignment ----------------------------------------------------

    def _expand_to(self, symbols: tuple[str, ...]) -> dict:
        if symbols == self.symbols:
            return self.terms
        pos = {name: i for i, name in enumerate(symbols)}
        idx = [pos[name] for name in self.symbols]
        out = {}
        zero = (0,) * len(symbols)
        for exps, coeff in self.terms.items():
            e = list(zero)
            for i, v in zip(idx, exps):
                e[i] = v
            out[tuple(e)] = coeff
        return out

    @staticmethod
    def _aligned(a: "MultiPoly", b: "MultiPoly"):
        if a.symbols == b.symbols:
            return a.symbols, a.terms, b.terms
        symbols = _sort_symbols(a.symbols + b.symbols)
        return symbols, a._expand_to(symbols), b._expand_to(symbols)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        symbols, ta, tb = MultiPoly._aligned(self, other)
        out = dict(ta)
        for exps, coeff in tb.items():
            out[exps] = out.get(exps, 0) + coeff
        return MultiPoly(symbols, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.symbols, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "MultiPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return MultiPoly((), {})
        symbols, ta, tb = MultiPoly._aligned(self, other)
        out = {}
        get = out.get
        n = len(symbols)
        # unrolled exponent sums; the generic tuple-zip costs 3x as much
        # and one or two symbols cover nearly every product taken
        if n == 1:
            for (a0,), ca in ta.items():
                for (b0,), cb in tb.items():
                    key = (a0 + b0,)
                    acc = get(key)
                    out[key] = ca * cb if acc is None else acc + ca * cb
        elif n == 2:
            for (a0, a1), ca in ta.items():
                for (b0, b1), cb in tb.items():
                    key = (a0 + b0, a1 + b1)
                    acc = get(key)
                    out[key] = ca * cb if acc is None else acc + ca * cb
        elif n == 3:
            for (a0, a1, a2), ca in ta.items():
                for (b0, b1, b2), cb in tb.items():
                    key = (a0 + b0, a1 + b1, a2 + b2)
                    acc = get(key)
                    out[key] = ca * cb if acc is None else acc + ca * cb
        else:
            for ea, ca in ta.items():
                for eb, cb in tb.items():
                    key = tuple(x + y for x, y in zip(ea, eb))
                    acc = get(key)
                    out[key] = ca * cb if acc is None else acc + ca * cb
        return MultiPoly(symbols, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise SymcalcError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, q) -> "MultiPoly":
        if not isinstance(q, int):
            q = Fraction(q)
            if q.denominator == 1:
                q = q.numerator
        if q == 0:
            return MultiPoly((), {})
        return MultiPoly(self.symbols,
                         {e: c * q for e, c in self.terms.items()})

    # -- t-specific helpers -------------------------------------------

    def _t_index(self):
        return self.symbols.index("t") if "t" in self.symbols else None

    def t_min(self) -> int:
        ti = self._t_index()
        if ti is None or self.is_zero():
            return 0
        return min(e[ti] for e in self.terms)

    def t_max(self) -> int:
        ti = self._t_index()
        if ti is None or self.is_zero():
            return 0
        return max(e[ti] for e in self.terms)

    def shift_t(self, k: int) -> "MultiPoly":
        """Multiply by t**k (k may be negative)."""
        if k == 0 or self.is_zero():
            return self
        ti = self._t_index()
        if ti is None:
            symbols = _sort_symbols(self.symbols + ("t",))
            terms = self._expand_to(symbols)
            ti = symbols.index("t")
        else:
            symbols, terms = self.symbols, self.terms
        out = {}
        for exps, coeff in terms.items():
            e = list(exps)
            e[ti] += k
            out[tuple(e)] = coeff
        return MultiPoly(symbols, out)

    def total_degree(self) -> int:
        if self.is_zero():
            return 0
        return max(sum(e) for e in self.terms)

    def lead(self):
        """(exponents, coefficient) of the lexicographically largest term."""
        if self.is_zero():
            raise SymcalcError("zero polynomial has no leading term")
        key = max(self.terms)
        return key, self.terms[key]

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer
        coefficients."""
        if self.is_zero():
            return Fraction(1)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = _gcd_int(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // _gcd_int(den_lcm, c.denominator)
        return Fraction(num_gcd, den_lcm)

    def rename(self, mapping: dict) -> "MultiPoly":
        """Substitute symbol names (simultaneous; targets may overlap
        sources)."""
        if not mapping:
            return self
        new_names = [mapping.get(s, s) for s in self.symbols]
        if len(set(new_names)) != len(new_names):
            raise SymcalcError("symbol rename collides")
        symbols = _sort_symbols(new_names)
        pos = {name: i for i, name in enumerate(symbols)}
        idx = [pos[n] for n in new_names]
        out = {}
        for exps, coeff in self.terms.items():
            e = [0] * len(symbols)
            for i, v in zip(idx, exps):
                e[i] = v
            out[tuple(e)] = coeff
        for name in symbols:
            if name != "t":
                i = pos[name]
                if any(e[i] < 0 for e in out):
                    raise NotLaurent(
                        f"negative exponent on {name!r} after rename")
        return MultiPoly(symbols, out)


def _as_poly(x) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return MultiPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to MultiPoly")


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _coeff_div(a, b):
    """Exact coefficient quotient, staying in int whenever it can."""
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if not r:
            return q
    q = Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


# ---------------------------------------------------------------------------
# polynomial division and gcd


class Divider:
    """Exact division by one fixed divisor, reusable across dividends.

    Alignment of the divisor to each dividend's symbol tuple is cached, so
    dividing a whole batch of polynomials by the same denominator (the
    fraction-free elimination pattern) pays the setup once per shape.
    """

    __slots__ = ("den", "sb", "_shapes")

    def __init__(self, den: MultiPoly):
        if den.is_zero():
            raise DivisionByZero("polynomial division by zero")
        self.sb = den.t_min()
        self.den = den.shift_t(-self.sb)
        self._shapes = {}

    def _shape(self, symbols):
        got = self._shapes.get(symbols)
        if got is None:
            tb = self.den._expand_to(symbols)
            lead_b = max(tb)
            got = (lead_b, tb[lead_b],
                   [(e, c) for e, c in tb.items() if e != lead_b])
            self._shapes[symbols] = got
        return got

    def divide(self, a: MultiPoly):
        """a / den when exact, else None; t-units move into the quotient."""
        if a.is_zero():
            return MultiPoly((), {})
        sa = a.t_min()
        a = a.shift_t(-sa)
        if a.symbols == self.den.symbols:
            symbols, ta = a.symbols, a.terms
        else:
            symbols = _sort_symbols(a.symbols + self.den.symbols)
            ta = a._expand_to(symbols)
        lead_b, cb, tb_rest = self._shape(symbols)
        rem = dict(ta)
        quo = {}
        # heap of candidate leading exponents, negated for max-order, with
        # dead entries dropped lazily
        heap = [tuple(-x for x in e) for e in rem]
        heapq.heapify(heap)
        n = len(symbols)
        while rem:
            while True:
                lead_r = tuple(-x for x in heap[0])
                if lead_r in rem:
                    break
                heapq.heappop(heap)
            heapq.heappop(heap)
            qe = tuple(x - y for x, y in zip(lead_r, lead_b))
            if any(e < 0 for e in qe):
                return None
            qc = _coeff_div(rem.pop(lead_r), cb)
            quo[qe] = qc
            if n == 2:
                q0, q1 = qe
                for (b0, b1), c in tb_rest:
                    key = (q0 + b0, q1 + b1)
                    old = rem.get(key)
                    v = -qc * c if old is None else old - qc * c
                    if v == 0:
                        del rem[key]
                    else:
                        rem[key] = v
                        if old is None:
                            heapq.heappush(heap, (-key[0], -key[1]))
            elif n == 3:
                q0, q1, q2 = qe
                for (b0, b1, b2), c in tb_rest:
                    key = (q0 + b0, q1 + b1, q2 + b2)
                    old = rem.get(key)
                    v = -qc * c if old is None else old - qc * c
                    if v == 0:
                        del rem[key]
                    else:
                        rem[key] = v
                        if old is None:
                            heapq.heappush(
                                heap, (-key[0], -key[1], -key[2]))
            else:
                for eb, c in tb_rest:
                    key = tuple(x + y for x, y in zip(qe, eb))
                    old = rem.get(key)
                    v = -qc * c if old is None else old - qc * c
                    if v == 0:
                        del rem[key]
                    else:
                        rem[key] = v
                        if old is None:
                            heapq.heappush(heap,
                                           tuple(-x for x in key))
        return MultiPoly(symbols, quo).shift_t(sa - self.sb)


def div_exact(a: MultiPoly, b: MultiPoly):
    """Return a/b if b divides a exactly, else None.  Laurent shifts in t are
    absorbed into the quotient."""
    return Divider(b).divide(a)


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Primitive gcd over Q, content-free, positive leading coefficient.
    Powers of t are units of the Laurent ring: inputs are shifted to t-min 0,
    so the result never carries a bare power of t."""
    if a.is_zero():
        return _positive_primitive(b.shift_t(-b.t_min()))
    if b.is_zero():
        return _positive_primitive(a.shift_t(-a.t_min()))
    a = a.shift_t(-a.t_min())
    b = b.shift_t(-b.t_min())
    if a.is_const() or b.is_const():
        return MultiPoly.const(1)
    symbols = _sort_symbols(a.symbols + b.symbols)
    ta = _int_terms(a._expand_to(symbols))
    tb = _int_terms(b._expand_to(symbols))
    g = _gcd_core(len(symbols), ta, tb)
    return _positive_primitive(MultiPoly(symbols, g))


def _int_terms(terms):
    """Fraction coefficient dict -> coprime integer coefficient dict."""
    den_lcm = 1
    for c in terms.values():
        den_lcm = den_lcm * c.denominator // _gcd_int(den_lcm, c.denominator)
    out = {}
    common = 0
    for exps, c in terms.items():
        v = c.numerator * (den_lcm // c.denominator)
        out[exps] = v
        common = _gcd_int(common, v)
    if common > 1:
        out = {e: v // common for e, v in out.items()}
    return out


# gcd of integer term dicts, correct up to sign.  Each level strips monomial
# parts, splits off the content with respect to the last symbol, and hands
# the primitive core to the heuristic, falling back to a primitive
# pseudo-remainder sequence when the heuristic gives up.

def _gcd_core(nvars: int, ta, tb):
    if nvars == 0:
        g = _gcd_int(ta.get((), 0), tb.get((), 0))
        return {(): g} if g else {}
    if ta == tb:
        return dict(ta)
    mina = tuple(map(min, zip(*ta)))
    minb = tuple(map(min, zip(*tb)))
    common = tuple(min(x, y) for x, y in zip(mina, minb))
    if any(mina):
        ta = {tuple(e - m for e, m in zip(k, mina)): v for k, v in ta.items()}
    if any(minb):
        tb = {tuple(e - m for e, m in zip(k, minb)): v for k, v in tb.items()}
    if len(ta) == 1 or len(tb) == 1:
        # one side reduced to an integer constant
        g = _gcd_int(_it_content(ta), _it_content(tb))
        return {common: g}
    da = _split_last(ta)
    db = _split_last(tb)
    ca = _content_fold(nvars - 1, da.values())
    cb = _content_fold(nvars - 1, db.values())
    gcont = _gcd_core(nvars - 1, ca, cb)
    if not _it_is_unit(ca):
        da = {d: _it_div(c, ca) for d, c in da.items()}
    if not _it_is_unit(cb):
        db = {d: _it_div(c, cb) for d, c in db.items()}
    ppa = _join_last(da)
    ppb = _join_last(db)
    core = _heu_loop(nvars, ppa, ppb)
    if core is None:
        core = _prs_loop(nvars, ppa, ppb)
    g = _it_mul(core, {e + (0,): v for e, v in gcont.items()})
    if any(common):
        g = {tuple(e + m for e, m in zip(k, common)): v for k, v in g.items()}
    return g


def _heu_loop(nvars: int, ppa, ppb):
    """Evaluate the last symbol at a large integer, take the gcd a level
    down, then read the symbol's powers back off as balanced base-xi digits.
    A candidate counts only after exact trial division of both inputs."""
    maxc = max(max(abs(v) for v in ppa.values()),
               max(abs(v) for v in ppb.values()))
    xi = 2 * maxc + 29
    for _ in range(6):
        ea = _it_eval_last(ppa, xi)
        eb = _it_eval_last(ppb, xi)
        if ea and eb:
            sub = _gcd_core(nvars - 1, ea, eb)
            cand = _it_primitive(_it_lift(sub, xi))
            if _it_div(ppa, cand) is not None and \
                    _it_div(ppb, cand) is not None:
                return cand
        xi = xi * 73 // 8 + 37
    return None


def _prs_loop(nvars: int, ppa, ppb):
    """Primitive pseudo-remainder sequence in the last symbol; the slow
    but sure road.  Inputs are primitive in that symbol."""
    ua = _split_last(ppa)
    ub = _split_last(ppb)
    if max(ua) < max(ub):
        ua, ub = ub, ua
    while ub:
        r = _pseudo_rem_it(ua, ub)
        if r:
            rc = _content_fold(nvars - 1, r.values())
            if not _it_is_unit(rc):
                r = {d: _it_div(c, rc) for d, c in r.items()}
        ua, ub = ub, r
    return _it_primitive(_join_last(ua))


def _pseudo_rem_it(ua, ub):
    db = max(ub)
    lb = ub[db]
    r = ua
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        new = {}
        for d, c in r.items():
            if d != dr:
                new[d] = _it_mul(c, lb)
        for d, c in ub.items():
            if d != db:
                k = dr - db + d
                v = _it_sub(new.get(k, {}), _it_mul(c, lr))
                if v:
                    new[k] = v
                else:
                    new.pop(k, None)
        r = new
    return r


def _split_last(terms):
    """Term dict -> {degree in last symbol: coefficient term dict}."""
    out = {}
    for exps, v in terms.items():
        out.setdefault(exps[-1], {})[exps[:-1]] = v
    return out


def _join_last(split):
    out = {}
    for d, c in split.items():
        for exps, v in c.items():
            out[exps + (d,)] = v
    return out


def _content_fold(nvars: int, coeffs):
    g = None
    for c in coeffs:
        g = dict(c) if g is None else _gcd_core(nvars, g, c)
        if _it_is_unit(g):
            break
    return g


def _it_is_unit(terms) -> bool:
    if len(terms) != 1:
        return False
    (exps, v), = terms.items()
    return v in (1, -1) and not any(exps)


def _it_content(terms) -> int:
    g = 0
    for v in terms.values():
        g = _gcd_int(g, v)
        if g == 1:
            break
    return g


def _it_mul(a, b):
    out = {}
    for ea, va in a.items():
        for eb, vb in b.items():
            k = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(k, 0) + va * vb
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _it_sub(a, b):
    out = dict(a)
    for e, v in b.items():
        w = out.get(e, 0) - v
        if w:
            out[e] = w
        else:
            out.pop(e, None)
    return out


def _it_eval_last(terms, xi: int):
    out = {}
    for exps, c in terms.items():
        key = exps[:-1]
        out[key] = out.get(key, 0) + c * xi ** exps[-1]
    return {e: v for e, v in out.items() if v}


def _it_primitive(terms):
    g = 0
    for v in terms.values():
        g = _gcd_int(g, v)
        if g == 1:
            return terms
    if g in (0, 1):
        return terms
    return {e: v // g for e, v in terms.items()}


def _it_lift(sub, xi: int):
    """Rebuild the evaluated symbol's powers from balanced base-xi digits."""
    terms = dict(sub)
    out = {}
    power = 0
    half = xi // 2
    while terms:
        nxt = {}
        for exps, v in terms.items():
            d = v % xi
            if d > half:
                d -= xi
            if d:
                out[exps + (power,)] = d
            rest = (v - d) // xi
            if rest:
                nxt[exps] = rest
        terms = nxt
        power += 1
    return out


def _it_div(num, den):
    """Exact division of integer term dicts under lex order, else None."""
    if not den:
        return None
    lead = max(den)
    dc = den[lead]
    r = dict(num)
    q = {}
    while r:
        lr = max(r)
        diff = tuple(x - y for x, y in zip(lr, lead))
        if any(d < 0 for d in diff):
            return None
        c, rem = divmod(r[lr], dc)
        if rem:
            return None
        q[diff] = c
        for e, v in den.items():
            k = tuple(x + y for x, y in zip(diff, e))
            nv = r.get(k, 0) - c * v
            if nv:
                r[k] = nv
            elif k in r:
                del r[k]
    return q

def _positive_primitive(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    c = p.content()
    _, lead = p.lead()
    if lead < 0:
        c = -c
    return p.scale(1 / c)


# ---------------------------------------------------------------------------
# rational functions


class RatFun:
    """Reduced fraction of MultiPolys.

    Normal form: gcd(num, den) = 1; den is t-polynomial with min t-exponent 0,
    coprime integer coefficients, and positive leading coefficient; any
    Laurent unit and rational content live in the numerator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, _reduced=False):
        if den is None:
            den = MultiPoly.const(1)
        if _reduced:
            self.num = num
            self.den = den
            return
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = MultiPoly.const(1)
            return
        shift = den.t_min()
        if shift:
            num = num.shift_t(-shift)
            den = den.shift_t(-shift)
        if not den.is_const():
            g = poly_gcd(num, den)
            if not g.is_one():
                num = div_exact(num, g)
                den = div_exact(den, g)
                s = den.t_min()
                if s:
                    num = num.shift_t(-s)
                    den = den.shift_t(-s)
        c = den.content()
        _, lead = den.lead()
        if lead < 0:
            c = -c
        if c != 1:
            den = den.scale(1 / c)
            num = num.scale(1 / c)
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(value) -> "RatFun":
        return RatFun(MultiPoly.const(value))

    @staticmethod
    def var(name: str, exp: int = 1) -> "RatFun":
        if exp < 0 and name != "t":
            return RatFun(MultiPoly.const(1), MultiPoly.var(name, -exp))
        return RatFun(MultiPoly.var(name, exp))

    @staticmethod
    def of(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, MultiPoly):
            return RatFun(x)
        if isinstance(x, (int, Fraction)):
            return RatFun.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFun")

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def den_is_one(self) -> bool:
        return self.den.is_one()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = RatFun.of(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        # Cross multiplication; the normal form would permit structural
        # comparison but this stays correct even for unreduced values.
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFun({ratfun_text(self)!r})"

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "RatFun":
        other = RatFun.of(other)
        if self.den_is_one() and other.den_is_one():
            return RatFun(self.num + other.num, None, _reduced=True)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den,
                      self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den, _reduced=True)

    def __sub__(self, other) -> "RatFun":
        return self + (-RatFun.of(other))

    def __rsub__(self, other) -> "RatFun":
        return RatFun.of(other) + (-self)

    def __mul__(self, other) -> "RatFun":
        other = RatFun.of(other)
        if self.is_zero() or other.is_zero():
            return RatFun.const(0)
        if self.den_is_one() and other.den_is_one():
            return RatFun(self.num * other.num, None, _reduced=True)
        # cross-cancel first; the factors that remain are pairwise coprime
        n1, d1 = _cancel(self.num, other.den)
        n2, d2 = _cancel(other.num, self.den)
        return _from_coprime(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        other = RatFun.of(other)
        if other.is_zero():
            raise DivisionByZero("division by zero rational function")
        n1, n2 = _cancel(self.num, other.num)
        d1, d2 = _cancel(self.den, other.den)
        return _from_coprime(n1 * d2, d1 * n2)

    def __rtruediv__(self, other) -> "RatFun":
        return RatFun.of(other) / self

    def __pow__(self, n: int) -> "RatFun":
        if n == 0:
            return RatFun.const(1)
        if n < 0:
            if self.is_zero():
                raise DivisionByZero("negative power of zero")
            return RatFun(self.den, self.num) ** (-n)
        return RatFun(self.num ** n, self.den ** n)

    def substitute(self, bindings: dict) -> "RatFun":
        """Evaluate with some symbols bound to RatFun values."""
        bound = {k: RatFun.of(v) for k, v in bindings.items()}
        num = _poly_substitute(self.num, bound)
        den = _poly_substitute(self.den, bound)
        if den.is_zero():
            raise DivisionByZero("substitution sends denominator to zero")
        return num / den


def _cancel(a: MultiPoly, b: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Divide out gcd(a, b)."""
    if a.is_const() or b.is_const():
        return a, b
    g = poly_gcd(a, b)
    if g.is_one():
        return a, b
    return div_exact(a, g), div_exact(b, g)


def _from_coprime(num: MultiPoly, den: MultiPoly) -> RatFun:
    """Build a RatFun from a numerator and denominator already known to
    share no polynomial factor; only unit normalization remains."""
    if num.is_zero():
        return RatFun.const(0)
    shift = den.t_min()
    if shift:
        num = num.shift_t(-shift)
        den = den.shift_t(-shift)
    c = den.content()
    _, lead = den.lead()
    if lead < 0:
        c = -c
    if c != 1:
        den = den.scale(1 / c)
        num = num.scale(1 / c)
    return RatFun(num, den, _reduced=True)


def _poly_substitute(p: MultiPoly, bound: dict) -> RatFun:
    if not any(s in bound for s in p.symbols):
        return RatFun(p)
    cache: dict[tuple[str, int], RatFun] = {}

    def power(name: str, e: int) -> RatFun:
        key = (name, e)
        if key not in cache:
            base = bound.get(name)
            if base is None:
                cache[key] = RatFun.var(name, e)
            else:
                cache[key] = base ** e
        return cache[key]

    total = RatFun.const(0)
    for exps, coeff in p.terms.items():
        term = RatFun.const(coeff)
        for name, e in zip(p.symbols, exps):
            if e:
                term = term * power(name, e)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Laurent unit normalization


@dataclass(frozen=True)
class LaurentNormal:
    """A Laurent polynomial split as sign * t**unit_exponent * poly, where
    poly has min t-exponent 0 and its t-degree-0 part has a positive leading
    coefficient."""

    poly: MultiPoly
    unit_exponent: int
    unit_sign: int

    def text(self) -> str:
        return poly_text(self.poly)


def unit_normalize(value) -> LaurentNormal:
    f = RatFun.of(value)
    if f.is_zero():
        raise ZeroValue("zero has no unit normalization")
    if not f.den_is_one():
        raise NotLaurent(f"not Laurent: denominator {poly_text(f.den)}")
    p = f.num
    k = p.t_min()
    p = p.shift_t(-k)
    ti = p._t_index()
    if ti is None:
        floor_terms = p.terms
        key = max(floor_terms)
        lead = floor_terms[key]
    else:
        floor_terms = {e: c for e, c in p.terms.items() if e[ti] == 0}
        key = max(floor_terms)
        lead = floor_terms[key]
    sign = 1
    if lead < 0:
        sign = -1
        p = -p
    return LaurentNormal(p, k, sign)


def equal_up_to_unit(a, b) -> bool:
    """True when a = (+/-) t**k * b for some integer k."""
    fa, fb = RatFun.of(a), RatFun.of(b)
    if fa.is_zero() or fb.is_zero():
        return fa.is_zero() and fb.is_zero()
    return unit_normalize(fa).poly == unit_normalize(fb).poly


# ---------------------------------------------------------------------------
# text form

# Canonical polynomial text: terms sorted by descending t-power, ties by
# ascending exponent vector of the remaining symbols; each term prints its
# coefficient first, then non-t factors in symbol order, then the t factor.


def _term_sort_key(symbols):
    ti = symbols.index("t") if "t" in symbols else None

    def key(exps):
        t_exp = exps[ti] if ti is not None else 0
        rest = tuple(e for i, e in enumerate(exps) if i != ti)
        return (-t_exp, rest)

    return key


def poly_text(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    symbols = p.symbols
    ti = symbols.index("t") if "t" in symbols else None
    ordered = sorted(p.terms, key=_term_sort_key(symbols))
    out = []
    for i, exps in enumerate(ordered):
        coeff = p.terms[exps]
        # non-t factors first, then the t factor
        body = []
        for j, name in enumerate(symbols):
            if j != ti and exps[j]:
                body.append(name if exps[j] == 1 else f"{name}^{exps[j]}")
        if ti is not None and exps[ti]:
            e = exps[ti]
            body.append("t" if e == 1 else f"t^{e}")
        mag = abs(coeff)
        if not body:
            text = str(mag)
        else:
            if mag != 1:
                body.insert(0, str(mag))
            text = "*".join(body)
        if i == 0:
            out.append(text if coeff > 0 else "-" + text)
        else:
            out.append(("+ " if coeff > 0 else "- ") + text)
    return " ".join(out)


def ratfun_text(f: RatFun) -> str:
    if f.den_is_one():
        return poly_text(f.num)
    return f"({poly_text(f.num)}) / ({poly_text(f.den)})"


def poly_latex(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    symbols = p.symbols
    ti = symbols.index("t") if "t" in symbols else None
    ordered = sorted(p.terms, key=_term_sort_key(symbols))
    out = []
    for i, exps in enumerate(ordered):
        coeff = p.terms[exps]
        body = []
        for name in [s for s in symbols if s != "t"]:
            e = exps[symbols.index(name)]
            if e:
                m = _SYM_RE.match(name)
                base = name
                if m and m.group(2):
                    base = f"{m.group(1)}_{{{m.group(2)}}}"
                body.append(base if e == 1 else f"{base}^{{{e}}}")
        if ti is not None and exps[ti]:
            e = exps[ti]
            body.append("t" if e == 1 else f"t^{{{e}}}")
        mag = abs(coeff)
        if not body:
            text = str(mag) if mag.denominator == 1 else \
                f"\\tfrac{{{mag.numerator}}}{{{mag.denominator}}}"
        else:
            text = " ".join(body)
            if mag != 1:
                pre = str(mag) if mag.denominator == 1 else \
                    f"\\tfrac{{{mag.numerator}}}{{{mag.denominator}}}"
                text = pre + " " + text
        if i == 0:
            out.append(text if coeff > 0 else "-" + text)
        else:
            out.append(("+ " if coeff > 0 else "- ") + text)
    return " ".join(out)


def ratfun_latex(f: RatFun) -> str:
    if f.den_is_one():
        return poly_latex(f.num)
    return f"\\frac{{{poly_latex(f.num)}}}{{{poly_latex(f.den)}}}"


def ratfun_to_dict(f: RatFun) -> dict:
    return {"num": poly_text(f.num), "den": poly_text(f.den)}


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<sym>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip():
                    raise SymcalcError(
                        f"bad character {text[pos:].strip()[0]!r} at {pos}")
                break
            self.tokens.append((m.lastgroup, m.group(m.lastgroup), m.start()))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, at = self.take()
        if kind != "op" or val != op:
            raise SymcalcError(f"expected {op!r} at {at}")

    def parse(self) -> RatFun:
        value = self.expr()
        kind, val, at = self.peek()
        if kind is not None:
            raise SymcalcError(f"unexpected {val!r} at {at}")
        return value

    def expr(self) -> RatFun:
        value = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self) -> RatFun:
        value = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.factor()
                value = value * rhs if val == "*" else value / rhs
            else:
                return value

    def factor(self) -> RatFun:
        kind, val, at = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.factor()
            return inner if val == "+" else -inner
        return self.power()

    def power(self) -> RatFun:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, at = self.take()
            if kind == "op" and val in "+-":
                sign = -1 if val == "-" else 1
                kind, val, at = self.take()
            if kind != "int":
                raise SymcalcError(f"expected integer exponent at {at}")
            return base ** (sign * int(val))
        return base

    def atom(self) -> RatFun:
        kind, val, at = self.take()
        if kind == "int":
            return RatFun.const(int(val))
        if kind == "sym":
            return RatFun.var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise SymcalcError(f"expected value at {at}")


def parse_ratfun(text: str) -> RatFun:
    return _ExprParser(text).parse()


def parse_poly(text: str) -> MultiPoly:
    f = parse_ratfun(text)
    if not f.den_is_one():
        raise NotLaurent(f"denominator survives in {text!r}")
    return f.num
