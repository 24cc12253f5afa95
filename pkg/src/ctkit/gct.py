"""Contact diagrams of a folded chain and their strand realizations.

A diagram is a perfect matching of the sites 1..2n along a horizontal
backbone, each matched pair carrying a sign: 0 for a bonded (hard)
contact, +1 or -1 for a clasped (soft) one.  Text form::

    {1,4}+ {2,7}- {3,5}0 {6,9}0 {8,10}-

``compile_diagram`` lays the diagram out as a single open strand.  The
chain walks the backbone left to right; at every site it descends in a
narrow two-lane corridor to its contact, placed below the axis, and
climbs back.  Hard contacts become one contact vertex entered once per
endpoint; soft ones become a pair of equal-sign crossings hooking the
two corridors together.  Corridors of interleaved contacts must cross,
and each such meeting of two corridors contributes four crossings whose
signs cancel in pairs.  The earlier contact (smaller first endpoint)
stays in front throughout.  All layout arithmetic is exact, so the
emitted expression is reproducible to the byte.
"""

from __future__ import annotations

import itertools
import json
import multiprocessing
import os
import random
import re
from dataclasses import dataclass
from fractions import Fraction

from . import tangle as tg
from .dgamma import dgamma1
from .symcalc import poly_latex


class GctError(Exception):
    pass


class GctSyntaxError(GctError):
    pass


class InvalidPair(GctError):
    """Pairwise relation asked for two contacts sharing an endpoint."""


class NotSeries(GctError):
    """Clasp insertion needs the two linked contacts to be in series."""


SIGN_CHAR = {1: "+", -1: "-", 0: "0"}
CHAR_SIGN = {"+": 1, "-": -1, "0": 0}


@dataclass(frozen=True, order=True)
class Contact:
    """One matched pair of backbone sites; sign 0 bonds, +/-1 clasps."""

    a: int
    b: int
    sign: int

    def span(self) -> tuple[int, int]:
        return (self.a, self.b)

    def text(self) -> str:
        return f"{{{self.a},{self.b}}}{SIGN_CHAR[self.sign]}"


@dataclass(frozen=True)
class GctDiagram:
    contacts: tuple[Contact, ...]

    @property
    def n(self) -> int:
        return len(self.contacts)

    def text(self) -> str:
        return " ".join(c.text() for c in self.contacts)

    def __str__(self) -> str:
        return self.text()


def make_diagram(pairs) -> GctDiagram:
    """Validate and sort raw (a, b, sign) triples into a diagram."""
    contacts = []
    for a, b, sign in pairs:
        if not (isinstance(a, int) and isinstance(b, int)):
            raise GctError(f"sites must be integers, got {a!r}, {b!r}")
        if a >= b:
            raise GctError(f"contact {{{a},{b}}} needs a < b")
        if sign not in (-1, 0, 1):
            raise GctError(f"bad contact sign {sign!r}")
        contacts.append(Contact(a, b, sign))
    contacts.sort(key=lambda c: (c.a, c.b))
    seen = sorted(s for c in contacts for s in c.span())
    if seen != list(range(1, 2 * len(contacts) + 1)):
        raise GctError(
            f"endpoints {seen} do not fill 1..{2 * len(contacts)} exactly")
    return GctDiagram(tuple(contacts))


_PAIR = re.compile(r"\{(\d+),(\d+)\}([+\-0])\Z")


def parse_gct(text: str) -> GctDiagram:
    # the braces delimit contacts, so whitespace between them is optional
    tokens = re.findall(r"\{[^{}]*\}[^\s{]*", text)
    if not tokens or "".join(tokens) != "".join(text.split()):
        raise GctSyntaxError(f"bad diagram text {text.strip()!r}")
    pairs = []
    for tok in tokens:
        m = _PAIR.match(tok)
        if m is None:
            raise GctSyntaxError(f"bad contact token {tok!r}")
        pairs.append((int(m.group(1)), int(m.group(2)),
                      CHAR_SIGN[m.group(3)]))
    return make_diagram(pairs)


def format_gct(d: GctDiagram) -> str:
    return d.text()


def diagram_to_json(d: GctDiagram) -> str:
    return json.dumps([{"a": c.a, "b": c.b, "s": c.sign}
                       for c in d.contacts])


def diagram_from_json(text: str) -> GctDiagram:
    try:
        raw = json.loads(text)
        pairs = [(entry["a"], entry["b"], entry["s"]) for entry in raw]
    except (ValueError, TypeError, KeyError) as exc:
        raise GctSyntaxError(f"bad diagram json: {exc}") from exc
    return make_diagram(pairs)


def relation(p, q) -> str:
    """Interval relation of two contacts: S disjoint, P nested, X crossed."""
    pa, pb = p.span() if isinstance(p, Contact) else tuple(p)
    qa, qb = q.span() if isinstance(q, Contact) else tuple(q)
    if len({pa, pb, qa, qb}) != 4:
        raise InvalidPair(f"contacts {(pa, pb)} and {(qa, qb)} share a site")
    if qa < pa:
        (pa, pb), (qa, qb) = (qa, qb), (pa, pb)
    if pb < qa:
        return "S"
    if qb < pb:
        return "P"
    return "X"


def relation_matrix(d: GctDiagram) -> list[list[str]]:
    n = d.n
    mat = [["0"] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            r = relation(d.contacts[i], d.contacts[j])
            mat[i][j] = mat[j][i] = r
    return mat


def _matchings(sites: list[int]):
    if not sites:
        yield ()
        return
    first, rest = sites[0], sites[1:]
    for k, partner in enumerate(rest):
        for tail in _matchings(rest[:k] + rest[k + 1:]):
            yield ((first, partner),) + tail


def has_loose_clasp(d: GctDiagram) -> bool:
    return any(c.b == c.a + 1 and c.sign != 0 for c in d.contacts)


def enumerate_diagrams(n: int, drop_loose_clasps: bool = False):
    """All diagrams on n contacts: (2n-1)!! matchings times 3^n signs.

    Ordering is fixed: matchings come lexicographically (smallest free
    site paired with each larger partner in turn), signs run through
    (-1, 0, +1)^n in lexicographic order within each matching.
    """
    if n < 1:
        raise GctError("need at least one contact")
    out = []
    for pairing in _matchings(list(range(1, 2 * n + 1))):
        for signs in itertools.product((-1, 0, 1), repeat=n):
            d = make_diagram((a, b, s)
                             for (a, b), s in zip(pairing, signs))
            if drop_loose_clasps and has_loose_clasp(d):
                continue
            out.append(d)
    return out


def random_diagram(n: int, seed) -> GctDiagram:
    """Uniform diagram on n contacts, reproducible for a fixed seed."""
    if n < 1:
        raise GctError("need at least one contact")
    rng = random.Random(seed)
    free = list(range(1, 2 * n + 1))
    pairs = []
    while free:
        a = free.pop(0)
        b = free.pop(rng.randrange(len(free)))
        pairs.append((a, b, rng.choice((-1, 0, 1))))
    return make_diagram(pairs)


def insert_clasp(d: GctDiagram, i: int, j: int, sign: int) -> GctDiagram:
    """Hook contacts i and j (0-based, in series) with a fresh clasp.

    One clasp foot lands right after the earlier contact, the other
    right after the later one, so the new contact nests the later one;
    every following site shifts up to keep the range 1..2n contiguous.
    """
    if sign not in (-1, 1):
        raise GctError("clasp sign must be +1 or -1")
    try:
        ci, cj = d.contacts[i], d.contacts[j]
    except IndexError as exc:
        raise GctError(f"no such contact index in {d.text()}") from exc
    if relation(ci, cj) != "S":
        raise NotSeries(
            f"contacts {ci.text()} and {cj.text()} are not in series")
    if cj.b < ci.a:
        ci, cj = cj, ci
    # Rebuild the site line with two fresh feet spliced in.
    line: list = []
    for s in range(1, 2 * d.n + 1):
        line.append(s)
        if s == ci.b:
            line.append("u")
        if s == cj.b:
            line.append("w")
    renum = {tag: pos for pos, tag in enumerate(line, start=1)}
    pairs = [(renum[c.a], renum[c.b], c.sign) for c in d.contacts]
    pairs.append((renum["u"], renum["w"], sign))
    return make_diagram(pairs)


# ---------------------------------------------------------------------------
# Layout and strand emission

# Exact layout constants.  Contact shelves within one depth level are
# separated by _DELTA, contact anchors dodge the site grid by multiples
# of _DX, and the two lanes of a corridor sit _W apart horizontally and
# _V vertically.  Anything below roughly 1/(2n) keeps features apart for
# every practical diagram size.
_DELTA = Fraction(1, 1 << 10)
_DX = Fraction(1, 1 << 12)
_W = Fraction(1, 1 << 14)
_V = Fraction(1, 1 << 16)


@dataclass(frozen=True)
class DiagramGeometry:
    """Walk-order record of one compiled strand.

    passages lists, in chain order, ("h", vertex_name) for contact
    passages and ("x", sign, is_self) for crossings, is_self marking a
    crossing whose both arcs lie on the same inter-vertex piece.
    piece_writhes gives the signed self-crossing total of each piece.
    """

    passages: tuple
    piece_writhes: tuple
    crossing_count: int

    def nonzero_writhes(self):
        return [(i, w) for i, w in self.piece_writhes if w != 0]


@dataclass(frozen=True)
class CompiledDiagram:
    diagram: GctDiagram
    dsl: str
    geometry: DiagramGeometry
    frame_corrected: bool

    @property
    def expr(self):
        return tg.parse_expr(self.dsl)


class _Xrec:
    """One crossing being assembled: two chain slots plus a sign."""

    __slots__ = ("sign", "over_role", "pos", "arcs")

    def __init__(self, sign, over_role, pos):
        self.sign = sign
        self.over_role = over_role
        self.pos = pos
        self.arcs = {}


def _depths(contacts) -> list[int]:
    # Height of each contact in the nesting forest: a contact sits one
    # level below the deepest contact strictly inside its span.
    n = len(contacts)
    depth = [0] * n
    order = sorted(range(n), key=lambda i: contacts[i].b - contacts[i].a)
    for i in order:
        inner = [depth[j] for j in range(n) if j != i
                 and contacts[i].a < contacts[j].a
                 and contacts[j].b < contacts[i].b]
        depth[i] = 1 + max(inner, default=0)
    return depth


def _cross_sign(d_over, d_under) -> int:
    z = d_over[0] * d_under[1] - d_over[1] * d_under[0]
    if z == 0:
        raise GctError("degenerate crossing direction")
    return 1 if z > 0 else -1


def _corridor_blocks(d: GctDiagram):
    """Crossing records and per-copy traversal events of the layout."""
    contacts = d.contacts
    depth = _depths(contacts)
    ys = {i: -depth[i] + i * _DELTA for i in range(d.n)}
    xs = {i: Fraction(contacts[i].a + contacts[i].b, 2) + (i + 1) * _DX
          for i in range(d.n)}
    owner = {}
    for i, c in enumerate(contacts):
        owner[c.a] = i
        owner[c.b] = i

    hits = {}
    for vs in range(1, 2 * d.n + 1):
        vc = owner[vs]
        for hs in range(1, 2 * d.n + 1):
            hc = owner[hs]
            if hc == vc:
                continue
            lo, hi = sorted((Fraction(hs), xs[hc]))
            if lo < vs < hi and ys[vc] < ys[hc]:
                key = tuple(sorted((vc, hc)))
                hits.setdefault(key, []).append((vs, vc, hs, hc))
    for i in range(d.n):
        for j in range(i + 1, d.n):
            want = 1 if relation(contacts[i], contacts[j]) == "X" else 0
            got = len(hits.get((i, j), ()))
            if got != want:
                raise GctError(
                    f"layout fault: contacts {i},{j} meet {got} times,"
                    f" expected {want}")

    crossings: list[_Xrec] = []
    events = {}
    for block in itertools.chain.from_iterable(hits.values()):
        vs, vc, hs, hc = block
        toward_right = xs[hc] > hs
        vert_over = contacts[vc].a < contacts[hc].a
        for vphase in ("down", "up"):
            xv = vs - _W if vphase == "down" else vs + _W
            dv = (0, -1) if vphase == "down" else (0, 1)
            for hphase in ("down", "up"):
                # Corner rule: the descending copy takes the lane away
                # from the backbone when its contact lies to the right,
                # so the two copies of one corridor never touch.
                if toward_right:
                    lane = -_V if hphase == "down" else _V
                    dh = (1, 0) if hphase == "down" else (-1, 0)
                else:
                    lane = _V if hphase == "down" else -_V
                    dh = (-1, 0) if hphase == "down" else (1, 0)
                yh = ys[hc] + lane
                d_over, d_under = (dv, dh) if vert_over else (dh, dv)
                rec = _Xrec(_cross_sign(d_over, d_under),
                            "v" if vert_over else "h", (xv, yh))
                cid = len(crossings)
                crossings.append(rec)
                if vphase == "down":
                    vkey = (0, -yh)
                else:
                    vkey = (1, yh)
                events.setdefault((vs, vphase), []).append((vkey, cid, "v"))
                if hphase == "down":
                    hkey = (1, abs(xv - hs))
                else:
                    hkey = (0, abs(xv - xs[hc]))
                events.setdefault((hs, hphase), []).append((hkey, cid, "h"))
    return crossings, events, owner, xs, ys


def _clasp_records(sign, pos):
    # Two equal-sign crossings hooking the corridor tips together; the
    # first endpoint's strand runs through them bottom-up, the second's
    # top-down, and the front strand alternates between the two hooks.
    top = _Xrec(sign, "a" if sign > 0 else "b", (pos[0], pos[1] + _V))
    bottom = _Xrec(sign, "b" if sign > 0 else "a", (pos[0], pos[1] - _V))
    return top, bottom


def _assemble(d: GctDiagram, chain, crossings, hslots, corrected):
    """Number the chain, emit DSL text, and take the writhe census."""
    arcs_at = {}
    for pos, entry in enumerate(chain, start=1):
        kind, ref, role = entry
        if kind == "x":
            crossings[ref].arcs[role] = pos
        else:
            hslots[ref][role] = pos
        arcs_at[pos] = entry

    hatoms = []
    for idx in sorted(hslots):
        slots = hslots[idx]
        hatoms.append(f"H[{idx + 1};{slots['u']},{slots['d']}]")

    def over_under(rec: _Xrec):
        roles = sorted(rec.arcs)
        other = [r for r in roles if r != rec.over_role]
        return rec.arcs[rec.over_role], rec.arcs[other[0]]

    xatoms = []
    for cid in sorted(range(len(crossings)),
                      key=lambda c: (crossings[c].pos, c)):
        rec = crossings[cid]
        if not rec.arcs:
            continue
        o, u = over_under(rec)
        xatoms.append(f"{'X' if rec.sign > 0 else 'Xb'}[{o},{u}]")

    total = len(chain)
    merge = f"m[{','.join(str(p) for p in range(1, total + 1))}>{total + 1}]"
    dsl = " ".join(hatoms + xatoms) + " // " + merge

    piece_of = {}
    piece = 0
    for pos in range(1, total + 1):
        kind = arcs_at[pos][0]
        piece_of[pos] = piece
        if kind == "h":
            piece += 1
    writhes = [0] * (piece + 1)
    passages = []
    for pos in range(1, total + 1):
        kind, ref, role = arcs_at[pos]
        if kind == "h":
            passages.append(("h", str(ref + 1)))
            continue
        rec = crossings[ref]
        o, u = over_under(rec)
        is_self = piece_of[o] == piece_of[u]
        passages.append(("x", rec.sign, is_self))
        if is_self and pos == o:
            writhes[piece_of[o]] += rec.sign
    geometry = DiagramGeometry(tuple(passages),
                               tuple(enumerate(writhes)),
                               len(xatoms))
    return CompiledDiagram(d, dsl, geometry, corrected)


def _raw_chain(d: GctDiagram):
    crossings, events, owner, xs, ys = _corridor_blocks(d)
    chain = []
    hslots = {}
    clasp = {}
    for site in range(1, 2 * d.n + 1):
        c = owner[site]
        contact = d.contacts[c]
        first = site == contact.a
        for _, cid, role in sorted(events.get((site, "down"), ())):
            chain.append(("x", cid, role))
        if contact.sign == 0:
            hslots.setdefault(c, {})
            chain.append(("h", c, "u" if first else "d"))
        else:
            if first:
                top, bottom = _clasp_records(contact.sign, (xs[c], ys[c]))
                crossings.append(top)
                crossings.append(bottom)
                clasp[c] = (len(crossings) - 2, len(crossings) - 1)
                chain.append(("x", clasp[c][1], "a"))
                chain.append(("x", clasp[c][0], "a"))
            else:
                chain.append(("x", clasp[c][0], "b"))
                chain.append(("x", clasp[c][1], "b"))
        for _, cid, role in sorted(events.get((site, "up"), ())):
            chain.append(("x", cid, role))
    return chain, crossings, hslots


def compile_diagram(d: GctDiagram, frame_zero: bool = False) -> CompiledDiagram:
    """Realize the diagram as one open strand walking the backbone.

    The raw layout can leave a crossed pair of bonded contacts with one
    self-crossing on the piece between their passages; frame_zero splices
    an opposite curl into every such piece so all writhes vanish.
    """
    chain, crossings, hslots = _raw_chain(d)
    compiled = _assemble(d, list(chain), crossings, hslots, False)
    if not frame_zero:
        return compiled
    bad = compiled.geometry.nonzero_writhes()
    if not bad:
        return CompiledDiagram(compiled.diagram, compiled.dsl,
                               compiled.geometry, True)

    piece = 0
    insert_after = {}
    for slot, entry in enumerate(chain):
        if piece not in insert_after:
            insert_after[piece] = slot
        if entry[0] == "h":
            piece += 1
    for piece_id, w in bad:
        curl_sign = -1 if w > 0 else 1
        at = insert_after[piece_id] + 1
        for _ in range(abs(w)):
            rec = _Xrec(curl_sign, "o", (Fraction(0), Fraction(0)))
            cid = len(crossings)
            crossings.append(rec)
            chain[at:at] = [("x", cid, "o"), ("x", cid, "u")]
    # Curl records sort by position; give them stable sweep slots at the
    # far left so insertion order alone fixes the emitted text.
    for k, rec in enumerate(crossings):
        if rec.over_role == "o":
            rec.pos = (Fraction(-1), Fraction(k))
    return _assemble(d, chain, crossings, hslots, True)


# ---------------------------------------------------------------------------
# Census

@dataclass(frozen=True)
class CensusRow:
    notation: str
    value: str
    latex: str
    degree: int
    unit_exponent: int
    unit_sign: int
    group: int
    error: str


def _evaluate_notation(text: str) -> dict:
    d = parse_gct(text)
    compiled = compile_diagram(d, frame_zero=True)
    report = dgamma1(compiled.expr)
    return {
        "notation": text,
        "value": report.text(),
        "latex": poly_latex(report.value),
        "degree": report.value.total_degree(),
        "unit_exponent": report.unit_exponent,
        "unit_sign": report.unit_sign,
        "error": "",
    }


def _census_worker(text: str) -> dict:
    try:
        return _evaluate_notation(text)
    except Exception as exc:  # per-diagram failures become rows
        return {"notation": text, "value": "", "latex": "", "degree": 0,
                "unit_exponent": 0, "unit_sign": 1,
                "error": f"{type(exc).__name__}: {exc}"}


def default_jobs() -> int:
    env = os.environ.get("CTKIT_JOBS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise GctError(f"bad CTKIT_JOBS value {env!r}") from exc
    return 1


def census(n: int, drop_loose_clasps: bool = False,
           jobs: int | None = None) -> list[CensusRow]:
    """Evaluate every n-contact diagram, 0-framed, grouped by invariant.

    Group ids follow the (total degree, text) order of the group values;
    rows keep enumeration order inside each group.  The row set is a
    pure function of n and the filter, independent of jobs.
    """
    diagrams = enumerate_diagrams(n, drop_loose_clasps)
    texts = [d.text() for d in diagrams]
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs > 1 and len(texts) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=jobs) as pool:
            raw = pool.map(_census_worker, texts, chunksize=8)
    else:
        raw = [_census_worker(t) for t in texts]

    keys = {}
    for row in raw:
        if not row["error"]:
            keys[row["value"]] = (row["degree"], row["value"])
    group_of = {value: gid for gid, (value, _) in
                enumerate(sorted(keys.items(), key=lambda kv: kv[1]),
                          start=1)}
    rows = []
    for row in raw:
        gid = 0 if row["error"] else group_of[row["value"]]
        rows.append(CensusRow(row["notation"], row["value"], row["latex"],
                              row["degree"], row["unit_exponent"],
                              row["unit_sign"], gid, row["error"]))
    rows.sort(key=lambda r: (r.group == 0, r.group,
                             texts.index(r.notation)))
    return rows


def render_census(rows, fmt: str) -> str:
    cols = ("notation", "invariant", "unit", "group")

    def cells(r: CensusRow):
        if r.error:
            return (r.notation, f"error: {r.error}", "", "")
        unit = f"{'-' if r.unit_sign < 0 else ''}t^{r.unit_exponent}"
        return (r.notation, r.value, unit, str(r.group))

    if fmt == "json":
        payload = [{"notation": r.notation, "invariant": r.value,
                    "unit_exponent": r.unit_exponent,
                    "unit_sign": r.unit_sign, "group": r.group,
                    "error": r.error or None} for r in rows]
        return json.dumps(payload, indent=2)
    if fmt == "csv":
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join('"%s"' % c.replace('"', '""')
                                  if ("," in c or '"' in c) else c
                                  for c in cells(r)))
        return "\n".join(lines)
    if fmt == "md":
        lines = ["| " + " | ".join(cols) + " |",
                 "|" + "|".join("---" for _ in cols) + "|"]
        for r in rows:
            lines.append("| " + " | ".join(cells(r)) + " |")
        return "\n".join(lines)
    if fmt == "latex":
        lines = [r"\begin{tabular}{llll}",
                 " & ".join(cols) + r" \\ \hline"]
        for r in rows:
            notation, _, unit, group = cells(r)
            value = f"${r.latex}$" if not r.error else cells(r)[1]
            unit_tex = f"${unit}$" if unit else ""
            lines.append(" & ".join((notation.replace("{", r"\{")
                                     .replace("}", r"\}"),
                                     value, unit_tex, group)) + r" \\")
        lines.append(r"\end{tabular}")
        return "\n".join(lines)
    raise GctError(f"unknown census format {fmt!r}")
