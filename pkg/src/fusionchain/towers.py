"""Multimatrix subalgebra machinery over chain algebras.

Everything here is exact: spans are echelon bases over the scalar field,
block data comes from central idempotent splitting, and inclusion matrices
are integer rank counts recovered from traces.  Algebras that arise as
commutants are handled in matrix-unit coordinates (products are structure
constants), so nothing here multiplies large path-basis matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ._linalg import RowSpace, SparseMat, ldl, nullspace, rref, vec_dot
from .algebra import AlgElement, ChainAlgebra, Window, WindowError
from .exactnum import ExactScalar, NotInFieldError


class TowerError(Exception):
    pass


class NotEquivalentError(TowerError):
    def __init__(self, ranks_p, ranks_q):
        super().__init__(f"projections not equivalent: block ranks {ranks_p} vs {ranks_q}")
        self.ranks_p = ranks_p
        self.ranks_q = ranks_q


# -- flattened coordinates on a window algebra --------------------------------

class Coords:
    def __init__(self, chain: ChainAlgebra, window: Window):
        self.chain = chain
        self.window = window
        pd = chain.paths(window.size)
        self.offset: dict[int, int] = {}
        self.width: dict[int, int] = {}
        off = 0
        for v in sorted(pd.blocks):
            m = len(pd.blocks[v])
            if m:
                self.offset[v] = off
                self.width[v] = m
                off += m * m
        self.total = off

    def flatten(self, el: AlgElement) -> dict[int, ExactScalar]:
        out: dict[int, ExactScalar] = {}
        for v, mat in el.blocks.items():
            if v not in self.offset or mat.is_zero():
                continue
            base, m = self.offset[v], self.width[v]
            for (i, j), c in mat.data.items():
                out[base + i * m + j] = c
        return out


def span_basis(elements: list[AlgElement], coords: Coords) -> list[AlgElement]:
    rs = RowSpace(coords.total, coords.chain.field)
    out = []
    for el in elements:
        if rs.insert(coords.flatten(el)):
            out.append(el)
    return out


def algebra_closure(gens: list[AlgElement], window: Window, with_unit: bool = True,
                    max_dim: int = 4000) -> list[AlgElement]:
    """Basis of the unital *-algebra generated by gens inside A_window."""
    if not gens:
        raise TowerError("no generators")
    chain = gens[0].chain
    coords = Coords(chain, window)
    rs = RowSpace(coords.total, chain.field)
    basis: list[AlgElement] = []

    def push(el: AlgElement) -> bool:
        if rs.insert(coords.flatten(el)):
            basis.append(el)
            return True
        return False

    gens = [g if g.window == window else g.embed(window) for g in gens]
    mults = list(gens) + [g.adjoint() for g in gens]
    if with_unit:
        push(AlgElement.identity(chain, window))
    for s in mults:
        push(s)
    frontier = list(basis)
    while frontier:
        new_frontier = []
        for b in frontier:
            for g in mults:
                prod = b @ g
                if push(prod):
                    new_frontier.append(prod)
                if len(basis) > max_dim:
                    raise TowerError("algebra closure exceeded dimension budget")
        frontier = new_frontier
    return basis


# -- abstract finite-dimensional *-algebras in unit coordinates ----------------

class UnitAlgebra:
    """A *-algebra presented on a basis of generalized matrix units.

    labels index the basis; mult returns the sparse product of two basis
    units as [(label, coeff)]; star maps a label to (label, coeff); tr gives
    the ambient trace of a unit.  Elements are dicts label -> coeff.
    """

    def __init__(self, field, labels: list, mult: Callable, star: Callable, tr: Callable,
                 materialize: Callable | None = None):
        self.field = field
        self.labels = list(labels)
        self.pos = {l: i for i, l in enumerate(self.labels)}
        self._mult = mult
        self._star = star
        self._tr = tr
        self._materialize = materialize

    # element helpers
    def prod(self, x: dict, y: dict) -> dict:
        out: dict = {}
        f = self.field
        for la, ca in x.items():
            for lb, cb in y.items():
                for lc, cc in self._mult(la, lb):
                    coeff = ca * cb * cc
                    cur = out.get(lc)
                    new = coeff if cur is None else cur + coeff
                    if new.is_zero():
                        out.pop(lc, None)
                    else:
                        out[lc] = new
        return out

    def star(self, x: dict) -> dict:
        out = {}
        for l, c in x.items():
            l2, c2 = self._star(l)
            out[l2] = c.conjugate() * c2
        return out

    def add(self, x: dict, y: dict) -> dict:
        out = dict(x)
        for l, c in y.items():
            cur = out.get(l)
            new = c if cur is None else cur + c
            if new.is_zero():
                out.pop(l, None)
            else:
                out[l] = new
        return out

    def scale(self, x: dict, c) -> dict:
        if c.is_zero():
            return {}
        return {l: v * c for l, v in x.items()}

    def sub(self, x: dict, y: dict) -> dict:
        return self.add(x, self.scale(y, self.field.scalar(-1)))

    def trace(self, x: dict) -> ExactScalar:
        out = self.field.zero
        for l, c in x.items():
            out = out + c * self._tr(l)
        return out

    def to_vec(self, x: dict) -> dict[int, ExactScalar]:
        return {self.pos[l]: c for l, c in x.items()}

    def materialize(self, x: dict) -> AlgElement:
        if self._materialize is None:
            raise TowerError("algebra has no ambient realization")
        out = None
        for l, c in x.items():
            term = self._materialize(l).scale(c)
            out = term if out is None else out + term
        return out


def tail_pair_algebra(chain: ChainAlgebra, arena: Window, cut: int) -> tuple[UnitAlgebra, dict]:
    """Matrix units of A_[arena.a, cut]' inside A_arena.

    The commutant of the left-aligned interval algebra is spanned by the
    head-summed tail pairs sum_p e_(p.theta, p.theta'), which multiply as
    matrix units labeled (start vertex u, tail theta, tail theta').
    """
    k = cut - arena.a + 1
    heads = chain.paths(k)
    full = chain.paths(arena.size)
    tail_len = arena.b - cut
    tails: dict[int, list[tuple[tuple[int, ...], int]]] = {}
    for u in sorted(heads.blocks):
        if not heads.blocks[u]:
            continue
        cur = [((), u)]
        for _ in range(tail_len):
            nxt = []
            for t, v in cur:
                for e in chain.out_edges[v]:
                    nxt.append((t + (e.eid,), e.dst))
            cur = nxt
        tails[u] = cur
    ends: dict[tuple[int, tuple[int, ...]], int] = {}
    labels = []
    for u, tl in tails.items():
        for t, w in tl:
            ends[(u, t)] = w
        for t1, w1 in tl:
            for t2, w2 in tl:
                if w1 == w2:
                    labels.append((u, t1, t2))
    field = chain.field
    one = field.one
    head_count = {u: len(heads.blocks[u]) for u in tails}

    def mult(la, lb):
        u1, s1, t1 = la
        u2, s2, t2 = lb
        if u1 != u2 or t1 != s2:
            return ()
        return (((u1, s1, t2), one),)

    def star(l):
        u, s, t = l
        return (u, t, s), one

    def tr(l):
        u, s, t = l
        if s != t:
            return field.zero
        return field.scalar(head_count[u]) * chain.trace_weight(ends[(u, s)], arena.size)

    def materialize(l):
        u, s, t = l
        el = AlgElement.zero(chain, arena)
        for p in heads.blocks[u]:
            v1, i1 = full.index[p + s]
            v2, i2 = full.index[p + t]
            el.blocks[v1].set(i1, i2, one)
        return el

    return UnitAlgebra(field, labels, mult, star, tr, materialize), tails


# -- block structure ----------------------------------------------------------

@dataclass
class BlockInfo:
    key: tuple
    central_proj: AlgElement
    dim: int
    min_trace: ExactScalar
    min_proj: AlgElement | None = None


@dataclass
class SubalgebraDescription:
    window: Window
    blocks: list[BlockInfo]
    basis: list[AlgElement] | None = None

    @property
    def dimension_vector(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)

    def total_dim(self) -> int:
        return sum(b.dim ** 2 for b in self.blocks)


def _scalar_key(x: ExactScalar) -> tuple:
    return (x.re, x.im, x.den)


class SpanInUnits:
    """A *-closed unital subspace of a UnitAlgebra, with algebra structure."""

    def __init__(self, alg: UnitAlgebra, vectors: list[dict]):
        self.alg = alg
        self.field = alg.field
        self.rs = RowSpace(len(alg.labels), alg.field)
        self.basis: list[dict] = []
        for v in vectors:
            if self.rs.insert(alg.to_vec(v)):
                self.basis.append(v)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, x: dict) -> bool:
        return self.rs.contains(self.alg.to_vec(x))

    def coords_of(self, x: dict) -> list[ExactScalar] | None:
        """Coefficients of x over the span basis, or None."""
        # solve by reduction bookkeeping: append and test
        f = self.field
        rows = []
        for b in self.basis:
            rows.append(self.alg.to_vec(b))
        keys = sorted(set().union(*rows, self.alg.to_vec(x).keys())) if rows else []
        mat = [[r.get(k, f.zero) for r in rows] + [self.alg.to_vec(x).get(k, f.zero)]
               for k in keys]
        red, piv = rref(mat, f)
        coeffs = [f.zero] * len(rows)
        for r, c in enumerate(piv):
            if c == len(rows):
                return None  # inconsistent: x not in span
            coeffs[c] = red[r][len(rows)]
        return coeffs


def min_poly_in_units(alg: UnitAlgebra, x: dict, unit: dict) -> list[ExactScalar]:
    f = alg.field
    rs = RowSpace(len(alg.labels), f)
    powers = [unit]
    rs.insert(alg.to_vec(unit))
    cur = unit
    while True:
        cur = alg.prod(cur, x)
        if not rs.insert(alg.to_vec(cur)):
            break
        powers.append(cur)
    deg = len(powers)
    keys = sorted(set().union(*[alg.to_vec(p).keys() for p in powers + [cur]]))
    mat = [[alg.to_vec(p).get(k, f.zero) for p in powers] + [alg.to_vec(cur).get(k, f.zero)]
           for k in keys]
    red, piv = rref(mat, f)
    coeffs = [f.zero] * deg
    for r, c in enumerate(piv):
        if c < deg:
            coeffs[c] = red[r][deg]
    return [-c for c in coeffs] + [f.one]


def _poly_roots_in_field(poly: list[ExactScalar], field) -> list[ExactScalar] | None:
    roots: list[ExactScalar] = []
    cur = list(poly)
    while len(cur) > 1:
        deg = len(cur) - 1
        if deg == 1:
            roots.append(-cur[0])
            break
        if deg == 2:
            b, c = cur[1], cur[0]
            disc = b * b - field.scalar(4) * c
            try:
                r = disc.sqrt()
            except NotInFieldError:
                return None
            half = field.scalar(Fraction(1, 2))
            roots.append((-b + r) * half)
            roots.append((-b - r) * half)
            break
        cand = None
        if all(cc.is_rational() for cc in cur):
            from .exactnum import _find_rational_root
            rr = _find_rational_root([cc.as_fraction() for cc in cur])
            if rr is not None:
                cand = field.scalar(rr)
        if cand is None:
            return None
        roots.append(cand)
        acc = field.zero
        out = []
        for c in reversed(cur):
            acc = acc * cand + c
            out.append(acc)
        out.pop()
        cur = list(reversed(out))
    return roots


def _spectral_idempotents(alg: UnitAlgebra, s: dict, unit: dict):
    poly = min_poly_in_units(alg, s, unit)
    if len(poly) <= 2:
        return None
    roots = _poly_roots_in_field(poly, alg.field)
    if roots is None:
        return None
    uniq: list[ExactScalar] = []
    for r in roots:
        if not any(_scalar_key(r) == _scalar_key(u) for u in uniq):
            uniq.append(r)
    if len(uniq) < 2:
        return None
    idems = []
    for lam in uniq:
        z = unit
        denom = alg.field.one
        for mu in uniq:
            if _scalar_key(mu) == _scalar_key(lam):
                continue
            z = alg.prod(z, alg.sub(s, alg.scale(unit, mu)))
            denom = denom * (lam - mu)
        idems.append(alg.scale(z, denom.inverse()))
    return idems


def split_unit_into_minimal_central(alg: UnitAlgebra, span: SpanInUnits,
                                    unit: dict) -> list[dict]:
    """Minimal central idempotents of the algebra spanned by span (unital)."""
    f = alg.field
    # center: c in span with [c, b] = 0 for all basis b
    rows: list[list[ExactScalar]] = []
    n = span.dim
    for bj in span.basis:
        cols = [alg.to_vec(alg.sub(alg.prod(bk, bj), alg.prod(bj, bk))) for bk in span.basis]
        keys = sorted(set().union(*[c.keys() for c in cols])) if cols else []
        for k in keys:
            rows.append([c.get(k, f.zero) for c in cols])
    center_coeffs = nullspace(rows, f) if rows else \
        [[f.one if i == t else f.zero for i in range(n)] for t in range(n)]
    center: list[dict] = []
    for coeff in center_coeffs:
        el: dict = {}
        for c, b in zip(coeff, span.basis):
            if not c.is_zero():
                el = alg.add(el, alg.scale(b, c))
        if el:
            center.append(el)

    def split(unit_el: dict, sub: list[dict]) -> list[dict]:
        if len(sub) == 1:
            el = sub[0]
            sq = alg.prod(el, el)
            k = next(iter(el))
            lam = sq.get(k, f.zero) / el[k]
            return [alg.scale(el, lam.inverse())]
        for cand in sub:
            st = alg.star(cand)
            for s in (alg.add(cand, st),
                      alg.scale(alg.sub(cand, st), f.scalar(0, 1))):
                idems = _spectral_idempotents(alg, s, unit_el)
                if idems:
                    out = []
                    for z in idems:
                        zb = []
                        rs = RowSpace(len(alg.labels), f)
                        for b in sub:
                            nb = alg.prod(z, b)
                            if rs.insert(alg.to_vec(nb)):
                                zb.append(nb)
                        out.extend(split(z, zb))
                    return out
        raise TowerError("could not split commutative algebra over the field")

    return split(unit, center)


def describe_units_span(alg: UnitAlgebra, vectors: list[dict], unit: dict,
                        ambient_window: Window,
                        need_min_projs: bool = False) -> SubalgebraDescription:
    span = SpanInUnits(alg, vectors)
    if not span.contains(unit):
        raise TowerError("span must contain its unit")
    f = alg.field
    idems = split_unit_into_minimal_central(alg, span, unit)
    blocks = []
    for z in idems:
        # corner dimension
        rs = RowSpace(len(alg.labels), f)
        corner = []
        for b in span.basis:
            c = alg.prod(alg.prod(z, b), z)
            if rs.insert(alg.to_vec(c)):
                corner.append(c)
        import math
        ndim = math.isqrt(len(corner))
        if ndim * ndim != len(corner):
            raise TowerError(f"corner dimension {len(corner)} is not a perfect square")
        tz = alg.trace(z)
        min_trace = tz / f.scalar(ndim)
        mp_el = None
        if need_min_projs:
            mp = _minimal_projection_units(alg, z, corner)
            mp_el = alg.materialize(mp)
        blocks.append(BlockInfo(key=_scalar_key(min_trace), central_proj=alg.materialize(z),
                                dim=ndim, min_trace=min_trace, min_proj=mp_el))
    blocks.sort(key=lambda b: (b.dim, b.key))
    return SubalgebraDescription(window=ambient_window, blocks=blocks,
                                 basis=None)


def _minimal_projection_units(alg: UnitAlgebra, z: dict, corner: list[dict]) -> dict:
    f = alg.field
    p, sub = z, corner
    while len(sub) > 1:
        done = False
        for cand in sub:
            st = alg.star(cand)
            for s in (alg.add(cand, st), alg.scale(alg.sub(cand, st), f.scalar(0, 1))):
                idems = _spectral_idempotents(alg, s, p)
                if idems:
                    q = idems[0]
                    rs = RowSpace(len(alg.labels), f)
                    nsub = []
                    for b in corner:
                        nb = alg.prod(alg.prod(q, b), q)
                        if rs.insert(alg.to_vec(nb)):
                            nsub.append(nb)
                    p, sub = q, nsub
                    done = True
                    break
            if done:
                break
        if not done:
            raise TowerError("could not isolate a minimal projection over the field")
    return p


# -- interval subalgebras -------------------------------------------------------

def window_subalgebra(chain: ChainAlgebra, sub: Window, ambient: Window) -> SubalgebraDescription:
    """The embedded interval algebra A_sub inside A_ambient, with explicit data."""
    if not ambient.contains(sub):
        raise WindowError(f"{ambient} does not contain {sub}")
    pd = chain.paths(sub.size)
    blocks = []
    for v in sorted(pd.blocks):
        plist = pd.blocks[v]
        if not plist:
            continue
        central = AlgElement.zero(chain, sub)
        for p in plist:
            central.blocks[v].set(pd.index[p][1], pd.index[p][1], chain.field.one)
        minp = AlgElement.matrix_unit(chain, sub, plist[0], plist[0])
        blocks.append(BlockInfo(key=_scalar_key(chain.trace_weight(v, sub.size)),
                                central_proj=central.embed(ambient), dim=len(plist),
                                min_trace=chain.trace_weight(v, sub.size),
                                min_proj=minp.embed(ambient)))
    blocks.sort(key=lambda b: (b.dim, b.key))
    return SubalgebraDescription(window=ambient, blocks=blocks)


def inclusion_matrix(sub: SubalgebraDescription, amb: SubalgebraDescription) -> list[list[int]]:
    """Multiplicity matrix (amb block j, sub block i) from minimal-projection ranks."""
    if sub.window != amb.window:
        raise WindowError("descriptions live in different ambient windows")
    out = []
    for bj in amb.blocks:
        row = []
        for bi in sub.blocks:
            if bi.min_proj is None:
                raise TowerError("sub description lacks minimal projections")
            val = (bi.min_proj @ bj.central_proj).trace() / bj.min_trace
            row.append(_as_int(val))
        out.append(row)
    for row, bj in zip(out, amb.blocks):
        if sum(l * bi.dim for l, bi in zip(row, sub.blocks)) != bj.dim:
            raise TowerError("inclusion matrix fails the dimension equation (non-unital inclusion?)")
    return out


def _as_int(x: ExactScalar) -> int:
    if not x.is_rational():
        raise TowerError(f"expected integer rank, got {x!r}")
    fr = x.as_fraction()
    if fr.denominator != 1:
        raise TowerError(f"expected integer rank, got {fr}")
    return int(fr)


def relative_commutant(gens: list[AlgElement], ambient: Window,
                       need_min_projs: bool = True,
                       max_dim: int = 900) -> SubalgebraDescription:
    """Exact commutant of gens inside A_ambient, with multimatrix structure.

    Solves [x, g] = 0 blockwise over the field; meant for small ambient
    windows (the guarded per-block unknown count is max_dim).
    """
    if not gens:
        raise TowerError("no generators")
    chain = gens[0].chain
    field = chain.field
    gens = [g if g.window == ambient else g.embed(ambient) for g in gens]
    pd = chain.paths(ambient.size)
    basis: list[AlgElement] = []
    for v in sorted(pd.blocks):
        m = len(pd.blocks[v])
        if m == 0:
            continue
        if m * m > max_dim:
            raise TowerError(f"commutant solve too large: block {v} has {m * m} unknowns")
        rowmap: dict[tuple[int, int, int], dict[int, ExactScalar]] = {}
        for gi, g in enumerate(gens):
            gb = g.blocks[v]
            for (j, c), val in gb.data.items():
                for r in range(m):
                    d = rowmap.setdefault((gi, r, c), {})
                    d[r * m + j] = d.get(r * m + j, field.zero) + val
            for (r, j), val in gb.data.items():
                for c in range(m):
                    d = rowmap.setdefault((gi, r, c), {})
                    d[j * m + c] = d.get(j * m + c, field.zero) - val
        rows = []
        for d in rowmap.values():
            row = [field.zero] * (m * m)
            for k, val in d.items():
                row[k] = val
            rows.append(row)
        sols = nullspace(rows, field) if rows else \
            [[field.one if k == t else field.zero for k in range(m * m)] for t in range(m * m)]
        for s in sols:
            el = AlgElement.zero(chain, ambient)
            for k, c in enumerate(s):
                if not c.is_zero():
                    el.blocks[v].set(k // m, k % m, c)
            basis.append(el)
    for g in gens:
        for b in basis:
            if not (b @ g - g @ b).is_zero():
                raise TowerError("internal error: commutant basis fails commutation")
    # describe via a one-off unit algebra on flattened coordinates
    return _describe_algelement_span(basis, ambient, need_min_projs)


def _describe_algelement_span(basis: list[AlgElement], ambient: Window,
                              need_min_projs: bool) -> SubalgebraDescription:
    chain = basis[0].chain
    field = chain.field
    coords = Coords(chain, ambient)
    pd = chain.paths(ambient.size)
    labels = []
    for v in sorted(coords.offset):
        m = coords.width[v]
        for i in range(m):
            for j in range(m):
                labels.append((v, i, j))

    def mult(la, lb):
        v1, i1, j1 = la
        v2, i2, j2 = lb
        if v1 != v2 or j1 != i2:
            return ()
        return (((v1, i1, j2), field.one),)

    def star(l):
        v, i, j = l
        return (v, j, i), field.one

    def tr(l):
        v, i, j = l
        if i != j:
            return field.zero
        return chain.trace_weight(v, ambient.size)

    def materialize(l):
        v, i, j = l
        el = AlgElement.zero(chain, ambient)
        el.blocks[v].set(i, j, field.one)
        return el

    alg = UnitAlgebra(field, labels, mult, star, tr, materialize)

    def to_units(el: AlgElement) -> dict:
        out = {}
        for v, mat in el.blocks.items():
            for (i, j), c in mat.data.items():
                out[(v, i, j)] = c
        return out

    vecs = [to_units(b) for b in basis]
    unit = to_units(AlgElement.identity(chain, ambient))
    return describe_units_span(alg, vecs, unit, ambient, need_min_projs=need_min_projs)


def interval_commutant(chain: ChainAlgebra, x: int, z: int,
                       margin: int | None = None,
                       need_min_projs: bool = False) -> SubalgebraDescription:
    """Relative commutant of the half-chain through x inside the one through z.

    Following the compactness identification, computes the commutant of
    A_[x-margin, x] intersected with the embedded A_[x-margin+1, z] inside
    the arena A_[x-margin, z].  The default margin is the strong generating
    power of the chain; growing it and comparing is the stabilization check.
    """
    if margin is None:
        margin = chain.spec.strong_power
    if margin < 1:
        raise TowerError("margin must be at least 1")
    arena = Window(x - margin, z)
    alg, tails = tail_pair_algebra(chain, arena, x)
    field = chain.field
    # membership constraints: an element of the embedded A_[x-margin+1, z]
    # has channel-diagonal V-pattern at the arena's left edge
    vdata = chain.insertion_data(arena.size - 1)
    rows_accum: dict[tuple, dict[int, ExactScalar]] = {}
    chan_meta: dict[tuple, list[tuple]] = {}
    for col, label in enumerate(alg.labels):
        el = alg.materialize({label: field.one})
        for w, (v, src) in vdata.items():
            mblk = el.blocks.get(w)
            if mblk is None or mblk.is_zero():
                continue
            uu = (v.dagger() @ mblk) @ v
            for (c1, c2), val in uu.data.items():
                s1, i1, g1 = src[c1]
                s2, i2, g2 = src[c2]
                if g1 != g2 or s1 != s2:
                    key = ("zero", w, c1, c2)
                else:
                    key = ("chan", s1, i1, i2, g1)
                d = rows_accum.setdefault(key, {})
                d[col] = d.get(col, field.zero) + val
    constraint_rows: list[dict[int, ExactScalar]] = []
    chan_groups: dict[tuple, list[tuple]] = {}
    for key in rows_accum:
        if key[0] == "zero":
            constraint_rows.append(rows_accum[key])
        else:
            _, s, i1, i2, g = key
            chan_groups.setdefault((s, i1, i2), []).append(key)
    out_edge_count = {s: len(chain.out_edges[s]) for s in chain.out_edges}
    for (s, i1, i2), group in chan_groups.items():
        first = rows_accum[group[0]]
        if len(group) < out_edge_count[s]:
            # a missing channel coordinate is identically zero, forcing all
            constraint_rows.append(first)
        for other in group[1:]:
            row = dict(first)
            for col, val in rows_accum[other].items():
                cur = row.get(col, field.zero) - val
                if cur.is_zero():
                    row.pop(col, None)
                else:
                    row[col] = cur
            if row:
                constraint_rows.append(row)
    ncols = len(alg.labels)
    dense = []
    for row in constraint_rows:
        r = [field.zero] * ncols
        for c, vv in row.items():
            r[c] = vv
        dense.append(r)
    sols = nullspace(dense, field) if dense else \
        [[field.one if k == t else field.zero for k in range(ncols)] for t in range(ncols)]
    vectors = []
    for s in sols:
        vec = {alg.labels[c]: co for c, co in enumerate(s) if not co.is_zero()}
        if vec:
            vectors.append(vec)
    unit = {}
    for u, tl in tails.items():
        for t, w in tl:
            unit[(u, t, t)] = field.one
    return describe_units_span(alg, vectors, unit, arena, need_min_projs=need_min_projs)


# -- Murray-von Neumann equivalence -------------------------------------------

def block_ranks(p: AlgElement) -> dict[int, int]:
    """Per-block rank of a projection (= integer matrix trace)."""
    out = {}
    for v, m in p.blocks.items():
        out[v] = _as_int(m.diag_sum(p.chain.field))
    return out


def _independent_columns(m: SparseMat, field) -> list[dict[int, ExactScalar]]:
    cols: dict[int, dict[int, ExactScalar]] = {}
    for (i, j), c in m.data.items():
        cols.setdefault(j, {})[i] = c
    rs = RowSpace(m.nrows, field)
    out = []
    for j in sorted(cols):
        if rs.insert(cols[j]):
            out.append(cols[j])
    return out


def _orthonormal_frame(cols: list[dict[int, ExactScalar]], field) -> list[dict[int, ExactScalar]]:
    """Exact orthonormal basis of the column span; needs sqrt of the LDL pivots."""
    r = len(cols)
    gram = [[vec_dot(cols[i], cols[j], field) for j in range(r)] for i in range(r)]
    L, d = ldl(gram, field)
    Lh = [[L[j][i].conjugate() for j in range(r)] for i in range(r)]
    M = [[field.zero] * r for _ in range(r)]
    for c in range(r):
        for i in range(r - 1, -1, -1):
            acc = field.one if i == c else field.zero
            for k in range(i + 1, r):
                acc = acc - Lh[i][k] * M[k][c]
            M[i][c] = acc
    scales = []
    for i in range(r):
        if d[i].is_zero():
            raise NotInFieldError("degenerate gram pivot")
        scales.append(d[i].sqrt().inverse())
    frame = []
    for k in range(r):
        vec: dict[int, ExactScalar] = {}
        for i in range(r):
            co = M[i][k] * scales[k]
            if co.is_zero():
                continue
            for row, val in cols[i].items():
                cur = vec.get(row, field.zero) + val * co
                if cur.is_zero():
                    vec.pop(row, None)
                else:
                    vec[row] = cur
        frame.append(vec)
    return frame


def mvn_equivalence(p: AlgElement, q: AlgElement) -> AlgElement:
    """A unitary u with u p u* = q, or NotEquivalentError with rank witnesses."""
    chain = p.chain
    field = chain.field
    if p.window != q.window:
        raise WindowError("projections on different windows")
    for el in (p, q):
        if not (el @ el == el and el.adjoint() == el):
            raise TowerError("inputs must be projections")
    rp, rq = block_ranks(p), block_ranks(q)
    if rp != rq:
        raise NotEquivalentError(rp, rq)
    u = AlgElement.zero(chain, p.window)
    one = AlgElement.identity(chain, p.window)
    comp_p, comp_q = one - p, one - q
    for v in p.blocks:
        blk = u.blocks[v]
        for proj_p, proj_q in ((p.blocks[v], q.blocks[v]),
                               (comp_p.blocks[v], comp_q.blocks[v])):
            cols_p = _independent_columns(proj_p, field)
            cols_q = _independent_columns(proj_q, field)
            if len(cols_p) != len(cols_q):
                raise NotEquivalentError(rp, rq)
            if not cols_p:
                continue
            fp = _orthonormal_frame(cols_p, field)
            fq = _orthonormal_frame(cols_q, field)
            for vp, vq in zip(fp, fq):
                for i, ci in vq.items():
                    for j, cj in vp.items():
                        blk.add_to(i, j, ci * cj.conjugate())
    if not (u @ u.adjoint() == one and u.adjoint() @ u == one):
        raise TowerError("constructed pairing is not unitary")
    if not (u @ p @ u.adjoint() == q):
        raise TowerError("constructed unitary fails to conjugate p to q")
    return u


# -- the canonical tower projection -------------------------------------------

@dataclass
class TowerTriple:
    """Adapted data for a unital triple A0 in A1 in A2 with transpose-paired
    inclusion matrices, realized inside a window algebra.

    For each A0 block i, edges01[i] lists tokens for the edges i -> j of the
    first inclusion diagram (multiplicity by repetition); t0[i] and t1[token]
    are the minimal-projection traces.  unit(i, e1, e2) realizes
    sum_over_A0_paths e_(gamma gamma*, delta delta*) for the edge pair.
    """

    t0: dict
    t1: dict
    edges01: dict
    unit: Callable

    def markov_projection(self) -> AlgElement:
        out = None
        for i, tokens in self.edges01.items():
            for e1 in tokens:
                for e2 in tokens:
                    coeff = (self.t1[e1] * self.t1[e2]).sqrt() / self.t0[i]
                    term = self.unit(i, e1, e2).scale(coeff)
                    out = term if out is None else out + term
        if out is None:
            raise TowerError("empty triple")
        return out


def window_tower_triple(chain: ChainAlgebra, base: Window) -> TowerTriple:
    """The triple A_base in A_(base+[0,1]) in A_(base+[0,2]) in path form."""
    n0 = base.size
    pd0 = chain.paths(n0)
    amb = Window(base.a, base.b + 2)
    full = chain.paths(n0 + 2)
    t0 = {v: chain.trace_weight(v, n0) for v in pd0.blocks if pd0.blocks[v]}
    edges01 = {i: list(chain.out_edges[i]) for i in t0}
    t1 = {}
    for i, es in edges01.items():
        for e in es:
            t1[e] = chain.trace_weight(e.dst, n0 + 1)

    def unit(i, e1, e2):
        el = AlgElement.zero(chain, amb)
        for p in pd0.blocks[i]:
            p1 = p + (e1.eid, chain.dual_edge(e1).eid)
            p2 = p + (e2.eid, chain.dual_edge(e2).eid)
            v1, i1 = full.index[p1]
            v2, i2 = full.index[p2]
            el.blocks[v1].set(i1, i2, chain.field.one)
        return el

    return TowerTriple(t0=t0, t1=t1, edges01=edges01, unit=unit)
