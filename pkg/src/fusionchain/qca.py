"""Quantum cellular automata on chain algebras and their index.

A QCA is structured data (translations, depth-one circuits, generalized
translations with a factorization certificate, compositions, inverses)
acting on window-tagged elements.  The index is computed by a right-growing
ladder of inclusion matrices between the image tower and the tower it
generates together with a fixed seed window; once two consecutive stages
produce the same matrix (with blocks matched by trace data) the squared
Perron-Frobenius norm of the stable matrix, normalized by the spread,
gives the index.  The stabilization evidence is returned with the value.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from .algebra import AlgElement, ChainAlgebra, Window, jones_projection
from .exactnum import ExactScalar, NotInFieldError, perron_eigen
from .towers import (
    Coords,
    TowerError,
    UnitAlgebra,
    _as_int,
    _minimal_projection_units,
    _scalar_key,
    describe_units_span,
    span_basis,
)
from ._linalg import RowSpace, nullspace


class QcaError(Exception):
    pass


class StabilizationError(QcaError):
    def __init__(self, msg, evidence=None):
        super().__init__(msg)
        self.evidence = evidence or []


# -- QCA specifications --------------------------------------------------------

@dataclass(frozen=True)
class Translation:
    k: int


@dataclass(frozen=True)
class Depth1Circuit:
    blocks: tuple[tuple[Window, AlgElement], ...]
    period: int = 0  # optional layout period hint for stabilization strides

    def __post_init__(self):
        seen = []
        for w, u in self.blocks:
            if u.window != w:
                raise QcaError(f"block unitary window {u.window} differs from {w}")
            one = AlgElement.identity(u.chain, w)
            if not (u @ u.adjoint() == one and u.adjoint() @ u == one):
                raise QcaError(f"block element on {w} is not unitary")
            for prev in seen:
                if prev.overlaps(w):
                    raise QcaError(f"blocks {prev} and {w} overlap")
            seen.append(w)


@dataclass(frozen=True)
class GeneralizedTranslation:
    """A QCA from a factorization certificate and a named generator map."""

    cell: int
    dim_y: ExactScalar
    dim_z: ExactScalar
    mapper: object  # model-supplied: apply(el), inverse_apply(el), name
    name: str = ""


@dataclass(frozen=True)
class Composition:
    items: tuple  # applied right to left: Composition([f, g]) acts as f(g(x))


@dataclass(frozen=True)
class Inverse:
    item: object


QcaSpec = object  # union of the five variants above


def compose(*specs) -> Composition:
    flat = []
    for s in specs:
        if isinstance(s, Composition):
            flat.extend(s.items)
        else:
            flat.append(s)
    return Composition(tuple(flat))


def inverse(spec) -> QcaSpec:
    if isinstance(spec, Translation):
        return Translation(-spec.k)
    if isinstance(spec, Depth1Circuit):
        return Depth1Circuit(tuple((w, u.adjoint()) for w, u in spec.blocks), spec.period)
    if isinstance(spec, GeneralizedTranslation):
        if not hasattr(spec.mapper, "inverse_apply"):
            raise QcaError("generalized translation has no inverse generator map")
        return Inverse(spec)
    if isinstance(spec, Composition):
        return Composition(tuple(inverse(s) for s in reversed(spec.items)))
    if isinstance(spec, Inverse):
        return spec.item
    raise QcaError(f"unknown QCA spec {spec!r}")


def spread(spec) -> int:
    """Upper bound on the spread; additive under composition."""
    if isinstance(spec, Translation):
        return abs(spec.k)
    if isinstance(spec, Depth1Circuit):
        return max((w.size - 1 for w, _ in spec.blocks), default=0)
    if isinstance(spec, GeneralizedTranslation):
        return spec.cell
    if isinstance(spec, Composition):
        return sum(spread(s) for s in spec.items)
    if isinstance(spec, Inverse):
        return spread(spec.item)
    raise QcaError(f"unknown QCA spec {spec!r}")


def stride_hint(spec) -> int:
    import math
    if isinstance(spec, Translation):
        return 1
    if isinstance(spec, Depth1Circuit):
        return max(1, spec.period)
    if isinstance(spec, GeneralizedTranslation):
        return spec.cell
    if isinstance(spec, Composition):
        out = 1
        for s in spec.items:
            out = math.lcm(out, stride_hint(s))
        return out
    if isinstance(spec, Inverse):
        return stride_hint(spec.item)
    return 1


def act(spec, x: AlgElement) -> AlgElement:
    """Apply the automorphism to a local element; output is support-trimmed."""
    if isinstance(spec, Translation):
        return x.shift(spec.k)
    if isinstance(spec, Depth1Circuit):
        touching = [(w, u) for w, u in spec.blocks if w.overlaps(x.window)]
        if not touching:
            return x
        hull = x.window
        for w, _ in touching:
            hull = hull.hull(w)
        y = x.embed(hull)
        utot = None
        for w, u in touching:
            ue = u.embed(hull)
            utot = ue if utot is None else utot @ ue
        return (utot @ y @ utot.adjoint()).trim()
    if isinstance(spec, GeneralizedTranslation):
        return spec.mapper.apply(x).trim()
    if isinstance(spec, Composition):
        out = x
        for s in reversed(spec.items):
            out = act(s, out)
        return out
    if isinstance(spec, Inverse):
        inner = spec.item
        if isinstance(inner, GeneralizedTranslation):
            return inner.mapper.inverse_apply(x).trim()
        return act(inverse(inner), x)
    raise QcaError(f"unknown QCA spec {spec!r}")


def index_of_factorization(dim_y: ExactScalar) -> ExactScalar:
    """Index of a generalized translation from its factorization certificate."""
    if dim_y.sign() <= 0:
        raise QcaError("dim_y must be positive")
    return dim_y


# -- the index ladder -----------------------------------------------------------

@dataclass
class StageEvidence:
    k: int
    arena: Window
    lam: tuple[tuple[int, ...], ...]
    n_blocks: tuple[int, ...]
    sub_dims: tuple[int, ...]
    signature: tuple
    notes: str = ""


@dataclass
class IndexReport:
    value: ExactScalar
    approx: float
    spread_bound: int
    stabilized: bool
    method: str
    stages: list[StageEvidence] = dc_field(default_factory=list)
    squared_norm: ExactScalar | None = None

    def summary(self) -> str:
        from .exactnum import poly_str
        lines = [f"index = {poly_str(self.value)} ~ {self.approx:.10f}",
                 f"spread bound l = {self.spread_bound}; method = {self.method}; "
                 f"stabilized = {self.stabilized}"]
        for st in self.stages:
            lines.append(f"  stage k={st.k} arena={st.arena} sub_dims={st.sub_dims} "
                         f"n_blocks={st.n_blocks} lam={st.lam} {st.notes}")
        return "\n".join(lines)


def _pf_norm_squared(lam: list[list[int]], field) -> ExactScalar:
    """Largest eigenvalue of lam^T lam, exact; handles reducible matrices."""
    rows, cols = len(lam), len(lam[0])
    ata = [[sum(lam[r][i] * lam[r][j] for r in range(rows)) for j in range(cols)]
           for i in range(cols)]
    # connected components of the support graph
    seen = [False] * cols
    best = None
    for s in range(cols):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for v in range(cols):
                if not seen[v] and (ata[u][v] or ata[v][u]):
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        sub = [[ata[i][j] for j in comp] for i in comp]
        if all(all(v == 0 for v in row) for row in sub):
            continue
        res = perron_eigen(sub, field)
        if not res.exact:
            raise NotInFieldError("PF норм outside field")
        if best is None or res.value > best:
            best = res.value
    if best is None:
        raise QcaError("zero inclusion matrix")
    return best


def _min_path_projection(chain: ChainAlgebra, window: Window, v: int) -> AlgElement:
    pd = chain.paths(window.size)
    p = pd.blocks[v][0]
    return AlgElement.matrix_unit(chain, window, p, p)


def _column_units(chain: ChainAlgebra, window: Window, v: int) -> list[AlgElement]:
    pd = chain.paths(window.size)
    plist = pd.blocks[v]
    return [AlgElement.matrix_unit(chain, window, p, plist[0]) for p in plist]


def _detect_pure_shift(model, spec, l: int) -> int | None:
    """If the automorphism shifts every local generator by one fixed amount,
    return the shift; decided by exact equality of images."""
    probe = Window(0, min(3, model.chain.max_window - 1))
    gens = model.local_generators(probe)
    if not gens:
        return None
    shift = None
    for g in gens:
        img = act(spec, g).trim()
        matched = None
        for s in range(-l, l + 1):
            if img == g.shift(s):
                matched = s
                break
        if matched is None:
            return None
        if shift is None:
            shift = matched
        elif shift != matched:
            return None
    return shift


def qca_index(spec, model, max_window: int | None = None,
              stride: int | None = None) -> IndexReport:
    """Index by window stabilization; see the module docstring.

    model supplies the chain and its local generators; the evidence trail
    (one inclusion matrix per stage plus block data certificates) is
    returned alongside the exact value.
    """
    chain: ChainAlgebra = model.chain
    field = chain.field
    l = max(1, spread(spec))
    if stride is None:
        stride = stride_hint(spec)
    if max_window is None:
        max_window = chain.max_window

    shift = _detect_pure_shift(model, spec, l)
    if shift is not None:
        lam_exp = shift + l
        t = chain.t_matrix
        lam = _int_matrix_power(t, lam_exp)
        j = _pf_norm_squared(lam, field)
        val = (j.sqrt() / chain.d_x ** l)
        report = IndexReport(value=val, approx=val.to_float(), spread_bound=l,
                             stabilized=True, method="generator-shift", squared_norm=j)
        report.stages.append(StageEvidence(k=0, arena=Window(0, 0),
                                           lam=tuple(tuple(r) for r in lam),
                                           n_blocks=(), sub_dims=(),
                                           signature=("shift", shift),
                                           notes=f"all generators shifted by {shift}"))
        return report

    z0 = l + stride
    seed = Window(1 - l, z0)
    seed_gens = model.local_generators(seed)
    evidence: list[StageEvidence] = []
    prev_sig = None
    image_cache: dict = {}
    k = stride
    while True:
        nwin = Window(1, max(k, 2 if len(chain.ring.simples) > 1 else 1))
        k = nwin.b
        arena_right = k + l
        arena_left = 1 - l
        # images of the right-half generators and matrix-unit columns
        n_gens = []
        for g in model.local_generators(nwin):
            key = ("g", g.window, id(model))
            img = image_cache.get((g.window, "gen", _elkey(g)))
            if img is None:
                img = act(spec, g)
                image_cache[(g.window, "gen", _elkey(g))] = img
            n_gens.append(img)
        pd = chain.paths(nwin.size)
        blocks_n = [v for v in sorted(pd.blocks) if pd.blocks[v]]
        q_imgs = {}
        col_imgs = {}
        for v in blocks_n:
            q_imgs[v] = act(spec, _min_path_projection(chain, nwin, v))
            col_imgs[v] = [act(spec, c) for c in _column_units(chain, nwin, v)]
        # arena hull
        arena = seed
        for el in n_gens + list(q_imgs.values()):
            arena = arena.hull(el.window)
        for cols in col_imgs.values():
            for el in cols:
                arena = arena.hull(el.window)
        arena = arena.hull(Window(arena_left, arena_right))
        if arena.size > max_window:
            raise StabilizationError(
                f"no stabilization within window budget {max_window}", evidence)
        m_gens = [g.embed(arena) for g in seed_gens] + [g.embed(arena) for g in n_gens]
        m_gens.append(AlgElement.identity(chain, arena))
        q_ar = {v: q_imgs[v].embed(arena) for v in blocks_n}
        cols_ar = {v: [c.embed(arena) for c in col_imgs[v]] for v in blocks_n}
        try:
            stage = _ladder_stage(chain, arena, nwin, blocks_n, q_ar, cols_ar, m_gens, k)
        except TowerError as exc:
            raise StabilizationError(f"stage k={k} failed: {exc}", evidence) from exc
        evidence.append(stage)
        if prev_sig is not None and stage.signature == prev_sig:
            lam = [list(r) for r in stage.lam]
            j = _pf_norm_squared(lam, field)
            val = j.sqrt() / chain.d_x ** l
            return IndexReport(value=val, approx=val.to_float(), spread_bound=l,
                               stabilized=True, method="ladder", stages=evidence,
                               squared_norm=j)
        prev_sig = stage.signature
        k += stride


def _elkey(el: AlgElement):
    return (el.window, tuple(sorted((v, k, c.re, c.im, c.den)
                                    for v, m in el.blocks.items() for k, c in m.data.items())))


def _int_matrix_power(t: list[list[int]], e: int) -> list[list[int]]:
    n = len(t)
    out = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(e):
        out = [[sum(t[i][k] * out[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return out


def _ladder_stage(chain, arena, nwin, blocks_n, q_ar, cols_ar, m_gens, k) -> StageEvidence:
    """One stabilization stage: block data of M = <seed, images> and the
    inclusion matrix of the image algebra N inside it."""
    field = chain.field
    coords = Coords(chain, arena)
    # corner algebras q_i M q_i, in arena element form
    corner_bases: dict[int, list[AlgElement]] = {}
    for v in blocks_n:
        q = q_ar[v]
        left = RowSpace(coords.total, field)
        rs = RowSpace(coords.total, field)
        basis = []

        def push(el):
            if rs.insert(coords.flatten(el)):
                basis.append(el)
                return True
            return False

        # corner closure via the left module q*M: products q*w over generator
        # words span qM, and (q*w)*q spans the corner exactly
        left.insert(coords.flatten(q))
        push(q)
        frontier = [q]
        while frontier:
            nxt = []
            for f in frontier:
                for g in m_gens:
                    h = f @ g
                    if left.insert(coords.flatten(h)):
                        nxt.append(h)
                        push(h @ q)
            frontier = nxt
            if len(basis) > 600:
                raise TowerError("corner closure exceeded budget")
        corner_bases[v] = basis
    # lift corners to N' cap M and solve for the center of M
    lift_elems: list[AlgElement] = []
    lift_tags: list[tuple[int, int]] = []
    for v in blocks_n:
        cols = cols_ar[v]
        for bi, y in enumerate(corner_bases[v]):
            w = None
            for c in cols:
                term = c @ y @ c.adjoint()
                w = term if w is None else w + term
            lift_elems.append(w)
            lift_tags.append((v, bi))
    rows = []
    ncols = len(lift_elems)
    for g in m_gens:
        comms = [coords.flatten(w @ g - g @ w) for w in lift_elems]
        keys = sorted(set().union(*[c.keys() for c in comms])) if comms else []
        for key in keys:
            rows.append([c.get(key, field.zero) for c in comms])
    sols = nullspace(rows, field) if rows else \
        [[field.one if i == t else field.zero for i in range(ncols)] for t in range(ncols)]
    center_elems = []
    for s in sols:
        el = None
        for c, w in zip(s, lift_elems):
            if not c.is_zero():
                term = w.scale(c)
                el = term if el is None else el + term
        if el is not None and not el.is_zero():
            center_elems.append(el)
    if not center_elems:
        raise TowerError("empty center")
    desc = _split_center_blocks(chain, arena, center_elems, corner_bases, q_ar, blocks_n)
    zs, taus, ns = desc
    # inclusion matrix: ranks of the pushed minimal projections
    lam = []
    for z, tau in zip(zs, taus):
        row = []
        for v in blocks_n:
            val = (q_ar[v] @ z).trace() / tau
            row.append(_as_int(val))
        lam.append(row)
    sub_dims = tuple(len(chain.paths(nwin.size).blocks[v]) for v in blocks_n)
    for row, nj in zip(lam, ns):
        if sum(r * d for r, d in zip(row, sub_dims)) != nj:
            raise TowerError("dimension equation failed at a ladder stage")
    for i, v in enumerate(blocks_n):
        lhs = chain.trace_weight(v, nwin.size)
        rhs = field.zero
        for row, tau in zip(lam, taus):
            rhs = rhs + field.scalar(row[i]) * tau
        if lhs != rhs:
            raise TowerError("trace equation failed at a ladder stage")
    # canonical ordering of M blocks: by trace ratio to the smallest tau
    order = sorted(range(len(zs)), key=lambda j: _ratio_key(taus[j], taus, field))
    lam_sorted = tuple(tuple(lam[j]) for j in order)
    sig = (tuple(_ratio_key(taus[j], taus, field) for j in order), lam_sorted,
           tuple(blocks_n))
    return StageEvidence(k=k, arena=arena, lam=lam_sorted,
                         n_blocks=tuple(ns[j] for j in order), sub_dims=sub_dims,
                         signature=sig)


def _ratio_key(tau, taus, field):
    tmin = taus[0]
    for t in taus[1:]:
        if t < tmin:
            tmin = t
    r = tau / tmin
    return _scalar_key(r)


def _split_center_blocks(chain, arena, center_elems, corner_bases, q_ar, blocks_n):
    """Minimal central idempotents of M plus per-block minimal traces and dims."""
    field = chain.field
    labels = []
    coords = Coords(chain, arena)
    # unit algebra over flattened matrix-unit labels of the arena
    pd = chain.paths(arena.size)

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
        return chain.trace_weight(v, arena.size) if i == j else field.zero

    def materialize(l):
        v, i, j = l
        el = AlgElement.zero(chain, arena)
        el.blocks[v].set(i, j, field.one)
        return el

    for v in sorted(pd.blocks):
        m = len(pd.blocks[v])
        for i in range(m):
            for j in range(m):
                labels.append((v, i, j))
    alg = UnitAlgebra(field, labels, mult, star, tr, materialize)

    def to_units(el: AlgElement) -> dict:
        out = {}
        for v, mat in el.blocks.items():
            for (i, j), c in mat.data.items():
                out[(v, i, j)] = c
        return out

    from .towers import SpanInUnits, split_unit_into_minimal_central
    vecs = [to_units(el) for el in center_elems]
    span = SpanInUnits(alg, vecs)
    unit_vec = to_units(AlgElement.identity(chain, arena))
    if not span.contains(unit_vec):
        raise TowerError("center does not contain the unit")
    idems = split_unit_into_minimal_central(alg, span, unit_vec)
    zs = [alg.materialize(z) for z in idems]
    taus = []
    ns = []
    for z in zs:
        tau = _min_trace_under(chain, arena, z, corner_bases, q_ar, blocks_n, alg, to_units)
        taus.append(tau)
        nj = _as_int(z.trace() / tau)
        ns.append(nj)
    return zs, taus, ns


def _min_trace_under(chain, arena, z, corner_bases, q_ar, blocks_n, alg, to_units):
    """Trace of a minimal M-projection under the central idempotent z,
    extracted from a corner q_i M q_i with nonzero overlap."""
    field = chain.field
    for v in blocks_n:
        overlap = (q_ar[v] @ z)
        if overlap.is_zero():
            continue
        sub = []
        rs = RowSpace(len(alg.labels), field)
        for b in corner_bases[v]:
            el = (z @ b) @ z
            vec = to_units(el)
            if rs.insert(alg.to_vec(vec)):
                sub.append(vec)
        if not sub:
            continue
        # unit of this corner is z q_i (a projection)
        zq = to_units(overlap)
        mp = _minimal_projection_units_seeded(alg, zq, sub, field)
        return alg.trace(mp)
    raise TowerError("no corner overlaps the central idempotent")


def _minimal_projection_units_seeded(alg, unit_vec, corner, field):
    from .towers import _spectral_idempotents
    p, sub = unit_vec, corner
    while len(sub) > 1:
        done = False
        for cand in sub:
            st = alg.star(cand)
            for s in (alg.add(cand, st), alg.scale(alg.sub(cand, st), field.scalar(0, 1))):
                idems = _spectral_idempotents(alg, s, p)
                if idems:
                    q = idems[0]
                    rs = RowSpace(len(alg.labels), field)
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
