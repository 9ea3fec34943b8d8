"""Concrete chains and their distinguished automorphisms.

Three built-in models: the golden chain generated by the two-site
projections, the qudit chain with its coarse-grained partial shifts, and
the spin-flip-invariant chain with the order/disorder exchange map.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .algebra import (
    AlgElement,
    ChainAlgebra,
    TableInsertion,
    Window,
    fib_insertion_table,
    jones_projection,
)
from .exactnum import ExactScalar, fourth_root_two_field, rational_field, sqrt_phi_field
from .fusion import ChainSpec, abelian_group_ring, fib_ring, object_vector, trivial_ring
from .qca import GeneralizedTranslation, QcaError


class ModelError(Exception):
    pass


@dataclass
class ModelChain:
    """A chain plus the generating family its automorphisms are defined on."""

    chain: ChainAlgebra
    name: str
    generator_fn: Callable[[Window], list[AlgElement]]

    def local_generators(self, window: Window) -> list[AlgElement]:
        return self.generator_fn(window)

    def generated_dimension_check(self, window: Window) -> bool:
        """Verify the generators generate the full window algebra."""
        from .towers import algebra_closure
        gens = self.local_generators(window)
        if not gens:
            return window.size == 1 and sum(
                m * m for m in self.chain.block_dims(1).values()) == 1
        basis = algebra_closure(gens, window)
        want = sum(m * m for m in self.chain.block_dims(window.size).values())
        return len(basis) == want


# -- the golden chain ----------------------------------------------------------

def fib_chain() -> ModelChain:
    field = sqrt_phi_field()
    spec = ChainSpec(fib_ring(), object_vector(fib_ring(), "tau"), field, name="fib")
    chain = ChainAlgebra(spec, insertion=TableInsertion(fib_insertion_table(field)))

    def gens(window: Window) -> list[AlgElement]:
        return [jones_projection(chain, i, window) for i in range(window.a + 1, window.b + 1)]

    return ModelChain(chain=chain, name="fib", generator_fn=gens)


# -- qudit chains and coarse-grained shifts -------------------------------------

def qudit_chain(d: int) -> ModelChain:
    if d < 2:
        raise ModelError("qudit dimension must be at least 2")
    spec = ChainSpec(trivial_ring(), (d,), rational_field(), name=f"qudit:{d}")
    chain = ChainAlgebra(spec, max_basis=400_000)

    def site_unit(site: int, i: int, j: int) -> AlgElement:
        w = Window(site, site)
        pd = chain.paths(1)
        plist = pd.blocks[0]
        return AlgElement.matrix_unit(chain, w, plist[i], plist[j])

    def gens(window: Window) -> list[AlgElement]:
        out = []
        for site in range(window.a, window.b + 1):
            for i in range(d - 1):
                out.append(site_unit(site, i, i + 1).embed(window))
            out.append(site_unit(site, 0, 0).embed(window))
        return out

    model = ModelChain(chain=chain, name=f"qudit:{d}", generator_fn=gens)
    model.site_unit = site_unit
    return model


class PartialShiftMapper:
    """The coarse-grained swap automorphism of a qudit chain built from the
    one-site factorization d = p*q: the p-part hops one site to the right."""

    def __init__(self, chain: ChainAlgebra, p: int, q: int):
        self.chain = chain
        self.p = p
        self.q = q
        self.d = p * q
        pd = chain.paths(1)
        self.letters = pd.blocks[0]  # length-1 paths, index = letter

    def _apply(self, x: AlgElement, inverse: bool) -> AlgElement:
        ch = self.chain
        p, q = self.p, self.q
        win = x.window
        n = win.size
        pd = ch.paths(n)
        out_win = Window(win.a, win.b + 1) if not inverse else Window(win.a - 1, win.b)
        out = AlgElement.zero(ch, out_win)
        big = ch.paths(n + 1)
        letter_of = {}
        for idx, path in enumerate(self.letters):
            letter_of[path[0]] = idx

        def split(eid: int) -> tuple[int, int]:
            l = letter_of[eid]
            return divmod(l, q)

        def fuse(r: int, s: int) -> int:
            return self.letters[r * q + s][0]

        blk_in = x.blocks[0]
        plist = pd.blocks[0]
        tgt = out.blocks[0]
        for (i, j), c in blk_in.data.items():
            pi, pj = plist[i], plist[j]
            rs_i = [split(e) for e in pi]
            rs_j = [split(e) for e in pj]
            if not inverse:
                # new letter at site k is (r_(k-1), s_k); boundary parts summed
                for rho in range(p):
                    for sig in range(q):
                        left = [fuse(rho, rs_i[0][1])]
                        right = [fuse(rho, rs_j[0][1])]
                        for k in range(1, n):
                            left.append(fuse(rs_i[k - 1][0], rs_i[k][1]))
                            right.append(fuse(rs_j[k - 1][0], rs_j[k][1]))
                        left.append(fuse(rs_i[n - 1][0], sig))
                        right.append(fuse(rs_j[n - 1][0], sig))
                        _, bi = big.index[tuple(left)]
                        _, bj = big.index[tuple(right)]
                        tgt.add_to(bi, bj, c)
            else:
                # new letter at site k is (r_(k+1), s_k); boundary parts summed
                for rho in range(p):
                    for sig in range(q):
                        left = [fuse(rs_i[0][0], sig)]
                        right = [fuse(rs_j[0][0], sig)]
                        for k in range(1, n):
                            left.append(fuse(rs_i[k][0], rs_i[k - 1][1]))
                            right.append(fuse(rs_j[k][0], rs_j[k - 1][1]))
                        left.append(fuse(rho, rs_i[n - 1][1]))
                        right.append(fuse(rho, rs_j[n - 1][1]))
                        _, bi = big.index[tuple(left)]
                        _, bj = big.index[tuple(right)]
                        tgt.add_to(bi, bj, c)
        return out

    def apply(self, x: AlgElement) -> AlgElement:
        return self._apply(x, inverse=False)

    def inverse_apply(self, x: AlgElement) -> AlgElement:
        return self._apply(x, inverse=True)


def gnvw_translation(p: int, q: int) -> tuple[ModelChain, GeneralizedTranslation]:
    if p < 1 or q < 1 or p * q < 2:
        raise ModelError("need p, q >= 1 with p*q >= 2")
    model = qudit_chain(p * q)
    f = model.chain.field
    mapper = PartialShiftMapper(model.chain, p, q)
    spec = GeneralizedTranslation(cell=1, dim_y=f.scalar(p), dim_z=f.scalar(q),
                                  mapper=mapper, name=f"gnvw:{p},{q}")
    return model, spec


# -- the invariant chain and the order/disorder exchange ------------------------

def _kw_chain() -> ChainAlgebra:
    ring = abelian_group_ring((2,))
    x = object_vector(ring, {"e": 1, "g1": 1})
    spec = ChainSpec(ring, x, fourth_root_two_field(), name="ising-kw")
    return ChainAlgebra(spec, max_basis=400_000)


def _kw_site_generator(chain: ChainAlgebra, site: int) -> AlgElement:
    """a_site: the character diagonal on the site's edge label, squaring to 1."""
    w = Window(site, site)
    pd = chain.paths(1)
    el = AlgElement.zero(chain, w)
    for p in pd.blocks:
        for path in pd.blocks[p]:
            e = chain.edges[path[0]]
            sign = chain.field.one if e.label[0] == 0 else -chain.field.one
            v, i = pd.index[path]
            el.blocks[v].set(i, i, sign)
    return el


def _kw_bond_generator(chain: ChainAlgebra, site: int) -> AlgElement:
    """b_site on [site, site+1]: multiplies both edge labels by the flip."""
    w = Window(site, site + 1)
    pd = chain.paths(2)
    el = AlgElement.zero(chain, w)
    ring = chain.ring
    flip = 1  # index of the nontrivial group element label component
    for v in pd.blocks:
        for path in pd.blocks[v]:
            e1, e2 = chain.edges[path[0]], chain.edges[path[1]]
            n1 = chain._edge_lookup[(e1.src, _mul_z2(e1.dst), (_flip_comp(e1.label[0]), 0, 0))]
            n2 = chain._edge_lookup[(_mul_z2(e2.src), e2.dst, (_flip_comp(e2.label[0]), 0, 0))]
            v2, i2 = pd.index[(n1.eid, n2.eid)]
            v1, i1 = pd.index[path]
            el.blocks[v1].set(i2, i1, chain.field.one)
    return el


def _mul_z2(v: int) -> int:
    return 1 - v


def _flip_comp(s: int) -> int:
    return 1 - s


class KwMapper:
    """Generator exchange a_i -> b_i, b_i -> a_(i+1), extended multiplicatively.

    Elements are expanded over the monomial basis (products of the a and b
    generators), which is trace-orthonormal; each monomial maps to the product
    of its generator images.
    """

    def __init__(self, chain: ChainAlgebra):
        self.chain = chain
        self._monomials: dict[Window, list[tuple[tuple[int, ...], tuple[int, ...], AlgElement]]] = {}

    def monomials(self, window: Window):
        cached = self._monomials.get(window)
        if cached is not None:
            return cached
        ch = self.chain
        sites = list(range(window.a, window.b + 1))
        bonds = list(range(window.a, window.b))
        out = []
        from itertools import product as iproduct
        a_els = {i: _kw_site_generator(ch, i).embed(window) for i in sites}
        b_els = {i: _kw_bond_generator(ch, i).embed(window) for i in bonds}
        for eps in iproduct((0, 1), repeat=len(sites)):
            for delt in iproduct((0, 1), repeat=len(bonds)):
                m = AlgElement.identity(ch, window)
                for i, e in zip(sites, eps):
                    if e:
                        m = m @ a_els[i]
                for i, dl in zip(bonds, delt):
                    if dl:
                        m = m @ b_els[i]
                out.append((eps, delt, m))
        self._monomials[window] = out
        return out

    def _map_monomial(self, window: Window, eps, delt, inverse: bool) -> AlgElement:
        ch = self.chain
        sites = list(range(window.a, window.b + 1))
        bonds = list(range(window.a, window.b))
        if not inverse:
            tgt = Window(window.a, window.b + 1)
            factors = []
            for i, e in zip(sites, eps):
                if e:
                    factors.append(_kw_bond_generator(ch, i))
            for i, dl in zip(bonds, delt):
                if dl:
                    factors.append(_kw_site_generator(ch, i + 1))
        else:
            tgt = Window(window.a - 1, window.b)
            factors = []
            for i, e in zip(sites, eps):
                if e:
                    factors.append(_kw_bond_generator(ch, i - 1))
            for i, dl in zip(bonds, delt):
                if dl:
                    factors.append(_kw_site_generator(ch, i))
        out = AlgElement.identity(ch, tgt)
        for fct in factors:
            out = out @ fct.embed(tgt)
        return out

    def _apply(self, x: AlgElement, inverse: bool) -> AlgElement:
        win = x.window
        out = None
        for eps, delt, m in self.monomials(win):
            coeff = (m.adjoint() @ x).trace()
            if coeff.is_zero():
                continue
            img = self._map_monomial(win, eps, delt, inverse).scale(coeff)
            out = img if out is None else out + img
        if out is None:
            tgt = Window(win.a, win.b + 1) if not inverse else Window(win.a - 1, win.b)
            return AlgElement.zero(self.chain, tgt)
        return out

    def apply(self, x: AlgElement) -> AlgElement:
        return self._apply(x, inverse=False)

    def inverse_apply(self, x: AlgElement) -> AlgElement:
        return self._apply(x, inverse=True)

    def relation_certificate(self) -> None:
        """Exact check that the generator map preserves the defining relations."""
        ch = self.chain
        w = Window(0, 3)
        a = {i: _kw_site_generator(ch, i).embed(w) for i in range(0, 4)}
        b = {i: _kw_bond_generator(ch, i).embed(w) for i in range(0, 3)}
        one = AlgElement.identity(ch, w)
        for i in range(4):
            if not (a[i] @ a[i] == one and a[i].adjoint() == a[i]):
                raise ModelError("a generator fails involution relations")
        for i in range(3):
            if not (b[i] @ b[i] == one and b[i].adjoint() == b[i]):
                raise ModelError("b generator fails involution relations")
        for i in range(4):
            for j in range(3):
                lhs = a[i] @ b[j]
                rhs = b[j] @ a[i]
                if i in (j, j + 1):
                    if not (lhs == -rhs):
                        raise ModelError(f"a_{i}, b_{j} must anticommute")
                else:
                    if not (lhs == rhs):
                        raise ModelError(f"a_{i}, b_{j} must commute")
        for i in range(3):
            for j in range(3):
                if not (b[i] @ b[j] == b[j] @ b[i]):
                    raise ModelError("b generators must commute")
        # the image family satisfies the same relations, shifted by the map
        w2 = Window(0, 4)
        img_a = {i: _kw_bond_generator(ch, i).embed(w2) for i in range(0, 4)}
        img_b = {i: _kw_site_generator(ch, i + 1).embed(w2) for i in range(0, 3)}
        for i in range(4):
            for j in range(3):
                lhs = img_a[i] @ img_b[j]
                rhs = img_b[j] @ img_a[i]
                if i in (j, j + 1):
                    if not (lhs == -rhs):
                        raise ModelError("image relations fail (anticommute)")
                else:
                    if not (lhs == rhs):
                        raise ModelError("image relations fail (commute)")


def ising_kw() -> tuple[ModelChain, GeneralizedTranslation]:
    chain = _kw_chain()
    f = chain.field
    mapper = KwMapper(chain)
    mapper.relation_certificate()

    def gens(window: Window) -> list[AlgElement]:
        out = [_kw_site_generator(chain, i).embed(window)
               for i in range(window.a, window.b + 1)]
        out += [_kw_bond_generator(chain, i).embed(window)
                for i in range(window.a, window.b)]
        return out

    model = ModelChain(chain=chain, name="ising-kw", generator_fn=gens)
    g = f.gen()
    root2 = g * g
    spec = GeneralizedTranslation(cell=1, dim_y=root2, dim_z=root2, mapper=mapper,
                                  name="ising-kw")
    return model, spec
