import random

import pytest

from fusionchain.algebra import AlgElement, Window, jones_projection
from fusionchain._linalg import SparseMat


def phi_of(chain):
    g = chain.field.gen()
    return g * g


def random_element(chain, window, rng, complex_parts=False):
    pd = chain.paths(window.size)
    el = AlgElement.zero(chain, window)
    for v, plist in pd.blocks.items():
        for _ in range(min(4, len(plist) ** 2)):
            i, j = rng.randrange(len(plist)), rng.randrange(len(plist))
            re = rng.randint(-2, 2)
            im = rng.randint(-1, 1) if complex_parts else 0
            el.blocks[v].add_to(i, j, chain.field.scalar(re, im))
    return el


def test_block_dims_fib(fib):
    assert fib.block_dims(2) == {0: 1, 1: 1}
    assert fib.block_dims(3) == {0: 1, 1: 2}
    assert fib.block_dims(6) == {0: 5, 1: 8}


def test_trace_of_identity(fib, qudit2, kw_chain):
    for chain, n in ((fib, 4), (qudit2, 3), (kw_chain, 3)):
        w = Window(0, n - 1)
        assert AlgElement.identity(chain, w).trace() == chain.field.one


def test_matrix_unit_product(fib):
    w = Window(0, 2)
    pd = fib.paths(3)
    p, q, r = pd.blocks[1][0], pd.blocks[1][1], pd.blocks[1][0]
    epq = AlgElement.matrix_unit(fib, w, p, q)
    eqr = AlgElement.matrix_unit(fib, w, q, r)
    assert epq @ eqr == AlgElement.matrix_unit(fib, w, p, r)
    ident = AlgElement.identity(fib, w)
    assert ident @ epq == epq


def test_star_antihomomorphism(fib):
    rng = random.Random(3)
    w = Window(1, 3)
    x = random_element(fib, w, rng, complex_parts=True)
    y = random_element(fib, w, rng, complex_parts=True)
    assert (x @ y).adjoint() == y.adjoint() @ x.adjoint()


def test_jones_projection_basics(fib, qudit2, qudit3, kw_chain):
    for chain in (fib, qudit2, qudit3, kw_chain):
        e = jones_projection(chain, 1)
        assert e @ e == e
        assert e.adjoint() == e
        inv_d2 = chain.field.one / (chain.d_x * chain.d_x)
        assert e.trace() == inv_d2


def test_jones_projection_qudit_pattern(qudit2):
    e = jones_projection(qudit2, 1)
    pd = qudit2.paths(2)
    half = qudit2.field.scalar(1) / 2
    block = e.blocks[0]
    # (1/d) sum_{jk} |jj><kk| in letter coordinates
    diag_paths = [i for i, p in enumerate(pd.blocks[0])
                  if qudit2.edges[p[0]].label == qudit2.edges[p[1]].label]
    for i in diag_paths:
        for j in diag_paths:
            assert block.get(i, j, qudit2.field) == half


def test_embedding_unital_and_homomorphic(fib, kw_chain):
    rng = random.Random(5)
    for chain in (fib, kw_chain):
        w = Window(0, 1)
        big = Window(-2, 2)
        one = AlgElement.identity(chain, w)
        assert one.embed(big) == AlgElement.identity(chain, big)
        x = random_element(chain, w, rng)
        y = random_element(chain, w, rng)
        assert (x @ y).embed(big) == x.embed(big) @ y.embed(big)
        assert x.adjoint().embed(big) == x.embed(big).adjoint()
        assert x.embed(big).trace() == x.trace()


def test_embedding_composition_order(fib):
    rng = random.Random(11)
    x = random_element(fib, Window(1, 2), rng)
    via_left = x.insert_left_one().append_right_one()
    via_right = x.append_right_one().insert_left_one()
    assert via_left == via_right
    assert x.embed(Window(-1, 4)) == x.embed(Window(0, 3)).embed(Window(-1, 4))


def test_native_jones_matches_embedded(fib, qudit2, kw_chain):
    for chain in (fib, qudit2, kw_chain):
        local = jones_projection(chain, 2)
        big = Window(0, 3)
        assert local.embed(big) == jones_projection(chain, 2, big)
        assert local.shift(1).embed(big) == jones_projection(chain, 3, big)


def test_temperley_lieb_relations(fib, qudit2, kw_chain):
    for chain in (fib, qudit2, kw_chain):
        w = Window(0, 3)
        e1 = jones_projection(chain, 1, w)
        e2 = jones_projection(chain, 2, w)
        e3 = jones_projection(chain, 3, w)
        inv_d2 = chain.field.one / (chain.d_x * chain.d_x)
        assert e1 @ e2 @ e1 == e1.scale(inv_d2)
        assert e2 @ e1 @ e2 == e2.scale(inv_d2)
        assert e1 @ e3 == e3 @ e1


def test_markov_property(fib):
    rng = random.Random(7)
    w = Window(0, 2)
    big = Window(0, 3)
    x = random_element(fib, w, rng)
    e3 = jones_projection(fib, 3, big)
    inv_d2 = fib.field.one / (fib.d_x * fib.d_x)
    assert (x.embed(big) @ e3).trace() == inv_d2 * x.trace()


def test_trace_of_jones_embedded_unchanged(fib):
    e = jones_projection(fib, 2, Window(1, 2))
    phi = phi_of(fib)
    val = fib.field.one / (phi * phi)
    assert e.trace() == val
    assert e.embed(Window(1, 3)).trace() == val
    assert e.embed(Window(-1, 4)).trace() == val


def test_cond_expect_right(fib):
    # E_{A_b}(e_{b+1}) = (1/phi^2) 1
    big = Window(0, 3)
    e3 = jones_projection(fib, 3, big)
    ex = e3.cond_expect(Window(0, 2))
    phi = phi_of(fib)
    assert ex == AlgElement.identity(fib, big).scale(fib.field.one / (phi * phi))


def test_cond_expect_properties(fib):
    rng = random.Random(13)
    big = Window(0, 3)
    sub = Window(1, 2)
    x = random_element(fib, big, rng, complex_parts=True)
    ex = x.cond_expect(sub)
    assert ex.cond_expect(sub) == ex
    assert ex.trace() == x.trace()
    # bimodule property over the subalgebra
    a = random_element(fib, sub, rng).embed(big)
    b = random_element(fib, sub, rng).embed(big)
    assert (a @ x @ b).cond_expect(sub) == a @ ex @ b
    # fixed points
    y = random_element(fib, sub, rng).embed(big)
    assert y.cond_expect(sub) == y


def test_cond_expect_gram_oracle(fib):
    """E equals the trace-orthogonal projection onto the embedded subalgebra."""
    rng = random.Random(17)
    big = Window(0, 3)
    sub = Window(1, 3)
    pd = fib.paths(sub.size)
    basis = []
    for v, plist in pd.blocks.items():
        for p in plist:
            for q in plist:
                basis.append(AlgElement.matrix_unit(fib, sub, p, q).embed(big))
    x = random_element(fib, big, rng)
    ex = x.cond_expect(sub)
    # oracle: solve gram system sum_j c_j <b_i, b_j> = <b_i, x>
    f = fib.field
    gram = [[(bi.adjoint() @ bj).trace() for bj in basis] for bi in basis]
    rhs = [(bi.adjoint() @ x).trace() for bi in basis]
    from fusionchain._linalg import rref
    rows = [gram[i] + [rhs[i]] for i in range(len(basis))]
    red, piv = rref(rows, f)
    coeffs = [f.zero] * len(basis)
    for r, c in enumerate(piv):
        coeffs[c] = red[r][-1]
    oracle = AlgElement.zero(fib, big)
    for cj, bj in zip(coeffs, basis):
        oracle = oracle + bj.scale(cj)
    assert ex == oracle


def test_trim_roundtrip(fib, kw_chain):
    rng = random.Random(19)
    for chain in (fib, kw_chain):
        x = random_element(chain, Window(0, 1), rng)
        big = x.embed(Window(-2, 3))
        assert big.trim() == x


def test_debug_table_format(fib):
    e = jones_projection(fib, 1)
    table = e.debug_table()
    for line in table.splitlines():
        assert line.count(";") == 2
