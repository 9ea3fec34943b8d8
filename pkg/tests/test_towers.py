import random

import pytest

from fusionchain.algebra import AlgElement, Window, jones_projection
from fusionchain.towers import (
    NotEquivalentError,
    algebra_closure,
    block_ranks,
    inclusion_matrix,
    interval_commutant,
    mvn_equivalence,
    relative_commutant,
    window_subalgebra,
    window_tower_triple,
)


def phi_of(chain):
    g = chain.field.gen()
    return g * g


def test_window_subalgebra_description(fib):
    amb = Window(0, 3)
    desc = window_subalgebra(fib, Window(0, 2), amb)
    assert desc.dimension_vector == (1, 2)
    total = None
    for b in desc.blocks:
        assert (b.central_proj @ b.central_proj) == b.central_proj
        total = b.central_proj if total is None else total + b.central_proj
    assert total == AlgElement.identity(fib, amb)


def test_inclusion_matrix_single_step(fib):
    amb = Window(0, 3)
    sub = window_subalgebra(fib, Window(0, 2), amb)
    big = window_subalgebra(fib, Window(0, 3), amb)
    lam = inclusion_matrix(sub, big)
    # blocks sorted by (dim, trace key); sub dims (1,2), amb dims (1,3)... check via dims
    assert sorted(sub.dimension_vector) == [1, 2]
    # the one-step inclusion matrix is the fusion matrix [[0,1],[1,1]] up to labeling
    flat = sorted(v for row in lam for v in row)
    assert flat == [0, 1, 1, 1]


def test_inclusion_matrix_two_step(fib):
    amb = Window(0, 4)
    sub = window_subalgebra(fib, Window(0, 2), amb)
    big = window_subalgebra(fib, Window(0, 4), amb)
    lam = inclusion_matrix(sub, big)
    flat = sorted(v for row in lam for v in row)
    assert flat == [1, 1, 1, 2]


def test_inclusion_matrix_qudit(qudit2):
    # M_2 x 1 inside M_4: multiplicity 2
    amb = Window(0, 1)
    sub = window_subalgebra(qudit2, Window(0, 0), amb)
    big = window_subalgebra(qudit2, Window(0, 1), amb)
    assert inclusion_matrix(sub, big) == [[2]]


def test_relative_commutant_of_unit(fib):
    amb = Window(0, 2)
    one = AlgElement.identity(fib, amb)
    desc = relative_commutant([one], amb)
    assert desc.total_dim() == 5  # full End(tau^3)
    assert tuple(sorted(desc.dimension_vector)) == (1, 2)


def test_relative_commutant_small_direct(fib):
    # commutant of A_[0,1] inside A_[0,2]: blocks split along e-spectrum
    amb = Window(0, 2)
    gens = [jones_projection(fib, 1, amb)]
    desc = relative_commutant(gens, amb)
    # commutant of span{1, e1} in End(tau^3) (dims 1,2): e1 has block ranks (1,1)
    assert desc.total_dim() == 3


def test_interval_commutant_matches_tail(fib):
    # the compactness identification: dimension vector m(z - x)
    expect = {1: (1,), 2: (1, 1), 3: (1, 2), 4: (2, 3)}
    for x in (1, 2):
        for z in range(x + 1, x + 4):
            desc = interval_commutant(fib, x, z)
            got = tuple(sorted(d for d in desc.dimension_vector if d))
            assert got == expect[z - x], (x, z, got)


def test_interval_commutant_margin_stability(fib):
    a = interval_commutant(fib, 1, 3, margin=2)
    b = interval_commutant(fib, 1, 3, margin=3)
    assert tuple(sorted(a.dimension_vector)) == tuple(sorted(b.dimension_vector))


def test_algebra_closure_dimension(fib):
    # e-generators generate the full window algebra on the Fibonacci chain
    w = Window(0, 3)
    gens = [jones_projection(fib, i, w) for i in (1, 2, 3)]
    basis = algebra_closure(gens, w)
    assert len(basis) == 2 ** 2 + 3 ** 2  # End(tau^4): m(4) = (2, 3)


def test_mvn_equivalence_identity(fib):
    w = Window(0, 3)
    e = jones_projection(fib, 2, w)
    u = mvn_equivalence(e, e)
    assert u @ e @ u.adjoint() == e


def test_mvn_equivalence_distinct_projections(fib):
    w = Window(0, 3)
    pd = fib.paths(4)
    # two rank-(1,1)-style diagonal projections with equal traces
    p = AlgElement.zero(fib, w)
    q = AlgElement.zero(fib, w)
    p.blocks[0].set(0, 0, fib.field.one)
    p.blocks[1].set(0, 0, fib.field.one)
    q.blocks[0].set(1, 1, fib.field.one)
    q.blocks[1].set(2, 2, fib.field.one)
    u = mvn_equivalence(p, q)
    assert u @ p @ u.adjoint() == q
    assert u.adjoint() @ u == AlgElement.identity(fib, w)


def test_mvn_refusal_with_witness(fib):
    w = Window(0, 3)
    p = AlgElement.zero(fib, w)
    q = AlgElement.zero(fib, w)
    p.blocks[0].set(0, 0, fib.field.one)
    q.blocks[1].set(0, 0, fib.field.one)
    with pytest.raises(NotEquivalentError) as exc:
        mvn_equivalence(p, q)
    assert exc.value.ranks_p != exc.value.ranks_q


def test_mvn_conjugated_jones(fib):
    # a unitarily moved copy of e has the same trace and gets paired back
    w = Window(0, 3)
    e = jones_projection(fib, 2, w)
    f = jones_projection(fib, 3, w)
    assert e.trace() == f.trace()
    u = mvn_equivalence(e, f)
    assert u @ e @ u.adjoint() == f


def test_tower_triple_projection_is_jones(fib):
    # on the plain window tower the constructed projection is the next
    # canonical two-site projection
    base = Window(0, 1)
    triple = window_tower_triple(fib, base)
    f = triple.markov_projection()
    amb = Window(0, 3)
    assert f == jones_projection(fib, 3, amb)
    assert f @ f == f and f.adjoint() == f
    phi = phi_of(fib)
    ex = f.cond_expect(Window(0, 2))
    assert ex == AlgElement.identity(fib, amb).scale(fib.field.one / (phi * phi))


def test_tower_triple_fib_levels(fib):
    phi = phi_of(fib)
    lam = fib.field.one / (phi * phi)
    for n in range(2, 5):
        base = Window(0, n - 1)
        f = window_tower_triple(fib, base).markov_projection()
        assert f @ f == f and f.adjoint() == f
        assert f.cond_expect(Window(0, n)) == \
            AlgElement.identity(fib, Window(0, n + 1)).scale(lam)


def test_tower_triple_qudit(qudit2, qudit3):
    for chain in (qudit2, qudit3):
        d = chain.d_x
        base = Window(0, 0)
        f = window_tower_triple(chain, base).markov_projection()
        assert f @ f == f and f.adjoint() == f
        lam = chain.field.one / (d * d)
        assert f.cond_expect(Window(0, 1)) == \
            AlgElement.identity(chain, Window(0, 2)).scale(lam)


def test_block_ranks(fib):
    w = Window(0, 3)
    e = jones_projection(fib, 2, w)
    ranks = block_ranks(e)
    # e has rank equal to m(2) pattern pushed two levels: (1, 1) at size 2 -> ranks (1,1)?
    assert sum(ranks.values()) >= 1
    assert all(v >= 0 for v in ranks.values())
