from fractions import Fraction

import pytest

from fusionchain.exactnum import (
    NotInFieldError,
    NotIrreducibleError,
    fourth_root_two_field,
    perron_eigen,
    rational_field,
    sqrt2_field,
    sqrt_phi_field,
    sturm_root_count,
)


def phi_of(f):
    g = f.gen()
    return g * g


def test_defining_relation_phi():
    f = sqrt_phi_field()
    phi = phi_of(f)
    assert phi * phi == phi + 1


def test_sign_against_rational():
    # sign(phi - 8/5) decided by interval refinement: phi = 1.618..., 8/5 = 1.6
    f = sqrt_phi_field()
    phi = phi_of(f)
    assert (phi - Fraction(8, 5)).sign() == 1
    assert (phi - Fraction(13, 8)).sign() == -1
    assert (phi - phi).sign() == 0


def test_inverse_of_phi():
    f = sqrt_phi_field()
    phi = phi_of(f)
    assert 1 / phi == phi - 1


def test_field_axioms_random():
    import random

    rng = random.Random(7)
    f = sqrt_phi_field()
    elts = [f.from_coeffs([rng.randint(-3, 3) for _ in range(4)],
                          [rng.randint(-2, 2) for _ in range(4)]) for _ in range(6)]
    a, b, c = elts[0], elts[1], elts[2]
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert a.conjugate().conjugate() == a
    for e in elts:
        if not e.is_zero():
            assert e * e.inverse() == f.one


def test_sqrt_cases():
    f = sqrt_phi_field()
    g = f.gen()
    phi = g * g
    assert (phi * phi).sqrt() == phi
    assert f.scalar(Fraction(9, 4)).sqrt() == f.scalar(Fraction(3, 2))
    # sqrt(phi^3) = phi * g since g^2 = phi
    assert (phi ** 3).sqrt() == phi * g
    assert phi.sqrt() == g
    with pytest.raises(NotInFieldError):
        f.scalar(2).sqrt()


def test_sqrt_fourth_root_two():
    f = fourth_root_two_field()
    g = f.gen()
    r2 = g * g
    assert r2 * r2 == f.scalar(2)
    assert f.scalar(2).sqrt() == r2
    assert r2.sqrt() == g
    assert (f.scalar(8)).sqrt() == 2 * r2


def test_sqrt_quadratic_field():
    f = sqrt2_field()
    r2 = f.gen()
    # sqrt(3 + 2*sqrt2) = 1 + sqrt2
    x = f.scalar(3) + 2 * r2
    assert x.sqrt() == f.one + r2


def test_sturm():
    # x^2 - 2 has one root in (1, 2), none in (2, 3)
    assert sturm_root_count((-2, 0, 1), Fraction(1), Fraction(2)) == 1
    assert sturm_root_count((-2, 0, 1), Fraction(2), Fraction(3)) == 0


def test_pf_fibonacci_matrix():
    f = sqrt_phi_field()
    phi = phi_of(f)
    # normalization: pair with m(2) = (1, 1)
    res = perron_eigen([[0, 1], [1, 1]], f, norm_vector=[1, 1])
    assert res.exact
    assert res.value == phi
    assert res.vector[0] == 1 / (phi * phi)
    assert res.vector[1] == 1 / phi
    m = [[0, 1], [1, 1]]
    for i in range(2):
        lhs = sum((f.scalar(m[i][j]) * res.vector[j] for j in range(2)), f.zero)
        assert lhs == res.value * res.vector[i]


def test_pf_qudit():
    f = rational_field()
    res = perron_eigen([[3]], f)
    assert res.exact and res.value == 3
    assert res.vector[0] == Fraction(1)


def test_pf_sqrt2():
    f = fourth_root_two_field()
    res = perron_eigen([[0, 2], [1, 0]], f, norm_vector=[1, 1])
    assert res.exact
    assert res.value * res.value == f.scalar(2)


def test_pf_not_irreducible():
    f = rational_field()
    with pytest.raises(NotIrreducibleError):
        perron_eigen([[1, 1], [0, 1]], f)


def test_rational_field_basics():
    f = rational_field()
    a = f.scalar(Fraction(3, 4))
    assert (a * 4) == 3
    assert a.sign() == 1
    assert f.scalar(Fraction(9, 16)).sqrt() == a
