import pytest

from fusionchain.algebra import ChainAlgebra, TableInsertion, fib_insertion_table
from fusionchain.exactnum import fourth_root_two_field, rational_field, sqrt_phi_field
from fusionchain.fusion import ChainSpec, abelian_group_ring, fib_ring, object_vector, trivial_ring


@pytest.fixture(scope="session")
def fib():
    field = sqrt_phi_field()
    spec = ChainSpec(fib_ring(), (0, 1), field, name="fib")
    return ChainAlgebra(spec, insertion=TableInsertion(fib_insertion_table(field)))


@pytest.fixture(scope="session")
def qudit2():
    spec = ChainSpec(trivial_ring(), (2,), rational_field(), name="qudit:2")
    return ChainAlgebra(spec)


@pytest.fixture(scope="session")
def qudit3():
    spec = ChainSpec(trivial_ring(), (3,), rational_field(), name="qudit:3")
    return ChainAlgebra(spec, max_basis=600_000)


@pytest.fixture(scope="session")
def kw_chain():
    ring = abelian_group_ring((2,))
    spec = ChainSpec(ring, object_vector(ring, {"e": 1, "g1": 1}), fourth_root_two_field(),
                     name="ising-kw")
    return ChainAlgebra(spec)
