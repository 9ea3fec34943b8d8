"""Fusion-ring data for spin chains: labels, multiplicities, duals, dimensions.

A chain is generated by a (possibly non-simple) object X given as a multiset
of simple labels; the Bratteli diagram of the tower End(X^n) is the fusion
graph of X.  Associators are out of scope; the per-model recoupling data that
left inclusions need lives with the model definitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .exactnum import ExactScalar, NumberField, perron_eigen


class RingError(Exception):
    pass


@dataclass(frozen=True)
class FusionRing:
    """Simple labels with multiplicity tensor N[a][b][c] and a dual involution."""

    simples: tuple[str, ...]
    n_tensor: tuple[tuple[tuple[int, ...], ...], ...]  # N[a][b][c]
    dual: tuple[int, ...]
    name: str = ""

    @property
    def rank(self) -> int:
        return len(self.simples)

    def n(self, a: int, b: int, c: int) -> int:
        return self.n_tensor[a][b][c]

    def index_of(self, label: str) -> int:
        return self.simples.index(label)

    def validate(self) -> list[str]:
        """Exhaustive check of the fusion-ring axioms; returns violations."""
        r = self.rank
        bad: list[str] = []
        for a in range(r):
            for c in range(r):
                if self.n(0, a, c) != (1 if a == c else 0):
                    bad.append(f"unit law fails: N[1][{self.simples[a]}][{self.simples[c]}]")
                if self.n(a, 0, c) != (1 if a == c else 0):
                    bad.append(f"unit law fails: N[{self.simples[a]}][1][{self.simples[c]}]")
        for a in range(r):
            for b in range(r):
                for c in range(r):
                    for d in range(r):
                        lhs = sum(self.n(a, b, e) * self.n(e, c, d) for e in range(r))
                        rhs = sum(self.n(b, c, f) * self.n(a, f, d) for f in range(r))
                        if lhs != rhs:
                            bad.append(
                                "associativity fails at "
                                f"({self.simples[a]},{self.simples[b]},{self.simples[c]},{self.simples[d]})")
        for a in range(r):
            for b in range(r):
                want = 1 if b == self.dual[a] else 0
                if self.n(a, b, 0) != want:
                    bad.append(f"duality fails: N[{self.simples[a]}][{self.simples[b]}][1]")
        if self.dual[0] != 0:
            bad.append("dual does not fix the unit")
        for a in range(r):
            if self.dual[self.dual[a]] != a:
                bad.append("dual is not an involution")
        return bad

    def require_valid(self):
        bad = self.validate()
        if bad:
            raise RingError("; ".join(bad[:5]))

    def total_fusion_matrix(self) -> list[list[int]]:
        r = self.rank
        return [[sum(self.n(s, a, c) for s in range(r)) for a in range(r)] for c in range(r)]

    def dims(self, num_field: NumberField) -> list[ExactScalar]:
        """The unique positive character: d_a d_b = sum_c N[a][b][c] d_c, d_unit = 1."""
        res = perron_eigen(self.total_fusion_matrix(), num_field)
        d0 = res.vector[0]
        vec = [v / d0 for v in res.vector]
        for a in range(self.rank):
            for b in range(self.rank):
                lhs = vec[a] * vec[b]
                rhs = num_field.zero
                for c in range(self.rank):
                    if self.n(a, b, c):
                        rhs = rhs + num_field.scalar(self.n(a, b, c)) * vec[c]
                if lhs != rhs:
                    raise RingError("dimension character is not multiplicative (inexact PF data?)")
        return vec


def fusion_matrix(ring: FusionRing, x: tuple[int, ...]) -> list[list[int]]:
    """Left-multiplication matrix of the object X = sum x_s * s: T[c][a] = N[X][a][c]."""
    r = ring.rank
    return [[sum(x[s] * ring.n(s, a, c) for s in range(r)) for a in range(r)] for c in range(r)]


def strong_generator_power(ring: FusionRing, x: tuple[int, ...]) -> int | None:
    """Minimal n <= rank^2 with (T^n) entrywise positive, or None."""
    t = fusion_matrix(ring, x)
    r = ring.rank
    power = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    for n in range(1, r * r + 1):
        power = [[sum(t[i][k] * power[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
        if all(v > 0 for row in power for v in row):
            return n
    return None


def object_vector(ring: FusionRing, spec: str | dict[str, int]) -> tuple[int, ...]:
    """Parse an object description: a simple label or a {label: multiplicity} map."""
    if isinstance(spec, str):
        vec = [0] * ring.rank
        vec[ring.index_of(spec)] = 1
        return tuple(vec)
    vec = [0] * ring.rank
    for label, mult in spec.items():
        vec[ring.index_of(label)] += int(mult)
    return tuple(vec)


def dual_object(ring: FusionRing, x: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * ring.rank
    for s, m in enumerate(x):
        out[ring.dual[s]] += m
    return tuple(out)


@dataclass(frozen=True)
class ChainSpec:
    """A fusion spin chain: ring, self-dual strongly generating object X, scalar field."""

    ring: FusionRing
    generator: tuple[int, ...]
    num_field: NumberField
    name: str = ""
    strong_power: int = dc_field(default=0, compare=False)

    def __post_init__(self):
        self.ring.require_valid()
        if dual_object(self.ring, self.generator) != self.generator:
            raise RingError("generator object must be self-dual")
        if sum(self.generator) == 0:
            raise RingError("generator must be nonzero")
        if self.generator == tuple(1 if s == 0 else 0 for s in range(self.ring.rank)):
            raise RingError("generator must differ from the unit object")
        n = strong_generator_power(self.ring, self.generator)
        if n is None:
            raise RingError("generator is not strongly tensor generating")
        object.__setattr__(self, "strong_power", n)


# -- builtin rings -----------------------------------------------------------

def fib_ring() -> FusionRing:
    """Rank two ring with tau (x) tau = 1 + tau."""
    n = (
        ((1, 0), (0, 1)),
        ((0, 1), (1, 1)),
    )
    return FusionRing(("1", "tau"), n, (0, 1), name="Fib")


def abelian_group_ring(orders: tuple[int, ...]) -> FusionRing:
    """Group ring of Z/n1 x ... x Z/nk; labels are tuples rendered as strings."""
    elements: list[tuple[int, ...]] = [()]
    for n in orders:
        elements = [e + (k,) for e in elements for k in range(n)]
    elements.sort()
    # place identity first
    ident = tuple(0 for _ in orders)
    elements.remove(ident)
    elements.insert(0, ident)
    idx = {e: i for i, e in enumerate(elements)}
    r = len(elements)

    def mul(a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, orders))

    n_tensor = tuple(
        tuple(
            tuple(1 if idx[mul(elements[a], elements[b])] == c else 0 for c in range(r))
            for b in range(r))
        for a in range(r))
    dual = tuple(idx[tuple((-x) % n for x, n in zip(e, orders))] for e in elements)
    labels = tuple("e" if e == ident else "g" + "".join(map(str, e)) for e in elements)
    return FusionRing(labels, n_tensor, dual, name=f"Hilb{orders}")


def trivial_ring() -> FusionRing:
    return FusionRing(("1",), (((1,),),), (0,), name="Hilb")


def tambara_yamagami_ring(orders: tuple[int, ...]) -> FusionRing:
    """Fusion rules of TY(B): invertibles B plus rho with rho^2 = sum of B."""
    base = abelian_group_ring(orders)
    r = base.rank
    labels = base.simples + ("rho",)

    def n(a, b, c):
        if a < r and b < r and c < r:
            return base.n(a, b, c)
        if a < r and b == r:
            return 1 if c == r else 0
        if a == r and b < r:
            return 1 if c == r else 0
        if a == r and b == r:
            return 1 if c < r else 0
        return 0

    n_tensor = tuple(tuple(tuple(n(a, b, c) for c in range(r + 1)) for b in range(r + 1))
                     for a in range(r + 1))
    dual = base.dual + (r,)
    return FusionRing(labels, n_tensor, dual, name=f"TY{orders}")
