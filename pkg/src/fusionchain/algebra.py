"""Local algebras of a fusion spin chain in the path (Bratteli) basis.

A window [a, b] carries the algebra End(X^(b-a+1)) realized on edge-labeled
paths from the unit vertex of the fusion graph of X.  Elements are window
tagged; embeddings into larger windows are explicit: appending edges on the
right, and on the left a one-strand insertion whose amplitudes are supplied
by the chain model (trivial letter-carrying for pointed chains, the
golden-ratio recoupling table for the Fibonacci chain).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable

from ._linalg import SparseMat
from .exactnum import ExactScalar, NumberField
from .fusion import ChainSpec, fusion_matrix


class WindowError(Exception):
    pass


class ResourceLimitError(Exception):
    pass


class UnsupportedChainError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Window:
    a: int
    b: int

    def __post_init__(self):
        if self.a > self.b:
            raise WindowError(f"empty window [{self.a}, {self.b}]")

    @property
    def size(self) -> int:
        return self.b - self.a + 1

    def contains(self, other: "Window") -> bool:
        return self.a <= other.a and other.b <= self.b

    def hull(self, other: "Window") -> "Window":
        return Window(min(self.a, other.a), max(self.b, other.b))

    def shift(self, k: int) -> "Window":
        return Window(self.a + k, self.b + k)

    def overlaps(self, other: "Window") -> bool:
        return not (self.b < other.a or other.b < self.a)

    def __repr__(self) -> str:
        return f"[{self.a},{self.b}]"


@dataclass(frozen=True)
class Edge:
    eid: int
    src: int
    dst: int
    label: tuple  # (component simple, copy index, fusion multiplicity index)


class PathData:
    """Paths of a fixed length from the unit vertex, grouped by end vertex."""

    def __init__(self, blocks: dict[int, list[tuple[int, ...]]]):
        self.blocks = blocks  # end vertex -> ordered list of edge-id tuples
        self.index: dict[tuple[int, ...], tuple[int, int]] = {}
        for v, plist in blocks.items():
            for i, p in enumerate(plist):
                self.index[p] = (v, i)

    def dims(self) -> dict[int, int]:
        return {v: len(p) for v, p in self.blocks.items() if p}

    def total(self) -> int:
        return sum(len(p) for p in self.blocks.values())


class _LetterPaths:
    """Virtual path list for single-vertex chains: path index is the base-d
    value of its letter string, with no materialized storage."""

    def __init__(self, d: int, n: int):
        self.d = d
        self.n = n

    def __len__(self) -> int:
        return self.d ** self.n

    def __getitem__(self, i: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            i, r = divmod(i, self.d)
            out.append(r)
        return tuple(reversed(out))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


class _LetterIndex:
    def __init__(self, d: int, n: int):
        self.d = d
        self.n = n

    def __getitem__(self, p: tuple[int, ...]) -> tuple[int, int]:
        if len(p) != self.n:
            raise KeyError(p)
        i = 0
        for e in p:
            i = i * self.d + e
        return (0, i)


class UniformPathData:
    """PathData for the single-vertex uniform-multiplicity fusion graph."""

    def __init__(self, d: int, n: int):
        self.blocks = {0: _LetterPaths(d, n)}
        self.index = _LetterIndex(d, n)
        self.d = d
        self.n = n

    def dims(self) -> dict[int, int]:
        return {0: self.d ** self.n}

    def total(self) -> int:
        return self.d ** self.n


class InsertionRule:
    """One-strand left-insertion amplitudes; see model constructors."""

    def start_state(self, first_edge: Edge):
        raise NotImplementedError

    def step(self, state, tree_edge: Edge, emitted_edge: Edge):
        """Return (new_state, amplitude) or None if forbidden."""
        raise NotImplementedError

    def finish(self, state, channel_edge: Edge) -> bool:
        raise NotImplementedError


class PointedInsertion(InsertionRule):
    """Letter-carrying insertion: exact for chains over group-like rings."""

    def __init__(self, field: NumberField):
        self.one = field.one

    def start_state(self, first_edge: Edge):
        return first_edge.label

    def step(self, state, tree_edge: Edge, emitted_edge: Edge):
        if emitted_edge.label == tree_edge.label:
            return state, self.one
        return None

    def finish(self, state, channel_edge: Edge) -> bool:
        return channel_edge.label == state


class TableInsertion(InsertionRule):
    """Vertex-state insertion driven by an amplitude table.

    table maps (state_vertex, tree_src, tree_dst, new_state_vertex) -> scalar.
    Used by the Fibonacci chain with the golden-ratio recoupling weights.
    """

    def __init__(self, table: dict[tuple[int, int, int, int], ExactScalar]):
        self.table = table

    def start_state(self, first_edge: Edge):
        return first_edge.dst

    def step(self, state, tree_edge: Edge, emitted_edge: Edge):
        if emitted_edge.src != state:
            return None
        amp = self.table.get((state, tree_edge.src, tree_edge.dst, emitted_edge.dst))
        if amp is None or amp.is_zero():
            return None
        return emitted_edge.dst, amp

    def finish(self, state, channel_edge: Edge) -> bool:
        return channel_edge.dst == state


class ChainAlgebra:
    """Computational context for one fusion spin chain."""

    def __init__(self, spec: ChainSpec, insertion: InsertionRule | None = None,
                 max_window: int = 14, max_basis: int = 300_000):
        self.spec = spec
        self.field = spec.num_field
        self.ring = spec.ring
        self.max_window = max_window
        self.max_basis = max_basis
        self._lock = threading.Lock()
        self._paths: dict[int, PathData] = {}
        self._vmats: dict[int, dict[int, tuple[SparseMat, list[tuple[int, int, int]]]]] = {}
        self._tcache: dict[tuple[int, int], ExactScalar] = {}

        r = self.ring.rank
        self.t_matrix = fusion_matrix(self.ring, spec.generator)
        self.dims = self.ring.dims(self.field)
        self.d_x = self.field.zero
        for s, m in enumerate(spec.generator):
            self.d_x = self.d_x + self.field.scalar(m) * self.dims[s]
        self.sqrt_dims = [d.sqrt() for d in self.dims]
        # edges of the fusion graph of X, canonically labeled
        self.edges: list[Edge] = []
        self.out_edges: dict[int, list[Edge]] = {u: [] for u in range(r)}
        for u in range(r):
            for w in range(r):
                for s in range(r):
                    for copy in range(spec.generator[s]):
                        for nu in range(self.ring.n(s, u, w)):
                            e = Edge(len(self.edges), u, w, (s, copy, nu))
                            self.edges.append(e)
                            self.out_edges[u].append(e)
        self._edge_lookup = {(e.src, e.dst, e.label): e for e in self.edges}
        self._edge_by_src_label = {(e.src, e.label): e for e in self.edges}
        self.insertion = insertion if insertion is not None else self._default_insertion()
        self.pointed = isinstance(self.insertion, PointedInsertion)

    def _default_insertion(self) -> InsertionRule | None:
        # group-like chains (all simples invertible) admit the letter rule
        if all(self.ring.n(a, self.ring.dual[a], 0) == 1 and
               sum(self.ring.n(a, b, c) for b in range(self.ring.rank)
                   for c in range(self.ring.rank)) == self.ring.rank
               for a in range(self.ring.rank)):
            return PointedInsertion(self.field)
        return None

    # -- path spaces --------------------------------------------------------
    def paths(self, n: int):
        with self._lock:
            pd = self._paths.get(n)
        if pd is not None:
            return pd
        if n > self.max_window:
            raise ResourceLimitError(f"window size {n} exceeds limit {self.max_window}")
        if self.ring.rank == 1:
            d = len(self.out_edges[0])
            if d ** n > self.max_basis:
                raise ResourceLimitError(f"path count {d**n} exceeds limit {self.max_basis}")
            pd = UniformPathData(d, n)
            with self._lock:
                self._paths[n] = pd
            return pd
        if n == 1:
            blocks: dict[int, list[tuple[int, ...]]] = {v: [] for v in range(self.ring.rank)}
            for e in self.out_edges[0]:
                blocks[e.dst].append((e.eid,))
        else:
            prev = self.paths(n - 1)
            blocks = {v: [] for v in range(self.ring.rank)}
            for u in sorted(prev.blocks):
                for p in prev.blocks[u]:
                    for e in self.out_edges[u]:
                        blocks[e.dst].append(p + (e.eid,))
        total = sum(len(v) ** 2 for v in blocks.values())
        if total > self.max_basis:
            raise ResourceLimitError(f"basis size {total} exceeds limit {self.max_basis}")
        pd = PathData(blocks)
        with self._lock:
            self._paths[n] = pd
        return pd

    def block_dims(self, n: int) -> dict[int, int]:
        return self.paths(n).dims()

    def trace_weight(self, v: int, n: int) -> ExactScalar:
        key = (v, n)
        with self._lock:
            t = self._tcache.get(key)
        if t is None:
            t = self.dims[v] / self.d_x ** n
            with self._lock:
                self._tcache[key] = t
        return t

    def dual_edge(self, e: Edge) -> Edge:
        s, copy, nu = e.label
        return self._edge_lookup[(e.dst, e.src, (self.ring.dual[s], copy, nu))]

    def rebase_path(self, p: tuple[int, ...], start: int) -> tuple[int, ...]:
        """Follow p's edge labels from a new start vertex (pointed chains)."""
        out = []
        v = start
        for eid in p:
            e2 = self._edge_by_src_label[(v, self.edges[eid].label)]
            out.append(e2.eid)
            v = e2.dst
        return tuple(out)

    def path_str(self, p: tuple[int, ...]) -> str:
        names = [self.ring.simples[0]]
        labels = []
        for eid in p:
            e = self.edges[eid]
            names.append(self.ring.simples[e.dst])
            labels.append(e.label)
        multi = any(len(self.out_edges[u]) > len({e.dst for e in self.out_edges[u]})
                    for u in self.out_edges)
        if multi:
            return ".".join(f"{nm}#{lb[0]}:{lb[1]}" for nm, lb in zip(names[1:], labels))
        return ".".join(names)

    # -- insertion unitaries -------------------------------------------------
    def insertion_data(self, n: int):
        """V matrices for End(X^n) -> End(X^(n+1)) left inclusion, per target block.

        Returns dict w -> (V, src_basis) where src_basis[j] = (s, local path
        index in block s at size n, channel edge id s->w), and V maps source
        coordinates to paths of size n+1 ending at w.
        """
        if self.insertion is None:
            raise UnsupportedChainError(
                f"chain {self.spec.name or self.ring.name} has no left-insertion data")
        with self._lock:
            cached = self._vmats.get(n)
        if cached is not None:
            return cached
        small, big = self.paths(n), self.paths(n + 1)
        out: dict[int, tuple[SparseMat, list[tuple[int, int, int]]]] = {}
        for w in sorted(big.blocks):
            rows = big.blocks[w]
            if not rows:
                continue
            src: list[tuple[int, int, int]] = []
            for s in sorted(small.blocks):
                if not small.blocks[s]:
                    continue
                for e in self.out_edges[s]:
                    if e.dst != w:
                        continue
                    for i in range(len(small.blocks[s])):
                        src.append((s, i, e.eid))
            if len(src) != len(rows):
                raise UnsupportedChainError("insertion source basis does not match block size")
            v = SparseMat(len(rows), len(src))
            for col, (s, i, geid) in enumerate(src):
                tree = small.blocks[s][i]
                gamma = self.edges[geid]
                for row, mu in enumerate(rows):
                    amp = self._column_amp(tree, gamma, mu)
                    if amp is not None and not amp.is_zero():
                        v.set(row, col, amp)
            # verify unitarity once; guards the model-supplied table
            if not (v.dagger() @ v) == SparseMat.identity(len(src), self.field):
                raise UnsupportedChainError("insertion matrix is not unitary")
            out[w] = (v, src)
        with self._lock:
            self._vmats[n] = out
        return out

    def _column_amp(self, tree: tuple[int, ...], gamma: Edge, mu: tuple[int, ...]):
        rule = self.insertion
        state = rule.start_state(self.edges[mu[0]])
        amp = self.field.one
        for j, beta_id in enumerate(tree):
            res = rule.step(state, self.edges[beta_id], self.edges[mu[j + 1]])
            if res is None:
                return None
            state, a = res
            amp = amp * a
        if not rule.finish(state, gamma):
            return None
        return amp


class AlgElement:
    """Element of A_[a,b] as block matrices over the window's path pairs."""

    __slots__ = ("chain", "window", "blocks")

    def __init__(self, chain: ChainAlgebra, window: Window, blocks: dict[int, SparseMat]):
        self.chain = chain
        self.window = window
        self.blocks = blocks

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, chain: ChainAlgebra, window: Window) -> "AlgElement":
        pd = chain.paths(window.size)
        return cls(chain, window, {v: SparseMat(len(p), len(p)) for v, p in pd.blocks.items() if p})

    @classmethod
    def identity(cls, chain: ChainAlgebra, window: Window) -> "AlgElement":
        pd = chain.paths(window.size)
        return cls(chain, window, {v: SparseMat.identity(len(p), chain.field)
                                   for v, p in pd.blocks.items() if p})

    @classmethod
    def matrix_unit(cls, chain: ChainAlgebra, window: Window,
                    p: tuple[int, ...], q: tuple[int, ...], coeff: ExactScalar | None = None) -> "AlgElement":
        pd = chain.paths(window.size)
        vp, ip = pd.index[p]
        vq, iq = pd.index[q]
        if vp != vq:
            raise WindowError("matrix unit requires endpoint-matched paths")
        el = cls.zero(chain, window)
        el.blocks[vp].set(ip, iq, coeff if coeff is not None else chain.field.one)
        return el

    def copy(self) -> "AlgElement":
        return AlgElement(self.chain, self.window, {v: m.copy() for v, m in self.blocks.items()})

    # -- ring structure ------------------------------------------------------
    def _check(self, other: "AlgElement"):
        if other.chain is not self.chain:
            raise WindowError("elements from different chains")
        if other.window != self.window:
            raise WindowError(f"window mismatch {self.window} vs {other.window}; embed first")

    def __add__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.chain, self.window,
                          {v: self.blocks[v] + other.blocks[v] for v in self.blocks})

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.chain, self.window,
                          {v: self.blocks[v] - other.blocks[v] for v in self.blocks})

    def __matmul__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.chain, self.window,
                          {v: self.blocks[v] @ other.blocks[v] for v in self.blocks})

    def scale(self, c: ExactScalar | int) -> "AlgElement":
        if isinstance(c, int):
            c = self.chain.field.scalar(c)
        return AlgElement(self.chain, self.window, {v: m.scale(c) for v, m in self.blocks.items()})

    def __neg__(self) -> "AlgElement":
        return self.scale(self.chain.field.scalar(-1))

    def adjoint(self) -> "AlgElement":
        return AlgElement(self.chain, self.window, {v: m.dagger() for v, m in self.blocks.items()})

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgElement):
            return NotImplemented
        return (self.window == other.window and
                all(self.blocks[v] == other.blocks[v] for v in self.blocks))

    def trace(self) -> ExactScalar:
        f = self.chain.field
        out = f.zero
        n = self.window.size
        for v, m in self.blocks.items():
            s = m.diag_sum(f)
            if not s.is_zero():
                out = out + s * self.chain.trace_weight(v, n)
        return out

    def nnz(self) -> int:
        return sum(m.nnz() for m in self.blocks.values())

    # -- window moves ----------------------------------------------------
    def shift(self, k: int) -> "AlgElement":
        return AlgElement(self.chain, self.window.shift(k), self.blocks)

    def append_right_one(self) -> "AlgElement":
        ch = self.chain
        n = self.window.size
        small, big = ch.paths(n), ch.paths(n + 1)
        out = AlgElement.zero(ch, Window(self.window.a, self.window.b + 1))
        for s, m in self.blocks.items():
            if m.is_zero():
                continue
            plist = small.blocks[s]
            for e in ch.out_edges[s]:
                w = e.dst
                bigblock = big.index
                tgt = out.blocks[w]
                for (i, j), c in m.data.items():
                    _, bi = bigblock[plist[i] + (e.eid,)]
                    _, bj = bigblock[plist[j] + (e.eid,)]
                    tgt.add_to(bi, bj, c)
        return out

    def insert_left_one(self) -> "AlgElement":
        ch = self.chain
        n = self.window.size
        if ch.pointed:
            return self._insert_left_pointed()
        vdata = ch.insertion_data(n)
        out = AlgElement.zero(ch, Window(self.window.a - 1, self.window.b))
        for w, (v, src) in vdata.items():
            colmap: dict[tuple[int, int], dict[int, int]] = {}
            for col, (s, i, geid) in enumerate(src):
                colmap.setdefault((s, geid), {})[i] = col
            x = SparseMat(len(src), len(src))
            for (s, geid), imap in colmap.items():
                blk = self.blocks.get(s)
                if blk is None or blk.is_zero():
                    continue
                for (i, j), c in blk.data.items():
                    x.set(imap[i], imap[j], c)
            if not x.is_zero():
                out.blocks[w] = (v @ x) @ v.dagger()
        return out

    def _insert_left_pointed(self) -> "AlgElement":
        ch = self.chain
        n = self.window.size
        small, big = ch.paths(n), ch.paths(n + 1)
        out = AlgElement.zero(ch, Window(self.window.a - 1, self.window.b))
        for s, m in self.blocks.items():
            if m.is_zero():
                continue
            plist = small.blocks[s]
            cache: dict[tuple[int, int], tuple[int, int]] = {}
            for (i, j), c in m.data.items():
                for gam in ch.out_edges[0]:
                    key = (i, gam.eid)
                    loc = cache.get(key)
                    if loc is None:
                        newp = (gam.eid,) + ch.rebase_path(plist[i], gam.dst)
                        loc = big.index[newp]
                        cache[key] = loc
                    key2 = (j, gam.eid)
                    loc2 = cache.get(key2)
                    if loc2 is None:
                        newq = (gam.eid,) + ch.rebase_path(plist[j], gam.dst)
                        loc2 = big.index[newq]
                        cache[key2] = loc2
                    out.blocks[loc[0]].add_to(loc[1], loc2[1], c)
        return out

    def embed(self, target: Window) -> "AlgElement":
        if not target.contains(self.window):
            raise WindowError(f"target {target} does not contain {self.window}")
        el = self
        for _ in range(self.window.a - target.a):
            el = el.insert_left_one()
        for _ in range(target.b - self.window.b):
            el = el.append_right_one()
        return el

    # -- truncations and membership tests ---------------------------------
    def trim_right_one(self) -> "AlgElement | None":
        """Inverse of append_right_one when the element lies in the subalgebra."""
        ch = self.chain
        n = self.window.size
        if n < 2:
            return None
        small, big = ch.paths(n - 1), ch.paths(n)
        cand = AlgElement.zero(ch, Window(self.window.a, self.window.b - 1))
        for w, m in self.blocks.items():
            plist = big.blocks[w]
            for (i, j), c in m.data.items():
                pi, pj = plist[i], plist[j]
                if pi[-1] != pj[-1]:
                    return None
                s, si = small.index[pi[:-1]]
                _, sj = small.index[pj[:-1]]
                cur = cand.blocks[s].data.get((si, sj))
                if cur is None:
                    cand.blocks[s].set(si, sj, c)
                elif cur != c:
                    return None
        if cand.append_right_one().blocks == self.blocks:
            return cand
        return None

    def trim_left_one(self) -> "AlgElement | None":
        ch = self.chain
        n = self.window.size
        if n < 2 or ch.insertion is None:
            return None
        vdata = ch.insertion_data(n - 1)
        small = ch.paths(n - 1)
        cand = AlgElement.zero(ch, Window(self.window.a + 1, self.window.b))
        seen: dict[tuple[int, int, int], ExactScalar] = {}
        for w, (v, src) in vdata.items():
            m = self.blocks.get(w)
            if m is None:
                continue
            u = (v.dagger() @ m) @ v
            for (col, col2), c in u.data.items():
                s, i, geid = src[col]
                s2, j, geid2 = src[col2]
                if geid != geid2:
                    return None
                key = (s, i, j)
                prev = seen.get(key)
                if prev is None:
                    seen[key] = c
                elif prev != c:
                    return None
        for (s, i, j), c in seen.items():
            cand.blocks[s].set(i, j, c)
        if cand.insert_left_one().blocks == self.blocks:
            return cand
        return None

    def trim(self) -> "AlgElement":
        """Smallest-window representative reachable by exact truncation."""
        el = self
        improved = True
        while improved and el.window.size > 1:
            improved = False
            r = el.trim_right_one()
            if r is not None:
                el = r
                improved = True
                continue
            if el.chain.insertion is not None:
                l = el.trim_left_one()
                if l is not None:
                    el = l
                    improved = True
        return el

    # -- conditional expectations ------------------------------------------
    def cond_expect_right_one(self) -> "AlgElement":
        ch = self.chain
        n = self.window.size
        small, big = ch.paths(n - 1), ch.paths(n)
        out = AlgElement.zero(ch, Window(self.window.a, self.window.b - 1))
        weights = {}
        for w, m in self.blocks.items():
            plist = big.blocks[w]
            for (i, j), c in m.data.items():
                pi, pj = plist[i], plist[j]
                if pi[-1] != pj[-1]:
                    continue
                eid = pi[-1]
                s, si = small.index[pi[:-1]]
                _, sj = small.index[pj[:-1]]
                wkey = (s, w)
                wt = weights.get(wkey)
                if wt is None:
                    wt = ch.trace_weight(w, n) / ch.trace_weight(s, n - 1)
                    weights[wkey] = wt
                out.blocks[s].add_to(si, sj, c * wt)
        return out

    def cond_expect_left_one(self) -> "AlgElement":
        ch = self.chain
        n = self.window.size
        vdata = ch.insertion_data(n - 1)
        out = AlgElement.zero(ch, Window(self.window.a + 1, self.window.b))
        for w, (v, src) in vdata.items():
            m = self.blocks.get(w)
            if m is None or m.is_zero():
                continue
            u = (v.dagger() @ m) @ v
            for (col, col2), c in u.data.items():
                s, i, geid = src[col]
                s2, j, geid2 = src[col2]
                if geid != geid2:
                    continue
                wt = ch.trace_weight(w, n) / ch.trace_weight(s, n - 1)
                out.blocks[s].add_to(i, j, c * wt)
        return out

    def cond_expect(self, sub: Window) -> "AlgElement":
        """Trace-preserving conditional expectation onto A_sub, embedded back."""
        if not self.window.contains(sub):
            raise WindowError(f"subwindow {sub} not inside {self.window}")
        el = self
        for _ in range(self.window.b - sub.b):
            el = el.cond_expect_right_one()
        for _ in range(sub.a - self.window.a):
            el = el.cond_expect_left_one()
        return el.embed(self.window)

    # -- misc ----------------------------------------------------------------
    def debug_table(self) -> str:
        ch = self.chain
        pd = ch.paths(self.window.size)
        lines = []
        from .exactnum import poly_str
        for v in sorted(self.blocks):
            plist = pd.blocks[v]
            for (i, j), c in sorted(self.blocks[v].data.items()):
                lines.append(f"{ch.path_str(plist[i])};{ch.path_str(plist[j])};{poly_str(c)}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"AlgElement(window={self.window}, nnz={self.nnz()})"


def jones_projection(chain: ChainAlgebra, site: int, window: Window | None = None) -> AlgElement:
    """The canonical two-site projection e_site on window [site-1, site].

    Realized natively inside any containing window: on path pairs that return
    to the same vertex across the two strands, with weight
    sqrt(d_c d_c') / (d_v d_X); satisfies the Temperley-Lieb relations.
    """
    if window is None:
        window = Window(site - 1, site)
    if not (window.a <= site - 1 and site <= window.b):
        raise WindowError(f"site {site} not inside {window}")
    ch = chain
    n = window.size
    pd = ch.paths(n)
    j = site - window.a  # path position of the middle vertex (1-based edges j, j+1)
    out = AlgElement.zero(ch, window)
    f = ch.field
    inv_dx = (f.one / ch.d_x)
    for w, plist in pd.blocks.items():
        block = out.blocks[w]
        groups: dict[tuple, list[tuple[int, Edge]]] = {}
        for idx, p in enumerate(plist):
            e_out = ch.edges[p[j - 1]]
            e_back = ch.edges[p[j]]
            if e_back != ch.dual_edge(e_out):
                continue
            rest = p[:j - 1] + p[j + 1:]
            groups.setdefault((rest, e_out.src), []).append((idx, e_out))
        for (_, v), members in groups.items():
            dv_dx = ch.dims[v] * ch.d_x
            for i1, e1 in members:
                for i2, e2 in members:
                    c = ch.sqrt_dims[e1.dst] * ch.sqrt_dims[e2.dst] / dv_dx
                    block.set(i1, i2, c)
    return out


def fib_insertion_table(field: NumberField) -> dict[tuple[int, int, int, int], ExactScalar]:
    """One-strand recoupling amplitudes for the Fibonacci chain over Q(sqrt(phi)).

    Keys are (running vertex, tree src, tree dst, new running vertex) with
    vertex 0 the unit and 1 the generating simple.  The nontrivial 2x2 block
    is the golden-ratio orthogonal matrix; all amplitudes square-compatible
    with the Temperley-Lieb generators, which the test suite checks exactly.
    """
    g = field.gen()
    phi = g * g
    inv_phi = field.one / phi
    inv_sqrt_phi = field.one / g
    one = field.one
    return {
        (1, 0, 1, 0): one,
        (1, 0, 1, 1): one,
        (0, 1, 0, 1): inv_phi,
        (1, 1, 0, 1): inv_sqrt_phi,
        (0, 1, 1, 1): inv_sqrt_phi,
        (1, 1, 1, 0): one,
        (1, 1, 1, 1): -inv_phi,
    }
