"""Small exact linear algebra over a NumberField: sparse matrices, RREF, LDL."""
from __future__ import annotations

from .exactnum import ExactScalar, NotInFieldError, NumberField


class SparseMat:
    """Sparse matrix with ExactScalar entries, dict keyed by (row, col)."""

    __slots__ = ("nrows", "ncols", "data")

    def __init__(self, nrows: int, ncols: int, data: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.data = data or {}

    @classmethod
    def identity(cls, n: int, field: NumberField) -> "SparseMat":
        return cls(n, n, {(i, i): field.one for i in range(n)})

    def copy(self) -> "SparseMat":
        return SparseMat(self.nrows, self.ncols, dict(self.data))

    def set(self, i: int, j: int, v: ExactScalar):
        if v.is_zero():
            self.data.pop((i, j), None)
        else:
            self.data[(i, j)] = v

    def get(self, i: int, j: int, field: NumberField) -> ExactScalar:
        return self.data.get((i, j), field.zero)

    def add_to(self, i: int, j: int, v: ExactScalar):
        cur = self.data.get((i, j))
        new = v if cur is None else cur + v
        if new.is_zero():
            self.data.pop((i, j), None)
        else:
            self.data[(i, j)] = new

    def __add__(self, other: "SparseMat") -> "SparseMat":
        out = self.copy()
        for k, v in other.data.items():
            out.add_to(*k, v)
        return out

    def __sub__(self, other: "SparseMat") -> "SparseMat":
        out = self.copy()
        for k, v in other.data.items():
            out.add_to(*k, -v)
        return out

    def scale(self, c: ExactScalar) -> "SparseMat":
        if c.is_zero():
            return SparseMat(self.nrows, self.ncols)
        return SparseMat(self.nrows, self.ncols, {k: c * v for k, v in self.data.items()})

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        assert self.ncols == other.nrows, "matrix shape mismatch"
        rows: dict[int, dict[int, ExactScalar]] = {}
        for (i, k), v in other.data.items():
            rows.setdefault(i, {})[k] = v
        out = SparseMat(self.nrows, other.ncols)
        acc: dict[tuple[int, int], ExactScalar] = {}
        for (i, j), a in self.data.items():
            row = rows.get(j)
            if not row:
                continue
            for k, b in row.items():
                key = (i, k)
                cur = acc.get(key)
                prod = a * b
                acc[key] = prod if cur is None else cur + prod
        out.data = {k: v for k, v in acc.items() if not v.is_zero()}
        return out

    def dagger(self) -> "SparseMat":
        return SparseMat(self.ncols, self.nrows,
                         {(j, i): v.conjugate() for (i, j), v in self.data.items()})

    def transpose(self) -> "SparseMat":
        return SparseMat(self.ncols, self.nrows, {(j, i): v for (i, j), v in self.data.items()})

    def diag_sum(self, field: NumberField) -> ExactScalar:
        out = field.zero
        for (i, j), v in self.data.items():
            if i == j:
                out = out + v
        return out

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseMat) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.data == other.data)

    def column(self, j: int) -> dict[int, ExactScalar]:
        return {i: v for (i, jj), v in self.data.items() if jj == j}

    def nnz(self) -> int:
        return len(self.data)


def vec_dot(a: dict[int, ExactScalar], b: dict[int, ExactScalar], field: NumberField,
            conjugate_left: bool = True) -> ExactScalar:
    out = field.zero
    keys = a.keys() if len(a) <= len(b) else b.keys()
    for i in keys:
        if i in a and i in b:
            x, y = a[i], b[i]
            out = out + (x.conjugate() if conjugate_left else x) * y
    return out


def rref(rows: list[list[ExactScalar]], field: NumberField) -> tuple[list[list[ExactScalar]], list[int]]:
    """Reduced row echelon form (in place on a copy); returns (rows, pivot columns)."""
    rows = [row[:] for row in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r] + rows[r:], pivots


def nullspace(rows: list[list[ExactScalar]], field: NumberField) -> list[list[ExactScalar]]:
    """Basis of the right nullspace of the matrix given by rows."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows, field)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero] * ncols
        v[fc] = field.one
        for pr, pc in enumerate(pivots):
            v[pc] = -red[pr][fc]
        basis.append(v)
    return basis


class RowSpace:
    """Incremental row space (echelon basis) over a field, for span tracking."""

    def __init__(self, ncols: int, field: NumberField):
        self.ncols = ncols
        self.field = field
        self.rows: list[dict[int, ExactScalar]] = []
        self.pivots: list[int] = []

    def reduce(self, vec: dict[int, ExactScalar]) -> dict[int, ExactScalar]:
        v = dict(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v.get(p)
            if c is None or c.is_zero():
                continue
            for j, w in row.items():
                cur = v.get(j, self.field.zero) - c * w
                if cur.is_zero():
                    v.pop(j, None)
                else:
                    v[j] = cur
        return {j: w for j, w in v.items() if not w.is_zero()}

    def insert(self, vec: dict[int, ExactScalar]) -> bool:
        """Insert a vector; returns True if it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = v[p].inverse()
        v = {j: w * inv for j, w in v.items()}
        # back-substitute into existing rows
        for idx, row in enumerate(self.rows):
            c = row.get(p)
            if c is None:
                continue
            new = dict(row)
            for j, w in v.items():
                cur = new.get(j, self.field.zero) - c * w
                if cur.is_zero():
                    new.pop(j, None)
                else:
                    new[j] = cur
            self.rows[idx] = new
        self.rows.append(v)
        self.pivots.append(p)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, vec: dict[int, ExactScalar]) -> bool:
        return not self.reduce(vec)


def ldl(gram: list[list[ExactScalar]], field: NumberField):
    """LDL* decomposition of a Hermitian positive semidefinite Gram matrix.

    Returns (L, diag) with gram = L @ diag @ L*.  Pivoting is not performed;
    zero pivots are allowed only when the full row/column is already zero.
    """
    n = len(gram)
    L = [[field.zero] * n for _ in range(n)]
    d = [field.zero] * n
    for j in range(n):
        acc = gram[j][j]
        for k in range(j):
            if not d[k].is_zero():
                acc = acc - L[j][k] * L[j][k].conjugate() * d[k]
        d[j] = acc
        L[j][j] = field.one
        for i in range(j + 1, n):
            acc = gram[i][j]
            for k in range(j):
                if not d[k].is_zero():
                    acc = acc - L[i][k] * L[j][k].conjugate() * d[k]
            if d[j].is_zero():
                if not acc.is_zero():
                    raise NotInFieldError("gram matrix not decomposable without pivoting")
                L[i][j] = field.zero
            else:
                L[i][j] = acc / d[j]
    return L, d
