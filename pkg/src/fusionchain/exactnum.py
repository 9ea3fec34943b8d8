"""Exact arithmetic in real algebraic number fields with certified sign decisions.

Scalars are elements of Q(g)[i] where g is the distinguished real root of a
monic integer polynomial, isolated by a rational interval.  All comparisons of
real elements are decided exactly by interval refinement; equality is
coefficient equality in the canonical reduced form.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence


class FieldError(Exception):
    pass


class NotInFieldError(FieldError):
    """Requested value (square root, eigenvalue, ...) is not in the field."""


class NotIrreducibleError(FieldError):
    pass


def _gcd_many(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


def _poly_trim(p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_deriv(p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return _poly_trim([p[k] * k for k in range(1, len(p))])


def _poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_rem(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(c != 0 for c in a):
        da, la = len(a) - 1, a[-1]
        q = la / lb
        for k in range(db + 1):
            a[da - db + k] -= q * b[k]
        while a and a[-1] == 0:
            a.pop()
    return _poly_trim(a)


def sturm_root_count(poly: Sequence[int | Fraction], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of poly in (lo, hi] by Sturm's theorem."""
    chain = [_poly_trim([Fraction(c) for c in poly])]
    chain.append(_poly_deriv(chain[0]))
    while chain[-1]:
        r = _poly_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(tuple(-c for c in r))

    def changes(x: Fraction) -> int:
        signs = []
        for p in chain:
            if not p:
                continue
            v = _poly_eval(p, x)
            if v != 0:
                signs.append(1 if v > 0 else -1)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return changes(lo) - changes(hi)


class NumberField:
    """Real algebraic number field Q(g), optionally with a formal imaginary unit.

    Parameters
    ----------
    min_poly : integer coefficients (c0, ..., 1) of a monic irreducible polynomial,
        low degree first, degree <= 8.
    root_interval : rational (lo, hi) isolating exactly one real root, the
        designated embedding of the generator g.
    has_imaginary_unit : allow scalars with a nonzero imaginary part.
    """

    def __init__(self, min_poly: Sequence[int], root_interval: tuple[Fraction, Fraction],
                 has_imaginary_unit: bool = True, name: str = ""):
        poly = tuple(int(c) for c in min_poly)
        if len(poly) < 2 or poly[-1] != 1:
            raise FieldError("min_poly must be monic of degree >= 1")
        if len(poly) > 9:
            raise FieldError("degree > 8 not supported")
        self.min_poly = poly
        self.degree = len(poly) - 1
        self.has_imaginary_unit = has_imaginary_unit
        self.name = name or f"Q[x]/({poly})"
        lo, hi = Fraction(root_interval[0]), Fraction(root_interval[1])
        if self.degree == 1:
            self._root_exact: Fraction | None = Fraction(-poly[0])
            self._iv = (self._root_exact, self._root_exact)
        else:
            self._root_exact = None
            fp = [Fraction(c) for c in poly]
            if not (_poly_eval(fp, lo) * _poly_eval(fp, hi) < 0):
                raise FieldError("root_interval endpoints must bracket a sign change")
            if sturm_root_count(poly, lo, hi) != 1:
                raise FieldError("root_interval must isolate exactly one real root")
            self._iv = (lo, hi)
        # reduction rows: g^k for k in [deg, 2*deg-2] as integer combinations
        # of 1, g, ..., g^(deg-1); monic integer min_poly keeps these integral.
        rows: list[tuple[int, ...]] = []
        base = [-c for c in poly[:-1]]
        rows.append(tuple(base))
        for _ in range(self.degree - 2):
            prev = rows[-1]
            shifted = [0] + list(prev[:-1])
            carry = prev[-1]
            rows.append(tuple(shifted[j] + carry * base[j] for j in range(self.degree)))
        self._red_rows = rows
        self.zero = ExactScalar(self, (0,) * self.degree, (0,) * self.degree, 1)
        self.one = self.scalar(1)

    def __repr__(self) -> str:
        return f"NumberField({self.name})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, NumberField) and other.min_poly == self.min_poly
                and other._iv == self._iv and other.has_imaginary_unit == self.has_imaginary_unit)

    def __hash__(self) -> int:
        return hash((self.min_poly, self._iv, self.has_imaginary_unit))

    def gen(self) -> "ExactScalar":
        if self.degree == 1:
            return self.scalar(self._root_exact)
        re = [0] * self.degree
        re[1] = 1
        return ExactScalar(self, tuple(re), (0,) * self.degree, 1)

    def scalar(self, value: int | Fraction, imag: int | Fraction = 0) -> "ExactScalar":
        v, w = Fraction(value), Fraction(imag)
        den = math.lcm(v.denominator, w.denominator)
        re = [v.numerator * (den // v.denominator)] + [0] * (self.degree - 1)
        im = [w.numerator * (den // w.denominator)] + [0] * (self.degree - 1)
        return ExactScalar(self, tuple(re), tuple(im), den)

    def from_coeffs(self, re: Sequence[int | Fraction], im: Sequence[int | Fraction] = ()) -> "ExactScalar":
        re = [Fraction(c) for c in re] + [Fraction(0)] * (self.degree - len(re))
        im = [Fraction(c) for c in im] + [Fraction(0)] * (self.degree - len(im))
        if len(re) != self.degree or len(im) != self.degree:
            raise FieldError("coefficient vector longer than field degree")
        den = 1
        for c in re + im:
            den = math.lcm(den, c.denominator)
        return ExactScalar(self, tuple(c.numerator * (den // c.denominator) for c in re),
                           tuple(c.numerator * (den // c.denominator) for c in im), den)

    def _reduce(self, conv: list[int]) -> tuple[int, ...]:
        # reduce a convolution of length 2*deg-1 mod min_poly
        n = self.degree
        out = list(conv[:n]) + [0] * (n - len(conv[:n]))
        for k in range(n, len(conv)):
            c = conv[k]
            if c:
                row = self._red_rows[k - n]
                for j in range(n):
                    out[j] += c * row[j]
        return tuple(out)

    def refine_interval(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """Interval of at most the requested width certified to contain g."""
        lo, hi = self._iv
        if self._root_exact is not None:
            return lo, hi
        fp = [Fraction(c) for c in self.min_poly]
        flo = _poly_eval(fp, lo)
        while hi - lo > width:
            mid = (lo + hi) / 2
            fm = _poly_eval(fp, mid)
            if fm == 0:  # impossible for irreducible min_poly of degree >= 2
                raise NotIrreducibleError("rational root encountered; min_poly not irreducible")
            if (flo < 0) != (fm < 0):
                hi = mid
            else:
                lo, flo = mid, fm
        self._iv = (lo, hi)  # monotone refinement cache; safe to share
        return lo, hi

    def float_gen(self) -> float:
        lo, hi = self.refine_interval(Fraction(1, 10**15))
        return float((lo + hi) / 2)


def _interval_eval(coeffs: Sequence[int], den: int, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    vlo = vhi = Fraction(0)
    for c in reversed(coeffs):
        # multiply [vlo, vhi] by [lo, hi], then add c
        cands = (vlo * lo, vlo * hi, vhi * lo, vhi * hi)
        vlo, vhi = min(cands) + c, max(cands) + c
    return vlo / den, vhi / den


class ExactScalar:
    """Element (re(g) + i*im(g)) / den with integer coefficient vectors."""

    __slots__ = ("field", "re", "im", "den")

    def __init__(self, field: NumberField, re: tuple[int, ...], im: tuple[int, ...], den: int):
        if den < 0:
            re, im, den = tuple(-c for c in re), tuple(-c for c in im), -den
        g = _gcd_many(list(re) + list(im) + [den])
        if g > 1:
            re = tuple(c // g for c in re)
            im = tuple(c // g for c in im)
            den //= g
        if any(im) and not field.has_imaginary_unit:
            raise FieldError("field has no imaginary unit")
        self.field = field
        self.re = re
        self.im = im
        self.den = den

    # -- structure ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.re) and not any(self.im)

    def is_real(self) -> bool:
        return not any(self.im)

    def is_rational(self) -> bool:
        return not any(self.re[1:]) and not any(self.im)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError("not rational")
        return Fraction(self.re[0], self.den)

    def __hash__(self) -> int:
        return hash((self.re, self.im, self.den))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactScalar):
            if isinstance(other, (int, Fraction)):
                other = self.field.scalar(other)
            else:
                return NotImplemented
        return self.re == other.re and self.im == other.im and self.den == other.den

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            if other.field is not self.field and other.field != self.field:
                raise FieldError("field mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        o = self._coerce(other)
        d = math.lcm(self.den, o.den)
        a, b = d // self.den, d // o.den
        return ExactScalar(self.field,
                           tuple(x * a + y * b for x, y in zip(self.re, o.re)),
                           tuple(x * a + y * b for x, y in zip(self.im, o.im)), d)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(self.field, tuple(-c for c in self.re), tuple(-c for c in self.im), self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        n = self.field.degree
        sr, si, orr, oi = self.re, self.im, o.re, o.im
        conv_rr = _conv(sr, orr, n)
        if any(si) or any(oi):
            conv_ii = _conv(si, oi, n)
            conv_ri = _conv(sr, oi, n)
            conv_ir = _conv(si, orr, n)
            re = self.field._reduce([a - b for a, b in zip(conv_rr, conv_ii)])
            im = self.field._reduce([a + b for a, b in zip(conv_ri, conv_ir)])
        else:
            re = self.field._reduce(conv_rr)
            im = (0,) * n
        return ExactScalar(self.field, re, im, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        if any(self.im):
            conj = self.conjugate()
            nrm = self * conj  # real
            return conj * nrm.inverse()
        # extended Euclid in Q[x] modulo min_poly
        n = self.field.degree
        a = [Fraction(c) for c in self.field.min_poly]
        b = [Fraction(c, self.den) for c in self.re]
        s0, s1 = [Fraction(0)], [Fraction(1)]
        a, b = _poly_trim(a), _poly_trim(b)
        while len(b) > 1 or (len(b) == 1 and b[0] != 0):
            q, r = _poly_divmod(a, b)
            a, b = b, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
            if not b:
                break
        # now a = gcd (a nonzero constant since min_poly is irreducible)
        if len(a) != 1 or a[0] == 0:
            raise NotIrreducibleError("inverse failed; min_poly reducible?")
        inv = [c / a[0] for c in s0]
        inv = _poly_rem_modfield(inv, self.field)
        return self.field.from_coeffs(inv[:n])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.field, self.re, tuple(-c for c in self.im), self.den)

    # -- order -------------------------------------------------------------
    def sign(self) -> int:
        """Sign of a real element, decided exactly."""
        if any(self.im):
            raise FieldError("sign of non-real element")
        if self.is_zero():
            return 0
        if self.field._root_exact is not None:
            v = _poly_eval([Fraction(c) for c in self.re], self.field._root_exact)
            return 1 if v > 0 else (-1 if v < 0 else 0)
        width = self.field._iv[1] - self.field._iv[0]
        for _ in range(20000):
            lo, hi = self.field._iv
            vlo, vhi = _interval_eval(self.re, self.den, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            width /= 2
            self.field.refine_interval(width)
        raise FieldError("sign determination did not converge")  # pragma: no cover

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    # -- roots -------------------------------------------------------------
    def sqrt(self) -> "ExactScalar":
        """Exact nonnegative square root, when it exists in the field.

        Handles rational squares, and in quartic fields with min_poly
        x^4 - a*x^2 - b the even/odd-part ansatz that covers all trace-ratio
        radicals produced by the chain algebras.  Raises NotInFieldError
        otherwise.
        """
        if any(self.im):
            raise NotInFieldError("sqrt of non-real element")
        sgn = self.sign()
        if sgn < 0:
            raise NotInFieldError("sqrt of negative element")
        if sgn == 0:
            return self.field.zero
        f = self.field
        if self.is_rational():
            q = self.as_fraction()
            rn, rd = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
            if rn is not None and rd is not None:
                return f.scalar(Fraction(rn, rd))
            if f.degree == 1:
                raise NotInFieldError(f"{q} is not a rational square")
        for cand in self._sqrt_candidates():
            if cand is None:
                continue
            if (cand * cand) == self:
                return cand if cand.sign() >= 0 else -cand
        raise NotInFieldError("square root not found in field")

    def _sqrt_candidates(self):
        f = self.field
        n = f.degree
        if n == 2:
            # y = u + v g, y^2 = u^2 + v^2 g^2 + 2uv g with g^2 = p g + q
            p, q = -f.min_poly[1], -f.min_poly[0]
            A = Fraction(self.re[0], self.den)
            B = Fraction(self.re[1], self.den)
            # u^2 + v^2 q = A ; 2uv + v^2 p = B.  Substitute u = (B - v^2 p)/(2v):
            # (B - v^2 p)^2 / (4 v^2) + v^2 q = A  ->  quadratic in t = v^2.
            pp, qq = Fraction(p), Fraction(q)
            a2 = pp * pp + 4 * qq
            a1 = -(2 * pp * B + 4 * A)
            a0 = B * B
            for t in _quadratic_rational_roots(a2, a1, a0):
                if t > 0:
                    v = _fraction_sqrt(t)
                    if v is not None and v != 0:
                        u = (B - t * pp) / (2 * v)
                        yield f.from_coeffs([u, v])
            if B == 0:
                u2 = A
                u = _fraction_sqrt(u2)
                if u is not None:
                    yield f.from_coeffs([u, 0])
        elif n == 4 and f.min_poly[1] == 0 and f.min_poly[3] == 0:
            # min_poly x^4 - a x^2 - b.  Work over the even subfield
            # K0 = Q(gamma), gamma = g^2, gamma^2 = a*gamma + b, elements (u, v)
            # standing for u + v*gamma.  A square root y = P + Q*g with
            # P, Q in K0 satisfies P^2 + gamma*Q^2 = A, 2PQ = B where
            # x = A + B*g split into even/odd parts.
            a = Fraction(-f.min_poly[2])
            b = Fraction(-f.min_poly[0])
            A = (Fraction(self.re[0], self.den), Fraction(self.re[2], self.den))
            B = (Fraction(self.re[1], self.den), Fraction(self.re[3], self.den))

            def k0_mul(x, y):
                u1, v1 = x
                u2, v2 = y
                cross = u1 * v2 + v1 * u2
                return (u1 * u2 + v1 * v2 * b, cross + v1 * v2 * a)

            def k0_sqrt(x):
                # complete sqrt in the quadratic field K0 (rational coordinates)
                xa, xb = x
                out = []
                if xb == 0:
                    r = _fraction_sqrt(xa)
                    if r is not None:
                        out.append((r, Fraction(0)))
                for t in _quadratic_rational_roots(a * a + 4 * b, -(2 * a * xb + 4 * xa), xb * xb):
                    if t >= 0:
                        v = _fraction_sqrt(t)
                        if v is not None and v != 0:
                            out.append(((xb - t * a) / (2 * v), v))
                return out

            gamma = (Fraction(0), Fraction(1))
            if B == (0, 0):
                for P in k0_sqrt(A):
                    yield f.from_coeffs([P[0], 0, P[1], 0])
                # pure odd root y = Q*g: Q^2 * gamma = A; gamma^{-1} = (gamma - a)/b
                if b != 0:
                    inv_gamma = (Fraction(-a, 1) / b, Fraction(1, 1) / b)
                    for Q in k0_sqrt(k0_mul(A, inv_gamma)):
                        yield f.from_coeffs([0, Q[0], 0, Q[1]])
            elif b != 0:
                # gamma*t^2 - A*t + B^2/4 = 0 over K0 with t = Q^2
                gb2 = k0_mul(gamma, k0_mul(B, B))
                aa = k0_mul(A, A)
                disc = (aa[0] - gb2[0], aa[1] - gb2[1])
                inv2g = (Fraction(-a, 2) / b, Fraction(1, 2) / b)
                for rt in k0_sqrt(disc):
                    for sgn in (1, -1):
                        num = (A[0] + sgn * rt[0], A[1] + sgn * rt[1])
                        t = k0_mul(num, inv2g)
                        for Q in k0_sqrt(t):
                            if Q == (Fraction(0), Fraction(0)):
                                continue
                            inv = _k0_inverse((2 * Q[0], 2 * Q[1]), a, b)
                            if inv is None:
                                continue
                            P = k0_mul(B, inv)
                            yield f.from_coeffs([P[0], Q[0], P[1], Q[1]])
        return

    # -- misc ---------------------------------------------------------------
    def to_complex(self) -> complex:
        x = self.field.float_gen()
        re = sum(c * x**k for k, c in enumerate(self.re)) / self.den
        im = sum(c * x**k for k, c in enumerate(self.im)) / self.den
        return complex(re, im)

    def to_float(self) -> float:
        if any(self.im):
            raise FieldError("non-real")
        return self.to_complex().real

    def __repr__(self) -> str:
        return f"ExactScalar({poly_str(self)})"


def _conv(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a, b):
    m = max(len(a), len(b))
    return _poly_trim([(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(m)])


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(c != 0 for c in a):
        da, la = len(a) - 1, a[-1]
        c = la / lb
        q[da - db] = c
        for k in range(db + 1):
            a[da - db + k] -= c * b[k]
        while a and a[-1] == 0:
            a.pop()
    return _poly_trim(q) or (Fraction(0),), _poly_trim(a)


def _poly_rem_modfield(p, field: NumberField):
    fp = [Fraction(c) for c in field.min_poly]
    r = _poly_rem(list(p), fp)
    return list(r) + [Fraction(0)] * (field.degree - len(r))


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _k0_inverse(x: tuple[Fraction, Fraction], a: Fraction, b: Fraction) -> tuple[Fraction, Fraction] | None:
    """Inverse of u + v*gamma in Q(gamma), gamma^2 = a*gamma + b."""
    u, v = x
    # (u + v*gamma)(p + q*gamma) = (up + b v q) + (uq + vp + a v q)gamma = 1
    det = u * (u + a * v) - b * v * v
    if det == 0:
        return None
    return ((u + a * v) / det, -v / det)


def _fraction_sqrt(q: Fraction) -> Fraction | None:
    rn, rd = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _quadratic_rational_roots(a: Fraction, b: Fraction, c: Fraction) -> list[Fraction]:
    if a == 0:
        return [] if b == 0 else [Fraction(-c, 1) / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    r = _fraction_sqrt(disc)
    if r is None:
        return []
    return [(-b + r) / (2 * a), (-b - r) / (2 * a)]


def poly_str(s: ExactScalar) -> str:
    def part(coeffs):
        terms = []
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"{c}g" if abs(c) != 1 else ("g" if c > 0 else "-g"))
            else:
                terms.append(f"{c}g^{k}" if abs(c) != 1 else (f"g^{k}" if c > 0 else f"-g^{k}"))
        return "+".join(terms).replace("+-", "-") or "0"

    out = part(s.re)
    if any(s.im):
        out += f" + ({part(s.im)})i"
    if s.den != 1:
        out = f"({out})/{s.den}"
    return out


# ---------------------------------------------------------------------------
# Perron-Frobenius data of small nonnegative integer matrices
# ---------------------------------------------------------------------------

class PFResult:
    def __init__(self, value: ExactScalar, vector: list[ExactScalar], exact: bool,
                 enclosure: tuple[Fraction, Fraction] | None = None):
        self.value = value
        self.vector = vector
        self.exact = exact
        self.enclosure = enclosure


def _char_poly(m: list[list[int]]) -> list[Fraction]:
    """Characteristic polynomial det(xI - M) by Faddeev-LeVerrier."""
    n = len(m)
    mm = [[Fraction(v) for v in row] for row in m]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    ak = [row[:] for row in mm]
    prev = None
    for k in range(1, n + 1):
        if k > 1:
            # A_k = M (A_{k-1} + c_{n-k+1} I)
            t = [row[:] for row in prev]
            for i in range(n):
                t[i][i] += coeffs[n - k + 1]
            ak = [[sum(mm[i][l] * t[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(ak[i][i] for i in range(n)) / k
        prev = ak
    return coeffs


def _is_irreducible_matrix(m: list[list[int]]) -> bool:
    n = len(m)
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in range(n):
                if m[v][u] > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != n:
            return False
    return True


def perron_eigen(m: list[list[int]], field: NumberField,
                 norm_vector: Sequence[int] | None = None) -> PFResult:
    """Perron-Frobenius eigenvalue/eigenvector of an irreducible matrix.

    Exact when the eigenvalue can be solved in the field (its minimal factor
    after removing rational roots has degree <= 2); otherwise returns a
    certified rational enclosure of width <= 1e-12 flagged inexact.
    The eigenvector is normalized so <norm_vector, v> = 1 (default all-ones).
    """
    n = len(m)
    if not _is_irreducible_matrix(m):
        raise NotIrreducibleError("matrix is not irreducible")
    cp = _char_poly(m)
    # bound: max row sum
    bound = max(sum(row[j] for j in range(n)) for row in m) + 1
    lam = _largest_root_in_field(cp, field, Fraction(bound))
    if lam is None:
        lo, hi = _largest_real_root_enclosure(cp, Fraction(bound))
        approx = field.scalar((lo + hi) / 2)
        vec = _pf_vector_numeric(m, field, (lo + hi) / 2, norm_vector)
        return PFResult(approx, vec, exact=False, enclosure=(lo, hi))
    vec = _nullspace_vector(m, lam, field)
    if any(v.sign() <= 0 for v in vec):
        vec = [-v for v in vec]
    if any(v.sign() <= 0 for v in vec):
        raise FieldError("PF eigenvector not strictly positive")
    w = norm_vector if norm_vector is not None else [1] * n
    scale = field.zero
    for wi, vi in zip(w, vec):
        scale = scale + field.scalar(wi) * vi
    vec = [v / scale for v in vec]
    return PFResult(lam, vec, exact=True)


def _largest_root_in_field(cp: list[Fraction], field: NumberField, bound: Fraction) -> ExactScalar | None:
    # strip rational roots, then try to solve the rest if degree <= 2
    poly = list(cp)
    rational_roots: list[Fraction] = []
    for _ in range(len(cp)):
        root = _find_rational_root(poly)
        if root is None:
            break
        rational_roots.append(root)
        poly = _deflate(poly, root)
    candidates = [field.scalar(r) for r in rational_roots]
    deg = len(poly) - 1
    if deg >= 1 and any(c != 0 for c in poly[:-1]):
        if deg == 1:
            candidates.append(field.scalar(-poly[0] / poly[1]))
        elif deg == 2:
            a, b, c = poly[2], poly[1], poly[0]
            disc = field.scalar(b * b - 4 * a * c)
            try:
                r = disc.sqrt()
                candidates.append((field.scalar(-b) + r) / field.scalar(2 * a))
                candidates.append((field.scalar(-b) - r) / field.scalar(2 * a))
            except NotInFieldError:
                return None
        else:
            # try quartic = field's own minimal polynomial (scaled match)
            if deg == field.degree and all(Fraction(fc) == pc for fc, pc in zip(field.min_poly, poly)):
                candidates.append(field.gen())
            else:
                return None
    best = None
    for cand in candidates:
        if not cand.is_real():
            continue
        if best is None or cand > best:
            best = cand
    return best


def _find_rational_root(poly: list[Fraction]) -> Fraction | None:
    p = _poly_trim(poly)
    if len(p) <= 1:
        return None
    den = math.lcm(*[c.denominator for c in p])
    ip = [int(c * den) for c in p]
    a0, an = ip[0], ip[-1]
    if a0 == 0:
        return Fraction(0)
    for pnum in _divisors(abs(a0)):
        for pden in _divisors(abs(an)):
            for s in (1, -1):
                r = Fraction(s * pnum, pden)
                if _poly_eval(p, r) == 0:
                    return r
    return None


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _deflate(poly: list[Fraction], root: Fraction) -> list[Fraction]:
    out = []
    acc = Fraction(0)
    for c in reversed(list(_poly_trim(poly))):
        acc = acc * root + c
        out.append(acc)
    out.pop()  # remainder (zero)
    return list(reversed([Fraction(c) for c in out]))


def _largest_real_root_enclosure(cp: list[Fraction], bound: Fraction) -> tuple[Fraction, Fraction]:
    lo, hi = Fraction(0), bound
    # PF root is the largest real root; bisect on sign changes of cp from above
    f = lambda x: _poly_eval(cp, x)
    while f(hi) <= 0:
        hi *= 2
    target = Fraction(1, 10**12)
    while hi - lo > target:
        mid = (lo + hi) / 2
        # count roots in (mid, hi]; PF root above mid iff count >= 1
        if sturm_root_count(cp, mid, hi * 2) >= 1:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _pf_vector_numeric(m, field, approx: Fraction, norm_vector):
    n = len(m)
    # power iteration in exact rationals around the enclosure midpoint
    v = [Fraction(1)] * n
    for _ in range(200):
        w = [sum(Fraction(m[i][j]) * v[j] for j in range(n)) for i in range(n)]
        s = max(w)
        v = [x / s for x in w]
    w = norm_vector if norm_vector is not None else [1] * n
    scale = sum(Fraction(wi) * vi for wi, vi in zip(w, v))
    return [field.scalar(x / scale) for x in v]


def _nullspace_vector(m: list[list[int]], lam: ExactScalar, field: NumberField) -> list[ExactScalar]:
    n = len(m)
    a = [[field.scalar(m[i][j]) - (lam if i == j else field.zero) for j in range(n)] for i in range(n)]
    # gaussian elimination; nullity 1 expected for PF eigenvalue of irreducible m
    rows = [row[:] for row in a]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if not rows[i][c].is_zero()), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        raise FieldError("eigenvalue is not an eigenvalue (no nullspace)")
    fc = free[0]
    v = [field.zero] * n
    v[fc] = field.one
    for pr, pc in enumerate(pivots):
        v[pc] = -rows[pr][fc]
    return v


# common fields ------------------------------------------------------------

def rational_field() -> NumberField:
    return NumberField((0, 1), (Fraction(0), Fraction(0)), name="Q")


def sqrt_phi_field() -> NumberField:
    """Q(sqrt(phi)) = Q[x]/(x^4 - x^2 - 1); g^2 = phi."""
    return NumberField((-1, 0, -1, 0, 1), (Fraction(5, 4), Fraction(13, 10)), name="Q(sqrt(phi))")


def fourth_root_two_field() -> NumberField:
    """Q(2^(1/4)) = Q[x]/(x^4 - 2); g^2 = sqrt(2)."""
    return NumberField((-2, 0, 0, 0, 1), (Fraction(1), Fraction(5, 4)), name="Q(2^(1/4))")


def sqrt2_field() -> NumberField:
    return NumberField((-2, 0, 1), (Fraction(1), Fraction(3, 2)), name="Q(sqrt2)")
