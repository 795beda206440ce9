"""Exact rational scalars, vectors and dense matrices.

Scalars are ``gmpy2.mpq`` values (arbitrary precision, always reduced).
Vectors are tuples of scalars and matrices are tuples of row tuples, so
everything here is immutable and hashable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

Rational = type(mpq())
Vector = tuple
Matrix = tuple

ZERO = mpq(0)
ONE = mpq(1)


class SingularError(ValueError):
    pass


def rat(x) -> Rational:
    """Coerce an int, Fraction, mpq, float or "p/q" string to an exact rational."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational literal")
        return mpq(s)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, type(mpz()))):
        return mpq(x)
    if isinstance(x, float):
        # exact binary value of the float
        return mpq(x)
    return mpq(x)


def rat_str(x) -> str:
    """Canonical "p/q" string ("p" when the denominator is 1)."""
    return str(rat(x))


def vec(xs: Iterable) -> Vector:
    return tuple(rat(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(vec(r) for r in rows)
    if m and len({len(r) for r in m}) != 1:
        raise ValueError("ragged matrix")
    return m


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    s = ZERO
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def smul(c, v: Sequence) -> Vector:
    c = rat(c)
    return tuple(c * a for a in v)


def neg(v: Sequence) -> Vector:
    return tuple(-a for a in v)


def lincomb(coeffs: Sequence, vectors: Sequence[Sequence]) -> Vector:
    if not vectors:
        raise ValueError("empty combination")
    out = [ZERO] * len(vectors[0])
    for c, v in zip(coeffs, vectors):
        if c:
            for i, a in enumerate(v):
                if a:
                    out[i] += c * a
    return tuple(out)


def centroid(points: Sequence[Sequence]) -> Vector:
    n = len(points)
    return smul(mpq(1, n), lincomb([ONE] * n, points))


def matvec(m: Matrix, v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def vecmat(v: Sequence, m: Matrix) -> Vector:
    """Row vector times matrix (v^T M)."""
    return matvec(transpose(m), v)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mscale(c, m: Matrix) -> Matrix:
    c = rat(c)
    return tuple(tuple(c * a for a in row) for row in m)


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def _clear_denominators(row: Sequence) -> list:
    den = mpz(1)
    for a in row:
        den = gmpy2.lcm(den, a.denominator)
    return [mpz(a * den) for a in row]


def rank(m: Sequence[Sequence]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination.

    Pivots are taken as the first nonzero entry in column order.
    """
    rows = [_clear_denominators(r) for r in m if len(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    prev = mpz(1)
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            q = rows[i][c]
            rows[i] = [(p * rows[i][j] - q * rows[r][j]) // prev for j in range(ncols)]
        prev = p
        r += 1
        if r == len(rows):
            break
    return r


def rref(m: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and the pivot column list."""
    a = [list(map(rat, row)) for row in m]
    if not a:
        return [], []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        if p != 1:
            a[r] = [x / p for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a[:r], pivots


def kernel_basis(m: Sequence[Sequence], ncols: int | None = None) -> list[Vector]:
    """Basis of the right null space {v : M v = 0}."""
    if not m:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [unit(ncols, i) for i in range(ncols)]
    red, pivots = rref(m)
    n = len(m[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(a: Matrix, b: Sequence) -> Vector:
    """Unique solution of the square system A x = b."""
    n = len(a)
    aug = [list(row) + [rat(bi)] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise SingularError("singular system")
    return tuple(row[n] for row in red)


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("inverse of a non-square matrix")
    aug = [list(row) + list(unit(n, i)) for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise SingularError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of the first maximal linearly independent subfamily, greedily."""
    chosen: list[int] = []
    basis: list = []
    for i, v in enumerate(vectors):
        if rank(basis + [v]) > len(basis):
            basis.append(v)
            chosen.append(i)
    return chosen


def complete_basis_annihilating(x0: Sequence, given: Sequence[Sequence]) -> list[Vector]:
    """Extend ``given`` = [x0*, x1*, ..., xm*] to a basis of the dual space.

    Completion vectors are taken from the standard basis in order and then
    corrected by subtracting x_j*(x0) x0*, so every added functional
    vanishes at x0.
    """
    given = [vec(g) for g in given]
    x0 = vec(x0)
    if not given:
        raise ValueError("given must contain x0*")
    if dot(given[0], x0) != 1:
        raise ValueError("x0*(x0) must equal 1")
    if rank(given) != len(given):
        raise ValueError("given functionals are linearly dependent")
    n = len(x0)
    out = list(given)
    for i in range(n):
        if len(out) == n:
            break
        e = unit(n, i)
        if rank(out + [e]) > len(out):
            out.append(sub(e, smul(dot(e, x0), given[0])))
    return out


def biorthogonal_vectors(functionals: Sequence[Sequence]) -> list[Vector]:
    """Vectors x_j with x_i*(x_j) = delta_ij (columns of the inverse)."""
    f = mat(functionals)
    rows, cols = shape(f)
    if rows != cols:
        raise ValueError("functional basis must be square")
    inv = inverse(f)
    return list(transpose(inv))


def pairing_matrix(functionals: Sequence[Sequence], vectors: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(dot(f, v) for v in vectors) for f in functionals)


def sqrt_exact(q) -> Rational | None:
    """Exact rational square root, or None when q is not a rational square."""
    q = rat(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    num, den = q.numerator, q.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


def sqrt_upper(q, digits: int = 30) -> Rational:
    """A rational upper bound on sqrt(q), tight to about ``digits`` decimals."""
    q = rat(q)
    exact = sqrt_exact(q)
    if exact is not None:
        return exact
    scale = mpz(10) ** digits
    return mpq(gmpy2.isqrt(mpz(q * scale * scale)) + 1, scale)


def to_float_vec(v: Sequence) -> list[float]:
    return [float(a) for a in v]
