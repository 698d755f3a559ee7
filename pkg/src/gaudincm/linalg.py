"""Dense matrix helpers usable in both scalar modes.

Matrices are lists of row lists.  Exact mode keeps int/Fraction or
ExactScalar entries; float mode keeps Python complex.  Characteristic
polynomials run Faddeev-LeVerrier over integer-scaled entries (exact) or
fall back to eigenvalues (float, reporting only).  Exact linear solves use
fraction-free Bareiss elimination so the result never depends on the
conditioning of the input.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .scalars import ExactScalar, is_exact, magnitude, scalar_eq, to_complex


def mat_dim(m) -> int:
    return len(m)


def is_exact_matrix(m) -> bool:
    return all(is_exact(x) for row in m for x in row)


def identity_matrix(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(n: int, m: int | None = None):
    m = n if m is None else m
    return [[0] * m for _ in range(n)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    return [[s * x for x in row] for row in a]


def mat_neg(a):
    return [[-x for x in row] for row in a]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    bt = list(zip(*b))
    out = []
    for i in range(n):
        ra = a[i]
        row = []
        for j in range(m):
            cb = bt[j]
            acc = ra[0] * cb[0]
            for t in range(1, k):
                acc = acc + ra[t] * cb[t]
            row.append(acc)
        out.append(row)
    return out


def mat_sub_lambda(m, lam):
    """m - lam * I."""
    n = len(m)
    return [[m[i][j] - lam if i == j else m[i][j] for j in range(n)]
            for i in range(n)]


def mat_commutator(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_trace(m):
    t = m[0][0]
    for i in range(1, len(m)):
        t = t + m[i][i]
    return t


def mat_max_abs(m) -> float:
    if not m or not m[0]:
        return 0.0
    return max(magnitude(x) for row in m for x in row)


def mat_is_zero(m) -> bool:
    return all(not x for row in m for x in row)


def mat_equal(a, b) -> bool:
    return all(scalar_eq(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def as_complex_array(m) -> np.ndarray:
    return np.array([[to_complex(x) for x in row] for row in m], dtype=complex)


def from_array(arr) -> list:
    return [[complex(x) for x in row] for row in np.asarray(arr)]


# ---------------------------------------------------------------------------
# integer scaling

def _fraction_parts(x):
    if isinstance(x, int):
        return x, 1
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    raise TypeError(type(x))


def _common_denominator(fractions) -> int:
    d = 1
    for f in fractions:
        d = d * f.denominator // math.gcd(d, f.denominator)
    return d


def _scale_rational_matrix(m):
    """Return (int matrix, denominator D) with int = D * entry."""
    fracs = [Fraction(x) for row in m for x in row]
    d = _common_denominator(fracs)
    n = len(m)
    cols = len(m[0]) if m else 0
    out = []
    it = iter(fracs)
    for _ in range(n):
        out.append([int(next(it) * d) for _ in range(cols)])
    return out, d


def _scale_exactscalar_matrix(m):
    """Return (matrix of 4-int tuples, denominator D)."""
    comps = []
    for row in m:
        for x in row:
            comps.extend(ExactScalar.coerce(x).components())
    d = _common_denominator(comps)
    out = []
    it = iter(comps)
    for row in m:
        out.append([tuple(int(next(it) * d) for _ in range(4)) for _ in row])
    return out, d


# ---------------------------------------------------------------------------
# characteristic polynomials

def _faddeev_leverrier_int(a):
    """Coefficients c[0..n] of det(lam*I - a) for an integer matrix."""
    n = len(a)
    c = [0] * (n + 1)
    c[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # mk <- a @ mk + c[n-k+1] * I
        mk = mat_mul(a, mk)
        ck = c[n - k + 1]
        for i in range(n):
            mk[i][i] += ck
        t = sum(sum(a[i][j] * mk[j][i] for j in range(n)) for i in range(n))
        assert t % k == 0
        c[n - k] = -(t // k)
    return c


_Q4_ZERO = (0, 0, 0, 0)


def _q4_mul(x, y):
    a0, a1, a2, a3 = x
    b0, b1, b2, b3 = y
    return (
        a0 * b0 + 2 * a1 * b1 - a2 * b2 - 2 * a3 * b3,
        a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2,
        a0 * b2 + a2 * b0 + 2 * (a1 * b3 + a3 * b1),
        a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
    )


def _q4_add(x, y):
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3])


def _faddeev_leverrier_q4(a):
    """Same recurrence over Z[sqrt2, i] stored as 4-int tuples."""
    n = len(a)
    c = [_Q4_ZERO] * (n + 1)
    c[n] = (1, 0, 0, 0)
    mk = [[_Q4_ZERO] * n for _ in range(n)]
    for k in range(1, n + 1):
        new = []
        for i in range(n):
            ai = a[i]
            row = []
            for j in range(n):
                acc = _Q4_ZERO
                for t in range(n):
                    acc = _q4_add(acc, _q4_mul(ai[t], mk[t][j]))
                row.append(acc)
            new.append(row)
        mk = new
        ck = c[n - k + 1]
        for i in range(n):
            mk[i][i] = _q4_add(mk[i][i], ck)
        tr = _Q4_ZERO
        for i in range(n):
            acc = _Q4_ZERO
            for j in range(n):
                acc = _q4_add(acc, _q4_mul(a[i][j], mk[j][i]))
            tr = _q4_add(tr, acc)
        assert all(x % k == 0 for x in tr)
        c[n - k] = tuple(-(x // k) for x in tr)
    return c


def char_poly(m):
    """Coefficients (low to high in lam) of det(m - lam*I).

    Exact entries give exact coefficients; float entries go through the
    eigensolver and are for reporting only.
    """
    n = len(m)
    if n == 0:
        return [1]
    if is_exact_matrix(m):
        plain = all(isinstance(x, (int, Fraction)) for row in m for x in row)
        sign = 1 if n % 2 == 0 else -1
        if plain:
            a, d = _scale_rational_matrix(m)
            c = _faddeev_leverrier_int(a)
            return [sign * Fraction(c[k]) * Fraction(d) ** (k - n)
                    for k in range(n + 1)]
        a, d = _scale_exactscalar_matrix(m)
        c = _faddeev_leverrier_q4(a)
        out = []
        for k in range(n + 1):
            s = Fraction(d) ** (k - n) * sign
            out.append(ExactScalar(*(comp * s for comp in c[k])))
        return out
    eigs = np.linalg.eigvals(as_complex_array(m))
    monic = np.poly(eigs)  # det(lam*I - m), highest power first
    sign = (-1) ** n
    return [sign * complex(x) for x in monic[::-1]]


def sorted_eigenvalues(m) -> list:
    """Eigenvalues sorted by (magnitude, phase); float mode only."""
    eigs = np.linalg.eigvals(as_complex_array(m))
    return sorted((complex(x) for x in eigs),
                  key=lambda z: (abs(z), math.atan2(z.imag, z.real)))


# ---------------------------------------------------------------------------
# exact solving (fraction-free Bareiss with exact pivoting)

def _bareiss_echelon(rows, ncols, nrows):
    """In-place fraction-free elimination; returns permutation sign or None."""
    sign = 1
    prev = 1
    for k in range(nrows):
        piv = None
        best = None
        for r in range(k, nrows):
            if rows[r][k] != 0:
                mag = abs(rows[r][k])
                if piv is None or mag > best:
                    piv, best = r, mag
        if piv is None:
            return None
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        pk = rows[k][k]
        for i in range(k + 1, nrows):
            rik = rows[i][k]
            ri = rows[i]
            rk = rows[k]
            for j in range(k + 1, ncols):
                ri[j] = (pk * ri[j] - rik * rk[j]) // prev
            ri[k] = 0
        prev = pk
    return sign


def det_exact(m):
    """Exact determinant of a rational matrix via Bareiss."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    if all(isinstance(x, (int, Fraction)) for row in m for x in row):
        a, d = _scale_rational_matrix(m)
        rows = [list(r) for r in a]
        sign = _bareiss_echelon(rows, n, n)
        if sign is None:
            return Fraction(0)
        return Fraction(sign * rows[n - 1][n - 1], d ** n)
    # ExactScalar fallback: ordinary Gaussian elimination over the field.
    rows = [[ExactScalar.coerce(x) for x in row] for row in m]
    det = ExactScalar(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if rows[r][k]), None)
        if piv is None:
            return ExactScalar(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        pk = rows[k][k]
        det = det * pk
        for i in range(k + 1, n):
            f = rows[i][k] / pk
            for j in range(k, n):
                rows[i][j] = rows[i][j] - f * rows[k][j]
    return det


def solve_exact(a, b):
    """Solve a @ x = b exactly; b may have several columns."""
    n = len(a)
    ncols = len(b[0])
    if all(isinstance(x, (int, Fraction)) for row in a for x in row) and \
       all(isinstance(x, (int, Fraction)) for row in b for x in row):
        aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
        scaled, _ = _scale_rational_matrix(aug)
        if _bareiss_echelon(scaled, n + ncols, n) is None:
            raise ZeroDivisionError("singular matrix in exact solve")
        x = [[Fraction(0)] * ncols for _ in range(n)]
        for i in range(n - 1, -1, -1):
            for j in range(ncols):
                acc = Fraction(scaled[i][n + j])
                for t in range(i + 1, n):
                    acc -= scaled[i][t] * x[t][j]
                x[i][j] = acc / scaled[i][i]
        return x
    aug = [[ExactScalar.coerce(x) for x in ra] + [ExactScalar.coerce(x) for x in rb]
           for ra, rb in zip(a, b)]
    for k in range(n):
        piv = next((r for r in range(k, n) if aug[r][k]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix in exact solve")
        if piv != k:
            aug[k], aug[piv] = aug[piv], aug[k]
        pk = aug[k][k]
        aug[k] = [x / pk for x in aug[k]]
        for i in range(n):
            if i != k and aug[i][k]:
                f = aug[i][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
    return [row[n:] for row in aug]


def solve(a, b):
    """Mode-dispatching linear solve (exact Bareiss or LAPACK LU)."""
    if is_exact_matrix(a) and is_exact_matrix(b):
        return solve_exact(a, b)
    x = np.linalg.solve(as_complex_array(a), as_complex_array(b))
    return from_array(x)


def mat_inverse(a):
    return solve(a, identity_matrix(len(a)))


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient lists, low power first)

def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if not x:
            continue
        for j, y in enumerate(q):
            out[i + j] = out[i + j] + x * y
    return out


def poly_pow(p, k: int):
    out = [1]
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def poly_shift(p, k: int):
    """Multiply by lam**k."""
    return [0] * k + list(p)


def poly_scale(p, s):
    return [s * x for x in p]


def poly_sub(p, q):
    n = max(len(p), len(q))
    p = list(p) + [0] * (n - len(p))
    q = list(q) + [0] * (n - len(q))
    return [x - y for x, y in zip(p, q)]


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_max_abs(p) -> float:
    return max((magnitude(x) for x in p), default=0.0)


def poly_is_zero(p) -> bool:
    return all(not x for x in p)


# ---------------------------------------------------------------------------
# serialization

def mat_to_json(m):
    out = []
    for row in m:
        jr = []
        for x in row:
            z = to_complex(x)
            jr.append([z.real, z.imag])
        out.append(jr)
    return out


def mat_from_json(data):
    return [[complex(re, im) for re, im in row] for row in data]
