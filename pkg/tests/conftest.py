"""Shared test oracles, deliberately independent of the library internals.

Polynomials here are plain dicts {(m, n): (re, im)} with Fraction parts, and
the linear algebra is a self-contained dense elimination, so oracle values
never flow through the code paths they are meant to check.
"""

from fractions import Fraction
from math import factorial

import pytest

from crnf import BiPoly, GaussRat


# -- dict-polynomial helpers -------------------------------------------------


def d_from(poly: BiPoly) -> dict:
    out = {}
    for (m, n), val in poly.coeff.items():
        assert isinstance(val, GaussRat)
        out[(m, n)] = (val.re, val.im)
    return out


def d_to(d: dict) -> BiPoly:
    return BiPoly({k: GaussRat(re, im) for k, (re, im) in d.items()})


def d_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, (re, im) in b.items():
        ore, oim = out.get(k, (Fraction(0), Fraction(0)))
        re, im = ore + re, oim + im
        if re or im:
            out[k] = (re, im)
        else:
            out.pop(k, None)
    return out


def d_scale(a: dict, re: Fraction, im: Fraction = Fraction(0)) -> dict:
    out = {}
    for k, (ar, ai) in a.items():
        nr, ni = ar * re - ai * im, ar * im + ai * re
        if nr or ni:
            out[k] = (nr, ni)
    return out


def d_mul(a: dict, b: dict) -> dict:
    out = {}
    for (m1, n1), (r1, i1) in a.items():
        for (m2, n2), (r2, i2) in b.items():
            key = (m1 + m2, n1 + n2)
            re = r1 * r2 - i1 * i2
            im = r1 * i2 + i1 * r2
            ore, oim = out.get(key, (Fraction(0), Fraction(0)))
            re, im = ore + re, oim + im
            if re or im:
                out[key] = (re, im)
            else:
                out.pop(key, None)
    return out


def d_conj(a: dict) -> dict:
    return {(n, m): (re, -im) for (m, n), (re, im) in a.items()}


def d_diff(a: dict, dz: int, dzb: int) -> dict:
    out = {}
    for (m, n), (re, im) in a.items():
        if m < dz or n < dzb:
            continue
        c = Fraction(1)
        for i in range(dz):
            c *= m - i
        for i in range(dzb):
            c *= n - i
        out[(m - dz, n - dzb)] = (re * c, im * c)
    return out


def d_trace(a: dict) -> dict:
    return d_add(d_diff(a, 2, 0), d_diff(a, 0, 2))


def oracle_pair(p: dict, r: dict):
    """Brute-force Fischer pairing over the monomial basis: sum m! n! conj(p) r."""
    re_acc, im_acc = Fraction(0), Fraction(0)
    for (m, n), (pr, pi) in p.items():
        if (m, n) not in r:
            continue
        rr, ri = r[(m, n)]
        w = Fraction(factorial(m) * factorial(n))
        # conj(p) * r = (pr - i pi)(rr + i ri)
        re_acc += w * (pr * rr + pi * ri)
        im_acc += w * (pr * ri - pi * rr)
    return re_acc, im_acc


# -- independent dense linear algebra ----------------------------------------


def oracle_solve(matrix, rhs):
    """Gaussian elimination over Fractions; returns the unique solution."""
    n = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def oracle_nullspace(rows, n_cols):
    """Basis of the rational nullspace via independent elimination."""
    mat = [list(map(Fraction, row)) for row in rows]
    n_rows = len(mat)
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = None
        for i in range(r, n_rows):
            if mat[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = Fraction(1) / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(n_rows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -mat[row][fc]
        basis.append(vec)
    return basis


@pytest.fixture
def rng():
    import random

    return random.Random(20260810)
