"""Exact linear algebra over the rationals.

Everything works on lists of Fraction rows.  The systems here are small
(at most ~24x24), so dense Gaussian elimination with exact arithmetic is both
simple and fast.  Pivoting is by fixed column order (first nonzero entry in
the current column), which keeps every result deterministic.

``RationalSystem`` factors a matrix once and then solves repeatedly against
right-hand sides whose entries live in any commutative ring supporting
addition and multiplication by Fraction (GaussRat, ParamScalar); this is how
parameter-carrying data flows through rational solves without losing
exactness.
"""

from __future__ import annotations

from fractions import Fraction

Row = list
Matrix = list


def identity(n: int) -> Matrix:
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = len(b[0]) if b else 0
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
        for i in range(len(a))
    ]


def mat_vec(a: Matrix, v: list) -> list:
    """Matrix times vector; vector entries may be ring elements."""
    out = []
    for row in a:
        acc = None
        for c, x in zip(row, v):
            if not c:
                continue
            term = x * c
            acc = term if acc is None else acc + term
        if acc is None:
            acc = Fraction(0)
        out.append(acc)
    return out


def rref(matrix: Matrix):
    """Reduced row echelon form with transform: returns (R, E, pivot_cols).

    E is the accumulated row-operation matrix with E @ matrix == R exactly.
    """
    rows = [list(r) for r in matrix]
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    e = identity(n_rows)
    pivot_cols = []
    r = 0
    for c in range(n_cols):
        pivot = None
        for i in range(r, n_rows):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        e[r], e[pivot] = e[pivot], e[r]
        inv = Fraction(1) / rows[r][c]
        if inv != 1:
            rows[r] = [x * inv for x in rows[r]]
            e[r] = [x * inv for x in e[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                e[i] = [x - f * y for x, y in zip(e[i], e[r])]
        pivot_cols.append(c)
        r += 1
        if r == n_rows:
            break
    return rows, e, pivot_cols


def invert(matrix: Matrix) -> Matrix:
    n = len(matrix)
    r, e, pivots = rref(matrix)
    if len(pivots) != n:
        raise ArithmeticError("matrix is singular")
    return e


class RationalSystem:
    """A factored rational matrix, reusable against ring-valued RHS vectors."""

    def __init__(self, matrix: Matrix):
        self.matrix = [list(r) for r in matrix]
        self.n_rows = len(matrix)
        self.n_cols = len(matrix[0]) if self.n_rows else 0
        self.rref, self.transform, self.pivot_cols = rref(matrix)
        self.free_cols = [c for c in range(self.n_cols) if c not in set(self.pivot_cols)]
        self.rank = len(self.pivot_cols)

    def kernel_basis(self) -> list[list[Fraction]]:
        """One basis vector per free column, in column order."""
        basis = []
        for free in self.free_cols:
            vec = [Fraction(0)] * self.n_cols
            vec[free] = Fraction(1)
            for r, piv in enumerate(self.pivot_cols):
                vec[piv] = -self.rref[r][free]
            basis.append(vec)
        return basis

    def solve(self, rhs: list, on_inconsistent=None):
        """Particular solution with free variables set to zero.

        ``rhs`` entries may be ring elements.  Consistency is checked
        identically (rows beyond the rank must reduce to ring zero); an
        inconsistent system raises ArithmeticError unless ``on_inconsistent``
        is given, in which case it is called with the offending row index.
        """
        reduced = mat_vec(self.transform, rhs)
        for i in range(self.rank, self.n_rows):
            entry = reduced[i]
            zero = (not entry) if isinstance(entry, Fraction) else entry.is_zero()
            if not zero:
                if on_inconsistent is not None:
                    return on_inconsistent(i)
                raise ArithmeticError("inconsistent linear system")
        solution = [Fraction(0)] * self.n_cols
        for r, piv in enumerate(self.pivot_cols):
            solution[piv] = reduced[r]
        return solution


def nullspace(matrix: Matrix) -> list[list[Fraction]]:
    return RationalSystem(matrix).kernel_basis()
