"""Fischer division by Q = z^2 + zbar^2 and the normalization spaces built on it.

The division P = Q*A + R with trace(R) = 0 exists and is unique for every
homogeneous P; it is computed by solving the linear system
trace(Q*A) = trace(P) on the coefficient space of A (that map is a bijection
for this Q, asserted at factorization time).  Iterating the division on
successive quotients gives the chain decomposition whose remainders define
the normalization spaces; harmonic parts C_k of the powers z^k and the
invariant cubic W are the other named objects of the theory.

Results are cached per degree; the caches are read-mostly and never change a
result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .poly import BiPoly, Q, adjoint_apply, conj_poly, fischer_pair, trace
from .scalars import GaussRat


@dataclass(frozen=True)
class FischerSplit:
    """P = Q*quotient + remainder with trace(remainder) = 0."""

    quotient: BiPoly
    remainder: BiPoly


@dataclass(frozen=True)
class ChainDecomposition:
    """Iterated division data: P = R_1 + Q R_2 + ... + Q^K * final_quotient.

    ``remainders[j]`` is R_{j+1} (degree p - 2j); ``quotients[j]`` is P_{j+1},
    the quotient produced at the same stage (so the last quotient equals
    ``final_quotient``).  The iteration stops once the quotient degree drops
    below 2, so K = floor(p/2) stages for degree p >= 2.
    """

    degree: int
    remainders: tuple
    quotients: tuple
    final_quotient: BiPoly

    def reassemble(self) -> BiPoly:
        total = BiPoly()
        q_power = BiPoly.constant(1)
        for rem in self.remainders:
            total = total + q_power * rem
            q_power = q_power * Q
        return total + q_power * self.final_quotient


_DIVIDE_SYSTEMS: dict[int, linalg.RationalSystem] = {}


def _monomials(d: int) -> list[tuple[int, int]]:
    return [(m, d - m) for m in range(d + 1)]


def _divide_system(d: int) -> linalg.RationalSystem:
    """Factored matrix of A -> trace(Q*A) on homogeneous degree-d space."""
    system = _DIVIDE_SYSTEMS.get(d)
    if system is not None:
        return system
    basis = _monomials(d)
    index = {mn: i for i, mn in enumerate(basis)}
    size = len(basis)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for col, (a, b) in enumerate(basis):
        # trace(Q * z^a zbar^b) expanded on the degree-d monomial basis
        matrix[index[(a, b)]][col] += Fraction((a + 2) * (a + 1) + (b + 2) * (b + 1))
        if a >= 2:
            matrix[index[(a - 2, b + 2)]][col] += Fraction(a * (a - 1))
        if b >= 2:
            matrix[index[(a + 2, b - 2)]][col] += Fraction(b * (b - 1))
    system = linalg.RationalSystem(matrix)
    if system.rank != size:
        raise ArithmeticError(f"trace(Q * .) is singular at degree {d}")  # never for this Q
    _DIVIDE_SYSTEMS[d] = system
    return system


def fischer_divide(p: BiPoly) -> FischerSplit:
    """Unique split P = Q*A + R with trace(R) = 0 (P homogeneous).

    For degree < 2 the split is (0, P) by convention so chain decomposition
    terminates uniformly.
    """
    degree = p.homogeneous_degree()
    if degree is None:
        raise ValueError("fischer_divide requires homogeneous input")
    if degree < 2:
        return FischerSplit(BiPoly(), p)
    d = degree - 2
    basis = _monomials(d)
    rhs_poly = trace(p)
    rhs = [rhs_poly.get(m, n) for m, n in basis]
    solution = _divide_system(d).solve(rhs)
    quotient = BiPoly({mn: val for mn, val in zip(basis, solution)})
    remainder = p - Q * quotient
    assert trace(remainder).is_zero(), "Fischer remainder must be trace-free"
    return FischerSplit(quotient, remainder)


_HARMONIC_CACHE: dict[int, BiPoly] = {}


def harmonic_power(k: int) -> BiPoly:
    """C_k, the trace-free remainder of z^k under division by Q (k > 2)."""
    if k <= 2:
        raise ValueError("harmonic parts C_k are defined only for k > 2")
    cached = _HARMONIC_CACHE.get(k)
    if cached is None:
        cached = fischer_divide(BiPoly.monomial(k, 0)).remainder
        _HARMONIC_CACHE[k] = cached
    return cached


def chain_decompose(p: BiPoly) -> ChainDecomposition:
    """Iterate fischer_divide on successive quotients until degree < 2."""
    degree = p.homogeneous_degree()
    if degree is None:
        raise ValueError("chain_decompose requires homogeneous input")
    remainders = []
    quotients = []
    current = p
    while current.total_degree() >= 2:
        split = fischer_divide(current)
        remainders.append(split.remainder)
        quotients.append(split.quotient)
        current = split.quotient
    return ChainDecomposition(degree, tuple(remainders), tuple(quotients), current)


def in_normal_space(p: BiPoly, strategy: str = "chain") -> bool:
    """Membership in the normalization space at the degree of ``p``.

    ``chain``: every chain remainder R of degree d > 2 is annihilated by the
    adjoints of C_d and conj(C_d) (trace-freeness is automatic).  The
    conditions are applied degree-matched; see the package docs for the
    indexing caveat.

    ``ortho``: p lies in the Fischer-orthogonal complement of the image of
    the degree block operator (delegated to the normalform module).
    """
    if p.is_zero():
        return True
    degree = p.homogeneous_degree()
    if degree is None:
        raise ValueError("in_normal_space requires homogeneous input")
    if strategy == "chain":
        for rem in chain_decompose(p).remainders:
            d = rem.total_degree()
            if d <= 2:
                continue
            c_d = harmonic_power(d)
            if not adjoint_apply(c_d, rem).is_zero():
                return False
            if not adjoint_apply(conj_poly(c_d), rem).is_zero():
                return False
        return True
    if strategy == "ortho":
        from . import normalform

        return normalform.in_ortho_normal_space(p)
    raise ValueError(f"unknown strategy {strategy!r}")


def compute_W(a3: BiPoly) -> BiPoly:
    """The invariant cubic: the Q-multiple component of a degree-3 polynomial.

    Equivalently the Fischer-orthogonal projection of a3 away from
    span{C_3, conj C_3}; W == 0 exactly when a3 is trace-free.
    """
    if not a3.is_zero() and a3.homogeneous_degree() != 3:
        raise ValueError("compute_W requires a homogeneous degree-3 polynomial")
    split = fischer_divide(a3)
    return Q * split.quotient


def chain_space_basis(degree: int) -> list[BiPoly]:
    """Complex basis of the literal chain normal space at the given degree.

    Built layer by layer: Q^j times the allowed remainder space at degree
    degree - 2j (trace-free intersected with ker C_d* and ker conj(C_d)* for
    d > 2, all of the trace-free space for d == 2), plus Q^K times the full
    final-quotient space (degree <= 1).
    """
    basis: list[BiPoly] = []
    q_power = BiPoly.constant(1)
    d = degree
    while d >= 2:
        for rem in _allowed_remainders(d):
            basis.append(q_power * rem)
        q_power = q_power * Q
        d -= 2
    if d >= 0:
        for m in range(d + 1):
            basis.append(q_power * BiPoly.monomial(m, d - m))
    return basis


def _allowed_remainders(d: int) -> list[BiPoly]:
    basis = _monomials(d)
    rows = []
    tr_rows = _operator_rows(trace, d, d - 2)
    rows.extend(tr_rows)
    if d > 2:
        c_d = harmonic_power(d)
        rows.extend(_operator_rows(lambda p: adjoint_apply(c_d, p), d, 0))
        rows.extend(_operator_rows(lambda p: adjoint_apply(conj_poly(c_d), p), d, 0))
    if not rows:
        return [BiPoly.monomial(m, n) for m, n in basis]
    kernel = linalg.nullspace(rows)
    return [
        BiPoly({mn: val for mn, val in zip(basis, vec)})
        for vec in kernel
    ]


def _operator_rows(op, d_in: int, d_out: int) -> list[list[Fraction]]:
    """Rows of a complex-linear operator in the monomial bases (real structure constants)."""
    src = _monomials(d_in)
    dst = _monomials(max(d_out, 0))
    rows = [[Fraction(0)] * len(src) for _ in dst]
    if d_out < 0:
        return []
    for col, (m, n) in enumerate(src):
        image = op(BiPoly.monomial(m, n))
        for r, mn in enumerate(dst):
            val = image.get(*mn)
            if isinstance(val, GaussRat):
                assert val.im == 0  # structure constants of these operators are real
                rows[r][col] = val.re
            else:
                rows[r][col] = Fraction(val)
    return rows
