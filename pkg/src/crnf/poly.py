"""Exact bivariate polynomials in (z, zbar) and the Fischer machinery on them.

A ``BiPoly`` is a sparse map from bidegree (m, n) to an exact scalar
(GaussRat or ParamScalar), representing sum of c_{m,n} z^m zbar^n.  Zero
coefficients are never stored; iteration is graded lexicographic by
(m+n, m) so serialized output is deterministic.

The module also provides the structure constants of the theory:

* ``conj_poly`` -- the formal conjugate, c_{m,n} -> conj(c_{n,m});
* ``trace`` -- d^2/dz^2 + d^2/dzbar^2, the Fischer adjoint of multiplication
  by Q = z^2 + zbar^2;
* ``fischer_pair`` -- the pairing in which z^m zbar^n has squared norm m! n!;
* ``adjoint_apply`` -- application of the conjugate-coefficient differential
  operator attached to a homogeneous polynomial.

Values are immutable by convention: no public operation mutates its inputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .errors import SchemaError
from .scalars import (
    GaussRat,
    ParamScalar,
    format_rational,
    parse_rational,
    sc_conj,
    sc_is_zero,
)


def _coerce_scalar(value):
    if isinstance(value, (GaussRat, ParamScalar)):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussRat(value)
    raise TypeError(f"not a scalar: {value!r}")


class BiPoly:
    __slots__ = ("coeff",)

    def __init__(self, coeff=None):
        self.coeff: dict[tuple[int, int], object] = {}
        if coeff:
            for (m, n), val in coeff.items():
                val = _coerce_scalar(val)
                if not sc_is_zero(val):
                    self.coeff[(int(m), int(n))] = val

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "BiPoly":
        return cls()

    @classmethod
    def monomial(cls, m: int, n: int, value=1) -> "BiPoly":
        return cls({(m, n): value})

    @classmethod
    def constant(cls, value) -> "BiPoly":
        return cls({(0, 0): value})

    # -- structure ----------------------------------------------------------

    def terms(self):
        """Terms in graded-lex order by (m+n, m)."""
        for key in sorted(self.coeff, key=lambda k: (k[0] + k[1], k[0])):
            yield key, self.coeff[key]

    def get(self, m: int, n: int):
        return self.coeff.get((m, n), GaussRat(0))

    def is_zero(self) -> bool:
        return not self.coeff

    def total_degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return max((m + n for m, n in self.coeff), default=-1)

    def min_degree(self) -> int:
        return min((m + n for m, n in self.coeff), default=-1)

    def homogeneous_degree(self):
        """The common total degree, or None if not homogeneous (zero -> 0)."""
        degrees = {m + n for m, n in self.coeff}
        if not degrees:
            return 0
        if len(degrees) > 1:
            return None
        return degrees.pop()

    def homogeneous_component(self, d: int) -> "BiPoly":
        return BiPoly({k: v for k, v in self.coeff.items() if k[0] + k[1] == d})

    def truncate(self, bound: int) -> "BiPoly":
        return BiPoly({k: v for k, v in self.coeff.items() if k[0] + k[1] <= bound})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        out = dict(self.coeff)
        for key, val in other.coeff.items():
            acc = out.get(key)
            acc = val if acc is None else acc + val
            if sc_is_zero(acc):
                out.pop(key, None)
            else:
                out[key] = acc
        res = BiPoly.__new__(BiPoly)
        res.coeff = out
        return res

    def __sub__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return BiPoly({k: -v for k, v in self.coeff.items()})

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            other = _coerce_scalar(other)
            return self.scale(other)
        out: dict[tuple[int, int], object] = {}
        for (m1, n1), v1 in self.coeff.items():
            for (m2, n2), v2 in other.coeff.items():
                key = (m1 + m2, n1 + n2)
                val = v1 * v2
                acc = out.get(key)
                acc = val if acc is None else acc + val
                if sc_is_zero(acc):
                    out.pop(key, None)
                else:
                    out[key] = acc
        res = BiPoly.__new__(BiPoly)
        res.coeff = out
        return res

    def __rmul__(self, other):
        return self * other

    def scale(self, scalar) -> "BiPoly":
        scalar = _coerce_scalar(scalar)
        if sc_is_zero(scalar):
            return BiPoly()
        return BiPoly({k: v * scalar for k, v in self.coeff.items()})

    def __pow__(self, exponent: int) -> "BiPoly":
        if exponent < 0:
            raise ValueError("negative power of a polynomial")
        result = BiPoly.constant(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def mul_truncated(self, other: "BiPoly", bound: int) -> "BiPoly":
        out: dict[tuple[int, int], object] = {}
        for (m1, n1), v1 in self.coeff.items():
            for (m2, n2), v2 in other.coeff.items():
                m, n = m1 + m2, n1 + n2
                if m + n > bound:
                    continue
                val = v1 * v2
                key = (m, n)
                acc = out.get(key)
                acc = val if acc is None else acc + val
                if sc_is_zero(acc):
                    out.pop(key, None)
                else:
                    out[key] = acc
        res = BiPoly.__new__(BiPoly)
        res.coeff = out
        return res

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        if self.coeff.keys() != other.coeff.keys():
            return False
        return all(other.coeff[k] == v for k, v in self.coeff.items())

    def __hash__(self):
        return hash(frozenset((k, str(v)) for k, v in self.coeff.items()))

    # -- calculus -----------------------------------------------------------

    def diff(self, dz: int = 0, dzbar: int = 0) -> "BiPoly":
        """Exact partial derivative d^dz/dz^dz d^dzbar/dzbar^dzbar."""
        out = {}
        for (m, n), val in self.coeff.items():
            if m < dz or n < dzbar:
                continue
            c = Fraction(1)
            for i in range(dz):
                c *= m - i
            for i in range(dzbar):
                c *= n - i
            out[(m - dz, n - dzbar)] = val * c
        return BiPoly(out)

    def substitute(self, z_expr: "BiPoly", zbar_expr: "BiPoly", bound: int) -> "BiPoly":
        """P(z_expr, zbar_expr) truncated to total degree <= bound.

        Exact below the bound provided both expressions have no constant term
        smaller-degree leakage (the usual jet situation: linear-or-higher
        substitutions).
        """
        if bound < 0:
            raise ValueError("bound must be >= 0")
        max_m = max((m for m, _ in self.coeff), default=0)
        max_n = max((n for _, n in self.coeff), default=0)
        z_pows = _powers(z_expr, max_m, bound)
        zb_pows = _powers(zbar_expr, max_n, bound)
        result = BiPoly()
        for (m, n), val in self.coeff.items():
            term = z_pows[m].mul_truncated(zb_pows[n], bound)
            result = result + term.scale(val)
        return result.truncate(bound)

    # -- conjugation --------------------------------------------------------

    def conj(self) -> "BiPoly":
        return BiPoly({(n, m): sc_conj(v) for (m, n), v in self.coeff.items()})

    def real_twice(self) -> "BiPoly":
        """P + conj(P), the 2*Re{...} of the transformation equations."""
        return self + self.conj()

    # -- display ------------------------------------------------------------

    def __repr__(self):
        if self.is_zero():
            return "BiPoly(0)"
        parts = []
        for (m, n), val in self.terms():
            mono = ""
            if m:
                mono += f"z^{m}" if m > 1 else "z"
            if n:
                mono += f"*zb^{n}" if n > 1 else "*zb"
            mono = mono.lstrip("*")
            parts.append(f"({val}){'*' + mono if mono else ''}")
        return "BiPoly(" + " + ".join(parts) + ")"


def _powers(base: BiPoly, top: int, bound: int) -> list[BiPoly]:
    pows = [BiPoly.constant(1)]
    for _ in range(top):
        pows.append(pows[-1].mul_truncated(base, bound))
    return pows


# ---------------------------------------------------------------------------
# fixed polynomials

Z = BiPoly.monomial(1, 0)
ZBAR = BiPoly.monomial(0, 1)


def quadric() -> BiPoly:
    """Q = z^2 + zbar^2, the fixed model quadric."""
    return BiPoly({(2, 0): 1, (0, 2): 1})


Q = quadric()
Q_Z = BiPoly.monomial(1, 0, 2)  # dQ/dz = 2z


# ---------------------------------------------------------------------------
# module operations


def conj_poly(p: BiPoly) -> BiPoly:
    return p.conj()


def trace(p: BiPoly) -> BiPoly:
    """tr = d^2/dz^2 + d^2/dzbar^2; drops every monomial degree by 2."""
    return p.diff(2, 0) + p.diff(0, 2)


_FACTORIALS: dict[int, int] = {}


def _fact(k: int) -> int:
    val = _FACTORIALS.get(k)
    if val is None:
        val = factorial(k)
        _FACTORIALS[k] = val
    return val


def fischer_pair(p: BiPoly, r: BiPoly):
    """sum over (m,n) of m! n! conj(p_{m,n}) r_{m,n} for equal-degree homogeneous input.

    Conjugate-symmetric and positive definite; raises on degree mismatch or
    non-homogeneous arguments.
    """
    dp = p.homogeneous_degree()
    dr = r.homogeneous_degree()
    if dp is None or dr is None:
        raise ValueError("fischer_pair requires homogeneous arguments")
    if not p.is_zero() and not r.is_zero() and dp != dr:
        raise ValueError(f"fischer_pair degree mismatch: {dp} vs {dr}")
    acc = GaussRat(0)
    for (m, n), val in p.coeff.items():
        other = r.coeff.get((m, n))
        if other is None:
            continue
        acc = acc + sc_conj(val) * other * Fraction(_fact(m) * _fact(n))
    return acc


def adjoint_apply(p: BiPoly, r: BiPoly) -> BiPoly:
    """Apply P* = sum conj(p_{m,n}) d^{m+n}/dz^m dzbar^n to r.

    When deg r == deg p the result is the constant fischer_pair(p, r); degree
    underflow contributes zero.  The adjoint identity
    fischer_pair(P*A, B) == fischer_pair(A, adjoint_apply(P, B)) holds for
    homogeneous arguments of compatible degrees.
    """
    if p.homogeneous_degree() is None:
        raise ValueError("adjoint_apply requires a homogeneous operator polynomial")
    result = BiPoly()
    for (m, n), val in p.coeff.items():
        result = result + r.diff(m, n).scale(sc_conj(val))
    return result


def adjoint_pair_scalar(p: BiPoly, r: BiPoly):
    """Scalar value of adjoint_apply(p, r) for equal-degree input."""
    out = adjoint_apply(p, r)
    if out.is_zero():
        return GaussRat(0)
    if out.total_degree() != 0:
        raise ValueError("adjoint_pair_scalar needs deg r == deg p")
    return out.get(0, 0)


# ---------------------------------------------------------------------------
# polynomial literal format: list of {m, n, re, im} with exact rational strings


def poly_to_records(p: BiPoly) -> list[dict]:
    records = []
    for (m, n), val in p.terms():
        if isinstance(val, ParamScalar):
            val = val.constant_value()  # raises if genuinely parametric
        rec = {"m": m, "n": n, "re": format_rational(val.re)}
        if val.im:
            rec["im"] = format_rational(val.im)
        records.append(rec)
    return records


def poly_from_records(records) -> BiPoly:
    if not isinstance(records, list):
        raise SchemaError("polynomial literal must be a list of {m, n, re, im} records")
    coeff = {}
    for rec in records:
        if not isinstance(rec, dict) or "m" not in rec or "n" not in rec:
            raise SchemaError(f"bad polynomial record: {rec!r}")
        m, n = rec["m"], rec["n"]
        if not isinstance(m, int) or not isinstance(n, int) or m < 0 or n < 0:
            raise SchemaError(f"bad bidegree in record: {rec!r}")
        re = parse_rational(rec.get("re", "0"))
        im = parse_rational(rec.get("im", "0"))
        key = (m, n)
        if key in coeff:
            raise SchemaError(f"duplicate bidegree {key} in polynomial literal")
        coeff[key] = GaussRat(re, im)
    return BiPoly(coeff)
