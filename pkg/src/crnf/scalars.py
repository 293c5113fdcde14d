"""Exact coefficient rings: Gaussian rationals and parameter polynomials.

All arithmetic is exact; nothing here ever rounds.  ``GaussRat`` is a complex
number with ``fractions.Fraction`` parts.  ``ParamScalar`` is a polynomial in
a finite ordered set of *real* parameter symbols with ``GaussRat``
coefficients; it carries the residual transformation freedom of the
normal-form solver until resonance conditions resolve it.  A degree-0
``ParamScalar`` compares equal to the ``GaussRat`` it wraps.

Parameter symbols are plain indices into a ``ParamRegistry`` (creation
order).  Because exponent keys are stored with trailing zeros stripped,
scalars remain valid when later parameters are created.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction

from .errors import ParameterCapExceededError, SchemaError

_RAT_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")

_DEFAULT_CAP = 4


def _env_cap() -> int:
    raw = os.environ.get("CRNF_PARAM_DEGREE_CAP")
    if raw is None:
        return _DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise SchemaError(f"CRNF_PARAM_DEGREE_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise SchemaError("CRNF_PARAM_DEGREE_CAP must be >= 1")
    return cap


_PARAM_CAP = _env_cap()


def param_degree_cap() -> int:
    return _PARAM_CAP


def set_param_degree_cap(cap: int) -> None:
    global _PARAM_CAP
    if cap < 1:
        raise ValueError("parameter degree cap must be >= 1")
    _PARAM_CAP = cap


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational string "p" or "p/q" (no floats accepted)."""
    if not isinstance(text, str) or not _RAT_RE.match(text.strip()):
        raise SchemaError(f"malformed rational string {text!r}")
    value = Fraction(text.strip())
    return value


def format_rational(value: Fraction) -> str:
    return str(value)


class GaussRat:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def from_strings(cls, re_str: str, im_str: str = "0") -> "GaussRat":
        return cls(parse_rational(re_str), parse_rational(im_str))

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def real_part(self) -> "GaussRat":
        return GaussRat(self.re)

    def imag_part(self) -> "GaussRat":
        return GaussRat(self.im)

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(other.re - self.re, other.im - self.im)

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by zero GaussRat")
        return GaussRat(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__truediv__(self)

    def __eq__(self, other):
        if isinstance(other, ParamScalar):
            return other == self
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRat({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        im = f"{self.im}i" if abs(self.im) != 1 else ("i" if self.im > 0 else "-i")
        if not self.re:
            return im
        sign = "+" if self.im > 0 else ""
        return f"{self.re}{sign}{im}"


_I = GaussRat(0, 1)


def _coerce_gauss(value):
    if isinstance(value, GaussRat):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussRat(value)
    return NotImplemented


def parse_gauss(text: str) -> GaussRat:
    """Parse "3/4", "-1/2i", "3/4+1/2i", "i" into a GaussRat."""
    s = text.strip().replace(" ", "")
    if not s:
        raise SchemaError("empty Gaussian rational string")
    if not s.endswith("i"):
        return GaussRat(parse_rational(s))
    body = s[:-1]
    # split off the real part, if any, at the last top-level +/- sign
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "+-/":
            re_str, im_str = body[:pos], body[pos:]
            break
    else:
        re_str, im_str = "", body
    if im_str in ("", "+"):
        im_str = "1"
    elif im_str == "-":
        im_str = "-1"
    if im_str.endswith("*"):
        im_str = im_str[:-1]
    re_val = parse_rational(re_str) if re_str else Fraction(0)
    return GaussRat(re_val, parse_rational(im_str))


class ParamRegistry:
    """Ordered registry of real parameter symbols (t0, t1, ...)."""

    def __init__(self):
        self.names: list[str] = []

    def fresh(self) -> int:
        idx = len(self.names)
        self.names.append(f"t{idx}")
        return idx

    def name(self, idx: int) -> str:
        return self.names[idx]

    def __len__(self):
        return len(self.names)


def _strip_key(key: tuple[int, ...]) -> tuple[int, ...]:
    k = len(key)
    while k and key[k - 1] == 0:
        k -= 1
    return key[:k]


class ParamScalar:
    """Polynomial in real parameters with GaussRat coefficients.

    Keys are exponent tuples with trailing zeros stripped; the empty tuple
    holds the constant term.  Total parameter degree is capped (default 4,
    overridable via CRNF_PARAM_DEGREE_CAP); products crossing the cap raise
    ParameterCapExceededError rather than silently truncating.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[int, ...], GaussRat] = {}
        if terms:
            for key, val in terms.items():
                val = val if isinstance(val, GaussRat) else GaussRat(val)
                if not val.is_zero():
                    self.terms[_strip_key(tuple(key))] = val

    @classmethod
    def constant(cls, value) -> "ParamScalar":
        return cls({(): value if isinstance(value, GaussRat) else GaussRat(value)})

    @classmethod
    def parameter(cls, idx: int) -> "ParamScalar":
        key = tuple([0] * idx + [1])
        return cls({key: GaussRat(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return not self.is_zero()

    def is_constant(self) -> bool:
        return all(key == () for key in self.terms)

    def constant_value(self) -> GaussRat:
        if not self.is_constant():
            raise ValueError("ParamScalar is not constant")
        return self.terms.get((), GaussRat(0))

    def param_indices(self) -> set[int]:
        used = set()
        for key in self.terms:
            for i, e in enumerate(key):
                if e:
                    used.add(i)
        return used

    def conjugate(self) -> "ParamScalar":
        # parameters are real symbols: conjugation hits coefficients only
        return ParamScalar({k: v.conjugate() for k, v in self.terms.items()})

    def real_part(self) -> "ParamScalar":
        return ParamScalar({k: v.real_part() for k, v in self.terms.items()})

    def imag_part(self) -> "ParamScalar":
        return ParamScalar({k: v.imag_part() for k, v in self.terms.items()})

    def __add__(self, other):
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for key, val in other.terms.items():
            acc = out.get(key)
            acc = val if acc is None else acc + val
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
        res = ParamScalar.__new__(ParamScalar)
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        cap = _PARAM_CAP
        out: dict[tuple[int, ...], GaussRat] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = _mul_key(k1, k2)
                if sum(key) > cap:
                    raise ParameterCapExceededError(
                        f"parameter degree {sum(key)} exceeds cap {cap}"
                    )
                val = v1 * v2
                acc = out.get(key)
                acc = val if acc is None else acc + val
                if acc.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = acc
        res = ParamScalar.__new__(ParamScalar)
        res.terms = out
        return res

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by invertible (constant) scalars is defined
        if isinstance(other, ParamScalar):
            other = other.constant_value()
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        inv = GaussRat(1) / other
        return self * inv

    def __eq__(self, other):
        if isinstance(other, ParamScalar):
            return self.terms == other.terms
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return self.is_constant() and self.constant_value() == other

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def max_power(self, idx: int) -> int:
        power = 0
        for key in self.terms:
            if idx < len(key):
                power = max(power, key[idx])
        return power

    def coefficient_of(self, idx: int) -> "ParamScalar":
        """Coefficient of the first power of parameter ``idx`` (exponent removed)."""
        out = {}
        for key, val in self.terms.items():
            if idx < len(key) and key[idx] == 1:
                reduced = list(key)
                reduced[idx] = 0
                out[_strip_key(tuple(reduced))] = val
        return ParamScalar(out)

    def without(self, idx: int) -> "ParamScalar":
        """Terms not involving parameter ``idx`` at all."""
        out = {
            key: val
            for key, val in self.terms.items()
            if idx >= len(key) or key[idx] == 0
        }
        return ParamScalar(out)

    def substitute(self, idx: int, value) -> "ParamScalar":
        """Replace parameter ``idx`` by ``value`` (scalar or ParamScalar)."""
        value = _coerce_param(value)
        groups: dict[int, ParamScalar] = {}
        for key, val in self.terms.items():
            power = key[idx] if idx < len(key) else 0
            reduced = list(key)
            if idx < len(reduced):
                reduced[idx] = 0
            term = ParamScalar({_strip_key(tuple(reduced)): val})
            groups[power] = groups.get(power, ParamScalar()) + term
        result = ParamScalar()
        value_power = ParamScalar.constant(1)
        for power in range(0, max(groups) + 1 if groups else 0):
            if power in groups:
                result = result + groups[power] * value_power
            value_power = value_power * value
        return result

    def degree(self) -> int:
        return max((sum(key) for key in self.terms), default=0)

    def to_string(self, registry: ParamRegistry | None = None) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for key in sorted(self.terms, key=lambda k: (sum(k), k)):
            val = self.terms[key]
            mono = "*".join(
                f"{registry.name(i) if registry else f't{i}'}"
                + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(key)
                if e
            )
            parts.append(f"({val}){'*' + mono if mono else ''}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ParamScalar({self.to_string()})"


def _mul_key(k1: tuple[int, ...], k2: tuple[int, ...]) -> tuple[int, ...]:
    if not k1:
        return k2
    if not k2:
        return k1
    n = max(len(k1), len(k2))
    out = [0] * n
    for i, e in enumerate(k1):
        out[i] += e
    for i, e in enumerate(k2):
        out[i] += e
    return _strip_key(tuple(out))


def _coerce_param(value):
    if isinstance(value, ParamScalar):
        return value
    g = _coerce_gauss(value)
    if g is NotImplemented:
        return NotImplemented
    return ParamScalar.constant(g)


# ---------------------------------------------------------------------------
# ring-generic helpers shared by poly / normalform


def sc_conj(s):
    return s.conjugate()


def sc_is_zero(s) -> bool:
    return s.is_zero()


def sc_real(s):
    return s.real_part()


def sc_imag(s):
    return s.imag_part()


def sc_combine(re_s, im_s):
    """re_s + i*im_s for scalars whose parts are real."""
    return re_s + _I * im_s


def as_gauss_if_constant(s):
    """Demote a constant ParamScalar to GaussRat; pass GaussRat through."""
    if isinstance(s, ParamScalar) and s.is_constant():
        return s.constant_value()
    return s
