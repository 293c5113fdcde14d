"""Surfaces w = Q + a(z, zbar), formal maps, and push-forward machinery.

A ``Surface`` stores only the tail coefficients a_{m,n} for 3 <= m+n <= N
over the fixed quadric Q = z^2 + zbar^2; the degree-2 part is implicit and
never stored.  A ``FormalMap`` is a pair (f, g) with f = z + (k+l>=2 terms),
g = w + (k+l>=2 terms); g_{2,0} is additionally forbidden because the
degree-2 balance of the transformation equation forces it to vanish for any
map between surfaces of this class.

``push_forward`` re-graphs the image of a surface by parametrizing over z,
mapping, and inverting the z-component as a two-variable jet.  This is
deliberately a mechanism independent of the degree-by-degree solver, so the
invariance tests are not circular; ``transform_residual`` cross-checks both.
"""

from __future__ import annotations

from .errors import SchemaError
from .poly import BiPoly, Q, Z, conj_poly, poly_from_records, poly_to_records
from .scalars import (
    GaussRat,
    ParamScalar,
    as_gauss_if_constant,
    format_rational,
    parse_rational,
)


def _coerce_scalar(value):
    if isinstance(value, (GaussRat, ParamScalar)):
        return value
    return GaussRat(value)


class Surface:
    """Truncated real-formal surface w = Q(z, zbar) + sum a_{m,n} z^m zbar^n."""

    __slots__ = ("truncation", "coeff")

    def __init__(self, truncation: int, coeff=None):
        if truncation < 3:
            raise ValueError("surface truncation must be >= 3")
        self.truncation = truncation
        self.coeff: dict[tuple[int, int], object] = {}
        if coeff:
            for (m, n), val in coeff.items():
                d = m + n
                if d < 3:
                    raise ValueError(f"surface coefficient below degree 3: {(m, n)}")
                if d > truncation:
                    raise ValueError(f"surface coefficient above truncation: {(m, n)}")
                val = _coerce_scalar(val)
                if not val.is_zero():
                    self.coeff[(m, n)] = val

    @classmethod
    def model(cls, truncation: int) -> "Surface":
        return cls(truncation)

    def tail(self) -> BiPoly:
        return BiPoly(self.coeff)

    def degree_part(self, d: int) -> BiPoly:
        return BiPoly({k: v for k, v in self.coeff.items() if k[0] + k[1] == d})

    def is_model(self) -> bool:
        return not self.coeff

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        return self.truncation == other.truncation and self.tail() == other.tail()

    def first_difference_degree(self, other: "Surface"):
        """Lowest degree at which the coefficient tables differ, or None."""
        top = min(self.truncation, other.truncation)
        for d in range(3, top + 1):
            if self.degree_part(d) != other.degree_part(d):
                return d
        return None

    def __repr__(self):
        return f"Surface(N={self.truncation}, tail={self.tail()!r})"


class FormalMap:
    """Formal transformation (z, w) -> (z + f-tail, w + g-tail).

    ``f`` and ``g`` map (k, l) with k + l >= 2 to scalars; the identity
    linear part is implicit.  g_{2,0} must vanish (see module docstring).
    """

    __slots__ = ("truncation", "f", "g")

    def __init__(self, truncation: int, f=None, g=None):
        self.truncation = truncation
        self.f: dict[tuple[int, int], object] = {}
        self.g: dict[tuple[int, int], object] = {}
        for target, source, label in ((self.f, f, "f"), (self.g, g, "g")):
            if not source:
                continue
            for (k, l), val in source.items():
                if k < 0 or l < 0 or k + l < 2:
                    raise ValueError(f"{label}[{k},{l}]: map terms need k+l >= 2")
                val = _coerce_scalar(val)
                if val.is_zero():
                    continue
                target[(k, l)] = val
        if (2, 0) in self.g:
            raise ValueError("g[2,0] must vanish for maps preserving the quadric class")

    @classmethod
    def identity(cls, truncation: int) -> "FormalMap":
        return cls(truncation)

    def is_identity(self) -> bool:
        return not self.f and not self.g

    def __eq__(self, other):
        if not isinstance(other, FormalMap):
            return NotImplemented
        return (
            self.truncation == other.truncation
            and _dict_eq(self.f, other.f)
            and _dict_eq(self.g, other.g)
        )

    def f_weight_terms(self, weight: int) -> dict:
        """f coefficients with k + 2l == weight."""
        return {kl: v for kl, v in self.f.items() if kl[0] + 2 * kl[1] == weight}

    def g_weight_terms(self, weight: int) -> dict:
        return {kl: v for kl, v in self.g.items() if kl[0] + 2 * kl[1] == weight}

    def __repr__(self):
        return f"FormalMap(N={self.truncation}, f={self.f!r}, g={self.g!r})"


def _dict_eq(a: dict, b: dict) -> bool:
    if a.keys() != b.keys():
        return False
    return all(b[k] == v for k, v in a.items())


# ---------------------------------------------------------------------------
# graph substitution


def graph_series(m: Surface) -> BiPoly:
    """h = Q + tail, the graph function with w = h on the surface."""
    return Q + m.tail()


def _series_on_graph(terms: dict, h_powers: list[BiPoly], bound: int) -> BiPoly:
    result = BiPoly()
    for (k, l), val in terms.items():
        if k + 2 * l > bound:
            continue
        term = BiPoly.monomial(k, 0, val).mul_truncated(h_powers[l], bound)
        result = result + term
    return result


def _h_powers(h: BiPoly, terms_list, bound: int) -> list[BiPoly]:
    top = 0
    for terms in terms_list:
        for (_, l) in terms:
            top = max(top, l)
    pows = [BiPoly.constant(1)]
    for _ in range(top):
        pows.append(pows[-1].mul_truncated(h, bound))
    return pows


def eval_map_on_graph(phi: FormalMap, h: BiPoly, bound: int):
    """(f(z, h), g(z, h)) truncated to total degree <= bound."""
    pows = _h_powers(h, (phi.f, phi.g), bound)
    z_image = Z + _series_on_graph(phi.f, pows, bound)
    w_image = h.truncate(bound) + _series_on_graph(phi.g, pows, bound)
    return z_image, w_image


def invert_2d_jet(u: BiPoly, bound: int):
    """Inverse jet of u = z + O(2) as a series in the image coordinates.

    Returns (sigma, conj sigma) with u(sigma, conj sigma) == z' exactly up to
    total degree ``bound``; computed by fixed-point iteration, convergent in
    at most ``bound`` steps.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if u.get(1, 0) != GaussRat(1) or not u.get(0, 1).is_zero() or not u.get(0, 0).is_zero():
        raise ValueError("invert_2d_jet requires linear part exactly z")
    higher = (u - Z).truncate(bound)
    sigma = Z
    for _ in range(bound):
        sigma = Z - higher.substitute(sigma, conj_poly(sigma), bound)
    return sigma, conj_poly(sigma)


def push_forward(m: Surface, phi: FormalMap) -> Surface:
    """The image surface of ``m`` under ``phi``, re-graphed over the new z.

    Raises ValueError if the image graph's degree-2 part differs from Q
    (the map left the class).
    """
    if phi.truncation < m.truncation:
        raise ValueError("map truncation must cover the surface truncation")
    n = m.truncation
    h = graph_series(m).truncate(n)
    z_image, w_image = eval_map_on_graph(phi, h, n)
    sigma, sigma_bar = invert_2d_jet(z_image, n)
    h_prime = w_image.substitute(sigma, sigma_bar, n)
    low = BiPoly({k: v for k, v in h_prime.coeff.items() if k[0] + k[1] <= 2})
    if low != Q:
        raise ValueError("map left the class: image quadric part differs from Q")
    coeff = {
        k: as_gauss_if_constant(v)
        for k, v in h_prime.coeff.items()
        if k[0] + k[1] >= 3
    }
    return Surface(n, coeff)


def transform_residual(m: Surface, phi: FormalMap, m_prime: Surface, bound: int) -> BiPoly:
    """g(z,h) - [Q(F, conj F) + a'(F, conj F)] with w = h(z, zbar), truncated.

    Zero exactly when phi maps ``m`` into ``m_prime`` to the given order.
    """
    h = graph_series(m).truncate(bound)
    z_image, w_image = eval_map_on_graph(phi, h, bound)
    f_bar = conj_poly(z_image)
    rhs = z_image.mul_truncated(z_image, bound) + f_bar.mul_truncated(f_bar, bound)
    rhs = rhs + m_prime.tail().substitute(z_image, f_bar, bound)
    return (w_image - rhs).truncate(bound)


def compose_maps(first: FormalMap, second: FormalMap, bound: int | None = None) -> FormalMap:
    """second after first, truncated to (z, w)-degree <= bound.

    Uses BiPoly as a plain container for (z, w)-series (no conjugation is
    involved in map composition).
    """
    if bound is None:
        bound = min(first.truncation, second.truncation)
    f1 = Z + BiPoly(first.f).truncate(bound)
    g1 = BiPoly.monomial(0, 1) + BiPoly(first.g).truncate(bound)
    f2 = Z + BiPoly(second.f).truncate(bound)
    g2 = BiPoly.monomial(0, 1) + BiPoly(second.g).truncate(bound)
    f_comp = f2.substitute(f1, g1, bound)
    g_comp = g2.substitute(f1, g1, bound)
    f_tail = {}
    for (k, l), val in f_comp.coeff.items():
        if (k, l) == (1, 0):
            if val != GaussRat(1):
                raise ValueError("composition lost the identity linear part")
            continue
        if k + l < 2:
            raise ValueError(f"composition produced low-order f term {(k, l)}")
        f_tail[(k, l)] = val
    g_tail = {}
    for (k, l), val in g_comp.coeff.items():
        if (k, l) == (0, 1):
            if val != GaussRat(1):
                raise ValueError("composition lost the identity linear part")
            continue
        if k + l < 2:
            raise ValueError(f"composition produced low-order g term {(k, l)}")
        g_tail[(k, l)] = val
    return FormalMap(bound, f_tail, g_tail)


# ---------------------------------------------------------------------------
# file formats


def _scalar_to_json(val):
    val = as_gauss_if_constant(val)
    if isinstance(val, GaussRat):
        rec = {"re": format_rational(val.re)}
        if val.im:
            rec["im"] = format_rational(val.im)
        return rec
    # parametric coefficient (resonance = off outputs)
    terms = []
    for key in sorted(val.terms, key=lambda k: (sum(k), k)):
        coeff = val.terms[key]
        term = {"params": {f"t{i}": e for i, e in enumerate(key) if e}}
        term["re"] = format_rational(coeff.re)
        if coeff.im:
            term["im"] = format_rational(coeff.im)
        terms.append(term)
    return {"param_terms": terms}


def _scalar_from_json(rec):
    if not isinstance(rec, dict):
        raise SchemaError(f"bad coefficient record: {rec!r}")
    if "param_terms" in rec:
        terms = {}
        for term in rec["param_terms"]:
            params = term.get("params", {})
            top = -1
            for name in params:
                if not name.startswith("t") or not name[1:].isdigit():
                    raise SchemaError(f"bad parameter name {name!r}")
                top = max(top, int(name[1:]))
            key = [0] * (top + 1)
            for name, exp in params.items():
                key[int(name[1:])] = int(exp)
            coeff = GaussRat(
                parse_rational(term.get("re", "0")), parse_rational(term.get("im", "0"))
            )
            terms[tuple(key)] = coeff
        return ParamScalar(terms)
    return GaussRat(parse_rational(rec.get("re", "0")), parse_rational(rec.get("im", "0")))


def surface_to_json(m: Surface) -> dict:
    coeffs = []
    for (mm, nn), val in sorted(m.coeff.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][0])):
        rec = {"m": mm, "n": nn}
        rec.update(_scalar_to_json(val))
        coeffs.append(rec)
    return {"truncation": m.truncation, "coeffs": coeffs}


def surface_from_json(data) -> Surface:
    if not isinstance(data, dict) or "truncation" not in data:
        raise SchemaError("surface file must be an object with 'truncation' and 'coeffs'")
    n = data["truncation"]
    if not isinstance(n, int):
        raise SchemaError("surface truncation must be an integer")
    coeff = {}
    for rec in data.get("coeffs", []):
        if not isinstance(rec, dict) or "m" not in rec or "n" not in rec:
            raise SchemaError(f"bad surface coefficient record: {rec!r}")
        key = (rec["m"], rec["n"])
        if key in coeff:
            raise SchemaError(f"duplicate surface coefficient {key}")
        coeff[key] = _scalar_from_json(rec)
    try:
        return Surface(n, coeff)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def map_to_json(phi: FormalMap) -> dict:
    out = {"truncation": phi.truncation, "f": [], "g": []}
    for label, table in (("f", phi.f), ("g", phi.g)):
        for (k, l), val in sorted(table.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][0])):
            rec = {"k": k, "l": l}
            rec.update(_scalar_to_json(val))
            out[label].append(rec)
    return out


def map_from_json(data) -> FormalMap:
    if not isinstance(data, dict) or "truncation" not in data:
        raise SchemaError("map file must be an object with 'truncation', 'f', 'g'")
    n = data["truncation"]
    if not isinstance(n, int):
        raise SchemaError("map truncation must be an integer")
    tables = {"f": {}, "g": {}}
    for label in ("f", "g"):
        for rec in data.get(label, []):
            if not isinstance(rec, dict) or "k" not in rec or "l" not in rec:
                raise SchemaError(f"bad map coefficient record: {rec!r}")
            key = (rec["k"], rec["l"])
            if key in tables[label]:
                raise SchemaError(f"duplicate map coefficient {label}[{key}]")
            tables[label][key] = _scalar_from_json(rec)
    try:
        return FormalMap(n, tables["f"], tables["g"])
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
