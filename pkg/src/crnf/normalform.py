"""Degree-by-degree normalization of surfaces w = Q + O(3).

For each degree T >= 3 the unknown block consists of the map coefficients
f_{m,n} with m + 2n = T - 1 and g_{m,n} with m + 2n = T (restricted to the
admissible shape k + l >= 2).  Their contribution to the degree-T part of the
transformation equation is the real-linear operator

    L_T(f, g) = g_T(z, Q) - 2 Re{ Q_z(z, zbar) * f_T(z, Q) },   Q_z = 2z,

acting into the real vector space of complex homogeneous degree-T
polynomials (real dimension 2(T+1)).  Writing v_T for the degree-T part of
the equation assembled from all previously determined data, the degree-T
step solves

    a'_T = v_T + L_T(x),    a'_T in the normal space,

i.e. a'_T is the projection of v_T onto the normal space and x solves
L_T x = a'_T - v_T, uniquely modulo ker L_T.  Kernel coordinates become
fresh real parameters; with the w-chain resonance rule active, the degree-3
chain remainders of the resolved component v_T - a'_T are paired against the
invariant cubic W of the emerging normal form and the resulting scalar
conditions consume the parameters, oldest first.  Parameters never consumed
below the truncation are closed to zero at the end of a w-chain run and
reported as such; with resonance off the output stays parametric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import linalg
from .errors import ChainInfeasibleError, DegenerateWError, NonAffineResolutionError
from .fischer import chain_space_basis, compute_W
from .poly import BiPoly, conj_poly
from .scalars import GaussRat, ParamRegistry, ParamScalar, as_gauss_if_constant
from .surface import FormalMap, Surface, eval_map_on_graph, graph_series

_I = GaussRat(0, 1)


# ---------------------------------------------------------------------------
# degree-2 gate


@dataclass(frozen=True)
class GateVerdict:
    """Outcome of the linear-part consistency check g01*Q = Q(f10*z, ...)."""

    accepted: bool
    f10: GaussRat
    g01: GaussRat
    violated: str | None = None

    @property
    def normalized(self):
        # accepted pairs are brought to (1, 1) by a model automorphism
        return (GaussRat(1), GaussRat(1)) if self.accepted else None


def solve_linear_gate(f10: GaussRat, g01: GaussRat) -> GateVerdict:
    """Accept exactly the pairs with g01 = f10^2 and f10^2 real (f10 != 0)."""
    if not isinstance(f10, GaussRat):
        f10 = GaussRat(f10)
    if not isinstance(g01, GaussRat):
        g01 = GaussRat(g01)
    if f10.is_zero():
        return GateVerdict(False, f10, g01, violated="f10 != 0")
    square = f10 * f10
    if not square.is_real():
        return GateVerdict(False, f10, g01, violated="Im(f10^2) == 0")
    if g01 != square:
        return GateVerdict(False, f10, g01, violated="g01 == f10^2")
    assert g01.is_real()  # Im g01 = 0 on every accepted pair
    return GateVerdict(True, f10, g01)


# ---------------------------------------------------------------------------
# vector encodings: degree-T complex polynomials <-> real coefficient vectors


def _monomials(t: int):
    return [(m, t - m) for m in range(t + 1)]


def _to_scalar(x):
    return GaussRat(x) if isinstance(x, (Fraction, int)) else x


def poly_to_vec(p: BiPoly, t: int) -> list:
    """[re, im] pairs per monomial in graded-lex order; entries are ring scalars."""
    vec = []
    for m, n in _monomials(t):
        val = p.get(m, n)
        if isinstance(val, ParamScalar):
            vec.append(val.real_part())
            vec.append(val.imag_part())
        else:
            vec.append(GaussRat(val.re))
            vec.append(GaussRat(val.im))
    return vec


def vec_to_poly(vec: list, t: int) -> BiPoly:
    coeff = {}
    for i, (m, n) in enumerate(_monomials(t)):
        re_s = _to_scalar(vec[2 * i])
        im_s = _to_scalar(vec[2 * i + 1])
        coeff[(m, n)] = re_s + _I * im_s
    return BiPoly(coeff)


def _frac_vec(p: BiPoly, t: int) -> list[Fraction]:
    out = []
    for m, n in _monomials(t):
        val = p.get(m, n)
        assert isinstance(val, GaussRat)
        out.append(val.re)
        out.append(val.im)
    return out


def _vec_sub(a: list, b: list) -> list:
    return [x - y if not isinstance(x, (Fraction, int)) or not isinstance(y, (Fraction, int))
            else Fraction(x) - Fraction(y)
            for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# degree blocks


class DegreeBlock:
    """The real-linear degree-T operator with its exact linear algebra.

    ``unknowns`` lists ("g"|"f", m, n) in the fixed pivot order (g before f,
    graded lexicographic within each); every unknown contributes two real
    columns (real and imaginary part).
    """

    def __init__(self, t: int):
        if t < 3:
            raise ValueError("degree blocks start at T = 3")
        self.degree = t
        self.unknowns = self._unknown_list(t)
        columns = []
        for kind, m, n in self.unknowns:
            for unit in (GaussRat(1), _I):
                columns.append(_frac_vec(self._column_poly(kind, m, n, unit), t))
        rows = 2 * (t + 1)
        matrix = [[columns[c][r] for c in range(len(columns))] for r in range(rows)]
        self.matrix = matrix
        self.system = linalg.RationalSystem(matrix)
        self.kernel_basis = self.system.kernel_basis()
        self.gram = [
            Fraction(factorial(m) * factorial(n)) for m, n in _monomials(t) for _ in (0, 1)
        ]
        self._image_cols = [
            [matrix[r][c] for r in range(rows)] for c in self.system.pivot_cols
        ]
        self._orth_rows = [
            [col[r] * self.gram[r] for r in range(rows)] for col in self._image_cols
        ]
        self._projector = self._build_projector(rows)
        self.complement_basis = linalg.nullspace(self._orth_rows) if self._orth_rows else [
            [Fraction(i == j) for j in range(rows)] for i in range(rows)
        ]
        self._chain = None

    @staticmethod
    def _unknown_list(t: int):
        unknowns = []
        for n in range(t // 2, -1, -1):
            unknowns.append(("g", t - 2 * n, n))
        for n in range((t - 1) // 2, -1, -1):
            m = t - 1 - 2 * n
            if m + n >= 2:
                unknowns.append(("f", m, n))
        return unknowns

    @staticmethod
    def _column_poly(kind: str, m: int, n: int, unit: GaussRat) -> BiPoly:
        from .poly import Q  # local to avoid polluting module namespace

        base = BiPoly.monomial(m, 0, unit) * Q**n
        if kind == "g":
            return base
        x = BiPoly.monomial(1, 0, 2) * base  # Q_z * f-term
        return -(x + conj_poly(x))

    def _build_projector(self, rows: int):
        """I - C (C^T Phi C)^-1 C^T Phi onto the Fischer-orthogonal complement."""
        cols = self._image_cols
        if not cols:
            return linalg.identity(rows)
        k = len(cols)
        gram = [
            [
                sum(cols[i][r] * self.gram[r] * cols[j][r] for r in range(rows))
                for j in range(k)
            ]
            for i in range(k)
        ]
        gram_inv = linalg.invert(gram)
        # M = C gram_inv C^T Phi
        ct_phi = [[cols[j][r] * self.gram[r] for r in range(rows)] for j in range(k)]
        inner = linalg.mat_mul(gram_inv, ct_phi)  # k x rows
        proj = [[Fraction(0)] * rows for _ in range(rows)]
        for r in range(rows):
            for j in range(k):
                cj = cols[j][r]
                if not cj:
                    continue
                row = inner[j]
                target = proj[r]
                for c in range(rows):
                    if row[c]:
                        target[c] += cj * row[c]
        for r in range(rows):
            proj[r] = [
                (Fraction(1) if r == c else Fraction(0)) - proj[r][c] for c in range(rows)
            ]
        return proj

    # -- public operations --------------------------------------------------

    def apply(self, x_vec: list) -> list:
        return linalg.mat_vec(self.matrix, x_vec)

    def project_normal(self, v_vec: list) -> list:
        """Fischer-orthogonal projection of a target vector off the image."""
        return linalg.mat_vec(self._projector, v_vec)

    def is_normal(self, v_vec: list) -> bool:
        for row in self._orth_rows:
            acc = None
            for c, x in zip(row, v_vec):
                if not c:
                    continue
                term = x * c
                acc = term if acc is None else acc + term
            if acc is not None and not (acc.is_zero() if not isinstance(acc, Fraction) else not acc):
                return False
        return True

    def solve(self, rhs_vec: list) -> list:
        """Particular solution of L_T x = rhs (free coordinates zero)."""
        return self.system.solve(rhs_vec)

    def chain_fit(self, v_vec: list) -> list:
        """Minimal-Fischer-norm a' in the chain space with v - a' in Im L_T.

        Raises ChainInfeasibleError when the literal chain reading admits no
        solution at this degree.
        """
        t = self.degree
        if self._chain is None:
            basis = chain_space_basis(t)
            cols = []
            for b in basis:
                for unit in (GaussRat(1), _I):
                    cols.append(_frac_vec(b * unit if unit != GaussRat(1) else b, t))
            self._chain = cols
        chain_cols = self._chain
        rows = 2 * (t + 1)
        n_chain = len(chain_cols)
        combined = [
            [chain_cols[c][r] for c in range(n_chain)]
            + [col[r] for col in self._image_cols]
            for r in range(rows)
        ]
        system = linalg.RationalSystem(combined)

        def infeasible(_row):
            raise ChainInfeasibleError(
                t, "chain normal space plus block image does not reach the data"
            )

        particular = system.solve(v_vec, on_inconsistent=infeasible)
        kernel = system.kernel_basis()
        alpha0 = particular[:n_chain]
        kernel_alpha = [k[:n_chain] for k in kernel]
        if kernel_alpha:
            # minimize |C alpha|^2_Phi over the affine solution set (exact normal equations)
            gram_c = [
                [
                    sum(
                        chain_cols[i][r] * self.gram[r] * chain_cols[j][r]
                        for r in range(rows)
                    )
                    for j in range(n_chain)
                ]
                for i in range(n_chain)
            ]

            def q_form(u, w):
                acc = None
                for i in range(n_chain):
                    if isinstance(u[i], Fraction) and not u[i]:
                        continue
                    row = gram_c[i]
                    for j in range(n_chain):
                        if not row[j]:
                            continue
                        term = u[i] * row[j] * w[j] if not isinstance(w[j], Fraction) else u[i] * (row[j] * w[j])
                        acc = term if acc is None else acc + term
                return acc if acc is not None else Fraction(0)

            n_free = len(kernel_alpha)
            normal = [
                [q_form(kernel_alpha[i], kernel_alpha[j]) for j in range(n_free)]
                for i in range(n_free)
            ]
            rhs = [-q_form(kernel_alpha[i], alpha0) for i in range(n_free)]
            coeffs = linalg.RationalSystem(normal).solve(rhs)
            for s, kv in zip(coeffs, kernel_alpha):
                alpha0 = [a + s * k for a, k in zip(alpha0, kv)]
        out = []
        for r in range(rows):
            acc = None
            for c in range(n_chain):
                val = alpha0[c]
                if isinstance(val, Fraction):
                    if not val:
                        continue
                    term = chain_cols[c][r] * val
                else:
                    term = val * chain_cols[c][r]
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else Fraction(0))
        return out


_BLOCK_CACHE: dict[int, DegreeBlock] = {}


def build_block(t: int) -> DegreeBlock:
    block = _BLOCK_CACHE.get(t)
    if block is None:
        block = DegreeBlock(t)
        _BLOCK_CACHE[t] = block
    return block


def in_ortho_normal_space(p: BiPoly) -> bool:
    """Is p Fischer-orthogonal to the image of its degree block?"""
    if p.is_zero():
        return True
    t = p.homogeneous_degree()
    if t is None:
        raise ValueError("homogeneous input required")
    if t < 3:
        return False
    return build_block(t).is_normal(poly_to_vec(p, t))


# ---------------------------------------------------------------------------
# normalize


@dataclass
class ConditionRecord:
    degree: int
    status: str  # "resolved" | "free"
    parameter: str
    detail: str = ""


@dataclass
class ParamRecord:
    name: str
    index: int
    birth_degree: int
    status: str = "unresolved"  # "unresolved" | "resolved" | "closed"
    value: object | None = None


@dataclass
class DegreeReport:
    degree: int
    kernel_dim: int
    params_introduced: list
    conditions: list = field(default_factory=list)
    normal_component: BiPoly | None = None
    chain_membership: bool | None = None  # comparison diagnostic (degrees <= 6)


@dataclass
class NormalFormResult:
    surface: Surface
    map: FormalMap
    order: int
    strategy: str
    resonance: str
    invariant_w: BiPoly
    degrees: list
    params: list

    def unresolved_params(self):
        return [p.name for p in self.params if p.status == "unresolved"]

    def first_difference_degree(self, other: "NormalFormResult"):
        return self.surface.first_difference_degree(other.surface)


class _RunState:
    """Mutable solver state with parameter substitution plumbing."""

    def __init__(self):
        self.registry = ParamRegistry()
        self.params: list[ParamRecord] = []
        self.f: dict[tuple[int, int], object] = {}
        self.g: dict[tuple[int, int], object] = {}
        self.aprime: dict[tuple[int, int], object] = {}

    def fresh_param(self, birth_degree: int) -> int:
        idx = self.registry.fresh()
        self.params.append(ParamRecord(self.registry.name(idx), idx, birth_degree))
        return idx

    def reduce_scalar(self, scalar):
        """Substitute every already-assigned parameter out of ``scalar``."""
        if not isinstance(scalar, ParamScalar):
            return scalar
        for idx in sorted(scalar.param_indices()):
            record = self.params[idx]
            if record.status != "unresolved":
                scalar = scalar.substitute(idx, record.value)
        return scalar

    def assign(self, idx: int, value, status: str):
        """Substitute parameter idx := value everywhere and record it."""
        if isinstance(value, ParamScalar):
            # values must only reference still-unresolved parameters
            assert all(
                self.params[i].status == "unresolved" for i in value.param_indices()
            )
        record = self.params[idx]
        record.status = status
        record.value = value
        for table in (self.f, self.g, self.aprime):
            for key in list(table):
                val = table[key]
                if isinstance(val, ParamScalar):
                    new = val.substitute(idx, value)
                    if new.is_zero():
                        del table[key]
                    else:
                        table[key] = new
        for other in self.params:
            if other.index != idx and isinstance(other.value, ParamScalar):
                other.value = other.value.substitute(idx, value)

    def partial_map(self, truncation: int) -> FormalMap:
        return FormalMap(truncation, dict(self.f), dict(self.g))


def _degree_defect(m: Surface, state: _RunState, t: int) -> BiPoly:
    """Degree-T part of g(z,h) - Q(F, conj F) - a'_{<T}(F, conj F)."""
    h = graph_series(m).truncate(t)
    phi = state.partial_map(max(t, 3))
    z_image, w_image = eval_map_on_graph(phi, h, t)
    f_bar = conj_poly(z_image)
    value = w_image - z_image.mul_truncated(z_image, t) - f_bar.mul_truncated(f_bar, t)
    if state.aprime:
        value = value - BiPoly(state.aprime).substitute(z_image, f_bar, t)
    return value.homogeneous_component(t)


def _affine_structure(entries: list, live: list[int], t: int):
    """Split ring-vector entries into constant part and live-parameter columns.

    Returns (c0, columns) with c0 a Fraction vector and columns[j] the exact
    coefficient vector of parameter live[j].  Raises NonAffineResolutionError
    when any entry is not affine in the live parameters (higher powers or
    parameter-valued coefficients).
    """
    c0 = []
    columns = [[] for _ in live]
    for entry in entries:
        if not isinstance(entry, ParamScalar):
            val = GaussRat(entry) if isinstance(entry, (Fraction, int)) else entry
            assert val.is_real()
            c0.append(val.re)
            for col in columns:
                col.append(Fraction(0))
            continue
        residual = entry
        for j, idx in enumerate(live):
            if entry.max_power(idx) > 1:
                raise NonAffineResolutionError(
                    t,
                    f"normal component depends nonlinearly on parameter t{idx}",
                )
            coeff = entry.coefficient_of(idx)
            if not coeff.is_constant():
                raise NonAffineResolutionError(
                    t,
                    f"normal component has a parameter-valued coefficient on t{idx}",
                )
            c = coeff.constant_value()
            assert c.is_real()
            columns[j].append(c.re)
            if not c.is_zero():
                residual = residual - ParamScalar.parameter(idx) * c
        if not residual.is_constant():
            raise NonAffineResolutionError(
                t, "normal component involves parameters beyond the live set"
            )
        const = residual.constant_value()
        assert const.is_real()
        c0.append(const.re)
    return c0, columns


def _resolve_orbit(
    ap_vec: list,
    block: DegreeBlock,
    state: _RunState,
    report: DegreeReport,
):
    """Consume live parameters whose action reaches the normal component.

    The normal component at this degree is an affine family c0 + Lambda * t
    over the still-unresolved parameters.  The canonical representative is
    the Fischer-orthogonal projection of c0 off the Lambda-span; the
    parameter combination realizing it is resolved exactly (unique modulo
    ker Lambda, whose directions stay free).  This is what makes the
    normalized surface independent of the run history.
    """
    t = block.degree
    live = [rec.index for rec in state.params if rec.status == "unresolved"]
    if not live:
        return ap_vec
    if all(not isinstance(e, ParamScalar) or e.is_constant() for e in ap_vec):
        return ap_vec
    c0, columns = _affine_structure(ap_vec, live, t)
    active = [j for j, col in enumerate(columns) if any(col)]
    if not active:
        return ap_vec
    lam = [columns[j] for j in active]
    phi = block.gram
    size = len(c0)
    gram = [
        [sum(lam[i][r] * phi[r] * lam[j][r] for r in range(size)) for j in range(len(lam))]
        for i in range(len(lam))
    ]
    rhs = [-sum(lam[i][r] * phi[r] * c0[r] for r in range(size)) for i in range(len(lam))]
    system = linalg.RationalSystem(gram)
    reduced = linalg.mat_vec(system.transform, rhs)
    free_positions = set(system.free_cols)
    for row, pivot in enumerate(system.pivot_cols):
        value = ParamScalar.constant(GaussRat(reduced[row]))
        for f in system.free_cols:
            coeff = system.rref[row][f]
            if coeff:
                value = value - ParamScalar.parameter(live[active[f]]) * coeff
        idx = live[active[pivot]]
        state.assign(idx, value, "resolved")
        report.conditions.append(
            ConditionRecord(t, "resolved", state.params[idx].name, "orbit direction visible at this degree")
        )
    for f in sorted(free_positions):
        report.conditions.append(
            ConditionRecord(t, "free", state.params[live[active[f]]].name, "acts trivially on the normal component")
        )
    out = [state.reduce_scalar(e) if isinstance(e, ParamScalar) else e for e in ap_vec]
    for entry in out:
        if isinstance(entry, ParamScalar):
            assert all(
                state.params[i].status == "unresolved" for i in entry.param_indices()
            )
            # ker-Lambda directions drop out exactly; the component is concrete
            assert entry.is_constant()
    return out


def normalize(
    m: Surface,
    order: int | None = None,
    strategy: str = "ortho",
    resonance: str = "w-chain",
) -> NormalFormResult:
    """Run the degree-by-degree normalization up to the given order.

    Raises DegenerateWError when the resonance rule is active but the
    invariant cubic vanishes (checked both on the input a_3 and on the
    normalized a'_3), NonAffineResolutionError when a resonance condition
    cannot be solved, and ChainInfeasibleError from the literal chain
    strategy.
    """
    if strategy not in ("ortho", "chain"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if resonance not in ("w-chain", "off"):
        raise ValueError(f"unknown resonance mode {resonance!r}")
    n = m.truncation if order is None else order
    if n < 3 or n > m.truncation:
        raise ValueError("order must satisfy 3 <= order <= surface truncation")
    a3 = m.degree_part(3)
    if resonance == "w-chain" and not a3.is_zero() and compute_W(a3).is_zero():
        raise DegenerateWError(
            "input a_3 has vanishing invariant cubic W; rerun with resonance=off"
        )

    state = _RunState()
    reports: list[DegreeReport] = []
    w_res: BiPoly | None = None

    for t in range(3, n + 1):
        block = build_block(t)
        v_poly = _degree_defect(m, state, t)
        v_vec = poly_to_vec(v_poly, t)
        if strategy == "ortho":
            ap_vec = block.project_normal(v_vec)
        else:
            ap_vec = block.chain_fit(v_vec)
        report = DegreeReport(t, len(block.kernel_basis), [])
        if resonance == "w-chain":
            ap_vec = _resolve_orbit(ap_vec, block, state, report)
            v_vec = [state.reduce_scalar(e) if isinstance(e, ParamScalar) else e for e in v_vec]
        ap_poly = vec_to_poly(ap_vec, t)
        rhs = _vec_sub(ap_vec, v_vec)
        x = block.solve(rhs)
        for kvec in block.kernel_basis:
            idx = state.fresh_param(t)
            report.params_introduced.append(state.params[idx].name)
            tparam = ParamScalar.parameter(idx)
            x = [xi + tparam * kv if kv else xi for xi, kv in zip(x, kvec)]
        for pos, (kind, mm, nn) in enumerate(block.unknowns):
            value = _to_scalar(x[2 * pos]) + _I * _to_scalar(x[2 * pos + 1])
            if value.is_zero():
                continue
            table = state.g if kind == "g" else state.f
            table[(mm, nn)] = value
        for (mm, nn), val in ap_poly.coeff.items():
            state.aprime[(mm, nn)] = val

        if t == 3:
            w_res = compute_W(ap_poly)
        reports.append(report)

    if resonance == "w-chain":
        for record in state.params:
            if record.status == "unresolved":
                state.assign(record.index, ParamScalar.constant(0), "closed")

    surface = Surface(
        n, {k: as_gauss_if_constant(v) for k, v in state.aprime.items()}
    )
    the_map = FormalMap(
        n,
        {k: as_gauss_if_constant(v) for k, v in state.f.items()},
        {k: as_gauss_if_constant(v) for k, v in state.g.items()},
    )
    for report in reports:
        component = surface.degree_part(report.degree)
        report.normal_component = component
        if report.degree <= 6:
            from .fischer import in_normal_space

            report.chain_membership = in_normal_space(component, "chain")
    return NormalFormResult(
        surface=surface,
        map=the_map,
        order=n,
        strategy=strategy,
        resonance=resonance,
        invariant_w=w_res if w_res is not None else BiPoly(),
        degrees=reports,
        params=state.params,
    )


# ---------------------------------------------------------------------------
# verification and invariance


@dataclass
class VerifyDegree:
    degree: int
    ok: bool
    re_ok: bool | None = None
    im_ok: bool | None = None


@dataclass
class VerifyReport:
    strategy: str
    degrees: list

    @property
    def passed(self) -> bool:
        return all(d.ok for d in self.degrees)


def verify_normal_form(m: Surface, strategy: str = "ortho") -> VerifyReport:
    """Check per-degree membership of the coefficient table in the normal space.

    With the chain strategy the real and imaginary parts are reported
    separately (the conditions' split readings share the degree-matched
    test; both indexings are noted in the documentation).
    """
    from .fischer import in_normal_space

    degrees = []
    for d in range(3, m.truncation + 1):
        part = m.degree_part(d)
        if strategy == "ortho":
            degrees.append(VerifyDegree(d, in_normal_space(part, "ortho")))
        else:
            half = Fraction(1, 2)
            re_part = (part + conj_poly(part)) * GaussRat(half)
            im_part = (part - conj_poly(part)) * GaussRat(0, -half)
            re_ok = in_normal_space(re_part, "chain")
            im_ok = in_normal_space(im_part, "chain")
            degrees.append(VerifyDegree(d, re_ok and im_ok, re_ok, im_ok))
    return VerifyReport(strategy, degrees)


@dataclass
class InvarianceReport:
    equal: bool
    first_discrepancy: int | None
    base: NormalFormResult
    image: NormalFormResult


def invariance_check(
    m: Surface,
    phi: FormalMap,
    order: int | None = None,
    strategy: str = "ortho",
    resonance: str = "w-chain",
) -> InvarianceReport:
    """Compare the normal forms of m and push_forward(m, phi) exactly."""
    from .surface import push_forward

    base = normalize(m, order, strategy, resonance)
    image = normalize(push_forward(m, phi), order, strategy, resonance)
    first = base.surface.first_difference_degree(image.surface)
    return InvarianceReport(first is None, first, base, image)
