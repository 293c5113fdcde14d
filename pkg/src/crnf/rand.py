"""Deterministic random generators for property trials.

Everything is driven by a seeded ``random.Random``; identical seeds produce
identical objects on every platform (the Mersenne Twister integer API is
stable).  Coefficients are Gaussian rationals with numerators and
denominators bounded by 9.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .fischer import compute_W
from .normalform import build_block
from .poly import BiPoly
from .scalars import GaussRat
from .surface import FormalMap, Surface


def _rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def random_rational(rng: random.Random, max_abs: int = 9) -> Fraction:
    return Fraction(rng.randint(-max_abs, max_abs), rng.randint(1, max_abs))


def random_gauss(rng: random.Random, max_abs: int = 9) -> GaussRat:
    return GaussRat(random_rational(rng, max_abs), random_rational(rng, max_abs))


def random_homogeneous(seed_or_rng, degree: int, real: bool = False) -> BiPoly:
    """Random nonzero homogeneous polynomial of the given degree."""
    rng = _rng(seed_or_rng)
    while True:
        coeff = {}
        for m in range(degree + 1):
            if rng.random() < 0.75:
                val = random_gauss(rng)
                if real:
                    val = GaussRat(val.re)
                coeff[(m, degree - m)] = val
        p = BiPoly(coeff)
        if not p.is_zero():
            return p


def random_surface(seed_or_rng, truncation: int, nondegenerate: bool = True) -> Surface:
    """Random surface; with ``nondegenerate`` both compute_W(a_3) != 0 and the
    normalized cubic a_{2,1} != 0 are guaranteed (redrawn otherwise)."""
    rng = _rng(seed_or_rng)
    while True:
        coeff = {}
        for d in range(3, truncation + 1):
            for m in range(d + 1):
                if rng.random() < 0.6:
                    coeff[(m, d - m)] = random_gauss(rng)
        surface = Surface(truncation, coeff)
        if not nondegenerate:
            return surface
        a3 = surface.degree_part(3)
        a21 = surface.coeff.get((2, 1), GaussRat(0))
        if not compute_W(a3).is_zero() and not a21.is_zero():
            return surface


def random_map(seed_or_rng, truncation: int, kernel_free: bool = False) -> FormalMap:
    """Random map of the admissible shape, truncated at (z,w)-degree ``truncation``.

    With ``kernel_free`` every weight block T in 3..truncation is projected
    exactly (Euclidean on the real unknown coordinates) off ker L_T, so the
    map carries no residual model-automorphism component at those weights.
    """
    rng = _rng(seed_or_rng)
    f, g = {}, {}
    for k in range(truncation + 1):
        for l in range(truncation + 1):
            if k + l < 2 or k + l > truncation:
                continue
            if rng.random() < 0.5:
                f[(k, l)] = random_gauss(rng)
            if (k, l) != (2, 0) and rng.random() < 0.5:
                g[(k, l)] = random_gauss(rng)
    if kernel_free:
        _project_off_kernels(f, g, truncation)
    return FormalMap(truncation, f, g)


def _project_off_kernels(f: dict, g: dict, truncation: int) -> None:
    for t in range(3, truncation + 1):
        block = build_block(t)
        kernel = block.kernel_basis
        if not kernel:
            continue
        x = []
        for kind, m, n in block.unknowns:
            val = (g if kind == "g" else f).get((m, n), GaussRat(0))
            x.extend([val.re, val.im])
        # Gram matrix of the kernel basis in plain Euclidean coordinates
        k = len(kernel)
        gram = [
            [sum(kernel[i][r] * kernel[j][r] for r in range(len(x))) for j in range(k)]
            for i in range(k)
        ]
        rhs = [sum(kernel[i][r] * x[r] for r in range(len(x))) for i in range(k)]
        from . import linalg

        coeffs = linalg.RationalSystem(gram).solve(rhs)
        for c, kvec in zip(coeffs, kernel):
            if not c:
                continue
            x = [xi - c * kv for xi, kv in zip(x, kvec)]
        for pos, (kind, m, n) in enumerate(block.unknowns):
            val = GaussRat(x[2 * pos], x[2 * pos + 1])
            table = g if kind == "g" else f
            if val.is_zero():
                table.pop((m, n), None)
            else:
                table[(m, n)] = val


def kernel_component(phi: FormalMap, t: int) -> list[Fraction]:
    """Euclidean components of the weight-T block of ``phi`` along ker L_T."""
    block = build_block(t)
    kernel = block.kernel_basis
    if not kernel:
        return []
    x = []
    for kind, m, n in block.unknowns:
        val = (phi.g if kind == "g" else phi.f).get((m, n), GaussRat(0))
        x.extend([val.re, val.im])
    k = len(kernel)
    gram = [
        [sum(kernel[i][r] * kernel[j][r] for r in range(len(x))) for j in range(k)]
        for i in range(k)
    ]
    rhs = [sum(kernel[i][r] * x[r] for r in range(len(x))) for i in range(k)]
    from . import linalg

    return linalg.RationalSystem(gram).solve(rhs)
