"""Shared helpers: exact-rational separable states with known decompositions."""

from fractions import Fraction

import numpy as np

from sepscan.qsep import QRat, QZERO, kron, mat_add, mat_scale, outer


def rational_unit_vector(m: int, rng: np.random.Generator, q: int = 7) -> tuple[QRat, ...]:
    """Exact rational unit vector in C^m via stereographic projection.

    A rational point t in R^(2m-1) maps to ((1-|t|^2), 2t)/(1+|t|^2),
    which is exactly unit; the coordinates then pair up into complex parts.
    """
    d = 2 * m
    t = [Fraction(int(rng.integers(-q, q + 1)), int(rng.integers(1, q + 1))) for _ in range(d - 1)]
    norm_sq = sum(x * x for x in t)
    denom = 1 + norm_sq
    coords = [(1 - norm_sq) / denom] + [2 * x / denom for x in t]
    assert sum(c * c for c in coords) == 1
    return tuple(QRat(coords[2 * i], coords[2 * i + 1]) for i in range(m))


def rational_weights(k: int, rng: np.random.Generator) -> list[Fraction]:
    raw = [int(rng.integers(1, 50)) for _ in range(k)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def rational_separable_decomposition(m: int, n: int, terms: int, seed: int):
    """(weights, alphas, betas) with exact rationals, sum of weights exactly 1."""
    rng = np.random.default_rng(seed)
    weights = rational_weights(terms, rng)
    alphas = [rational_unit_vector(m, rng) for _ in range(terms)]
    betas = [rational_unit_vector(n, rng) for _ in range(terms)]
    return list(zip(weights, alphas, betas))


def rational_state_of(decomp, m: int, n: int):
    """Exact rational density matrix of a normalized product decomposition."""
    d = m * n
    acc = tuple(tuple(QZERO for _ in range(d)) for _ in range(d))
    for w, alpha, beta in decomp:
        acc = mat_add(acc, mat_scale(kron(outer(alpha), outer(beta)), w))
    return acc

