"""Weak optimization of tr(A sigma) over the separable set.

Only the A-side of the product state is discretized by a net; for each
net point x the B-side is solved exactly through the top eigenvector of
the conditioned operator B_x = <x| A |x>.  The best value over the net
is within 2 * net.delta * ||A||_2 of the true maximum over all product
states (and hence, by linearity, over all separable states).

The scan maximizes the signed form by default, which is what the witness
search needs; "abs" mode maximizes |<x j|A|x j>| instead, and its
guarantee follows by applying the signed bound to both A and -A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Array, DimensionMismatchError, hermitian_basis, proj, to_bloch
from .nets import DeltaNet

SCAN_CHUNK = 262_144
HS_NORM_TOL = 1e-8


@dataclass(frozen=True)
class ProductState:
    alpha: Array  # unit vector in C^m
    beta: Array  # unit vector in C^n

    def matrix(self) -> Array:
        return np.kron(proj(self.alpha), proj(self.beta))

    def bloch(self) -> Array:
        m, n = self.alpha.shape[0], self.beta.shape[0]
        return to_bloch(self.matrix(), hermitian_basis(m, n))


@dataclass(frozen=True)
class WoptResult:
    maximizer: ProductState
    value: float
    guarantee: float  # additive: value >= product max - guarantee


def conditioned_operator(a: Array, m: int, n: int, x: Array) -> Array:
    """The n x n Hermitian block (B_x)_{jk} = <x e_j| A |x e_k>."""
    a4 = np.asarray(a, dtype=complex).reshape(m, n, m, n)
    return np.einsum("a,ajbk,b->jk", np.conj(x), a4, x)


def quadratic_form(a: Array, m: int, n: int, alpha: Array, beta: Array) -> float:
    v = np.kron(alpha, beta)
    return float((np.conj(v) @ np.asarray(a, dtype=complex) @ v).real)


def _top_eigvals_batched(bx: Array) -> Array:
    """Largest eigenvalue of each Hermitian matrix in a (K, n, n) stack."""
    n = bx.shape[-1]
    if n == 1:
        return bx[:, 0, 0].real
    if n == 2:
        half_tr = 0.5 * (bx[:, 0, 0].real + bx[:, 1, 1].real)
        rad = np.sqrt(
            0.25 * (bx[:, 0, 0].real - bx[:, 1, 1].real) ** 2 + np.abs(bx[:, 0, 1]) ** 2
        )
        return half_tr + rad
    return np.linalg.eigvalsh(bx)[:, -1]


def _bottom_eigvals_batched(bx: Array) -> Array:
    return -_top_eigvals_batched(-bx)


def wopt_max(a: Array, m: int, n: int, net: DeltaNet, *, mode: str = "signed") -> WoptResult:
    """Scan the net, conditioning out the B side; deterministic tie-breaks.

    Requires ||A||_2 = 1 so the additive guarantee is exactly 2*net.delta.
    """
    a = np.asarray(a, dtype=complex)
    if net.m != m:
        raise DimensionMismatchError(f"net lives on C^{net.m}, operator A-side is C^{m}")
    if a.shape != (m * n, m * n):
        raise DimensionMismatchError(f"operator shape {a.shape} does not match {m}x{n}")
    hs = float(np.linalg.norm(a))
    if abs(hs - 1.0) > HS_NORM_TOL:
        raise ValueError(f"operator must have unit Hilbert-Schmidt norm, got {hs}")
    if mode not in ("signed", "abs"):
        raise ValueError(f"mode must be 'signed' or 'abs', got {mode!r}")

    a_mat = a.reshape(m, n * m * n)
    best_val = -np.inf
    best_idx = -1
    pts = net.points
    for start in range(0, pts.shape[0], SCAN_CHUNK):
        x = pts[start : start + SCAN_CHUNK]
        half = (np.conj(x) @ a_mat).reshape(-1, n, m, n)
        bx = np.einsum("kjbl,kb->kjl", half, x)
        vals = _top_eigvals_batched(bx)
        if mode == "abs":
            vals = np.maximum(vals, -_bottom_eigvals_batched(bx))
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_idx = start + i
    x_star = pts[best_idx]
    bx = conditioned_operator(a, m, n, x_star)
    vals, vecs = np.linalg.eigh(bx)
    if mode == "abs" and -vals[0] > vals[-1]:
        beta = vecs[:, 0]
    else:
        beta = vecs[:, -1]
    value = quadratic_form(a, m, n, x_star, beta)
    if mode == "abs":
        value = abs(value)
    return WoptResult(ProductState(x_star, beta), value, 2.0 * net.delta)


def seesaw_max(
    a: Array,
    m: int,
    n: int,
    *,
    starts: int = 24,
    iters: int = 120,
    seed: int = 0,
    init: list[tuple[Array, Array]] | None = None,
) -> WoptResult:
    """Alternating top-eigenvector ascent over product states.

    Local refinement: each step conditions one side out and takes the top
    eigenvector of the other, so the form is nondecreasing.  Multi-start
    makes it a strong heuristic, but unlike the net scan it carries no
    additive guarantee (guarantee field is inf).
    """
    a = np.asarray(a, dtype=complex)
    a4 = a.reshape(m, n, m, n)
    rng = np.random.default_rng(seed)
    best: tuple[float, Array, Array] | None = None
    inits = list(init) if init else []
    for _ in range(starts):
        alpha = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        beta = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        inits.append((alpha / np.linalg.norm(alpha), beta / np.linalg.norm(beta)))
    for alpha, beta in inits:
        alpha = np.asarray(alpha, dtype=complex)
        beta = np.asarray(beta, dtype=complex)
        prev = -np.inf
        for _ in range(iters):
            bx = np.einsum("a,ajbl,b->jl", np.conj(alpha), a4, alpha)
            beta = np.linalg.eigh(bx)[1][:, -1]
            cy = np.einsum("j,ajbl,l->ab", np.conj(beta), a4, beta)
            alpha = np.linalg.eigh(cy)[1][:, -1]
            cur = quadratic_form(a, m, n, alpha, beta)
            if cur - prev < 1e-13:
                break
            prev = cur
        val = quadratic_form(a, m, n, alpha, beta)
        if best is None or val > best[0]:
            best = (val, alpha, beta)
    assert best is not None
    return WoptResult(ProductState(best[1], best[2]), best[0], np.inf)
