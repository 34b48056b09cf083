"""Deterministic coverings of the complex unit sphere of C^m.

A net is built as a union of refinement levels drawn from the fixed
ladder delta_l = 2 * 2^(-l/2).  A request for covering radius delta
takes every level down to the first one at or below delta, so nets for
smaller delta are strict supersets of nets for larger delta; scan maxima
are then monotone under refinement by construction.

Two constructions:

* "grid": cubic grid of spacing delta/sqrt(2m) on [-1,1]^(2m); cells
  meeting the sphere contribute their projected centers.  Covering is in
  the Euclidean metric of C^m ~ R^(2m).
* "band" (m = 2 only): latitude/longitude covering of the state space
  modulo global phase, mapped through (theta, phi) ->
  (cos(theta/2), e^(i phi) sin(theta/2)).  Covering is in the
  phase-quotient chordal metric min_phi ||x - e^(i phi) y||, which bounds
  the trace distance of the corresponding projectors by the same 2*delta
  as the Euclidean metric does, at ~ (1/delta)^2 points instead of
  (1/delta)^3.

Empirically measured size constant: |net| <= C_SIZE(m) * (1 + 2/delta)^(2m)
for both methods at m <= 4 with C_SIZE(m) = 12 * 4^(m-2); the grid
construction is the binding case and the growth in m tracks the
sqrt(2m)^(2m-1) cell-diagonal factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .core import Array

NET_VERSION = "1"
DEFAULT_MAX_POINTS = 6_000_000


def size_constant(m: int) -> float:
    """Measured constant in |net| <= size_constant(m) * (1 + 2/delta)^(2m)."""
    return 12.0 * 4.0 ** (m - 2)


class NetTooLargeError(ValueError):
    """Requested net exceeds the configured point budget."""


class NetTooCoarseError(ValueError):
    """A consumer required a finer net than the one supplied."""


@dataclass(frozen=True)
class DeltaNet:
    m: int
    delta: float
    points: Array  # (K, m) complex, unit rows
    projective: bool = False
    method: str = "grid"
    version: str = NET_VERSION

    @property
    def size(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class CoverageReport:
    max_gap: float
    samples: int
    seed: int
    delta: float

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.delta


def _ladder_levels(delta: float) -> list[float]:
    """Every ladder value 2 * 2^(-l/2) from 2 down to the first <= delta."""
    levels = []
    l = 0
    while True:
        d = 2.0 * 2.0 ** (-l / 2.0)
        levels.append(d)
        if d <= delta:
            return levels
        l += 1


def _grid_level_points(m: int, level_delta: float) -> Array:
    dim = 2 * m
    h = level_delta / math.sqrt(dim)
    half_diag = 0.5 * h * math.sqrt(dim)
    k = int(math.ceil((1.0 + half_diag) / h))
    axis = (np.arange(-k, k) + 0.5) * h
    # enumerate the grid in chunks over the two leading axes
    pts = []
    rest = np.stack(
        np.meshgrid(*([axis] * (dim - 2)), indexing="ij"), axis=-1
    ).reshape(-1, dim - 2)
    rest_sq = np.sum(rest**2, axis=1)
    for a0 in axis:
        for a1 in axis:
            norms_sq = rest_sq + a0 * a0 + a1 * a1
            norms = np.sqrt(norms_sq)
            keep = np.abs(norms - 1.0) <= half_diag
            if not np.any(keep):
                continue
            sel = rest[keep]
            block = np.empty((sel.shape[0], dim))
            block[:, 0] = a0
            block[:, 1] = a1
            block[:, 2:] = sel
            block /= norms[keep][:, None]
            pts.append(block)
    real = np.concatenate(pts, axis=0)
    return real[:, :m] + 1j * real[:, m:]


def _estimate_grid_size(m: int, delta: float) -> float:
    total = 0.0
    for d in _ladder_levels(delta):
        h = d / math.sqrt(2 * m)
        area = 2.0 * math.pi ** m / math.factorial(m - 1)  # surface of S^{2m-1}
        total += 2.0 * area / h ** (2 * m - 1)
    return total


def _band_level_points(level_delta: float, safety: float = 0.95) -> Array:
    """Covering of the m=2 state space modulo phase, via its 2-sphere chart."""
    gamma = 4.0 * math.asin(min(level_delta, 2.0) / 2.0) * safety
    step = gamma * math.sqrt(2.0) * 0.98
    n_rings = max(int(math.ceil(math.pi / step)), 1)
    dtheta = math.pi / n_rings
    thetas, phis = [], []
    for j in range(n_rings):
        theta = (j + 0.5) * dtheta
        s_edge = 1.0 if theta - dtheta / 2 <= math.pi / 2 <= theta + dtheta / 2 else max(
            math.sin(theta - dtheta / 2), math.sin(theta + dtheta / 2)
        )
        n_phi = max(int(math.ceil(2.0 * math.pi * s_edge / step)), 1)
        ring_phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
        thetas.append(np.full(n_phi, theta))
        phis.append(ring_phis)
    theta = np.concatenate(thetas)
    phi = np.concatenate(phis)
    pts = np.empty((theta.size, 2), dtype=complex)
    pts[:, 0] = np.cos(theta / 2.0)
    pts[:, 1] = np.exp(1j * phi) * np.sin(theta / 2.0)
    return pts


def _estimate_band_size(delta: float) -> float:
    total = 0.0
    for d in _ladder_levels(delta):
        gamma = 4.0 * math.asin(min(d, 2.0) / 2.0) * 0.95
        total += 4.0 * math.pi / (gamma * math.sqrt(2.0) * 0.98) ** 2 + 4
    return total


def _apply_phase_slices(points: Array, slices: int) -> Array:
    """Keep points whose first coordinate of largest modulus has phase in [0, 2pi/K)."""
    lead = points[np.arange(points.shape[0]), np.argmax(np.abs(points), axis=1)]
    ang = np.mod(np.angle(lead), 2.0 * math.pi)
    return points[ang < 2.0 * math.pi / slices]


def _cache_path(cache_dir, m, delta, method, phase_slices) -> Path:
    tag = f"net_m{m}_d{delta:.9g}_{method}_p{phase_slices or 0}_v{NET_VERSION}.npz"
    return Path(cache_dir) / tag


def build_net(
    m: int,
    delta: float,
    *,
    method: str = "auto",
    cache_dir: str | Path | None = None,
    max_points: int = DEFAULT_MAX_POINTS,
    phase_slices: int | None = None,
) -> DeltaNet:
    """Deterministic covering of the unit sphere of C^m with radius <= delta."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0.0 < delta <= 2.0:
        raise ValueError(f"delta must lie in (0, 2], got {delta}")

    if method == "auto":
        if m == 2 and _estimate_grid_size(m, delta) > max_points:
            method = "band"
        else:
            method = "grid"

    if cache_dir is not None:
        path = _cache_path(cache_dir, m, delta, method, phase_slices)
        if path.exists():
            data = np.load(path)
            return DeltaNet(
                m=int(data["m"]),
                delta=float(data["delta"]),
                points=data["points"],
                projective=bool(data["projective"]),
                method=str(data["method"]),
                version=str(data["version"]),
            )

    if delta >= 2.0:
        # the sphere has diameter 2: any single point covers it
        single = np.zeros((1, m), dtype=complex)
        single[0, 0] = 1.0
        net = DeltaNet(m, delta, single, projective=False, method=method)
    elif method == "grid":
        if _estimate_grid_size(m, delta) > max_points:
            raise NetTooLargeError(
                f"grid net for m={m}, delta={delta} exceeds {max_points} points; "
                "use method='band' (m=2) or a larger delta"
            )
        pts = np.concatenate(
            [_grid_level_points(m, d) for d in _ladder_levels(delta)], axis=0
        )
        projective = False
        if phase_slices:
            pts = _apply_phase_slices(pts, phase_slices)
            projective = True
        net = DeltaNet(m, delta, pts, projective=projective, method="grid")
    elif method == "band":
        if m != 2:
            raise ValueError("band construction is only defined for m = 2")
        if _estimate_band_size(delta) > max_points:
            raise NetTooLargeError(f"band net for delta={delta} exceeds {max_points} points")
        pts = np.concatenate(
            [_band_level_points(d) for d in _ladder_levels(delta)], axis=0
        )
        net = DeltaNet(m, delta, pts, projective=True, method="band")
    else:
        raise ValueError(f"unknown method {method!r}")

    net.points.setflags(write=False)
    if cache_dir is not None:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        np.savez_compressed(
            _cache_path(cache_dir, m, delta, method, phase_slices),
            m=m,
            delta=delta,
            points=net.points,
            projective=net.projective,
            method=net.method,
            version=NET_VERSION,
        )
    return net


def size_bound(m: int, delta: float) -> float:
    return size_constant(m) * (1.0 + 2.0 / delta) ** (2 * m)


def _real_embedding(points: Array) -> Array:
    return np.concatenate([points.real, points.imag], axis=1)


def _bloch_embedding(points: Array) -> Array:
    """m=2 states to unit Bloch vectors; monotone with the phase-quotient metric."""
    a, b = points[:, 0], points[:, 1]
    return np.stack(
        [2.0 * (a.conjugate() * b).real, 2.0 * (a.conjugate() * b).imag,
         (np.abs(a) ** 2 - np.abs(b) ** 2)],
        axis=1,
    )


def gaps_to_net(net: DeltaNet, samples: Array) -> Array:
    """Distance from each sample (rows, unit vectors in C^m) to the net."""
    if not net.projective:
        tree = cKDTree(_real_embedding(net.points))
        d, _ = tree.query(_real_embedding(samples), k=1)
        return d
    if net.m == 2:
        tree = cKDTree(_bloch_embedding(net.points))
        chord, _ = tree.query(_bloch_embedding(samples), k=1)
        overlap = np.sqrt(np.clip(1.0 - chord**2 / 4.0, 0.0, 1.0))
        return np.sqrt(np.clip(2.0 - 2.0 * overlap, 0.0, None))
    out = np.empty(samples.shape[0])
    for i in range(0, samples.shape[0], 64):
        block = samples[i : i + 64]
        ov = np.abs(block.conj() @ net.points.T)
        out[i : i + 64] = np.sqrt(np.clip(2.0 - 2.0 * ov.max(axis=1), 0.0, None))
    return out


def haar_unit_vectors(m: int, count: int, seed: int) -> Array:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def verify_coverage(net: DeltaNet, samples: int, seed: int) -> CoverageReport:
    """Monte-Carlo covering check: max gap over sampled unit vectors."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    gaps = gaps_to_net(net, haar_unit_vectors(net.m, samples, seed))
    return CoverageReport(float(gaps.max()), samples, seed, net.delta)
