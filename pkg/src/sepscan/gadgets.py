"""Executable reduction chain: clique -> simplex program -> robust
semidefinite feasibility -> separable-set optimization.

The three instance transformations, with the conventions that make the
numeric identities hold exactly:

* clique threshold c becomes the midpoint/quarter-width of the interval
  [1 - 1/(c-1), 1 - 1/c]; the simplex maximum H(A) = max y^T A y equals
  1 - 1/kappa for the clique number kappa, so yes/no instances land on
  opposite sides of the interval.

* the substitution y_i -> x_i^2 turns H(A) into a sum of squared
  quadratic forms over the unit sphere: with blocks carrying
  sqrt(A_ij / 2) at (i, j) and (j, i),
  F(B) = max_{||x||=1} sum_{i<j} (x^T B^{ij} x)^2 = H(A) exactly
  (a sqrt(A_ij) convention would double-count the off-diagonal pair).

* the block operator with first block row/column (0, B_1 ... B_{M-1})
  satisfies max over product states of <a (x) b|B|a (x) b> =
  sqrt(max_x sum_i (x^T B_i x)^2): for fixed unit b with w_i = b^T B_i b,
  the optimum over a of sum_i 2 Re(conj(a_0) a_i) w_i is ||w||_2, attained
  at a_0 = 1/sqrt(2), a_i = w_i/(sqrt(2)||w||).  The separable-set
  thresholds are therefore a rational bracket of
  [sqrt(zeta - eta), sqrt(zeta + eta)], which preserves yes/no answers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import Array
from .nets import DeltaNet
from .wopt import seesaw_max, wopt_max

MAX_EXACT_CLIQUE = 12


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: Array  # symmetric 0/1, zero diagonal

    @staticmethod
    def from_edges(n: int, edges) -> "Graph":
        a = np.zeros((n, n), dtype=np.int8)
        for i, j in edges:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bad edge ({i}, {j}) for {n} vertices")
            a[i, j] = a[j, i] = 1
        return Graph(n, a)

    def __post_init__(self):
        a = self.adjacency
        if a.shape != (self.n, self.n):
            raise ValueError("adjacency shape mismatch")
        if not np.array_equal(a, a.T) or np.any(np.diag(a) != 0):
            raise ValueError("adjacency must be symmetric with zero diagonal")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency entries must be 0/1")

    @staticmethod
    def complete(n: int) -> "Graph":
        a = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
        return Graph(n, a)


@dataclass(frozen=True)
class WmqsInstance:
    a: Array
    zeta: Fraction
    eta: Fraction

    def __post_init__(self):
        if np.any(self.a < 0) or self.eta <= 0:
            raise ValueError("matrix must be nonnegative and eta positive")


@dataclass(frozen=True)
class RsdfInstance:
    blocks: tuple[Array, ...]
    zeta: Fraction
    eta: Fraction

    def __post_init__(self):
        for b in self.blocks:
            if not np.array_equal(b, b.T):
                raise ValueError("blocks must be symmetric")


@dataclass(frozen=True)
class WvalInstance:
    b: Array  # real symmetric (m n) x (m n) with the block pattern
    m: int
    n: int
    gamma: Fraction
    epsilon: Fraction


def max_clique(g: Graph) -> int:
    """Clique number by exhaustive enumeration (single vertices count)."""
    if g.n > MAX_EXACT_CLIQUE:
        raise ValueError(f"exact enumeration capped at {MAX_EXACT_CLIQUE} vertices")
    if g.n == 0:
        return 0
    a = g.adjacency
    best = 1
    for size in range(g.n, 1, -1):
        if size <= best:
            break
        for combo in combinations(range(g.n), size):
            ok = all(a[i, j] for i, j in combinations(combo, 2))
            if ok:
                return size
    return best


def simplex_grid_max(a: Array, steps: int) -> float:
    """max y^T A y over the grid of denominator-`steps` points of the simplex."""
    n = a.shape[0]
    best = -np.inf
    stack = [(0, steps, ())]
    while stack:
        idx, left, prefix = stack.pop()
        if idx == n - 1:
            y = np.array(prefix + (left,), dtype=float) / steps
            best = max(best, float(y @ a @ y))
            continue
        for take in range(left + 1):
            stack.append((idx + 1, left - take, prefix + (take,)))
    return best


@dataclass(frozen=True)
class CliqueQuadraticReport:
    kappa: int
    value: float  # 1 - 1/kappa
    grid_max: float
    grid_steps: int


def motzkin_straus_value(g: Graph, steps: int | None = None) -> CliqueQuadraticReport:
    """Exact clique number against the simplex quadratic maximum."""
    kappa = max_clique(g)
    value = 1.0 - 1.0 / kappa if kappa else 0.0
    if steps is None:
        steps = 40 if g.n <= 4 else 20
    grid = simplex_grid_max(g.adjacency.astype(float), steps)
    return CliqueQuadraticReport(kappa, value, grid, steps)


def clique_interval(c: int) -> tuple[Fraction, Fraction]:
    if c < 2:
        raise ValueError("clique threshold must be >= 2")
    return Fraction(1) - Fraction(1, c - 1), Fraction(1) - Fraction(1, c)


def clique_to_wmqs(g: Graph, c: int) -> WmqsInstance:
    """Threshold interval [1-1/(c-1), 1-1/c]: midpoint and quarter width."""
    if not 2 <= c <= g.n:
        raise ValueError(f"clique threshold must lie in [2, {g.n}], got {c}")
    lo, hi = clique_interval(c)
    zeta = (lo + hi) / 2
    eta = (hi - lo) / 4
    return WmqsInstance(g.adjacency.astype(float), zeta, eta)


def wmqs_to_rsdf(inst: WmqsInstance) -> RsdfInstance:
    """One block per vertex pair, sqrt(A_ij / 2) off-diagonal."""
    n = inst.a.shape[0]
    blocks = []
    for i in range(n):
        for j in range(i + 1, n):
            b = np.zeros((n, n))
            b[i, j] = b[j, i] = math.sqrt(inst.a[i, j] / 2.0)
            blocks.append(b)
    return RsdfInstance(tuple(blocks), inst.zeta, inst.eta)


def rsdf_value(
    blocks,
    *,
    starts: int = 32,
    iters: int = 400,
    seed: int = 0,
    init: Array | None = None,
) -> tuple[float, Array]:
    """F = max over the unit sphere of sum_i (x^T B_i x)^2, by projected ascent."""
    blocks = np.stack(blocks)
    dim = blocks.shape[1]
    rng = np.random.default_rng(seed)
    seeds = [init] if init is not None else []
    seeds.extend(rng.standard_normal(dim) for _ in range(starts))
    seeds.extend(np.eye(dim))
    best_val, best_x = -np.inf, None
    for x0 in seeds:
        x = np.asarray(x0, dtype=float)
        nx = np.linalg.norm(x)
        if nx < 1e-12:
            continue
        x = x / nx
        step = 0.5
        val = float(np.sum((x @ blocks @ x) ** 2))
        for _ in range(iters):
            w = x @ blocks @ x  # (k,)
            grad = 4.0 * np.einsum("k,kij,j->i", w, blocks, x)
            cand = x + step * grad
            cand /= np.linalg.norm(cand)
            cand_val = float(np.sum((cand @ blocks @ cand) ** 2))
            if cand_val >= val:
                x, gain, val = cand, cand_val - val, cand_val
                if gain < 1e-14:
                    break
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


def rsdf_sphere_grid(blocks, resolution: int = 400) -> float:
    """Angle-grid lower bound of F for 2- and 3-dimensional blocks."""
    blocks = np.stack(blocks)
    dim = blocks.shape[1]
    if dim == 2:
        t = np.linspace(0.0, np.pi, resolution)
        xs = np.stack([np.cos(t), np.sin(t)], axis=1)
    elif dim == 3:
        t = np.linspace(0.0, np.pi, resolution)
        p = np.linspace(0.0, 2.0 * np.pi, 2 * resolution, endpoint=False)
        tt, pp = np.meshgrid(t, p, indexing="ij")
        xs = np.stack(
            [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
        ).reshape(-1, 3)
    else:
        raise ValueError("grid evaluation supports dimensions 2 and 3 only")
    forms = np.einsum("si,kij,sj->sk", xs, blocks, xs)
    return float(np.max(np.sum(forms**2, axis=1)))


def _sqrt_bracket(t: Fraction, scale: int = 2**48) -> tuple[Fraction, Fraction]:
    """Rationals strictly bracketing sqrt(t) within ~2/scale."""
    if t < 0:
        raise ValueError("negative operand")
    v = (t.numerator * scale * scale) // t.denominator
    r = math.isqrt(v)
    return Fraction(max(r - 1, 0), scale), Fraction(r + 2, scale)


def rsdf_to_wval(inst: RsdfInstance, *, pad_square: bool = False) -> WvalInstance:
    """Assemble the block operator and map thresholds through the square root.

    With pad_square, both sides get dimension k+1 (blocks zero-padded),
    which keeps the reduction inside the regime where neither side is
    smaller than the other.
    """
    blocks = inst.blocks
    if not blocks:
        raise ValueError("at least one block required")
    dims = {b.shape[0] for b in blocks}
    if len(dims) != 1:
        raise ValueError("all blocks must share one dimension")
    n = dims.pop()
    if pad_square:
        target = len(blocks) + 1
        if target < n:
            raise ValueError("padding cannot shrink the block dimension")
        padded = []
        for b in blocks:
            nb = np.zeros((target, target))
            nb[:n, :n] = b
            padded.append(nb)
        blocks = tuple(padded)
        n = target
    m = len(blocks) + 1
    b = np.zeros((m * n, m * n))
    for i, blk in enumerate(blocks, start=1):
        b[0:n, i * n : (i + 1) * n] = blk
        b[i * n : (i + 1) * n, 0:n] = blk
    # separable maximum equals sqrt(F); bracket the transformed interval
    lo_in = inst.zeta - inst.eta
    hi_in = inst.zeta + inst.eta
    if lo_in < 0:
        lo_in = Fraction(0)
    _, lo_up = _sqrt_bracket(lo_in)
    hi_dn, _ = _sqrt_bracket(hi_in)
    if not lo_up < hi_dn:
        raise ValueError("threshold interval too narrow to bracket in rationals")
    gamma = (lo_up + hi_dn) / 2
    epsilon = (hi_dn - lo_up) / 2
    return WvalInstance(b, m, n, gamma, epsilon)


def product_state_from_block_vector(blocks, x: Array) -> tuple[Array, Array]:
    """The optimal product pair for the block operator given the sphere point."""
    blocks = np.stack(blocks)
    w = x @ blocks @ x
    norm = float(np.linalg.norm(w))
    m = blocks.shape[0] + 1
    alpha = np.zeros(m, dtype=complex)
    if norm < 1e-15:
        alpha[0] = 1.0
    else:
        alpha[0] = 1.0 / math.sqrt(2.0)
        alpha[1:] = w / (math.sqrt(2.0) * norm)
    return alpha, x.astype(complex)


def wval_value(
    inst: WvalInstance,
    *,
    net: DeltaNet | None = None,
    seed: int = 0,
) -> float:
    """max over separable states of tr(B sigma), by the certified net scan
    when the A-side matches the net, otherwise by seeded ascent."""
    b = inst.b
    hs = float(np.linalg.norm(b))
    if hs < 1e-15:
        return 0.0
    if net is not None and net.m == inst.m:
        res = wopt_max(b / hs, inst.m, inst.n, net)
        return res.value * hs
    # seed the seesaw with the constructive optimum from the block form
    blocks = [
        b[0 : inst.n, i * inst.n : (i + 1) * inst.n] for i in range(1, inst.m)
    ]
    _, x = rsdf_value(blocks, seed=seed)
    alpha, beta = product_state_from_block_vector(blocks, x)
    res = seesaw_max(b / hs, inst.m, inst.n, seed=seed, init=[(alpha, beta)])
    return res.value * hs


@dataclass(frozen=True)
class ChainReport:
    kappa: int
    clique_threshold: int
    expected_yes: bool
    decided_yes: bool
    simplex_value: float  # 1 - 1/kappa
    rsdf_value: float
    wval_value: float
    gamma: float
    epsilon: float

    @property
    def consistent(self) -> bool:
        return self.expected_yes == self.decided_yes

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "clique_threshold": self.clique_threshold,
            "expected_yes": self.expected_yes,
            "decided_yes": self.decided_yes,
            "simplex_value": self.simplex_value,
            "rsdf_value": self.rsdf_value,
            "wval_value": self.wval_value,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
            "consistent": self.consistent,
        }


def verify_chain(
    g: Graph,
    c: int,
    net_delta: float | None = None,
    *,
    net: DeltaNet | None = None,
    seed: int = 0,
) -> ChainReport:
    """Run all three transformations and compare the final decision with
    exact clique enumeration."""
    if g.n > 6:
        raise ValueError("chain verification capped at 6 vertices")
    kappa = max_clique(g)
    wmqs = clique_to_wmqs(g, c)
    rsdf = wmqs_to_rsdf(wmqs)
    f_val, x = rsdf_value(rsdf.blocks, seed=seed)
    wval = rsdf_to_wval(rsdf)
    use_net = net
    if use_net is None and net_delta is not None and wval.m == 2:
        from .nets import build_net

        use_net = build_net(2, net_delta)
    value = wval_value(wval, net=use_net, seed=seed)
    decided = value > float(wval.gamma)
    return ChainReport(
        kappa=kappa,
        clique_threshold=c,
        expected_yes=kappa >= c,
        decided_yes=decided,
        simplex_value=1.0 - 1.0 / kappa if kappa else 0.0,
        rsdf_value=f_val,
        wval_value=value,
        gamma=float(wval.gamma),
        epsilon=float(wval.epsilon),
    )


def random_graph(n: int, edge_probability: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    a = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_probability:
                a[i, j] = a[j, i] = 1
    return Graph(n, a)
