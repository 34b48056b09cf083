"""Dense complex-Hermitian linear algebra and the Bloch-space isometry.

Operators on C^M (x) C^N are plain complex numpy arrays; density matrices
carry their bipartition in a small dataclass.  An orthonormal Hermitian
basis (normalized generalized Gell-Mann matrices, tensored A-major) maps
traceless Hermitian operators isometrically onto real Euclidean vectors,
which is the coordinate system every optimization module works in.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

Array = np.ndarray

# Default tolerances; every consumer accepts an override.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
EIG_OFFDIAG_FACTOR = 1e-12
EIG_MAX_SWEEPS = 64


class DimensionMismatchError(ValueError):
    """Operands do not share the bipartition / basis they need to."""


def dagger(x: Array) -> Array:
    return x.conj().T


def hermitize(x: Array) -> tuple[Array, float]:
    """Symmetrize to (X + X†)/2 and report the symmetrization residual."""
    x = np.asarray(x, dtype=complex)
    h = 0.5 * (x + dagger(x))
    return h, float(np.linalg.norm(x - h))


def is_hermitian(x: Array, tol: float | None = None) -> bool:
    x = np.asarray(x, dtype=complex)
    tol = HERMITICITY_TOL * x.shape[0] if tol is None else tol
    return bool(np.linalg.norm(x - dagger(x)) <= tol)


def ket(i: int, d: int) -> Array:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def proj(v: Array) -> Array:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace PSD Hermitian operator on C^m (x) C^n."""

    m: int
    n: int
    mat: Array

    @property
    def dim(self) -> int:
        return self.m * self.n

    @staticmethod
    def make(m: int, n: int, mat: Array, *, validate: bool = True) -> "DensityMatrix":
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (m * n, m * n):
            raise DimensionMismatchError(
                f"expected a {m * n}x{m * n} matrix for an {m}x{n} system, got {mat.shape}"
            )
        h, _resid = hermitize(mat)
        if validate:
            tr = h.trace().real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"trace {tr} is not 1 within {TRACE_TOL}")
            lo = float(np.linalg.eigvalsh(h)[0])
            if lo < -PSD_TOL:
                raise ValueError(f"minimum eigenvalue {lo} below -{PSD_TOL}")
        return DensityMatrix(m, n, h)


@dataclass(frozen=True)
class HermitianBasis:
    """Orthonormal Hermitian basis; element 0 is I/sqrt(mn), the rest traceless."""

    m: int
    n: int
    elements: Array  # (m^2 n^2, mn, mn)

    @property
    def size(self) -> int:
        return self.elements.shape[0]


@dataclass(frozen=True)
class EigDecomposition:
    values: Array  # real, nonincreasing
    vectors: Array  # orthonormal columns, vectors[:, i] pairs with values[i]


def _su_generators(d: int) -> Array:
    """Unit-HS-norm Hermitian basis of C^{d x d}.

    Fixed order: index 0 is I/sqrt(d); then for pairs j<k in lexicographic
    order the symmetric elements (E_jk + E_kj)/sqrt(2); then the
    antisymmetric elements -i(E_jk - E_kj)/sqrt(2) in the same pair order;
    then the d-1 diagonal elements diag(1,..,1,-l,0,..)/sqrt(l(l+1)).
    Bloch coordinates depend on this order, verdicts do not.
    """
    out = [np.eye(d, dtype=complex) / np.sqrt(d)]
    sym, asym = [], []
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = e[k, j] = 1.0 / np.sqrt(2.0)
            sym.append(e)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2.0)
            a[k, j] = 1j / np.sqrt(2.0)
            asym.append(a)
    out.extend(sym)
    out.extend(asym)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag).astype(complex) / np.sqrt(l * (l + 1)))
    return np.stack(out)


@lru_cache(maxsize=32)
def hermitian_basis(m: int, n: int) -> HermitianBasis:
    """Tensor basis X_a (x) Y_b, A-index major; element 0 equals I/sqrt(mn)."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be >= 1")
    xa = _su_generators(m)
    yb = _su_generators(n)
    elems = np.einsum("aij,bkl->abikjl", xa, yb).reshape(
        m * m * n * n, m * n, m * n
    )
    elems.setflags(write=False)
    return HermitianBasis(m, n, elems)


def to_bloch(a: Array, basis: HermitianBasis) -> Array:
    """Coordinates tr(X_i a) for i = 1 .. m^2 n^2 - 1 (traceless part only)."""
    a = np.asarray(a, dtype=complex)
    d = basis.m * basis.n
    if a.shape != (d, d):
        raise DimensionMismatchError(f"operator shape {a.shape} does not match basis dim {d}")
    return np.einsum("kij,ji->k", basis.elements[1:], a).real


def from_bloch(coords: Array, trace: float, basis: HermitianBasis) -> Array:
    """Hermitian operator with the given Bloch coordinates and trace."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (basis.size - 1,):
        raise DimensionMismatchError(
            f"coordinate length {coords.shape} does not match basis size {basis.size}"
        )
    d = basis.m * basis.n
    a = np.tensordot(coords, basis.elements[1:], axes=1)
    return a + (trace / d) * np.eye(d)


def partial_trace(mat: Array, m: int, n: int, which: str) -> Array:
    """Trace out subsystem 'A' (result n x n) or 'B' (result m x m)."""
    t = np.asarray(mat, dtype=complex).reshape(m, n, m, n)
    if which == "A":
        return np.einsum("iaib->ab", t)
    if which == "B":
        return np.einsum("akbk->ab", t)
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def partial_transpose(mat: Array, m: int, n: int, which: str = "B") -> Array:
    """Transpose one tensor factor; an involution, and T_A = global-T of T_B."""
    t = np.asarray(mat, dtype=complex).reshape(m, n, m, n)
    if which == "A":
        out = t.transpose(2, 1, 0, 3)
    elif which == "B":
        out = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    return out.reshape(m * n, m * n)


def realign(mat: Array, m: int, n: int) -> Array:
    """Rearrange an operator on C^m (x) C^n into an m^2 x n^2 matrix.

    With v the column-stacking map, the output of a product operator
    A (x) B is the rank-one matrix v(A) v(B)^T.
    """
    t = np.asarray(mat, dtype=complex).reshape(m, n, m, n)
    # rho[i*n+k, j*n+l] lands at row j*m+i, column l*n+k
    return t.transpose(2, 0, 3, 1).reshape(m * m, n * n)


def frobenius(x: Array) -> float:
    return float(np.linalg.norm(x))


def eig_hermitian(
    h: Array,
    *,
    tol_factor: float = EIG_OFFDIAG_FACTOR,
    max_sweeps: int = EIG_MAX_SWEEPS,
) -> EigDecomposition:
    """Full eigendecomposition by cyclic complex Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass drops below
    tol_factor * ||H||_F.  Unconditionally convergent on Hermitian input;
    values come back nonincreasing with matching orthonormal columns.
    """
    a = np.asarray(h, dtype=complex)
    d = a.shape[0]
    if a.shape != (d, d):
        raise ValueError(f"square matrix required, got {a.shape}")
    if not is_hermitian(a, 1e-8 * max(d, 1)):
        raise ValueError("input is not Hermitian within tolerance")
    a, _ = hermitize(a)
    v = np.eye(d, dtype=complex)
    norm = frobenius(a)
    if norm == 0.0 or d == 1:
        vals = np.diag(a).real.copy()
        order = np.argsort(-vals)
        return EigDecomposition(vals[order], v[:, order])
    threshold = tol_factor * norm
    # pivots below skip_floor cannot push the off-diagonal mass above threshold
    skip_floor = max(threshold / (2.0 * d), 1e-300)
    diag_idx = np.diag_indices(d)
    for _ in range(max_sweeps):
        # summed directly: the norm^2 - sum(diag^2) form cancels catastrophically
        off_direct = a.copy()
        off_direct[diag_idx] = 0.0
        off = float(np.linalg.norm(off_direct))
        if off <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                hpq = a[p, q]
                r = abs(hpq)
                if r <= skip_floor:
                    continue
                phase = hpq.conjugate() / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # W = diag(1, phase) @ [[c, s], [-s, c]] zeroes the pivot
                w = np.array([[c, s], [-s * phase, c * phase]], dtype=complex)
                cols = a[:, [p, q]] @ w
                a[:, [p, q]] = cols
                a[[p, q], :] = dagger(w) @ a[[p, q], :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ w
        norm = frobenius(a)
    vals = np.diag(a).real.copy()
    order = np.argsort(-vals, kind="stable")
    return EigDecomposition(vals[order], v[:, order])


def eigvals_descending(h: Array) -> Array:
    return eig_hermitian(h).values


def lambda_min(h: Array) -> float:
    return float(eig_hermitian(h).values[-1])


def trace_norm(x: Array) -> float:
    """Sum of singular values, via the spectrum of X†X."""
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return 0.0
    gram = dagger(x) @ x
    vals = eig_hermitian(gram).values
    # squaring doubles the noise exponent; eigenvalues at gram-noise level
    # are numerically zero and would blow up to sqrt(noise) otherwise
    floor = len(vals) * np.finfo(float).eps * max(float(vals[0]), 0.0)
    vals = np.where(vals > floor, vals, 0.0)
    return float(np.sum(np.sqrt(vals)))


def is_unnormalized_pure(o: Array, alpha: float, tol: float) -> bool:
    """True iff tr(o^2) and tr(o^3) match alpha^2 and alpha^3 within tol.

    For Hermitian o with 0 < alpha <= 1 this characterizes o = alpha |psi><psi|.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    o = np.asarray(o, dtype=complex)
    t2 = np.trace(o @ o).real
    t3 = np.trace(o @ o @ o).real
    return bool(abs(t2 - alpha**2) <= tol and abs(t3 - alpha**3) <= tol)


