"""Exact-rational certificate machinery for near-separable decompositions.

Everything on the verification path is integer/Fraction arithmetic: a
certificate is a list of m^2 n^2 dyadic-rational weighted product terms,
and acceptance checks the two requirements

  (1)  |1 - ||alpha_i||^2 ||beta_i||^2 sum_j p_j| < eps'   for all i
  (2)  tr((rho - sigma~)^2) < delta'^2

exactly, with sigma~ the unnormalized reconstruction.  Zero-weight
padding terms are exempt from (1): they carry no state and would
otherwise force their zero vectors to look normalized.

"p-bit number" means a dyadic rational a / 2^p with |a| <= 2^p (all
certified scalars are bounded by one in magnitude); truncation is toward
zero, matching the error budget of the closed-form bounds
m^3 n^3 2^-(p-7.5) (reconstruction, Euclidean) and m^3 n^3 2^-(p-5)
(normalization defect).  The weak-membership reduction picks the smallest
p with m^3 n^3 (2^-(p-8) + 2^-(p-5)) <= delta, so a truncated exact
decomposition always verifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import DensityMatrix

ZERO = Fraction(0)
ONE = Fraction(1)


class BitWidthError(ValueError):
    """A certificate scalar does not fit in the advertised dyadic width."""


class CertificateFormatError(ValueError):
    """Certificate shape or instance dimensions are inconsistent."""


@dataclass(frozen=True)
class QRat:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    def __add__(self, other: "QRat") -> "QRat":
        return QRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QRat") -> "QRat":
        return QRat(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "QRat") -> "QRat":
        return QRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self) -> "QRat":
        return QRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def scale(self, c: Fraction) -> "QRat":
        return QRat(self.re * c, self.im * c)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


QZERO = QRat(ZERO, ZERO)


def qrat(re, im=0) -> QRat:
    return QRat(Fraction(re), Fraction(im))


def vec_norm_sq(v: tuple[QRat, ...]) -> Fraction:
    total = ZERO
    for x in v:
        total += x.abs2()
    return total


def outer(v: tuple[QRat, ...]) -> tuple[tuple[QRat, ...], ...]:
    return tuple(tuple(a * b.conj() for b in v) for a in v)


def kron(a, b) -> tuple[tuple[QRat, ...], ...]:
    ra, rb = len(a), len(b)
    out = []
    for i in range(ra):
        for k in range(rb):
            row = []
            for j in range(ra):
                for l in range(rb):
                    row.append(a[i][j] * b[k][l])
            out.append(tuple(row))
    return tuple(out)


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a, c: Fraction):
    return tuple(tuple(x.scale(c) for x in row) for row in a)


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def frobenius_sq(a) -> Fraction:
    """tr(A A†) = sum of squared moduli; equals tr(A^2) for Hermitian A."""
    total = ZERO
    for row in a:
        for x in row:
            total += x.abs2()
    return total


def is_hermitian_rational(a) -> bool:
    d = len(a)
    for i in range(d):
        for j in range(d):
            if a[i][j].re != a[j][i].re or a[i][j].im != -a[j][i].im:
                return False
    return True


def rational_trace(a) -> QRat:
    t = QZERO
    for i in range(len(a)):
        t = t + a[i][i]
    return t


@dataclass(frozen=True)
class QsepInstance:
    m: int
    n: int
    rho: tuple[tuple[QRat, ...], ...]
    delta_p: Fraction
    eps_prime: Fraction
    delta_prime: Fraction

    def __post_init__(self):
        d = self.m * self.n
        if len(self.rho) != d or any(len(r) != d for r in self.rho):
            raise CertificateFormatError(f"rho must be {d}x{d}")
        if not is_hermitian_rational(self.rho):
            raise CertificateFormatError("rho must be Hermitian with rational entries")
        tr = rational_trace(self.rho)
        if tr.re != 1 or tr.im != 0:
            raise CertificateFormatError(f"rho trace must be exactly 1, got {tr.re}")
        if self.delta_p <= 0 or self.eps_prime <= 0 or self.delta_prime <= 0:
            raise CertificateFormatError("accuracy parameters must be positive")


@dataclass(frozen=True)
class QsepCertificate:
    m: int
    n: int
    terms: tuple[tuple[Fraction, tuple[QRat, ...], tuple[QRat, ...]], ...]

    def __post_init__(self):
        want = self.m**2 * self.n**2
        if len(self.terms) != want:
            raise CertificateFormatError(
                f"certificate must list exactly {want} terms, got {len(self.terms)}"
            )
        for p, alpha, beta in self.terms:
            if p < 0:
                raise CertificateFormatError("weights must be nonnegative")
            if len(alpha) != self.m or len(beta) != self.n:
                raise CertificateFormatError("component vector dimensions are wrong")


def bits_required(delta_p: Fraction) -> int:
    """Smallest p with 2^p >= 1/delta_p."""
    if delta_p <= 0:
        raise ValueError("delta_p must be positive")
    p = 0
    while Fraction(2) ** p < 1 / delta_p:
        p += 1
    return p


def _check_p_bit(x: Fraction, p: int) -> None:
    scaled = x * 2**p
    if scaled.denominator != 1 or abs(scaled.numerator) > 2**p:
        raise BitWidthError(f"{x} is not a {p}-bit dyadic rational in [-1, 1]")


def truncate_toward_zero(x: Fraction, p: int) -> Fraction:
    """Nearest dyadic a/2^p between 0 and x; |error| < 2^-p."""
    num, den = x.numerator, x.denominator
    scaled = abs(num) * 2**p // den
    sign = 1 if num >= 0 else -1
    return Fraction(sign * scaled, 2**p)


def certificate_state(cert: QsepCertificate) -> tuple[tuple[QRat, ...], ...]:
    """sigma~ = sum_i p_i alpha_i alpha_i† (x) beta_i beta_i†, exactly."""
    d = cert.m * cert.n
    acc = tuple(tuple(QZERO for _ in range(d)) for _ in range(d))
    for p, alpha, beta in cert.terms:
        if p == 0:
            continue
        term = mat_scale(kron(outer(alpha), outer(beta)), p)
        acc = mat_add(acc, term)
    return acc


@dataclass(frozen=True)
class VerificationResult:
    accepted: bool
    normalization_residual: Fraction  # max over nonzero terms of |1 - ...|
    distance_sq: Fraction  # tr((rho - sigma~)^2)

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "normalization_residual": str(self.normalization_residual),
            "distance_sq": str(self.distance_sq),
        }


def verify_certificate(inst: QsepInstance, cert: QsepCertificate) -> VerificationResult:
    """Exact acceptance check of requirements (1) and (2); no floating point."""
    if (inst.m, inst.n) != (cert.m, cert.n):
        raise CertificateFormatError(
            f"instance is {inst.m}x{inst.n}, certificate is {cert.m}x{cert.n}"
        )
    p = bits_required(inst.delta_p)
    total_weight = ZERO
    for w, alpha, beta in cert.terms:
        _check_p_bit(w, p)
        for x in (*alpha, *beta):
            _check_p_bit(x.re, p)
            _check_p_bit(x.im, p)
        total_weight += w
    norm_residual = ZERO
    for w, alpha, beta in cert.terms:
        if w == 0:
            continue  # padding terms carry no state
        gap = ONE - vec_norm_sq(alpha) * vec_norm_sq(beta) * total_weight
        norm_residual = max(norm_residual, abs(gap))
    sigma = certificate_state(cert)
    dist_sq = frobenius_sq(mat_sub(inst.rho, sigma))
    accepted = norm_residual < inst.eps_prime and dist_sq < inst.delta_prime**2
    return VerificationResult(accepted, norm_residual, dist_sq)


def truncate_decomposition(
    decomp: list[tuple],
    p: int,
    m: int,
    n: int,
) -> QsepCertificate:
    """p-bit truncation of a normalized product decomposition.

    Input terms are (weight, alpha, beta) with exact Fraction/QRat scalars
    or floats (floats convert exactly before truncating).  Shorter
    decompositions are padded with zero terms up to m^2 n^2.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    want = m**2 * n**2
    if len(decomp) > want:
        raise ValueError(f"decomposition has {len(decomp)} > {want} terms")

    def to_qrat(x) -> QRat:
        if isinstance(x, QRat):
            return x
        if isinstance(x, complex):
            return QRat(Fraction(x.real), Fraction(x.imag))
        return QRat(Fraction(x), ZERO)

    terms = []
    weight_sum = ZERO
    for w, alpha, beta in decomp:
        wf = w if isinstance(w, Fraction) else Fraction(w)
        if wf < 0:
            raise ValueError("weights must be nonnegative")
        weight_sum += wf
        ta = tuple(to_qrat(x) for x in alpha)
        tb = tuple(to_qrat(x) for x in beta)
        if abs(vec_norm_sq(ta) - 1) > Fraction(1, 10**9) or abs(
            vec_norm_sq(tb) - 1
        ) > Fraction(1, 10**9):
            raise ValueError("decomposition vectors must be unit within 1e-9")
        trunc_a = tuple(
            QRat(truncate_toward_zero(x.re, p), truncate_toward_zero(x.im, p)) for x in ta
        )
        trunc_b = tuple(
            QRat(truncate_toward_zero(x.re, p), truncate_toward_zero(x.im, p)) for x in tb
        )
        terms.append((truncate_toward_zero(wf, p), trunc_a, trunc_b))
    if abs(weight_sum - 1) > Fraction(1, 10**9):
        raise ValueError("weights must sum to 1 within 1e-9")
    zero_a = tuple(QZERO for _ in range(m))
    zero_b = tuple(QZERO for _ in range(n))
    while len(terms) < want:
        terms.append((ZERO, zero_a, zero_b))
    return QsepCertificate(m, n, tuple(terms))


def error_bound_sigma(m: int, n: int, p: int) -> float:
    """Euclidean reconstruction error bound m^3 n^3 2^-(p-7.5)."""
    if p < 8:
        raise ValueError("bound needs p >= 8")
    return (m * n) ** 3 * 2.0 ** (-(p - 7.5))


def error_bound_sigma_sq(m: int, n: int, p: int) -> Fraction:
    """Exact square of the reconstruction bound (2 * 7.5 is an integer)."""
    if p < 8:
        raise ValueError("bound needs p >= 8")
    return Fraction((m * n) ** 6) * Fraction(2) ** (-(2 * p - 15))


def error_bound_normalization(m: int, n: int, p: int) -> float:
    """Normalization defect bound m^3 n^3 2^-(p-5)."""
    if p < 6:
        raise ValueError("bound needs p >= 6")
    return (m * n) ** 3 * 2.0 ** (-(p - 5))


def error_bound_normalization_exact(m: int, n: int, p: int) -> Fraction:
    return Fraction((m * n) ** 3) * Fraction(2) ** (-(p - 5))


def reduce_wmem_to_qsep(
    rho: tuple[tuple[QRat, ...], ...],
    m: int,
    n: int,
    delta: Fraction,
) -> QsepInstance:
    """Choose the smallest p whose combined truncation error fits under delta.

    Requires m^3 n^3 (2^-(p-8) + 2^-(p-5)) <= delta, i.e. 2^p >= 288 m^3 n^3 / delta;
    the instance gets delta_p = 2^-p, delta' = m^3 n^3 2^-(p-8),
    eps' = m^3 n^3 2^-(p-5).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    cube = Fraction((m * n) ** 3)
    target = 288 * cube / delta
    p = 1
    while Fraction(2) ** p < target:
        p += 1
    return QsepInstance(
        m,
        n,
        rho,
        delta_p=Fraction(1, 2**p),
        eps_prime=cube * Fraction(2) ** (5 - p),
        delta_prime=cube * Fraction(2) ** (8 - p),
    )


def wmem_out_to_wmem(rho: DensityMatrix, delta: float):
    """Shift an out-biased membership query to a plain one.

    rho0 = rho + delta (rho - I/(mn))/2 pushes the state away from the
    maximally mixed point; delta0 = delta / (2 sqrt(mn(mn-1))).  rho0 stays
    Hermitian with unit trace but may leave the PSD cone for boundary
    states, so its minimum eigenvalue is reported rather than validated.
    """
    import numpy as np

    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    d = rho.dim
    eye = np.eye(d) / d
    mat0 = rho.mat + delta * (rho.mat - eye) / 2.0
    delta0 = delta / (2.0 * (d * (d - 1)) ** 0.5)
    lam_min = float(np.linalg.eigvalsh(mat0)[0])
    return mat0, delta0, lam_min
