"""Square matrix polynomials with complex coefficients.

A :class:`MatrixPolynomial` stores its coefficients leading first,

    F(z) = A_0 z^n + A_1 z^(n-1) + ... + A_n,

as an immutable ``(n + 1, p, p)`` complex array.  Degrees are load-bearing
throughout the package, so leading blocks that are numerically zero are
trimmed on construction.  The zero polynomial has degree ``-1`` and an
empty coefficient array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from ._numerics import cluster_roots, numerical_rank
from .exceptions import NonInvertibleLeading, SingularPolynomial
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "MatrixPolynomial",
    "ScalarPolynomial",
    "Spectrum",
    "ZeroEvidence",
    "evaluate",
    "derivative",
    "adjoint_reverse",
    "determinant_poly",
    "adjugate_poly",
    "spectrum",
    "even_odd_split",
    "right_divide",
    "is_regular",
    "is_simple",
    "local_taylor",
]


def _trim_leading(arr, tol):
    """Drop leading blocks whose norm is below ``tol`` times the largest one."""
    if arr.shape[0] == 0:
        return arr
    norms = np.linalg.norm(arr.reshape(arr.shape[0], -1), axis=1)
    biggest = norms.max()
    if biggest == 0.0:
        return arr[:0]
    keep = np.nonzero(norms > tol * biggest)[0]
    return arr[keep[0]:]


class MatrixPolynomial:
    """``p x p`` matrix polynomial, coefficients leading first.

    Parameters
    ----------
    coeffs : array_like
        Either a ``(n + 1, p, p)`` array or a sequence of ``p x p`` matrices,
        ``coeffs[0]`` being the coefficient of the highest power.  A single
        ``p x p`` matrix is read as a constant polynomial.
    p : int, optional
        Matrix size; only needed to build a zero polynomial from an empty
        coefficient list.
    trim_tol : float
        Relative threshold for trimming leading zero blocks.

    Examples
    --------
    >>> F = MatrixPolynomial([np.eye(2), [[0, 1], [1, 0]]])   # z I + J
    >>> F(1.0).real
    array([[1., 1.],
           [1., 1.]])
    """

    __slots__ = ("_c",)
    __array_ufunc__ = None  # make ``ndarray @ poly`` defer to __rmatmul__

    def __init__(self, coeffs, p=None, trim_tol=DEFAULT.trim):
        if isinstance(coeffs, MatrixPolynomial):
            arr = coeffs._c
        else:
            if p is not None and len(coeffs) == 0:
                arr = np.zeros((0, p, p), dtype=complex)
            else:
                arr = np.array(coeffs, dtype=complex)
                if arr.ndim == 2:
                    arr = arr[None]
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] < 1:
            raise ValueError(
                f"coefficients must have shape (n+1, p, p), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = np.ascontiguousarray(_trim_leading(arr, trim_tol))
        arr.setflags(write=False)
        self._c = arr

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p):
        return cls(np.zeros((0, p, p)), p=p)

    @classmethod
    def identity(cls, p):
        return cls(np.eye(p)[None])

    @classmethod
    def constant(cls, M):
        return cls(np.atleast_2d(np.asarray(M, dtype=complex))[None])

    @classmethod
    def monomial(cls, k, p, M=None):
        """``M z^k`` (``M`` defaults to the identity)."""
        M = np.eye(p) if M is None else np.asarray(M, dtype=complex)
        c = np.zeros((k + 1, p, p), dtype=complex)
        c[0] = M
        return cls(c)

    @classmethod
    def scalar(cls, coeffs):
        """1 x 1 polynomial from scalar coefficients, leading first."""
        c = np.asarray(coeffs, dtype=complex).reshape(-1, 1, 1)
        return cls(c, p=1)

    @classmethod
    def diag(cls, *scalars):
        """Diagonal polynomial ``diag(f_1, ..., f_p)`` from scalar coefficient lists."""
        p = len(scalars)
        n = max(len(s) for s in scalars) - 1
        c = np.zeros((n + 1, p, p), dtype=complex)
        for i, s in enumerate(scalars):
            s = np.asarray(s, dtype=complex)
            c[n + 1 - len(s):, i, i] = s
        return cls(c)

    # -- basic properties -------------------------------------------------

    @property
    def coeffs(self):
        """Read-only ``(n + 1, p, p)`` coefficient array, leading first."""
        return self._c

    @property
    def p(self):
        return self._c.shape[1]

    @property
    def degree(self):
        return self._c.shape[0] - 1

    def is_zero(self):
        return self._c.shape[0] == 0

    @property
    def leading(self):
        if self.is_zero():
            return np.zeros((self.p, self.p), dtype=complex)
        return self._c[0]

    def is_monic(self, tol=1e-12):
        return not self.is_zero() and np.allclose(self.leading, np.eye(self.p), atol=tol, rtol=0)

    def ascending(self):
        """Coefficients ordered by increasing power (``[A_n, ..., A_0]``)."""
        return self._c[::-1]

    def coefficient(self, power):
        """Coefficient of ``z**power`` (zero block outside the support)."""
        if 0 <= power <= self.degree:
            return self._c[self.degree - power]
        return np.zeros((self.p, self.p), dtype=complex)

    def norm(self):
        """Largest coefficient block 2-norm."""
        if self.is_zero():
            return 0.0
        return float(max(np.linalg.norm(A, 2) for A in self._c))

    # -- evaluation -------------------------------------------------------

    def __call__(self, z):
        """Evaluate by Horner's rule; ``z`` may be a scalar or a 1-d array."""
        z = np.asarray(z, dtype=complex)
        p = self.p
        if z.ndim == 0:
            out = np.zeros((p, p), dtype=complex)
            for A in self._c:
                out = out * z + A
            return out
        out = np.zeros(z.shape + (p, p), dtype=complex)
        zz = z[..., None, None]
        for A in self._c:
            out = out * zz + A
        return out

    # -- arithmetic -------------------------------------------------------

    def _check_same_size(self, other):
        if other.p != self.p:
            raise ValueError(f"size mismatch: {self.p} vs {other.p}")

    def __add__(self, other):
        if not isinstance(other, MatrixPolynomial):
            other = MatrixPolynomial.constant(np.broadcast_to(other, (self.p, self.p)))
        self._check_same_size(other)
        n = max(self.degree, other.degree)
        if n < 0:
            return MatrixPolynomial.zero(self.p)
        c = np.zeros((n + 1, self.p, self.p), dtype=complex)
        if self.degree >= 0:
            c[n - self.degree:] += self._c
        if other.degree >= 0:
            c[n - other.degree:] += other._c
        return MatrixPolynomial(c, p=self.p)

    __radd__ = __add__

    def __neg__(self):
        return MatrixPolynomial(-self._c, p=self.p)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, MatrixPolynomial) or np.ndim(scalar) != 0:
            return NotImplemented
        return MatrixPolynomial(self._c * scalar, p=self.p)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, MatrixPolynomial):
            self._check_same_size(other)
            if self.is_zero() or other.is_zero():
                return MatrixPolynomial.zero(self.p)
            n = self.degree + other.degree
            c = np.zeros((n + 1, self.p, self.p), dtype=complex)
            for i, A in enumerate(self._c):
                for j, B in enumerate(other._c):
                    c[i + j] += A @ B
            return MatrixPolynomial(c, p=self.p)
        M = np.asarray(other, dtype=complex)
        return MatrixPolynomial(self._c @ M, p=self.p)

    def __rmatmul__(self, other):
        M = np.asarray(other, dtype=complex)
        return MatrixPolynomial(M @ self._c, p=self.p)

    def shift(self, k=1):
        """Multiply by ``z**k``."""
        if self.is_zero():
            return self
        pad = np.zeros((k, self.p, self.p), dtype=complex)
        return MatrixPolynomial(np.concatenate([self._c, pad]), p=self.p)

    @property
    def vee(self):
        """``F^v(z) = sum A_k^* z^(n-k)``, equal to ``F(conj z)^*``."""
        return adjoint_reverse(self)

    def allclose(self, other, atol=1e-10):
        if not isinstance(other, MatrixPolynomial):
            other = MatrixPolynomial(other)
        diff = self - other
        return diff.is_zero() or diff.norm() <= atol

    def __repr__(self):
        return f"MatrixPolynomial(p={self.p}, degree={self.degree})"


@dataclass(frozen=True)
class ScalarPolynomial:
    """Scalar polynomial, coefficients leading first (trimmed)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        nz = np.nonzero(c != 0)[0]
        c = c[nz[0]:] if len(nz) else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return len(self.coeffs) == 0

    def __call__(self, z):
        if self.is_zero():
            return np.zeros_like(np.asarray(z, dtype=complex))
        return np.polyval(self.coeffs, z)

    def deriv(self, k=1):
        if k > self.degree:
            return ScalarPolynomial(np.zeros(0))
        return ScalarPolynomial(np.polyder(self.coeffs, k) if k else self.coeffs)

    def roots(self):
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.roots(self.coeffs)


@dataclass(frozen=True)
class Spectrum:
    """Distinct zeros of a regular matrix polynomial with multiplicities."""

    entries: tuple
    total_count: int

    @property
    def values(self):
        return np.array([lam for lam, _ in self.entries], dtype=complex)

    @property
    def multiplicities(self):
        return [m for _, m in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def max_real(self):
        if not self.entries:
            return -np.inf
        return float(max(lam.real for lam, _ in self.entries))


@dataclass(frozen=True)
class ZeroEvidence:
    """Per-zero record produced by :func:`is_simple`."""

    value: complex
    multiplicity: int
    nullity: int
    singular_values: tuple = field(repr=False)
    adj_rank: int | None = None

    @property
    def simple(self):
        return self.nullity == self.multiplicity


# -- module-level operations ----------------------------------------------

def evaluate(F, z):
    """``F(z)`` by Horner's rule."""
    return F(z)


def derivative(F, order=1):
    """Coefficient-wise ``order``-th derivative."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if order == 0 or F.is_zero():
        return F
    n = F.degree
    if order > n:
        return MatrixPolynomial.zero(F.p)
    c = F.coeffs[: n - order + 1].copy()
    for i in range(n - order + 1):
        power = n - i
        c[i] *= factorial(power) // factorial(power - order)
    return MatrixPolynomial(c, p=F.p)


def adjoint_reverse(F):
    """``F^v``: conjugate-transpose every coefficient, keep the layout."""
    return MatrixPolynomial(np.conj(np.swapaxes(F.coeffs, 1, 2)), p=F.p)


def _sample_circle(count, radius):
    k = np.arange(count)
    return radius * np.exp(2j * np.pi * k / count)


def _interpolate_on_circle(values, radius):
    """Coefficients (ascending) of the polynomial taking ``values`` at the
    scaled roots of unity; works along axis 0."""
    count = values.shape[0]
    c = np.fft.fft(values, axis=0) / count
    scale = radius ** -np.arange(count, dtype=float)
    return c * scale.reshape((-1,) + (1,) * (values.ndim - 1))


def _interp_radius(F):
    """Radius of the sampling circle.

    With an invertible leading coefficient this is the block Fujiwara-type
    scale ``max_k ||A_0^-1 A_k||^(1/k)``, which tracks the root moduli and
    keeps the low-order coefficients accurate; otherwise ``1 + max ||A_k||``.
    """
    lead = F.leading
    sv = np.linalg.svd(lead, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        return 1.0 + F.norm()
    B = np.linalg.solve(lead[None], F.coeffs)
    bounds = [np.linalg.norm(B[k], 2) ** (1.0 / k) for k in range(1, F.degree + 1)]
    radius = max(bounds, default=0.0)
    return radius if radius > 0 else 1.0


def _interp_radii(F):
    """Sampling radii from a lower to an upper root-modulus bound.

    A coefficient ``c_k`` recovered on radius ``r`` carries an error of about
    ``eps max|f| / r^k``, so high powers want a large circle and low powers a
    small one.  The lower bound mirrors :func:`_interp_radius` on the reversed
    polynomial when the trailing coefficient is invertible.
    """
    r_hi = _interp_radius(F)
    trail = F.coeffs[-1]
    sv = np.linalg.svd(trail, compute_uv=False)
    r_lo = min(r_hi, 1.0)
    if F.degree >= 1 and sv[-1] > 1e-10 * max(sv[0], np.finfo(float).tiny):
        B = np.linalg.solve(trail[None], F.coeffs[::-1])
        bounds = [np.linalg.norm(B[k], 2) ** (1.0 / k) for k in range(1, F.degree + 1)]
        top = max(bounds, default=0.0)
        if top > 0:
            r_lo = min(r_hi, 1.0 / top)
    count = int(np.clip(1 + np.ceil(np.log2(r_hi / r_lo)), 1, 8))
    return np.geomspace(r_lo, r_hi, count)


def _interpolate_best(F, count, fn):
    """Ascending coefficients of ``fn(F(z))``, each taken from the radius
    where its round-off estimate is smallest.

    Returns the coefficients plus, per power, the radius used and the
    Hadamard-type noise reference on that circle.
    """
    best = None
    for r in _interp_radii(F):
        Fv = F(_sample_circle(count, r))
        vals = fn(Fv)
        asc = _interpolate_on_circle(vals, r)
        noise = float(np.max(np.abs(vals))) * r ** -np.arange(count, dtype=float)
        ref = _det_reference(Fv)
        if best is None:
            best = [asc, noise, np.full(count, r), np.full(count, ref)]
            continue
        better = noise < best[1]
        best[0][better] = asc[better]
        best[1][better] = noise[better]
        best[2][better] = r
        best[3][better] = ref
    return best[0], best[2], best[3]


def _cofactors(M):
    """Adjugate of a batch of matrices via signed minors (robust when singular)."""
    p = M.shape[-1]
    if p == 1:
        return np.ones(M.shape, dtype=complex)
    adj = np.empty(M.shape, dtype=complex)
    idx = np.arange(p)
    for i in range(p):
        for j in range(p):
            rows = idx[idx != j]
            cols = idx[idx != i]
            minor = M[..., rows[:, None], cols[None, :]]
            adj[..., i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _det_reference(values):
    """Hadamard-type magnitude ``max ||F(z)||^p`` used as the noise reference."""
    p = values.shape[-1]
    norms = np.linalg.norm(values, ord=2, axis=(-2, -1))
    return float(np.max(norms) ** p)


def determinant_poly(F, tol=DEFAULT.trim):
    """Coefficients of ``det F(z)`` (leading first).

    ``det F`` is sampled at ``n p + 1`` scaled roots of unity and the
    interpolating polynomial recovered by an FFT.  A few radii between root
    modulus bounds are tried and each coefficient is read from the circle
    where it is resolved best.  A coefficient ``c_k`` is zeroed when
    ``|c_k| r^k`` is below ``tol`` times ``max ||F(z)||^p`` on its circle,
    i.e. when it is indistinguishable from round-off.  An
    identically singular ``F`` yields the zero polynomial.
    """
    if F.is_zero():
        return ScalarPolynomial(np.zeros(0))
    if F.p == 1:
        return ScalarPolynomial(F.coeffs[:, 0, 0])
    N = F.degree * F.p
    asc, radii, refs = _interpolate_best(F, N + 1, np.linalg.det)
    scaled = np.abs(asc) * radii ** np.arange(N + 1, dtype=float)
    asc[scaled <= tol * refs] = 0.0
    return ScalarPolynomial(asc[::-1])


def adjugate_poly(F):
    """``adj F`` as a matrix polynomial, via per-entry interpolation of cofactors."""
    p = F.p
    if p == 1:
        return MatrixPolynomial.identity(1)
    if F.is_zero():
        return MatrixPolynomial.zero(p)
    N = F.degree * (p - 1)
    asc, _, _ = _interpolate_best(F, N + 1, _cofactors)
    return MatrixPolynomial(asc[::-1], p=p)


def local_taylor(F, center, radius, what="det"):
    """Taylor coefficients of ``det F`` or ``adj F`` about ``center``.

    Both are polynomials of known degree, so interpolating on a small circle
    around ``center`` recovers the expansion exactly up to round-off, and
    with a radius comparable to the distance to the neighbouring zeros the
    low-order coefficients keep full relative accuracy.  Derivatives follow
    as ``f^(k)(center) = k! * coeff[k]``.
    """
    N = max(F.degree, 0) * (F.p if what == "det" else F.p - 1)
    pts = center + _sample_circle(N + 1, radius)
    Fv = F(pts)
    vals = np.linalg.det(Fv) if what == "det" else _cofactors(Fv)
    return _interpolate_on_circle(vals, radius)


def is_regular(F, tol=DEFAULT.trim):
    """``det F(z)`` is not identically zero."""
    if F.is_zero():
        return False
    if np.linalg.matrix_rank(F.leading) == F.p:
        return True
    return not determinant_poly(F, tol).is_zero()


def _finite_eigenvalues(F, count):
    """Zeros of a regular ``F`` from its block companion linearization."""
    n, p = F.degree, F.p
    if n == 0 or count == 0:
        return np.zeros(0, dtype=complex)
    A = F.coeffs
    lead = A[0]
    s = np.linalg.svd(lead, compute_uv=False)
    if s[-1] > 1e-10 * s[0]:
        B = np.linalg.solve(lead[None], A)  # monic normalisation from the left
        C = np.zeros((n * p, n * p), dtype=complex)
        if n > 1:
            C[:-p, p:] = np.eye((n - 1) * p)
        for k in range(1, n + 1):
            C[-p:, (n - k) * p:(n - k + 1) * p] = -B[k]
        return np.linalg.eigvals(C)

    from scipy.linalg import eig

    C = np.zeros((n * p, n * p), dtype=complex)
    D = np.eye(n * p, dtype=complex)
    if n > 1:
        C[:-p, p:] = np.eye((n - 1) * p)
    for k in range(1, n + 1):
        C[-p:, (n - k) * p:(n - k + 1) * p] = -A[k]
    D[-p:, -p:] = lead
    alpha, beta = eig(C, D, right=False, homogeneous_eigvals=True)
    finiteness = np.abs(beta) / np.hypot(np.abs(alpha), np.abs(beta))
    order = np.argsort(-finiteness)[:count]
    return alpha[order] / beta[order]


def spectrum(F, tol: Tolerances = DEFAULT, polish=False):
    """Zeros of ``det F`` with multiplicities.

    The zeros come from the block companion linearization (a generalized
    pencil when the leading coefficient is singular); ``deg det F`` of them
    are kept and grouped by :func:`~matstab._numerics.cluster_roots`.  The
    centroid of a group is reported, which is far more accurate than the
    individual members of a split multiple root.

    Raises
    ------
    SingularPolynomial
        If ``F`` is not regular.
    """
    det = determinant_poly(F, tol.trim)
    if det.is_zero():
        raise SingularPolynomial("det F(z) vanishes identically")
    count = det.degree
    raw = _finite_eigenvalues(F, count)
    groups = cluster_roots(raw, tol.cluster, tol.cluster_eta)
    if polish:
        d1 = det.deriv(1)
        polished = []
        for lam, mult in groups:
            if mult == 1:
                step = det(lam) / d1(lam) if d1(lam) != 0 else 0.0
                lam = lam - step
            polished.append((complex(lam), mult))
        groups = polished
    return Spectrum(tuple(groups), count)


def even_odd_split(F):
    """Split ``F(z) = F_e(z^2) + z F_o(z^2)``; returns ``(F_e, F_o)``."""
    p, n = F.p, F.degree
    if n < 0:
        z = MatrixPolynomial.zero(p)
        return z, z
    A = F.coeffs
    if n % 2 == 0:
        even = A[0::2]
        odd = A[1::2]
    else:
        even = A[1::2]
        odd = A[0::2]
    Fe = MatrixPolynomial(even, p=p)
    Fo = MatrixPolynomial(odd, p=p) if len(odd) else MatrixPolynomial.zero(p)
    return Fe, Fo


def right_divide(Q, P, tol: Tolerances = DEFAULT):
    """Right division ``Q = C P + E`` with ``deg E < deg P``.

    The leading coefficient of ``P`` must be invertible.
    """
    if P.is_zero():
        raise NonInvertibleLeading("division by the zero polynomial")
    lead = P.leading
    rank, _, _ = numerical_rank(lead, tol.rank, P.p)
    if rank < P.p:
        raise NonInvertibleLeading("leading coefficient of the divisor is singular")
    lead_inv = np.linalg.inv(lead)
    p, m = P.p, P.degree
    if Q.degree < m:
        return MatrixPolynomial.zero(p), Q

    rem = Q.ascending().copy()
    Pa = P.ascending()
    qdeg = Q.degree - m
    quot = np.zeros((qdeg + 1, p, p), dtype=complex)
    for k in range(Q.degree, m - 1, -1):
        c = rem[k] @ lead_inv
        quot[k - m] = c
        rem[k - m:k + 1] -= c @ Pa
        rem[k] = 0.0
    C = MatrixPolynomial(quot[::-1], p=p)
    E = MatrixPolynomial(rem[:m][::-1], p=p) if m > 0 else MatrixPolynomial.zero(p)
    return C, E


def local_radius(spec, lam):
    """Half the distance from ``lam`` to the nearest other zero in ``spec``."""
    others = [abs(mu - lam) for mu, _ in spec if mu != lam]
    cap = 0.5 * max(1.0, abs(lam))
    return min([cap] + [0.5 * d for d in others])


def _term_scale(F, lam):
    """Size of the terms summed in ``F(lam)``, a cancellation-aware scale."""
    if F.is_zero():
        return 0.0
    norms = np.linalg.norm(F.coeffs, ord=2, axis=(1, 2))
    return float(np.sum(norms * abs(lam) ** np.arange(F.degree, -1, -1)))


def is_simple(F, tol: Tolerances = DEFAULT, with_adjugate=False):
    """Numerical simplicity test.

    ``F`` is simple when the nullity of ``F(lam)`` equals the multiplicity of
    every zero ``lam``.  With ``with_adjugate=True`` the rank of
    ``(adj F)^(l-1)(lam)`` is also recorded; for a simple ``F`` it equals
    ``l``.

    Returns
    -------
    simple : bool
    evidence : list of ZeroEvidence
    """
    spec = spectrum(F, tol)
    evidence = []
    for lam, mult in spec:
        rank, sv, _ = numerical_rank(F(lam), tol.rank, F.p, _term_scale(F, lam))
        adj_rank = None
        if with_adjugate:
            taylor = local_taylor(F, lam, local_radius(spec, lam), what="adj")
            adj_rank, _, _ = numerical_rank(taylor[mult - 1], tol.rank, F.p)
        evidence.append(ZeroEvidence(lam, mult, F.p - rank, tuple(sv), adj_rank))
    return all(e.simple for e in evidence), evidence
