"""Small self-contained dense linear algebra.

Products and brute-force powers run through the compiled loop kernels.
Characteristic polynomials use Faddeev-LeVerrier, polynomial roots use
Aberth-Ehrlich simultaneous iteration, and linear systems use LU with
partial pivoting. None of this calls into LAPACK.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    ConvergenceError,
    DegenerateSpectrumError,
    IllConditionedWarning,
    InvalidArgumentError,
    OverflowDetected,
    SingularMatrixError,
)
from .normal_form import NormalFormMatrix

PIVOT_TOL = 1e-12
RESIDUAL_TOL = 1e-8
ROOT_SEED = 20240611
ROOT_MAXITER = 200
DISTINCT_GAP = 1e-8
CLUSTER_TOL = 1e-2
IMAG_RESIDUE = 1e-8


def _square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {a.shape}")
    return a


def mat_mul(a, b) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise InvalidArgumentError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return _kernels.matmul_into(a, b, np.empty((a.shape[0], b.shape[1])))


def power_bruteforce(a, n: int) -> np.ndarray:
    """``a**n`` by ``n - 1`` successive multiplications (no squaring)."""
    a = np.ascontiguousarray(_square(a), dtype=float)
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    out = _kernels.power_brute(a, int(n))
    if not np.all(np.isfinite(out)):
        raise OverflowDetected(f"non-finite entries in power {n}")
    return out


def power_by_squaring(a, n: int) -> np.ndarray:
    """Binary exponentiation. Extra benchmark line, outside the three-way comparison."""
    a = np.ascontiguousarray(_square(a), dtype=float)
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    return _kernels.power_squaring(a, int(n))


def lu_factor(a):
    """In-place style LU with partial pivoting.

    Returns ``(lu, perm, sign)`` where ``a[perm] = L @ U`` with unit-diagonal
    ``L`` stored below the diagonal of ``lu``.
    """
    lu = np.array(_square(a), dtype=np.result_type(a, float), copy=True)
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < PIVOT_TOL:
            raise SingularMatrixError(f"pivot {abs(lu[p, k]):.3e} below {PIVOT_TOL} at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, sign


def _lu_substitute(lu, perm, b):
    n = lu.shape[0]
    y = np.array(b[perm], dtype=np.result_type(lu, b), copy=True)
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
    return y


def lu_solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b``; ``b`` may be a vector or a matrix of right-hand sides.

    Raises ``SingularMatrixError`` for a pivot below 1e-12. If the
    multiply-back residual exceeds ``1e-8 * (1 + |b|_inf)`` the solution
    is still returned but an ``IllConditionedWarning`` is emitted.
    """
    a = _square(a)
    b = np.asarray(b)
    if b.shape[0] != a.shape[0]:
        raise InvalidArgumentError(f"rhs has {b.shape[0]} rows, matrix has {a.shape[0]}")
    lu, perm, _ = lu_factor(a)
    x = _lu_substitute(lu, perm, b)
    resid = np.max(np.abs(a @ x - b)) if b.size else 0.0
    bound = RESIDUAL_TOL * (1.0 + (np.max(np.abs(b)) if b.size else 0.0))
    if resid > bound:
        warnings.warn(
            f"lu_solve residual {resid:.3e} exceeds {bound:.3e}", IllConditionedWarning, stacklevel=2
        )
    return x


def det(a) -> float:
    try:
        lu, _, sign = lu_factor(a)
    except SingularMatrixError:
        return 0.0
    return sign * np.prod(np.diag(lu))


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, leading coefficient first, normalised to be monic."""

    coeffs: tuple

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        nz = np.flatnonzero(c)
        if nz.size == 0:
            raise InvalidArgumentError("zero polynomial")
        c = c[nz[0]:]
        object.__setattr__(self, "coeffs", tuple(float(x) for x in c / c[0]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polyval(np.asarray(self.coeffs), z)


def char_poly(a) -> Polynomial:
    """Characteristic polynomial ``det(lambda I - a)`` by Faddeev-LeVerrier."""
    a = np.asarray(_square(a), dtype=float)
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    mk = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(a @ mk) / k
    return Polynomial(tuple(coeffs))


def poly_roots(p: Polynomial, maxiter: int = ROOT_MAXITER, seed: int = ROOT_SEED) -> np.ndarray:
    """All complex roots of ``p`` by Aberth-Ehrlich iteration.

    Starting points sit on a circle of radius ``1 + max|coeff|`` with a
    seeded random phase, so repeated calls give identical output. A k-fold
    root only converges to about ``eps**(1/k)``; see ``_merge_clusters`` for
    how such clusters are tightened afterwards.

    Acceptance test for each root is a backward-error style residual:
    ``|p(z)| <= 1e-9 * (1 + max|coeff|) * max(1, |z|)**deg``.
    """
    c = np.asarray(p.coeffs, dtype=float)
    deg = c.size - 1
    if deg < 1:
        raise InvalidArgumentError("polynomial must have degree >= 1")
    if deg == 1:
        return np.array([-c[1] + 0j])

    dc = c[:-1] * np.arange(deg, 0, -1)
    cmax = np.max(np.abs(c[1:]))
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    angles = phase + 2.0 * np.pi * np.arange(deg) / deg + rng.uniform(-0.1, 0.1, deg)
    z = (1.0 + cmax) * np.exp(1j * angles)

    eps = np.finfo(float).eps
    off_diag = ~np.eye(deg, dtype=bool)
    for _ in range(maxiter):
        pz = np.polyval(c, z)
        dpz = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            inv = np.where(off_diag, 1.0 / np.where(off_diag, diff, 1.0), 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= 4.0 * eps * np.maximum(np.abs(z), 1e-300)):
            break

    resid = np.abs(np.polyval(c, z))
    bound = 1e-9 * (1.0 + cmax) * np.maximum(1.0, np.abs(z)) ** deg
    if not np.all(resid <= bound):
        raise ConvergenceError("Aberth iteration did not converge", residuals=resid)
    return _merge_clusters(c, z)


def _merge_clusters(c, z):
    """Collapse each numerically multiple root cluster onto one point.

    A k-fold root of p is a simple root of the (k-1)-th derivative, so the
    cluster mean is refined by a few Newton steps on that derivative. The
    merge is kept only if the refined point annihilates p and its first
    k-1 derivatives to rounding level; nearby but distinct roots fail that
    test and are left alone.
    """
    z = z.copy()
    done = np.zeros(z.size, dtype=bool)
    for i in range(z.size):
        if done[i]:
            continue
        near = np.flatnonzero(~done & (np.abs(z - z[i]) <= CLUSTER_TOL * max(1.0, abs(z[i]))))
        k = near.size
        if k < 2:
            continue
        derivs = [c]
        for _ in range(k):
            derivs.append(np.polyder(derivs[-1]))
        centre = z[near].mean()
        for _ in range(3):
            slope = np.polyval(derivs[k], centre)
            if slope == 0:
                break
            centre = centre - np.polyval(derivs[k - 1], centre) / slope
        if abs(centre.imag) <= 1e-14 * max(1.0, abs(centre)):
            centre = complex(centre.real, 0.0)
        multiple = True
        for d in derivs[:k]:
            powers = np.abs(centre) ** np.arange(d.size - 1, -1, -1)
            if abs(np.polyval(d, centre)) > 1e-12 * np.sum(np.abs(d) * powers):
                multiple = False
                break
        if multiple:
            z[near] = centre
            done[near] = True
    return z


def spectral_radius(a) -> float:
    return float(np.max(np.abs(poly_roots(char_poly(a)))))


def companion_eigenvectors(m: NormalFormMatrix, lam) -> np.ndarray:
    """Unit-norm eigenvectors of ``m`` (as columns) for each eigenvalue in ``lam``.

    Row ``i`` of ``M v = lambda v`` reads ``c_i v_1 + v_{i+1} = lambda v_i``
    with ``c`` the first column. With ``v_1 = 1`` this is solved top-down,
    ``v_{i+1} = lambda v_i - c_i``, which amplifies rounding by |lambda| per
    step; for |lambda| > 1 the same relations are solved bottom-up from
    ``v_N = c_N / lambda`` instead.
    """
    lam = np.asarray(lam, dtype=complex)
    col = m.first_column
    n = m.dim
    down = np.empty((n, lam.size), dtype=complex)
    down[0] = 1.0
    for i in range(1, n):
        down[i] = lam * down[i - 1] - col[i - 1]
    big = np.abs(lam) > 1.0
    if np.any(big):
        lb = lam[big]
        up = np.empty((n, lb.size), dtype=complex)
        up[n - 1] = col[n - 1] / lb
        for i in range(n - 2, -1, -1):
            up[i] = (col[i] + up[i + 1]) / lb
        down[:, big] = up
    return down / np.linalg.norm(down, axis=0)


def check_distinct(lam, gap: float = DISTINCT_GAP):
    lam = np.asarray(lam)
    if lam.size < 2:
        return
    d = np.abs(lam[:, None] - lam[None, :])
    scale = np.maximum(np.maximum(np.abs(lam)[:, None], np.abs(lam)[None, :]), 1.0)
    rel = d / scale
    np.fill_diagonal(rel, np.inf)
    if rel.min() <= gap:
        raise DegenerateSpectrumError(f"eigenvalues too close (relative gap {rel.min():.2e})")


def _diag_power(m: NormalFormMatrix, n: int) -> np.ndarray:
    """Diagonalised power without the overflow check (entries may be inf/nan)."""
    lam = poly_roots(Polynomial(tuple(m.char_coeffs)))
    check_distinct(lam)
    u = companion_eigenvectors(m, lam)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        try:
            u_inv = lu_solve(u, np.eye(m.dim, dtype=complex))
        except SingularMatrixError as exc:
            raise DegenerateSpectrumError("eigenvector matrix is singular") from exc
    with np.errstate(over="ignore", invalid="ignore"):
        res = (u * lam**n) @ u_inv
        scale = max(1.0, float(np.max(np.abs(res.real))))
        residue = float(np.max(np.abs(res.imag)))
    if residue > IMAG_RESIDUE * scale:
        raise DegenerateSpectrumError(f"imaginary residue {residue:.2e} in diagonalised power")
    return np.ascontiguousarray(res.real)


def power_by_diagonalization(m: NormalFormMatrix, n: int) -> np.ndarray:
    """``M^n = U D^n U^{-1}`` with companion eigenvectors.

    Raises ``DegenerateSpectrumError`` when two eigenvalues are closer than
    a relative 1e-8, or when the result carries an imaginary residue above
    1e-8 (relative to its largest entry), and ``OverflowDetected`` when an
    entry is not finite.
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    res = _diag_power(m, n)
    if not np.all(np.isfinite(res)):
        raise OverflowDetected(f"non-finite entries in power {n}")
    return res
