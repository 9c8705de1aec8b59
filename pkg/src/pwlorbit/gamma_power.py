"""Powers and geometric sums of normal-form matrices via N scalar sequences.

Because a normal-form matrix has ones on the superdiagonal and zeros
elsewhere outside column 1, right-multiplying by it shifts every column of
``M^k`` one place to the right and builds only a new first column. Row ``i``
of every power is therefore a window of one scalar sequence ``Gamma_i``:

    [M^n]_{i,j} = Gamma_{i, n-(j-1)}

seeded with row ``i`` of ``M`` read right to left (indices ``2-N .. 1``) and
continued by the N-term recurrence

    Gamma_{i,j} = sum_k (-1)^(k-1) rho_k Gamma_{i,j-k},   j >= 2.

Each new power costs N^2 multiplications instead of N^3.

The 2D helpers (``a_recurrence``, ``a_binomial``, ``a_eigen``,
``power_2d_closed``, ``phi_2d_closed``) give closed forms for N = 2, where
``M^n = [[a_n, a_{n-1}], [-delta a_{n-1}, -delta a_{n-2}]]``.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._kernels import gamma_fill, gamma_power_ring
from .errors import (
    DegenerateSpectrumError,
    EigenvalueOneError,
    InvalidArgumentError,
    OverflowDetected,
)
from .normal_form import NormalFormMatrix

EIGEN_GAP = 1e-9
PHI_DENOM_TOL = 1e-12


class GammaState:
    """The N sequences Gamma_1..Gamma_N for one matrix, stored densely.

    Column ``t`` of ``seqs`` holds sequence index ``t + 2 - N``. Extension is
    in place; once you stop extending, treat the object as read-only.
    """

    def __init__(self, matrix: NormalFormMatrix, capacity: int = 16):
        self.matrix = matrix
        n = matrix.dim
        self._coeffs = matrix.recurrence_coeffs
        self._offset = n - 2  # storage column = seq index + offset
        self.seqs = np.zeros((n, max(capacity, n) + n))
        # row i of M reversed supplies Gamma_{i,2-N} .. Gamma_{i,1}
        self.seqs[:, :n] = matrix.materialize()[:, ::-1]
        self.highest_index = 1

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def lowest_index(self) -> int:
        return 2 - self.dim

    def gamma(self, i: int, j: int) -> float:
        """Gamma_{i,j} with 1-based ``i`` and ``lowest_index <= j <= highest_index``."""
        if not (1 <= i <= self.dim) or not (self.lowest_index <= j <= self.highest_index):
            raise IndexError(f"Gamma_{{{i},{j}}} not available")
        return float(self.seqs[i - 1, j + self._offset])

    def sequence(self, i: int) -> np.ndarray:
        """Gamma_i from index ``2 - N`` up to ``highest_index`` (a view)."""
        return self.seqs[i - 1, : self.highest_index + self._offset + 1]

    def _grow(self, cols: int):
        if cols <= self.seqs.shape[1]:
            return
        new = np.zeros((self.dim, max(cols, 2 * self.seqs.shape[1])))
        new[:, : self.seqs.shape[1]] = self.seqs
        self.seqs = new

    def extend(self, upto: int) -> "GammaState":
        if upto < self.highest_index:
            raise InvalidArgumentError(
                f"cannot extend backwards (upto={upto}, have {self.highest_index})"
            )
        last_col = upto + self._offset
        self._grow(last_col + 1)
        bad = gamma_fill(self.seqs, self._coeffs, self.highest_index + self._offset + 1, last_col + 1)
        if bad >= 0:
            col = self.seqs[:, bad]
            i = int(np.flatnonzero(~np.isfinite(col))[0]) + 1
            self.highest_index = bad - 1 - self._offset
            raise OverflowDetected(
                f"non-finite Gamma_{{{i},{bad - self._offset}}}", location=(i, bad - self._offset)
            )
        self.highest_index = upto
        return self

    def power(self, n: int) -> np.ndarray:
        """M^n for ``1 <= n <= highest_index`` (a fresh array)."""
        if not 1 <= n <= self.highest_index:
            raise InvalidArgumentError(f"power {n} not available (extended to {self.highest_index})")
        end = n + self._offset
        return self.seqs[:, end - self.dim + 1:end + 1][:, ::-1].copy()

    def geometric_sum(self, k: int) -> np.ndarray:
        """I + M + ... + M^(k-1) by summing stored Gamma windows.

        Needs ``highest_index >= k - 1``. No inverse of ``I - M`` is formed.
        """
        n = self.dim
        if k < 0:
            raise InvalidArgumentError("k must be >= 0")
        if k == 0:
            return np.zeros((n, n))
        if k - 1 > self.highest_index:
            raise InvalidArgumentError(f"need Gamma up to {k - 1}, have {self.highest_index}")
        out = np.eye(n)
        if k == 1:
            return out
        for c in range(n):
            # [M^p]_{i,c} = Gamma_{i,p-c}, p = 1..k-1  (0-based c)
            lo = 1 - c + self._offset
            hi = k - 1 - c + self._offset
            out[:, c] += self.seqs[:, lo:hi + 1].sum(axis=1)
        return out


def gamma_init(m: NormalFormMatrix) -> GammaState:
    return GammaState(m)


def gamma_extend(state: GammaState, upto: int) -> GammaState:
    return state.extend(upto)


def power(m: NormalFormMatrix, n: int) -> np.ndarray:
    """M^n in O(N^2 n) operations."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    return GammaState(m, capacity=n).extend(n).power(n)


def power_ring(m: NormalFormMatrix, n: int) -> np.ndarray:
    """Same as ``power`` but keeps only the last N sequence terms (compiled)."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    out = gamma_power_ring(np.ascontiguousarray(m.recurrence_coeffs), int(n), np.empty((m.dim, m.dim)))
    if not np.all(np.isfinite(out)):
        raise OverflowDetected(f"non-finite entries in power {n}")
    return out


def geometric_sum(m: NormalFormMatrix, k: int) -> np.ndarray:
    """Sum of the first ``k`` powers, ``M^0 + ... + M^(k-1)``; valid even if I - M is singular."""
    if k < 0:
        raise InvalidArgumentError("k must be >= 0")
    state = GammaState(m, capacity=max(k, 1))
    if k > 1:
        state.extend(k - 1)
    return state.geometric_sum(k)


# -- two dimensions ---------------------------------------------------------


def a_recurrence(tau: float, delta: float, n: int) -> float:
    """a_{-1} = 0, a_0 = 1, a_n = tau a_{n-1} - delta a_{n-2}."""
    if n < -1:
        raise InvalidArgumentError("n must be >= -1")
    prev, cur = 0.0, 1.0
    if n == -1:
        return prev
    for _ in range(n):
        prev, cur = cur, tau * cur - delta * prev
    return cur


def a_sequence(tau: float, delta: float, n: int) -> np.ndarray:
    """``[a_{-1}, a_0, ..., a_n]`` from the recurrence."""
    out = np.empty(n + 2)
    out[0], out[1] = 0.0, 1.0
    for k in range(2, n + 2):
        out[k] = tau * out[k - 1] - delta * out[k - 2]
    return out


@lru_cache(maxsize=None)
def _eta_rows(nmax: int):
    rows = [[1]]
    for n in range(1, nmax + 1):
        row = []
        for m in range(n // 2 + 1):
            left = rows[n - 1][m] if m < len(rows[n - 1]) else 0
            diag = rows[n - 2][m - 1] if m >= 1 and n >= 2 and m - 1 < len(rows[n - 2]) else 0
            row.append(left + diag)
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def eta(m: int, n: int) -> int:
    """Coefficient of ``(-1)^m delta^m tau^(n-2m)`` in a_n, i.e. C(n-m, m).

    Built from eta_{m,n} = eta_{m,n-1} + eta_{m-1,n-2} with eta_{0,n} = 1.
    """
    if n < 0 or m < 0 or 2 * m > n:
        return 0
    return _eta_rows(n)[n][m]


def a_binomial(tau: float, delta: float, n: int, exact: bool = True) -> float:
    """a_n as the alternating binomial sum over m = 0..floor(n/2).

    The terms cancel heavily once |tau|, |delta| approach 2, so by default
    the sum is formed in exact rational arithmetic from the binary values of
    ``tau`` and ``delta`` and rounded once. ``exact=False`` sums the float
    terms directly. Results beyond the float range raise ``OverflowError``.
    """
    if n < -1:
        raise InvalidArgumentError("n must be >= -1")
    if n == -1:
        return 0.0
    row = _eta_rows(n)[n]
    if exact:
        t, d = Fraction(tau), Fraction(delta)
        total = sum(((-1) ** m) * c * d**m * t ** (n - 2 * m) for m, c in enumerate(row))
        return float(total)
    return float(
        np.sum([((-1) ** m) * float(c) * delta**m * tau ** (n - 2 * m) for m, c in enumerate(row)])
    )


def eigenvalues_2d(tau: float, delta: float):
    """Roots of lambda^2 - tau lambda + delta, computed without cancellation."""
    disc = tau * tau - 4.0 * delta
    if disc >= 0:
        s = np.sqrt(disc)
        big = 0.5 * (tau + np.copysign(s, tau))
        if big == 0.0:
            return 0.0, 0.0
        return big, delta / big
    s = cmath.sqrt(disc)
    return 0.5 * (tau + s), 0.5 * (tau - s)


def a_eigen(lambda1: complex, lambda2: complex, n: int) -> float:
    """a_n = (l1^(n+1) - l2^(n+1)) / (l1 - l2) for distinct eigenvalues."""
    if n < -1:
        raise InvalidArgumentError("n must be >= -1")
    l1, l2 = complex(lambda1), complex(lambda2)
    scale = max(abs(l1), abs(l2), 1.0)
    if abs(l1 - l2) / scale <= EIGEN_GAP:
        raise DegenerateSpectrumError(
            "eigenvalues coincide; use a_recurrence for repeated roots"
        )
    val = (l1 ** (n + 1) - l2 ** (n + 1)) / (l1 - l2)
    if abs(val.imag) > EIGEN_GAP * max(1.0, abs(val.real)):
        raise InvalidArgumentError(
            "eigenvalues are neither real nor a conjugate pair "
            f"(imaginary residue {abs(val.imag):.2e})"
        )
    return val.real


def power_2d_closed(tau: float, delta: float, n: int) -> np.ndarray:
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    a = a_sequence(tau, delta, n)  # a[k + 1] = a_k
    return np.array(
        [[a[n + 1], a[n]], [-delta * a[n], -delta * a[n - 1]]]
    )


def phi_2d_closed(tau: float, delta: float, n: int) -> np.ndarray:
    """I + M + ... + M^(n-1) for the 2D normal form, via f_n.

    ``f_k = (1 - a_k + delta a_{k-1}) / (1 - tau + delta)``; raises
    ``EigenvalueOneError`` when the denominator vanishes (M has eigenvalue
    1), in which case use ``geometric_sum`` instead.
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    denom = 1.0 - tau + delta
    if abs(denom) <= PHI_DENOM_TOL:
        raise EigenvalueOneError(f"1 - tau + delta = {denom:.3e}")
    a = a_sequence(tau, delta, n)

    def f(k):
        if k == -1:
            # a_{-2} = -1/delta makes the numerator vanish identically
            return 0.0
        return (1.0 - a[k + 1] + delta * a[k]) / denom

    return np.array(
        [[f(n), f(n - 1)], [-delta * f(n - 1), 1.0 - delta * f(n - 2)]]
    )
