"""Periodic-orbit candidates, itinerary checks and stability.

Cycle ordering: ``X_0`` carries symbol R and the word is executed from its
last run backwards. For ``L^m R^n`` the map applies ``M_R`` to the first n
points and ``M_L`` to the next m, so

    X_0 = (I - M_L^m M_R^n)^{-1} (M_L^m phi_{R,n} + phi_{L,m}) zeta

and for a general word ``L^{n_1} R^{n_2} ... R^{n_s}`` the cycle matrix is
the ordered product ``M_L^{n_1} M_R^{n_2} ... M_R^{n_s}`` (first run
leftmost).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .dense_linalg import det, lu_solve, mat_mul, spectral_radius
from .errors import InvalidArgumentError, SingularMatrixError
from .gamma_power import GammaState
from .normal_form import DIVERGENCE_LIMIT, L, R, PWLMap, SymbolWord, symbol_of

CLOSURE_TOL = 1e-8
BORDER_MARGIN = 1e-10
STABILITY_MARGIN = 1e-9


class FailureKind(enum.Enum):
    SINGULAR = "singular_existence_matrix"
    WRONG_PARTITION = "wrong_partition"
    NOT_CLOSED = "not_closed"
    DIVERGED = "diverged"


class MapPowers:
    """Memoised powers and geometric sums of ``M_L`` and ``M_R`` for one map.

    Both sides share one Gamma state each, extended on demand, so asking for
    ``M_R^3`` after ``M_R^8`` costs nothing.
    """

    def __init__(self, pwl: PWLMap, upto: int = 8):
        self.map = pwl
        self._states = {L: GammaState(pwl.left, upto), R: GammaState(pwl.right, upto)}
        self._pow = {}
        self._phi = {}

    def _state(self, symbol, k):
        st = self._states[symbol]
        if k > st.highest_index:
            st.extend(k)
        return st

    def power(self, symbol: str, k: int) -> np.ndarray:
        key = (symbol, k)
        if key not in self._pow:
            self._pow[key] = self._state(symbol, k).power(k)
        return self._pow[key]

    def phi(self, symbol: str, k: int) -> np.ndarray:
        key = (symbol, k)
        if key not in self._phi:
            self._phi[key] = self._state(symbol, max(k - 1, 1)).geometric_sum(k)
        return self._phi[key]


def _powers(pwl, powers):
    if powers is None:
        return MapPowers(pwl)
    if powers.map is not pwl and powers.map != pwl:
        raise InvalidArgumentError("powers were built for a different map")
    return powers


def _require_canonical(word: SymbolWord):
    if not word.is_canonical:
        raise InvalidArgumentError(f"word {word} must start with L and end with R")


def candidate_LmRn(pwl: PWLMap, m: int, n: int, powers: Optional[MapPowers] = None) -> np.ndarray:
    """Candidate ``X_0`` of an ``L^m R^n`` cycle.

    Raises ``SingularMatrixError`` if ``I - M_L^m M_R^n`` is singular.
    """
    if m < 1 or n < 1:
        raise InvalidArgumentError("m and n must be >= 1")
    pw = _powers(pwl, powers)
    ml_m = pw.power(L, m)
    existence = np.eye(pwl.dim) - mat_mul(ml_m, pw.power(R, n))
    rhs = (mat_mul(ml_m, pw.phi(R, n)) + pw.phi(L, m))[:, 0] * pwl.mu
    return lu_solve(existence, rhs)


def cycle_matrices(pwl: PWLMap, word: SymbolWord, powers: Optional[MapPowers] = None):
    """Ordered cycle product and the affine accumulator (before applying zeta).

    Returns ``(P, A)`` with ``P = prod_j M_{K_j}^{n_j}`` and
    ``A = sum_i (prod_{j<i} M_{K_j}^{n_j}) phi_{K_i, n_i}``.
    """
    pw = _powers(pwl, powers)
    prod = np.eye(pwl.dim)
    acc = np.zeros((pwl.dim, pwl.dim))
    for sym, cnt in word.runs:
        acc += mat_mul(prod, pw.phi(sym, cnt))
        prod = mat_mul(prod, pw.power(sym, cnt))
    return prod, acc


def candidate_general(pwl: PWLMap, word: SymbolWord, powers: Optional[MapPowers] = None) -> np.ndarray:
    """Candidate ``X_0`` for an arbitrary canonical word."""
    _require_canonical(word)
    prod, acc = cycle_matrices(pwl, word, powers)
    return lu_solve(np.eye(pwl.dim) - prod, acc[:, 0] * pwl.mu)


def _walk(pwl, x0, order):
    """Iterate ``len(order)`` steps checking symbols.

    Returns ``(points, bad_index, kind)`` where ``points`` are X_0..X_p (or
    up to the failure).
    """
    ml, mr = pwl.left._dense, pwl.right._dense
    x = np.asarray(x0, dtype=float)
    points = [x]
    for k, want in enumerate(order):
        if symbol_of(x) != want:
            return points, k, FailureKind.WRONG_PARTITION
        x = (ml if want == L else mr) @ x
        x[0] += pwl.mu
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_LIMIT:
            return points, k + 1, FailureKind.DIVERGED
        points.append(x)
    x0 = points[0]
    if np.max(np.abs(points[-1] - x0)) > CLOSURE_TOL * (1.0 + np.max(np.abs(x0))):
        return points, len(order), FailureKind.NOT_CLOSED
    return points, None, None


def verify_itinerary(pwl: PWLMap, x0, word: SymbolWord):
    """Check that ``x0`` traces ``word`` and returns to itself.

    Returns ``(True, None)`` or ``(False, k)`` where ``k`` is the first
    point in the wrong partition (``k == period`` means the orbit did not
    close).
    """
    _, bad, _ = _walk(pwl, x0, word.execution_order)
    return bad is None, bad


class Stability(NamedTuple):
    jacobian: np.ndarray
    trace: float
    det: float
    spectral_radius: float
    stable: bool
    jury_stable: Optional[bool]


def jury_2d(trace: float, det_: float) -> bool:
    """Schur-Cohn/Jury test for lambda^2 - T lambda + D: |D| < 1 and |T| < 1 + D."""
    return abs(det_) < 1.0 and abs(trace) < 1.0 + det_


def stability_of(jacobian: np.ndarray) -> Stability:
    jac = np.asarray(jacobian, dtype=float)
    tr = float(np.trace(jac))
    dt = float(det(jac))
    rad = spectral_radius(jac)
    jury = jury_2d(tr, dt) if jac.shape[0] == 2 else None
    return Stability(jac, tr, dt, rad, rad < 1.0 - STABILITY_MARGIN, jury)


def stability(pwl: PWLMap, word: SymbolWord, powers: Optional[MapPowers] = None) -> Stability:
    """Trace, determinant and spectral radius of the cycle Jacobian.

    ``stable`` uses the spectral radius in every dimension. For N = 2 the
    Jury verdict is reported alongside for comparison.
    """
    _require_canonical(word)
    prod, _ = cycle_matrices(pwl, word, powers)
    return stability_of(prod)


@dataclass(frozen=True)
class OrbitRecord:
    word: SymbolWord
    candidate: Optional[np.ndarray] = None
    points: list = field(default_factory=list)
    exists: bool = False
    jacobian: Optional[np.ndarray] = None
    trace: Optional[float] = None
    det: Optional[float] = None
    spectral_radius: Optional[float] = None
    stable: bool = False
    jury_stable: Optional[bool] = None
    failure: Optional[FailureKind] = None
    failure_index: Optional[int] = None
    border_marginal: bool = False
    primitive: bool = True

    @property
    def reason(self) -> str:
        if self.failure is None:
            return ""
        if self.failure_index is None or self.failure is FailureKind.SINGULAR:
            return self.failure.value
        return f"{self.failure.value}({self.failure_index})"


def _finish(word, x0, pwl, order, jacobian_fn, primitive=True):
    points, bad, kind = _walk(pwl, x0, order)
    if bad is not None:
        return OrbitRecord(
            word, candidate=x0, points=points, failure=kind, failure_index=bad, primitive=primitive
        )
    cycle = points[:-1]
    st = stability_of(jacobian_fn())
    return OrbitRecord(
        word,
        candidate=x0,
        points=cycle,
        exists=True,
        jacobian=st.jacobian,
        trace=st.trace,
        det=st.det,
        spectral_radius=st.spectral_radius,
        stable=st.stable,
        jury_stable=st.jury_stable,
        border_marginal=any(abs(p[0]) < BORDER_MARGIN for p in cycle),
        primitive=primitive,
    )


def classify_orbit(pwl: PWLMap, word: SymbolWord, powers: Optional[MapPowers] = None) -> OrbitRecord:
    """Candidate, itinerary check and stability in one record.

    Stage failures are recorded in ``failure``/``failure_index`` rather than
    raised. Stability fields are only filled for orbits that exist.
    """
    _require_canonical(word)
    pw = _powers(pwl, powers)
    prod, acc = cycle_matrices(pwl, word, pw)
    try:
        x0 = lu_solve(np.eye(pwl.dim) - prod, acc[:, 0] * pwl.mu)
    except SingularMatrixError:
        return OrbitRecord(word, failure=FailureKind.SINGULAR, primitive=word.is_primitive)
    if not np.all(np.isfinite(x0)):
        return OrbitRecord(word, candidate=x0, failure=FailureKind.DIVERGED, failure_index=0)
    return _finish(word, x0, pwl, word.execution_order, lambda: prod, word.is_primitive)


def fixed_points(pwl: PWLMap) -> list:
    """Period-1 records for the L and R branches (``exists`` marks admissible ones)."""
    out = []
    for sym in (L, R):
        word = SymbolWord(((sym, 1),))
        m = pwl.matrix(sym).materialize()
        try:
            x = lu_solve(np.eye(pwl.dim) - m, pwl.zeta)
        except SingularMatrixError:
            out.append(OrbitRecord(word, failure=FailureKind.SINGULAR))
            continue
        out.append(_finish(word, x, pwl, sym, lambda m=m: m))
    return out
