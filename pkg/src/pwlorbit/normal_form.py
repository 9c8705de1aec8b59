"""Normal-form matrices, the two-piece continuous map, and symbolic words.

The linear pieces are companion-like matrices whose first column holds the
signed elementary symmetric functions of the eigenvalues,

    [ rho_1   1  0 ... 0 ]
    [-rho_2   0  1 ... 0 ]
    [  ...               ]
    [(-1)^(N-1) rho_N  0 ... 0 ]

and the map is ``X -> M_L X + zeta`` for ``x_1 <= 0`` and ``M_R X + zeta``
otherwise, with ``zeta = (mu, 0, ..., 0)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DivergedError, InvalidArgumentError

DIVERGENCE_LIMIT = 1e150

L = "L"
R = "R"


@dataclass(frozen=True)
class NormalFormMatrix:
    """Normal-form matrix of dimension ``dim`` parameterised by ``rho``.

    ``rho[i-1]`` is the sum of eigenvalue products taken ``i`` at a time
    (trace for i=1, determinant for i=N).
    """

    dim: int
    rho: tuple

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidArgumentError(f"dim must be a positive integer, got {self.dim!r}")
        rho = tuple(float(r) for r in self.rho)
        if len(rho) != self.dim:
            raise InvalidArgumentError(
                f"expected {self.dim} coefficients, got {len(rho)}"
            )
        if not all(np.isfinite(rho)):
            raise InvalidArgumentError("rho coefficients must be finite")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "rho", rho)

    @cached_property
    def first_column(self) -> np.ndarray:
        """Column 1 of the matrix: ``(-1)^(i-1) rho_i`` (read-only)."""
        signs = np.where(np.arange(self.dim) % 2 == 0, 1.0, -1.0)
        col = signs * np.asarray(self.rho)
        col.flags.writeable = False
        return col

    @property
    def recurrence_coeffs(self) -> np.ndarray:
        # Gamma_j = sum_k coeffs[k-1] * Gamma_{j-k}; identical to the first column
        return self.first_column

    @property
    def char_coeffs(self) -> np.ndarray:
        """Monic characteristic polynomial, leading coefficient first."""
        signs = np.where(np.arange(1, self.dim + 1) % 2 == 1, -1.0, 1.0)
        return np.concatenate(([1.0], signs * np.asarray(self.rho)))

    @cached_property
    def _dense(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        m[:, 0] = self.first_column
        if self.dim > 1:
            m[np.arange(self.dim - 1), np.arange(1, self.dim)] = 1.0
        m.flags.writeable = False
        return m

    def materialize(self) -> np.ndarray:
        """Dense ``dim x dim`` array (a fresh, writable copy)."""
        return self._dense.copy()

    @classmethod
    def from_dense(cls, a) -> "NormalFormMatrix":
        """Read ``rho`` back off column 1 of a dense normal-form matrix."""
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        return cls(n, tuple(signs * a[:, 0]))


def make_normal_matrix(dim: int, rho: Sequence[float]) -> NormalFormMatrix:
    return NormalFormMatrix(dim, tuple(rho))


def from_eigenvalues(eigs: Iterable[complex], tol: float = 1e-12) -> NormalFormMatrix:
    """Build the normal form whose spectrum is ``eigs``.

    Complex eigenvalues must come in conjugate pairs, otherwise the
    symmetric functions would not be real.
    """
    eigs = np.asarray(list(eigs), dtype=complex)
    if eigs.size == 0:
        raise InvalidArgumentError("need at least one eigenvalue")
    scale = max(1.0, float(np.max(np.abs(eigs))))
    a = np.sort_complex(eigs)
    b = np.sort_complex(np.conj(eigs))
    if np.max(np.abs(a - b)) > tol * scale:
        raise InvalidArgumentError("complex eigenvalues must appear in conjugate pairs")

    # expand prod (lambda - e) by repeated convolution
    coeffs = np.array([1.0 + 0j])
    for e in eigs:
        coeffs = np.convolve(coeffs, [1.0, -e])
    coeffs = coeffs.real
    signs = np.where(np.arange(1, eigs.size + 1) % 2 == 1, -1.0, 1.0)
    return NormalFormMatrix(eigs.size, tuple(signs * coeffs[1:]))


@dataclass(frozen=True)
class PWLMap:
    left: NormalFormMatrix
    right: NormalFormMatrix
    mu: float = 1.0

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise InvalidArgumentError(
                f"left/right dimensions differ: {self.left.dim} vs {self.right.dim}"
            )
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def dim(self) -> int:
        return self.left.dim

    @property
    def zeta(self) -> np.ndarray:
        z = np.zeros(self.dim)
        z[0] = self.mu
        return z

    def matrix(self, symbol: str) -> NormalFormMatrix:
        if symbol == L:
            return self.left
        if symbol == R:
            return self.right
        raise InvalidArgumentError(f"unknown symbol {symbol!r}")

    @classmethod
    def from_rho(cls, left: Sequence[float], right: Sequence[float], mu: float = 1.0) -> "PWLMap":
        return cls(make_normal_matrix(len(left), left), make_normal_matrix(len(right), right), mu)


def symbol_of(x) -> str:
    """``L`` if ``x_1 <= 0`` (the border belongs to L), else ``R``."""
    return L if x[0] <= 0 else R


def _check_point(pwl: PWLMap, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (pwl.dim,):
        raise InvalidArgumentError(f"point has shape {x.shape}, map dimension is {pwl.dim}")
    return x


def _apply(pwl, left_dense, right_dense, x):
    y = (left_dense if x[0] <= 0 else right_dense) @ x
    y[0] += pwl.mu
    return y


def apply_map(pwl: PWLMap, x) -> np.ndarray:
    x = _check_point(pwl, x)
    y = (pwl.left if x[0] <= 0 else pwl.right)._dense @ x
    y[0] += pwl.mu
    return y


def itinerary(pwl: PWLMap, x0, steps: int):
    """Forward orbit ``x0..x_steps`` and the symbols of ``x0..x_{steps-1}``.

    Raises
    ------
    DivergedError
        If any coordinate becomes non-finite or exceeds ``DIVERGENCE_LIMIT``
        in magnitude; ``err.step`` is the index of the offending iterate.
    """
    if steps < 1:
        raise InvalidArgumentError("steps must be >= 1")
    x = _check_point(pwl, x0).copy()
    ml, mr = pwl.left._dense, pwl.right._dense
    points = [x]
    symbols = []
    for k in range(steps):
        symbols.append(symbol_of(x))
        x = _apply(pwl, ml, mr, x)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_LIMIT:
            raise DivergedError(f"orbit diverged at step {k + 1}", step=k + 1)
        points.append(x)
    return points, symbols


_TOKEN = re.compile(r"([LR])(\d+)")


@dataclass(frozen=True)
class SymbolWord:
    """Run-length encoded itinerary, e.g. ``((L, 2), (R, 1))`` for L^2 R.

    Runs must alternate. The canonical orientation used for orbit
    computations starts with L and ends with R; see ``is_canonical``.
    """

    runs: tuple

    def __post_init__(self):
        runs = tuple((str(s), int(c)) for s, c in self.runs)
        if not runs:
            raise InvalidArgumentError("word must have at least one run")
        for s, c in runs:
            if s not in (L, R):
                raise InvalidArgumentError(f"bad symbol {s!r}")
            if c < 1:
                raise InvalidArgumentError(f"run length must be >= 1, got {c}")
        for (a, _), (b, _) in zip(runs, runs[1:]):
            if a == b:
                raise InvalidArgumentError("consecutive runs must alternate symbols")
        object.__setattr__(self, "runs", runs)

    @classmethod
    def parse(cls, text: str) -> "SymbolWord":
        """Strict parser for run-length tokens such as ``L3R2`` or ``L1R2L1R1``.

        Only canonical words are accepted.
        """
        text = text.strip()
        if not text or _TOKEN.sub("", text) != "":
            raise InvalidArgumentError(
                f"malformed word {text!r}; expected alternating tokens like L2R1"
            )
        word = cls(tuple((s, int(c)) for s, c in _TOKEN.findall(text)))
        if not word.is_canonical:
            raise InvalidArgumentError(f"word {text!r} must start with L and end with R")
        return word

    @classmethod
    def from_symbols(cls, symbols: str) -> "SymbolWord":
        runs = []
        for s in symbols:
            if runs and runs[-1][0] == s:
                runs[-1][1] += 1
            else:
                runs.append([s, 1])
        return cls(tuple(map(tuple, runs)))

    @classmethod
    def LmRn(cls, m: int, n: int) -> "SymbolWord":
        return cls(((L, m), (R, n)))

    @property
    def is_canonical(self) -> bool:
        return (
            self.runs[0][0] == L
            and self.runs[-1][0] == R
            and self.period >= 2
        )

    @property
    def period(self) -> int:
        return sum(c for _, c in self.runs)

    @property
    def symbols(self) -> str:
        return "".join(s * c for s, c in self.runs)

    @property
    def execution_order(self) -> str:
        """Symbols of X_0, X_1, ... along the cycle (the word read backwards)."""
        return self.symbols[::-1]

    @property
    def is_primitive(self) -> bool:
        s = self.symbols
        p = len(s)
        return not any(p % d == 0 and s[:d] * (p // d) == s for d in range(1, p))

    def rotate_runs(self, k: int) -> "SymbolWord":
        """Cyclic rotation by ``k`` whole L/R run pairs (keeps canonical form)."""
        pairs = len(self.runs) // 2
        shift = 2 * (k % pairs) if pairs else 0
        return SymbolWord(self.runs[shift:] + self.runs[:shift])

    def __str__(self) -> str:
        return "".join(f"{s}{c}" for s, c in self.runs)
