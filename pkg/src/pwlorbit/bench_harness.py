"""Wall-time comparison of three ways to raise normal-form matrices to a power.

``gamma`` runs the N-term recurrence (O(N^2 n)), ``brute`` does n - 1 dense
products (O(N^3 n)) and ``diag`` goes through companion eigenvectors. The
first two are compiled loops over whole batches; ``diag`` loops in Python
per matrix. Setup (sampling, materialising dense copies) is not timed.

Each algorithm's output is reduced to a checksum (sum of all entries) and
checked against the ``gamma`` checksum of the same batch, so nothing can be
optimised away and a wrong kernel cannot post a fast time.
"""

from __future__ import annotations

import csv
import os
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .dense_linalg import _diag_power
from .errors import (
    ConvergenceError,
    DegenerateSpectrumError,
    IllConditionedWarning,
    InvalidArgumentError,
)
from .normal_form import NormalFormMatrix

ALGORITHMS = ("brute", "diag", "gamma")
EXTRA_ALGORITHMS = ("squaring",)
MODES = ("dim", "power")

CHECK_TOL = 1e-6
CHECK_TOL_LARGE = 1e-4  # N >= LARGE_DIM
LARGE_DIM = 40

FLAG_DEGENERATE = "skipped-degenerate"
FLAG_INVALID = "invalidated"
FLAG_EXTRA = "extra"
FLAG_OVERFLOW = "overflow"


@dataclass(frozen=True)
class BenchSpec:
    """What to time.

    ``mode="dim"`` sweeps the dimension over ``values`` at power ``fixed``;
    ``mode="power"`` sweeps the power at dimension ``fixed``. ``warmup``
    batches run before timing starts (they also trigger compilation) and are
    never recorded.
    """

    mode: str = "dim"
    values: tuple = (5, 10, 20, 50)
    fixed: int = 10
    batch: int = 100
    repeats: int = 10
    seed: int = 0
    coeff_range: tuple = (-2.0, 2.0)
    warmup: int = 1
    algorithms: tuple = ALGORITHMS

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgumentError(f"mode must be one of {MODES}, got {self.mode!r}")
        values = tuple(int(v) for v in self.values)
        if not values or min(values) < 1:
            raise InvalidArgumentError("values must be a nonempty list of positive integers")
        if int(self.fixed) < 1:
            raise InvalidArgumentError("fixed must be >= 1")
        if self.batch < 1 or self.repeats < 1:
            raise InvalidArgumentError("batch and repeats must be >= 1")
        if self.warmup < 0:
            raise InvalidArgumentError("warmup must be >= 0")
        lo, hi = (float(c) for c in self.coeff_range)
        if not lo < hi:
            raise InvalidArgumentError("coeff_range must satisfy lo < hi")
        algos = tuple(self.algorithms)
        unknown = [a for a in algos if a not in ALGORITHMS + EXTRA_ALGORITHMS]
        if unknown or not algos:
            raise InvalidArgumentError(
                f"unknown algorithms {unknown}; choose from {ALGORITHMS + EXTRA_ALGORITHMS}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "fixed", int(self.fixed))
        object.__setattr__(self, "coeff_range", (lo, hi))
        object.__setattr__(self, "algorithms", algos)

    def shape(self, value: int):
        """``(dim, power)`` for one value of the swept variable."""
        return (value, self.fixed) if self.mode == "dim" else (self.fixed, value)


@dataclass(frozen=True)
class BenchRow:
    variable: int
    algorithm: str
    mean_seconds: float
    std_seconds: float
    median_seconds: float
    checksum: float
    flags: tuple = ()
    samples: tuple = field(default=(), repr=False)

    @property
    def invalidated(self) -> bool:
        return FLAG_INVALID in self.flags


@dataclass
class BenchTable:
    spec: Optional[BenchSpec]
    rows: list = field(default_factory=list)

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=lambda r: (r.variable, r.algorithm))

    def row(self, variable: int, algorithm: str) -> BenchRow:
        for r in self.rows:
            if r.variable == variable and r.algorithm == algorithm:
                return r
        raise KeyError((variable, algorithm))

    def series(self, algorithm: str):
        """``(variables, mean_seconds)`` for one algorithm, sorted by variable."""
        rows = sorted((r for r in self.rows if r.algorithm == algorithm), key=lambda r: r.variable)
        return np.array([r.variable for r in rows]), np.array([r.mean_seconds for r in rows])


def random_normal_matrix(dim: int, rng: np.random.Generator, coeff_range=(-2.0, 2.0)) -> NormalFormMatrix:
    """rho_i i.i.d. uniform on ``coeff_range``."""
    lo, hi = coeff_range
    return NormalFormMatrix(dim, tuple(rng.uniform(lo, hi, dim)))


def _sample_batch(rng, batch, dim, coeff_range):
    # same draws, in the same order, as `batch` calls to random_normal_matrix
    lo, hi = coeff_range
    rho = rng.uniform(lo, hi, (batch, dim))
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    coeffs = np.ascontiguousarray(rho * signs)
    mats = np.zeros((batch, dim, dim))
    mats[:, :, 0] = coeffs
    idx = np.arange(dim - 1)
    mats[:, idx, idx + 1] = 1.0
    return rho, coeffs, mats


def _diag_batch(rho, n):
    out = np.empty((rho.shape[0], rho.shape[1], rho.shape[1]))
    for b, r in enumerate(rho):
        out[b] = _diag_power(NormalFormMatrix(r.size, tuple(r)), n)
    return out


def _run_one(algo, rho, coeffs, mats, n):
    out = np.empty_like(mats)
    if algo == "gamma":
        return _kernels.gamma_batch(coeffs, n, out)
    if algo == "brute":
        return _kernels.brute_batch(mats, n, out)
    if algo == "squaring":
        return _kernels.squaring_batch(mats, n, out)
    return _diag_batch(rho, n)


def _timed(algo, rho, coeffs, mats, n):
    t0 = time.perf_counter()
    out = _run_one(algo, rho, coeffs, mats, n)
    return time.perf_counter() - t0, out


def check_tolerance(dim: int) -> float:
    return CHECK_TOL_LARGE if dim >= LARGE_DIM else CHECK_TOL


def run_bench(spec: BenchSpec) -> BenchTable:
    """Time every algorithm on identical batches for each swept value.

    For each value a fresh generator seeded with ``(seed, value)`` draws
    ``warmup + repeats`` batches. Per batch, every algorithm's checksum must
    match the ``gamma`` checksum within ``check_tolerance(dim)`` times the
    sum of absolute entries; a miss marks the row ``invalidated``. A batch
    on which ``diag`` hits a near-degenerate spectrum is left out of the
    ``diag`` timings and counted under ``skipped-degenerate``. Batches whose
    results leave the float range cannot be compared; they are still timed
    and counted under ``overflow``.
    """
    table = BenchTable(spec)
    algos = spec.algorithms
    for value in spec.values:
        dim, n = spec.shape(value)
        rng = np.random.default_rng([spec.seed, value])
        times = {a: [] for a in algos}
        sums = {a: 0.0 for a in algos}
        skipped = {a: 0 for a in algos}
        bad = {a: 0 for a in algos}
        overflow = 0
        tol = check_tolerance(dim)
        for rep in range(spec.warmup + spec.repeats):
            rho, coeffs, mats = _sample_batch(rng, spec.batch, dim, spec.coeff_range)
            record = rep >= spec.warmup
            ref = _kernels.gamma_batch(coeffs, n, np.empty_like(mats))
            with np.errstate(over="ignore", invalid="ignore"):
                ref_sum = float(ref.sum())
                scale = float(np.abs(ref).sum())
            comparable = np.isfinite(scale)
            if record and not comparable:
                overflow += 1
            for algo in algos:
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", IllConditionedWarning)
                        dt, out = _timed(algo, rho, coeffs, mats, n)
                except (DegenerateSpectrumError, ConvergenceError):
                    if record:
                        skipped[algo] += 1
                    continue
                if not record:
                    continue
                with np.errstate(over="ignore", invalid="ignore"):
                    s = float(out.sum())
                if comparable and not (abs(s - ref_sum) <= tol * max(scale, 1.0)):
                    bad[algo] += 1
                times[algo].append(dt)
                sums[algo] += s
        for algo in algos:
            t = np.array(times[algo])
            flags = []
            if algo in EXTRA_ALGORITHMS:
                flags.append(FLAG_EXTRA)
            if skipped[algo]:
                flags.append(f"{FLAG_DEGENERATE}={skipped[algo]}")
            if bad[algo]:
                flags.append(FLAG_INVALID)
            if overflow:
                flags.append(f"{FLAG_OVERFLOW}={overflow}")
            table.rows.append(
                BenchRow(
                    variable=value,
                    algorithm=algo,
                    mean_seconds=float(t.mean()) if t.size else float("nan"),
                    std_seconds=float(t.std(ddof=1)) if t.size > 1 else 0.0,
                    median_seconds=float(np.median(t)) if t.size else float("nan"),
                    checksum=sums[algo],
                    flags=tuple(flags),
                    samples=tuple(t),
                )
            )
    return table


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


BENCH_HEADER = ["variable", "algorithm", "mean_seconds", "std_seconds", "checksum", "flags"]


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_bench_csv(table: BenchTable, destination) -> None:
    """Rows sorted by variable then algorithm; ``flags`` joined with ``;``."""

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_HEADER)
        for r in table.sorted_rows():
            writer.writerow(
                [r.variable, r.algorithm, _fmt(r.mean_seconds), _fmt(r.std_seconds),
                 _fmt(r.checksum), ";".join(r.flags)]
            )

    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(destination)


def read_bench_csv(source) -> BenchTable:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))
    table = BenchTable(None)
    for r in rows[1:]:
        table.rows.append(
            BenchRow(int(r[0]), r[1], float(r[2]), float(r[3]), float("nan"), float(r[4]),
                     tuple(f for f in r[5].split(";") if f))
        )
    return table
