"""Two-parameter sweeps recording which orbits of a word family exist and are stable."""

from __future__ import annotations

import csv
import io
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import IllConditionedWarning, InvalidArgumentError, PWLError
from .normal_form import PWLMap, SymbolWord, make_normal_matrix
from .orbit_analysis import MapPowers, classify_orbit

NAMED_PARAMS = {
    2: ("tau", "delta"),
    3: ("tau", "sigma", "delta"),
}


def parameter_names(dim: int) -> list:
    """Names of the 2N coefficients, L side first; ``mu`` is separate."""
    if dim in NAMED_PARAMS:
        base = NAMED_PARAMS[dim]
        return [f"{b}_{side}" for side in ("L", "R") for b in base]
    return [f"rho_{side}[{i}]" for side in ("L", "R") for i in range(1, dim + 1)]


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise InvalidArgumentError(f"axis {self.name}: steps must be >= 2")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class ScanSpec:
    dim: int
    x_axis: Axis
    y_axis: Axis
    fixed: dict
    family: tuple
    mu: float = 1.0

    def __post_init__(self):
        names = parameter_names(self.dim)
        allowed = set(names) | {"mu"}
        fixed = dict(self.fixed)
        if "mu" in fixed:
            object.__setattr__(self, "mu", float(fixed.pop("mu")))
        if self.x_axis.name == self.y_axis.name:
            raise InvalidArgumentError("axis parameters must differ")
        bound = [self.x_axis.name, self.y_axis.name, *fixed]
        unknown = [b for b in bound if b not in allowed]
        if unknown:
            raise InvalidArgumentError(f"unknown parameters {unknown}; expected {names} or mu")
        dup = {b for b in bound if bound.count(b) > 1}
        if dup:
            raise InvalidArgumentError(f"parameters bound more than once: {sorted(dup)}")
        missing = [n for n in names if n not in bound]
        if missing:
            raise InvalidArgumentError(f"unbound parameters: {missing}")
        if not self.family:
            raise InvalidArgumentError("family must contain at least one word")
        family = tuple(
            w if isinstance(w, SymbolWord) else SymbolWord.parse(str(w)) for w in self.family
        )
        for w in family:
            if not w.is_canonical:
                raise InvalidArgumentError(f"word {w} is not canonical")
        object.__setattr__(self, "fixed", {k: float(v) for k, v in fixed.items()})
        object.__setattr__(self, "family", family)

    def build_map(self, x: float, y: float) -> PWLMap:
        values = dict(self.fixed)
        mu = self.mu
        for name, v in ((self.x_axis.name, x), (self.y_axis.name, y)):
            if name == "mu":
                mu = v
            else:
                values[name] = v
        names = parameter_names(self.dim)
        left = [values[n] for n in names[: self.dim]]
        right = [values[n] for n in names[self.dim:]]
        return PWLMap(make_normal_matrix(self.dim, left), make_normal_matrix(self.dim, right), mu)


@dataclass
class ScanResult:
    spec: Optional[ScanSpec]
    x_param: str
    y_param: str
    x_values: np.ndarray
    y_values: np.ndarray
    words: list
    exists: np.ndarray  # (nx, ny, nwords) bool
    stable: np.ndarray
    reasons: Optional[np.ndarray] = field(default=None, repr=False)

    def stable_count(self, word) -> int:
        return int(self.stable[:, :, self.words.index(str(word))].sum())


def _scan_row(spec: ScanSpec, ix: int):
    x = spec.x_axis.values[ix]
    ys = spec.y_axis.values
    nw = len(spec.family)
    upto = max(c for w in spec.family for _, c in w.runs)
    exists = np.zeros((ys.size, nw), dtype=bool)
    stable = np.zeros((ys.size, nw), dtype=bool)
    reasons = np.full((ys.size, nw), "", dtype=object)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        for iy, y in enumerate(ys):
            pwl = spec.build_map(x, y)
            try:
                powers = MapPowers(pwl, upto)
            except PWLError as exc:
                reasons[iy, :] = type(exc).__name__
                continue
            for iw, word in enumerate(spec.family):
                try:
                    rec = classify_orbit(pwl, word, powers)
                except PWLError as exc:
                    reasons[iy, iw] = type(exc).__name__
                    continue
                exists[iy, iw] = rec.exists
                stable[iy, iw] = rec.exists and rec.stable
                reasons[iy, iw] = rec.reason
    return exists, stable, reasons


def _default_threads():
    env = os.environ.get("PWL_ORBIT_THREADS")
    return int(env) if env else 1


def scan(spec: ScanSpec, threads: Optional[int] = None) -> ScanResult:
    """Classify every family word at every grid cell.

    Per-cell failures end up in ``reasons``; the scan itself never aborts.
    Rows are computed independently and written back by index, so the
    result does not depend on ``threads``.
    """
    threads = _default_threads() if threads is None else threads
    nx, ny, nw = spec.x_axis.steps, spec.y_axis.steps, len(spec.family)
    exists = np.zeros((nx, ny, nw), dtype=bool)
    stable = np.zeros((nx, ny, nw), dtype=bool)
    reasons = np.full((nx, ny, nw), "", dtype=object)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_scan_row, [spec] * nx, range(nx)))
    else:
        rows = [_scan_row(spec, ix) for ix in range(nx)]
    for ix, (e, s, r) in enumerate(rows):
        exists[ix], stable[ix], reasons[ix] = e, s, r
    return ScanResult(
        spec,
        spec.x_axis.name,
        spec.y_axis.name,
        spec.x_axis.values,
        spec.y_axis.values,
        [str(w) for w in spec.family],
        exists,
        stable,
        reasons,
    )


def lnr_scan_spec(steps: int = 200, n_max: int = 8, lo: float = -3.0, hi: float = 3.0, mu: float = 1.0) -> ScanSpec:
    """(tau_L, tau_R) sweep with sigma = 1.4, delta = 0.7 on both sides, family L^n R."""
    return ScanSpec(
        dim=3,
        x_axis=Axis("tau_L", lo, hi, steps),
        y_axis=Axis("tau_R", lo, hi, steps),
        fixed={"sigma_L": 1.4, "sigma_R": 1.4, "delta_L": 0.7, "delta_R": 0.7},
        family=tuple(SymbolWord.LmRn(n, 1) for n in range(1, n_max + 1)),
        mu=mu,
    )


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_scan_csv(result: ScanResult, destination) -> None:
    """CSV with one row per cell, x-major. ``destination`` is a path or text stream."""
    header = ["x_param", "y_param", "x_value", "y_value"]
    for w in result.words:
        header += [f"{w}_exists", f"{w}_stable"]

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for ix, x in enumerate(result.x_values):
            for iy, y in enumerate(result.y_values):
                row = [result.x_param, result.y_param, _fmt(x), _fmt(y)]
                for iw in range(len(result.words)):
                    row += [int(result.exists[ix, iy, iw]), int(result.stable[ix, iy, iw])]
                writer.writerow(row)

    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(destination)


def read_scan_csv(source) -> ScanResult:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    words = [h[: -len("_exists")] for h in header[4::2]]
    xs = list(dict.fromkeys(float(r[2]) for r in body))
    ys = list(dict.fromkeys(float(r[3]) for r in body))
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    exists = np.zeros((len(xs), len(ys), len(words)), dtype=bool)
    stable = np.zeros_like(exists)
    for r in body:
        i, j = xi[float(r[2])], yi[float(r[3])]
        flags = [c == "1" for c in r[4:]]
        exists[i, j] = flags[0::2]
        stable[i, j] = flags[1::2]
    x_param, y_param = (body[0][0], body[0][1]) if body else ("", "")
    return ScanResult(None, x_param, y_param, np.array(xs), np.array(ys), words, exists, stable)
