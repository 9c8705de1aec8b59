"""Periodic orbits of piecewise-linear normal-form maps.

Fast powers of companion-like normal-form matrices through per-row scalar
recurrences, closed forms for two dimensions, periodic-orbit existence and
stability for symbolic itineraries, parameter-plane scans and a timing
harness.
"""

from .bench_harness import BenchSpec, BenchTable, random_normal_matrix, run_bench, write_bench_csv
from .dense_linalg import (
    Polynomial,
    char_poly,
    det,
    lu_solve,
    poly_roots,
    power_by_diagonalization,
    power_bruteforce,
    spectral_radius,
)
from .errors import (
    ConvergenceError,
    DegenerateSpectrumError,
    DivergedError,
    EigenvalueOneError,
    IllConditionedWarning,
    InvalidArgumentError,
    OverflowDetected,
    PWLError,
    SingularMatrixError,
)
from .gamma_power import (
    GammaState,
    a_binomial,
    a_eigen,
    a_recurrence,
    eta,
    geometric_sum,
    phi_2d_closed,
    power,
    power_2d_closed,
)
from .normal_form import (
    NormalFormMatrix,
    PWLMap,
    SymbolWord,
    apply_map,
    from_eigenvalues,
    itinerary,
    make_normal_matrix,
)
from .orbit_analysis import (
    FailureKind,
    OrbitRecord,
    candidate_general,
    candidate_LmRn,
    classify_orbit,
    fixed_points,
    stability,
    verify_itinerary,
)
from .region_scanner import Axis, ScanResult, ScanSpec, lnr_scan_spec, read_scan_csv, scan, write_scan_csv

__version__ = "0.1.0"
