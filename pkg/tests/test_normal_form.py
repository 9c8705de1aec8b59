import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import dense, elementary_symmetric, step
from pwlorbit import (
    DivergedError,
    InvalidArgumentError,
    NormalFormMatrix,
    PWLMap,
    SymbolWord,
    apply_map,
    char_poly,
    from_eigenvalues,
    itinerary,
    make_normal_matrix,
)
from pwlorbit.normal_form import symbol_of

coef = st.floats(-2, 2, allow_nan=False)


def test_two_dim_layout():
    tau, delta = 0.3, -1.7
    m = make_normal_matrix(2, [tau, delta]).materialize()
    np.testing.assert_array_equal(m, [[tau, 1], [-delta, 0]])


def test_three_dim_layout():
    tau, sigma, delta = 1.0, 1.4, 0.7
    m = make_normal_matrix(3, [tau, sigma, delta]).materialize()
    np.testing.assert_array_equal(m, [[tau, 1, 0], [-sigma, 0, 1], [delta, 0, 0]])


def test_one_dim():
    np.testing.assert_array_equal(make_normal_matrix(1, [0.4]).materialize(), [[0.4]])


@pytest.mark.parametrize("dim,rho", [(2, [1.0]), (3, [1, 2]), (0, []), (2, [1, np.nan])])
def test_bad_construction(dim, rho):
    with pytest.raises(InvalidArgumentError):
        make_normal_matrix(dim, rho)


def test_materialize_returns_private_copy():
    m = make_normal_matrix(2, [1.0, 2.0])
    a = m.materialize()
    a[0, 0] = 99
    assert m.materialize()[0, 0] == 1.0


@given(st.lists(coef, min_size=1, max_size=10))
def test_matches_entrywise_builder_and_round_trips(rho):
    m = make_normal_matrix(len(rho), rho)
    np.testing.assert_array_equal(m.materialize(), dense(rho))
    assert NormalFormMatrix.from_dense(m.materialize()).rho == m.rho


@given(st.lists(coef, min_size=1, max_size=8))
def test_characteristic_polynomial_reads_off_column(rho):
    got = np.array(char_poly(make_normal_matrix(len(rho), rho).materialize()).coeffs)
    want = np.array([1.0] + [(-1) ** (k + 1) * r for k, r in enumerate(rho)])
    scale = max(1.0, np.max(np.abs(want)))
    assert np.max(np.abs(got - want)) <= 1e-10 * scale


def test_from_eigenvalues_examples():
    m = from_eigenvalues([0.9, -0.3])
    assert m.rho == pytest.approx((0.6, -0.27), rel=1e-12)
    assert from_eigenvalues([1, 1, 1]).rho == pytest.approx((3, 3, 1), rel=1e-12)
    eigs = [0.5, -0.5, 0.2]
    coeffs = np.convolve(np.convolve([1, -0.5], [1, 0.5]), [1, -0.2])
    want = [(-1) ** (k + 1) * c for k, c in enumerate(coeffs[1:])]
    assert from_eigenvalues(eigs).rho == pytest.approx(want, rel=1e-12, abs=1e-15)


@given(
    st.lists(st.floats(-2, 2), min_size=0, max_size=3),
    st.lists(st.tuples(st.floats(-2, 2), st.floats(0.01, 2)), min_size=0, max_size=2),
)
def test_from_eigenvalues_symmetric_functions(reals, pairs):
    eigs = list(reals) + [complex(a, b) for a, b in pairs] + [complex(a, -b) for a, b in pairs]
    if not eigs:
        return
    got = from_eigenvalues(eigs).rho
    want = np.real(elementary_symmetric(eigs))
    scale = max(1.0, np.max(np.abs(want)))
    assert np.max(np.abs(np.array(got) - want)) <= 1e-12 * scale * 10


def test_from_eigenvalues_rejects_unpaired_complex():
    with pytest.raises(InvalidArgumentError):
        from_eigenvalues([1 + 1j, 0.5])


def test_map_validation():
    with pytest.raises(InvalidArgumentError):
        PWLMap(make_normal_matrix(2, [0, 0]), make_normal_matrix(3, [0, 0, 0]))
    pwl = PWLMap.from_rho([0, 0], [0, 0], mu=2.5)
    np.testing.assert_array_equal(pwl.zeta, [2.5, 0])
    with pytest.raises(InvalidArgumentError):
        apply_map(pwl, [1, 2, 3])


def test_apply_map_examples():
    nil = PWLMap.from_rho([0, 0], [0, 0], mu=1)
    np.testing.assert_array_equal(apply_map(nil, [0, 0]), [1, 0])
    lr = PWLMap.from_rho([0.2, 0], [-3, 0], mu=1)
    np.testing.assert_allclose(apply_map(lr, [0.75, 0]), [-1.25, 0], rtol=0, atol=1e-15)
    cap = PWLMap.from_rho([0.3, 1.4, 0.7], [-0.2, 1.4, 0.7], mu=1)
    np.testing.assert_array_equal(apply_map(cap, [0, 0, 0]), [1, 0, 0])


def test_symbol_tie_break():
    assert symbol_of([-0.1, 5]) == "L"
    assert symbol_of([0.0, 5]) == "L"
    assert symbol_of([0.75, 0]) == "R"


@given(st.lists(coef, min_size=4, max_size=4), st.lists(st.floats(-5, 5), min_size=1, max_size=1))
def test_continuous_across_border(rho, tail):
    pwl = PWLMap.from_rho(rho[:2], rho[2:], mu=0.7)
    x = np.array([0.0, tail[0]])
    left = pwl.left.materialize() @ x + pwl.zeta
    right = pwl.right.materialize() @ x + pwl.zeta
    np.testing.assert_array_equal(left, right)


def test_itinerary_lr_cycle():
    pwl = PWLMap.from_rho([0.2, 0], [-3, 0], mu=1)
    pts, syms = itinerary(pwl, [0.75, 0], 4)
    assert syms == ["R", "L", "R", "L"]
    np.testing.assert_allclose(pts[2], [0.75, 0], atol=1e-15)
    np.testing.assert_allclose(pts[1], [-1.25, 0], atol=1e-15)
    assert len(pts) == 5


def test_itinerary_single_step():
    pwl = PWLMap.from_rho([0.2, 0], [-3, 0], mu=1)
    _, syms = itinerary(pwl, [-4, 1], 1)
    assert syms == ["L"]


def test_itinerary_growth_matches_affine_closed_form():
    pwl = PWLMap.from_rho([0.0, 0.0], [2, 0], mu=1)
    pts, syms = itinerary(pwl, [1, 0], 20)
    xs = [p[0] for p in pts]
    assert all(b > a for a, b in zip(xs, xs[1:]))
    # x_k = 2^k x_0 + (2^k - 1) mu
    assert xs == [2.0**k + 2.0**k - 1 for k in range(21)]
    assert set(syms) == {"R"}


def test_itinerary_divergence_reports_step():
    pwl = PWLMap.from_rho([0.0, 0.0], [1e80, 0], mu=1)
    with pytest.raises(DivergedError) as info:
        itinerary(pwl, [1, 0], 10)
    assert info.value.step == 2


@given(st.lists(coef, min_size=4, max_size=4), st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_itinerary_deterministic_and_matches_oracle(rho, x0):
    pwl = PWLMap.from_rho(rho[:2], rho[2:], mu=1)
    a = itinerary(pwl, x0, 15)
    b = itinerary(pwl, x0, 15)
    assert a[1] == b[1]
    ml, mr = dense(rho[:2]), dense(rho[2:])
    x = np.array(x0, dtype=float)
    for p in a[0]:
        np.testing.assert_array_equal(p, x)
        x = step(ml, mr, 1.0, x)


class TestSymbolWord:
    def test_parse_and_format(self):
        w = SymbolWord.parse("L3R2")
        assert w.runs == (("L", 3), ("R", 2))
        assert str(w) == "L3R2"
        assert w.period == 5
        assert w.symbols == "LLLRR"
        assert w.execution_order == "RRLLL"

    @pytest.mark.parametrize("text", ["", "LR", "L0R1", "L2L1R1", "R1L1", "L1", "L1R1x", "l1r1", "L-1R1"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidArgumentError):
            SymbolWord.parse(text)

    def test_run_validation(self):
        with pytest.raises(InvalidArgumentError):
            SymbolWord((("L", 1), ("L", 2)))
        with pytest.raises(InvalidArgumentError):
            SymbolWord(())
        with pytest.raises(InvalidArgumentError):
            SymbolWord((("X", 1),))

    def test_canonical(self):
        assert SymbolWord.LmRn(2, 1).is_canonical
        assert not SymbolWord((("R", 1), ("L", 1))).is_canonical
        assert not SymbolWord((("R", 1),)).is_canonical

    def test_from_symbols(self):
        assert SymbolWord.from_symbols("LLRLR").runs == (("L", 2), ("R", 1), ("L", 1), ("R", 1))

    def test_primitive(self):
        assert SymbolWord.parse("L2R1").is_primitive
        assert not SymbolWord.parse("L1R1L1R1").is_primitive
        assert SymbolWord.parse("L1R1L1R2").is_primitive

    def test_rotate_runs(self):
        w = SymbolWord.parse("L1R2L3R4")
        assert str(w.rotate_runs(1)) == "L3R4L1R2"
        assert w.rotate_runs(2) == w
