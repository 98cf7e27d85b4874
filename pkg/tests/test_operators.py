import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stieltjes import functions
from stieltjes.errors import BadIndices, InsufficientOrder, OutOfRange
from stieltjes.hausdorff import moment_sequence_at
from stieltjes.operators import (
    delta_k,
    delta_k_terms,
    f_nk_measure_oracle,
    f_nk_operator,
    f_nk_sum,
    f_nk_widder,
    f_table,
    gamma_ratio,
)
from stieltjes.precision import EXTENDED, F64

from oracles import GRID7, quad_piece

RECIP = functions.from_expr("1/(x+1)")
EXP = functions.from_expr("exp(-x)")
CONST2 = functions.from_expr("2")
INV = functions.from_expr("1/x")


@pytest.mark.parametrize(
    "n, j, k, lam, want",
    [(0, 0, 2, 1, 2), (1, 1, 2, 0.5, 2.5), (3, 3, 3, 0.7, 1), (2, 0, 3, 0.5, 2.5 * 3.5 * 4.5)],
)
def test_gamma_ratio(n, j, k, lam, want):
    assert gamma_ratio(n, j, k, lam) == pytest.approx(want, rel=1e-15)


def test_gamma_ratio_matches_gamma_function():
    for n, j, k, lam in [(0, 0, 5, 0.3), (2, 1, 6, 1.7), (4, 2, 9, 3.0)]:
        want = math.gamma(n + k + lam) / math.gamma(n + j + lam)
        assert gamma_ratio(n, j, k, lam) == pytest.approx(want, rel=1e-13)


def test_gamma_ratio_bad_indices():
    with pytest.raises(BadIndices):
        gamma_ratio(0, 3, 2, 1.0)


def test_f_nk_sum_examples():
    v, s = f_nk_sum(RECIP.jet(1, 2), 1, 1, 1)
    assert v == pytest.approx(0.25, rel=1e-15)
    assert s >= abs(v)
    for x in (0.3, 1.0, 9.0):
        v, _ = f_nk_sum(CONST2.jet(x, 3), 0.5, 0, 3)
        assert v == pytest.approx(3.75, rel=1e-15)
    v, _ = f_nk_sum(EXP.jet(1, 2), 1, 0, 2)
    # D^2 (x^2 e^-x) = (x^2 - 4x + 2) e^-x
    assert v == pytest.approx(-math.exp(-1), rel=1e-14)


def test_f_nk_sum_needs_order():
    with pytest.raises(InsufficientOrder):
        f_nk_sum(RECIP.jet(1, 2), 1, 2, 1)


def test_f_nk_operator_examples():
    assert f_nk_operator(functions.from_expr("x^(-0.5)"), 0.5, 0, 1, 1.0) == pytest.approx(0, abs=1e-15)
    assert f_nk_operator(RECIP, 1, 1, 1, 1.0) == pytest.approx(f_nk_sum(RECIP.jet(1, 2), 1, 1, 1)[0], rel=1e-14)
    for x in (0.2, 3.0):
        assert f_nk_operator(CONST2, 0.5, 1, 2, x) == 0


def test_widder_examples():
    for variant in ("sum", "deriv1", "deriv2"):
        assert f_nk_widder(INV, 2, 3, 0.7, variant) == pytest.approx(0, abs=1e-12)
        assert f_nk_widder(INV, 2, 0, 0.5, variant) == pytest.approx(16, rel=1e-14)
        # D^3 (x^2 e^-x) = -(x^2 - 6x + 6) e^-x; F_{1,2} = (x^2 - 6x + 6) e^-x
        assert f_nk_widder(EXP, 1, 2, 2.0, variant) == pytest.approx(-2 * math.exp(-2), rel=1e-13)


def test_widder_sum_equals_general_sum_at_lambda_one():
    for n in range(5):
        for k in range(5):
            a = f_nk_widder(EXP, n, k, 1.3, "sum")
            b, s = f_nk_sum(EXP.jet(1.3, n + k), 1, n, k)
            assert abs(a - b) <= 1e-14 * s


def test_measure_oracle_examples():
    from stieltjes.measure import validate

    assert f_nk_measure_oracle(validate({"atoms": [[1, 1]]}), 1, 1, 1, 1) == pytest.approx(0.25, rel=1e-15)
    for x in (0.1, 4.0):
        assert f_nk_measure_oracle(validate({"C": 5}), 2, 0, 2, x) == pytest.approx(30, rel=1e-15)
    got = f_nk_measure_oracle(validate({"pieces": [[0, 1, 1]]}), 1, 0, 1, 1)
    import mpmath

    want = float(mpmath.quad(lambda t: t / (1 + t) ** 2, [0, 1]))
    assert got == pytest.approx(want, rel=1e-13)
    assert got == pytest.approx(math.log(2) - 0.5, abs=1e-7)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.3])
@pytest.mark.parametrize("x", [0.01, 1.0, 50.0])
def test_measure_oracle_piece_against_quadrature(lam, x):
    import mpmath
    from stieltjes.measure import validate

    m = validate({"pieces": [[0.5, 2.0, 1.5]]})
    for n, k in [(0, 0), (0, 3), (2, 4), (1, 7)]:
        with mpmath.workdps(30):
            inner = mpmath.quad(lambda t: t**k / (x + t) ** (n + k + lam), [0.5, 2.0])
        want = float(1.5 * inner * mpmath.rf(lam, n + k))
        assert f_nk_measure_oracle(m, lam, n, k, x) == pytest.approx(want, rel=1e-12)


def test_delta_k_examples():
    c = [1 / (n + 1) for n in range(6)]
    assert delta_k(c, 1, 2) == pytest.approx(1 / 12, rel=1e-14)
    assert delta_k([3.0] * 8, 2, 4) == 0
    r = [0.3**n for n in range(4)]
    assert delta_k(r, 0, 2) == pytest.approx(0.49, rel=1e-14)


def test_delta_k_brute_force_exact():
    c = [Fraction(1, n + 1) for n in range(12)]
    for n in range(6):
        for k in range(6):
            want = sum((-1) ** j * math.comb(k, j) * c[n + j] for j in range(k + 1))
            # Beta(n+1, k+1) = n! k!/(n+k+1)!
            assert want == Fraction(math.factorial(n) * math.factorial(k), math.factorial(n + k + 1))
            assert delta_k([float(v) for v in c], n, k) == pytest.approx(float(want), rel=1e-11)


def test_delta_k_out_of_range():
    with pytest.raises(OutOfRange):
        delta_k([1, 2, 3], 1, 2)


@given(st.lists(st.integers(-50, 50), min_size=3, max_size=12), st.data())
def test_pascal_recurrence(ints, data):
    c = [float(v) for v in ints]
    n = data.draw(st.integers(0, len(c) - 3))
    k = data.draw(st.integers(0, len(c) - n - 2))
    assert delta_k(c, n, k + 1) == delta_k(c, n, k) - delta_k(c, n + 1, k)


def test_table_examples():
    t = f_table(INV, 1, 1.0, 3, 3, precision="f64")
    assert [t.values[n][0] for n in range(4)] == [1, 1, 2, 6]
    for n in range(4):
        for k in range(1, 4):
            assert abs(t.values[n][k]) <= 1e-13 * t.scales[n][k]
    t = f_table(RECIP, 1, 1.0, 1, 1, precision="f64")
    assert t.values == [[0.5, 0.25], [0.25, 0.25]]
    t = f_table(RECIP, 0.5, 2.0, 1, 1, precision="f64")
    assert t.values[0][1] == pytest.approx(-1 / 18, rel=1e-14)


def test_table_dimensions_scales_and_edge():
    t = f_table(EXP, 1.5, 0.8, 4, 6, precision="f64")
    assert len(t.values) == 5 and all(len(r) == 7 for r in t.values)
    jet = EXP.jet(0.8, 10)
    for n, k, v, s in t.entries():
        assert s >= abs(v)
    for n in range(5):
        assert t.values[n][0] == (-1) ** n * jet.derivs[n]
    assert t.crosscheck <= 1e-12


def test_table_default_precision(monkeypatch):
    monkeypatch.delenv("STIELTJES_PRECISION", raising=False)
    assert f_table(RECIP, 1, 1.0).precision == "extended"
    assert f_table(RECIP, 1, 1.0, 4, 4).precision == "f64"
    t = f_table(RECIP, 1, 1.0, precision="f64")
    assert (t.n_max, t.k_max) == (8, 8)
    t = f_table(RECIP, 1, 1.0, precision="extended")
    assert (t.n_max, t.k_max) == (16, 16)
    monkeypatch.setenv("STIELTJES_PRECISION", "extended")
    assert f_table(RECIP, 1, 1.0, 2, 2).precision == "extended"


def test_table_csv(tmp_path):
    t = f_table(RECIP, 1, 1.0, 1, 2, precision="f64")
    vals, scales = t.write_csv(tmp_path / "t.csv")
    assert vals.read_text() == "k=0,k=1,k=2\n0.5,0.25,0.25\n0.25,0.25,0.375\n"
    assert scales.name == "t.scales.csv"
    assert scales.read_text().splitlines()[0] == "k=0,k=1,k=2"


def test_formula_equivalence_on_corpus(measure_fn, expr_fn):
    for fn in (measure_fn, expr_fn):
        for x in GRID7[::2]:
            jet = fn.jet(x, 8, F64)
            for n in range(5):
                for k in range(9 - n):
                    if n + k > 8:
                        continue
                    v, s = f_nk_sum(jet, 1.3, n, k)
                    assert abs(f_nk_operator(fn, 1.3, n, k, x) - v) <= 1e-8 * s


def test_oracle_agreement_on_corpus(measure_fn):
    m, lam = measure_fn.measure, measure_fn.order
    for x in (0.1, 1.0, 10.0):
        jet = measure_fn.jet(x, 10)
        for n in range(6):
            for k in range(6):
                v, s = f_nk_sum(jet, lam, n, k)
                assert abs(v - f_nk_measure_oracle(m, lam, n, k, x)) <= 1e-8 * s


def test_scaling_relation_with_moment_sequence():
    """F^[lam]_{n,k} = (Gamma(n+k+lam)/Gamma(lam)) f^[lam]_{n,k} / x^n with f^[lam]_{n,k} the
    k-th difference of the moment sequence."""
    fn = functions.from_measure({"C": 0.5, "atoms": [[0.5, 1], [2, 0.25]], "pieces": [[0, 1, 1]]}, 1.5)
    lam, x = 1.5, 0.75
    c = moment_sequence_at(fn, lam, x, 14, EXTENDED)
    jet = fn.jet(x, 14, EXTENDED)
    for n in range(7):
        for k in range(7):
            d = delta_k(c.entries, n, k, EXTENDED)
            lhs = gamma_ratio(0, 0, n + k, lam, EXTENDED) * d / EXTENDED.num(x) ** n
            v, s = f_nk_sum(jet, lam, n, k, EXTENDED)
            assert abs(lhs - v) <= 1e-50 * s


measures = st.builds(
    lambda C, atoms, piece: functions.from_measure(
        {"C": C, "atoms": atoms, "pieces": [[piece[0], piece[0] + piece[1], piece[2]]]}, 1.0
    ),
    st.floats(0, 3),
    st.lists(st.tuples(st.floats(0, 20), st.floats(0, 5)), max_size=3),
    st.tuples(st.floats(0, 5), st.floats(0.01, 5), st.floats(0, 3)),
)


@settings(max_examples=40, deadline=None)
@given(measures, st.floats(0.1, 4), st.floats(0.01, 100), st.integers(0, 6), st.integers(0, 6))
def test_nonnegativity_property(fn, lam, x, n, k):
    fn = functions.MeasureFunction(fn.measure, lam)
    v, s = f_nk_sum(fn.jet(x, n + k), lam, n, k)
    assert v >= -1e-8 * s
