import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stieltjes import functions
from stieltjes.errors import InsufficientLength, NonPositiveX, NotCompletelyMonotone
from stieltjes.hausdorff import (
    DiscreteUnitMeasure,
    base_point_consistency,
    bernstein_masses,
    is_cm_sequence,
    moment_sequence_at,
    pushforward_to_rho,
    reconstruct,
    recover_measure,
)
from stieltjes.precision import EXTENDED, F64

RECIP = functions.from_expr("1/(x+1)")


def test_is_cm_examples():
    assert is_cm_sequence([2.0**-n for n in range(11)])
    v = is_cm_sequence([1, 0, 1])
    assert not v.ok
    assert v.violation == (1, 1, -1)
    assert is_cm_sequence([1 / (n + 1) for n in range(13)])


def test_is_cm_brute_force_harmonic():
    # exact rational check of every (n, k) with n + k <= 12
    c = [Fraction(1, n + 1) for n in range(13)]
    for k in range(13):
        for n in range(13 - k):
            assert sum((-1) ** j * math.comb(k, j) * c[n + j] for j in range(k + 1)) > 0


def test_is_cm_first_violation_order():
    # violations at (k=1, n=2) and (k=2, n=0); k-major order reports k=1 first
    c = [1, 0.6, 0.1, 0.5]
    v = is_cm_sequence(c)
    assert v.violation[:2] == (2, 1)


def test_moment_sequence_examples():
    c = moment_sequence_at(RECIP, 1, 1.0, 8)
    assert list(c.entries) == [2.0 ** -(n + 1) for n in range(9)]
    for lam in (0.5, 3.0):
        c = moment_sequence_at(functions.from_expr("2"), lam, 1.7, 5)
        assert list(c.entries) == [2, 0, 0, 0, 0, 0]
    for x in (0.5, 2.0):
        lam = 0.7
        c = moment_sequence_at(functions.from_expr(f"x^(-{lam})"), lam, x, 6)
        for v in c.entries:
            assert v == pytest.approx(x**-lam, rel=1e-13)


def test_moment_sequence_nonpositive_x():
    with pytest.raises(NonPositiveX):
        moment_sequence_at(RECIP, 1, 0.0, 3)


@pytest.mark.parametrize("x", [0.05, 0.5, 1.0, 4.0, 30.0])
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.5])
def test_measure_backed_moments_are_cm(x, lam):
    fn = functions.from_measure({"C": 0.2, "atoms": [[0, 1], [0.7, 2], [5, 0.5]]}, lam)
    c = moment_sequence_at(fn, lam, x, 16, EXTENDED)
    assert is_cm_sequence(c, 0.0, EXTENDED)


def test_reconstruct_examples():
    nu = reconstruct([1 / (n + 1) for n in range(5)], 4)
    assert [u for u, _ in nu.atoms] == [0, 0.25, 0.5, 0.75, 1]
    for _, m in nu.atoms:
        assert m == pytest.approx(0.2, abs=1e-15)
    nu = reconstruct([1.0] * 7, 6)
    assert [m for _, m in nu.atoms] == [0, 0, 0, 0, 0, 0, 1]
    nu = reconstruct([0.5**n for n in range(4)], 3)
    assert [m for _, m in nu.atoms] == pytest.approx([0.125, 0.375, 0.375, 0.125], abs=1e-15)


@pytest.mark.parametrize("K", [4, 16, 64])
def test_reconstruct_moment_identities_exact(K):
    c = [Fraction(1, n + 1) for n in range(K + 1)]
    nu = reconstruct(c, K, arith=_FractionArith)
    m0 = sum(m for _, m in nu.atoms)
    m1 = sum(u * m for u, m in nu.atoms)
    m2 = sum(u * u * m for u, m in nu.atoms)
    assert m0 == c[0]
    assert m1 == c[1]
    assert m2 - c[2] == (c[1] - c[2]) / K


class _FractionArithType:
    """Exact rational arithmetic for identity checks."""

    name = "fraction"
    eps_rel = 0.0
    digits = 0

    @staticmethod
    def num(v):
        return Fraction(v)

    @staticmethod
    def fmt(v):
        return str(v)


_FractionArith = _FractionArithType()


def test_reconstruct_insufficient_length():
    with pytest.raises(InsufficientLength):
        reconstruct([1, 0.5, 0.25], 3)


def test_reconstruct_rejects_non_cm():
    with pytest.raises(NotCompletelyMonotone):
        reconstruct([1, 0, 1], 2)


def test_reconstruct_clamps_roundoff():
    c = [1 / (n + 1) for n in range(5)]
    raw = bernstein_masses(c, 4)
    assert all(m > 0 for m, _ in raw)
    # a perturbation far below tol*scale is clamped and reported, not rejected
    nu = reconstruct([1, 1, 1, 1, 1 + 1e-12], 4, tol=1e-8)
    assert [j for j, _ in nu.clamped] == [1, 3]
    assert all(m >= 0 for _, m in nu.atoms)


def test_pushforward_examples():
    C, atoms = pushforward_to_rho(DiscreteUnitMeasure(((0.5, 0.5),)), 1.0, 1.0)
    assert C == 0 and atoms == [(1.0, 1.0)]
    C, atoms = pushforward_to_rho(DiscreteUnitMeasure(((0.0, 3.0),)), 2.0, 1.0)
    assert C == 3 and atoms == []
    C, atoms = pushforward_to_rho(DiscreteUnitMeasure(((1.0, 0.7),)), 2.0, 2.0)
    assert atoms == [(0.0, pytest.approx(2.8))]


def test_recover_inverse_is_exact():
    for K in (3, 10, 25, 64):
        rec = recover_measure(functions.from_expr("1/x"), 1, 1.0, K)
        assert rec.C_hat == 0
        assert len(rec.rho_atoms) == 1
        t, w = rec.rho_atoms[0]
        assert t == 0 and abs(w - 1) <= 1e-12


def test_recover_constant():
    rec = recover_measure(functions.from_expr("2"), 3, 5.0, 6)
    assert rec.C_hat == 2 and rec.rho_atoms == []
    assert rec.sup_error == 0


def test_recover_error_decreases_with_depth():
    errs = [recover_measure(RECIP, 1, 1.0, K).sup_error for K in (8, 16, 32)]
    assert errs[0] > errs[1] > errs[2]


def test_recover_rejects_exponential():
    with pytest.raises(NotCompletelyMonotone):
        recover_measure(functions.from_expr("exp(-x)"), 1, 1.0, 16)


def test_recover_json_shape():
    rec = recover_measure(RECIP, 1, 1.0, 8)
    d = rec.to_json()
    assert set(d) >= {"x", "lambda", "C", "atoms", "diagnostics"}
    assert set(d["diagnostics"]) >= {"moment_residuals", "sup_error"}
    # masses match c_0 and c_1 exactly, so the first two residuals vanish
    assert d["diagnostics"]["moment_residuals"][:2] == [0.0, 0.0]


def test_base_point_consistency():
    rep = base_point_consistency(RECIP, 1, 1.0, 2.0, 32)
    assert rep.within_bound
    rep = base_point_consistency(functions.from_expr("3"), 1.5, 0.4, 7.0, 10)
    assert rep.sup_discrepancy == 0 and rep.C_difference == 0
    rep = base_point_consistency(functions.from_expr("1/x"), 1, 0.5, 3.0, 12)
    assert rep.sup_discrepancy <= 1e-14


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 3)), min_size=1, max_size=4), st.integers(2, 12))
def test_true_moment_sequences_reconstruct_nonnegative(atoms, K):
    c = [sum(m * u**n for u, m in atoms) for n in range(K + 1)]
    nu = reconstruct(c, K, tol=1e-9)
    assert sum(m for _, m in nu.atoms) == pytest.approx(c[0], rel=1e-9, abs=1e-12)
