import numpy as np
import pytest

from avlp.core import (
    AvlpProblem,
    DimensionError,
    RawProblem,
    SignVector,
    membership,
    nonzero_columns,
    normalize,
    orthant_restriction,
    sgn,
)


def test_sgn_convention():
    assert sgn(0.0) == 1
    assert sgn(-0.0) == 1
    assert sgn(2.5) == 1
    assert sgn(-1e-30) == -1


class TestSignVector:
    def test_from_point_uses_plus_on_zero(self):
        s = SignVector.from_point([1.0, 0.0, -2.0])
        assert s.entries == (1, 1, -1)

    def test_diag(self):
        s = SignVector((1, -1))
        assert np.array_equal(s.diag(), np.diag([1.0, -1.0]))

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            SignVector((1, 2))

    def test_strictness(self):
        assert SignVector((1, -1)).is_strict
        assert not SignVector((1, 0)).is_strict


class TestAvlpProblem:
    def test_rejects_negative_d(self):
        with pytest.raises(ValueError):
            AvlpProblem([[1.0]], [[-0.5]], [1.0], [1.0])

    def test_rejects_shape_mismatch(self):
        with pytest.raises((ValueError, DimensionError)):
            AvlpProblem([[1.0, 0.0]], [[1.0]], [1.0], [1.0, 0.0])

    def test_arrays_read_only(self):
        p = AvlpProblem([[1.0]], [[0.0]], [1.0], [1.0])
        with pytest.raises(ValueError):
            p.A[0, 0] = 5.0

    def test_with_rhs_and_objective(self):
        p = AvlpProblem([[1.0]], [[0.0]], [1.0], [1.0])
        assert p.with_rhs([2.0]).b[0] == 2.0
        assert p.with_objective([3.0]).c[0] == 3.0


def test_normalize_passthrough_when_d_nonnegative():
    raw = RawProblem([[1.0]], [[0.5]], [1.0], [1.0])
    p = normalize(raw)
    assert p.n == 1 and p.m == 1
    assert p.D[0, 0] == 0.5


def test_normalize_doubles_variables_on_negative_d():
    # x - (-1)|x| <= 1 means x + |x| <= 1, i.e. x <= 1/2 for x >= 0
    raw = RawProblem([[1.0]], [[-1.0]], [1.0], [1.0])
    p = normalize(raw)
    assert p.n == 2
    assert np.all(p.D >= 0)
    # feasibility must agree with the source system on both branches
    for x in (-3.0, 0.25, 0.5, 0.75):
        direct = x + abs(x) <= 1.0 + 1e-12
        # encoded vars (x, y) with y = |x|
        ok, _ = membership(p, np.array([x, abs(x)]))
        assert ok == direct


def test_membership_residual():
    p = AvlpProblem([[1.0], [-1.0]], [[1.0], [0.0]], [0.0, 1.0], [1.0])
    ok, resid = membership(p, np.array([-0.5]))
    assert ok
    assert resid.shape == (2,)
    assert resid[0] == pytest.approx(-0.5 - 0.5)


def test_orthant_restriction_builds_expected_system():
    p = AvlpProblem([[9.0, 9.0]], [[0.0, 0.0]], [9.0], [1.0, 0.0])
    lp = orthant_restriction(p, SignVector((1, 1)))
    assert lp.G.shape == (3, 2)
    assert np.array_equal(lp.G[0], [9.0, 9.0])


def test_orthant_restriction_zero_sign_leaves_coordinate_free():
    p = AvlpProblem([[1.0, 0.0]], [[0.0, 0.0]], [1.0], [1.0, 0.0])
    lp = orthant_restriction(p, SignVector((1, 0)))
    # only one sign row is added, for the first coordinate
    assert lp.G.shape == (2, 2)


def test_orthant_restriction_zero_sign_rejected_when_d_column_nonzero():
    p = AvlpProblem([[1.0]], [[1.0]], [1.0], [1.0])
    with pytest.raises(ValueError):
        orthant_restriction(p, SignVector((0,)))


def test_nonzero_columns():
    D = np.array([[0.0, 1.0, 0.0], [0.0, 2.0, 0.0]])
    assert nonzero_columns(D) == [1]
