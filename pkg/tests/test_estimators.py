import math
import warnings
from fractions import Fraction

import pytest

from l2lab.estimators import (NSValue, ResourceLimitError, TruncationError, TruncationPolicy,
                              characteristic_sequence, fk_log_det, kernel_dimension, ns_beta, snap)
from l2lab.fixtures import lamplighter_markov, random_zpoly_matrix, wedge_of_circles, zpoly
from l2lab.group_ring import GroupRingElement
from l2lab.groups import FiniteGroup, FreeAbelianGroup
from l2lab.matrix import GRMatrix


def test_circle_closed_form():
    # c_p(z - 1, K^2 = 4) = C(2p, p) / 4^p, the return probability of a lazy walk
    r = characteristic_sequence(zpoly([-1, 1]), K=4, p_max=40)
    assert r.exact and r.monotone
    assert r.values == [Fraction(math.comb(2 * p, p), 4 ** p) for p in range(1, 41)]


def test_identity_and_zero():
    Z = FreeAbelianGroup(1)
    assert characteristic_sequence(GRMatrix.identity(Z, 2), K=1, p_max=5).values == [0] * 5
    r = characteristic_sequence(GRMatrix.identity(Z, 2), p_max=5)
    assert r.values == [2 * Fraction(5, 6) ** p for p in range(1, 6)]
    r = characteristic_sequence(GRMatrix.zeros(Z, 3, 1), p_max=5)
    assert r.values == [3] * 5


def test_finite_group_projection():
    G = FiniteGroup.cyclic(2)
    A = GRMatrix(G, [[GroupRingElement(G, {0: 1, 1: 1})]])
    est = kernel_dimension(A, p_max=10)
    assert est.exact_upper == Fraction(1, 2)


def test_dense_matches_dict():
    A = random_zpoly_matrix(3, shape=(2, 2)).to_float()
    a = characteristic_sequence(A, p_max=30, backend="dense").values
    b = characteristic_sequence(A, p_max=30, backend="dict").values
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-12


def test_exact_matches_float():
    A = random_zpoly_matrix(5, shape=(1, 2))
    a = characteristic_sequence(A, p_max=25).floats()
    b = characteristic_sequence(A.to_float(), p_max=25).values
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-12


def test_parallel_rows_deterministic():
    A = random_zpoly_matrix(7, shape=(3, 3))
    assert (characteristic_sequence(A, p_max=12, workers=2).values
            == characteristic_sequence(A, p_max=12, workers=1).values)


def test_flip_to_smaller_side():
    # a 2x1 matrix has a kernel of dimension at least 1
    A = random_zpoly_matrix(11, shape=(2, 1))
    r = characteristic_sequence(A, p_max=50)
    assert r.rows == 2 and all(v >= 1 for v in r.values)


def test_radial_backend_matches_dict():
    A = wedge_of_circles().differentials[0]
    a = characteristic_sequence(A, p_max=9, backend="radial").values
    b = characteristic_sequence(A, p_max=9, backend="dict").values
    assert a == b


def test_lamplighter_sequence():
    r = characteristic_sequence(lamplighter_markov(), K=1, p_max=8)
    assert r.values[0] == Fraction(3, 4)
    assert r.monotone and all(Fraction(1, 3) < v <= 1 for v in r.values)


def test_truncation_needs_permission_in_exact_mode():
    with pytest.raises(TruncationError):
        characteristic_sequence(zpoly([-1, 1]), p_max=5,
                                policy=TruncationPolicy(max_word_length=2))
    pol = TruncationPolicy(max_word_length=2, allow_approximate=True)
    r = characteristic_sequence(zpoly([-1, 1]), p_max=10, policy=pol)
    assert r.truncated and r.violations == []


def test_resource_limit_partial():
    with pytest.raises(ResourceLimitError) as info:
        characteristic_sequence(lamplighter_markov(), K=1, p_max=30, max_terms=40)
    part = info.value.partial
    assert not part.complete and 0 < part.p_max < 30


def test_snap():
    assert snap(0.3405, 3, 0.05)[0] == Fraction(1, 3)
    assert snap(0.0252, 1, 0.05)[0] == 0
    assert snap(0.5, 1, 0.05)[0] is None
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        value, note = snap(0.51, 10, 0.2)
    assert value is None and "ambiguous" in note and w


def test_kernel_dimension_snapped():
    est = kernel_dimension(zpoly([-1, 1]), p_max=200, snap_denominator=1)
    assert est.snapped == 0 and est.provenance == "snapped:d=1"
    assert est.upper_bound > 0


def test_log_det_z_minus_2():
    A = zpoly([-2, 1]).to_float()
    est = fk_log_det(A, 0, 3000)
    assert abs(est.value - math.log(2)) < 1e-6
    # partial sums decrease to the limit
    assert all(a >= b - 1e-15 for a, b in zip(est.partial_sums, est.partial_sums[1:]))


def test_log_det_rejects_large_kernel():
    with pytest.raises(ValueError):
        fk_log_det(zpoly([-2, 1]).to_float(), Fraction(1, 2), 100)


def test_log_det_unit_root_converges_slowly():
    est = fk_log_det(zpoly([-1, 1]).to_float(), 0, 4000)
    assert 0 < est.value < 0.02


def test_ns_beta_circle():
    r = characteristic_sequence(zpoly([-1, 1]).to_float(), p_max=2000)
    b = ns_beta(r, 0, (200, 2000))
    assert abs(b.beta_hat - 0.5) < 0.01
    r2 = characteristic_sequence(zpoly([1, -2, 1]).to_float(), p_max=2000)
    assert abs(ns_beta(r2, 0, (200, 2000)).beta_hat - 0.25) < 0.02


def test_ns_beta_exact_zero_is_infinite():
    G = FiniteGroup.cyclic(2)
    A = GRMatrix(G, [[GroupRingElement(G, {0: 1, 1: 1})]])
    assert ns_beta(A, Fraction(1, 2), (1, 6)).infinite


def test_ns_value():
    assert NSValue.infinity_plus().to_json() == "inf+"
    assert NSValue(2.0) == 2.0
    assert NSValue(math.inf) != NSValue.infinity_plus()
    with pytest.raises(ValueError):
        NSValue(-1)
