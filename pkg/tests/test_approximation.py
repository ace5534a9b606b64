from fractions import Fraction

import pytest

from l2lab import oracles
from l2lab.approximation import (QuotientError, QuotientSpec, quotient_betti,
                                 quotient_kernel_dim, restrict_index, tower)
from l2lab.estimators import kernel_dimension
from l2lab.fixtures import (laurent, lamplighter_markov, random_zpoly_matrix, torus_complex,
                            zpoly)
from l2lab.group_ring import GroupRingElement
from l2lab.groups import FreeAbelianGroup
from l2lab.matrix import GRMatrix, k_bound


def test_circle_quotients():
    assert quotient_kernel_dim(zpoly([-1, 1]), 4) == Fraction(1, 4)
    assert tower(zpoly([-1, 1]), [1, 2, 8]) == [(1, 1), (2, Fraction(1, 2)), (8, Fraction(1, 8))]


def test_identity_quotient_is_zero():
    assert quotient_kernel_dim(GRMatrix.identity(FreeAbelianGroup(2), 2), 5) == 0


def test_torus_complex_quotients():
    # the quotient of the torus complex by (Z/k)^2 is a k x k torus: betti 1, 2, 1
    k = 3
    assert quotient_betti(torus_complex(), k) == [Fraction(1, k * k), Fraction(2, k * k),
                                                 Fraction(1, k * k)]


def test_lamplighter_small_levels():
    A = lamplighter_markov()
    # exact and floating rank agree on the same level
    exact = quotient_kernel_dim(A, 6)
    flt = quotient_kernel_dim(A.to_float(), 6)
    assert exact == flt
    assert abs(quotient_kernel_dim(A, 10) - Fraction(1, 3)) < 0.05


def test_spec_validation():
    with pytest.raises(QuotientError):
        QuotientSpec("lamplighter", 15)
    with pytest.raises(QuotientError):
        QuotientSpec("free", 2)
    with pytest.raises(QuotientError):
        quotient_kernel_dim(zpoly([1]), QuotientSpec("lamplighter", 2))


def test_restrict_circle_index_two():
    R = restrict_index(zpoly([-1, 1]), [[2]])
    Z = R.ctx
    assert R.shape == (2, 2)
    assert R.entries[0][0] == laurent(Z, {0: -1})
    assert R.entries[0][1] == laurent(Z, {0: 1})
    assert R.entries[1][0] == laurent(Z, {1: 1})


def test_restrict_zero_and_identity():
    Z = FreeAbelianGroup(1)
    R = restrict_index(GRMatrix.zeros(Z, 1, 1), [[2]])
    assert R.is_zero() and R.shape == (2, 2)
    I = restrict_index(GRMatrix.identity(Z, 2), [[3]])
    assert I == GRMatrix.identity(Z, 6)


def test_restrict_multiplies_kernel_dims():
    Z2 = FreeAbelianGroup(2)
    x1 = laurent(Z2, {(1, 0): 1, (0, 0): -1})
    A = GRMatrix(Z2, [[x1, x1], [x1, x1]])
    basis = [[1, 1], [0, 2]]
    R = restrict_index(A, basis)
    assert R.shape == (4, 4)
    assert oracles.torus_kernel_dim(R) == 2 * oracles.torus_kernel_dim(A)


def test_restrict_preserves_estimates():
    A = random_zpoly_matrix(2, shape=(1, 1))
    k2 = k_bound(A).k_squared
    a = kernel_dimension(A.to_float(), p_max=400, K=k2).upper_bound
    r = kernel_dimension(restrict_index(A, [[2]]).to_float(), p_max=400, K=k2).upper_bound
    # same operator viewed over a subgroup: with a common K every c_p doubles
    assert abs(r - 2 * a) < 1e-9


def test_restrict_rejects_singular_basis():
    with pytest.raises(ValueError):
        restrict_index(zpoly([1, 1]), [[0]])


def test_tower_converges_to_torus_oracle():
    A = random_zpoly_matrix(4, shape=(2, 2))
    target = oracles.torus_kernel_dim(A)
    assert abs(quotient_kernel_dim(A, 512) - target) < 1e-2
