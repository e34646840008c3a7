import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from lithosvm.kernels import (
    KernelSpec,
    cross_kernel,
    gram_matrix,
    kernel_value,
    linear_kernel,
    rbf_kernel,
)

finite_vectors = hnp.arrays(
    np.float64,
    st.integers(min_value=1, max_value=6),
    elements=st.floats(min_value=-100, max_value=100, allow_nan=False),
)


def test_kernel_spec_validation():
    with pytest.raises(ValueError, match="unknown kernel"):
        KernelSpec(kind="poly", sigma=None)
    with pytest.raises(ValueError, match="positive finite sigma"):
        KernelSpec(kind="rbf", sigma=0.0)
    with pytest.raises(ValueError, match="positive finite sigma"):
        KernelSpec(kind="rbf", sigma=None)
    with pytest.raises(ValueError, match="positive finite sigma"):
        KernelSpec(kind="rbf", sigma=float("inf"))
    with pytest.raises(ValueError, match="no sigma"):
        KernelSpec(kind="linear", sigma=1.0)
    assert linear_kernel().sigma is None
    assert rbf_kernel(0.5).sigma == 0.5


def test_describe_mentions_convention():
    assert "2*sigma^2" in rbf_kernel(0.5).describe()
    assert "dot" in linear_kernel().describe()


def test_linear_kernel_hand_values():
    assert kernel_value(linear_kernel(), np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0
    assert kernel_value(linear_kernel(), np.zeros(3), np.ones(3)) == 0.0


def test_rbf_kernel_hand_values():
    # ||x - y||^2 = 25, sigma = 5 -> exp(-25 / 50) = exp(-0.5)
    spec = rbf_kernel(5.0)
    got = kernel_value(spec, np.array([0.0, 0.0]), np.array([3.0, 4.0]))
    assert got == pytest.approx(math.exp(-0.5), rel=1e-15)
    # sigma = 0.5 -> 2 sigma^2 = 0.5 -> exp(-2 ||d||^2)
    spec = rbf_kernel(0.5)
    got = kernel_value(spec, np.array([1.0]), np.array([2.0]))
    assert got == pytest.approx(math.exp(-2.0), rel=1e-15)


def test_rbf_identity_is_one():
    x = np.array([3.0, -1.0, 2.0])
    assert kernel_value(rbf_kernel(0.7), x, x) == 1.0


@given(x=finite_vectors, shift=st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_rbf_translation_invariant(x, shift):
    y = x[::-1].copy()
    a = kernel_value(rbf_kernel(1.3), x, y)
    b = kernel_value(rbf_kernel(1.3), x + shift, y + shift)
    assert a == pytest.approx(b, rel=1e-12)


@given(x=finite_vectors, scale=st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_linear_kernel_is_bilinear(x, scale):
    y = np.roll(x, 1)
    assert kernel_value(linear_kernel(), scale * x, y) == pytest.approx(
        scale * kernel_value(linear_kernel(), x, y), rel=1e-9, abs=1e-9
    )


@pytest.mark.parametrize("spec", [linear_kernel(), rbf_kernel(0.5), rbf_kernel(2.0)])
def test_gram_matrix_exactly_symmetric(spec):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(40, 4))
    G = gram_matrix(spec, X)
    assert np.array_equal(G, G.T)  # bitwise, not approx
    if spec.kind == "rbf":
        assert np.all(np.diag(G) == 1.0)
        assert np.all(G > 0.0) and np.all(G <= 1.0)


def test_gram_matches_kernel_value_entries():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(12, 3))
    for spec in (linear_kernel(), rbf_kernel(0.8)):
        G = gram_matrix(spec, X)
        for i in range(12):
            for j in range(12):
                want = kernel_value(spec, X[i], X[j])
                assert G[i, j] == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_cross_kernel_chunking_consistent():
    # more rows than the internal chunk so block boundaries are exercised
    rng = np.random.default_rng(9)
    A = rng.normal(size=(300, 3))
    B = rng.normal(size=(17, 3))
    spec = rbf_kernel(1.1)
    got = cross_kernel(spec, A, B)
    sq = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)
    want = np.exp(-sq / (2.0 * 1.1**2))
    assert np.array_equal(got, want)
    assert got.shape == (300, 17)


def test_cross_kernel_validation():
    spec = linear_kernel()
    with pytest.raises(ValueError, match="matching feature"):
        cross_kernel(spec, np.ones((2, 3)), np.ones((2, 4)))
    with pytest.raises(ValueError, match="1-D vectors"):
        kernel_value(spec, np.ones((2, 2)), np.ones((2, 2)))


@given(
    n=st.integers(min_value=1, max_value=30),
    f=st.integers(min_value=1, max_value=5),
    seed=st.integers(min_value=0, max_value=10_000),
    sigma=st.sampled_from([0.1, 0.5, 1.0, 2.0]),
)
@settings(max_examples=50, deadline=None)
def test_gram_positive_semidefinite(n, f, seed, sigma):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, f)) * rng.uniform(0.5, 3.0)
    for spec in (linear_kernel(), rbf_kernel(sigma)):
        G = gram_matrix(spec, X)
        eigenvalues = np.linalg.eigvalsh(G)
        assert eigenvalues.min() >= -1e-8
