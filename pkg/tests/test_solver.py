import numpy as np
import pytest

from lithosvm import _smo_py
from lithosvm.kernels import gram_matrix, linear_kernel, rbf_kernel
from lithosvm.solver import (
    BinarySvmModel,
    ConvergenceError,
    SolverConfig,
    active_backend,
    decision_function,
    decision_value,
    dual_objective,
    geometric_margin,
    kkt_violation,
    materialize_weights,
    train_binary_svm,
)

from .oracles import dual_qp_oracle, dual_value


def make_separable(rng, n, n_features=2, margin=0.35):
    """Points pushed to at least `margin` from a random hyperplane."""
    while True:
        w = rng.normal(size=n_features)
        w /= np.linalg.norm(w)
        offset = rng.uniform(-0.3, 0.3)
        X = rng.uniform(-2, 2, size=(n, n_features))
        m = X @ w + offset
        signs = np.where(m >= 0, 1.0, -1.0)
        X = X + (signs * np.maximum(0.0, margin - signs * m))[:, None] * w
        if len(np.unique(signs)) == 2:
            return X, signs


# ------------------------------------------------------- analytic two-point


def test_two_point_problem_exact():
    # x = -1 labeled -1 and x = +1 labeled +1: alpha = (0.5, 0.5), w = 1,
    # bias = 0, margin width 2, solved in a single pair update
    X = np.array([[-1.0], [1.0]])
    d = np.array([-1.0, 1.0])
    model = train_binary_svm(X, d, SolverConfig(C=10.0), linear_kernel())
    assert model.coefficients == pytest.approx([-0.5, 0.5], abs=1e-12)
    assert model.bias == pytest.approx(0.0, abs=1e-12)
    assert materialize_weights(model) == pytest.approx([1.0], abs=1e-12)
    assert geometric_margin(model) == pytest.approx(2.0, abs=1e-12)
    assert decision_value(model, np.array([1.0])) == pytest.approx(1.0, abs=1e-12)
    assert decision_value(model, np.array([-1.0])) == pytest.approx(-1.0, abs=1e-12)
    assert model.diagnostics.converged
    assert model.diagnostics.iterations == 1
    assert model.diagnostics.examinations == 1


def test_two_point_dual_objective():
    # W(alpha) = 2 alpha - 2 alpha^2 peaks at alpha = 0.5 with W = 0.5
    X = np.array([[-1.0], [1.0]])
    d = np.array([-1.0, 1.0])
    G = gram_matrix(linear_kernel(), X)
    assert dual_objective(np.array([0.5, 0.5]), d, G) == pytest.approx(0.5)
    model = train_binary_svm(X, d, SolverConfig(), linear_kernel())
    alpha = np.abs(model.coefficients)
    assert dual_objective(alpha, d, G) == pytest.approx(0.5, abs=1e-12)


# ------------------------------------------------------------- bias rule


def test_bias_mean_over_unbounded():
    alpha = np.array([0.5, 2.0, 0.0])
    ghat = np.array([0.2, -0.4, 1.0])
    d = np.array([1.0, -1.0, 1.0])
    # unbounded: rows 0 and 1 -> mean of (1 - 0.2) and (-1 + 0.4)
    got = _smo_py.compute_bias(alpha, ghat, d, C=10.0, eps=1e-9)
    assert got == pytest.approx((0.8 - 0.6) / 2)


def test_bias_midpoint_when_all_at_bounds():
    # all alpha at 0: +1 rows bound bias from below, -1 rows from above
    alpha = np.zeros(4)
    ghat = np.array([0.1, 0.3, -0.2, 0.5])
    d = np.array([1.0, 1.0, -1.0, -1.0])
    lower = max(1 - 0.1, 1 - 0.3)
    upper = min(-1 + 0.2, -1 - 0.5)
    got = _smo_py.compute_bias(alpha, ghat, d, C=10.0, eps=1e-9)
    assert got == pytest.approx((lower + upper) / 2)


def test_bias_initial_state_is_zero():
    n = 6
    d = np.array([1.0, -1.0] * 3)
    got = _smo_py.compute_bias(np.zeros(n), np.zeros(n), d, C=10.0, eps=1e-9)
    assert got == 0.0


def test_bias_single_sided():
    # only +1 labels at alpha = 0: only lower bounds exist
    alpha = np.zeros(2)
    ghat = np.array([0.25, -0.5])
    d = np.ones(2)
    got = _smo_py.compute_bias(alpha, ghat, d, C=10.0, eps=1e-9)
    assert got == pytest.approx(1.5)  # max(1 - 0.25, 1 + 0.5)


def test_bias_at_cap_classification():
    # d = +1 at the cap bounds bias from above; d = -1 at the cap from below
    alpha = np.array([10.0, 10.0])
    ghat = np.array([2.0, -3.0])
    d = np.array([1.0, -1.0])
    got = _smo_py.compute_bias(alpha, ghat, d, C=10.0, eps=1e-9)
    assert got == pytest.approx(((-1.0 + 3.0) + (1.0 - 2.0)) / 2)


# ------------------------------------------------------------ KKT residuals


def test_kkt_residuals_by_band():
    C, eps = 10.0, 1e-9
    d = np.ones(3)
    # u = d * (ghat + b) - 1 with b = 0
    alpha = np.array([0.0, 5.0, 10.0])
    ghat = np.array([0.7, 1.4, 1.2])  # u = -0.3, +0.4, +0.2
    got = _smo_py.kkt_residuals(alpha, ghat, d, 0.0, C, eps)
    assert got == pytest.approx([0.3, 0.4, 0.2])
    ghat = np.array([1.3, 0.6, 0.8])  # u = +0.3, -0.4, -0.2
    got = _smo_py.kkt_residuals(alpha, ghat, d, 0.0, C, eps)
    assert got == pytest.approx([0.0, 0.4, 0.0])


# ------------------------------------------------------------ oracle checks


@pytest.mark.parametrize("trial", range(10))
def test_dual_matches_qp_oracle(trial):
    rng = np.random.default_rng(1000 + trial)
    n = int(rng.integers(3, 13))
    n_features = int(rng.integers(1, 4))
    C = [1.0, 10.0][trial % 2]
    spec = rbf_kernel(float(rng.uniform(0.4, 1.5))) if trial % 3 else linear_kernel()
    X = rng.normal(size=(n, n_features))
    d = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    if len(np.unique(d)) < 2:
        d[0] = -d[0]
    config = SolverConfig(C=C, kkt_tol=1e-9, max_passes=2000, eps=1e-12)
    model = train_binary_svm(X, d, config, spec)
    G = gram_matrix(spec, X)
    alpha = np.zeros(n)
    # recover alpha from support vector coefficients by row identity
    sv_rows = {row.tobytes(): abs(c) for row, c in zip(model.support_vectors, model.coefficients)}
    for i, row in enumerate(X):
        alpha[i] = sv_rows.get(row.tobytes(), 0.0)
    w_model = dual_objective(alpha, d, G)
    w_oracle, _ = dual_qp_oracle(G, d, C)
    assert abs(w_model - w_oracle) <= 1e-6 * max(1.0, abs(w_oracle))


# --------------------------------------------------------------- invariants


@pytest.mark.parametrize("spec", [linear_kernel(), rbf_kernel(0.5), rbf_kernel(1.5)])
def test_trained_model_satisfies_kkt(spec):
    rng = np.random.default_rng(5)
    X = rng.normal(size=(60, 3))
    d = np.where(X[:, 0] + 0.4 * X[:, 1] - 0.2 > 0, 1.0, -1.0)
    config = SolverConfig()
    model = train_binary_svm(X, d, config, spec)
    assert kkt_violation(model, X, d, eps=config.eps) <= config.kkt_tol


def test_hard_margin_separable_unit_margin():
    rng = np.random.default_rng(11)
    X, d = make_separable(rng, 40)
    config = SolverConfig(C=1e6, kkt_tol=1e-6, max_passes=2000)
    model = train_binary_svm(X, d, config, linear_kernel())
    g = decision_function(model, X)
    assert np.all(d * g >= 1.0 - 1e-4)  # no margin violations at C = 1e6
    assert float(np.min(np.abs(g))) == pytest.approx(1.0, abs=1e-4)


def test_training_is_deterministic():
    rng = np.random.default_rng(21)
    X = rng.normal(size=(50, 4))
    d = np.where(rng.random(50) < 0.5, 1.0, -1.0)
    d[0], d[1] = 1.0, -1.0
    a = train_binary_svm(X, d, SolverConfig(), rbf_kernel(0.7))
    b = train_binary_svm(X, d, SolverConfig(), rbf_kernel(0.7))
    assert np.array_equal(a.support_vectors, b.support_vectors)
    assert np.array_equal(a.coefficients, b.coefficients)
    assert a.bias == b.bias


def test_label_flip_antisymmetry_bitwise():
    rng = np.random.default_rng(31)
    X = rng.normal(size=(30, 3))
    d = np.where(rng.random(30) < 0.5, 1.0, -1.0)
    d[0], d[1] = 1.0, -1.0
    pos = train_binary_svm(X, d, SolverConfig(), rbf_kernel(0.9))
    neg = train_binary_svm(X, -d, SolverConfig(), rbf_kernel(0.9))
    assert np.array_equal(pos.support_vectors, neg.support_vectors)
    assert np.array_equal(pos.coefficients, -neg.coefficients)
    assert pos.bias == -neg.bias


def test_precomputed_gram_gives_identical_model():
    rng = np.random.default_rng(41)
    X = rng.normal(size=(25, 2))
    d = np.where(X[:, 0] > 0.1, 1.0, -1.0)
    spec = rbf_kernel(0.6)
    direct = train_binary_svm(X, d, SolverConfig(), spec)
    shared = train_binary_svm(X, d, SolverConfig(), spec, gram=gram_matrix(spec, X))
    assert np.array_equal(direct.support_vectors, shared.support_vectors)
    assert np.array_equal(direct.coefficients, shared.coefficients)
    assert direct.bias == shared.bias


def test_single_class_training_degenerates_cleanly():
    # the equality constraint forces alpha = 0; the bias settles at the
    # label so every KKT condition holds and all decisions take that sign
    X = np.array([[0.0], [1.0], [2.0]])
    model = train_binary_svm(X, -np.ones(3), SolverConfig(), linear_kernel())
    assert len(model.coefficients) == 0
    assert model.bias == -1.0
    assert decision_function(model, X).tolist() == [-1.0, -1.0, -1.0]


# ------------------------------------------------------------ error paths


def test_budget_exhaustion_raises_with_diagnostics():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(30, 2))
    d = np.where(rng.random(30) < 0.5, 1.0, -1.0)
    config = SolverConfig(C=1e6, kkt_tol=1e-10, max_passes=1)
    with pytest.raises(ConvergenceError, match="pair examinations"):
        train_binary_svm(X, d, config, rbf_kernel(0.3))
    try:
        train_binary_svm(X, d, config, rbf_kernel(0.3))
    except ConvergenceError as exc:
        assert not exc.diagnostics.converged
        assert exc.diagnostics.examinations >= 30 * 30
        assert exc.diagnostics.max_kkt_violation > config.kkt_tol
        assert exc.diagnostics.backend == active_backend()


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(C=0.0)
    with pytest.raises(ValueError):
        SolverConfig(C=float("inf"))
    with pytest.raises(ValueError):
        SolverConfig(kkt_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_passes=0)
    with pytest.raises(ValueError):
        SolverConfig(eps=0.0)
    with pytest.raises(ValueError):
        SolverConfig(C=1e-9, eps=1e-9)


def test_training_input_validation():
    X = np.ones((4, 2))
    good = np.array([1.0, -1.0, 1.0, -1.0])
    with pytest.raises(ValueError, match="-1 or \\+1"):
        train_binary_svm(X, np.array([0.0, 1.0, 1.0, -1.0]), SolverConfig(), linear_kernel())
    with pytest.raises(ValueError, match="labels length"):
        train_binary_svm(X, good[:3], SolverConfig(), linear_kernel())
    with pytest.raises(ValueError, match="finite"):
        train_binary_svm(X * np.nan, good, SolverConfig(), linear_kernel())
    with pytest.raises(ValueError, match="feature_names"):
        train_binary_svm(X, good, SolverConfig(), linear_kernel(), feature_names=("a",))
    with pytest.raises(ValueError, match="wrong shape"):
        train_binary_svm(X, good, SolverConfig(), linear_kernel(), gram=np.ones((3, 3)))


def test_kkt_violation_requires_training_rows():
    rng = np.random.default_rng(51)
    X = rng.normal(size=(20, 2))
    d = np.where(X[:, 0] > 0, 1.0, -1.0)
    model = train_binary_svm(X, d, SolverConfig(), linear_kernel())
    with pytest.raises(ValueError, match="support vector"):
        kkt_violation(model, X + 1.0, d)


def test_materialize_weights_rbf_rejected():
    X = np.array([[-1.0], [1.0]])
    d = np.array([-1.0, 1.0])
    model = train_binary_svm(X, d, SolverConfig(), rbf_kernel(1.0))
    with pytest.raises(ValueError, match="linear"):
        materialize_weights(model)


def test_geometric_margin_needs_support_vectors():
    model = BinarySvmModel(
        kernel=linear_kernel(),
        C=10.0,
        bias=0.5,
        feature_names=("a",),
        support_vectors=np.empty((0, 1)),
        coefficients=np.empty(0),
    )
    assert decision_function(model, np.array([[3.0]])).tolist() == [0.5]
    with pytest.raises(ValueError, match="no support vectors"):
        geometric_margin(model)


def test_rbf_margin_matches_feature_space_norm():
    rng = np.random.default_rng(61)
    X, d = make_separable(rng, 20)
    model = train_binary_svm(X, d, SolverConfig(C=1e6, kkt_tol=1e-6, max_passes=2000), linear_kernel())
    w = materialize_weights(model)
    assert geometric_margin(model) == pytest.approx(2.0 / np.linalg.norm(w), rel=1e-12)
