import json

import numpy as np
import pytest

from lithosvm.baselines import train_gaussian_nb
from lithosvm.baselines import predict as nb_predict
from lithosvm.kernels import KernelSpec, linear_kernel, rbf_kernel
from lithosvm.model_io import (
    FORMAT_VERSION,
    kernel_from_doc,
    kernel_to_doc,
    load_model,
    save_model,
)
from lithosvm.multiclass import predict as svm_predict
from lithosvm.multiclass import train_one_vs_all
from lithosvm.preprocess import fit_normalization
from lithosvm.solver import (
    SolverConfig,
    decision_function,
    kkt_violation,
    train_binary_svm,
)


@pytest.fixture()
def training_data():
    rng = np.random.default_rng(9)
    X = np.vstack([rng.normal((-1.5, 0), 0.5, (25, 2)), rng.normal((1.5, 0), 0.5, (25, 2))])
    d = np.array([-1.0] * 25 + [1.0] * 25)
    return X, d


def test_kernel_doc_round_trip():
    assert kernel_to_doc(linear_kernel()) == {"kernel": "linear"}
    assert kernel_to_doc(rbf_kernel(0.5)) == {"kernel": "rbf", "sigma": 0.5}
    assert kernel_from_doc({"kernel": "linear"}) == linear_kernel()
    assert kernel_from_doc({"kernel": "rbf", "sigma": 0.5}) == rbf_kernel(0.5)
    with pytest.raises(ValueError, match="unknown kernel"):
        kernel_from_doc({"kernel": "poly", "degree": 3})


def test_binary_model_round_trip_bitwise(tmp_path, training_data):
    X, d = training_data
    config = SolverConfig()
    model = train_binary_svm(X, d, config, rbf_kernel(0.7), feature_names=("GR", "NPHI"))
    path = tmp_path / "binary.json"
    save_model(path, model)
    loaded = load_model(path)
    assert np.array_equal(loaded.support_vectors, model.support_vectors)
    assert np.array_equal(loaded.coefficients, model.coefficients)
    assert loaded.bias == model.bias
    assert loaded.C == model.C
    assert loaded.kernel == model.kernel
    assert loaded.feature_names == model.feature_names
    probe = X[:7] * 1.1
    assert np.array_equal(decision_function(loaded, probe), decision_function(model, probe))
    # KKT residuals survive the round trip because row bytes are preserved
    assert kkt_violation(loaded, X, d, eps=config.eps) <= config.kkt_tol


def test_multiclass_round_trip_with_normalization(tmp_path):
    rng = np.random.default_rng(10)
    X = np.vstack([rng.normal((c * 2.0, 0), 0.4, (20, 2)) for c in range(4)])
    y = np.repeat(np.arange(4), 20)
    stats = fit_normalization(X, ("GR", "NPHI"))
    model = train_one_vs_all(
        X, y, SolverConfig(), rbf_kernel(0.5),
        feature_names=("GR", "NPHI"), normalization=stats,
    )
    path = tmp_path / "multi.json"
    save_model(path, model)
    loaded = load_model(path)
    assert loaded.classes == model.classes
    assert loaded.class_names == model.class_names
    assert loaded.normalization.feature_names == stats.feature_names
    assert np.array_equal(loaded.normalization.mean, stats.mean)
    assert np.array_equal(loaded.normalization.stddev, stats.stddev)
    assert np.array_equal(svm_predict(loaded, X), svm_predict(model, X))
    doc = json.loads(path.read_text())
    assert doc["model_type"] == "one_vs_all_svm"
    assert doc["models"][0]["kernel"] == {"kernel": "rbf", "sigma": 0.5}


def test_gaussian_nb_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    X = np.vstack([rng.normal((c, 0), 0.5, (15, 2)) for c in range(3)])
    y = np.repeat(np.arange(3), 15)
    model = train_gaussian_nb(X, y, feature_names=("a", "b"))
    path = tmp_path / "nb.json"
    save_model(path, model)
    loaded = load_model(path)
    assert np.array_equal(loaded.priors, model.priors)
    assert np.array_equal(loaded.means, model.means)
    assert np.array_equal(loaded.variances, model.variances)
    assert np.array_equal(nb_predict(loaded, X), nb_predict(model, X))
    assert json.loads(path.read_text())["model_type"] == "gaussian_nb"


def test_save_is_deterministic(tmp_path, training_data):
    X, d = training_data
    model = train_binary_svm(X, d, SolverConfig(), linear_kernel())
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(p1, model)
    save_model(p2, model)
    assert p1.read_bytes() == p2.read_bytes()


def test_linear_kernel_doc_has_no_sigma(tmp_path, training_data):
    X, d = training_data
    model = train_binary_svm(X, d, SolverConfig(), linear_kernel())
    path = tmp_path / "m.json"
    save_model(path, model)
    doc = json.loads(path.read_text())
    assert doc["kernel"] == {"kernel": "linear"}
    assert doc["format_version"] == FORMAT_VERSION


def test_version_and_type_errors(tmp_path, training_data):
    X, d = training_data
    model = train_binary_svm(X, d, SolverConfig(), linear_kernel())
    path = tmp_path / "m.json"
    save_model(path, model)
    doc = json.loads(path.read_text())
    doc["format_version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="format_version"):
        load_model(path)
    doc["format_version"] = FORMAT_VERSION
    doc["model_type"] = "decision_tree"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="model_type"):
        load_model(path)
    with pytest.raises(TypeError, match="serialize"):
        save_model(tmp_path / "x.json", {"not": "a model"})
