"""Binary soft-margin SVM trained by SMO on the dual problem.

The hot loop lives in the compiled extension lithosvm._smo when available,
with a numpy implementation of the identical algorithm as fallback; set
LITHOSVM_BACKEND=compiled|python|auto before import to force a choice.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ._smo_py import (
    STATUS_BUDGET_EXCEEDED,
    STATUS_CONVERGED,
    STATUS_STALLED,
    kkt_residuals,
)
from .kernels import KernelSpec, cross_kernel, gram_matrix


def _load_backend():
    choice = os.environ.get("LITHOSVM_BACKEND", "auto").strip().lower()
    if choice not in {"auto", "compiled", "python"}:
        raise RuntimeError(
            f"LITHOSVM_BACKEND must be 'auto', 'compiled' or 'python', got {choice!r}"
        )
    if choice in {"auto", "compiled"}:
        try:
            from . import _smo

            return _smo.smo_solve, "compiled"
        except ImportError as exc:
            if choice == "compiled":
                raise RuntimeError("compiled SMO backend requested but not built") from exc
    from . import _smo_py

    return _smo_py.smo_solve, "python"


_SMO_SOLVE, _BACKEND_NAME = _load_backend()


def active_backend() -> str:
    """Name of the SMO backend selected at import: 'compiled' or 'python'."""
    return _BACKEND_NAME


@dataclass
class SolverConfig:
    C: float = 10.0
    kkt_tol: float = 1e-3
    max_passes: int = 200
    eps: float = 1e-9

    def __post_init__(self) -> None:
        if not np.isfinite(self.C) or self.C <= 0:
            raise ValueError("C must be positive and finite")
        if not 0 < self.kkt_tol < 1:
            raise ValueError("kkt_tol must lie in (0, 1)")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")
        if not 0 < self.eps < self.C / 2:
            raise ValueError("eps must lie in (0, C/2)")


@dataclass
class SmoDiagnostics:
    converged: bool
    iterations: int
    examinations: int
    max_kkt_violation: float
    backend: str


class ConvergenceError(RuntimeError):
    """SMO ran out of its examination budget or stalled before reaching tol."""

    def __init__(self, message: str, diagnostics: SmoDiagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass
class BinarySvmModel:
    """Trained binary classifier: decision g(x) = sum_k coeff_k K(sv_k, x) + bias.

    coefficients hold alpha_k * label_k for the support vectors (rows with
    alpha above the solver's eps), so labels are recoverable as their signs.
    """

    kernel: KernelSpec
    C: float
    bias: float
    feature_names: tuple[str, ...]
    support_vectors: np.ndarray
    coefficients: np.ndarray
    diagnostics: SmoDiagnostics | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        self.support_vectors = np.ascontiguousarray(self.support_vectors, dtype=np.float64)
        self.coefficients = np.ascontiguousarray(self.coefficients, dtype=np.float64)
        if self.support_vectors.ndim != 2:
            raise ValueError("support_vectors must be 2-D")
        if self.coefficients.shape != (self.support_vectors.shape[0],):
            raise ValueError("one coefficient per support vector required")
        if self.support_vectors.shape[1] != len(self.feature_names):
            raise ValueError("support vector width does not match feature_names")


def _validate_training_inputs(features, labels):
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("features must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    d = np.asarray(labels, dtype=np.float64).ravel()
    if d.shape[0] != X.shape[0]:
        raise ValueError("labels length does not match feature rows")
    if not np.all(np.isin(d, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    return X, d


def train_binary_svm(
    features: np.ndarray,
    labels: np.ndarray,
    config: SolverConfig,
    kernel: KernelSpec,
    feature_names=None,
    gram: np.ndarray | None = None,
) -> BinarySvmModel:
    """Solve the dual problem for one +1/-1 labeling.

    gram may carry a precomputed gram_matrix(kernel, features) so one matrix
    can be shared across several trainings on the same rows.
    Raises ConvergenceError when the solver cannot reach kkt_tol.
    """
    X, d = _validate_training_inputs(features, labels)
    n = X.shape[0]
    names = tuple(feature_names) if feature_names is not None else tuple(
        f"f{i}" for i in range(X.shape[1])
    )
    if len(names) != X.shape[1]:
        raise ValueError("feature_names length does not match feature count")
    if gram is None:
        gram = gram_matrix(kernel, X)
    else:
        gram = np.ascontiguousarray(gram, dtype=np.float64)
        if gram.shape != (n, n):
            raise ValueError("precomputed gram matrix has the wrong shape")

    alpha, bias, status, iterations, examinations, max_violation = _SMO_SOLVE(
        gram, d, config.C, config.kkt_tol, config.max_passes, config.eps
    )
    diagnostics = SmoDiagnostics(
        converged=status == STATUS_CONVERGED,
        iterations=int(iterations),
        examinations=int(examinations),
        max_kkt_violation=float(max_violation),
        backend=_BACKEND_NAME,
    )
    if status == STATUS_BUDGET_EXCEEDED:
        raise ConvergenceError(
            f"SMO exceeded {config.max_passes} passes "
            f"({diagnostics.examinations} pair examinations, "
            f"worst KKT violation {diagnostics.max_kkt_violation:.3e} "
            f"> tol {config.kkt_tol:.3e})",
            diagnostics,
        )
    if status == STATUS_STALLED:
        raise ConvergenceError(
            "SMO stalled: no pair step can improve the dual "
            f"(worst KKT violation {diagnostics.max_kkt_violation:.3e} "
            f"> tol {config.kkt_tol:.3e}); kkt_tol may be below float resolution "
            "for this problem",
            diagnostics,
        )
    keep = alpha > config.eps
    return BinarySvmModel(
        kernel=kernel,
        C=config.C,
        bias=float(bias),
        feature_names=names,
        support_vectors=X[keep].copy(),
        coefficients=(alpha * d)[keep].copy(),
        diagnostics=diagnostics,
    )


def decision_function(model: BinarySvmModel, features: np.ndarray) -> np.ndarray:
    """Decision values for each row; the predicted label is their sign."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError("features do not match the model's feature count")
    if len(model.coefficients) == 0:
        return np.full(X.shape[0], model.bias)
    K = cross_kernel(model.kernel, X, model.support_vectors)
    return K @ model.coefficients + model.bias


def decision_value(model: BinarySvmModel, x: np.ndarray) -> float:
    return float(decision_function(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def dual_objective(alpha: np.ndarray, labels: np.ndarray, gram: np.ndarray) -> float:
    """W(alpha) = sum(alpha) - 1/2 (alpha*d)' G (alpha*d)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    d = np.asarray(labels, dtype=np.float64)
    v = alpha * d
    return float(alpha.sum() - 0.5 * v @ np.asarray(gram) @ v)


def kkt_violation(
    model: BinarySvmModel, features: np.ndarray, labels: np.ndarray, eps: float = 1e-9
) -> float:
    """Worst KKT residual of the model on its training rows.

    Alphas are reconstructed by matching rows to stored support vectors
    byte-for-byte (serialization preserves exact float64 values, so this
    survives a save/load round trip); unmatched rows carry alpha = 0.
    """
    X, d = _validate_training_inputs(features, labels)
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError("features do not match the model's feature count")
    pending: dict[bytes, list[int]] = {}
    for k, row in enumerate(model.support_vectors):
        pending.setdefault(row.tobytes(), []).append(k)
    alpha = np.zeros(X.shape[0])
    matched = 0
    for i, row in enumerate(X):
        queue = pending.get(row.tobytes())
        if queue:
            alpha[i] = abs(model.coefficients[queue.pop(0)])
            matched += 1
    if matched != len(model.coefficients):
        raise ValueError(
            "features do not contain every support vector; pass the exact "
            "training rows the model was fit on"
        )
    ghat = decision_function(model, X) - model.bias
    residuals = kkt_residuals(alpha, ghat, d, model.bias, model.C, eps)
    return float(residuals.max())


def materialize_weights(model: BinarySvmModel) -> np.ndarray:
    """Explicit weight vector; only the linear kernel lives in input space."""
    if model.kernel.kind != "linear":
        raise ValueError("weights are only materializable for the linear kernel")
    return model.coefficients @ model.support_vectors


def geometric_margin(model: BinarySvmModel) -> float:
    """Width of the separating band, 2 / ||w|| in the kernel feature space."""
    K = gram_matrix(model.kernel, model.support_vectors)
    w_sq = float(model.coefficients @ K @ model.coefficients)
    if w_sq <= 0:
        raise ValueError("margin undefined: the model has no support vectors")
    return 2.0 / np.sqrt(w_sq)
