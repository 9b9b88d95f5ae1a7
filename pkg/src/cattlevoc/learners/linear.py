"""L2-regularized multinomial logistic regression on standardized features."""

import numpy as np
from scipy.optimize import minimize


def _softmax(f: np.ndarray) -> np.ndarray:
    z = f - f.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class LogisticRegression:
    """Full softmax parameterization, bias unpenalized, L-BFGS solver."""

    def __init__(self, l2: float = 1.0, max_iter: int = 500, tol: float = 1e-8):
        if l2 < 0 or max_iter < 1:
            raise ValueError("invalid hyperparameters")
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.n_classes = 0
        self._mu = None
        self._sd = None
        self._w = None
        self._b = None

    def fit(self, x: np.ndarray, y: np.ndarray, n_classes: int) -> "LogisticRegression":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n, m = x.shape
        k = int(n_classes)
        self._mu = x.mean(axis=0)
        sd = x.std(axis=0)
        self._sd = np.where(sd > 0, sd, 1.0)
        z = (x - self._mu) / self._sd
        onehot = np.zeros((n, k))
        onehot[np.arange(n), y] = 1.0

        def objective(theta):
            w = theta[: m * k].reshape(k, m)
            b = theta[m * k :]
            logits = z @ w.T + b
            logits -= logits.max(axis=1, keepdims=True)
            log_norm = np.log(np.exp(logits).sum(axis=1))
            nll = float(np.sum(log_norm - logits[np.arange(n), y]))
            p = np.exp(logits - log_norm[:, None])
            diff = p - onehot
            grad_w = diff.T @ z + self.l2 * w
            grad_b = diff.sum(axis=0)
            loss = nll + 0.5 * self.l2 * float(np.sum(w * w))
            return loss, np.concatenate([grad_w.ravel(), grad_b])

        result = minimize(
            objective,
            np.zeros(m * k + k),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.max_iter, "ftol": self.tol, "gtol": 1e-8},
        )
        theta = result.x
        self._w = theta[: m * k].reshape(k, m)
        self._b = theta[m * k :]
        self.n_classes = k
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=np.float64) - self._mu) / self._sd
        return _softmax(z @ self._w.T + self._b)

    def to_state(self) -> dict:
        return {
            "kind": "logreg",
            "l2": self.l2,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "n_classes": self.n_classes,
            "mu": self._mu,
            "sd": self._sd,
            "w": self._w,
            "b": self._b,
        }

    @classmethod
    def from_state(cls, state: dict) -> "LogisticRegression":
        model = cls(l2=float(state["l2"]), max_iter=int(state["max_iter"]), tol=float(state["tol"]))
        model.n_classes = int(state["n_classes"])
        model._mu = np.asarray(state["mu"], dtype=np.float64)
        model._sd = np.asarray(state["sd"], dtype=np.float64)
        model._w = np.asarray(state["w"], dtype=np.float64)
        model._b = np.asarray(state["b"], dtype=np.float64)
        return model
