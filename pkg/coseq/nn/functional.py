# pylint: disable=protected-access
from typing import Optional

import numpy as np

from .tensor import ArrayLike, Tensor, as_tensor
from ..constants import NORM_EPS, PROB_FLOOR
from ..exceptions import DimensionError, DomainError
from ..logger import get_logger

logger = get_logger()


def linear(x: ArrayLike, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    x = as_tensor(x)
    if weight.ndim != 2:
        raise DimensionError("linear", "2-D weight", weight.shape)
    if x.ndim not in (1, 2) or x.shape[-1] != weight.shape[0]:
        raise DimensionError("linear", f"(n, {weight.shape[0]})", x.shape)
    out = x @ weight
    if bias is not None:
        if bias.shape != (weight.shape[1],):
            raise DimensionError("linear", f"bias of shape ({weight.shape[1]},)", bias.shape)
        out = out + bias
    return out


def softmax(values: ArrayLike, axis: int = -1) -> Tensor:
    x = as_tensor(values)
    if x.size == 0:
        raise DomainError("softmax", "empty input")
    if not np.all(np.isfinite(x.data)):
        raise DomainError("softmax", "non-finite input")
    wide = x.data.astype(np.float64)
    exps = np.exp(wide - wide.max(axis=axis, keepdims=True))
    probs = (exps / exps.sum(axis=axis, keepdims=True)).astype(x.dtype)

    def backward(grad: np.ndarray) -> None:
        inner = (grad * probs).sum(axis=axis, keepdims=True)
        out._send(x, probs * (grad - inner))

    out = Tensor._make("softmax", probs, (x,), backward)
    return out


def _check_onehot(onehot: np.ndarray, operation: str) -> np.ndarray:
    if onehot.size == 0:
        raise DomainError(operation, "empty one-hot target")
    if not np.all((onehot == 0) | (onehot == 1)):
        raise DomainError(operation, "one-hot target must contain only 0 and 1")
    if not np.all(onehot.sum(axis=-1) == 1):
        raise DomainError(operation, "one-hot target must have exactly one 1 per row")
    return np.argmax(onehot, axis=-1)


def cross_entropy(probs: ArrayLike, onehot: ArrayLike) -> Tensor:
    """Mean negative log-likelihood of the labelled entries.

    Probabilities are clamped from below at PROB_FLOOR, so a zero entry at the
    label gives a finite loss and no gradient.
    """
    p = as_tensor(probs)
    target = np.asarray(onehot)
    if p.shape != target.shape:
        raise DimensionError("cross_entropy", p.shape, target.shape)
    labels = _check_onehot(target, "cross_entropy")
    if np.any(p.data < 0) or not np.allclose(p.data.sum(axis=-1), 1.0, atol=1e-4):
        raise DomainError("cross_entropy", "probs must be a probability distribution")

    rows = p.data.reshape(-1, p.shape[-1])
    flat_labels = np.asarray(labels).reshape(-1)
    picked = rows[np.arange(rows.shape[0]), flat_labels]
    clamped = np.maximum(picked, PROB_FLOOR)
    count = rows.shape[0]
    loss = np.asarray(-np.log(clamped).mean(), dtype=p.dtype)

    def backward(grad: np.ndarray) -> None:
        local = np.zeros_like(rows)
        active = picked >= PROB_FLOOR
        local[np.arange(count), flat_labels] = np.where(active, -1.0 / clamped, 0.0) / count
        out._send(p, (local * grad).reshape(p.shape))

    out = Tensor._make("cross_entropy", loss, (p,), backward)
    return out


def softmax_cross_entropy(logits: ArrayLike, onehot: ArrayLike) -> Tensor:
    """Fused softmax and cross-entropy, mean over rows.

    The gradient with respect to the logits is (softmax - onehot) / rows.
    """
    z = as_tensor(logits)
    target = np.asarray(onehot)
    if z.shape != target.shape:
        raise DimensionError("softmax_cross_entropy", z.shape, target.shape)
    _check_onehot(target, "softmax_cross_entropy")
    wide = z.data.astype(np.float64).reshape(-1, z.shape[-1])
    rows = target.reshape(-1, z.shape[-1]).astype(np.float64)
    shifted = wide - wide.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_probs = shifted - log_norm
    probs = np.exp(log_probs)
    count = wide.shape[0]
    loss = np.asarray(-(rows * log_probs).sum() / count, dtype=z.dtype)

    def backward(grad: np.ndarray) -> None:
        local = ((probs - rows) / count).reshape(z.shape).astype(z.dtype)
        out._send(z, local * grad)

    out = Tensor._make("softmax_cross_entropy", loss, (z,), backward)
    return out


def mse(prediction: Tensor, target: ArrayLike) -> Tensor:
    target = as_tensor(target)
    if prediction.shape != target.shape:
        raise DimensionError("mse", prediction.shape, target.shape)
    diff = prediction - target
    return (diff * diff).mean()


def normalize(x: Tensor, axis: int = -1) -> Tensor:
    norms = ((x * x).sum(axis=axis, keepdims=True) + NORM_EPS) ** 0.5
    return x / norms


def l2_normalize(values: np.ndarray, axis: int = -1) -> np.ndarray:
    values = np.asarray(values)
    norms = np.linalg.norm(values, axis=axis, keepdims=True)
    return values / np.maximum(norms, NORM_EPS)


__all__ = [
    "linear",
    "softmax",
    "cross_entropy",
    "softmax_cross_entropy",
    "mse",
    "normalize",
    "l2_normalize",
]
