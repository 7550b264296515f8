from typing import Callable

import numpy as np

from .tensor import Tensor
from ..exceptions import DomainError
from ..logger import get_logger

logger = get_logger()

REL_ERR_FLOOR = 1e-5


def grad_check(f: Callable[[Tensor], Tensor], x: Tensor, h: float = 1e-3) -> float:
    """Largest relative error between the analytic gradient of ``f`` at ``x``
    and central finite differences.

    ``x`` is promoted to float64 for the duration of the check and restored
    afterwards; gradients accumulated on other tensors reached by ``f`` are
    left for the caller to clear.
    """
    original_data = x.data
    original_grad = x.grad
    original_requires_grad = x.requires_grad
    x.data = original_data.astype(np.float64, copy=True)
    x.requires_grad = True
    try:
        x.grad = None
        out = f(x)
        if out.size != 1:
            raise DomainError("grad_check", "f must return a scalar")
        out.backward()
        analytic = np.zeros_like(x.data) if x.grad is None else np.array(x.grad, dtype=np.float64)

        numeric = np.zeros_like(x.data)
        for index in np.ndindex(*x.data.shape):
            saved = x.data[index]
            x.data[index] = saved + h
            plus = float(f(x).data)
            x.data[index] = saved - h
            minus = float(f(x).data)
            x.data[index] = saved
            numeric[index] = (plus - minus) / (2.0 * h)

        scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), REL_ERR_FLOOR)
        max_rel_err = float(np.max(np.abs(analytic - numeric) / scale)) if analytic.size else 0.0
        logger.trace("grad_check over %d coordinates: max rel err %.3e", analytic.size, max_rel_err)
        return max_rel_err
    finally:
        x.data = original_data
        x.grad = original_grad
        x.requires_grad = original_requires_grad


__all__ = ["grad_check"]
