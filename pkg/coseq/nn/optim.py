from typing import Sequence

import numpy as np

from .tensor import Param
from ..config.config_schema import OptimConfig
from ..exceptions import NonFiniteGradientError
from ..logger import get_logger

logger = get_logger()


def adam_step(params: Sequence[Param], cfg: OptimConfig) -> None:
    """One bias-corrected Adam update, then zero every gradient.

    All gradients are checked before any parameter moves, so a non-finite
    gradient leaves the whole model untouched.
    """
    for param in params:
        if param.grad is None:
            continue
        bad = int(np.size(param.grad) - np.count_nonzero(np.isfinite(param.grad)))
        if bad:
            logger.error("Gradient of '%s' has %d non-finite entries", param.name, bad)
            raise NonFiniteGradientError(param.name or "param", bad)

    for param in params:
        grad = (
            np.zeros_like(param.data)
            if param.grad is None
            else param.grad.astype(param.dtype, copy=False)
        )
        param.step_count += 1
        param.adam_m = cfg.beta1 * param.adam_m + (1.0 - cfg.beta1) * grad
        param.adam_v = cfg.beta2 * param.adam_v + (1.0 - cfg.beta2) * grad * grad
        m_hat = param.adam_m / (1.0 - cfg.beta1 ** param.step_count)
        v_hat = param.adam_v / (1.0 - cfg.beta2 ** param.step_count)
        update = cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        param.data = (param.data - update).astype(param.dtype, copy=False)
        param.zero_grad()


def zero_grad(params: Sequence[Param]) -> None:
    for param in params:
        param.zero_grad()


__all__ = ["adam_step", "zero_grad"]
