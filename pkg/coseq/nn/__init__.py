from .tensor import Tensor, Param, concat, as_tensor, no_grad
from .functional import (
    linear,
    softmax,
    cross_entropy,
    softmax_cross_entropy,
    mse,
    normalize,
    l2_normalize,
)
from .layers import Module, Linear, MLP
from .optim import adam_step, zero_grad
from .gradcheck import grad_check
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "Tensor",
    "Param",
    "concat",
    "as_tensor",
    "no_grad",
    "linear",
    "softmax",
    "cross_entropy",
    "softmax_cross_entropy",
    "mse",
    "normalize",
    "l2_normalize",
    "Module",
    "Linear",
    "MLP",
    "adam_step",
    "zero_grad",
    "grad_check",
    "save_checkpoint",
    "load_checkpoint",
]
