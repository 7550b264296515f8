from collections import OrderedDict
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .functional import linear
from .tensor import DEFAULT_DTYPE, ArrayLike, Param, Tensor
from ..exceptions import CheckpointFormatError, ConfigurationError, DimensionError
from ..logger import get_logger

logger = get_logger()

ACTIVATIONS = ("silu", "tanh", "relu")


class Module:
    """Base class for anything holding Params.

    Parameters are discovered from instance attributes (Params, sub-Modules and
    lists of Modules) in attribute order, which fixes the checkpoint order.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Param]]:
        for attr_name, value in vars(self).items():
            full_name = f"{prefix}{attr_name}"
            if isinstance(value, Param):
                yield full_name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(prefix=f"{full_name}.")
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(prefix=f"{full_name}.{index}.")

    def parameters(self) -> List[Param]:
        return [param for _, param in self.named_parameters()]

    def parameter_count(self) -> int:
        return sum(param.size for param in self.parameters())

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, param.data.copy()) for name, param in self.named_parameters())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(state))
        unexpected = sorted(set(state) - set(own))
        if missing or unexpected:
            raise CheckpointFormatError(
                type(self).__name__,
                f"missing {missing or 'nothing'}, unexpected {unexpected or 'nothing'}",
            )
        for name, param in own.items():
            value = np.asarray(state[name])
            if value.shape != param.shape:
                raise DimensionError(f"load {name}", param.shape, value.shape)
            param.data = value.astype(param.dtype, copy=True)
            param.zero_grad()
        logger.trace("Loaded %d parameters into %s", len(own), type(self).__name__)


class Linear(Module):
    def __init__(
        self,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        bias: bool = True,
        init_scale: float = 1.0,
        name: str = "linear",
    ) -> None:
        std = init_scale / np.sqrt(in_features)
        self.weight = Param(
            rng.normal(0.0, std, size=(in_features, out_features)).astype(DEFAULT_DTYPE),
            name=f"{name}.weight",
        )
        self.bias: Optional[Param] = (
            Param(np.zeros(out_features, dtype=DEFAULT_DTYPE), name=f"{name}.bias") if bias else None
        )

    @property
    def in_features(self) -> int:
        return self.weight.shape[0]

    @property
    def out_features(self) -> int:
        return self.weight.shape[1]

    def __call__(self, x: ArrayLike) -> Tensor:
        return linear(x, self.weight, self.bias)


def activate(x: Tensor, activation: str) -> Tensor:
    if activation == "silu":
        return x.silu()
    if activation == "tanh":
        return x.tanh()
    if activation == "relu":
        return x.relu()
    raise ConfigurationError(f"unknown activation '{activation}'")


class MLP(Module):
    """Stack of Linear layers with an activation between them (none after the last)."""

    def __init__(
        self,
        sizes: Sequence[int],
        rng: np.random.Generator,
        activation: str = "silu",
        final_init_scale: float = 1.0,
        name: str = "mlp",
    ) -> None:
        if len(sizes) < 2:
            raise ConfigurationError("an MLP needs at least an input and an output size")
        if activation not in ACTIVATIONS:
            raise ConfigurationError(f"activation must be one of {', '.join(ACTIVATIONS)}")
        self.activation = activation
        last = len(sizes) - 2
        self.layers = [
            Linear(
                sizes[i],
                sizes[i + 1],
                rng,
                init_scale=final_init_scale if i == last else 1.0,
                name=f"{name}.{i}",
            )
            for i in range(len(sizes) - 1)
        ]

    def __call__(self, x: ArrayLike) -> Tensor:
        out = x
        for index, layer in enumerate(self.layers):
            out = layer(out)
            if index < len(self.layers) - 1:
                out = activate(out, self.activation)
        return out  # type: ignore[return-value]


__all__ = ["Module", "Linear", "MLP", "activate", "ACTIVATIONS"]
