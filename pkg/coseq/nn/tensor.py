import threading
from contextlib import contextmanager
from typing import Any, Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionError, DomainError
from ..logger import get_logger

logger = get_logger()

DEFAULT_DTYPE = np.float32

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[Any]]

_grad_mode = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_grad_mode, "enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Record no graph inside the block (per thread)."""
    previous = is_grad_enabled()
    _grad_mode.enabled = False
    try:
        yield
    finally:
        _grad_mode.enabled = previous


def _as_array(data: Any, dtype: Optional[Any] = None) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return data.astype(dtype or DEFAULT_DTYPE, copy=False)
    return np.asarray(data, dtype=dtype or DEFAULT_DTYPE)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if grad.ndim < len(shape):
        grad = grad.reshape((1,) * (len(shape) - grad.ndim) + grad.shape)
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """Dense array with reverse-mode gradients.

    Each op records its parents and a closure that pushes the upstream
    gradient back to them. Nothing is recorded when no input requires grad,
    so inference paths build no graph.
    """

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        name: Optional[str] = None,
        dtype: Optional[Any] = None,
    ) -> None:
        self.data: np.ndarray = _as_array(data, dtype)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[Callable[[np.ndarray], None]] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise DomainError("item", f"tensor of shape {self.shape} is not a scalar")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy(), dtype=self.dtype)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = f", name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{label})"

    def __len__(self) -> int:
        return self.shape[0]

    def _lift(self, other: ArrayLike) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        # python scalars follow this tensor's dtype
        return Tensor(other, dtype=self.dtype)

    @staticmethod
    def _make(
        operation: str,
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward: Callable[[np.ndarray], None],
    ) -> "Tensor":
        if not np.all(np.isfinite(data)):
            raise DomainError(operation, "non-finite values in result")
        out = Tensor(data, dtype=data.dtype)
        if is_grad_enabled() and any(parent.requires_grad for parent in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def _accumulate(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        grad = _unbroadcast(grad, self.shape)
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.dtype, copy=True)
        else:
            self.grad = self.grad + grad

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        if grad is None:
            if self.size != 1:
                raise DomainError("backward", "an upstream gradient is required for non-scalar outputs")
            grad = np.ones_like(self.data)
        order = self._topological_order()
        logger.trace("Backward pass over %d nodes", len(order))
        upstream = {id(self): np.asarray(grad, dtype=self.dtype)}
        for node in reversed(order):
            node_grad = upstream.pop(id(node), None)
            if node_grad is None:
                continue
            if node._backward is None:
                node._accumulate(node_grad)
                continue
            node._pending = upstream  # type: ignore[attr-defined]
            node._backward(node_grad)
            del node._pending  # type: ignore[attr-defined]

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited and parent.requires_grad:
                    stack.append((parent, False))
        return order

    def _send(self, parent: "Tensor", grad: np.ndarray) -> None:
        if not parent.requires_grad:
            return
        grad = _unbroadcast(grad, parent.shape)
        pending = self._pending  # type: ignore[attr-defined]
        key = id(parent)
        pending[key] = grad if key not in pending else pending[key] + grad

    def __add__(self, other: ArrayLike) -> "Tensor":
        other = self._lift(other)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad)
            out._send(other, grad)

        out = Tensor._make("add", self.data + other.data, (self, other), backward)
        return out

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return self.__add__(other)

    def __neg__(self) -> "Tensor":
        def backward(grad: np.ndarray) -> None:
            out._send(self, -grad)

        out = Tensor._make("neg", -self.data, (self,), backward)
        return out

    def __sub__(self, other: ArrayLike) -> "Tensor":
        other = self._lift(other)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad)
            out._send(other, -grad)

        out = Tensor._make("sub", self.data - other.data, (self, other), backward)
        return out

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return self._lift(other).__sub__(self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        other = self._lift(other)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * other.data)
            out._send(other, grad * self.data)

        out = Tensor._make("mul", self.data * other.data, (self, other), backward)
        return out

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return self.__mul__(other)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        other = self._lift(other)
        if np.any(other.data == 0):
            raise DomainError("div", "division by zero")

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad / other.data)
            out._send(other, -grad * self.data / (other.data * other.data))

        out = Tensor._make("div", self.data / other.data, (self, other), backward)
        return out

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return self._lift(other).__truediv__(self)

    def __pow__(self, exponent: float) -> "Tensor":
        if not isinstance(exponent, (int, float)):
            raise DomainError("pow", "only scalar exponents are supported")
        if not float(exponent).is_integer() and np.any(self.data < 0):
            raise DomainError("pow", "fractional power of a negative value")
        if exponent < 0 and np.any(self.data == 0):
            raise DomainError("pow", "negative power of zero")

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * exponent * self.data ** (exponent - 1))

        out = Tensor._make("pow", self.data ** exponent, (self,), backward)
        return out

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        other = self._lift(other)
        if self.ndim not in (1, 2) or other.ndim not in (1, 2):
            raise DimensionError("matmul", "1-D or 2-D operands", (self.shape, other.shape))
        if self.shape[-1] != other.shape[0]:
            raise DimensionError("matmul", f"(..., {self.shape[-1]}) @ ({self.shape[-1]}, ...)", (self.shape, other.shape))

        left = self.data if self.ndim == 2 else self.data[None, :]
        right = other.data if other.ndim == 2 else other.data[:, None]

        def backward(grad: np.ndarray) -> None:
            grad2 = grad.reshape(left.shape[0], right.shape[1])
            out._send(self, (grad2 @ right.T).reshape(self.shape))
            out._send(other, (left.T @ grad2).reshape(other.shape))

        out = Tensor._make("matmul", self.data @ other.data, (self, other), backward)
        return out

    def exp(self) -> "Tensor":
        result = np.exp(self.data)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * result)

        out = Tensor._make("exp", result, (self,), backward)
        return out

    def log(self) -> "Tensor":
        if np.any(self.data <= 0):
            raise DomainError("log", "logarithm of a non-positive value")

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad / self.data)

        out = Tensor._make("log", np.log(self.data), (self,), backward)
        return out

    def tanh(self) -> "Tensor":
        result = np.tanh(self.data)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * (1.0 - result * result))

        out = Tensor._make("tanh", result, (self,), backward)
        return out

    def sigmoid(self) -> "Tensor":
        result = _stable_sigmoid(self.data)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * result * (1.0 - result))

        out = Tensor._make("sigmoid", result, (self,), backward)
        return out

    def silu(self) -> "Tensor":
        gate = _stable_sigmoid(self.data)

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * (gate + self.data * gate * (1.0 - gate)))

        out = Tensor._make("silu", self.data * gate, (self,), backward)
        return out

    def relu(self) -> "Tensor":
        mask = self.data > 0

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad * mask)

        out = Tensor._make("relu", self.data * mask, (self,), backward)
        return out

    def sum(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> "Tensor":
        def backward(grad: np.ndarray) -> None:
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            out._send(self, np.broadcast_to(grad, self.shape))

        out = Tensor._make("sum", self.data.sum(axis=axis, keepdims=keepdims), (self,), backward)
        return out

    def mean(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> "Tensor":
        if self.size == 0:
            raise DomainError("mean", "mean of an empty tensor")
        if axis is None:
            count = self.size
        else:
            axes = (axis,) if isinstance(axis, int) else axis
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def reshape(self, *shape: Any) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        try:
            result = self.data.reshape(shape)
        except ValueError as e:
            raise DimensionError("reshape", shape, self.shape) from e

        def backward(grad: np.ndarray) -> None:
            out._send(self, grad.reshape(self.shape))

        out = Tensor._make("reshape", result, (self,), backward)
        return out

    def transpose(self) -> "Tensor":
        def backward(grad: np.ndarray) -> None:
            out._send(self, grad.T)

        out = Tensor._make("transpose", self.data.T, (self,), backward)
        return out

    @property
    def T(self) -> "Tensor":  # pylint: disable=invalid-name
        return self.transpose()

    def __getitem__(self, index: Any) -> "Tensor":
        result = self.data[index]

        def backward(grad: np.ndarray) -> None:
            full = np.zeros_like(self.data, dtype=grad.dtype)
            np.add.at(full, index, grad)
            out._send(self, full)

        out = Tensor._make("getitem", np.array(result, copy=True), (self,), backward)
        return out


def _stable_sigmoid(values: np.ndarray) -> np.ndarray:
    result = np.empty_like(values)
    positive = values >= 0
    result[positive] = 1.0 / (1.0 + np.exp(-values[positive]))
    exp_values = np.exp(values[~positive])
    result[~positive] = exp_values / (1.0 + exp_values)
    return result


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise DomainError("concat", "nothing to concatenate")
    arrays = [t.data for t in tensors]
    try:
        result = np.concatenate(arrays, axis=axis)
    except ValueError as e:
        raise DimensionError("concat", "matching non-concatenated dims", [t.shape for t in tensors]) from e
    sizes = [a.shape[axis] for a in arrays]
    splits = np.cumsum(sizes)[:-1]

    def backward(grad: np.ndarray) -> None:
        for tensor, piece in zip(tensors, np.split(grad, splits, axis=axis)):
            out._send(tensor, piece)

    out = Tensor._make("concat", result, tuple(tensors), backward)
    return out


def as_tensor(value: ArrayLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


class Param(Tensor):
    """Trainable tensor carrying its Adam state."""

    def __init__(self, value: Any, name: str = "param") -> None:
        super().__init__(np.array(_as_array(value), copy=True), requires_grad=True, name=name)
        self.grad = np.zeros_like(self.data)
        self.adam_m = np.zeros_like(self.data)
        self.adam_v = np.zeros_like(self.data)
        self.step_count = 0

    @property
    def value(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        return f"Param(name={self.name}, shape={self.shape}, steps={self.step_count})"


__all__ = ["Tensor", "Param", "concat", "as_tensor", "no_grad", "is_grad_enabled", "DEFAULT_DTYPE"]
