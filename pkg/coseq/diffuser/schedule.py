from dataclasses import dataclass

import numpy as np

from ..config.config_schema import DiffuserConfig
from ..exceptions import DimensionError, DomainError


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """Linear beta schedule; iterations are 1-based, t = 1..T."""

    betas: np.ndarray

    def __post_init__(self) -> None:
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1 or betas.size < 1:
            raise DomainError("NoiseSchedule", "betas must be a non-empty vector")
        if np.any(betas <= 0.0) or np.any(betas >= 1.0):
            raise DomainError("NoiseSchedule", "every beta must lie in (0, 1)")
        object.__setattr__(self, "betas", betas)

    @staticmethod
    def linear(T: int, beta_start: float = 1e-4, beta_end: float = 0.02) -> "NoiseSchedule":  # pylint: disable=invalid-name
        return NoiseSchedule(np.linspace(beta_start, beta_end, T, dtype=np.float64))

    @staticmethod
    def from_config(cfg: DiffuserConfig) -> "NoiseSchedule":
        return NoiseSchedule.linear(cfg.T, cfg.beta_start, cfg.beta_end)

    @property
    def T(self) -> int:  # pylint: disable=invalid-name
        return int(self.betas.size)

    @property
    def alphas(self) -> np.ndarray:
        return 1.0 - self.betas

    @property
    def alpha_bars(self) -> np.ndarray:
        return np.cumprod(self.alphas)

    def check_iteration(self, t: int, operation: str) -> None:
        if not 1 <= t <= self.T:
            raise DomainError(operation, f"iteration {t} outside 1..{self.T}")

    def beta(self, t: int) -> float:
        self.check_iteration(t, "beta")
        return float(self.betas[t - 1])

    def alpha_bar(self, t: int) -> float:
        """Cumulative product up to iteration t; alpha_bar(0) is 1."""
        if t == 0:
            return 1.0
        self.check_iteration(t, "alpha_bar")
        return float(self.alpha_bars[t - 1])

    def posterior_variance(self, t: int) -> float:
        return self.beta(t) * (1.0 - self.alpha_bar(t - 1)) / (1.0 - self.alpha_bar(t))


def forward_noise(schedule: NoiseSchedule, x0: np.ndarray, t: int, eps: np.ndarray) -> np.ndarray:
    """z_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps."""
    schedule.check_iteration(t, "forward_noise")
    x0 = np.asarray(x0)
    eps = np.asarray(eps)
    if x0.shape != eps.shape:
        raise DimensionError("forward_noise", x0.shape, eps.shape)
    alpha_bar = schedule.alpha_bar(t)
    z = np.sqrt(alpha_bar) * x0.astype(np.float64) + np.sqrt(1.0 - alpha_bar) * eps.astype(np.float64)
    return z.astype(np.float32)


def forward_noise_batch(
    schedule: NoiseSchedule, x0: np.ndarray, t: np.ndarray, eps: np.ndarray
) -> np.ndarray:
    """Row-wise forward_noise for a batch with one iteration per row."""
    t = np.asarray(t, dtype=np.int64)
    if np.any(t < 1) or np.any(t > schedule.T):
        raise DomainError("forward_noise", f"iterations must lie in 1..{schedule.T}")
    if x0.shape != eps.shape or x0.shape[0] != t.shape[0]:
        raise DimensionError("forward_noise", x0.shape, eps.shape)
    alpha_bar = schedule.alpha_bars[t - 1].reshape((-1,) + (1,) * (x0.ndim - 1))
    z = np.sqrt(alpha_bar) * x0.astype(np.float64) + np.sqrt(1.0 - alpha_bar) * eps.astype(np.float64)
    return z.astype(np.float32)


__all__ = ["NoiseSchedule", "forward_noise", "forward_noise_batch"]
