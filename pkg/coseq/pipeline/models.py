import copy
from dataclasses import dataclass, replace
from typing import Optional

from ..diffuser.model import DiffuserModel
from ..embedder.model import Embedder
from ..exceptions import DependencyError, DimensionError
from ..selector.head import SelectionHead


@dataclass
class ModelBundle:
    embedder: Embedder
    diffuser: DiffuserModel
    head: Optional[SelectionHead] = None

    def check_ready(self, need_head: bool = True) -> None:
        """Raise DependencyError naming the first untrained model."""
        if self.embedder is None or not self.embedder.trained:
            raise DependencyError("embedder")
        if self.diffuser is None or not self.diffuser.trained:
            raise DependencyError("diffuser")
        if need_head and (self.head is None or not self.head.trained):
            raise DependencyError("selector")
        if self.embedder.image_size != self.diffuser.image_size:
            raise DimensionError("pipeline", f"diffuser images of size {self.embedder.image_size}", self.diffuser.image_size)
        if self.diffuser.cond_dim != self.embedder.d:
            raise DimensionError("pipeline", f"diffuser conditions of size {self.embedder.d}", self.diffuser.cond_dim)
        if need_head and self.head is not None and self.head.d != self.embedder.d:
            raise DimensionError("pipeline", f"selection head of size {self.embedder.d}", self.head.d)

    def with_seeding(
        self, resume_at_source_iter: Optional[bool] = None, seed_noise_mix: Optional[float] = None
    ) -> "ModelBundle":
        """A bundle whose diffuser seeds generations differently; weights are shared.

        None keeps the loaded diffuser's setting.
        """
        changes = {
            key: value
            for key, value in (("resume_at_source_iter", resume_at_source_iter), ("seed_noise_mix", seed_noise_mix))
            if value is not None and getattr(self.diffuser.cfg, key) != value
        }
        if not changes:
            return self
        diffuser = copy.copy(self.diffuser)
        diffuser.cfg = replace(self.diffuser.cfg, **changes)
        return replace(self, diffuser=diffuser)


__all__ = ["ModelBundle"]
