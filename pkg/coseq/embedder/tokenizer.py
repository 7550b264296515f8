from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..constants import MAX_TEXT_TOKENS
from ..exceptions import DomainError, VocabularyError
from ..synthio.grammar import vocabulary_tokens


def tokenize(text: str) -> List[str]:
    return text.split()


class Vocabulary:
    """Closed token set of the step grammar, mapped to row indices."""

    def __init__(self, tokens: Optional[Sequence[str]] = None) -> None:
        self.tokens: List[str] = list(tokens) if tokens is not None else vocabulary_tokens()
        if len(set(self.tokens)) != len(self.tokens):
            raise DomainError("Vocabulary", "duplicate tokens")
        self._index: Dict[str, int] = {token: i for i, token in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def ids(self, tokens: Sequence[str]) -> List[int]:
        unknown = [token for token in tokens if token not in self._index]
        if unknown:
            raise VocabularyError(unknown)
        if len(tokens) > MAX_TEXT_TOKENS:
            raise DomainError("encode_text", f"{len(tokens)} tokens exceed the limit of {MAX_TEXT_TOKENS}")
        return [self._index[token] for token in tokens]

    def bag(self, text: Union[str, Sequence[str]]) -> np.ndarray:
        """Mean-pooling weights over the vocabulary; all zeros for an empty text."""
        tokens = tokenize(text) if isinstance(text, str) else list(text)
        weights = np.zeros(len(self.tokens), dtype=np.float32)
        ids = self.ids(tokens)
        if ids:
            np.add.at(weights, ids, 1.0 / len(ids))
        return weights

    def bags(self, texts: Sequence[Union[str, Sequence[str]]]) -> np.ndarray:
        if not texts:
            return np.zeros((0, len(self.tokens)), dtype=np.float32)
        return np.stack([self.bag(text) for text in texts])


__all__ = ["Vocabulary", "tokenize"]
