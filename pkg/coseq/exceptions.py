from typing import Optional, Sequence


class CoseqException(Exception):
    pass


class DimensionError(CoseqException):
    def __init__(self, operation: str, expected: object, got: object) -> None:
        self.operation = operation
        self.expected = expected
        self.got = got
        super().__init__(f"{operation}: expected shape {expected}, got {got}")


class DomainError(CoseqException):
    def __init__(self, operation: str, reason: str) -> None:
        self.operation = operation
        self.reason = reason
        super().__init__(f"{operation}: {reason}")


class ConfigurationError(CoseqException, ValueError):
    def __init__(self, message: str) -> None:
        self.message_text = message
        super().__init__(f"Configuration error: {message}")


class VocabularyError(CoseqException):
    def __init__(self, tokens: Sequence[str]) -> None:
        self.tokens = list(tokens)
        super().__init__(f"Out-of-vocabulary tokens: {', '.join(self.tokens)}")


class UnresolvedReference(CoseqException):
    def __init__(self, expression: str, text: str, reason: Optional[str] = None) -> None:
        self.expression = expression
        self.text = text
        self.reason = reason
        detail = f" ({reason})" if reason else ""
        super().__init__(f"Cannot resolve '{expression}' in '{text}'{detail}")


class DependencyError(CoseqException):
    def __init__(self, module_name: str, reason: str = "model is untrained") -> None:
        self.module_name = module_name
        self.reason = reason
        super().__init__(f"Dependency '{module_name}' unavailable: {reason}")


class StateError(CoseqException):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class NonFiniteGradientError(CoseqException):
    def __init__(self, param_name: str, bad_count: int) -> None:
        self.param_name = param_name
        self.bad_count = bad_count
        super().__init__(
            f"Non-finite gradient in parameter '{param_name}' ({bad_count} entries)"
        )


class CheckpointFormatError(CoseqException):
    def __init__(self, path: object, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(f"Invalid checkpoint '{path}': {reason}")


class CorpusFormatError(CoseqException):
    def __init__(self, path: object, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(f"Invalid corpus at '{path}': {reason}")


class TraceFormatError(CoseqException):
    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(f"Invalid generation trace: {reason}")


__all__ = [
    "CoseqException",
    "DimensionError",
    "DomainError",
    "ConfigurationError",
    "VocabularyError",
    "UnresolvedReference",
    "DependencyError",
    "StateError",
    "NonFiniteGradientError",
    "CheckpointFormatError",
    "CorpusFormatError",
    "TraceFormatError",
]
