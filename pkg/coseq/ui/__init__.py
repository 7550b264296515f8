from .console import Console, get_console

__all__ = ["Console", "get_console"]
