from .contextualizer import contextualize, contextualize_task

__all__ = ["contextualize", "contextualize_task"]
