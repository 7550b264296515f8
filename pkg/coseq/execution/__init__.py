from .parallel_executor import ParallelExecutor, TaskResult, run_ordered

__all__ = ["ParallelExecutor", "TaskResult", "run_ordered"]
