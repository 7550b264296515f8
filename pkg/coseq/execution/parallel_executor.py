from concurrent.futures import ThreadPoolExecutor, as_completed, Future
from typing import List, Callable, TypeVar, Generic, Dict, Optional
import time

from ..logger import get_logger

logger = get_logger()

T = TypeVar("T")


class TaskResult(Generic[T]):
    def __init__(
        self,
        task_id: str,
        success: bool,
        result: Optional[T],
        duration_ms: float,
        error: Optional[Exception] = None,
    ) -> None:
        self.task_id = task_id
        self.success = success
        self.result = result
        self.duration_ms = duration_ms
        self.error = error


class ParallelExecutor:
    """Runs independent jobs on a thread pool.

    Results come back in submission order whatever the completion order, so a
    parallel run yields the same sequence as a serial one.
    """

    def __init__(self, max_workers: int = 4) -> None:
        self.max_workers = max_workers
        logger.trace("ParallelExecutor initialized with max_workers: %d", max_workers)

    def execute_tasks(
        self,
        tasks: Dict[str, Callable[[], T]],
        show_progress: bool = True,
        description: str = "Running",
    ) -> List[TaskResult[T]]:
        logger.debug("Executing %d jobs with %d workers", len(tasks), self.max_workers)

        if not tasks:
            logger.trace("No jobs to execute")
            return []

        results: Dict[str, TaskResult[T]] = {}

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_id: Dict[Future, str] = {}
            start_times: Dict[str, float] = {}

            for task_id, task_func in tasks.items():
                logger.trace("Submitting job: %s", task_id)
                start_times[task_id] = time.time()
                future = executor.submit(self._execute_task, task_id, task_func)
                future_to_id[future] = task_id

            progress_bar = None
            if show_progress:
                try:
                    from tqdm import tqdm

                    progress_bar = tqdm(total=len(tasks), desc=description, unit="job")
                except ImportError:
                    logger.trace("tqdm not available, skipping progress bar")

            for future in as_completed(future_to_id):
                task_id = future_to_id[future]
                duration_ms = (time.time() - start_times[task_id]) * 1000
                try:
                    results[task_id] = TaskResult(
                        task_id=task_id,
                        success=True,
                        result=future.result(),
                        duration_ms=duration_ms,
                    )
                    logger.trace("Job '%s' completed (%.2fms)", task_id, duration_ms)
                except Exception as e:  # pylint: disable=broad-exception-caught
                    logger.error("Job '%s' failed: %s", task_id, e)
                    logger.trace("Exception details: %s", e, exc_info=True)
                    results[task_id] = TaskResult(
                        task_id=task_id,
                        success=False,
                        result=None,
                        duration_ms=duration_ms,
                        error=e,
                    )

                if progress_bar is not None:
                    progress_bar.update(1)

            if progress_bar is not None:
                progress_bar.close()

        ordered = [results[task_id] for task_id in tasks]
        successful = sum(1 for r in ordered if r.success)
        logger.debug("Parallel execution complete: %d/%d jobs successful", successful, len(ordered))
        return ordered

    def _execute_task(self, task_id: str, task_func: Callable[[], T]) -> T:
        logger.trace("Executing job: %s", task_id)
        return task_func()


def run_ordered(
    jobs: Dict[str, Callable[[], T]],
    parallel: bool,
    max_workers: int = 4,
    show_progress: bool = False,
    description: str = "Running",
) -> List[T]:
    """Run ``jobs`` serially or on the pool and return their results in order,
    re-raising the first failure."""
    if not parallel:
        return [job() for job in jobs.values()]
    results = ParallelExecutor(max_workers).execute_tasks(jobs, show_progress, description)
    for result in results:
        if not result.success:
            raise result.error  # type: ignore[misc]
    return [result.result for result in results]  # type: ignore[misc]


__all__ = ["ParallelExecutor", "TaskResult", "run_ordered"]
