import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tblib import pickling_support

from ergokit.exceptions import ConfigError
from ergokit.logging import logger

T = TypeVar("T")
JOBS_ENV = "ERGOKIT_JOBS"


@pickling_support.install
class WorkerFailure(Exception):
    """Exception raised by `fn` on one item of a parallel sweep

    Returned by the worker in place of a result so that the
    parent can name the failing item and raise the original
    exception with the traceback it had in the worker.
    """

    def __init__(self, index: int, item, exc: Exception) -> None:
        self.index = index
        self.item = item
        self.exc = exc
        self.tb = exc.__traceback__
        super().__init__(index, item, exc)

    def __str__(self):
        return "Item {} ({}) failed with {}: {}".format(
            self.index, repr(self.item), type(self.exc).__name__, self.exc
        )

    def reraise(self) -> None:
        logger.debug(str(self))
        raise self.exc.with_traceback(self.tb)


def resolve_jobs(jobs: Optional[int] = None) -> int:
    """Number of worker processes, falling back to $ERGOKIT_JOBS"""

    if jobs is None:
        value = os.environ.get(JOBS_ENV)
        if value is None:
            return 1
        try:
            jobs = int(value)
        except ValueError:
            raise ConfigError(f"{JOBS_ENV}='{value}' is not an integer")

    if jobs < 1:
        raise ConfigError(f"Number of jobs must be positive, got {jobs}")
    return jobs


def _call(fn: Callable[..., T], index: int, item) -> T:
    try:
        return fn(item)
    except Exception as e:
        return WorkerFailure(index, item, e)


def map_ordered(
    fn: Callable[..., T], items: Iterable, jobs: Optional[int] = None
) -> List[T]:
    """Apply `fn` to every item, keeping the input order

    Runs serially for a single job. Otherwise `fn` and the
    items must be picklable, and the first failing item's
    exception is re-raised with its worker traceback.
    """

    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(items) < 2:
        return [fn(item) for item in items]

    jobs = min(jobs, len(items))
    logger.debug(f"Mapping {len(items)} items over {jobs} processes")
    with ProcessPoolExecutor(jobs) as executor:
        results = list(executor.map(
            _call, [fn] * len(items), range(len(items)), items
        ))

    for result in results:
        if isinstance(result, WorkerFailure):
            result.reraise()
    return results
