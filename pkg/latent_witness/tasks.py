"""tasks.py

Multiprocessing Wrapper for Running Independent Seeded Tasks

"""
import logging
import multiprocessing
import os

from .exceptions import ValidationError

logger = logging.getLogger(__name__)


def available_workers():
    """Number of CPUs This Process May Use"""
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


class WorkerPool:
    """
    Context Manager Around multiprocessing.Pool That Runs Inline for One Worker

    Results always come back in submission order, so reductions over them do
    not depend on how many workers ran the tasks.
    """

    def __init__(self, workers=1):
        if workers is None:
            workers = available_workers()
        if int(workers) != workers or workers < 1:
            raise ValidationError(f"Worker count must be a positive integer, got {workers}")
        self.workers = int(workers)
        self._pool = None

    def __enter__(self):
        if self.workers > 1:
            logger.debug("Starting pool of %d workers", self.workers)
            self._pool = multiprocessing.Pool(processes=self.workers)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None
        return False

    def starmap(self, function, arguments):
        """Applies function to Every Argument Tuple, Preserving Order

        Parameters
        ----------
        function : callable
            Picklable (module-level) callable
        arguments : iterable
            Argument tuples, one per task

        Returns
        -------
        list
        """
        arguments = list(arguments)
        if self._pool is None:
            return [function(*argument) for argument in arguments]
        return self._pool.starmap(function, arguments)
