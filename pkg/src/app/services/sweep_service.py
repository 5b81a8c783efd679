import asyncio
import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

import psutil

from src.app import __version__
from src.app.config.settings import settings
from src.app.models.sweep import PointResult, RunRecord, SweepSpec
from src.app.services.tasks import grid_points, prepare_context, run_point

log = logging.getLogger(__name__)


def default_threads() -> int:
    threads = settings.development.THREADS or psutil.cpu_count(logical=False) or 1
    return max(1, int(threads))


def spec_hash(spec: SweepSpec) -> str:
    """sha256 of the canonical JSON form of a SweepSpec."""
    canonical = json.dumps(spec.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class SweepService:
    """Runs the grid points of a sweep on a bounded thread pool.

    Points are independent; results are gathered in grid order, so the record
    does not depend on the schedule.
    """

    def __init__(self, threads: int = 0) -> None:
        self.threads = threads or default_threads()
        self.executor: Optional[ThreadPoolExecutor] = ThreadPoolExecutor(
            max_workers=self.threads, thread_name_prefix="sweep"
        )

    def cleanup(self) -> None:
        """Shut down the worker pool."""
        if self.executor is not None:
            log.debug("Shutting down sweep thread pool")
            self.executor.shutdown(wait=True, cancel_futures=True)
            self.executor = None

    async def run_sweep_async(
        self, spec: SweepSpec, out: Optional[Path] = None
    ) -> RunRecord:
        if self.executor is None:
            raise RuntimeError("SweepService has been shut down")
        started = time.perf_counter()
        points = grid_points(spec)
        log.info(
            f"Running {spec.task.value} sweep: {len(points)} points "
            f"on {self.threads} threads"
        )

        loop = asyncio.get_running_loop()
        ctx = await loop.run_in_executor(self.executor, prepare_context, spec, out)
        results: List[PointResult] = list(
            await asyncio.gather(
                *(
                    loop.run_in_executor(self.executor, run_point, ctx, point)
                    for point in points
                )
            )
        )

        record = RunRecord(
            spec_hash=spec_hash(spec),
            task=spec.task,
            points=results,
            wall_time=time.perf_counter() - started,
            version=__version__,
        )
        log.info(f"Sweep finished in {record.wall_time:.2f} s")
        return record


def run_sweep(
    spec: SweepSpec, threads: int = 0, out: Optional[Path] = None
) -> RunRecord:
    """Blocking wrapper around SweepService.run_sweep_async."""
    service = SweepService(threads)
    try:
        return asyncio.run(service.run_sweep_async(spec, out))
    finally:
        service.cleanup()
