"""
Worker queue for independent per-m solves.
"""

from dataclasses import dataclass
from enum import Enum
from queue import Empty, Queue
from typing import Any, Callable, Dict, List, Optional
import logging
import threading
import time

logger = logging.getLogger(__name__)


class JobStatus(Enum):
    """Status of a solve job."""
    PENDING = "pending"
    PROCESSING = "processing"
    COMPLETED = "completed"
    FAILED = "failed"
    CANCELLED = "cancelled"


@dataclass
class SweepJob:
    """One m entry of a sweep."""
    id: str
    m: float
    status: JobStatus = JobStatus.PENDING
    result: Optional[Any] = None
    error: Optional[str] = None
    start_time: Optional[float] = None
    end_time: Optional[float] = None

    @property
    def elapsed(self) -> Optional[float]:
        if self.start_time is None or self.end_time is None:
            return None
        return self.end_time - self.start_time


class SweepQueue:
    """Runs solve jobs for several m values on worker threads."""

    def __init__(self, solve: Callable[[float], Any], num_workers: int = 2):
        """
        Initialize the queue.

        Args:
            solve: Function solving the problem for one m
            num_workers: Number of concurrent workers
        """
        self.solve = solve
        self.num_workers = num_workers

        self.jobs: Dict[str, SweepJob] = {}
        self.queue: Queue = Queue()
        self.workers: List[threading.Thread] = []
        self.running = False
        self.job_counter = 0

        self._lock = threading.Lock()

    def add_job(self, m: float) -> str:
        """
        Add a solve for one m.

        Returns:
            Job ID
        """
        with self._lock:
            job_id = f"job_{self.job_counter:04d}"
            self.job_counter += 1
            self.jobs[job_id] = SweepJob(id=job_id, m=float(m))
        self.queue.put(job_id)
        logger.debug(f"Added job {job_id}: m={m:g}")
        return job_id

    def start(self) -> None:
        """Start the workers."""
        if self.running:
            logger.warning("Queue is already running")
            return
        self.running = True
        for i in range(self.num_workers):
            worker = threading.Thread(target=self._worker, args=(i,), daemon=True)
            worker.start()
            self.workers.append(worker)
        logger.info(f"Started sweep queue with {self.num_workers} workers")

    def wait(self) -> None:
        """Block until every queued job has been handled."""
        self.queue.join()

    def stop(self) -> None:
        """Stop the workers."""
        self.running = False
        for worker in self.workers:
            worker.join(timeout=5.0)
        self.workers.clear()
        logger.info("Stopped sweep queue")

    def _worker(self, worker_id: int) -> None:
        while self.running:
            try:
                job_id = self.queue.get(timeout=0.1)
            except Empty:
                continue
            try:
                with self._lock:
                    job = self.jobs.get(job_id)
                if job is not None and job.status == JobStatus.PENDING:
                    self._process_job(job, worker_id)
            finally:
                self.queue.task_done()

    def _process_job(self, job: SweepJob, worker_id: int) -> None:
        logger.info(f"Worker {worker_id} solving m={job.m:g}")
        with self._lock:
            job.status = JobStatus.PROCESSING
            job.start_time = time.time()
        try:
            result = self.solve(job.m)
            with self._lock:
                job.result = result
                job.status = JobStatus.COMPLETED
                job.end_time = time.time()
        except Exception as e:
            logger.error(f"Job {job.id} (m={job.m:g}) failed: {e}")
            with self._lock:
                job.status = JobStatus.FAILED
                job.error = str(e)
                job.end_time = time.time()

    def get_job_status(self, job_id: str) -> Optional[SweepJob]:
        with self._lock:
            return self.jobs.get(job_id)

    def get_all_jobs(self) -> List[SweepJob]:
        """Jobs in submission order."""
        with self._lock:
            return list(self.jobs.values())

    def cancel_job(self, job_id: str) -> bool:
        """
        Cancel a pending job.

        Returns:
            True if cancelled, False otherwise
        """
        with self._lock:
            job = self.jobs.get(job_id)
            if job is not None and job.status == JobStatus.PENDING:
                job.status = JobStatus.CANCELLED
                return True
        return False
