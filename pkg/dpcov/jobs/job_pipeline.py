# dpcov - Differentially private covariance estimation and benchmarks.
#
# Copyright (c)   2024        The dpcov developers

# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# any later version.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

from abc import ABC, abstractmethod
from collections import deque
from colorama import Cursor, ansi
from concurrent.futures import Executor, ProcessPoolExecutor
from math import ceil
import logging
import re
import sys
import time
from typing import Optional

from dpcov.env.env import Env
from dpcov.utils.terminal import terminal_width
from dpcov.jobs.jobs import State, PipelineItem, Job, JobManager

logger = logging.getLogger(__name__)

ANSI_ESCAPE = re.compile(r"\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])")


class JobPipeline(ABC):
    """Runs given Jobs and JobManagers according to their prerequisites."""

    @abstractmethod
    def __init__(self) -> None:
        self.pipeline: list[PipelineItem] = []
        self.exit_code: int = 0
        self._tmp_lines: int = 0

    def run_jobs(self, env: Env) -> int:
        """Runs the pipeline, returns 0 or the exit code of the first failure."""
        workers = env.plan.experiment.workers
        if workers > 1:
            logger.info(f"Starting process pool with {workers} workers")
            with ProcessPoolExecutor(max_workers=workers) as executor:
                return self._run_jobs(env, executor)
        return self._run_jobs(env, None)

    def _run_jobs(self, env: Env, executor: Optional[Executor]) -> int:
        self.job_managers: deque[JobManager] = deque()
        queue: deque[PipelineItem] = deque(self.pipeline)
        self._queue = queue
        while len(queue) or len(self.job_managers):
            if not len(queue):
                # Only managers without jobs remain
                remaining = len(self.job_managers)
                self._record(self._status_update(env))
                if len(self.job_managers) == remaining and not self.exit_code:
                    raise RuntimeError("Job managers stuck without jobs to run.")
                if self.exit_code and not env.full:
                    break
                continue

            p_item = queue.popleft()
            if isinstance(p_item, JobManager):
                self.job_managers.append(p_item)
                jobs = p_item.create_jobs(env)
                if executor is not None:
                    for job in jobs:
                        job.prefetch(executor)
                queue.extendleft(reversed(jobs))
            elif isinstance(p_item, Job):
                p_item.run_job()
                p_item.finish()
            else:
                raise TypeError(
                    f"Objects in {self.__class__.__name__} should be either Job or JobManager."
                )

            if p_item.dirty:
                self._tmp_lines = 0

            self._record(self._status_update(env))
            if self.exit_code and not env.full:
                for item in queue:
                    item.cancel()
                break

        return self.exit_code

    def _record(self, code: int) -> None:
        if code and not self.exit_code:
            self.exit_code = code

    def _status_update(self, env: Env) -> int:
        """Display current progress. Return exit code of a new failure or 0."""
        self._clear_print_tmp()
        while len(self.job_managers):
            job_man = self.job_managers.popleft()
            # We are updating job_man's state with this call!
            ongoing_msg = job_man.update()
            if not env.full and job_man.any_failed():
                self._print(ongoing_msg)
                self._print(job_man.failures(), end="", file=sys.stderr)
                return job_man.failure_code()
            if job_man.state == State.failed or job_man.ready():
                self._print_tmp(ongoing_msg, env)
                self._print_active_item(job_man, env)

                job_man.dirty = False
                msg = job_man.finalize()
                if job_man.dirty:
                    self._tmp_lines = 0

                if msg:
                    self._print(msg)
                if job_man.state == State.failed:
                    self._print(job_man.failures(), end="", file=sys.stderr)
                    return job_man.failure_code()
            elif job_man.state == State.cancelled:
                self._print(ongoing_msg)
            else:
                self._print_tmp(ongoing_msg, env)
                self.job_managers.appendleft(job_man)
                break

        if len(self._queue):
            self._print_active_item(self._queue[0], env)
        return 0

    def _clear_print_tmp(self):
        for _ in range(self._tmp_lines):
            print(f"{Cursor.UP()}{ansi.clear_line()}", end="")
        self._tmp_lines = 0

    def _print_active_item(self, p_item: PipelineItem, env: Env):
        t = time.strftime("%H:%M:%S", time.localtime())
        self._print_tmp(f"Active job: {p_item.name} ({t})", env)

    def _print_tmp(self, msg, env: Env, *args, **kwargs):
        """Prints a text to be rewritten later."""
        if not env.no_jumps:
            self._tmp_lines += sum(
                max(ceil(len(re.sub(ANSI_ESCAPE, "", line)) / terminal_width), 1)
                for line in msg.split("\n")
            )
            print(str(msg), *args, **kwargs)

    def _print(self, msg, *args, **kwargs):
        """Prints a text."""
        self._clear_print_tmp()
        print(str(msg), *args, **kwargs)
