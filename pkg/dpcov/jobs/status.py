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

from dpcov.utils.text import tab, pad
from dpcov.utils.terminal import MSG_LEN, TARGET_LINE_WIDTH, terminal_width
from dpcov.jobs.jobs import State, PipelineItem, JobManager

BAR_WIDTH = 30
SHOWN_FAILURES = 3
line_separator = "⎯" * min(terminal_width, TARGET_LINE_WIDTH) + "\n"


class StatusJobManager(JobManager):
    """JobManager that draws its progress as a bar followed by a short note."""

    def _note(self) -> str:
        """Text shown right of the bar."""
        return ""

    def _bar(self, part: int, full: int, color: str) -> str:
        filled = BAR_WIDTH * part // full
        bar = self._colored(filled * "━", color) + self._colored(
            (BAR_WIDTH - filled) * "━", "white"
        )
        line = f"{pad(self.name, MSG_LEN - 1)} {bar}  ({part}/{full})"
        if note := self._note():
            line += f"  {note}"
        return line

    def _get_status(self) -> str:
        if self.state == State.cancelled:
            return f"{pad(self.name, MSG_LEN - 1)} {self._colored('cancelled', 'yellow')}"

        color = "cyan"
        if self.state == State.succeeded:
            color = "green"
        elif self.state == State.failed or State.failed in self._job_states():
            color = "red"
        done = len(self._jobs_with_state(State.succeeded))
        return self._bar(
            done + (self.state == State.succeeded), len(self.jobs) + 1, color
        )

    @staticmethod
    def _fail_message(pitem: PipelineItem) -> str:
        return f'"{pitem.name}" failed:\n{tab(pitem.fail_msg)}\n'

    def failures(self) -> str:
        """Failures of the first few failed jobs and of the manager itself."""
        failed = self._jobs_with_state(State.failed)
        fails = [self._fail_message(job) for job in failed[:SHOWN_FAILURES]]
        if len(failed) > SHOWN_FAILURES:
            fails.append(f"... and {len(failed) - SHOWN_FAILURES} more failed jobs\n")
        if self.fail_msg != "":
            fails.append(self._fail_message(self))

        msg = line_separator + line_separator.join(fails) + line_separator
        return self._colored(msg, "red")
