import multiprocessing as mp
import sys
import time
from threading import Thread


class TaskWatcher(object):
    #: seconds between two progress updates
    interval = 0.2

    def __init__(self, print_prefix="Performing task...", quiet=False):
        """Progress of replicates or pairs on stderr

        The tracked library function receives :attr:`count` and
        :attr:`max_count` (:class:`multiprocessing.Value`). It
        increments `max_count` by the number of work items first
        and `count` by one per finished item.

        Parameters
        ----------
        print_prefix: str
            Text printed in front of the progress
        quiet: bool
            Do not print anything; the counters are still available
            to the tracked function.
        """
        self.print_prefix = print_prefix
        self.quiet = quiet
        self.count = mp.Value("I", 0, lock=True)
        self.max_count = mp.Value("I", 0, lock=True)
        self.abort = mp.Value("I", 0, lock=True)
        self.t0 = None
        self.thread = Thread(target=self._watch, daemon=True)

    def __enter__(self):
        self.t0 = time.perf_counter()
        if not self.quiet:
            self.thread.start()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.abort.value = 1
        if not self.quiet:
            self.thread.join(timeout=2 * self.interval)
            if exc_type is not None:
                # keep the last progress line visible above the traceback
                print("", file=sys.stderr, flush=True)
        if exc_type is not None:
            return
        if not self.quiet:
            print("{}done ({:.1f}s)".format(self.print_prefix, self.elapsed),
                  file=sys.stderr, flush=True)
        total = self.max_count.value
        if total and total != self.count.value:
            raise ValueError(
                "`count`={} did not count to `max_count`={}".format(
                    self.count.value, total))

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0

    def progress(self):
        """Current progress as text, e.g. '120/400 (30.0%)'"""
        done, total = self.count.value, self.max_count.value
        if total == 0:
            return "..."
        return "{}/{} ({:.1f}%)".format(done, total, done / total * 100)

    def _watch(self):
        while not self.abort.value:
            print("\r" + self.print_prefix + self.progress(), end="",
                  file=sys.stderr, flush=True)
            time.sleep(self.interval)
        # clear the progress line
        print("\r" + " " * (len(self.print_prefix) + 24) + "\r", end="",
              file=sys.stderr, flush=True)
