"""Finite-domain store, propagation loop, and depth-first search.

Variables hold small integer domains.  Propagators subscribe to variables and
are woken on any domain change; a two-priority FIFO queue (cheap counting
propagators first) runs them to a fixpoint.  Changes are trailed so search can
backtrack without copying the store.
"""

from __future__ import annotations

import time
from collections import deque


class Inconsistent(Exception):
    """A domain became empty or a propagator proved failure."""


class Domain:
    """Set of candidate integers, optionally bounds-consistency only.

    A bc domain ignores removals strictly inside its hull: only updates that
    move a bound (or empty the domain) take effect.  This mirrors solvers that
    treat some variables (counters, totals) as intervals.
    """

    __slots__ = ("values", "bc")

    def __init__(self, values, bc=False):
        self.values = set(values)
        self.bc = bc
        if not self.values:
            raise Inconsistent("empty initial domain")

    def __len__(self):
        return len(self.values)

    def __contains__(self, v):
        return v in self.values

    def min(self):
        return min(self.values)

    def max(self):
        return max(self.values)

    def is_fixed(self):
        return len(self.values) == 1

    def value(self):
        (v,) = self.values
        return v


class Store:
    """Variable store with trailing and two-priority propagation queues."""

    def __init__(self):
        self.domains: list[Domain] = []
        self.names: list[str] = []
        self._watchers: list[list] = []
        self._trail: list[tuple[int, frozenset]] = []
        self._marks: list[int] = []
        self._queue = [deque(), deque()]
        self._queued = set()
        self._running = None
        self.propagation_count = 0

    # -- variables ---------------------------------------------------------

    def new_var(self, values, name="", bc=False):
        vid = len(self.domains)
        self.domains.append(Domain(values, bc=bc))
        self.names.append(name or f"v{vid}")
        self._watchers.append([])
        return vid

    def dom(self, vid):
        return self.domains[vid].values

    def vmin(self, vid):
        return self.domains[vid].min()

    def vmax(self, vid):
        return self.domains[vid].max()

    def is_fixed(self, vid):
        return self.domains[vid].is_fixed()

    def value(self, vid):
        return self.domains[vid].value()

    def watch(self, vid, prop):
        self._watchers[vid].append(prop)

    # -- domain operations (trail + wake) ------------------------------------

    def _commit(self, vid, new_values):
        dom = self.domains[vid]
        removed = dom.values - new_values
        if not removed:
            return False
        if not new_values:
            raise Inconsistent(self.names[vid])
        self._trail.append((vid, frozenset(removed)))
        dom.values = new_values
        for prop in self._watchers[vid]:
            if prop is not self._running:
                self.enqueue(prop)
        return True

    def keep_values(self, vid, allowed):
        """Restrict a variable to the given value set."""
        dom = self.domains[vid]
        new_values = dom.values & set(allowed)
        if dom.bc and new_values:
            lo, hi = min(new_values), max(new_values)
            new_values = {v for v in dom.values if lo <= v <= hi}
        return self._commit(vid, new_values)

    def remove_value(self, vid, v):
        dom = self.domains[vid]
        if v not in dom.values:
            return False
        if dom.bc and dom.min() < v < dom.max():
            return False
        return self._commit(vid, dom.values - {v})

    def assign(self, vid, v):
        if v not in self.domains[vid].values:
            raise Inconsistent(self.names[vid])
        return self._commit(vid, {v})

    def set_min(self, vid, lo):
        dom = self.domains[vid]
        if lo <= dom.min():
            return False
        return self._commit(vid, {v for v in dom.values if v >= lo})

    def set_max(self, vid, hi):
        dom = self.domains[vid]
        if hi >= dom.max():
            return False
        return self._commit(vid, {v for v in dom.values if v <= hi})

    # -- trail ---------------------------------------------------------------

    def mark(self):
        self._marks.append(len(self._trail))

    def undo(self):
        back_to = self._marks.pop()
        while len(self._trail) > back_to:
            vid, removed = self._trail.pop()
            self.domains[vid].values |= removed

    # -- propagation ---------------------------------------------------------

    def enqueue(self, prop):
        if prop in self._queued:
            return
        self._queued.add(prop)
        self._queue[prop.priority].append(prop)

    def register(self, prop):
        """Subscribe a propagator to its variables and schedule its first run."""
        for vid in prop.variables():
            self.watch(vid, prop)
        self.enqueue(prop)

    def propagate(self):
        """Run queued propagators to a fixpoint.

        Returns "stable" or "failed"; on failure pending queue entries are
        dropped (the search undoes the trail anyway).
        """
        try:
            while True:
                if self._queue[0]:
                    prop = self._queue[0].popleft()
                elif self._queue[1]:
                    prop = self._queue[1].popleft()
                else:
                    return "stable"
                self._queued.discard(prop)
                self._running = prop
                try:
                    self.propagation_count += 1
                    prop.run(self)
                finally:
                    self._running = None
        except Inconsistent:
            self._queue[0].clear()
            self._queue[1].clear()
            self._queued.clear()
            return "failed"

    def wake_all(self):
        seen = set()
        for watchers in self._watchers:
            for prop in watchers:
                if id(prop) not in seen:
                    seen.add(id(prop))
                    self.enqueue(prop)


class Propagator:
    """Base class: subclasses implement variables() and run(store)."""

    priority = 1

    def variables(self):
        raise NotImplementedError

    def run(self, store):
        raise NotImplementedError


class SearchStats:
    __slots__ = ("nodes", "backtracks", "failures", "root_failure", "propagations")

    def __init__(self):
        self.nodes = 0
        self.backtracks = 0
        self.failures = 0
        self.root_failure = False
        self.propagations = 0

    def as_dict(self):
        return {
            "nodes": self.nodes,
            "backtracks": self.backtracks,
            "failures": self.failures,
            "root_failure": self.root_failure,
            "propagations": self.propagations,
        }


class SearchResult:
    __slots__ = ("status", "solution", "stats", "elapsed")

    def __init__(self, status, solution, stats, elapsed):
        self.status = status
        self.solution = solution
        self.stats = stats
        self.elapsed = elapsed


def search(store, branch_vars, time_limit=None, on_solution=None):
    """Depth-first search over ``branch_vars`` (other variables must be fixed
    by propagation once these are).

    Branching picks the smallest unfixed domain (lowest variable first on
    ties) and tries values in increasing order: assign, and on failure remove
    the value.  Returns a SearchResult with status "sat", "unsat" or
    "timeout".  With ``on_solution`` the search enumerates: each solution is
    passed to the callback and search continues until the callback returns
    True (stop) or the tree is exhausted (status then reports "unsat" only if
    no solution was seen).
    """
    t0 = time.monotonic()
    stats = SearchStats()
    deadline = None if time_limit is None else t0 + time_limit

    def out(status, solution):
        stats.propagations = store.propagation_count
        return SearchResult(status, solution, stats, time.monotonic() - t0)

    if store.propagate() == "failed":
        stats.failures += 1
        stats.root_failure = True
        return out("unsat", None)

    def pick():
        best = None
        best_size = None
        for vid in branch_vars:
            size = len(store.domains[vid])
            if size > 1 and (best_size is None or size < best_size):
                best, best_size = vid, size
        return best

    found = [None]
    # Explicit stack of (vid, value, stage) decisions for iterative DFS;
    # stage 0 = try assignment, stage 1 = assignment failed, remove value.
    stack = []
    while True:
        if deadline is not None and time.monotonic() > deadline:
            while stack:
                store.undo()
                stack.pop()
            return out("timeout", found[0])
        vid = pick()
        if vid is None:
            solution = {v: store.value(v) for v in branch_vars}
            found[0] = solution
            if on_solution is None or on_solution(solution):
                while stack:
                    store.undo()
                    stack.pop()
                return out("sat", solution)
            status = "failed"  # force a backtrack to keep enumerating
        else:
            stats.nodes += 1
            v = store.vmin(vid)
            store.mark()
            stack.append((vid, v))
            store.assign(vid, v)
            status = store.propagate()
        while status == "failed":
            stats.failures += 1
            if not stack:
                return out("sat" if found[0] is not None else "unsat", found[0])
            stats.backtracks += 1
            vid, v = stack.pop()
            store.undo()
            # Refute the tried value and re-propagate at this node.
            try:
                store.remove_value(vid, v)
                status = store.propagate()
            except Inconsistent:
                status = "failed"
