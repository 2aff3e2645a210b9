"""Deterministic and weighted finite automata over integer alphabets.

Automata here are total: every (state, symbol) pair has a transition, and dead
states are explicit (``Dfa.from_partial`` completes a partial table with a
sink).  A weighted automaton attaches, per resource, an integer cost to each
transition, optionally position dependent; running it over a word yields one
total per resource.  Counter automata carry bounded counters updated along
transitions and are unfolded into weighted automata whose run totals equal the
final counter values.

All objects are immutable after construction and safe to share between models.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass


class AutomatonError(ValueError):
    """Invalid automaton construction or use."""


class Dfa:
    """Total deterministic finite automaton.

    States are 0..n_states-1, the alphabet is an ordered tuple of distinct
    integers (negative symbols are allowed), transitions must cover every
    (state, symbol) pair.
    """

    __slots__ = ("n_states", "alphabet", "start", "accepting", "_delta")

    def __init__(self, n_states, alphabet, transitions, start, accepting):
        alphabet = tuple(alphabet)
        if n_states <= 0:
            raise AutomatonError("automaton needs at least one state")
        if len(set(alphabet)) != len(alphabet) or not alphabet:
            raise AutomatonError("alphabet must be a nonempty list of distinct symbols")
        if not 0 <= start < n_states:
            raise AutomatonError("start state out of range")
        accepting = frozenset(accepting)
        if not all(0 <= q < n_states for q in accepting):
            raise AutomatonError("accepting state out of range")
        delta = {}
        for (q, v), q2 in dict(transitions).items():
            if not (0 <= q < n_states and 0 <= q2 < n_states):
                raise AutomatonError(f"transition ({q},{v})->{q2} out of range")
            if v not in alphabet:
                raise AutomatonError(f"transition on unknown symbol {v}")
            delta[(q, v)] = q2
        missing = n_states * len(alphabet) - len(delta)
        if missing:
            raise AutomatonError(
                f"transition table not total ({missing} pairs missing); "
                "use Dfa.from_partial to add an explicit sink"
            )
        self.n_states = n_states
        self.alphabet = alphabet
        self.start = start
        self.accepting = accepting
        self._delta = delta

    @classmethod
    def from_partial(cls, n_states, alphabet, transitions, start, accepting):
        """Complete a partial transition table with an explicit dead sink."""
        alphabet = tuple(alphabet)
        transitions = dict(transitions)
        need_sink = any(
            (q, v) not in transitions for q in range(n_states) for v in alphabet
        )
        if need_sink:
            sink = n_states
            n_states += 1
            for q in range(n_states):
                for v in alphabet:
                    transitions.setdefault((q, v), sink)
        return cls(n_states, alphabet, transitions, start, accepting)

    def step(self, q, v):
        return self._delta[(q, v)]

    def transitions(self):
        """All transitions as sorted (state, symbol, target) triples."""
        return sorted((q, v, q2) for (q, v), q2 in self._delta.items())

    def accepts(self, word):
        q = self.start
        for v in word:
            q = self._delta[(q, v)]
        return q in self.accepting

    def _suffix_table(self, length, allowed=None):
        # ok[i][q]: an accepting run of the remaining length-i suffix exists
        # from q, restricted to allowed symbols per position.
        ok = [set() for _ in range(length + 1)]
        ok[length] = set(self.accepting)
        for i in range(length - 1, -1, -1):
            syms = self.alphabet if allowed is None else allowed[i]
            nxt = ok[i + 1]
            ok[i] = {
                q
                for q in range(self.n_states)
                if any(self._delta[(q, v)] in nxt for v in syms)
            }
        return ok

    def words(self, length, allowed=None):
        """Yield accepted words of the given length, lexicographically.

        ``allowed`` optionally restricts each position to a subset of the
        alphabet (any iterable of symbols per position).
        """
        if allowed is not None:
            allowed = [tuple(sorted(set(a) & set(self.alphabet))) for a in allowed]
            if len(allowed) != length:
                raise AutomatonError("allowed sets must match word length")
        ok = self._suffix_table(length, allowed)
        if self.start not in ok[0]:
            return
        word = []

        def rec(q, i):
            if i == length:
                yield tuple(word)
                return
            syms = self.alphabet if allowed is None else allowed[i]
            for v in sorted(syms):
                q2 = self._delta[(q, v)]
                if q2 in ok[i + 1]:
                    word.append(v)
                    yield from rec(q2, i + 1)
                    word.pop()

        yield from rec(self.start, 0)


class CostMatrices:
    """Per-resource transition costs, optionally position dependent.

    ``base`` maps (resource, state, symbol) to a cost; ``positional`` maps
    (resource, state, symbol, position) to an extra cost added on top of the
    base entry.  Missing entries cost 0.
    """

    __slots__ = ("n_resources", "base", "positional")

    def __init__(self, n_resources, base=None, positional=None):
        if n_resources < 0:
            raise AutomatonError("resource count must be nonnegative")
        self.n_resources = n_resources
        self.base = dict(base or {})
        self.positional = dict(positional or {})
        for key in self.base:
            if not 0 <= key[0] < n_resources:
                raise AutomatonError(f"cost entry {key} names an unknown resource")
        for key in self.positional:
            if not 0 <= key[0] < n_resources:
                raise AutomatonError(f"cost entry {key} names an unknown resource")

    @property
    def is_positional(self):
        return bool(self.positional)

    def cost(self, r, q, v, i=None):
        c = self.base.get((r, q, v), 0)
        if i is not None and self.positional:
            c += self.positional.get((r, q, v, i), 0)
        return c


class WeightedDfa:
    """A Dfa plus cost matrices and per-resource interval bounds on totals."""

    __slots__ = ("dfa", "costs", "resource_bounds")

    def __init__(self, dfa, costs=None, resource_bounds=()):
        resource_bounds = tuple((int(lo), int(hi)) for lo, hi in resource_bounds)
        if costs is None:
            costs = CostMatrices(len(resource_bounds))
        if costs.n_resources != len(resource_bounds):
            raise AutomatonError(
                f"{costs.n_resources} cost matrices but "
                f"{len(resource_bounds)} resource bounds"
            )
        for lo, hi in resource_bounds:
            if lo > hi:
                raise AutomatonError("empty resource bound interval")
        self.dfa = dfa
        self.costs = costs
        self.resource_bounds = resource_bounds

    @classmethod
    def plain(cls, dfa):
        """Wrap an unweighted automaton (zero resources)."""
        return cls(dfa, CostMatrices(0), ())

    @property
    def n_resources(self):
        return self.costs.n_resources

    def run_weighted(self, word):
        """Run over a word; return (accepted, totals per resource)."""
        q = self.dfa.start
        totals = [0] * self.n_resources
        for i, v in enumerate(word):
            for r in range(self.n_resources):
                totals[r] += self.costs.cost(r, q, v, i)
            q = self.dfa.step(q, v)
        return q in self.dfa.accepting, tuple(totals)

    def accepts_within_bounds(self, word):
        ok, totals = self.run_weighted(word)
        if not ok:
            return False
        return all(
            lo <= t <= hi for t, (lo, hi) in zip(totals, self.resource_bounds)
        )

    def product(self, other, shared_resources=False):
        """Synchronous product: language intersection, costs combined.

        With ``shared_resources`` both operands must expose the same resource
        vector and costs are added per resource; otherwise resource vectors are
        concatenated (self's resources first).  Only forward-reachable pair
        states are kept.
        """
        a, b = self.dfa, other.dfa
        if set(a.alphabet) != set(b.alphabet):
            raise AutomatonError("product operands must share the alphabet")
        if shared_resources and self.n_resources != other.n_resources:
            raise AutomatonError("shared-resource product needs equal resource counts")
        alphabet = a.alphabet
        index = {(a.start, b.start): 0}
        order = [(a.start, b.start)]
        trans = {}
        i = 0
        while i < len(order):
            qa, qb = order[i]
            for v in alphabet:
                pair = (a.step(qa, v), b.step(qb, v))
                if pair not in index:
                    index[pair] = len(order)
                    order.append(pair)
                trans[(i, v)] = index[pair]
            i += 1
        accepting = {
            i for i, (qa, qb) in enumerate(order)
            if qa in a.accepting and qb in b.accepting
        }
        dfa = Dfa(len(order), alphabet, trans, 0, accepting)

        if shared_resources:
            n_res = self.n_resources
            bounds = [
                (l1 + l2, h1 + h2)
                for (l1, h1), (l2, h2) in zip(self.resource_bounds, other.resource_bounds)
            ]
        else:
            n_res = self.n_resources + other.n_resources
            bounds = list(self.resource_bounds) + list(other.resource_bounds)
        base = {}
        positional = {}
        for i, (qa, qb) in enumerate(order):
            for v in alphabet:
                for r in range(self.n_resources):
                    c = self.costs.base.get((r, qa, v), 0)
                    if shared_resources:
                        c += other.costs.base.get((r, qb, v), 0)
                    if c:
                        base[(r, i, v)] = c
                if not shared_resources:
                    off = self.n_resources
                    for r in range(other.n_resources):
                        c = other.costs.base.get((r, qb, v), 0)
                        if c:
                            base[(off + r, i, v)] = c
        for (r, q, v, pos), c in self.costs.positional.items():
            for i, (qa, qb) in enumerate(order):
                if qa == q:
                    positional[(r, i, v, pos)] = positional.get((r, i, v, pos), 0) + c
        off = 0 if shared_resources else self.n_resources
        for (r, q, v, pos), c in other.costs.positional.items():
            for i, (qa, qb) in enumerate(order):
                if qb == q:
                    key = (off + r if not shared_resources else r, i, v, pos)
                    positional[key] = positional.get(key, 0) + c
        return WeightedDfa(dfa, CostMatrices(n_res, base, positional), bounds)

    def with_resources(self, keep, bounds=None):
        """Project onto the resources listed in ``keep`` (in that order)."""
        keep = list(keep)
        remap = {old: new for new, old in enumerate(keep)}
        base = {
            (remap[r], q, v): c
            for (r, q, v), c in self.costs.base.items()
            if r in remap
        }
        positional = {
            (remap[r], q, v, i): c
            for (r, q, v, i), c in self.costs.positional.items()
            if r in remap
        }
        if bounds is None:
            bounds = [self.resource_bounds[r] for r in keep]
        return WeightedDfa(self.dfa, CostMatrices(len(keep), base, positional), bounds)

    def with_bounds(self, bounds):
        return WeightedDfa(self.dfa, self.costs, bounds)


@dataclass(frozen=True)
class CounterSpec:
    """One bounded counter: values 0..size-1, starting at init."""

    size: int
    init: int = 0

    def __post_init__(self):
        if not 0 <= self.init < self.size:
            raise AutomatonError("counter initial value out of range")


class CounterDfa:
    """A Dfa with bounded counters updated on every transition.

    ``update(q, v, counters)`` returns the new counter tuple for the
    transition out of state q on symbol v.  Updates must stay within each
    counter's range; unfolding validates this.
    """

    __slots__ = ("dfa", "counters", "update")

    def __init__(self, dfa, counters, update):
        self.dfa = dfa
        self.counters = tuple(counters)
        self.update = update

    def run(self, word):
        """Return (accepted, final counter values)."""
        q = self.dfa.start
        d = tuple(c.init for c in self.counters)
        for v in word:
            d = self._checked_update(q, v, d)
            q = self.dfa.step(q, v)
        return q in self.dfa.accepting, d

    def _checked_update(self, q, v, d):
        d2 = tuple(self.update(q, v, d))
        if len(d2) != len(self.counters):
            raise AutomatonError("counter update changed the counter count")
        for x, spec in zip(d2, self.counters):
            if not 0 <= x < spec.size:
                raise AutomatonError(
                    f"counter value {x} escapes range 0..{spec.size - 1}"
                )
        return d2


def unfold_counters(cdfa):
    """Unfold a counter automaton into a weighted one.

    The result has one resource per counter and accepts exactly the words the
    counter automaton accepts, with run totals equal to the final counter
    values.  States are reachable (state, counters) pairs, at most
    prod(counter sizes) * |Q| of them; nonzero initial counters cost one extra
    start state whose outgoing costs fold in the initial values.
    """
    dfa = cdfa.dfa
    alphabet = dfa.alphabet
    m = len(cdfa.counters)
    init = tuple(c.init for c in cdfa.counters)
    start_key = (dfa.start, init)

    index = {start_key: 0}
    order = [start_key]
    trans = {}
    base = {}
    i = 0
    while i < len(order):
        q, d = order[i]
        for v in alphabet:
            d2 = cdfa._checked_update(q, v, d)
            key = (dfa.step(q, v), d2)
            if key not in index:
                index[key] = len(order)
                order.append(key)
            trans[(i, v)] = index[key]
            for r in range(m):
                delta = d2[r] - d[r]
                if delta:
                    base[(r, i, v)] = delta
        i += 1

    if any(init):
        # A fresh copy of the start state (never re-entered) carries the
        # initial counter values on its outgoing costs, so totals equal the
        # final counter values rather than the change.
        fresh = len(order)
        for v in alphabet:
            trans[(fresh, v)] = trans[(0, v)]
            for r in range(m):
                c = base.get((r, 0, v), 0) + init[r]
                if c:
                    base[(r, fresh, v)] = c
        accepting = {
            i for i, (q, _) in enumerate(order) if q in dfa.accepting
        }
        if dfa.start in dfa.accepting:
            accepting.add(fresh)
        out = Dfa(fresh + 1, alphabet, trans, fresh, accepting)
    else:
        accepting = {i for i, (q, _) in enumerate(order) if q in dfa.accepting}
        out = Dfa(len(order), alphabet, trans, 0, accepting)
    bounds = [(0, c.size - 1) for c in cdfa.counters]
    return WeightedDfa(out, CostMatrices(m, base), bounds)


def universal_dfa(alphabet):
    """One accepting state, every symbol loops."""
    alphabet = tuple(alphabet)
    return Dfa(1, alphabet, {(0, v): 0 for v in alphabet}, 0, {0})


def build_gcc_weights(alphabet, groups=None, bounds=None):
    """Universal one-state automaton counting symbol-group occurrences.

    One resource per group (default: one singleton group per symbol), cost 1
    whenever a symbol of the group is read.
    """
    alphabet = tuple(alphabet)
    if groups is None:
        groups = [frozenset((v,)) for v in alphabet]
    groups = [frozenset(g) for g in groups]
    for g in groups:
        if not g or not g <= set(alphabet):
            raise AutomatonError("count groups must be nonempty alphabet subsets")
    dfa = universal_dfa(alphabet)
    base = {}
    for r, g in enumerate(groups):
        for v in g:
            base[(r, 0, v)] = 1
    if bounds is None:
        bounds = [(0, 10**9)] * len(groups)
    return WeightedDfa(dfa, CostMatrices(len(groups), base), bounds)


def build_stretch_count(vhat, alphabet, max_count=None):
    """Two-state automaton counting maximal runs of symbols in vhat.

    Cost 1 is paid on each transition that enters a run; every word is
    accepted, so the single resource totals the number of maximal stretches.
    """
    alphabet = tuple(alphabet)
    vhat = frozenset(vhat)
    if not vhat or not vhat < set(alphabet) and vhat != set(alphabet):
        if not vhat <= set(alphabet):
            raise AutomatonError("stretch symbols must come from the alphabet")
    if not vhat or vhat == set(alphabet):
        raise AutomatonError("stretch symbol set must be a proper nonempty subset")
    trans = {}
    base = {}
    for v in alphabet:
        if v in vhat:
            trans[(0, v)] = 1
            trans[(1, v)] = 1
            base[(0, 0, v)] = 1
        else:
            trans[(0, v)] = 0
            trans[(1, v)] = 0
    if max_count is None:
        max_count = 10**9
    return WeightedDfa(
        Dfa(2, alphabet, trans, 0, {0, 1}),
        CostMatrices(1, base),
        [(0, max_count)],
    )


def build_word_occurrence(pattern, k, n, alphabet):
    """Automaton flagging one occurrence of a symbol-set word at position k.

    ``pattern`` is a sequence of symbol sets; the single resource totals 1
    exactly when positions k..k+len(pattern)-1 all hit their sets.  Words that
    fail the pattern fall into an absorbing (still accepting) state, so the
    automaton measures and never filters.  Intended for words of length n
    (shorter words may end mid-chain and be rejected).
    """
    alphabet = tuple(alphabet)
    pattern = [frozenset(p) for p in pattern]
    m = len(pattern)
    if m < 1:
        raise AutomatonError("pattern must be nonempty")
    if k < 0 or k + m > n:
        raise AutomatonError("pattern does not fit at that position")
    for p in pattern:
        if not p or not p <= set(alphabet):
            raise AutomatonError("pattern sets must be nonempty alphabet subsets")
    # States: 0..k-1 skip chain, k..k+m-1 matching chain, k+m matched,
    # k+m+1 absorbing mismatch.
    matched = k + m
    reject = k + m + 1
    trans = {}
    base = {}
    for i in range(k):
        for v in alphabet:
            trans[(i, v)] = i + 1
    for j in range(m):
        q = k + j
        for v in alphabet:
            if v in pattern[j]:
                trans[(q, v)] = q + 1
                if j == m - 1:
                    base[(0, q, v)] = 1
            else:
                trans[(q, v)] = reject
    for v in alphabet:
        trans[(matched, v)] = matched
        trans[(reject, v)] = reject
    dfa = Dfa(reject + 1, alphabet, trans, 0, {matched, reject})
    return WeightedDfa(dfa, CostMatrices(1, base), [(0, 1)])


def build_sliding_word_counter(pattern, n, alphabet, with_total=False):
    """One automaton flagging a symbol-set word at every start position.

    Resource j totals 1 exactly when the word occurs starting at position j
    (j = 0..n-len(pattern)); with ``with_total`` a final extra resource sums
    all the flags.  The state is the last len(pattern)-1 symbols read (padded
    with the first alphabet symbol before the word starts; padding can never
    produce a flag because costs are position gated).
    """
    alphabet = tuple(alphabet)
    pattern = [frozenset(p) for p in pattern]
    m = len(pattern)
    if m < 1 or m > n:
        raise AutomatonError("pattern length must be between 1 and the word length")
    for p in pattern:
        if not p or not p <= set(alphabet):
            raise AutomatonError("pattern sets must be nonempty alphabet subsets")
    pad = alphabet[0]
    hists = [()]
    if m > 1:
        import itertools

        hists = [h for h in itertools.product(alphabet, repeat=m - 1)]
    index = {h: i for i, h in enumerate(hists)}
    start = index[tuple([pad] * (m - 1))]
    n_flags = n - m + 1
    n_res = n_flags + (1 if with_total else 0)
    trans = {}
    positional = {}
    for h, qi in index.items():
        for v in alphabet:
            h2 = (h + (v,))[1:] if m > 1 else ()
            trans[(qi, v)] = index[h2]
            if v not in pattern[m - 1]:
                continue
            if all(h[j] in pattern[j] for j in range(m - 1)):
                # A full match can only end at positions >= m-1, which also
                # rules out any padded history.
                for end in range(m - 1, n):
                    kstart = end - m + 1
                    positional[(kstart, qi, v, end)] = 1
                    if with_total:
                        positional[(n_flags, qi, v, end)] = 1
    dfa = Dfa(len(hists), alphabet, trans, start, set(range(len(hists))))
    bounds = [(0, 1)] * n_flags
    if with_total:
        bounds.append((0, n_flags))
    return WeightedDfa(dfa, CostMatrices(n_res, {}, positional), bounds)


def build_stretch_length_counters(vhat, alphabet, n):
    """Counter automaton extracting min/max maximal-stretch lengths.

    Counters: current run length, min over completed runs, an effective
    minimum (min over completed runs and the current trailing run), and the
    maximum.  Sentinel n+1 on the minimum side means "no stretch".  Unfold and
    keep resources (2, 3) to get (min length, max length) totals.
    """
    alphabet = tuple(alphabet)
    vhat = frozenset(vhat)
    if not vhat or not vhat <= set(alphabet) or vhat == set(alphabet):
        raise AutomatonError("stretch symbol set must be a proper nonempty subset")
    sentinel = n + 1
    counters = (
        CounterSpec(n + 1),            # cur: current run length 0..n
        CounterSpec(n + 2, sentinel),  # completed-run minimum, sentinel = none
        CounterSpec(n + 2, sentinel),  # effective minimum incl. trailing run
        CounterSpec(n + 1),            # maximum length seen
    )

    in_set = vhat

    def update(q, v, d):
        cur, mnc, _, mx = d
        if v in in_set:
            # saturate at n: states past the intended word length are
            # explored during unfolding but never reached by length-n runs
            cur2 = min(cur + 1, n)
            return (cur2, mnc, min(mnc, cur2), max(mx, cur2))
        mnc2 = min(mnc, cur) if cur else mnc
        return (0, mnc2, mnc2, mx)

    trans = {}
    for v in alphabet:
        trans[(0, v)] = 1 if v in vhat else 0
        trans[(1, v)] = 1 if v in vhat else 0
    dfa = Dfa(2, alphabet, trans, 0, {0, 1})
    return CounterDfa(dfa, counters, update)


def build_stretch_length_bounds(vhat, alphabet, n, min_bounds=None, max_bounds=None):
    """Weighted automaton with (min stretch length, max stretch length) totals.

    The min resource reads n+1 when the word has no stretch at all, so a case
    rule "every stretch of vhat is at least lo long" is the interval
    [lo, n+1] and "at most hi" is [0, hi] on the max resource.
    """
    w = unfold_counters(build_stretch_length_counters(vhat, alphabet, n))
    if min_bounds is None:
        min_bounds = (1, n + 1)
    if max_bounds is None:
        max_bounds = (0, n)
    return w.with_resources([2, 3], [min_bounds, max_bounds])


def stretch_length_dfa(vhat, alphabet, lo, hi=None):
    """Filter accepting words whose maximal vhat-runs all have length in [lo, hi].

    ``hi=None`` means unbounded above.  Runs cut by the word end still count.
    """
    alphabet = tuple(alphabet)
    vhat = frozenset(vhat)
    if not vhat <= set(alphabet):
        raise AutomatonError("stretch symbols must come from the alphabet")
    if lo < 1:
        lo = 1
    cap = hi if hi is not None else lo
    if hi is not None and lo > hi:
        raise AutomatonError("empty stretch length interval")
    # State 0: outside a run; state j (1..cap): inside a run of length j
    # (length saturates at cap when unbounded above).
    trans = {}
    for v in alphabet:
        trans[(0, v)] = 1 if v in vhat else 0
        for j in range(1, cap + 1):
            if v in vhat:
                if j < cap:
                    trans[(j, v)] = j + 1
                elif hi is None:
                    trans[(j, v)] = j
                # else: overlong run, handled by from_partial sink
            else:
                if j >= lo:
                    trans[(j, v)] = 0
                # else: run ended short, sink
    accepting = {0} | {j for j in range(lo, cap + 1)}
    return Dfa.from_partial(cap + 1, alphabet, trans, 0, accepting)


def sequence_window_dfa(vhat, alphabet, window, lo, hi):
    """Filter: every length-``window`` sliding window holds between lo and hi
    symbols from vhat.  Windows only start counting once the word is long
    enough, so words shorter than the window are unconstrained.
    """
    alphabet = tuple(alphabet)
    vhat = frozenset(vhat)
    if not vhat <= set(alphabet):
        raise AutomatonError("window symbols must come from the alphabet")
    if window < 1 or lo > hi:
        raise AutomatonError("bad window specification")
    # State: tuple of the last up-to-(window-1) membership bits.
    start_h = ()
    index = {start_h: 0}
    order = [start_h]
    trans = {}
    i = 0
    while i < len(order):
        h = order[i]
        for v in alphabet:
            bit = 1 if v in vhat else 0
            if len(h) < window - 1:
                h2 = h + (bit,)
            else:
                if not lo <= sum(h) + bit <= hi:
                    continue  # violated window, sink
                h2 = (h + (bit,))[1:]
            if h2 not in index:
                index[h2] = len(order)
                order.append(h2)
            trans[(i, v)] = index[h2]
        i += 1
    return Dfa.from_partial(len(order), alphabet, trans, 0, set(range(len(order))))


def dump_automaton(wdfa):
    """Render a weighted automaton in the line-oriented text form.

    Transitions read ``trans q symbol q' [r:cost]*``; ``poscost`` lines add
    position-dependent extras.  ``parse_automaton`` inverts this exactly.
    """
    if isinstance(wdfa, Dfa):
        wdfa = WeightedDfa.plain(wdfa)
    d = wdfa.dfa
    lines = [f"wdfa {d.n_states} {d.start}"]
    lines.append("alphabet " + " ".join(str(v) for v in d.alphabet))
    lines.append("accept " + " ".join(str(q) for q in sorted(d.accepting)))
    lines.append(f"resources {wdfa.n_resources}")
    for r, (lo, hi) in enumerate(wdfa.resource_bounds):
        lines.append(f"bound {r} {lo} {hi}")
    for q, v, q2 in d.transitions():
        costs = []
        for r in range(wdfa.n_resources):
            c = wdfa.costs.base.get((r, q, v), 0)
            if c:
                costs.append(f"{r}:{c}")
        lines.append(f"trans {q} {v} {q2}" + ("" if not costs else " " + " ".join(costs)))
    for (r, q, v, i), c in sorted(wdfa.costs.positional.items()):
        lines.append(f"poscost {q} {v} {i} {r}:{c}")
    return "\n".join(lines) + "\n"


def parse_automaton(text):
    """Parse the text form produced by dump_automaton."""
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = list(text)
    lines = [ln.strip() for ln in lines]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("wdfa "):
        raise AutomatonError("automaton text must start with a 'wdfa' line")
    try:
        _, n_states, start = lines[0].split()
        n_states, start = int(n_states), int(start)
        alphabet = accept = None
        n_res = 0
        bounds = {}
        trans = {}
        base, positional = {}, {}
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "alphabet":
                alphabet = tuple(int(x) for x in parts[1:])
            elif parts[0] == "accept":
                accept = {int(x) for x in parts[1:]}
            elif parts[0] == "resources":
                n_res = int(parts[1])
            elif parts[0] == "bound":
                bounds[int(parts[1])] = (int(parts[2]), int(parts[3]))
            elif parts[0] == "trans":
                q, v, q2 = int(parts[1]), int(parts[2]), int(parts[3])
                trans[(q, v)] = q2
                for tok in parts[4:]:
                    r, c = tok.split(":")
                    base[(int(r), q, v)] = int(c)
            elif parts[0] == "poscost":
                q, v, i = int(parts[1]), int(parts[2]), int(parts[3])
                for tok in parts[4:]:
                    r, c = tok.split(":")
                    positional[(int(r), q, v, i)] = int(c)
            else:
                raise AutomatonError(f"unknown automaton line: {ln}")
    except (IndexError, ValueError) as exc:
        raise AutomatonError(f"malformed automaton line: {exc}") from exc
    if alphabet is None or accept is None:
        raise AutomatonError("automaton text missing alphabet or accept line")
    dfa = Dfa(n_states, alphabet, trans, start, accept)
    blist = [bounds.get(r, (0, 10**9)) for r in range(n_res)]
    return WeightedDfa(dfa, CostMatrices(n_res, base, positional), blist)
