"""Propagators: weighted-automaton rows, cardinality columns, linear and
interval-expression relations, lexicographic ordering, column sums.

Every propagator runs to its own local fixpoint inside run() because the store
does not reschedule the propagator that is currently running.
"""

from __future__ import annotations

from .engine import Inconsistent, Propagator


def _ceil_div(a, b):
    return -((-a) // b)


class Mcr(Propagator):
    """Weighted-automaton row propagator.

    Maintains the layered graph of automaton runs over the row variables,
    trims arcs whose per-resource through-cost interval misses the resource
    variable bounds, tightens the resource variables to the surviving path
    cost range, and finally restricts each row variable to the symbols used by
    some surviving arc.  With zero resources this is exact domain consistency
    for the plain automaton membership constraint.
    """

    priority = 1

    def __init__(self, xs, zs, wdfa):
        self.xs = list(xs)
        self.zs = list(zs)
        self.wdfa = wdfa
        if len(self.zs) != wdfa.n_resources:
            raise ValueError("one resource variable per cost matrix required")

    def variables(self):
        return self.xs + self.zs

    def run(self, store):
        n = len(self.xs)
        d = self.wdfa.dfa
        nres = self.wdfa.n_resources
        cost = self.wdfa.costs.cost
        removed = set()

        while True:
            doms = [store.dom(x) for x in self.xs]
            fwd = [set() for _ in range(n + 1)]
            fwd[0].add(d.start)
            for i in range(n):
                nxt = fwd[i + 1]
                for q in fwd[i]:
                    for v in doms[i]:
                        if (i, q, v) not in removed:
                            nxt.add(d.step(q, v))
            node = [set() for _ in range(n + 1)]
            node[n] = fwd[n] & d.accepting
            if not node[n]:
                raise Inconsistent("row automaton has no accepting run")
            arcs = [[] for _ in range(n)]
            for i in range(n - 1, -1, -1):
                keep = node[i + 1]
                grow = node[i]
                for q in fwd[i]:
                    for v in doms[i]:
                        if (i, q, v) in removed:
                            continue
                        q2 = d.step(q, v)
                        if q2 in keep:
                            arcs[i].append((q, v, q2))
                            grow.add(q)
            if d.start not in node[0]:
                raise Inconsistent("row automaton has no accepting run")

            if nres == 0:
                break

            # Forward / backward per-resource cost envelopes over the trimmed
            # graph.  Every node in node[] lies on some start-accept path, so
            # both tables are total on it.
            fmin = [{} for _ in range(n + 1)]
            fmax = [{} for _ in range(n + 1)]
            fmin[0][d.start] = [0] * nres
            fmax[0][d.start] = [0] * nres
            for i in range(n):
                for q, v, q2 in arcs[i]:
                    lo = fmin[i].get(q)
                    if lo is None:
                        continue
                    hi = fmax[i][q]
                    cs = [cost(r, q, v, i) for r in range(nres)]
                    nlo = fmin[i + 1].get(q2)
                    if nlo is None:
                        fmin[i + 1][q2] = [lo[r] + cs[r] for r in range(nres)]
                        fmax[i + 1][q2] = [hi[r] + cs[r] for r in range(nres)]
                    else:
                        nhi = fmax[i + 1][q2]
                        for r in range(nres):
                            if lo[r] + cs[r] < nlo[r]:
                                nlo[r] = lo[r] + cs[r]
                            if hi[r] + cs[r] > nhi[r]:
                                nhi[r] = hi[r] + cs[r]
            bmin = [{} for _ in range(n + 1)]
            bmax = [{} for _ in range(n + 1)]
            for q in node[n]:
                bmin[n][q] = [0] * nres
                bmax[n][q] = [0] * nres
            for i in range(n - 1, -1, -1):
                for q, v, q2 in arcs[i]:
                    lo = bmin[i + 1].get(q2)
                    if lo is None:
                        continue
                    hi = bmax[i + 1][q2]
                    cs = [cost(r, q, v, i) for r in range(nres)]
                    nlo = bmin[i].get(q)
                    if nlo is None:
                        bmin[i][q] = [lo[r] + cs[r] for r in range(nres)]
                        bmax[i][q] = [hi[r] + cs[r] for r in range(nres)]
                    else:
                        nhi = bmax[i][q]
                        for r in range(nres):
                            if lo[r] + cs[r] < nlo[r]:
                                nlo[r] = lo[r] + cs[r]
                            if hi[r] + cs[r] > nhi[r]:
                                nhi[r] = hi[r] + cs[r]

            for r in range(nres):
                lo = min(fmin[n][q][r] for q in node[n])
                hi = max(fmax[n][q][r] for q in node[n])
                store.set_min(self.zs[r], lo)
                store.set_max(self.zs[r], hi)

            zb = [(store.vmin(z), store.vmax(z)) for z in self.zs]
            new_kill = []
            for i in range(n):
                for q, v, q2 in arcs[i]:
                    f_lo, f_hi = fmin[i][q], fmax[i][q]
                    b_lo, b_hi = bmin[i + 1][q2], bmax[i + 1][q2]
                    for r in range(nres):
                        c = cost(r, q, v, i)
                        if (
                            f_hi[r] + c + b_hi[r] < zb[r][0]
                            or f_lo[r] + c + b_lo[r] > zb[r][1]
                        ):
                            new_kill.append((i, q, v))
                            break
            if not new_kill:
                break
            removed.update(new_kill)

        for i in range(n):
            store.keep_values(self.xs[i], {v for (_, v, _) in arcs[i]})


def regular_dc(xs, dfa, weighted=None):
    """Domain-consistency propagator for plain automaton membership."""
    from .automata import WeightedDfa

    w = weighted if weighted is not None else WeightedDfa.plain(dfa)
    return Mcr(xs, [], w.with_resources([]))


class GccColumn(Propagator):
    """Occurrence counting over one scope with cardinality variables.

    cards[j] tracks how many scope variables take values[j]; both directions
    are propagated (cards tightened from the cells, cells pruned or forced
    when a cardinality bound becomes tight).
    """

    priority = 0

    def __init__(self, xs, cards, values):
        if len(cards) != len(values):
            raise ValueError("one cardinality variable per counted value")
        self.xs = list(xs)
        self.cards = list(cards)
        self.values = list(values)

    def variables(self):
        return self.xs + self.cards

    def run(self, store):
        while self._pass(store):
            pass

    def _pass(self, store):
        changed = False
        for card, v in zip(self.cards, self.values):
            fixed = possible = 0
            for x in self.xs:
                dm = store.dom(x)
                if v in dm:
                    possible += 1
                    if len(dm) == 1:
                        fixed += 1
            changed |= store.set_min(card, fixed)
            changed |= store.set_max(card, possible)
            lo, hi = store.vmin(card), store.vmax(card)
            if fixed == hi and possible > fixed:
                for x in self.xs:
                    dm = store.dom(x)
                    if len(dm) > 1 and v in dm:
                        changed |= store.remove_value(x, v)
            elif possible == lo and fixed < possible:
                for x in self.xs:
                    dm = store.dom(x)
                    if len(dm) > 1 and v in dm:
                        changed |= store.assign(x, v)
        return changed


class LinearEq(Propagator):
    """Bounds propagation for sum(coef_i * x_i) == const."""

    priority = 0

    def __init__(self, coefs, vids, const):
        if len(coefs) != len(vids):
            raise ValueError("coefficient per variable required")
        self.coefs = list(coefs)
        self.vids = list(vids)
        self.const = const

    def variables(self):
        return list(self.vids)

    def run(self, store):
        while self._pass(store):
            pass

    def _pass(self, store):
        lo = hi = 0
        terms = []
        for c, x in zip(self.coefs, self.vids):
            if c == 0:
                continue
            if c > 0:
                tlo, thi = c * store.vmin(x), c * store.vmax(x)
            else:
                tlo, thi = c * store.vmax(x), c * store.vmin(x)
            lo += tlo
            hi += thi
            terms.append((c, x, tlo, thi))
        if lo > self.const or hi < self.const:
            raise Inconsistent("linear equation out of bounds")
        changed = False
        for c, x, tlo, thi in terms:
            # c*x must fit in [const - (hi - thi), const - (lo - tlo)]
            blo = self.const - (hi - thi)
            bhi = self.const - (lo - tlo)
            if c > 0:
                changed |= store.set_min(x, _ceil_div(blo, c))
                changed |= store.set_max(x, bhi // c)
            else:
                changed |= store.set_min(x, _ceil_div(bhi, c))
                changed |= store.set_max(x, blo // c)
        return changed


# -- interval expressions ----------------------------------------------------


class Expr:
    def vids(self):
        return []

    def bounds(self, store):
        raise NotImplementedError

    def push_le(self, store, hi):
        return False

    def push_ge(self, store, lo):
        return False


class ConstE(Expr):
    __slots__ = ("c",)

    def __init__(self, c):
        self.c = c

    def bounds(self, store):
        return self.c, self.c

    def push_le(self, store, hi):
        if self.c > hi:
            raise Inconsistent("constant above its required bound")
        return False

    def push_ge(self, store, lo):
        if self.c < lo:
            raise Inconsistent("constant below its required bound")
        return False


class VarE(Expr):
    __slots__ = ("vid",)

    def __init__(self, vid):
        self.vid = vid

    def vids(self):
        return [self.vid]

    def bounds(self, store):
        return store.vmin(self.vid), store.vmax(self.vid)

    def push_le(self, store, hi):
        return store.set_max(self.vid, hi)

    def push_ge(self, store, lo):
        return store.set_min(self.vid, lo)


class SumE(Expr):
    __slots__ = ("children",)

    def __init__(self, children):
        self.children = list(children)

    def vids(self):
        return [v for ch in self.children for v in ch.vids()]

    def bounds(self, store):
        lo = hi = 0
        for ch in self.children:
            clo, chi = ch.bounds(store)
            lo += clo
            hi += chi
        return lo, hi

    def push_le(self, store, hi):
        lo_sum = sum(ch.bounds(store)[0] for ch in self.children)
        changed = False
        for ch in self.children:
            clo = ch.bounds(store)[0]
            changed |= ch.push_le(store, hi - (lo_sum - clo))
        return changed

    def push_ge(self, store, lo):
        hi_sum = sum(ch.bounds(store)[1] for ch in self.children)
        changed = False
        for ch in self.children:
            chi = ch.bounds(store)[1]
            changed |= ch.push_ge(store, lo - (hi_sum - chi))
        return changed


class ScaleE(Expr):
    __slots__ = ("coef", "child")

    def __init__(self, coef, child):
        if coef == 0:
            raise ValueError("zero scale; use ConstE(0)")
        self.coef = coef
        self.child = child

    def vids(self):
        return self.child.vids()

    def bounds(self, store):
        lo, hi = self.child.bounds(store)
        a, b = self.coef * lo, self.coef * hi
        return (a, b) if a <= b else (b, a)

    def push_le(self, store, hi):
        if self.coef > 0:
            return self.child.push_le(store, hi // self.coef)
        return self.child.push_ge(store, _ceil_div(hi, self.coef))

    def push_ge(self, store, lo):
        if self.coef > 0:
            return self.child.push_ge(store, _ceil_div(lo, self.coef))
        return self.child.push_le(store, lo // self.coef)


class MaxE(Expr):
    __slots__ = ("children",)

    def __init__(self, children):
        self.children = list(children)
        if not self.children:
            raise ValueError("max of nothing")

    def vids(self):
        return [v for ch in self.children for v in ch.vids()]

    def bounds(self, store):
        bs = [ch.bounds(store) for ch in self.children]
        return max(b[0] for b in bs), max(b[1] for b in bs)

    def push_le(self, store, hi):
        changed = False
        for ch in self.children:
            changed |= ch.push_le(store, hi)
        return changed

    def push_ge(self, store, lo):
        # Only one child can be the witness when all others top out below lo.
        able = [ch for ch in self.children if ch.bounds(store)[1] >= lo]
        if not able:
            raise Inconsistent("max cannot reach its lower bound")
        if len(able) == 1:
            return able[0].push_ge(store, lo)
        return False


class MinE(Expr):
    __slots__ = ("children",)

    def __init__(self, children):
        self.children = list(children)
        if not self.children:
            raise ValueError("min of nothing")

    def vids(self):
        return [v for ch in self.children for v in ch.vids()]

    def bounds(self, store):
        bs = [ch.bounds(store) for ch in self.children]
        return min(b[0] for b in bs), min(b[1] for b in bs)

    def push_ge(self, store, lo):
        changed = False
        for ch in self.children:
            changed |= ch.push_ge(store, lo)
        return changed

    def push_le(self, store, hi):
        able = [ch for ch in self.children if ch.bounds(store)[0] <= hi]
        if not able:
            raise Inconsistent("min cannot stay under its upper bound")
        if len(able) == 1:
            return able[0].push_le(store, hi)
        return False


class Relation(Propagator):
    """left <= right or left == right over interval expressions."""

    priority = 0

    def __init__(self, op, left, right):
        if op not in ("le", "eq"):
            raise ValueError("op must be 'le' or 'eq'")
        self.op = op
        self.left = left
        self.right = right
        self._vids = list(dict.fromkeys(left.vids() + right.vids()))

    def variables(self):
        return self._vids

    def run(self, store):
        while self._pass(store):
            pass

    def _pass(self, store):
        changed = False
        llo, lhi = self.left.bounds(store)
        rlo, rhi = self.right.bounds(store)
        if llo > rhi:
            raise Inconsistent("relation bounds disjoint")
        changed |= self.left.push_le(store, rhi)
        changed |= self.right.push_ge(store, llo)
        if self.op == "eq":
            if rlo > lhi:
                raise Inconsistent("relation bounds disjoint")
            changed |= self.right.push_le(store, lhi)
            changed |= self.left.push_ge(store, rlo)
        return changed


# -- ordering and sums --------------------------------------------------------


class LexLe(Propagator):
    """xs lexicographically <= ys (strictly < with strict=True)."""

    priority = 0

    def __init__(self, xs, ys, strict=False):
        if len(xs) != len(ys):
            raise ValueError("lex rows must have equal length")
        self.xs = list(xs)
        self.ys = list(ys)
        self.strict = strict

    def variables(self):
        return self.xs + self.ys

    def run(self, store):
        while self._pass(store):
            pass

    def _suffix_ok(self, store, j):
        # Can positions >= j still realize xs <= ys (or < when strict)?
        for i in range(j, len(self.xs)):
            if store.vmin(self.xs[i]) < store.vmax(self.ys[i]):
                return True
            if store.vmin(self.xs[i]) > store.vmax(self.ys[i]):
                return False
        return not self.strict

    def _pass(self, store):
        n = len(self.xs)
        i = 0
        while (
            i < n
            and store.is_fixed(self.xs[i])
            and store.is_fixed(self.ys[i])
            and store.value(self.xs[i]) == store.value(self.ys[i])
        ):
            i += 1
        if i == n:
            if self.strict:
                raise Inconsistent("lex prefix exhausted")
            return False
        changed = store.set_max(self.xs[i], store.vmax(self.ys[i]))
        changed |= store.set_min(self.ys[i], store.vmin(self.xs[i]))
        eq_possible = store.vmin(self.xs[i]) <= store.vmax(self.ys[i]) and bool(
            store.dom(self.xs[i]) & store.dom(self.ys[i])
        )
        if eq_possible and not self._suffix_ok(store, i + 1):
            # Equality at the split position dooms the suffix: force strict.
            changed |= store.set_max(self.xs[i], store.vmax(self.ys[i]) - 1)
            changed |= store.set_min(self.ys[i], store.vmin(self.xs[i]) + 1)
        return changed


def post_lex_chain(store, rows, strict=False):
    """Order consecutive rows lexicographically; returns the propagators."""
    props = []
    for a, b in zip(rows, rows[1:]):
        p = LexLe(a, b, strict=strict)
        store.register(p)
        props.append(p)
    return props


class SumColumn(Propagator):
    """Bounds propagation for lo <= sum of mapped cell values <= hi.

    Cells hold indices into an ascending external value table; the sum ranges
    over the external values.
    """

    priority = 0

    def __init__(self, xs, values, lo, hi):
        self.xs = list(xs)
        self.values = tuple(values)
        self.lo = lo
        self.hi = hi

    def variables(self):
        return list(self.xs)

    def run(self, store):
        while self._pass(store):
            pass

    def _pass(self, store):
        ext = self.values
        mins = [ext[store.vmin(x)] for x in self.xs]
        maxs = [ext[store.vmax(x)] for x in self.xs]
        total_lo, total_hi = sum(mins), sum(maxs)
        if total_lo > self.hi or total_hi < self.lo:
            raise Inconsistent("column sum out of bounds")
        changed = False
        for i, x in enumerate(self.xs):
            need_lo = self.lo - (total_hi - maxs[i])
            need_hi = self.hi - (total_lo - mins[i])
            allowed = {v for v in store.dom(x) if need_lo <= ext[v] <= need_hi}
            changed |= store.keep_values(x, allowed)
        return changed


# -- stretch-length window conditions -----------------------------------------


class StretchLengthWindows(Propagator):
    """Window conditions tying per-column counts to stretch-length bounds.

    cards[k] is an expression for the number of tracked symbols in column k;
    zmin/zmax are shared stretch-length extremes over all rows.  The windows
    are instantiated at the weakest sound point of the current zmin/zmax box
    (zmin at its lower bound, zmax at its upper bound) and re-derived on every
    run, so they tighten as the length bounds tighten.
    """

    priority = 0

    def __init__(self, cards, zmin, zmax, n_rows):
        self.cards = list(cards)
        self.zmin = zmin
        self.zmax = zmax
        self.n_rows = n_rows
        self._vids = list(
            dict.fromkeys(
                [v for c in self.cards for v in c.vids()] + [zmin, zmax]
            )
        )

    def variables(self):
        return self._vids

    def _ls_plus(self, k):
        prev = ConstE(0) if k == 0 else self.cards[k - 1]
        return MaxE([ConstE(0), SumE([self.cards[k], ScaleE(-1, prev)])])

    def _ls_minus(self, k):
        nxt = ConstE(0) if k == len(self.cards) - 1 else self.cards[k + 1]
        return MaxE([ConstE(0), SumE([self.cards[k], ScaleE(-1, nxt)])])

    def _build(self, store):
        K = len(self.cards)
        a = store.vmin(self.zmin)
        b = store.vmax(self.zmax)
        rels = []
        for k in range(K):
            j0 = max(0, k - a + 1)
            if j0 <= k:
                rels.append(
                    Relation(
                        "le",
                        SumE([self._ls_plus(j) for j in range(j0, k + 1)]),
                        self.cards[k],
                    )
                )
            j1 = min(K - 1, k + a - 1)
            if j1 >= k:
                rels.append(
                    Relation(
                        "le",
                        SumE([self._ls_minus(j) for j in range(k, j1 + 1)]),
                        self.cards[k],
                    )
                )
        if a <= b:
            cap = ConstE((b - a + 1) * self.n_rows)
            for k in range(0, K - b):
                rels.append(
                    Relation(
                        "le",
                        SumE(
                            [self._ls_plus(k)]
                            + [self.cards[k + j] for j in range(a, b + 1)]
                        ),
                        cap,
                    )
                )
            for k in range(b, K):
                rels.append(
                    Relation(
                        "le",
                        SumE(
                            [self._ls_minus(k)]
                            + [self.cards[k - j] for j in range(a, b + 1)]
                        ),
                        cap,
                    )
                )
        return rels

    def run(self, store):
        rels = self._build(store)
        changed = True
        while changed:
            changed = False
            for rel in rels:
                changed |= rel._pass(store)
