import random
from itertools import product

import pytest

from matrixcp.automata import (
    CostMatrices,
    Dfa,
    WeightedDfa,
    build_gcc_weights,
    build_stretch_count,
)
from matrixcp.engine import Inconsistent, Store, search
from matrixcp.propagators import (
    ConstE,
    GccColumn,
    LexLe,
    LinearEq,
    MaxE,
    Mcr,
    MinE,
    Relation,
    ScaleE,
    StretchLengthWindows,
    SumColumn,
    SumE,
    VarE,
    post_lex_chain,
    regular_dc,
)


def no_mixing_dfa():
    """Words over (0,1,2) that never contain both a 1 and a 2."""
    trans = {}
    for v in (0, 1, 2):
        trans[(0, v)] = {0: 0, 1: 1, 2: 2}[v]
        trans[(1, v)] = {0: 1, 1: 1, 2: 3}[v]
        trans[(2, v)] = {0: 2, 1: 3, 2: 2}[v]
        trans[(3, v)] = 3
    return Dfa(4, (0, 1, 2), trans, 0, {0, 1, 2})


class TestMcr:
    def test_stretch_count_forces_unique_word(self):
        # two maximal 1-stretches in three cells leaves only 1,0,1
        st = Store()
        xs = [st.new_var({0, 1}) for _ in range(3)]
        z = st.new_var({2}, bc=True)
        st.register(Mcr(xs, [z], build_stretch_count({1}, (0, 1))))
        assert st.propagate() == "stable"
        assert [set(st.dom(x)) for x in xs] == [{1}, {0}, {1}]

    def test_unreachable_total_fails(self):
        st = Store()
        xs = [st.new_var({0, 1}) for _ in range(3)]
        z = st.new_var({3}, bc=True)
        st.register(Mcr(xs, [z], build_stretch_count({1}, (0, 1))))
        assert st.propagate() == "failed"

    def test_cost_bounds_tighten_from_cells(self):
        st = Store()
        xs = [st.new_var({1}), st.new_var({0, 1}), st.new_var({1})]
        z = st.new_var(range(0, 10), bc=True)
        st.register(Mcr(xs, [z], build_gcc_weights((0, 1), groups=[{1}])))
        st.propagate()
        assert (st.vmin(z), st.vmax(z)) == (2, 3)

    def test_weighted_pruning_is_sound(self):
        """Every (position, value) pair in a bound-feasible word survives."""
        rng = random.Random(202)
        alphabet = (0, 1)
        for trial in range(80):
            n_states = rng.randint(1, 3)
            trans = {(q, v): rng.randrange(n_states)
                     for q in range(n_states) for v in alphabet}
            acc = {q for q in range(n_states) if rng.random() < 0.6} or {0}
            base = {(0, q, v): rng.randint(0, 2)
                    for q in range(n_states) for v in alphabet}
            wa = WeightedDfa(Dfa(n_states, alphabet, trans, 0, acc),
                             CostMatrices(1, base), [(0, 100)])
            n = rng.randint(1, 4)
            zlo = rng.randint(0, 2)
            zhi = zlo + rng.randint(0, 2)

            feasible = set()
            words = []
            for w in product(alphabet, repeat=n):
                ok, (c,) = wa.run_weighted(w)
                if ok and zlo <= c <= zhi:
                    words.append(w)
                    for i, v in enumerate(w):
                        feasible.add((i, v))

            st = Store()
            xs = [st.new_var(alphabet) for _ in range(n)]
            z = st.new_var(range(zlo, zhi + 1), bc=True)
            try:
                st.register(Mcr(xs, [z], wa))
                status = st.propagate()
            except Inconsistent:
                status = "failed"
            if not words:
                assert status == "failed", f"trial {trial}"
                continue
            assert status == "stable"
            for i, v in feasible:
                assert v in st.dom(xs[i]), f"trial {trial} lost ({i},{v})"

    def test_plain_membership_is_domain_consistent(self):
        rng = random.Random(203)
        alphabet = (0, 1, 2)
        for trial in range(60):
            n_states = rng.randint(1, 4)
            trans = {(q, v): rng.randrange(n_states)
                     for q in range(n_states) for v in alphabet}
            acc = {q for q in range(n_states) if rng.random() < 0.5}
            d = Dfa(n_states, alphabet, trans, 0, acc)
            n = rng.randint(1, 4)
            doms = [set(rng.sample(alphabet, rng.randint(1, 3))) for _ in range(n)]

            support = [set() for _ in range(n)]
            for w in product(alphabet, repeat=n):
                if all(w[i] in doms[i] for i in range(n)) and d.accepts(w):
                    for i, v in enumerate(w):
                        support[i].add(v)

            st = Store()
            xs = [st.new_var(dm) for dm in doms]
            try:
                st.register(regular_dc(xs, d))
                status = st.propagate()
            except Inconsistent:
                status = "failed"
            if not any(support):
                assert status == "failed"
                continue
            assert status == "stable"
            assert [set(st.dom(x)) for x in xs] == support, f"trial {trial}"

    def test_no_mixing_example(self):
        st = Store()
        xs = [st.new_var({1, 2}), st.new_var({1}), st.new_var({0, 1, 2})]
        st.register(regular_dc(xs, no_mixing_dfa()))
        assert st.propagate() == "stable"
        assert [set(st.dom(x)) for x in xs] == [{1}, {1}, {0, 1}]


class TestGccColumn:
    def test_counts_tighten_from_cells(self):
        st = Store()
        xs = [st.new_var(d) for d in ({1}, {0, 1}, {1}, {0})]
        card1 = st.new_var(range(0, 5), bc=True)
        st.register(GccColumn(xs, [card1], [1]))
        st.propagate()
        assert (st.vmin(card1), st.vmax(card1)) == (2, 3)

    def test_tight_upper_bound_prunes(self):
        st = Store()
        xs = [st.new_var(d) for d in ({1}, {0, 1}, {1})]
        card1 = st.new_var({0, 1, 2}, bc=True)
        st.register(GccColumn(xs, [card1], [1]))
        st.propagate()
        # two cells already fixed to 1, so the undecided cell loses it
        assert set(st.dom(xs[1])) == {0}

    def test_tight_lower_bound_forces(self):
        st = Store()
        xs = [st.new_var({0, 1}), st.new_var({0}), st.new_var({0, 1})]
        card1 = st.new_var({2}, bc=True)
        st.register(GccColumn(xs, [card1], [1]))
        st.propagate()
        assert set(st.dom(xs[0])) == {1} and set(st.dom(xs[2])) == {1}

    def test_infeasible_count_fails(self):
        st = Store()
        xs = [st.new_var({1}), st.new_var({1})]
        card1 = st.new_var({1}, bc=True)
        st.register(GccColumn(xs, [card1], [1]))
        assert st.propagate() == "failed"

    def test_fuzz_sound_and_counts_exact(self):
        rng = random.Random(404)
        for _ in range(80):
            n = rng.randint(1, 5)
            doms = [set(rng.sample((0, 1, 2), rng.randint(1, 3))) for _ in range(n)]
            lo = rng.randint(0, n)
            hi = rng.randint(lo, n)
            sols = [w for w in product((0, 1, 2), repeat=n)
                    if all(w[i] in doms[i] for i in range(n))
                    and lo <= sum(1 for v in w if v == 1) <= hi]
            st = Store()
            xs = [st.new_var(dm) for dm in doms]
            card = st.new_var(range(lo, hi + 1), bc=True)
            st.register(GccColumn(xs, [card], [1]))
            try:
                status = st.propagate()
            except Inconsistent:
                status = "failed"
            if not sols:
                assert status == "failed"
                continue
            assert status == "stable"
            for i in range(n):
                support = {w[i] for w in sols}
                assert support <= set(st.dom(xs[i]))
            counts = {sum(1 for v in w if v == 1) for w in sols}
            assert st.vmin(card) <= min(counts) and st.vmax(card) >= max(counts)


class TestLinearEq:
    def test_forces_remaining_variable(self):
        st = Store()
        a = st.new_var({2}, bc=True)
        b = st.new_var(range(0, 10), bc=True)
        st.register(LinearEq([1, 1], [a, b], 7))
        st.propagate()
        assert st.value(b) == 5

    def test_negative_coefficients(self):
        st = Store()
        a = st.new_var(range(0, 5), bc=True)
        b = st.new_var(range(0, 5), bc=True)
        # a - b == 2
        st.register(LinearEq([1, -1], [a, b], 2))
        st.propagate()
        assert st.vmin(a) == 2 and st.vmax(b) == 2

    def test_infeasible_sum_fails(self):
        st = Store()
        a = st.new_var({0, 1}, bc=True)
        b = st.new_var({0, 1}, bc=True)
        st.register(LinearEq([1, 1], [a, b], 5))
        assert st.propagate() == "failed"


class TestExpressions:
    def test_min_max_evaluation(self):
        st = Store()
        a = st.new_var(range(1, 4), bc=True)   # [1,3]
        b = st.new_var(range(2, 6), bc=True)   # [2,5]
        e = SumE([VarE(a), ScaleE(2, VarE(b)), ConstE(-1)])
        assert e.bounds(st) == (4, 12)
        assert MaxE([VarE(a), VarE(b)]).bounds(st) == (2, 5)
        assert MinE([VarE(a), VarE(b)]).bounds(st) == (1, 3)

    def test_relation_le_prunes_both_sides(self):
        # max(0, a - 2) <= b with b binary caps a at 3
        st = Store()
        a = st.new_var(range(0, 6), bc=True)
        b = st.new_var({0, 1}, bc=True)
        st.register(Relation("le",
                             MaxE([ConstE(0), SumE([VarE(a), ConstE(-2)])]),
                             VarE(b)))
        st.propagate()
        assert (st.vmin(a), st.vmax(a)) == (0, 3)

    def test_relation_eq_meets_intervals(self):
        st = Store()
        a = st.new_var(range(0, 10), bc=True)
        b = st.new_var(range(4, 20), bc=True)
        st.register(Relation("eq", VarE(a), VarE(b)))
        st.propagate()
        assert (st.vmin(a), st.vmax(a)) == (4, 9)
        assert (st.vmin(b), st.vmax(b)) == (4, 9)

    def test_relation_failure(self):
        st = Store()
        a = st.new_var({5}, bc=True)
        b = st.new_var({0, 1}, bc=True)
        st.register(Relation("le", VarE(a), VarE(b)))
        assert st.propagate() == "failed"

    def test_fuzz_relation_soundness(self):
        """Bounds reasoning never cuts off a satisfying assignment."""
        rng = random.Random(909)
        for _ in range(100):
            st = Store()
            lo1, lo2 = rng.randint(0, 3), rng.randint(0, 3)
            a = st.new_var(range(lo1, lo1 + rng.randint(1, 4)), bc=True)
            b = st.new_var(range(lo2, lo2 + rng.randint(1, 4)), bc=True)
            lhs = SumE([VarE(a), ScaleE(rng.choice((-2, -1, 1, 2)), VarE(b))])
            rhs = ConstE(rng.randint(-2, 6))
            op = rng.choice(("le", "eq"))
            sols = []
            for va in st.dom(a):
                for vb in st.dom(b):
                    lv = va + lhs.children[1].coef * vb
                    if (op == "le" and lv <= rhs.c) or (op == "eq" and lv == rhs.c):
                        sols.append((va, vb))
            st.register(Relation(op, lhs, rhs))
            try:
                status = st.propagate()
            except Inconsistent:
                status = "failed"
            if not sols:
                assert status == "failed"
                continue
            assert status == "stable"
            for va, vb in sols:
                assert st.vmin(a) <= va <= st.vmax(a)
                assert st.vmin(b) <= vb <= st.vmax(b)


class TestLex:
    def enumerate_pairs(self, st, xs, ys):
        got = []
        search(st, xs + ys,
               on_solution=lambda s: (got.append((tuple(s[x] for x in xs),
                                                  tuple(s[y] for y in ys))), False)[1])
        return got

    def test_le_matches_tuple_order(self):
        st = Store()
        xs = [st.new_var({0, 1}) for _ in range(2)]
        ys = [st.new_var({0, 1}) for _ in range(2)]
        st.register(LexLe(xs, ys))
        got = self.enumerate_pairs(st, xs, ys)
        want = [(a, b) for a in product((0, 1), repeat=2)
                for b in product((0, 1), repeat=2) if a <= b]
        assert sorted(got) == sorted(want)

    def test_strict_excludes_equal(self):
        st = Store()
        xs = [st.new_var({0, 1}) for _ in range(2)]
        ys = [st.new_var({0, 1}) for _ in range(2)]
        st.register(LexLe(xs, ys, strict=True))
        got = self.enumerate_pairs(st, xs, ys)
        assert all(a < b for a, b in got)
        assert len(got) == sum(1 for a in product((0, 1), repeat=2)
                               for b in product((0, 1), repeat=2) if a < b)

    def test_forced_prefix_propagates(self):
        st = Store()
        xs = [st.new_var({1}), st.new_var({1})]
        ys = [st.new_var({0, 1}), st.new_var({0, 1})]
        st.register(LexLe(xs, ys))
        st.propagate()
        assert set(st.dom(ys[0])) == {1}
        assert set(st.dom(ys[1])) == {1}

    def test_chain_posts_pairwise(self):
        st = Store()
        rows = [[st.new_var({0, 1})] for _ in range(3)]
        props = post_lex_chain(st, rows)
        assert len(props) == 2
        st.assign(rows[0][0], 1)
        st.propagate()
        assert st.value(rows[2][0]) == 1


class TestSumColumn:
    def test_external_value_mapping(self):
        # cells index into (-1, 0, 1); a sum in [2,3] rules the -1 out
        st = Store()
        xs = [st.new_var({0, 1, 2}) for _ in range(3)]
        st.register(SumColumn(xs, (-1, 0, 1), 2, 3))
        assert st.propagate() == "stable"
        assert [set(st.dom(x)) for x in xs] == [{1, 2}] * 3

    def test_impossible_interval_fails(self):
        st = Store()
        xs = [st.new_var({0, 1}) for _ in range(2)]
        st.register(SumColumn(xs, (0, 1), 3, 4))
        assert st.propagate() == "failed"

    def test_fuzz_against_enumeration(self):
        rng = random.Random(55)
        ext = (-1, 0, 2)
        for _ in range(60):
            n = rng.randint(1, 4)
            doms = [set(rng.sample((0, 1, 2), rng.randint(1, 3))) for _ in range(n)]
            lo = rng.randint(-2, 3)
            hi = lo + rng.randint(0, 4)
            sols = [w for w in product((0, 1, 2), repeat=n)
                    if all(w[i] in doms[i] for i in range(n))
                    and lo <= sum(ext[v] for v in w) <= hi]
            st = Store()
            xs = [st.new_var(dm) for dm in doms]
            st.register(SumColumn(xs, ext, lo, hi))
            try:
                status = st.propagate()
            except Inconsistent:
                status = "failed"
            if not sols:
                assert status == "failed"
                continue
            assert status == "stable"
            for i in range(n):
                assert {w[i] for w in sols} <= set(st.dom(xs[i]))


class TestStretchLengthWindows:
    def post(self, card_values, zmin_dom, zmax_dom, n_rows=1):
        st = Store()
        cards = [st.new_var(dm if isinstance(dm, (set, range)) else {dm}, bc=True)
                 for dm in card_values]
        zmin = st.new_var(zmin_dom, bc=True)
        zmax = st.new_var(zmax_dom, bc=True)
        st.register(StretchLengthWindows([VarE(c) for c in cards],
                                         zmin, zmax, n_rows))
        return st

    def test_overlong_run_fails(self):
        # a single row with four straight counted cells cannot respect max 2
        st = self.post((1, 1, 1, 1), range(0, 6), {2})
        assert st.propagate() == "failed"

    def test_consistent_word_passes(self):
        st = self.post((1, 1, 0, 1), {1}, {2})
        assert st.propagate() == "stable"

    def test_exhaustive_single_row_soundness(self):
        """For every binary word, the true length extremes survive."""
        n = 5
        for w in product((0, 1), repeat=n):
            lengths = []
            run = 0
            for v in w:
                run = run + 1 if v else 0
                if v and (run == 1):
                    lengths.append(0)
                if v:
                    lengths[-1] += 1
            if lengths:
                zmin, zmax = min(lengths), max(lengths)
            else:
                zmin, zmax = n + 1, 0
            st = self.post(tuple(w), {zmin}, {zmax})
            assert st.propagate() == "stable", (w, zmin, zmax)
