import random

import pytest

from matrixcp.automata import (
    build_gcc_weights,
    build_sliding_word_counter,
    stretch_length_dfa,
    universal_dfa,
)
from matrixcp.generators import gen_random
from matrixcp.model import (
    MatrixModel,
    StretchCountProp,
    StretchLengthProp,
    WordProp,
    achievable_totals,
    build,
    default_properties,
    root_prune,
    solve,
)
from matrixcp.oracle import brute_solutions, brute_solve, check_solution


def permutation_model(n):
    """Each row places exactly one 1; each column receives exactly one."""
    rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(1, 1)])
    return MatrixModel(n, n, (0, 1), rule,
                       col_gcc=[{1: (1, 1)} for _ in range(n)],
                       rule_count_groups=[({1}, 0)])


class TestMatrixModel:
    def test_values_must_ascend(self):
        rule = universal_dfa((0, 1))
        with pytest.raises(ValueError):
            MatrixModel(1, 1, (2, 1), rule)

    def test_rule_alphabet_must_match_indices(self):
        with pytest.raises(ValueError):
            MatrixModel(1, 1, (0, 1), universal_dfa((0, 5)))

    def test_cell_domain_defaults_to_all_values(self):
        m = MatrixModel(2, 2, (3, 7), universal_dfa((0, 1)))
        assert m.cell_domain(0, 0) == frozenset({0, 1})

    def test_cell_domains_grid_normalized(self):
        m = MatrixModel(1, 2, (0, 1), universal_dfa((0, 1)),
                        cell_domains=[[{1}, {0, 1}]])
        assert m.cell_domain(0, 0) == frozenset({1})

    def test_card_bounds_clamped_to_row_count(self):
        m = MatrixModel(2, 1, (0, 1), universal_dfa((0, 1)),
                        col_gcc=[{1: (-3, 99)}])
        assert m.card_bounds(0, 1) == (0, 2)
        assert m.card_bounds(0, 0) == (0, 2)  # unconstrained value

    def test_default_properties_cover_each_value(self):
        props = default_properties(2)
        # per value: two word shapes, stretch count, stretch length
        assert len(props) == 8
        kinds = [type(p).__name__ for p in props]
        assert kinds.count("WordProp") == 4
        assert kinds.count("StretchCountProp") == 2
        assert kinds.count("StretchLengthProp") == 2


class TestAchievableTotals:
    def test_sliding_counter_totals(self):
        wd = build_sliding_word_counter(({1},), 3, (0, 1), with_total=True)
        assert achievable_totals(wd, 3) == [(0, 1), (0, 1), (0, 1), (0, 3)]

    def test_infeasible_returns_none(self):
        wd = build_gcc_weights((0, 1), groups=[{1}], bounds=[(5, 9)])
        assert achievable_totals(wd, 3) is None


class TestSolve:
    def test_permutation_first_solution(self):
        out = solve(permutation_model(3), mode="decomp")
        assert out.status == "sat"
        assert out.grid == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]

    @pytest.mark.parametrize("mode", ["decomp", "wa", "cwa"])
    def test_permutation_enumeration_counts(self, mode):
        seen = []
        solve(permutation_model(3), mode=mode,
              on_solution=lambda g: (seen.append(tuple(map(tuple, g))), False)[1])
        assert len(set(seen)) == 6

    @pytest.mark.parametrize("mode", ["decomp", "wa", "cwa"])
    def test_pinned_column_unsat(self, mode):
        m = MatrixModel(2, 2, (0, 1), build_gcc_weights((0, 1)),
                        col_gcc=[{1: (1, 1)}, {1: (1, 1)}],
                        cell_domains=[[{1}, {0, 1}], [{1}, {0, 1}]])
        assert solve(m, mode=mode).status == "unsat"

    def test_grid_reports_external_values(self):
        rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(1, 1)])
        m = MatrixModel(1, 2, (10, 20), rule, col_gcc=[{1: (0, 1)}] * 2)
        out = solve(m, mode="decomp")
        assert sorted(out.grid[0]) == [10, 20]

    def test_lex_rows_prunes_symmetric_duplicates(self):
        rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(1, 1)])
        base = dict(col_gcc=[{1: (0, 2)}, {1: (0, 2)}])
        free = MatrixModel(2, 2, (0, 1), rule, **base)
        ordered = MatrixModel(2, 2, (0, 1), rule, **base, lex_rows=True)
        count = lambda m: len(brute_solutions(m))
        assert count(free) == 4
        seen = []
        solve(ordered, mode="decomp",
              on_solution=lambda g: (seen.append(tuple(map(tuple, g))), False)[1])
        assert len(seen) == 3  # the two mirrored unequal-row grids collapse

    def test_time_limit_reports_timeout(self):
        m = gen_random(321, 6, 6, 3)
        out = solve(m, mode="decomp", time_limit=0.0)
        assert out.status in ("timeout", "sat", "unsat")


class TestModeContrast:
    def scarcity_model(self):
        # three rows each need one 1 but only two columns can take one;
        # no single column constraint sees the shortfall
        rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(1, 1)])
        return MatrixModel(3, 3, (0, 1), rule,
                           col_gcc=[{1: (0, 1)}, {1: (0, 1)}, {1: (0, 0)}],
                           rule_count_groups=[({1}, 0)])

    def test_aggregate_count_conditions_fail_at_root(self):
        m = self.scarcity_model()
        assert brute_solve(m)[0] == "unsat"
        assert root_prune(m, "decomp") is not None
        assert root_prune(m, "wa") is None
        assert root_prune(m, "cwa") is None

    def test_decomp_needs_search_where_wa_does_not(self):
        m = self.scarcity_model()
        out_d = solve(m, mode="decomp")
        out_w = solve(m, mode="wa")
        assert out_d.status == out_w.status == "unsat"
        assert not out_d.stats.root_failure
        assert out_w.stats.root_failure


class TestExplicitProperties:
    def word_model(self):
        rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(1, 2)])
        return MatrixModel(2, 3, (0, 1), rule,
                           col_gcc=[{1: (0, 2)} for _ in range(3)],
                           properties=[WordProp((frozenset({1}), frozenset({1})))],
                           rule_count_groups=[({1}, 0)])

    @pytest.mark.parametrize("aggregate", [False, True])
    def test_word_conditions_preserve_solutions(self, aggregate):
        m = self.word_model()
        want = {tuple(map(tuple, g)) for g in brute_solutions(m)}
        got = set()
        solve(m, mode="wa", aggregate_words=aggregate,
              on_solution=lambda g: (got.add(tuple(map(tuple, g))), False)[1])
        ext = {tuple(tuple(m.values[v] for v in row) for row in g) for g in want}
        assert got == ext

    @pytest.mark.parametrize("prop", [
        StretchCountProp(frozenset({1})),
        StretchLengthProp(frozenset({1})),
        WordProp((frozenset({0}),)),
    ])
    def test_single_property_models_solve(self, prop):
        rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(1, 2)])
        m = MatrixModel(2, 3, (0, 1), rule,
                        col_gcc=[{1: (0, 2)} for _ in range(3)],
                        properties=[prop])
        st, _ = brute_solve(m)
        for mode in ("wa", "cwa"):
            assert solve(m, mode=mode).status == st

    def test_filtering_row_rule_with_length_property(self):
        # rows: every 1-stretch exactly 2 long; columns cap the 1s
        rule = stretch_length_dfa({1}, (0, 1), 2, 2)
        m = MatrixModel(2, 4, (0, 1), rule,
                        col_gcc=[{1: (0, 1)} for _ in range(4)],
                        properties=[StretchLengthProp(frozenset({1}))])
        st, grid = brute_solve(m)
        assert st == "sat"
        for mode in ("decomp", "wa", "cwa"):
            out = solve(m, mode=mode)
            assert out.status == "sat"
            internal = [[m.values.index(v) for v in row] for row in out.grid]
            assert check_solution(m, internal)


class TestRootPruneMonotone:
    def test_modes_nest_pointwise(self):
        """Crossing prunes at least as much as measuring, which prunes at
        least as much as the plain decomposition."""
        rng = random.Random(77)
        for trial in range(25):
            m = gen_random(rng.randrange(10 ** 6), rng.randint(2, 3),
                           rng.randint(2, 4), rng.randint(2, 3))
            doms = {}
            for mode in ("decomp", "wa", "cwa"):
                doms[mode] = root_prune(m, mode)
            if doms["decomp"] is None:
                continue
            for strong, weak in (("wa", "decomp"), ("cwa", "wa")):
                if doms[strong] is None:
                    continue
                for i in range(m.n_rows):
                    for k in range(m.n_cols):
                        assert doms[strong][i][k] <= doms[weak][i][k], (
                            f"trial {trial} cell ({i},{k})")

    def test_solutions_never_pruned(self):
        rng = random.Random(78)
        for trial in range(15):
            m = gen_random(rng.randrange(10 ** 6), 2, 3, 2)
            sols = brute_solutions(m)
            for mode in ("decomp", "wa", "cwa"):
                doms = root_prune(m, mode)
                if doms is None:
                    assert not sols, f"trial {trial} {mode}"
                    continue
                for g in sols:
                    for i in range(m.n_rows):
                        for k in range(m.n_cols):
                            assert g[i][k] in doms[i][k]


class TestBuilt:
    def test_branch_vars_cover_cells(self):
        m = permutation_model(2)
        b = build(m, "decomp")
        assert len(b.branch_vars) == 4

    def test_root_infeasible_shortcut(self):
        # a rule whose bounds admit no length-K word at all
        rule = build_gcc_weights((0, 1), groups=[{1}], bounds=[(5, 9)])
        m = MatrixModel(2, 3, (0, 1), rule)
        b = build(m, "decomp")
        assert b.root_infeasible
        out = solve(m, mode="decomp")
        assert out.status == "unsat" and out.stats.root_failure
