import random

import pytest

from gcls.core import (
    BOT,
    Clause,
    Literal,
    MultiClauseSet,
    PartialAssignment,
    VariableTable,
    apply,
    assign,
    top,
)
from gcls.matching import is_matching_lean, max_deficiency, surplus
from gcls.reductions import (
    AutarkyStep,
    DomainShrinkStep,
    ForcedValueStep,
    VariableEliminationStep,
    _elimination_bound,
    _first_pure,
    dp_resolve,
    is_blocked,
    is_singular,
    lift_through_steps,
    pure_variable_elimination,
    r_reduction,
    r_reduction_with_log,
    resolvents,
    s_reduction,
    s_reduction_with_log,
    singular_dp,
    subsumption_elimination,
    unit_clause_propagation,
)

import oracles
from test_core import mixed_example


def ternary_units():
    """All three unit clauses over a single ternary variable."""
    table = VariableTable({1: 3})
    return MultiClauseSet(table, [Clause([(1, 0)]), Clause([(1, 1)]),
                                  Clause([(1, 2)])])


def chain_example():
    """A unit over a ternary variable feeding a binary clause."""
    table = VariableTable({1: 3, 2: 2})
    return MultiClauseSet(table, [Clause([(1, 0)]),
                                  Clause([(1, 1), (2, 0)])])


def full_combinations():
    """Every boolean clause over two variables: unsatisfiable, deficiency 2."""
    table = VariableTable({1: 2, 2: 2})
    return MultiClauseSet(table, [
        Clause([(1, 0), (2, 0)]),
        Clause([(1, 0), (2, 1)]),
        Clause([(1, 1), (2, 0)]),
        Clause([(1, 1), (2, 1)]),
    ])


def doubled_pair():
    """Two clashing boolean clauses, each twice: a multi-clause-set fixpoint."""
    table = VariableTable({1: 2, 2: 2})
    return MultiClauseSet(table, {Clause([(1, 0), (2, 0)]): 2,
                                  Clause([(1, 1), (2, 1)]): 2})


def assert_sat_equivalent(F, G):
    assert oracles.brute_satisfiable(F) == oracles.brute_satisfiable(G)


def assert_lift_recovers_model(F, G, steps):
    """Any model of G must lift through the steps to a model of F."""
    model = oracles.brute_models(G)[0]
    assert oracles.satisfies(lift_through_steps(steps, model), F)


class TestUnitClausePropagation:
    def test_ternary_units_collapse(self):
        G, steps = unit_clause_propagation(ternary_units())
        assert G.clauses() == (BOT,)
        assert len(steps) == 3

    def test_existing_bottom_short_circuits(self):
        table = VariableTable({1: 2})
        F = MultiClauseSet(table, [BOT, Clause([(1, 0)])])
        G, steps = unit_clause_propagation(F)
        assert G.clauses() == (BOT,) and steps == ()

    def test_chain_renames_the_shrunk_variable(self):
        F = chain_example()
        G, steps = unit_clause_propagation(F)
        assert G.var_set() == {2, 3}
        assert G.clauses() == (Clause([(2, 0), (3, 0)]),)
        assert G.table.domain_size(3) == 2
        assert steps == (DomainShrinkStep(old_var=1, new_var=3, excluded_value=0),)
        lifted = lift_through_steps(steps, PartialAssignment({2: 0, 3: 1}))
        assert lifted == PartialAssignment({1: 2, 2: 0})
        assert oracles.satisfies(lifted, F)

    def test_mixed_unsatisfiable_example(self):
        _, f1, _ = mixed_example()
        G, _ = unit_clause_propagation(f1)
        assert G.clauses() == (BOT,)

    def test_random_contract(self):
        rng = random.Random(501)
        for _ in range(60):
            F = oracles.random_instance(rng, max_n=5, max_c=9)
            G, steps = unit_clause_propagation(F)
            assert_sat_equivalent(F, G)
            assert all(G.table.domain_size(v) > 1 for v in G.var_set())
            if G.clauses() != (BOT,):
                assert not any(len(c) == 1 for c in G.clauses())
            again, more = unit_clause_propagation(G)
            assert again == G and more == ()
            if oracles.brute_satisfiable(F):
                assert_lift_recovers_model(F, G, steps)


class TestPureVariableElimination:
    def test_two_sided_example_dissolves(self):
        _, _, f2 = mixed_example()
        assert pure_variable_elimination(f2).c == 0

    def test_no_pure_values_is_a_fixpoint(self):
        _, f1, _ = mixed_example()
        assert pure_variable_elimination(f1) == f1

    def test_random_contract(self):
        rng = random.Random(502)
        for _ in range(60):
            F = oracles.random_instance(rng, max_n=5, max_c=9)
            G = pure_variable_elimination(F)
            assert_sat_equivalent(F, G)
            assert _first_pure(G) is None
            assert all(G.multiplicity(c) <= F.multiplicity(c)
                       for c in G.clauses())


class TestSubsumptionElimination:
    def test_empty_clause_subsumes_everything(self):
        table = VariableTable({1: 2})
        F = MultiClauseSet(table, {BOT: 2, Clause([(1, 0)]): 1})
        G = subsumption_elimination(F)
        assert G.clauses() == (BOT,) and G.multiplicity(BOT) == 2

    def test_subsumption_free_is_unchanged(self):
        _, f1, _ = mixed_example()
        assert subsumption_elimination(f1) == f1

    def test_boolean_multihitting_leaves_unique_core(self):
        core = full_combinations()
        table = core.table.declare(3, 2)
        fat = Clause([(1, 0), (2, 0), (3, 0)])
        F = MultiClauseSet(table, list(core.clauses()) + [fat])
        G = subsumption_elimination(F)
        assert set(G.clauses()) == set(core.clauses())
        assert oracles.brute_is_minimally_unsatisfiable(G)

    def test_ternary_multihitting_leaves_unique_core(self):
        units = ternary_units()
        table = units.table.declare(2, 2)
        F = MultiClauseSet(table, list(units.clauses()) +
                           [Clause([(1, 0), (2, 0)])])
        G = subsumption_elimination(F)
        assert set(G.clauses()) == set(units.clauses())
        assert oracles.brute_is_minimally_unsatisfiable(G)

    def test_random_keeps_exactly_the_minimal_clauses(self):
        rng = random.Random(503)
        for _ in range(60):
            F = oracles.random_instance(rng, max_n=5, max_c=9)
            G = subsumption_elimination(F)
            for phi in oracles.total_assignments(F.table, F.var_set()):
                assert oracles.satisfies(phi, F) == oracles.satisfies(phi, G)
            clauses = F.clauses()
            for c in clauses:
                if any(other < c for other in clauses):
                    assert c not in G
                else:
                    assert G.multiplicity(c) == F.multiplicity(c)


class TestResolvents:
    def test_clashing_side_literals_have_no_resolvent(self):
        table = VariableTable({1: 2, 2: 2})
        parents = [Clause([(1, 0), (2, 0)]), Clause([(1, 1), (2, 1)])]
        assert resolvents(1, parents, table) is None

    def test_units_resolve_to_the_empty_clause(self):
        F = ternary_units()
        assert resolvents(1, F.clauses(), F.table) == BOT

    def test_ternary_resolvent_merges_side_literals(self):
        table = VariableTable({1: 3, 2: 2})
        parents = [Clause([(1, 0), (2, 0)]), Clause([(1, 1)]), Clause([(1, 2)])]
        R = resolvents(1, parents, table)
        assert R == Clause([(2, 0)])
        for phi in oracles.total_assignments(table, {1, 2}):
            if all(phi.satisfies_clause(c) for c in parents):
                assert phi.satisfies_clause(R)

    def test_parents_must_cover_each_value_once(self):
        table = VariableTable({1: 3, 2: 2})
        with pytest.raises(ValueError):
            resolvents(1, [Clause([(2, 0)]), Clause([(1, 1)]),
                           Clause([(1, 2)])], table)
        with pytest.raises(ValueError):
            resolvents(1, [Clause([(1, 0)]), Clause([(1, 0), (2, 0)]),
                           Clause([(1, 2)])], table)
        with pytest.raises(ValueError):
            resolvents(1, [Clause([(1, 0)]), Clause([(1, 1)])], table)


class TestDpResolve:
    def test_requires_the_variable_to_occur(self):
        with pytest.raises(ValueError):
            dp_resolve(ternary_units(), 2)

    def test_unit_resolution(self):
        table = VariableTable({1: 2, 2: 2})
        F = MultiClauseSet(table, [Clause([(1, 0)]), Clause([(1, 1), (2, 0)])])
        assert dp_resolve(F, 1).clauses() == (Clause([(2, 0)]),)

    def test_variable_with_unused_value_just_drops_its_clauses(self):
        table = VariableTable({1: 2, 2: 2})
        F = MultiClauseSet(table, [Clause([(1, 0), (2, 0)])])
        assert dp_resolve(F, 1).c == 0

    def test_mixed_example_eliminates_to_bottom(self):
        _, f1, _ = mixed_example()
        assert dp_resolve(dp_resolve(f1.as_set(), 2), 1).clauses() == (BOT,)

    def test_random_sat_equivalence_and_clause_bound(self):
        rng = random.Random(504)
        for _ in range(60):
            F = oracles.random_instance(rng, max_n=4, max_c=7).as_set()
            for v in sorted(F.var_set()):
                G = dp_resolve(F, v)
                assert G.set_view
                assert v not in G.var_set()
                assert_sat_equivalent(F, G)
                assert G.c <= _elimination_bound(F, v)


class TestSingularVariables:
    def test_detection(self):
        _, f1, _ = mixed_example()
        assert is_singular(f1, 1) and is_singular(f1, 2)
        F = full_combinations()
        assert not is_singular(F, 1) and not is_singular(F, 2)
        lonely = MultiClauseSet(VariableTable({1: 2}), [Clause([(1, 0)])])
        assert not is_singular(lonely, 1)

    def test_mixed_example_elimination_chain(self):
        _, f1, _ = mixed_example()
        G, degenerate = singular_dp(f1, 2)
        assert not degenerate
        assert set(G.clauses()) == {Clause([(1, 0)]), Clause([(1, 1)]),
                                    Clause([(1, 2)])}
        assert G.c == f1.c - 2 and G.delta == f1.delta
        H, degenerate = singular_dp(G, 1)
        assert not degenerate
        assert H.clauses() == (BOT,) and H.delta == f1.delta

    def test_clashing_resolvent_is_degenerate(self):
        table = VariableTable({1: 2, 2: 2})
        F = MultiClauseSet(table, [Clause([(1, 0), (2, 0)]),
                                   Clause([(1, 1), (2, 1)])])
        G, degenerate = singular_dp(F, 1)
        assert degenerate and G.c == 0

    def test_known_resolvent_is_degenerate(self):
        table = VariableTable({1: 2, 2: 2})
        F = MultiClauseSet(table, [Clause([(1, 0), (2, 0)]), Clause([(1, 1)]),
                                   Clause([(2, 0)])])
        G, degenerate = singular_dp(F, 1)
        assert degenerate
        assert G.clauses() == (Clause([(2, 0)]),)

    def test_rejects_non_singular_variables(self):
        with pytest.raises(ValueError):
            singular_dp(full_combinations(), 1)

    def test_random_non_degenerate_steps_preserve_structure(self):
        rng = random.Random(505)
        seen = 0
        for _ in range(150):
            F = oracles.random_instance(rng, max_n=4, max_c=7).as_set()
            v = next((w for w in sorted(F.var_set()) if is_singular(F, w)),
                     None)
            if v is None:
                continue
            G, degenerate = singular_dp(F, v)
            assert_sat_equivalent(F, G)
            if degenerate:
                continue
            seen += 1
            assert G.c == F.c - (F.table.domain_size(v) - 1)
            assert G.delta == F.delta
            assert is_matching_lean(G) == is_matching_lean(F)
            if is_matching_lean(F):
                assert max_deficiency(G).value == max_deficiency(F).value
        assert seen >= 10


class TestBlockedClauses:
    def test_requires_the_variable_in_the_clause(self):
        F = full_combinations()
        with pytest.raises(ValueError):
            is_blocked(Clause([(1, 0), (2, 0)]), F, 3)

    def test_clashing_pair_blocks_both_clauses(self):
        table = VariableTable({1: 2, 2: 2})
        a = Clause([(1, 0), (2, 0)])
        b = Clause([(1, 1), (2, 1)])
        F = MultiClauseSet(table, [a, b])
        for clause in (a, b):
            assert is_blocked(clause, F, 1)
            assert is_blocked(clause, F, 2)

    def test_shared_side_literal_is_not_blocked(self):
        table = VariableTable({1: 2, 2: 2})
        a = Clause([(1, 0), (2, 0)])
        b = Clause([(1, 1), (2, 0)])
        F = MultiClauseSet(table, [a, b])
        assert not is_blocked(a, F, 1)

    def test_clause_on_an_unused_value_is_blocked(self):
        table = VariableTable({1: 2, 2: 2})
        a = Clause([(1, 0), (2, 0)])
        F = MultiClauseSet(table, [a])
        assert is_blocked(a, F, 1)

    def test_random_removal_is_sat_equivalent(self):
        rng = random.Random(506)
        removed = 0
        for _ in range(80):
            F = oracles.random_instance(rng, max_n=4, max_c=6).as_set()
            for c in F.clauses():
                for v in sorted(c.variables):
                    if is_blocked(c, F, v):
                        removed += 1
                        G = F.with_clauses(
                            {d: 1 for d in F.clauses() if d != c})
                        assert_sat_equivalent(F, G)
        assert removed


class TestRReduction:
    def test_mixed_unsatisfiable_example_collapses(self):
        _, f1, _ = mixed_example()
        assert r_reduction(f1).clauses() == (BOT,)

    def test_doubled_pair_is_a_fixpoint(self):
        F = doubled_pair()
        assert r_reduction(F) == F

    def test_full_combinations_is_a_fixpoint(self):
        F = full_combinations()
        assert r_reduction(F) == F

    def test_random_contract(self):
        rng = random.Random(507)
        for _ in range(60):
            F = oracles.random_instance(rng, max_n=5, max_c=9)
            G, steps = r_reduction_with_log(F)
            assert_sat_equivalent(F, G)
            assert max_deficiency(G).value <= max_deficiency(F).value
            assert is_matching_lean(G)
            assert _first_pure(G) is None
            assert not any(is_singular(G, v) for v in G.var_set())
            if oracles.brute_satisfiable(F):
                assert_lift_recovers_model(F, G, steps)


class TestSReduction:
    def test_no_clauses_is_a_fixpoint(self):
        F = top(VariableTable({1: 3}))
        assert s_reduction(F) == F

    def test_surplus_two_is_a_fixpoint(self):
        F = full_combinations()
        assert s_reduction(F) == F

    def test_mixed_example_pair(self):
        _, f1, f2 = mixed_example()
        assert s_reduction(f1 + f2).clauses() == (BOT,)
        assert s_reduction(f2).c == 0

    def test_random_contract(self):
        rng = random.Random(508)
        for _ in range(60):
            F = oracles.random_instance(rng, max_n=5, max_c=9)
            G, steps = s_reduction_with_log(F)
            assert_sat_equivalent(F, G)
            if G.var_set():
                assert surplus(G, at_most=2).value >= 2
            if oracles.brute_satisfiable(F):
                assert_lift_recovers_model(F, G, steps)

    def test_boolean_descent_after_reduction(self):
        # On a reduced boolean instance with variables left, any single
        # assignment pushes the maximal deficiency strictly below delta.
        rng = random.Random(509)
        seen = 0
        for _ in range(150):
            F = oracles.random_instance(rng, max_n=5, max_dom=2, max_c=9)
            G = s_reduction(F)
            if not G.var_set():
                continue
            seen += 1
            for v in sorted(G.var_set()):
                for e in G.table.domain(v):
                    after = max_deficiency(apply(assign((v, e)), G)).value
                    assert after <= G.delta - 1
        assert seen >= 10
