"""The concrete oracle: unification, reachability, abstraction queries."""

import random

import pytest

from sharelin.concrete import (
    RationalSolvedForm,
    binding_multiplicity,
    describes,
    groundness_abstraction,
    is_free,
    occurrence_set,
    reachable_vars,
    sharing_abstraction,
    unify,
)
from sharelin.fuzz import FuzzLimits, generate_instance
from sharelin.groundness import parse_formula, truth
from sharelin.sharing import SharingTriple
from sharelin.terms import Compound, Equation, Variable, VariableUniverse

w, x, y, z = (Variable(n) for n in "wxyz")
WXYZ = VariableUniverse.of_names(["w", "x", "y", "z"])
XY = VariableUniverse.of_names(["x", "y"])


def f(*args):
    return Compound("f", args)


def g_(*args):
    return Compound("g", args)


# the solved form printed in the three-binding worked example
THETA = RationalSolvedForm.of({w: f(z, z, z), x: z, y: z})


def groups(universe, *names):
    return tuple(sorted(universe.mask_of(Variable(c) for c in n) for n in names))


class TestUnify:
    def test_collapses_to_single_leaf(self):
        outcome = unify([Equation(w, f(x, y, z)), Equation(w, f(z, x, y))])
        assert outcome.success
        rsf = outcome.solved_form
        # semantically the printed solved form, up to representative choice
        assert sharing_abstraction(rsf, WXYZ) == sharing_abstraction(THETA, WXYZ)
        assert groundness_abstraction(rsf, WXYZ) == groundness_abstraction(THETA, WXYZ)
        for v in WXYZ:
            assert is_free(rsf, v) == is_free(THETA, v)
            assert binding_multiplicity(rsf, v) == binding_multiplicity(THETA, v)

    def test_no_occurs_check(self):
        outcome = unify([Equation(x, f(x))])
        assert outcome.success
        assert not is_free(outcome.solved_form, x)

    def test_functor_clash(self):
        assert not unify([Equation(f(x), g_(x))]).success

    def test_arity_clash(self):
        assert not unify([Equation(f(x), f(x, y))]).success

    def test_deep_clash_through_bindings(self):
        assert not unify([Equation(x, f(y)), Equation(x, f(g_(y))), Equation(y, Compound("a"))]).success

    def test_empty_system(self):
        outcome = unify([])
        assert outcome.success and outcome.solved_form.bindings == ()

    def test_order_insensitive(self):
        eqs = [Equation(w, f(x, y, z)), Equation(w, f(z, x, y)), Equation(x, g_(y))]
        rng = random.Random(5)
        outcome = unify(eqs)
        for _ in range(5):
            rng.shuffle(eqs)
            other = unify(eqs)
            assert other.success == outcome.success
            if not outcome.success:
                continue
            assert sharing_abstraction(other.solved_form, WXYZ) == sharing_abstraction(
                outcome.solved_form, WXYZ
            )


class TestReachability:
    def test_one_step(self):
        rsf = RationalSolvedForm.of({x: f(y, z)})
        assert reachable_vars(rsf, x) == {y, z}

    def test_through_cycle(self):
        rsf = RationalSolvedForm.of({x: f(x, y)})
        assert reachable_vars(rsf, x) == {y}

    def test_printed_solved_form(self):
        assert reachable_vars(THETA, w) == {z}


class TestOccurrence:
    def test_shared_leaf(self):
        assert occurrence_set(THETA, z, WXYZ) == {w, x, y, z}

    def test_unbound_variable(self):
        rsf = RationalSolvedForm.of({})
        assert occurrence_set(rsf, x, XY) == {x}

    def test_ground_binding(self):
        rsf = RationalSolvedForm.of({x: Compound("a")})
        assert occurrence_set(rsf, x, XY) == frozenset()


class TestSharingAbstraction:
    def test_printed_solved_form(self):
        assert sharing_abstraction(THETA, WXYZ) == groups(WXYZ, "", "wxyz")

    def test_identity(self):
        assert sharing_abstraction(RationalSolvedForm.of({}), XY) == groups(XY, "", "x", "y")

    def test_duplicated_leaf(self):
        rsf = RationalSolvedForm.of({x: f(y, y)})
        assert sharing_abstraction(rsf, XY) == groups(XY, "", "xy")


class TestGroundnessAbstraction:
    def test_single_binding(self):
        u = VariableUniverse.of_names(["x", "y", "z"])
        rsf = RationalSolvedForm.of({x: f(y, z)})
        assert groundness_abstraction(rsf, u) == parse_formula("x <-> (y & z)", u)

    def test_identity_is_truth(self):
        assert groundness_abstraction(RationalSolvedForm.of({}), XY) == truth(XY)

    def test_printed_solved_form(self):
        expected = parse_formula("(w <-> z) & (x <-> z) & (y <-> z)", WXYZ)
        assert groundness_abstraction(THETA, WXYZ) == expected


class TestFreeness:
    def test_variable_chain(self):
        assert is_free(RationalSolvedForm.of({x: y}), x)

    def test_compound(self):
        assert not is_free(RationalSolvedForm.of({x: f(y)}), x)

    def test_unbound(self):
        assert is_free(RationalSolvedForm.of({}), x)


class TestMultiplicity:
    def test_printed_solved_form(self):
        assert binding_multiplicity(THETA, w) == 2
        assert binding_multiplicity(THETA, x) == 1

    def test_cycle_duplicates_leaf(self):
        rsf = RationalSolvedForm.of({x: f(x, y)})
        assert binding_multiplicity(rsf, x) == 2

    def test_ground_cycle(self):
        # unfolds to an infinite tree without variables
        rsf = RationalSolvedForm.of({x: f(x)})
        assert binding_multiplicity(rsf, x) == 0

    def test_ground_binding(self):
        assert binding_multiplicity(RationalSolvedForm.of({x: Compound("a")}), x) == 0

    def test_diamond_multiplies_walks(self):
        rsf = RationalSolvedForm.of({x: f(y, y), y: g_(z)})
        assert binding_multiplicity(rsf, x) == 2
        assert binding_multiplicity(rsf, y) == 1


class TestDescribes:
    def test_worked_example_state(self):
        state = SharingTriple.from_names(
            WXYZ, [("w", "x"), ("w", "y"), ("w", "z")], linear=("w", "x", "y", "z")
        )
        assert describes(state, [Equation(w, f(x, y, z))])

    def test_unsatisfiable_system(self):
        state = SharingTriple.from_names(XY, [("x", "y")])
        assert not describes(state, [Equation(Compound("a"), Compound("b"))])

    def test_missing_group(self):
        state = SharingTriple.from_names(XY, [])
        assert not describes(state, [Equation(x, y)])

    def test_freeness_claim_fails_on_compound(self):
        state = SharingTriple.from_names(XY, [("x", "y")], free=("x",))
        assert not describes(state, [Equation(x, f(y))])

    def test_linearity_claim_fails_on_duplicate(self):
        state = SharingTriple.from_names(XY, [("x", "y")], linear=("x",))
        assert not describes(state, [Equation(x, f(y, y))])


class TestSolvedFormInvariants:
    def test_variable_cycle_rejected(self):
        with pytest.raises(ValueError, match="cycle"):
            RationalSolvedForm.of({x: y, y: x})

    def test_identity_bindings_dropped(self):
        assert RationalSolvedForm.of({x: x}).bindings == ()

    def test_double_binding_rejected(self):
        with pytest.raises(ValueError, match="bound twice"):
            RationalSolvedForm(((x, y), (x, z)))

    def test_self_compound_cycle_allowed(self):
        rsf = RationalSolvedForm.of({x: f(x)})
        assert rsf.binding(x) == f(x)


def test_random_systems_uphold_oracle_invariants():
    rng = random.Random(9)
    limits = FuzzLimits(max_vars=4)
    for _ in range(150):
        instance = generate_instance(rng, limits)
        universe = instance.universe
        rsf = unify(instance.base).solved_form
        shares = sharing_abstraction(rsf, universe)
        assert 0 in shares
        formula = groundness_abstraction(rsf, universe)
        complements = {universe.full_mask & ~m for m in shares}
        assert complements <= set(formula.models)
        for v in universe:
            mult = binding_multiplicity(rsf, v)
            if is_free(rsf, v):
                assert mult == 1
            assert (mult == 0) == (not reachable_vars(rsf, v))
