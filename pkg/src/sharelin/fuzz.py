"""Randomised oracle harness.

Each trial draws a satisfiable base system ``E0``, takes its exact
abstraction (occurrence groups, free variables, linear variables, and the
groundness formula of its solved form) as the starting state, then solves a
further random equation list ``E'`` abstractly and asks the concrete oracle
whether every claimed property still holds for ``E0 + E'``. A counterexample
is reported as a replayable problem file: the analysis input plus ``# e0``
comment lines recording the base system.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .amgu import (
    AlgorithmId,
    AmguConfig,
    AnalysisProblem,
    amgu1,
    amgu2,
    amgu3,
    analyze,
    decomposed_reference,
)
from .concrete import (
    binding_multiplicity,
    describes,
    groundness_abstraction,
    is_free,
    sharing_abstraction,
    unify,
)
from .problem_io import (
    _LineScanner,
    _parse_term,
    format_term,
    parse_problem,
    print_problem,
)
from .sharing import (
    SharingTriple,
    abstract_multiplicity,
    freeness_decomposition,
    group_vars,
    pairwise_union,
    relevant,
    union_closure,
)
from .terms import Compound, Equation, Term, Variable, VariableUniverse

FUNCTORS = (("a", 0), ("f", 1), ("g", 2), ("h", 3))
MAX_PERMUTATIONS = 6


@dataclass(frozen=True)
class FuzzLimits:
    max_vars: int = 4
    max_depth: int = 3
    max_eqs: int = 3
    file_bound: int = 8


@dataclass(frozen=True)
class Violation:
    trial: int
    prop: str
    detail: str
    problem_text: str

    def render(self) -> str:
        header = f"# counterexample trial={self.trial} property={self.prop}\n# {self.detail}\n"
        return header + self.problem_text


@dataclass
class FuzzReport:
    seed: int
    trials: int
    checked: int = 0
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, key: str) -> None:
        self.stats[key] = self.stats.get(key, 0) + 1


def random_term(rng: random.Random, variables: tuple[Variable, ...], depth: int) -> Term:
    if depth <= 0 or rng.random() < 0.35:
        if variables and rng.random() < 0.8:
            return rng.choice(variables)
        return Compound("a")
    functor, arity = rng.choice(FUNCTORS)
    return Compound(
        functor, tuple(random_term(rng, variables, depth - 1) for _ in range(arity))
    )


def random_equation(rng: random.Random, variables: tuple[Variable, ...], depth: int) -> Equation:
    if variables and rng.random() < 0.5:
        return Equation(rng.choice(variables), random_term(rng, variables, depth))
    return Equation(random_term(rng, variables, depth), random_term(rng, variables, depth))


@dataclass(frozen=True)
class Instance:
    universe: VariableUniverse
    base: tuple[Equation, ...]       # satisfiable by construction
    equations: tuple[Equation, ...]  # at least one


def generate_instance(rng: random.Random, limits: FuzzLimits) -> Instance:
    while True:
        n = rng.randint(1, limits.max_vars)
        universe = VariableUniverse.of_names(f"x{i}" for i in range(1, n + 1))
        variables = universe.variables
        base = tuple(
            random_equation(rng, variables, limits.max_depth)
            for _ in range(rng.randint(0, limits.max_eqs))
        )
        if not unify(base).success:
            continue
        equations = tuple(
            random_equation(rng, variables, limits.max_depth)
            for _ in range(rng.randint(1, limits.max_eqs))
        )
        return Instance(universe, base, equations)


def exact_abstraction(universe: VariableUniverse, equations: tuple[Equation, ...]):
    """The strongest state and formula describing the system's solved form."""
    rsf = unify(equations).solved_form
    groups = sharing_abstraction(rsf, universe)
    free = universe.mask_of(v for v in universe if is_free(rsf, v))
    linear = universe.mask_of(v for v in universe if binding_multiplicity(rsf, v) <= 1)
    triple = SharingTriple.make(universe, groups, free, linear)
    return rsf, triple, groundness_abstraction(rsf, universe)


def _counterexample_text(instance: Instance, triple: SharingTriple, formula, equations) -> str:
    problem = AnalysisProblem(instance.universe, triple, formula, tuple(equations))
    preamble = "".join(
        f"# e0 {_format_eq(eq)}\n" for eq in instance.base
    )
    return preamble + print_problem(problem)


def _format_eq(eq: Equation) -> str:
    return f"{format_term(eq.lhs)} = {format_term(eq.rhs)}"


def _result_invariants(result: SharingTriple) -> str | None:
    if 0 not in result.groups:
        return "result lost the empty group"
    if result.free & ~result.linear:
        return "a free variable is not linear in the result"
    if group_vars(result.groups) & ~result.universe.full_mask:
        return "result groups escape the universe"
    return None


def check_instance(
    instance: Instance, limits: FuzzLimits, trial: int = 0, report: FuzzReport | None = None
) -> list:
    """Run the whole property battery on one instance.

    ``report.stats`` records how often the conditional checks actually
    fired, so a caller can tell a vacuous pass from a real one.
    """
    count = report.count if report is not None else (lambda key: None)
    violations: list[Violation] = []
    universe = instance.universe
    rsf0, triple0, formula0 = exact_abstraction(universe, instance.base)
    full_system = instance.base + instance.equations
    full_outcome = unify(full_system)

    def record(prop: str, detail: str, equations=instance.equations) -> None:
        violations.append(
            Violation(trial, prop, detail, _counterexample_text(instance, triple0, formula0, equations))
        )

    # every occurrence-group complement is a model of the groundness formula
    for label, rsf in (("base", rsf0),) + (
        (("full", full_outcome.solved_form),) if full_outcome.success else ()
    ):
        formula = groundness_abstraction(rsf, universe)
        complements = {
            universe.full_mask & ~g for g in sharing_abstraction(rsf, universe)
        }
        if not complements <= set(formula.models):
            record(
                "occurrence-complements-are-groundness-models",
                f"violated for the {label} system",
            )

    # solved forms do not depend on equation order
    if full_outcome.success:
        shuffled = list(full_system)
        random.Random(trial).shuffle(shuffled)
        other = unify(shuffled).solved_form
        rsf = full_outcome.solved_form
        same = (
            sharing_abstraction(rsf, universe) == sharing_abstraction(other, universe)
            and groundness_abstraction(rsf, universe) == groundness_abstraction(other, universe)
            and all(is_free(rsf, v) == is_free(other, v) for v in universe)
            and all(
                binding_multiplicity(rsf, v) == binding_multiplicity(other, v)
                for v in universe
            )
        )
        if not same:
            record("unify-order-insensitive", "permuted system abstracts differently")

    # single-step checks on the first equation
    s, t = instance.equations[0].lhs, instance.equations[0].rhs
    step_system = instance.base + (instance.equations[0],)
    step_sat = unify(step_system).success
    results = {}
    for name, fn in (("amgu1", amgu1), ("amgu2", amgu2), ("amgu3", amgu3)):
        result = fn(triple0, s, t)
        results[name] = result
        bad = _result_invariants(result)
        if bad:
            record(f"{name}-invariants", bad, equations=(instance.equations[0],))
        if step_sat and not describes(result, step_system):
            record(
                f"{name}-soundness",
                "result does not describe the solved form",
                equations=(instance.equations[0],),
            )
        widened = fn(triple0, s, t, trade_efficiency=True)
        if not set(result.groups) <= set(widened.groups):
            record(
                f"{name}-trade-widens",
                "trading efficiency produced a smaller group set",
                equations=(instance.equations[0],),
            )
        if step_sat and not describes(widened, step_system):
            record(
                f"{name}-trade-soundness",
                "traded result does not describe the solved form",
                equations=(instance.equations[0],),
            )

    if not set(results["amgu3"].groups) <= set(results["amgu2"].groups) or not set(
        results["amgu2"].groups
    ) <= set(results["amgu1"].groups):
        record("precision-chain", "amgu3/amgu2/amgu1 group sets are not a chain",
               equations=(instance.equations[0],))

    if step_sat:
        count("single-step-satisfiable")

    if len(triple0.groups) <= limits.file_bound:
        count("decomposed-checked")
        reference = decomposed_reference(triple0, s, t, file_bound=limits.file_bound)
        if not set(reference.groups) <= set(results["amgu2"].groups):
            record("decomposed-within-amgu2", "reference exceeded the amgu2 group set",
                   equations=(instance.equations[0],))
        if step_sat and not describes(reference, step_system):
            record("decomposed-soundness", "reference does not describe the solved form",
                   equations=(instance.equations[0],))

    # independence: with variable-disjoint relevant groups and both sides
    # linear, no closure is needed at all
    s_mask = universe.term_mask(s)
    t_mask = universe.term_mask(t)
    rel_s = relevant(triple0.groups, s_mask)
    rel_t = relevant(triple0.groups, t_mask)
    chi_s = abstract_multiplicity(s, triple0.groups, triple0.linear, universe)
    chi_t = abstract_multiplicity(t, triple0.groups, triple0.linear, universe)
    if group_vars(rel_s) & group_vars(rel_t) == 0 and chi_s == 1 and chi_t == 1:
        count("independence-checked")
        removed = set(rel_s) | set(rel_t)
        expected = sorted(
            {g for g in triple0.groups if g not in removed}
            | set(pairwise_union(rel_s, rel_t))
        )
        if list(results["amgu1"].groups) != expected:
            record("independence-identity",
                   "independent linear sides should not need closure",
                   equations=(instance.equations[0],))

    # full pipeline: every algorithm, pruning on and off, equation order permuted
    for algo in (AlgorithmId.AMGU1, AlgorithmId.AMGU2, AlgorithmId.AMGU3):
        for prune in (False, True):
            perms = itertools.islice(
                itertools.permutations(instance.equations), MAX_PERMUTATIONS
            )
            for k, perm in enumerate(perms):
                config = AmguConfig(algorithm=algo, early_prune=prune)
                problem = AnalysisProblem(universe, triple0, formula0, perm)
                result = analyze(problem, config)
                tag = f"analysis[{algo.name.lower()},prune={'on' if prune else 'off'},perm={k}]"
                bad = _result_invariants(result)
                if bad:
                    record(tag + "-invariants", bad, equations=perm)
                if full_outcome.success:
                    count("analysis-satisfiable")
                    if not describes(result, full_system):
                        record(tag, "result does not describe the solved form", equations=perm)

    return violations


def run_trials(seed: int, trials: int, limits: FuzzLimits = FuzzLimits()) -> FuzzReport:
    rng = random.Random(seed)
    report = FuzzReport(seed=seed, trials=trials)
    for trial in range(trials):
        instance = generate_instance(rng, limits)
        report.violations.extend(check_instance(instance, limits, trial, report))
        report.checked += 1
    return report


def _random_group_state(rng: random.Random, max_vars: int, max_groups: int):
    n = rng.randint(1, max_vars)
    universe = VariableUniverse.of_names(f"x{i}" for i in range(1, n + 1))
    full = universe.full_mask
    groups = {0} | {rng.randint(0, full) for _ in range(rng.randint(0, max_groups))}
    free = rng.randint(0, full)
    return universe, tuple(sorted(groups)), free


def coincidence_trials(seed: int, target_blocks: int, max_vars: int = 5) -> FuzzReport:
    """Within any freeness block, the guarded operations coincide with the
    plain ones; checked over random states until enough blocks are seen."""
    rng = random.Random(seed)
    report = FuzzReport(seed=seed, trials=target_blocks)

    def pick_subset(block):
        return tuple(g for g in block if rng.random() < 0.7)

    while report.checked < target_blocks:
        universe, groups, free = _random_group_state(rng, max_vars, max_groups=5)
        for block in freeness_decomposition(groups, free, max_groups=8):
            sub = pick_subset(block)
            sub1 = pick_subset(block)
            sub2 = pick_subset(block)
            closed1 = union_closure(sub1)
            closed2 = union_closure(sub2)
            checks = (
                ("guarded-closure", union_closure(sub, free), union_closure(sub)),
                ("guarded-union", pairwise_union(sub1, sub2, free), pairwise_union(sub1, sub2)),
                ("closed-left", pairwise_union(closed1, sub2, free), pairwise_union(closed1, sub2)),
                ("closed-right", pairwise_union(sub1, closed2, free), pairwise_union(sub1, closed2)),
                ("closed-both", pairwise_union(closed1, closed2, free), pairwise_union(closed1, closed2)),
            )
            for name, guarded, plain in checks:
                if guarded != plain:
                    report.violations.append(
                        Violation(
                            report.checked,
                            f"block-coincidence-{name}",
                            f"universe={universe.names} groups={groups} free={free:#x} block={block}",
                            "",
                        )
                    )
            report.checked += 1
            if report.checked >= target_blocks:
                break
    return report


def replay(text: str, limits: FuzzLimits = FuzzLimits()) -> list:
    """Re-run the property battery on a counterexample file.

    The base system is read back from the ``# e0`` comment lines; the
    recorded state and formula are cross-checked against it first.
    """
    problem = parse_problem(text)
    base: list[Equation] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped.startswith("# e0"):
            continue
        scanner = _LineScanner(stripped[len("# e0"):], lineno)
        lhs = _parse_term(scanner, problem.universe)
        scanner.expect("=")
        rhs = _parse_term(scanner, problem.universe)
        scanner.expect_end()
        base.append(Equation(lhs, rhs))
    instance = Instance(problem.universe, tuple(base), problem.equations)
    if not unify(instance.base).success:
        return [
            Violation(0, "replay-base-unsatisfiable", "recorded base system does not unify", text)
        ]
    _, triple0, formula0 = exact_abstraction(problem.universe, instance.base)
    stale: list[Violation] = []
    if triple0 != problem.initial:
        stale.append(
            Violation(0, "replay-state-mismatch",
                      "recorded state differs from the base system's abstraction", text)
        )
    recorded = problem.formula
    if recorded is not None and recorded != formula0:
        stale.append(
            Violation(0, "replay-formula-mismatch",
                      "recorded formula differs from the base system's groundness", text)
        )
    return stale + check_instance(instance, limits)
