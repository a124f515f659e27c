"""Groundness dependencies as positive Boolean functions over a universe.

A formula is stored as its explicit model set: every model is the bitmask
of variables assigned true. Positivity is exactly the condition that the
all-true assignment is a model. The explicit form keeps conjunction,
entailment and group trimming exact and easy to test; it is deliberately
bounded to small universes, which is where this analysis operates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .terms import Equation, VariableUniverse, term_vars

# Materialising a formula enumerates 2**n assignments (8 MiB of masks at the
# bound); universes past this need a symbolic backend, which is out of scope.
MAX_FORMULA_VARS = 20


class NotPositiveError(ValueError):
    """The expression is falsified by the all-true assignment."""


class UniverseTooLargeError(ValueError):
    """Explicit model sets are only supported for small universes."""


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, col: int):
        super().__init__(message)
        self.col = col


class UnknownFormulaVariable(ValueError):
    def __init__(self, name: str, col: int):
        super().__init__(f"undeclared variable {name!r} in formula")
        self.name = name
        self.col = col


@dataclass(frozen=True)
class PosFormula:
    """A positive Boolean function, given by its sorted model masks."""

    universe: VariableUniverse
    models: tuple[int, ...]

    @classmethod
    def of_models(cls, universe: VariableUniverse, models: Iterable[int]) -> "PosFormula":
        ms = sorted(set(int(m) for m in models))
        full = universe.full_mask
        if any(m & ~full for m in ms):
            raise ValueError("model mentions a variable outside the universe")
        if full not in ms:
            raise NotPositiveError("the all-true assignment is not a model")
        return cls(universe, tuple(ms))

    def is_truth(self) -> bool:
        return len(self.models) == 1 << len(self.universe)


def _assignment_masks(universe: VariableUniverse) -> np.ndarray:
    n = len(universe)
    if n > MAX_FORMULA_VARS:
        raise UniverseTooLargeError(
            f"building a groundness formula over {n} variables needs 2**{n} models; "
            f"the supported bound is {MAX_FORMULA_VARS}"
        )
    return np.arange(1 << n, dtype=np.uint64)


def truth(universe: VariableUniverse) -> PosFormula:
    """The formula with no groundness information: every assignment is a model."""
    return PosFormula.of_models(universe, _assignment_masks(universe).tolist())


def conjunction_of(universe: VariableUniverse, var_mask: int) -> PosFormula:
    """The conjunction of the variables in ``var_mask``."""
    masks = _assignment_masks(universe)
    sel = (masks & np.uint64(var_mask)) == np.uint64(var_mask)
    return PosFormula.of_models(universe, masks[sel].tolist())


def biconditional(universe: VariableUniverse, left_mask: int, right_mask: int) -> PosFormula:
    """``(/\\ left) <-> (/\\ right)`` as a model set."""
    masks = _assignment_masks(universe)
    lv = (masks & np.uint64(left_mask)) == np.uint64(left_mask)
    rv = (masks & np.uint64(right_mask)) == np.uint64(right_mask)
    return PosFormula.of_models(universe, masks[lv == rv].tolist())


def equation_groundness(eq: Equation, universe: VariableUniverse) -> PosFormula:
    """Groundness consequence of solving one equation: grounding every
    variable of one side grounds the other, in any unifier."""
    return biconditional(
        universe,
        universe.mask_of(term_vars(eq.lhs)),
        universe.mask_of(term_vars(eq.rhs)),
    )


def conjoin(f: PosFormula, g: PosFormula) -> PosFormula:
    if f.universe != g.universe:
        raise ValueError("conjoined formulas must share a universe")
    return PosFormula.of_models(f.universe, set(f.models) & set(g.models))


def entailed_ground(f: PosFormula) -> int:
    """Mask of the variables true in every model (the definitely-ground set)."""
    mask = f.universe.full_mask
    for m in f.models:
        mask &= m
    return mask


def trim(f: PosFormula, groups: Sequence[int]) -> tuple[int, ...]:
    """Keep the groups whose complement is a model of ``f``.

    A sharing group that survives can still bind a common variable once the
    rest of the universe is ground; any other group is impossible and is
    dropped. The empty group always survives (positivity).
    """
    model_set = set(f.models)
    full = f.universe.full_mask
    return tuple(g for g in groups if full & ~g in model_set)


# --- surface syntax ---------------------------------------------------------
#
#   formula := impl ('<->' formula)?
#   impl    := disj ('->' impl)?
#   disj    := conj ('|' conj)*
#   conj    := unary ('&' unary)*
#   unary   := '~' unary | 'true' | ident | '(' formula ')'
#
# '~' is permitted anywhere as long as the final result stays positive.

_TOKEN_RE = re.compile(r"<->|->|[()&|~]|[a-z][a-zA-Z0-9_]*")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos + 1)
        tokens.append((m.group(), m.start() + 1))
        pos = m.end()
    return tokens


class _FormulaParser:
    def __init__(self, tokens: list[tuple[str, int]], universe: VariableUniverse,
                 var_values: dict):
        self.tokens = tokens
        self.pos = 0
        self.universe = universe
        self.var_values = var_values

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next_col(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else (
            self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1
        )

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> np.ndarray:
        value = self.formula()
        if self.pos != len(self.tokens):
            raise FormulaSyntaxError(f"unexpected {self.peek()!r}", self.next_col())
        return value

    def formula(self) -> np.ndarray:
        left = self.impl()
        if self.peek() == "<->":
            self.take()
            right = self.formula()
            return left == right
        return left

    def impl(self) -> np.ndarray:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            right = self.impl()
            return ~left | right
        return left

    def disj(self) -> np.ndarray:
        value = self.conj()
        while self.peek() == "|":
            self.take()
            value = value | self.conj()
        return value

    def conj(self) -> np.ndarray:
        value = self.unary()
        while self.peek() == "&":
            self.take()
            value = value & self.unary()
        return value

    def unary(self) -> np.ndarray:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of formula", self.next_col())
        if tok == "~":
            self.take()
            return ~self.unary()
        if tok == "(":
            self.take()
            value = self.formula()
            if self.peek() != ")":
                raise FormulaSyntaxError("expected ')'", self.next_col())
            self.take()
            return value
        name, col = self.take()
        if name in ("&", "|", "->", "<->", ")"):
            raise FormulaSyntaxError(f"unexpected {name!r}", col)
        if name == "true":
            return np.ones(1 << len(self.universe), dtype=bool)
        if name not in self.var_values:
            raise UnknownFormulaVariable(name, col)
        return self.var_values[name]


def parse_formula(text: str, universe: VariableUniverse) -> PosFormula:
    """Parse the surface syntax into a formula; reject non-positive results."""
    masks = _assignment_masks(universe)
    var_values = {
        v.name: (masks >> np.uint64(i)) & np.uint64(1) != 0
        for i, v in enumerate(universe.variables)
    }
    tokens = _tokenize(text)
    if not tokens:
        raise FormulaSyntaxError("empty formula", 1)
    value = _FormulaParser(tokens, universe, var_values).parse()
    return PosFormula.of_models(universe, masks[value].tolist())


def format_formula(f: PosFormula) -> str:
    """Canonical text for a formula: ``true`` or a full disjunctive form."""
    if f.is_truth():
        return "true"
    parts = []
    for m in f.models:
        lits = [
            v.name if m >> i & 1 else "~" + v.name
            for i, v in enumerate(f.universe.variables)
        ]
        parts.append("(" + " & ".join(lits) + ")")
    return " | ".join(parts)
