"""Finite first-order terms, equations, and ordered variable universes."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


@dataclass(frozen=True)
class Variable:
    """A program variable, identified by name."""

    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")


@dataclass(frozen=True)
class Compound:
    """A functor applied to argument terms; zero arguments makes a constant.

    Functor identity is the pair (name, arity): ``f/1`` and ``f/2`` are
    unrelated symbols.
    """

    functor: str
    args: tuple["Term", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Union[Variable, Compound]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term


# Order is preserved as written; it only influences equation scheduling,
# never soundness.
EquationSet = tuple[Equation, ...]


def term_vars(t: Term) -> frozenset[Variable]:
    """The variables occurring in ``t``."""
    if isinstance(t, Variable):
        return frozenset((t,))
    out: set[Variable] = set()
    stack: list[Term] = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Variable):
            out.add(cur)
        else:
            stack.extend(cur.args)
    return frozenset(out)


def variable_counts(t: Term) -> Counter:
    """Occurrence count per variable of ``t``."""
    counts: Counter = Counter()
    stack: list[Term] = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Variable):
            counts[cur] += 1
        else:
            stack.extend(cur.args)
    return counts


def term_multiplicity(t: Term) -> int:
    """0 for ground terms, 1 for linear ones, 2 when some variable repeats."""
    counts = variable_counts(t)
    if not counts:
        return 0
    return 2 if max(counts.values()) >= 2 else 1


@dataclass(frozen=True)
class VariableUniverse:
    """Finite ordered set of variables; declaration order fixes bit positions.

    Every set of variables handled by the analysis is represented as a
    bitmask over this order.
    """

    variables: tuple[Variable, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable in universe")
        if len(self.variables) > 64:
            raise ValueError("universes beyond 64 variables are not supported")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.variables)})

    @classmethod
    def of_names(cls, names: Iterable[str]) -> "VariableUniverse":
        return cls(tuple(Variable(n) for n in names))

    def __len__(self) -> int:
        return len(self.variables)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self.variables)

    def __contains__(self, v: Variable) -> bool:
        return v in self._index

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.variables)) - 1

    def index(self, v: Variable) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise ValueError(f"variable {v.name!r} is not in the universe") from None

    def bit(self, v: Variable) -> int:
        return 1 << self.index(v)

    def mask_of(self, vs: Iterable[Variable]) -> int:
        mask = 0
        for v in vs:
            mask |= self.bit(v)
        return mask

    def term_mask(self, t: Term) -> int:
        """Bitmask of ``var(t)``; raises when a variable escapes the universe."""
        return self.mask_of(term_vars(t))

    def vars_of_mask(self, mask: int) -> tuple[Variable, ...]:
        return tuple(v for i, v in enumerate(self.variables) if mask >> i & 1)

    def names_of_mask(self, mask: int) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars_of_mask(mask))
