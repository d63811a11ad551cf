"""Boolean formulas over feature selections and component option bindings.

Atoms name either a feature (bare identifier) or a component option in
qualified ``Component.option`` form. Option atoms are truthy when a flag is
true or a text value is non-empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Set, Union

Formula = Union["Atom", "Not", "And", "Or", "Implies", "Literal"]


class UnknownAtomError(KeyError):
    pass


@dataclass(frozen=True)
class Atom:
    ref: str

    def __str__(self) -> str:
        return self.ref


@dataclass(frozen=True)
class Literal:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Literal(True)
FALSE = Literal(False)


@dataclass(frozen=True)
class Not:
    operand: Formula

    def __str__(self) -> str:
        return f"(not {self.operand})"


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"({self.left} and {self.right})"


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"({self.left} or {self.right})"


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"({self.left} implies {self.right})"


def atoms(formula: Formula) -> Iterator[str]:
    """Yield every atom reference in the formula, left to right."""
    if isinstance(formula, Atom):
        yield formula.ref
    elif isinstance(formula, Not):
        yield from atoms(formula.operand)
    elif isinstance(formula, (And, Or, Implies)):
        yield from atoms(formula.left)
        yield from atoms(formula.right)


def _truthy(value: object) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        return value != ""
    return bool(value)


def evaluate(formula: Formula, selected: Set[str], options: Mapping[str, object]) -> bool:
    """Evaluate under a feature selection and qualified option bindings.

    Qualified atoms (containing a dot) must be present in ``options``;
    a missing binding raises UnknownAtomError rather than defaulting.
    """
    if isinstance(formula, Literal):
        return formula.value
    if isinstance(formula, Atom):
        if "." in formula.ref:
            if formula.ref not in options:
                raise UnknownAtomError(formula.ref)
            return _truthy(options[formula.ref])
        return formula.ref in selected
    if isinstance(formula, Not):
        return not evaluate(formula.operand, selected, options)
    if isinstance(formula, And):
        return evaluate(formula.left, selected, options) and evaluate(formula.right, selected, options)
    if isinstance(formula, Or):
        return evaluate(formula.left, selected, options) or evaluate(formula.right, selected, options)
    if isinstance(formula, Implies):
        return (not evaluate(formula.left, selected, options)) or evaluate(
            formula.right, selected, options
        )
    raise TypeError(f"not a formula: {formula!r}")
