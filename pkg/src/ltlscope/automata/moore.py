"""Moore-machine products of the prefix DFAs.

The two-way product implements the classic three-valued monitor; the
three-way product adds the forever-undefined automaton and classifies its
state tuples into the six-valued outcome set.  Two membership combinations
are impossible by construction; reaching one is asserted as a pipeline bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .guarded import Guard
from .pipeline import DFA, consistent_masks


class Verdict(Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UU = "UU"
    UNKNOWN = "UNKNOWN"
    UNKNOWN_NOT_FALSE = "UNKNOWN_NOT_FALSE"
    UNKNOWN_NOT_TRUE = "UNKNOWN_NOT_TRUE"

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @property
    def final(self) -> bool:
        return self in (Verdict.TRUE, Verdict.FALSE, Verdict.UU)

    def __str__(self) -> str:
        return self.symbol


_SYMBOLS = {
    Verdict.TRUE: "⊤",
    Verdict.FALSE: "⊥",
    Verdict.UU: "uu",
    Verdict.UNKNOWN: "?",
    Verdict.UNKNOWN_NOT_FALSE: "?≁⊥",
    Verdict.UNKNOWN_NOT_TRUE: "?≁⊤",
}

# Allowed evolutions under the refinement order: once a side of the verdict
# is settled it can never be contradicted.
REFINEMENTS: dict[Verdict, frozenset[Verdict]] = {
    Verdict.TRUE: frozenset({Verdict.TRUE}),
    Verdict.FALSE: frozenset({Verdict.FALSE}),
    Verdict.UU: frozenset({Verdict.UU}),
    Verdict.UNKNOWN: frozenset(Verdict),
    Verdict.UNKNOWN_NOT_FALSE: frozenset({Verdict.UNKNOWN_NOT_FALSE, Verdict.TRUE, Verdict.UU}),
    Verdict.UNKNOWN_NOT_TRUE: frozenset({Verdict.UNKNOWN_NOT_TRUE, Verdict.FALSE, Verdict.UU}),
}


class ImpossibleStateError(AssertionError):
    """A membership combination excluded by construction was reached."""


_SIX_WAY = {
    (True, False, False): Verdict.TRUE,
    (False, True, False): Verdict.FALSE,
    (False, False, True): Verdict.UU,
    (True, False, True): Verdict.UNKNOWN_NOT_FALSE,
    (False, True, True): Verdict.UNKNOWN_NOT_TRUE,
    (True, True, True): Verdict.UNKNOWN,
}


def classify3(in_sat: bool, in_viol: bool, in_und: bool) -> Verdict:
    """Six-way classification of membership in the three prefix languages."""
    key = (in_sat, in_viol, in_und)
    try:
        return _SIX_WAY[key]
    except KeyError:
        raise ImpossibleStateError(
            f"impossible membership combination {key}: pipeline bug") from None


def classify2(in_sat: bool, in_viol: bool) -> Verdict:
    if in_sat and in_viol:
        return Verdict.UNKNOWN
    if in_sat:
        return Verdict.TRUE
    if in_viol:
        return Verdict.FALSE
    raise ImpossibleStateError(
        "prefix outside both languages in the two-automata product: pipeline bug")


@dataclass
class MooreMachine:
    """Product of the component DFAs with a verdict per reachable state."""

    components: tuple[DFA, ...]
    initial: tuple[int, ...]
    outputs: dict[tuple[int, ...], Verdict]
    signed: bool

    @property
    def states(self) -> list[tuple[int, ...]]:
        return sorted(self.outputs)

    def output(self, state: tuple[int, ...]) -> Verdict:
        return self.outputs[state]

    def step(self, state: tuple[int, ...], event: frozenset) -> tuple[int, ...]:
        return tuple(dfa.step(q, event) for dfa, q in zip(self.components, state))

    def state_literals(self, state: tuple[int, ...]) -> tuple:
        mentioned = {l for dfa, q in zip(self.components, state) for l in dfa.lits[q]}
        return tuple(sorted(mentioned, key=str))

    def transitions(self, state: tuple[int, ...]) -> Iterator[tuple[Guard, tuple[int, ...]]]:
        """Materialise guarded product transitions (export and inspection)."""
        lits = self.state_literals(state)
        for bits in consistent_masks(lits, self.signed):
            event = frozenset(l for i, l in enumerate(lits) if bits & (1 << i))
            require = frozenset(l for i, l in enumerate(lits) if bits & (1 << i))
            forbid = frozenset(l for i, l in enumerate(lits) if not bits & (1 << i))
            yield Guard(require, forbid), self.step(state, event)


def _build_product(components: tuple[DFA, ...], classify) -> MooreMachine:
    initial = tuple(dfa.initial for dfa in components)
    signed = components[0].signed
    outputs: dict[tuple[int, ...], Verdict] = {}

    work = [initial]
    while work:
        state = work.pop()
        if state in outputs:
            continue
        outputs[state] = classify(*(q in dfa.accepting
                                    for dfa, q in zip(components, state)))
        lits = tuple(sorted({l for dfa, q in zip(components, state)
                             for l in dfa.lits[q]}, key=str))
        for bits in consistent_masks(lits, signed):
            event = frozenset(l for i, l in enumerate(lits) if bits & (1 << i))
            target = tuple(dfa.step(q, event) for dfa, q in zip(components, state))
            if target not in outputs:
                work.append(target)

    return MooreMachine(components=components, initial=initial,
                        outputs=outputs, signed=signed)


def product2(pos: DFA, neg: DFA) -> MooreMachine:
    """Moore machine of the classic three-valued monitor."""
    return _build_product((pos, neg), classify2)


def product3(pos: DFA, neg: DFA, und: DFA) -> MooreMachine:
    """Moore machine of the six-valued imperfect-information monitor.

    Building the product eagerly walks every reachable state, so the
    impossible membership combinations are asserted away here and now.
    """
    return _build_product((pos, neg, und), classify3)
