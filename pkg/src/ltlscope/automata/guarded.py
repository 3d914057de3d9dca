"""Nondeterministic guarded automata (NBA and NFA stages).

Transitions carry symbolic guards instead of letters from the (astronomically
large) powerset alphabet.  A guard requires some literals to be present in the
event and forbids others; literals the guard does not mention are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Guard:
    """Conjunction of presence requirements and absence requirements."""

    require: frozenset = frozenset()
    forbid: frozenset = frozenset()

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.require, self.forbid))
            object.__setattr__(self, "_hash", h)
        return h

    def matches(self, event: frozenset) -> bool:
        return self.require <= event and not (self.forbid & event)

    def mentioned(self) -> frozenset:
        return self.require | self.forbid

    def __str__(self) -> str:
        parts = [str(l) for l in sorted(self.require, key=str)]
        parts += [f"!{l}" for l in sorted(self.forbid, key=str)]
        return " & ".join(parts) if parts else "true"


@dataclass
class GuardedAutomaton:
    """NBA or NFA: a state set, guarded transitions, one accepting set."""

    kind: str  # 'nba' | 'nfa'
    states: list[int]
    initial: frozenset[int]
    transitions: dict[int, list[tuple[Guard, int]]]
    accepting: frozenset[int]
    signed: bool  # signed literals (open world) vs plain atoms (closed world)

    def successors(self, state: int, event: frozenset) -> Iterator[int]:
        for guard, dst in self.transitions.get(state, ()):
            if guard.matches(event):
                yield dst

    def accepts_prefix(self, events: Iterable[frozenset]) -> bool:
        """Nondeterministic membership of a finite word (subset simulation)."""
        current = set(self.initial)
        for event in events:
            current = {dst for q in current for dst in self.successors(q, event)}
            if not current:
                return False
        return bool(current & self.accepting)


def consistent_requirements(require: frozenset, forbid: frozenset, signed: bool) -> bool:
    """Can any consistent event satisfy these requirements?

    Plain world: an event is an arbitrary atom set, so only a literal both
    required and forbidden is contradictory.  Signed world additionally rules
    out requiring both signs of one base name.
    """
    if require & forbid:
        return False
    if signed:
        names = {}
        for lit in require:
            if names.setdefault(lit.name, lit.sign) != lit.sign:
                return False
    return True
