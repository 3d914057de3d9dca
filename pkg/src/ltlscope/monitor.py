"""User-facing monitors.

``synthesize_standard`` builds the classic three-valued monitor over plain
closed-world events.  ``synthesize_imperfect`` builds the six-valued monitor
over signed events: the formula is translated onto the signed alphabet of the
visibility classes, a third automaton recognises the prefixes that can still
become forever-undefined, and the three-way Moore product assigns a verdict
to every reachable state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .automata.moore import MooreMachine, Verdict, product2, product3
from .automata.pipeline import (DFA, determinize, minimize, nba_to_nfa,
                                nonempty_states, quotient_bisim)
from .automata.tableau import ltl_to_nba
from .formula import Formula, SLit, negate_nnf, parse_slit, to_nnf
from .oracle.verdict import signed_triple
from .visibility import EqClass, check_consistent


def formula_to_dfa(f: Formula, signed: bool, minimized: bool = True) -> DFA:
    """Run one branch of the pipeline: NBA, per-state emptiness, NFA, DFA."""
    nba = quotient_bisim(ltl_to_nba(f, signed=signed))
    nfa = quotient_bisim(nba_to_nfa(nba, nonempty_states(nba)))
    dfa = determinize(nfa)
    return minimize(dfa) if minimized else dfa


@dataclass
class MonitorInstance:
    """A Moore machine with a cursor; safe to hand around, not to share."""

    machine: MooreMachine
    mode: str  # 'standard' | 'imperfect'
    current: tuple[int, ...] = field(init=False)
    history_len: int = field(init=False, default=0)

    def __post_init__(self):
        self.current = self.machine.initial

    @property
    def verdict(self) -> Verdict:
        return self.machine.output(self.current)

    def step(self, event) -> Verdict:
        event = self.encode_event(event)
        self.current = self.machine.step(self.current, event)
        self.history_len += 1
        return self.verdict

    def run(self, trace: Iterable) -> Verdict:
        for event in trace:
            self.step(event)
        return self.verdict

    def reset(self) -> None:
        self.current = self.machine.initial
        self.history_len = 0

    def clone(self) -> "MonitorInstance":
        fresh = MonitorInstance(self.machine, self.mode)
        fresh.current = self.current
        fresh.history_len = self.history_len
        return fresh

    def encode_event(self, event) -> frozenset:
        if self.mode == "standard":
            encoded = frozenset(event)
            for name in encoded:
                if not isinstance(name, str):
                    raise ValueError(f"standard events are sets of atom names, got {name!r}")
            return encoded
        encoded = frozenset(event)
        for lit in encoded:
            if not isinstance(lit, SLit):
                raise ValueError(f"imperfect events are sets of signed literals, got {lit!r}")
        check_consistent(encoded)
        return encoded


@lru_cache(maxsize=4096)
def _standard_machine(f: Formula, minimized: bool) -> MooreMachine:
    pos = formula_to_dfa(to_nnf(f), signed=False, minimized=minimized)
    neg = formula_to_dfa(negate_nnf(f), signed=False, minimized=minimized)
    return product2(pos, neg)


@lru_cache(maxsize=4096)
def _imperfect_machine(f: Formula, classes: tuple[EqClass, ...],
                       minimized: bool) -> MooreMachine:
    sat, viol, und = signed_triple(f, classes)
    dfas = tuple(formula_to_dfa(g, signed=True, minimized=minimized)
                 for g in (sat, viol, und))
    return product3(*dfas)


def synthesize_standard(f: Formula, minimized: bool = True) -> MonitorInstance:
    """Three-valued monitor: product of the satisfaction and violation DFAs
    over plain closed-world events.  The underlying machine is immutable and
    cached; every call hands out a fresh cursor."""
    return MonitorInstance(_standard_machine(f, minimized), "standard")


def synthesize_imperfect(f: Formula, classes: Sequence[EqClass],
                         minimized: bool = True) -> MonitorInstance:
    """Six-valued monitor over the signed alphabet of the given classes."""
    return MonitorInstance(_imperfect_machine(f, tuple(classes), minimized), "imperfect")


# ---------------------------------------------------------------------------
# Machine serialisation (reloadable bit-identically)
# ---------------------------------------------------------------------------

def _literal_to_json(lit, signed: bool):
    return str(lit) if signed else lit


def _literal_from_json(raw, signed: bool):
    return parse_slit(raw) if signed else raw


def _automaton_to_json(dfa: DFA) -> dict:
    return {
        "kind": "dfa",
        "signed": dfa.signed,
        "states": sorted(dfa.states),
        "initial": dfa.initial,
        "accepting": sorted(dfa.accepting),
        "literals": {str(q): [_literal_to_json(l, dfa.signed) for l in dfa.lits[q]]
                     for q in sorted(dfa.states)},
        "table": {str(q): {str(bits): dst for bits, dst in sorted(dfa.table[q].items())}
                  for q in sorted(dfa.states)},
    }


def _automaton_from_json(data: dict) -> DFA:
    signed = data["signed"]
    lits = {int(q): tuple(_literal_from_json(l, signed) for l in row)
            for q, row in data["literals"].items()}
    table = {int(q): {int(bits): dst for bits, dst in row.items()}
             for q, row in data["table"].items()}
    return DFA(
        states=list(data["states"]),
        initial=data["initial"],
        accepting=frozenset(data["accepting"]),
        signed=signed,
        lits=lits,
        table=table,
    )


def machine_to_json(monitor: MonitorInstance, formula_text: Optional[str] = None,
                    classes_text: Optional[str] = None) -> str:
    payload = {
        "mode": monitor.mode,
        "formula": formula_text,
        "classes": classes_text,
        "components": [_automaton_to_json(dfa) for dfa in monitor.machine.components],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def machine_from_json(text: str) -> MonitorInstance:
    payload = json.loads(text)
    components = tuple(_automaton_from_json(c) for c in payload["components"])
    machine = product2(*components) if payload["mode"] == "standard" else product3(*components)
    return MonitorInstance(machine, payload["mode"])


def clear_machine_caches() -> None:
    """Reset the memoised machines (benchmarking support)."""
    _standard_machine.cache_clear()
    _imperfect_machine.cache_clear()
