"""NBA -> NFA -> DFA pipeline stages.

Per-state emptiness turns the Büchi automaton into an NFA over finite
prefixes.  The subset construction then determinises over consistent
valuations of the literals each state actually mentions; valuations are
packed into integer bitmasks so stepping is a dict lookup.  Partition
refinement over the global valuation space merges language-equivalent DFA
states, and a cheap bisimulation quotient shrinks the nondeterministic
stages before the exponential subset step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .guarded import Guard, GuardedAutomaton


def nonempty_states(nba: GuardedAutomaton) -> frozenset[int]:
    """States from which the Büchi language is nonempty: those reaching a
    nontrivial strongly connected component that contains an accepting
    state (a self-loop counts as nontrivial)."""
    sccs = tarjan_sccs({q: [dst for _, dst in nba.transitions.get(q, ())] for q in nba.states},
                       nba.states)
    good_states: set[int] = set()
    for scc in sccs:
        members = set(scc)
        internal_edge = any(dst in members for q in scc
                            for _, dst in nba.transitions.get(q, ()))
        if internal_edge and members & nba.accepting:
            good_states |= members

    changed = True
    while changed:
        changed = False
        for q in nba.states:
            if q in good_states:
                continue
            if any(dst in good_states for _, dst in nba.transitions.get(q, ())):
                good_states.add(q)
                changed = True
    return frozenset(good_states)


def tarjan_sccs(edges: dict[int, list[int]], states) -> list[list[int]]:
    """Iterative Tarjan over an integer adjacency map."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0

    for root in states:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            q, pos = work.pop()
            if pos == 0:
                index[q] = low[q] = counter
                counter += 1
                stack.append(q)
                on_stack.add(q)
            succ = edges.get(q, ())
            advanced = False
            for i in range(pos, len(succ)):
                dst = succ[i]
                if dst not in index:
                    work.append((q, i + 1))
                    work.append((dst, 0))
                    advanced = True
                    break
                if dst in on_stack:
                    low[q] = min(low[q], index[dst])
            if advanced:
                continue
            if low[q] == index[q]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == q:
                        break
                sccs.append(scc)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[q])
    return sccs


def nba_to_nfa(nba: GuardedAutomaton, nonempty: frozenset[int]) -> GuardedAutomaton:
    """Same structure, accepting set replaced by the nonempty-language states:
    the NFA accepts exactly the finite prefixes with a satisfying infinite
    continuation."""
    return GuardedAutomaton(
        kind="nfa",
        states=list(nba.states),
        initial=nba.initial,
        transitions={q: list(edges) for q, edges in nba.transitions.items()},
        accepting=nonempty,
        signed=nba.signed,
    )


@lru_cache(maxsize=65536)
def consistent_masks(lits: tuple, signed: bool) -> tuple[int, ...]:
    """All valuation bitmasks over ``lits`` under which no base name carries
    both signs.  Plain-world literals never conflict."""
    conflicts: list[int] = []
    if signed:
        by_name: dict[str, list[int]] = {}
        for i, lit in enumerate(lits):
            by_name.setdefault(lit.name, []).append(i)
        for positions in by_name.values():
            for a in range(len(positions)):
                for b in range(a + 1, len(positions)):
                    conflicts.append((1 << positions[a]) | (1 << positions[b]))
    out = []
    for mask in range(1 << len(lits)):
        if any(mask & pair == pair for pair in conflicts):
            continue
        out.append(mask)
    return tuple(out)


def quotient_bisim(aut: GuardedAutomaton) -> GuardedAutomaton:
    """Quotient by the coarsest bisimulation respecting acceptance.

    Safe for both the Büchi and the finite-word reading, and it typically
    collapses tableau output dramatically before determinisation.
    """
    block: dict[int, int] = {q: int(q in aut.accepting) for q in aut.states}
    while True:
        signatures = {
            q: (block[q], frozenset((guard, block[dst])
                                    for guard, dst in aut.transitions.get(q, ())))
            for q in aut.states
        }
        remap: dict = {}
        new_block = {q: remap.setdefault(signatures[q], len(remap)) for q in aut.states}
        if len(remap) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    rep: dict[int, int] = {}
    for q in aut.states:
        rep.setdefault(block[q], q)
    transitions = {
        b: sorted({(guard, block[dst]) for guard, dst in aut.transitions.get(q, ())},
                  key=lambda e: (str(e[0]), e[1]))
        for b, q in rep.items()
    }
    return GuardedAutomaton(
        kind=aut.kind,
        states=sorted(rep),
        initial=frozenset(block[q] for q in aut.initial),
        transitions={b: list(edges) for b, edges in transitions.items()},
        accepting=frozenset(block[q] for q in aut.accepting),
        signed=aut.signed,
    )


@dataclass
class DFA:
    """Deterministic, total automaton over consistent events.

    Each state stores the literals its behaviour depends on and a full table
    from consistent valuation bitmask to successor, so every consistent event
    matches exactly one entry.
    """

    states: list[int]
    initial: int
    accepting: frozenset[int]
    signed: bool
    lits: dict[int, tuple]            # state -> sorted literal tuple
    table: dict[int, dict[int, int]]  # state -> valuation bits -> successor
    kind: str = "dfa"

    def valuation_bits(self, state: int, event: frozenset) -> int:
        bits = 0
        for i, lit in enumerate(self.lits[state]):
            if lit in event:
                bits |= 1 << i
        return bits

    def step(self, state: int, event: frozenset) -> int:
        return self.table[state][self.valuation_bits(state, event)]

    def run_prefix(self, events) -> int:
        q = self.initial
        for event in events:
            q = self.step(q, event)
        return q

    def accepts_prefix(self, events) -> bool:
        return self.run_prefix(events) in self.accepting

    def guard_edges(self, state: int) -> Iterator[tuple[Guard, int]]:
        """Materialise (guard, successor) pairs for export and inspection."""
        lits = self.lits[state]
        for bits in sorted(self.table[state]):
            require = frozenset(l for i, l in enumerate(lits) if bits & (1 << i))
            forbid = frozenset(l for i, l in enumerate(lits) if not bits & (1 << i))
            yield Guard(require, forbid), self.table[state][bits]

    def transition_count(self) -> int:
        return sum(len(t) for t in self.table.values())


def determinize(nfa: GuardedAutomaton) -> DFA:
    """Rabin-Scott subset construction over consistent guard valuations.

    Unreachable subsets are never built; the empty subset acts as the sink.
    """
    initial = frozenset(nfa.initial)
    ids: dict[frozenset[int], int] = {initial: 0}
    order: list[frozenset[int]] = [initial]
    lits_of: dict[int, tuple] = {}
    table: dict[int, dict[int, int]] = {}
    accepting: set[int] = set()

    i = 0
    while i < len(order):
        subset = order[i]
        sid = ids[subset]
        if subset & nfa.accepting:
            accepting.add(sid)
        mentioned: set = set()
        grouped: dict[tuple[frozenset, frozenset], set[int]] = {}
        for q in subset:
            for guard, dst in nfa.transitions.get(q, ()):
                mentioned |= guard.mentioned()
                grouped.setdefault((guard.require, guard.forbid), set()).add(dst)
        lits = tuple(sorted(mentioned, key=str))
        bit = {lit: 1 << k for k, lit in enumerate(lits)}
        edges = [
            (sum(bit[l] for l in require), sum(bit[l] for l in forbid), frozenset(dsts))
            for (require, forbid), dsts in grouped.items()
        ]
        row: dict[int, int] = {}
        for bits in consistent_masks(lits, nfa.signed):
            target: set[int] = set()
            for req, forb, dsts in edges:
                if bits & req == req and not bits & forb:
                    target |= dsts
            key = frozenset(target)
            if key not in ids:
                ids[key] = len(order)
                order.append(key)
            row[bits] = ids[key]
        lits_of[sid] = lits
        table[sid] = row
        i += 1

    return DFA(states=list(range(len(order))), initial=0,
               accepting=frozenset(accepting), signed=nfa.signed,
               lits=lits_of, table=table)


_REFINE_LIMIT = 60000


def minimize(dfa: DFA) -> DFA:
    """Merge language-equivalent states by partition refinement over the
    union of all mentioned literals."""
    universe = tuple(sorted({l for lits in dfa.lits.values() for l in lits}, key=str))
    masks = consistent_masks(universe, dfa.signed)
    if len(masks) * len(dfa.states) > _REFINE_LIMIT * 10:
        return dfa  # refinement table would be enormous; skip the optional pass
    position = {lit: k for k, lit in enumerate(universe)}

    # Per state, successor under every global valuation (restricted locally).
    succ: dict[int, list[int]] = {}
    for q in dfa.states:
        local = dfa.lits[q]
        local_bits = [position[l] for l in local]
        row = dfa.table[q]
        entries = []
        for mask in masks:
            bits = 0
            for i, g in enumerate(local_bits):
                if mask & (1 << g):
                    bits |= 1 << i
            entries.append(row[bits])
        succ[q] = entries

    block = {q: int(q in dfa.accepting) for q in dfa.states}
    while True:
        signatures = {
            q: (block[q], tuple(block[s] for s in succ[q]))
            for q in dfa.states
        }
        remap: dict[tuple, int] = {}
        new_block = {}
        for q in dfa.states:
            new_block[q] = remap.setdefault(signatures[q], len(remap))
        if len(remap) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    rep: dict[int, int] = {}
    for q in dfa.states:
        rep.setdefault(block[q], q)
    new_ids = {b: i for i, b in enumerate(sorted(rep))}
    lits_of = {}
    table = {}
    for b, q in rep.items():
        nid = new_ids[b]
        lits_of[nid] = dfa.lits[q]
        table[nid] = {bits: new_ids[block[dst]] for bits, dst in dfa.table[q].items()}
    return DFA(states=sorted(new_ids.values()), initial=new_ids[block[dfa.initial]],
               accepting=frozenset(new_ids[block[q]] for q in dfa.accepting),
               signed=dfa.signed, lits=lits_of, table=table)


def dfa_step(dfa: DFA, state: int, event: frozenset) -> int:
    return dfa.step(state, event)
