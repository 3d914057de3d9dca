"""On-the-fly tableau translation of NNF LTL into a Büchi automaton.

Classic node-expansion semantics (new/old/next bookkeeping) recast as a
memoised decomposition: a set of pending formulas is split into all ways of
satisfying it now (literals plus bookkept composites) and next (postponed
obligations).  The resulting generalised automaton is quotiented by
bisimulation before a counter-based degeneralisation, so the rest of the
pipeline only ever sees a single accepting set.  Works for both worlds:
plain atoms with closed-world guards and signed literals with
presence/absence guards.
"""

from __future__ import annotations

from typing import Optional

from ..formula import (And, Atom, FalseConst, Formula, Lit, Next, Not, Or,
                       Release, TrueConst, Until, subformulas)
from .guarded import Guard, GuardedAutomaton, consistent_requirements

_INIT = -1

Node = tuple[frozenset, frozenset]  # (satisfied-now set, next-obligation set)


class _Decomposer:
    """Memoised expansion of pending-formula sets into completed nodes."""

    def __init__(self, root: Formula, signed: bool):
        self.signed = signed
        self.order = {g: i for i, g in enumerate(dict.fromkeys(subformulas(root)))}
        self.memo: dict[frozenset, frozenset] = {}

    def cover(self, pending: frozenset) -> frozenset:
        """All (now, next) completions of the pending set, inconsistent
        literal combinations pruned."""
        try:
            return self.memo[pending]
        except KeyError:
            pass
        if not pending:
            result = frozenset({(frozenset(), frozenset())})
        else:
            f = min(pending, key=self.order.__getitem__)
            rest = pending - {f}
            out: set[Node] = set()
            for now_add, nxt_add, new_add in self._choices(f):
                for now, nxt in self.cover(rest | new_add):
                    candidate = (now | now_add, nxt | nxt_add)
                    if self._consistent(candidate[0]):
                        out.add(candidate)
            result = frozenset(out)
        self.memo[pending] = result
        return result

    def _choices(self, f: Formula):
        if isinstance(f, TrueConst):
            return ((frozenset(), frozenset(), frozenset()),)
        if isinstance(f, FalseConst):
            return ()
        if _is_literal(f):
            return ((frozenset({f}), frozenset(), frozenset()),)
        mark = frozenset({f})
        if isinstance(f, And):
            return ((mark, frozenset(), frozenset({f.left, f.right})),)
        if isinstance(f, Next):
            return ((mark, frozenset({f.operand}), frozenset()),)
        if isinstance(f, Or):
            return ((mark, frozenset(), frozenset({f.left})),
                    (mark, frozenset(), frozenset({f.right})))
        if isinstance(f, Until):
            return ((mark, frozenset({f}), frozenset({f.left})),
                    (mark, frozenset(), frozenset({f.right})))
        if isinstance(f, Release):
            return ((mark, frozenset({f}), frozenset({f.right})),
                    (mark, frozenset(), frozenset({f.left, f.right})))
        raise ValueError(f"tableau expects NNF, got {f!r}")

    def _consistent(self, now: frozenset) -> bool:
        require = frozenset(_req(g) for g in now if _is_pos_literal(g))
        forbid = frozenset(_req(g.operand) for g in now if isinstance(g, Not))
        return consistent_requirements(require, forbid, self.signed)


def _is_pos_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, Lit))


def _is_literal(f: Formula) -> bool:
    return _is_pos_literal(f) or (isinstance(f, Not) and _is_pos_literal(f.operand))


def _req(f: Formula):
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Lit):
        return f.lit
    raise TypeError(f)


def _guard_of(now: frozenset) -> Guard:
    require = frozenset(_req(g) for g in now if _is_pos_literal(g))
    forbid = frozenset(_req(g.operand) for g in now if isinstance(g, Not))
    return Guard(require, forbid)


def ltl_to_nba(f: Formula, signed: Optional[bool] = None) -> GuardedAutomaton:
    """Translate an NNF formula into a nondeterministic Büchi automaton.

    The tableau yields a generalised automaton with one obligation set per
    Until subformula; a bisimulation quotient shrinks it before the
    counter-based degeneralisation multiplies states, leaving a single
    accepting set and one initial state (a virtual start consuming no event).
    """
    if signed is None:
        signed = any(isinstance(g, Lit) for g in subformulas(f))

    dec = _Decomposer(f, signed)

    def node_key(node: Node):
        now, nxt = node
        return (tuple(sorted(dec.order[g] for g in now)),
                tuple(sorted(dec.order[g] for g in nxt)))

    ids: dict[Node, int] = {}
    order: list[Node] = []
    guards: dict[int, Guard] = {}

    def intern(node: Node) -> int:
        uid = ids.get(node)
        if uid is None:
            uid = ids[node] = len(order)
            order.append(node)
            guards[uid] = _guard_of(node[0])
        return uid

    successor_cache: dict[frozenset, list[int]] = {}

    def successors(nxt: frozenset) -> list[int]:
        row = successor_cache.get(nxt)
        if row is None:
            leaves = sorted(dec.cover(nxt), key=node_key)
            row = successor_cache[nxt] = [intern(leaf) for leaf in leaves]
        return row

    work = list(successors(frozenset({f})))
    edges: dict[int, list[tuple[Guard, int]]] = {
        _INIT: [(guards[uid], uid) for uid in work]
    }
    done: set[int] = set()
    while work:
        uid = work.pop()
        if uid in done:
            continue
        done.add(uid)
        row = successors(order[uid][1])
        edges[uid] = [(guards[dst], dst) for dst in row]
        work.extend(dst for dst in row if dst not in done)

    untils = [g for g in sorted(set(subformulas(f)), key=str) if isinstance(g, Until)]
    k = max(1, len(untils))
    full = frozenset(range(len(untils))) if untils else frozenset({0})
    # A node fulfils obligation u unless u is pending without its right part.
    fulfils: dict[int, frozenset[int]] = {}
    for node, uid in ids.items():
        now = node[0]
        fulfils[uid] = (frozenset(i for i, u in enumerate(untils)
                                  if u not in now or u.right in now)
                        if untils else full)
    fulfils[_INIT] = full  # visited once; Büchi acceptance is about recurrence

    states = [_INIT] + [ids[n] for n in order]
    block = _generalized_quotient(states, edges, fulfils)
    q_edges: dict[int, list[tuple[Guard, int]]] = {}
    q_fulfils: dict[int, frozenset[int]] = {}
    for uid in states:
        b = block[uid]
        q_fulfils[b] = fulfils[uid]
        if b not in q_edges:
            q_edges[b] = sorted({(guard, block[dst]) for guard, dst in edges[uid]},
                                key=lambda e: (str(e[0]), e[1]))

    # Degeneralised states: (block, counter); start at the init block.
    out_ids: dict[tuple[int, int], int] = {}
    transitions: dict[int, list[tuple[Guard, int]]] = {}
    accepting: set[int] = set()

    def intern_out(q: tuple[int, int]) -> int:
        if q not in out_ids:
            out_ids[q] = len(out_ids)
            transitions[out_ids[q]] = []
        return out_ids[q]

    init_block = block[_INIT]
    start = intern_out((init_block, 0))
    frontier = [(init_block, 0)]
    seen = {(init_block, 0)}
    while frontier:
        b, i = frontier.pop()
        src_id = intern_out((b, i))
        j = (i + 1) % k if i in q_fulfils[b] else i
        for guard, dst in q_edges.get(b, ()):
            key = (dst, j)
            dst_id = intern_out(key)
            transitions[src_id].append((guard, dst_id))
            if key not in seen:
                seen.add(key)
                frontier.append(key)

    # Büchi acceptance is about recurrence, so admitting the once-visited
    # start costs nothing even when its block never recurs.
    for (b, i), sid in out_ids.items():
        if i == 0 and 0 in q_fulfils[b]:
            accepting.add(sid)

    return GuardedAutomaton(
        kind="nba",
        states=sorted(out_ids.values()),
        initial=frozenset({start}),
        transitions=transitions,
        accepting=frozenset(accepting),
        signed=signed,
    )


def _generalized_quotient(states: list[int], edges: dict[int, list[tuple[Guard, int]]],
                          fulfils: dict[int, frozenset[int]]) -> dict[int, int]:
    """Coarsest bisimulation respecting the obligation-set vector."""
    block: dict[int, int] = {}
    remap: dict = {}
    for q in states:
        block[q] = remap.setdefault(fulfils[q], len(remap))
    while True:
        signatures = {
            q: (block[q], frozenset((guard, block[dst]) for guard, dst in edges[q]))
            for q in states
        }
        remap = {}
        new_block = {q: remap.setdefault(signatures[q], len(remap)) for q in states}
        if len(remap) == len(set(block.values())):
            return new_block
        block = new_block