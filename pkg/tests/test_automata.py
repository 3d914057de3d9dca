"""Synthesis pipeline: tableau, emptiness, determinisation, Moore products."""

import itertools

import pytest

from ltlscope.automata import (DFA, GuardedAutomaton, ImpossibleStateError,
                               Verdict, classify2, classify3, determinize,
                               ltl_to_nba, minimize, nba_to_nfa,
                               nonempty_states)
from ltlscope.automata.dot import automaton_to_dot, moore_to_dot
from ltlscope.formula import (FALSE, TRUE, Atom, Lit, Next, SLit,
                              parse_formula, to_nnf)
from ltlscope.monitor import formula_to_dfa, synthesize_imperfect
from ltlscope.oracle.lasso import LassoWord, eval_lasso
from ltlscope.oracle.verdict import signed_triple
from ltlscope.visibility import derive_classes, explicit_trace, visible_trace

from conftest import all_words, plain_events, random_formula, random_signed_event


def lasso_accepted_by_nba(nba: GuardedAutomaton, stem, loop) -> bool:
    """Independent ultimately-periodic membership check on a Büchi automaton."""
    current = set(nba.initial)
    for event in stem:
        current = {d for q in current for d in nba.successors(q, event)}
        if not current:
            return False
    k = len(loop)
    seen = {(q, 0) for q in current}
    edges = {}
    work = list(seen)
    while work:
        q, p = work.pop()
        succ = [(d, (p + 1) % k) for d in nba.successors(q, loop[p])]
        edges[(q, p)] = succ
        for s in succ:
            if s not in seen:
                seen.add(s)
                work.append(s)
    # Accepting lasso: reachable cycle through an accepting automaton state.
    for start in list(seen):
        if start[0] not in nba.accepting:
            continue
        frontier = set(edges.get(start, ()))
        visited = set(frontier)
        while frontier:
            if start in frontier:
                break
            frontier = {d for s in frontier for d in edges.get(s, ())} - visited
            visited |= frontier
        else:
            continue
        # start lies on a cycle; is it reachable from the roots?
        roots = {(q, 0) for q in current}
        frontier, visited = set(roots), set(roots)
        while frontier:
            if start in frontier:
                return True
            frontier = {d for s in frontier for d in edges.get(s, ())} - visited
            visited |= frontier
    return False


def emptiness_oracle(nba: GuardedAutomaton) -> frozenset[int]:
    """Per-state emptiness by breadth-first accepting-cycle search, coded
    separately from the SCC-based implementation."""
    adjacency = {q: [dst for _, dst in nba.transitions.get(q, ())] for q in nba.states}

    def reachable(src):
        seen = {src}
        work = [src]
        while work:
            q = work.pop()
            for dst in adjacency.get(q, ()):
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
        return seen

    on_cycle = set()
    for f in nba.accepting:
        frontier = set(adjacency.get(f, ()))
        seen = set(frontier)
        while frontier:
            if f in frontier:
                on_cycle.add(f)
                break
            frontier = {d for q in frontier for d in adjacency.get(q, ())} - seen
            seen |= frontier
    return frozenset(q for q in nba.states if reachable(q) & on_cycle)


class TestTableau:
    def test_eventually_needs_a_witness(self):
        nba = ltl_to_nba(to_nnf(parse_formula("F p")), signed=False)
        assert lasso_accepted_by_nba(nba, (frozenset(),), (frozenset({"p"}),))
        assert not lasso_accepted_by_nba(nba, (), (frozenset(),))

    def test_signed_atom_checks_first_event(self):
        nba = ltl_to_nba(Lit(SLit("p", True)), signed=True)
        yes = frozenset({SLit("p", True)})
        no = frozenset({SLit("p", False)})
        assert lasso_accepted_by_nba(nba, (yes,), (frozenset(),))
        assert not lasso_accepted_by_nba(nba, (no,), (frozenset(),))
        assert not lasso_accepted_by_nba(nba, (frozenset(),), (frozenset(),))

    def test_case_study_liveness_language(self):
        """Exhaustive lasso agreement for the signed cut-warning property."""
        classes = derive_classes(("c", "s", "w"), [("c", "s")])
        sat, _, _ = signed_triple(parse_formula("F (c & X w)"), classes)
        nba = ltl_to_nba(sat, signed=True)
        literals = [SLit("[cs]", True), SLit("[cs]", False), SLit("w", True), SLit("w", False)]
        events = [frozenset(), frozenset({literals[0]}), frozenset({literals[2]}),
                  frozenset({literals[0], literals[2]}), frozenset({literals[1], literals[3]})]
        for ls in range(1, 3):
            for ss in range(0, 3):
                for stem in itertools.product(events, repeat=ss):
                    for loop in itertools.product(events, repeat=ls):
                        want = eval_lasso(sat, LassoWord(tuple(stem), tuple(loop)))
                        got = lasso_accepted_by_nba(nba, stem, loop)
                        assert want == got

    def test_random_language_agreement(self, rng):
        events = plain_events(("p", "q"))
        for _ in range(30):
            f = to_nnf(random_formula(rng, rng.randint(1, 6), pool=("p", "q")))
            nba = ltl_to_nba(f, signed=False)
            for _ in range(20):
                stem = tuple(rng.choice(events) for _ in range(rng.randint(0, 3)))
                loop = tuple(rng.choice(events) for _ in range(rng.randint(1, 3)))
                assert (eval_lasso(f, LassoWord(stem, loop))
                        == lasso_accepted_by_nba(nba, stem, loop))


class TestEmptiness:
    def test_universal_language(self):
        nba = ltl_to_nba(TRUE, signed=False)
        assert nonempty_states(nba) == frozenset(nba.states)

    def test_empty_language(self):
        nba = ltl_to_nba(FALSE, signed=False)
        assert nonempty_states(nba) == frozenset()

    def test_matches_independent_oracle(self, rng):
        for _ in range(40):
            f = to_nnf(random_formula(rng, rng.randint(1, 7)))
            nba = ltl_to_nba(f, signed=False)
            assert nonempty_states(nba) == emptiness_oracle(nba)

    def test_case_study_signed_oracle(self):
        classes = derive_classes(("a", "b", "g", "b1", "b2", "b3", "mb"),
                                 [("a", "b"), ("b", "g")])
        sat, viol, und = signed_triple(
            parse_formula("F (g & (b1 | b2 | b3) & X mb)"), classes)
        for formula in (sat, viol, und):
            nba = ltl_to_nba(formula, signed=True)
            assert nonempty_states(nba) == emptiness_oracle(nba)


class TestNfa:
    def test_liveness_has_no_bad_prefix(self, rng):
        nba = ltl_to_nba(to_nnf(parse_formula("F p")), signed=False)
        nfa = nba_to_nfa(nba, nonempty_states(nba))
        for n in range(4):
            for word in all_words(plain_events(("p",)), n):
                assert nfa.accepts_prefix(word)

    def test_safety_bad_prefix_rejected(self):
        f = to_nnf(parse_formula("G p"))
        classes = derive_classes(("p",), [])
        sat, _, _ = signed_triple(f, classes)
        nba = ltl_to_nba(sat, signed=True)
        nfa = nba_to_nfa(nba, nonempty_states(nba))
        good = frozenset({SLit("p", True)})
        bad = frozenset()
        assert nfa.accepts_prefix([good, good])
        assert not nfa.accepts_prefix([good, bad])

    def test_case_study_violation_prefix(self):
        """The unbroken visible trace stops being violable once the warning
        lands: the position-3 obligation (no warning next) is refuted by the
        final event, leaving the cut-warning property not-violable."""
        alphabet = ("b1", "b2", "b3", "c", "s", "a", "b", "g", "mb", "w")
        classes = derive_classes(alphabet, [("c", "s"), ("a", "b"), ("b", "g")])
        _, viol, _ = signed_triple(parse_formula("F (c & X w)"), classes)
        nba = ltl_to_nba(viol, signed=True)
        nfa = nba_to_nfa(nba, nonempty_states(nba))
        sigma = [set(), {"g", "b1", "c"}, {"g", "c", "mb", "b2"}, {"c"}, {"w"}]
        sv = visible_trace(explicit_trace(sigma, alphabet), classes, ())
        assert nfa.accepts_prefix(sv[:4])
        assert not nfa.accepts_prefix(sv)


class TestDeterminize:
    def test_total_and_deterministic(self, rng):
        """Exactly one transition fires for any consistent event."""
        for _ in range(20):
            f = to_nnf(random_formula(rng, rng.randint(1, 5), pool=("p", "q")))
            classes = derive_classes(("p", "q"), [("p", "q")] if rng.random() < 0.5 else [])
            sat, _, _ = signed_triple(f, classes)
            nba = ltl_to_nba(sat, signed=True)
            dfa = determinize(nba_to_nfa(nba, nonempty_states(nba)))
            names = {lit.name for q in dfa.states for lit in dfa.lits[q]} | {"zz"}
            for _ in range(20):
                event = random_signed_event(rng, sorted(names))
                q = dfa.initial
                for _ in range(3):
                    q = dfa.step(q, event)  # raises if not total

    def test_membership_agreement_with_nfa(self, rng):
        events = plain_events(("p", "q"))
        for _ in range(30):
            f = to_nnf(random_formula(rng, rng.randint(1, 6), pool=("p", "q")))
            nba = ltl_to_nba(f, signed=False)
            nfa = nba_to_nfa(nba, nonempty_states(nba))
            dfa = determinize(nfa)
            for n in range(0, 4):
                for word in all_words(events, n):
                    assert nfa.accepts_prefix(word) == dfa.accepts_prefix(word)

    def test_empty_language_has_no_accepting_reachable(self):
        nba = ltl_to_nba(FALSE, signed=False)
        dfa = determinize(nba_to_nfa(nba, nonempty_states(nba)))
        assert dfa.accepting == frozenset()


class TestMinimize:
    def test_agreement_after_minimize(self, rng):
        events = plain_events(("p", "q"))
        for _ in range(30):
            f = to_nnf(random_formula(rng, rng.randint(1, 6), pool=("p", "q")))
            nba = ltl_to_nba(f, signed=False)
            dfa = determinize(nba_to_nfa(nba, nonempty_states(nba)))
            small = minimize(dfa)
            assert len(small.states) <= len(dfa.states)
            for n in range(0, 5):
                for word in all_words(events, n):
                    assert dfa.accepts_prefix(word) == small.accepts_prefix(word)

    def test_minimal_input_is_stable(self):
        dfa = formula_to_dfa(to_nnf(parse_formula("F p")), signed=False)
        again = minimize(dfa)
        assert len(again.states) == len(dfa.states)

    def test_duplicate_states_merge(self):
        # Two states with identical behaviour built by hand.
        dfa = DFA(states=[0, 1, 2], initial=0, accepting=frozenset({2}),
                  signed=False,
                  lits={0: ("p",), 1: ("p",), 2: ()},
                  table={0: {0: 1, 1: 2}, 1: {0: 1, 1: 2}, 2: {0: 2}})
        small = minimize(dfa)
        assert len(small.states) == 2


class TestProducts:
    def test_atomic_truth(self):
        from ltlscope.monitor import synthesize_standard
        m = synthesize_standard(Atom("p"))
        assert m.verdict == Verdict.UNKNOWN
        assert m.step({"p"}) == Verdict.TRUE

    def test_liveness_stays_unknown(self):
        from ltlscope.monitor import synthesize_standard
        m = synthesize_standard(parse_formula("F p"))
        m.run([frozenset(), frozenset()])
        assert m.verdict == Verdict.UNKNOWN

    def test_case_study_phi3_standard_true(self):
        from ltlscope.monitor import synthesize_standard
        m = synthesize_standard(parse_formula("F ((!c & b1 & X b2) | (!c & b2 & X b3))"))
        view = [frozenset(), frozenset({"b1"}), frozenset({"mb", "b2"})]
        m.run(view)
        assert m.verdict == Verdict.TRUE

    def test_classification_tables(self):
        assert classify3(True, False, False) == Verdict.TRUE
        assert classify3(False, True, False) == Verdict.FALSE
        assert classify3(False, False, True) == Verdict.UU
        assert classify3(True, False, True) == Verdict.UNKNOWN_NOT_FALSE
        assert classify3(False, True, True) == Verdict.UNKNOWN_NOT_TRUE
        assert classify3(True, True, True) == Verdict.UNKNOWN
        with pytest.raises(ImpossibleStateError):
            classify3(False, False, False)
        with pytest.raises(ImpossibleStateError):
            classify3(True, True, False)
        with pytest.raises(ImpossibleStateError):
            classify2(False, False)

    def test_singleton_truth_in_product3(self):
        classes = derive_classes(("p",), [])
        m = synthesize_imperfect(Atom("p"), classes)
        assert m.step({SLit("p", True)}) == Verdict.TRUE

    def test_case_study_six_valued_cells(self):
        """The unbroken visible trace classifies the no-cut property as
        not-violable and the cut-free safety property as not-satisfiable."""
        alphabet = ("b1", "b2", "b3", "c", "s", "a", "b", "g", "mb", "w")
        classes = derive_classes(alphabet, [("c", "s"), ("a", "b"), ("b", "g")])
        sigma = [set(), {"g", "b1", "c"}, {"g", "c", "mb", "b2"}, {"c"}, {"w"}]
        sv = visible_trace(explicit_trace(sigma, alphabet), classes, ())

        m = synthesize_imperfect(
            parse_formula("F ((!c & b1 & X b2) | (!c & b2 & X b3))"), classes)
        m.run(sv)
        assert m.verdict == Verdict.UNKNOWN_NOT_FALSE

        m = synthesize_imperfect(parse_formula("G (!g -> !mb)"), classes)
        m.run(sv)
        assert m.verdict == Verdict.UNKNOWN_NOT_TRUE

    def test_moore_totality_fuzz(self, rng):
        """Stepping never gets stuck, whatever junk literals events carry."""
        classes = derive_classes(("p", "q", "r"), [("p", "q")])
        m = synthesize_imperfect(parse_formula("p U (q & X r)"), classes)
        names = ["p", "q", "r", "[pq]", "zz"]
        state = m.machine.initial
        for _ in range(300):
            event = random_signed_event(rng, names)
            state = m.machine.step(state, event)
            assert state in m.machine.outputs


class TestLemma1:
    def test_direction_failure_reproduced(self):
        """With p and q indistinguishable, the trace whose second event hides p
        is accepted by neither the satisfaction nor the violation automaton."""
        classes = derive_classes(("p", "q", "r"), [("p", "q")])
        sat, viol, _ = signed_triple(Next(Atom("p")), classes)
        sigma = [set(), {"p"}]
        sv = visible_trace(explicit_trace(sigma, ("p", "q", "r")), classes, ())
        assert sv[1] == frozenset({SLit("r", False)})
        for formula in (sat, viol):
            nba = ltl_to_nba(formula, signed=True)
            nfa = nba_to_nfa(nba, nonempty_states(nba))
            assert not nfa.accepts_prefix(sv)


class TestDot:
    def test_exports_render(self):
        classes = derive_classes(("p",), [])
        m = synthesize_imperfect(Atom("p"), classes)
        dot = moore_to_dot(m.machine)
        assert dot.startswith("digraph") and "?" in dot
        nba = ltl_to_nba(to_nnf(parse_formula("F p")), signed=False)
        assert "doublecircle" in automaton_to_dot(nba)
        dfa = formula_to_dfa(to_nnf(parse_formula("F p")), signed=False)
        assert "digraph" in automaton_to_dot(dfa)
