"""Formula layer: parsing, normal forms, signed translation, progression."""

import pytest

from ltlscope.formula import (FALSE, TRUE, Always, And, Atom, Eventually,
                              FalseConst, Formula, Implies, Lit, Next, Not, Or,
                              ParseError, Release, SLit, TrueConst,
                              UncoveredAtomError, Until, fmt, is_nnf,
                              make_signed, negate_nnf, negate_signed,
                              parse_formula, progress, to_nnf,
                              to_metric_form)
from ltlscope.oracle.lasso import LassoWord, eval_lasso
from ltlscope.visibility import derive_classes, rendering_map

from conftest import plain_events, random_formula


class TestParser:
    def test_eventually_conjunction(self):
        assert parse_formula("F (c & X w)") == Eventually(And(Atom("c"), Next(Atom("w"))))

    def test_always_implication(self):
        f = parse_formula("G ((b1|b2|b3) -> X !c)")
        assert f == Always(Implies(Or(Or(Atom("b1"), Atom("b2")), Atom("b3")),
                                   Next(Not(Atom("c")))))

    def test_missing_operand_is_an_error(self):
        with pytest.raises(ParseError):
            parse_formula("p U")

    def test_unknown_token_is_an_error(self):
        with pytest.raises(ParseError) as err:
            parse_formula("p # q")
        assert err.value.pos == 2

    def test_until_is_right_associative(self):
        assert parse_formula("p U q U r") == Until(Atom("p"), Until(Atom("q"), Atom("r")))

    def test_precedence_and_over_or_over_implies(self):
        f = parse_formula("a & b | c -> d")
        assert f == Implies(Or(And(Atom("a"), Atom("b")), Atom("c")), Atom("d"))

    def test_constants(self):
        assert parse_formula("true") is TRUE
        assert parse_formula("false U p") == Until(FALSE, Atom("p"))

    def test_roundtrip_through_fmt(self, rng):
        for _ in range(50):
            f = random_formula(rng, rng.randint(1, 8))
            assert parse_formula(fmt(f)) == f


class TestNnf:
    def test_next_commutes_with_negation(self):
        """!X p becomes X !p."""
        assert to_nnf(Not(Next(Atom("p")))) == Next(Not(Atom("p")))

    def test_until_dualises_to_release(self):
        """!(p U q) becomes !p R !q."""
        assert to_nnf(Not(Until(Atom("p"), Atom("q")))) == \
            Release(Not(Atom("p")), Not(Atom("q")))

    def test_double_negation(self):
        assert to_nnf(Not(Not(Atom("p")))) == Atom("p")

    def test_derived_operators_expand(self):
        assert to_nnf(Eventually(Atom("p"))) == Until(TRUE, Atom("p"))
        assert to_nnf(Always(Atom("p"))) == Release(FALSE, Atom("p"))
        assert to_nnf(Implies(Atom("p"), Atom("q"))) == Or(Not(Atom("p")), Atom("q"))

    def test_output_is_nnf_and_idempotent(self, rng):
        for _ in range(200):
            f = random_formula(rng, rng.randint(1, 8))
            g = to_nnf(f)
            assert is_nnf(g)
            assert to_nnf(g) == g

    def test_language_preserved_on_lassos(self, rng):
        """f and to_nnf(f) agree on random ultimately periodic words."""
        events = plain_events(("p", "q", "r", "s"))
        for _ in range(150):
            f = random_formula(rng, rng.randint(1, 8))
            g = to_nnf(f)
            for _ in range(12):
                stem = tuple(rng.choice(events) for _ in range(rng.randint(0, 4)))
                loop = tuple(rng.choice(events) for _ in range(rng.randint(1, 4)))
                w = LassoWord(stem, loop)
                assert eval_lasso(f, w) == eval_lasso(g, w)

    def test_negation_is_complementary(self, rng):
        events = plain_events(("p", "q"))
        for _ in range(80):
            f = random_formula(rng, rng.randint(1, 6), pool=("p", "q"))
            g = negate_nnf(f)
            for _ in range(8):
                stem = tuple(rng.choice(events) for _ in range(rng.randint(0, 3)))
                loop = tuple(rng.choice(events) for _ in range(rng.randint(1, 3)))
                w = LassoWord(stem, loop)
                assert eval_lasso(f, w) != eval_lasso(g, w)


CASE_CLASSES = derive_classes(
    ("b1", "b2", "b3", "c", "s", "a", "b", "g", "mb", "w"),
    [("c", "s"), ("a", "b"), ("b", "g")],
)
RENDER = rendering_map(CASE_CLASSES)


def lit(name, sign=True):
    return Lit(SLit(name, sign))


class TestMakeSigned:
    def test_liveness_property_renders_witness(self):
        """The cut atom sits in the cs class, so it renders as the witness."""
        f = to_nnf(parse_formula("F (c & X w)"))
        assert make_signed(f, RENDER) == Until(TRUE, And(lit("[cs]"), Next(lit("w"))))

    def test_negated_singleton_gets_false_sign(self):
        classes = derive_classes(("p",), [])
        signed = make_signed(to_nnf(Not(Atom("p"))), rendering_map(classes))
        assert signed == lit("p", False)

    def test_no_cut_disjunction(self):
        f = to_nnf(parse_formula("F ((!c & b1 & X b2) | (!c & b2 & X b3))"))
        signed = make_signed(f, RENDER)
        expected = Until(TRUE, Or(
            And(And(lit("[cs]", False), lit("b1")), Next(lit("b2"))),
            And(And(lit("[cs]", False), lit("b2")), Next(lit("b3"))),
        ))
        assert signed == expected

    def test_uncovered_atom_raises(self):
        with pytest.raises(UncoveredAtomError):
            make_signed(Atom("zz"), RENDER)

    def test_structure_preserved(self, rng):
        """Stripping signs and witness indirection recovers the operator tree."""
        class_of = {a: cls for cls in CASE_CLASSES for a in cls.members}
        witness_to_rep = {cls.witness_name: cls.representative for cls in CASE_CLASSES}

        def shape(f: Formula):
            if isinstance(f, Atom):
                return ("leaf", class_of[f.name].representative, True)
            if isinstance(f, Not) and isinstance(f.operand, Atom):
                return ("leaf", class_of[f.operand.name].representative, False)
            if isinstance(f, Lit):
                name = witness_to_rep.get(f.lit.name, f.lit.name)
                return ("leaf", class_of[name].representative, f.lit.sign)
            if isinstance(f, Not) and isinstance(f.operand, Lit):
                name = witness_to_rep.get(f.operand.lit.name, f.operand.lit.name)
                return ("leaf", class_of[name].representative, not f.operand.lit.sign)
            if isinstance(f, (TrueConst, FalseConst)):
                return ("const", isinstance(f, TrueConst))
            if isinstance(f, (Next,)):
                return ("X", shape(f.operand))
            if isinstance(f, (And, Or, Until, Release)):
                return (type(f).__name__, shape(f.left), shape(f.right))
            raise AssertionError(f)

        pool = ("c", "s", "b1", "w", "g")
        for _ in range(100):
            f = to_nnf(random_formula(rng, rng.randint(1, 7), pool=pool))
            assert shape(make_signed(f, RENDER)) == shape(f)


class TestUndefinedFormula:
    def test_singleton_atom(self):
        """For a bare atom the undefined companion tests absence of both signs."""
        classes = derive_classes(("p",), [])
        rendering = rendering_map(classes)
        sat = make_signed(to_nnf(Atom("p")), rendering)
        viol = make_signed(negate_nnf(Atom("p")), rendering)
        und = And(negate_signed(sat), negate_signed(viol))
        assert und == And(Not(lit("p")), Not(lit("p", False)))

    def test_next_pushes_through(self):
        classes = derive_classes(("p",), [])
        rendering = rendering_map(classes)
        sat = make_signed(to_nnf(Next(Atom("p"))), rendering)
        viol = make_signed(negate_nnf(Next(Atom("p"))), rendering)
        und = And(negate_signed(sat), negate_signed(viol))
        assert und == And(Next(Not(lit("p"))), Next(Not(lit("p", False))))

    def test_next_undefined_language(self):
        """Exactly the words whose second event carries neither sign of p."""
        classes = derive_classes(("p",), [])
        rendering = rendering_map(classes)
        sat = make_signed(to_nnf(Next(Atom("p"))), rendering)
        viol = make_signed(negate_nnf(Next(Atom("p"))), rendering)
        und = And(negate_signed(sat), negate_signed(viol))
        events = [frozenset(), frozenset({SLit("p", True)}), frozenset({SLit("p", False)})]
        for e0 in events:
            for e1 in events:
                w = LassoWord((e0, e1), (frozenset(),))
                assert eval_lasso(und, w) == (len(e1) == 0)

    def test_true_has_no_undefined_words(self):
        sat = TRUE
        viol = FALSE
        und = negate_signed(sat)
        assert isinstance(und, FalseConst)


class TestProgress:
    def test_eventually_discharges_on_truth(self):
        f = to_nnf(Eventually(Atom("p")))
        assert progress(f, {"p": True}) is TRUE

    def test_always_survives_truth(self):
        f = to_nnf(Always(Atom("p")))
        assert progress(f, {"p": True}) == f

    def test_unknown_atom_leaves_residual(self):
        assert progress(Atom("p"), {}) == Atom("p")
        assert progress(Not(Atom("p")), {}) == Not(Atom("p"))

    def test_next_shifts(self):
        assert progress(Next(Not(Atom("p"))), {"p": True}) == Not(Atom("p"))

    def test_metric_form_implication(self):
        f = to_metric_form(parse_formula("G (g -> !(b1 | b2 | b3))"))
        residual = progress(f, {"g": True, "b1": True, "b2": False, "b3": False})
        assert residual is FALSE

    def test_soundness_on_fully_known_events(self, rng):
        """Progressing through a total event preserves final monitor verdicts."""
        from ltlscope.monitor import synthesize_standard
        pool = ("p", "q")
        for _ in range(40):
            f = to_nnf(random_formula(rng, rng.randint(1, 5), pool=pool))
            event = frozenset(a for a in pool if rng.random() < 0.5)
            knowledge = {a: a in event for a in pool}
            g = progress(f, knowledge)
            tail = [frozenset(a for a in pool if rng.random() < 0.5)
                    for _ in range(rng.randint(0, 4))]
            m1 = synthesize_standard(f)
            m1.run([event] + tail)
            m2 = synthesize_standard(g) if not isinstance(g, (TrueConst, FalseConst)) else None
            if m2 is not None:
                m2.run(tail)
                v2 = m2.verdict
            else:
                from ltlscope.automata.moore import Verdict
                v2 = Verdict.TRUE if g is TRUE else Verdict.FALSE
            v1 = m1.verdict
            if v1.final or v2.final:
                assert v1 == v2
