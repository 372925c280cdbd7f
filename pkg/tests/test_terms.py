import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import all_strings, perturb, random_regex
from oracles import nfa_matches
from rexproof.terms import (BLANK, EMPTY, Kind, RegexSyntaxError, alt, cat, char, der,
                            derive_char, epsilon_of, eps, infer_alphabet, is_normal,
                            matches, normalize, nullable, parse_regex, parse_sexpr, reduce,
                            star, term_compare, to_sexpr, to_text)

A, B = char(0), char(1)
AB = ["a", "b"]


def P(text, al=AB):
    return parse_regex(text, al)


class TestParse:
    def test_motivating_example(self):
        assert P("(a*a)*", ["a"]) is star(cat(star(A), A))

    def test_optional_sugar(self):
        assert P("a?") is alt(A, BLANK)

    def test_plus_sugar(self):
        assert P("a+") is cat(A, star(A))

    def test_precedence(self):
        assert P("ab|ac", ["a", "b", "c"]) is alt(cat(A, B), cat(A, char(2)))
        assert P("ab*") is cat(A, star(B))

    def test_empty_and_blank_tokens(self):
        assert P("∅") is EMPTY
        assert P("ε") is BLANK
        assert P("()") is BLANK

    @pytest.mark.parametrize("bad", ["(a", "a)", "*a", "a|", "|a", "a**(", ""])
    def test_syntax_errors(self, bad):
        with pytest.raises(RegexSyntaxError):
            P(bad)

    def test_char_outside_alphabet(self):
        with pytest.raises(RegexSyntaxError):
            P("ac")

    def test_infer_alphabet(self):
        assert infer_alphabet("(a*a)*", "b|ε") == ["a", "b"]

    def test_text_round_trip(self):
        rng = random.Random(4)
        for _ in range(300):
            p = random_regex(rng, 4)
            assert P(to_text(p, AB)) is p

    def test_sexpr_round_trip(self):
        rng = random.Random(5)
        for _ in range(300):
            p = random_regex(rng, 4)
            assert parse_sexpr(to_sexpr(p, AB), AB) is p
        t = der(1, eps(star(A)))
        assert parse_sexpr(to_sexpr(t)) is t


class TestEpsilonAndDerivatives:
    def test_epsilon_examples(self):
        assert epsilon_of(star(A)) is BLANK
        assert epsilon_of(EMPTY) is EMPTY
        assert epsilon_of(cat(A, star(B))) is EMPTY

    def test_epsilon_is_blank_or_empty(self):
        rng = random.Random(6)
        for _ in range(500):
            p = random_regex(rng, 4)
            e = epsilon_of(p)
            assert e in (BLANK, EMPTY)
            assert (e is BLANK) == nfa_matches(p, ())

    def test_derivative_examples(self):
        al = ["a", "b", "c"]
        assert normalize(derive_char(0, P("ab|ac", al))) is normalize(P("b|c", al))
        assert normalize(derive_char(0, P("(ab)*"))) is normalize(P("b(ab)*"))
        assert derive_char(0, EMPTY) is EMPTY

    def test_reduce(self):
        p = P("(a*a)*", ["a"])
        r = reduce(der(0, p))
        assert r.regex
        assert normalize(r) is normalize(P("(a*a|ε)(a*a)*", ["a"]))
        assert reduce(p) is p
        assert reduce(eps(star(A))) is BLANK

    def test_derivative_law(self):
        rng = random.Random(7)
        strings = all_strings(2, 4)
        for _ in range(200):
            p = random_regex(rng, 4)
            for c in (0, 1):
                d = derive_char(c, p)
                for s in strings:
                    assert matches(d, s) == matches(p, (c,) + s)


class TestMatches:
    def test_examples(self):
        al = ["a", "b"]
        assert matches(P("a*", al), (0, 0, 0))
        assert not matches(P("(a*a)*", al), (1,))
        assert matches(P("(a*a)*", al), ())

    def test_against_thompson_oracle(self):
        rng = random.Random(8)
        strings = all_strings(2, 8)
        for _ in range(150):
            p = random_regex(rng, 4)
            for s in strings:
                assert matches(p, s) == nfa_matches(p, s), (to_text(p), s)


class TestOrderAndNormalForm:
    def test_compare_examples(self):
        assert term_compare(EMPTY, BLANK) < 0
        assert term_compare(A, A) == 0
        assert term_compare(B, alt(A, B)) < 0

    def test_rank_order(self):
        ladder = [EMPTY, BLANK, A, star(A), cat(A, A), alt(A, A), eps(A), der(0, A)]
        for i, x in enumerate(ladder):
            for y in ladder[i + 1:]:
                assert term_compare(x, y) < 0 < term_compare(y, x)

    def test_strict_total_order(self):
        rng = random.Random(9)
        terms = [random_regex(rng, 3) for _ in range(60)]
        for x in terms:
            for y in terms:
                c = term_compare(x, y)
                assert (c == 0) == (x is y)
                assert c == -term_compare(y, x)
        ordered = sorted(terms, key=lambda t: t)
        for x, y, z in zip(ordered, ordered[1:], ordered[2:]):
            assert term_compare(x, y) <= 0 and term_compare(y, z) <= 0
            assert term_compare(x, z) <= 0

    def test_normalize_examples(self):
        assert normalize(alt(A, EMPTY)) is A
        assert normalize(cat(BLANK, A)) is A
        assert normalize(alt(alt(B, A), A)) is alt(A, B)
        assert normalize(cat(A, cat(EMPTY, B))) is EMPTY

    def test_normalize_idempotent_and_normal(self):
        rng = random.Random(10)
        for _ in range(500):
            p = random_regex(rng, 4)
            n1 = normalize(p)
            assert normalize(n1) is n1
            assert is_normal(n1)

    def test_normalize_preserves_language(self):
        rng = random.Random(11)
        strings = all_strings(2, 5)
        for _ in range(200):
            p = random_regex(rng, 4)
            q = normalize(p)
            assert all(matches(p, s) == matches(q, s) for s in strings)

    def test_similar_variants_share_normal_form(self):
        rng = random.Random(12)
        for _ in range(300):
            p = random_regex(rng, 3)
            v = perturb(p, rng, rng.randint(1, 8))
            assert normalize(v) is normalize(p)

    def test_normalize_rejects_extended_terms(self):
        with pytest.raises(ValueError):
            normalize(eps(A))

    def test_interning(self):
        assert cat(A, B) is cat(A, B)
        assert cat(A, B).kind is Kind.CONCAT


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_union_commutes_under_normalize(seed):
    rng = random.Random(seed)
    p, q = random_regex(rng, 3), random_regex(rng, 3)
    assert normalize(alt(p, q)) is normalize(alt(q, p))
