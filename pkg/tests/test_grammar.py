import numpy as np
import pytest

from ragc.grammar import Grammar, Run, Sequence, Terminal, check_derivable, expand, expanded_lengths, grammar_size, validate


def test_size_of_single_terminal():
    g = Grammar.from_rules(b"a", [], [1])
    assert grammar_size(g) == 2
    assert expand(g) == b"a"


def test_size_of_run_grammar():
    g = Grammar.from_rules(b"a", [Run(1, 8)], [2])
    assert grammar_size(g) == 5
    assert g.rules_length() == 3
    assert expand(g) == b"a" * 8


def test_expand_examples():
    assert expand(Grammar.from_rules(b"a", [], [1, 1, 1])) == b"aaa"
    g = Grammar.from_rules(b"abc", [Sequence((1, 2, 3))], [4, 4, 4])
    assert expand(g) == b"abcabcabc"
    assert grammar_size(g) == 9


def test_rule_views():
    g = Grammar.from_rules(b"ab", [Sequence((1, 2)), Run(3, 4)], [4, 1])
    assert g.rule(1) == Terminal(ord("a"))
    assert g.rule(3) == Sequence((1, 2))
    assert g.rule(4) == Run(3, 4)
    assert g.start_symbol == 5
    assert g.rules == (Sequence((1, 2)), Run(3, 4))
    with pytest.raises(KeyError):
        g.rule(9)
    assert expanded_lengths(g).tolist() == [2, 8]


def test_validate_accepts_constructor_style_grammar():
    g = Grammar.from_rules(b"ab", [Sequence((1, 2)), Sequence((3, 1)), Sequence((4, 3))], [5, 4])
    assert validate(g) == []


def test_validate_flags_forward_reference():
    g = Grammar.from_rules(b"ab", [Sequence((4, 1)), Sequence((1, 2))], [3])
    assert any("ordering violation on 4" in p for p in validate(g))


def test_validate_flags_zero_exponent():
    g = Grammar.from_rules(b"a", [Run(1, 0)], [2])
    assert any("exponent 0" in p for p in validate(g))


def test_validate_flags_other_defects():
    g = Grammar.from_rules(b"ba", [Sequence((1,)), Sequence((1, 2)), Sequence((1, 2))], [9])
    problems = validate(g)
    assert any("not distinct and ascending" in p for p in problems)
    assert any("length 1" in p for p in problems)
    assert any("duplicate of rule 4" in p for p in problems)
    assert any("start rule" in p for p in problems)


def test_expand_deep_chain_uses_no_recursion():
    depth = 5000
    rules = [Sequence((1, 1))] + [Sequence((1 + i, 1)) for i in range(1, depth)]
    g = Grammar.from_rules(b"a", rules, [depth + 1])
    assert expand(g) == b"a" * (depth + 1)


def test_expand_to_sink_in_chunks():
    g = Grammar.from_rules(b"ab", [Sequence((1, 2)), Run(3, 1000)], [4, 4])
    parts = []
    total = expand(g, sink=parts.append, chunk=333)
    assert total == 4000
    assert max(len(p) for p in parts) <= 333
    assert b"".join(parts) == b"ab" * 2000


def test_equality_compares_content():
    a = Grammar.from_rules(b"ab", [Sequence((1, 2))], [3, 3])
    b = Grammar.from_rules(b"ab", [Sequence((1, 2))], [3, 3])
    c = Grammar.from_rules(b"ab", [Sequence((1, 2))], [3])
    assert a == b and a != c


def test_check_derivable_catches_blowup():
    rules = [Sequence((1, 1))] + [Sequence((1 + i, 1 + i)) for i in range(1, 80)]
    g = Grammar.from_rules(b"a", rules, [81])
    assert check_derivable(g, 1000) == "grammar derives more text than expected"
    assert check_derivable(Grammar.from_rules(b"a", [Run(1, 1 << 62)], [2, 2]), 10) is not None
    ok = Grammar.from_rules(b"a", [Run(1, 3)], [2])
    assert check_derivable(ok, 3) is None


def test_arrays_are_read_only():
    g = Grammar.from_rules(b"ab", [Sequence((1, 2))], [3])
    with pytest.raises(ValueError):
        g.tau[0] = 1
    assert isinstance(g.body, np.ndarray)
