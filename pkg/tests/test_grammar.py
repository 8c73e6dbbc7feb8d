import pytest
from hypothesis import given, strategies as st

from semitic_morpho.dsl import parse_grammar, print_grammar
from semitic_morpho.grammar import (ANY, ELLIPSIS, EPS, WILDCARD,
                                    DuplicateRuleName, Guards,
                                    RuleSyntaxError, UndeclaredClass,
                                    match_context, match_lex,
                                    match_partition_context)

MICRO_HEADER = "class vowel = {a, i, u}\nclass cons = {b, d, k, t}\n"


def test_bundled_counts(grammar):
    assert [r.name for r in grammar.rules] == [
        "R0", "R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9",
        "glottal_change"]
    assert [r.name for r in grammar.erules] == [
        "E0", "E0a", "E1", "E2", "E3", "E4", "D0", "D1", "D2", "D3"]


def test_bundled_aliases(grammar):
    assert grammar.canonical("om_stmv") == "R8"
    assert grammar.canonical("om_sprv") == "R9"
    assert grammar.canonical("om_affv") == "R7"
    assert grammar.same_rule("om_stmv", "R8")


def test_operators(grammar):
    assert grammar.rule("glottal_change").obligatory
    assert all(not r.obligatory for r in grammar.rules
               if r.name != "glottal_change")
    assert all(not er.reap for er in grammar.erules
               if er.name not in ("E0", "E0a", "E1"))


def test_identity_rule_shorthand_expansion():
    g = parse_grammar(MICRO_HEADER + "rule R0: * - X - * => * - X - *\n")
    rule = g.rules[0]
    assert rule.lex == ((("var", "X"), EPS, EPS),)
    assert rule.surf == (("var", "X"),)
    assert rule.llc == WILDCARD and rule.rlc == WILDCARD


def test_ellipsis_in_rlc_rejected():
    text = MICRO_HEADER + \
        "rule R1: * - X - * => * - X - (b, 0, 0) ...\n"
    with pytest.raises(RuleSyntaxError):
        parse_grammar(text)


def test_undeclared_class():
    with pytest.raises(UndeclaredClass):
        parse_grammar("rule R1: * - X - * => * - X - * where weird(X)\n")


def test_duplicate_rule_name():
    text = MICRO_HEADER + (
        "rule A: * - X - * => * - X - * where cons(X)\n"
        "rule A: * - X - * => * - X - * where vowel(X)\n")
    with pytest.raises(DuplicateRuleName):
        parse_grammar(text)


def test_syntax_error_position():
    with pytest.raises(RuleSyntaxError):
        parse_grammar("rule ! broken\n")


def test_print_parse_roundtrip(grammar):
    printed = print_grammar(grammar)
    again = parse_grammar(printed)
    assert [r.name for r in again.rules] == [r.name for r in grammar.rules]
    for a, b in zip(again.rules, grammar.rules):
        assert (a.surf, a.lex, a.op, a.lsc, a.rsc, a.llc, a.rlc) == \
               (b.surf, b.lex, b.op, b.lsc, b.rsc, b.llc, b.rlc)
        assert a.guards == b.guards
    for a, b in zip(again.erules, grammar.erules):
        assert (a.err, a.corr, a.plc, a.prc, a.reap) == \
               (b.err, b.corr, b.plc, b.prc, b.reap)


# ---------------------------------------------------------------------------
# matching


def _guards(**allowed):
    return Guards(allowed={k: frozenset(v) for k, v in allowed.items()})


def test_match_lex_binds_consonant():
    expr = ((("var", "Pc"), ("var", "C"), EPS),)
    got = match_lex(expr, (("c1", "k", None),), {},
                    _guards(Pc={"c1", "c2"}, C={"k", "t", "b"}))
    assert got == {"Pc": "c1", "C": "k"}


def test_match_lex_binds_vowel():
    expr = ((("var", "Pv"), EPS, ("var", "V")),)
    got = match_lex(expr, (("v1", None, "u"),), {},
                    _guards(Pv={"v1"}, V={"a", "i", "u"}))
    assert got == {"Pv": "v1", "V": "u"}


def test_match_lex_eps_mismatch():
    expr = ((("var", "Pc"), ("var", "C"), EPS),)
    got = match_lex(expr, (("c1", None, "u"),), {},
                    _guards(Pc={"c1"}, C={"k"}))
    assert got is None


def test_match_context_wildcard():
    assert match_context(WILDCARD, [("a", None, None)], "left", {}) == {}


def test_match_context_nearest_anchor():
    # LLC "(v1, 0, V) ..." against two vowel tuples: nearest one wins
    pat = ((("lit", "v1"), EPS, ("var", "V")), ELLIPSIS)
    segment = [("v1", None, "u"), ("c2", "t", None), ("v1", None, "a")]
    got = match_context(pat, segment, "left", {},
                        _guards(V={"a", "i", "u"}))
    assert got == {"V": "a"}


def test_match_context_flush_without_ellipsis():
    pat = ((("var", "B"), EPS, EPS),)
    segment = [("a", None, None), ("+", None, None)]
    guards = Guards(allowed={"B": frozenset("ab+")},
                    diseq=(("B", "+", False),))
    assert match_context(pat, segment, "left", {}, guards) is None
    assert match_context(pat, segment[:1], "left", {}, guards) == {"B": "a"}


@given(st.lists(st.sampled_from("aiu"), min_size=1, max_size=8))
def test_nearest_match_picks_rightmost(vowels):
    # for a committed-nearest left pattern, the variable binds the rightmost
    # matching tuple
    pat = ((("lit", "v1"), EPS, ("var", "V")), ELLIPSIS)
    segment = [("v1", None, v) for v in vowels]
    got = match_context(pat, segment, "left", {},
                        _guards(V={"a", "i", "u"}))
    assert got == {"V": vowels[-1]}


class _Rec:
    def __init__(self, rule_name, surf_seg, lex_seg):
        self.rule_name = rule_name
        self.surf_seg = surf_seg
        self.lex_seg = lex_seg


def test_match_partition_context_e0(grammar):
    # E0's PLC: [om_stmv, 0, (*, *, X)] ... against a partition containing
    # an om_stmv record with vocalism u
    e0 = grammar.erules[0]
    records = [
        _Rec("R1", ("d",), (("c1", "d", None),)),
        _Rec("R8", (), (("v1", None, "u"),)),
        _Rec("R1", ("H",), (("c2", "H", None),)),
    ]
    got = match_partition_context(e0.plc, records, "left", {}, e0.guards,
                                  names_equal=grammar.same_rule)
    assert got == {"X": "u"}


def test_match_partition_context_wildcard_empty():
    assert match_partition_context(WILDCARD, [], "left", {}) == {}


def test_match_partition_context_prc_named(grammar):
    e4 = grammar.erules[5]
    assert e4.name == "E4"
    rec = _Rec("glottal_change", ("w",), (("c3", "A", None),))
    got = match_partition_context(e4.prc, [rec], "right", {}, e4.guards,
                                  names_equal=grammar.same_rule)
    assert got is not None and got["Pc"] == "c3"
