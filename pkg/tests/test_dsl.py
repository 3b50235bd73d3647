"""Teaching-language parser: statements, errors, pretty-print round trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptkit import expressions as xp
from conceptkit.dsl import (
    Ask,
    Confirm,
    DeclareAdjective,
    DeclareNoun,
    DeclareRule,
    DeclareVerb,
    StateFact,
    parse_statement,
)
from conceptkit.errors import ParseError
from conceptkit.model import CategoricalRule, QuantitativeRule


def test_parse_adjective():
    cmd = parse_statement("adj Breakable : No, Yes")
    assert cmd == DeclareAdjective("Breakable", ["No", "Yes"])


def test_parse_adjective_quoted():
    cmd = parse_statement('adj "Type of material" : Mineral, Synthetic')
    assert cmd == DeclareAdjective("Type of material", ["Mineral", "Synthetic"])


def test_parse_verb():
    cmd = parse_statement(
        'verb "TO SEE" from Humans to "See well" in("Owns glasses") out("Quality vision")')
    assert cmd == DeclareVerb("TO SEE", "Humans", "See well",
                              ["Owns glasses"], ["Quality vision"], [])


def test_parse_verb_with_externals():
    cmd = parse_statement("verb Evaporation from Liquid to Gas in(n, V) out(P) ext(T)")
    assert cmd == DeclareVerb("Evaporation", "Liquid", "Gas",
                              ["n", "V"], ["P"], ["T"])


def test_parse_noun_variants():
    assert parse_statement("noun Glasses") == DeclareNoun("Glasses")
    assert parse_statement('noun Material under Glasses') == \
        DeclareNoun("Material", under="Glasses")


def test_parse_reciprocal_rule():
    cmd = parse_statement(
        'rule "TO SEE" : "Owns glasses"=Yes <=> "Quality vision"=Good')
    assert cmd.frame == "TO SEE"
    rule = cmd.rule
    assert isinstance(rule, CategoricalRule)
    assert rule.reciprocal
    assert rule.antecedent == {"Owns glasses": "Yes"}
    assert rule.consequent == {"Quality vision": "Good"}


def test_parse_one_sided_rule():
    cmd = parse_statement("rule F : a=x -> b=y")
    assert not cmd.rule.reciprocal


def test_parse_quantitative_rule():
    cmd = parse_statement(
        "rule Evaporation : given(n, V) -> P = n * R * T / V if nonzero(V)")
    rule = cmd.rule
    assert isinstance(rule, QuantitativeRule)
    assert rule.target == "P"
    assert rule.given_features() == ["n", "V"]
    assert [xp.render(g.expr) for g in rule.nonzero_guards()] == ["V"]
    assert xp.render(rule.formula) == "n * R * T / V"
    assert xp.evaluate(rule.formula, {"n": 1.0, "T": 300.0, "V": 0.0224}) == \
        pytest.approx(1.0 * 8.314 * 300.0 / 0.0224)


def test_parse_fact_and_ask():
    assert parse_statement('fact "Type of material" = Mineral') == \
        StateFact("Type of material", "Mineral")
    assert parse_statement("fact T = 300").value == 300.0
    cmd = parse_statement('ask "Quality vision" given "Pain at eyes"=Yes, T=1.5')
    assert cmd == Ask("Quality vision", {"Pain at eyes": "Yes", "T": 1.5})


def test_parse_confirm():
    assert parse_statement("yes") == Confirm(True)
    assert parse_statement("no") == Confirm(False)


def test_trailing_comment_ignored():
    assert parse_statement("noun Glasses  # broken this morning") == \
        DeclareNoun("Glasses")


def test_missing_colon_reports_position_and_expectation():
    with pytest.raises(ParseError) as err:
        parse_statement("adj Breakable No Yes")
    assert err.value.column == 15
    assert ":" in err.value.expected


def test_unknown_statement_head():
    with pytest.raises(ParseError) as err:
        parse_statement("shout Glasses")
    assert "noun" in err.value.expected


def test_unterminated_string():
    with pytest.raises(ParseError):
        parse_statement('noun "See well')


def test_trailing_garbage():
    with pytest.raises(ParseError):
        parse_statement("noun Glasses extra")


def test_mixing_bindings_and_givens_rejected():
    with pytest.raises(ParseError):
        parse_statement("rule F : a=x, given(b) -> c=y")


def test_quantitative_requires_one_sided_arrow():
    with pytest.raises(ParseError):
        parse_statement("rule F : given(a) <=> b = a + 1")


def test_guards_only_on_quantitative():
    with pytest.raises(ParseError):
        parse_statement("rule F : a=x -> b=y if nonzero(a)")


# -- pretty-print round trip --------------------------------------------------------


EXAMPLES = [
    "noun Glasses",
    'noun "See well"',
    "noun Material under Glasses",
    "adj Breakable : No, Yes",
    'adj "Type of material" : Mineral, Synthetic',
    'verb "TO SEE" from Humans to "See well" in("Owns glasses") out("Quality vision")',
    "verb Evaporation from Liquid to Gas in(n, P, V) out(P, V, n) ext(T)",
    'rule "TO SEE" : "Owns glasses"=Yes <=> "Quality vision"=Good',
    "rule F : a=x, b=y -> c=z",
    "rule Evaporation : given(n, V) -> P = n * R * T / V if nonzero(V)",
    "rule Evaporation : given(P, V) -> n = P * V / (R * T) if nonzero(R), nonzero(T)",
    'fact "Type of material" = Mineral',
    "fact T = 300",
    'ask "Owns glasses" given "Pain at eyes"=Yes',
    "yes",
    "no",
]


@pytest.mark.parametrize("text", EXAMPLES)
def test_round_trip_examples(text):
    command = parse_statement(text)
    printed = command.render()
    assert parse_statement(printed) == command
    # a rendered statement is a fixed point
    assert parse_statement(printed).render() == printed


IDENT = st.one_of(
    st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True),
    st.text(alphabet="abc XYZ'?.-", min_size=1, max_size=10).map(str.strip).filter(bool),
)
IDENTS = st.lists(IDENT, min_size=1, max_size=4, unique=True)


@settings(max_examples=300, deadline=None)
@given(st.one_of(
    st.builds(DeclareNoun, IDENT, st.one_of(st.none(), IDENT)),
    st.builds(DeclareAdjective, IDENT, IDENTS),
    st.builds(DeclareVerb, IDENT, IDENT, IDENT, IDENTS, IDENTS,
              st.one_of(st.just([]), IDENTS)),
    st.builds(StateFact, IDENT, st.one_of(IDENT, st.integers(-999, 999).map(float))),
    st.builds(Ask, IDENT, st.dictionaries(IDENT, IDENT, max_size=3)),
    st.builds(Confirm, st.booleans()),
))
def test_round_trip_generated_commands(command):
    printed = command.render()
    assert parse_statement(printed) == command
