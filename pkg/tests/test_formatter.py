"""Response parsing and the deterministic formatting rules."""

import pytest
from hypothesis import given, settings, strategies as st

from copyforge.errors import ParseFailure
from copyforge.formatter import (
    BRAND_DEFAULT_V1,
    apply_rule,
    apply_rules,
    parse_generation,
    parse_refinement,
    ruleset_for,
)
from copyforge.model import CopyDraft, CopyStructure

HEADER = CopyStructure(components=("header",))
PAIR = CopyStructure(components=("header", "subheader"))


def format_text(text: str) -> str:
    draft = CopyDraft("c", "u", {"header": text})
    return apply_rules(draft, BRAND_DEFAULT_V1).components["header"]


# -- parse_generation -------------------------------------------------------


def test_parses_bare_json_array():
    drafts = parse_generation('[{"header":"A"},{"header":"B"}]', HEADER, 2)
    assert [d.components["header"] for d in drafts] == ["A", "B"]
    assert all(not d.formatted for d in drafts)
    assert len({d.copy_id for d in drafts}) == 2


def test_parses_array_wrapped_in_prose_and_fence():
    raw = 'Here you go:\n```json\n[{"header":"A","subheader":"B"}]\n```'
    drafts = parse_generation(raw, PAIR, 1)
    assert drafts[0].components == {"header": "A", "subheader": "B"}


def test_missing_component_key_is_parse_failure():
    with pytest.raises(ParseFailure):
        parse_generation('[{"title":"A"}]', HEADER, 1)


def test_wrong_count_fails_in_exact_mode():
    with pytest.raises(ParseFailure):
        parse_generation('[{"header":"A"}]', HEADER, 2)


def test_lenient_mode_salvages_valid_items():
    raw = '[{"header":"A"},{"title":"x"},{"header":3},{"header":"B"},{"header":"C"}]'
    drafts = parse_generation(raw, HEADER, 2, exact=False)
    assert [d.components["header"] for d in drafts] == ["A", "B"]


def test_no_json_anywhere_is_parse_failure():
    with pytest.raises(ParseFailure):
        parse_generation("sorry, no can do", HEADER, 1)


def test_single_object_accepted_for_batch_of_one():
    drafts = parse_generation('{"header":"solo"}', HEADER, 1)
    assert drafts[0].components["header"] == "solo"


def test_make_id_controls_copy_ids():
    ids = iter(["a-1", "a-2"])
    drafts = parse_generation(
        '[{"header":"A"},{"header":"B"}]', HEADER, 2, make_id=lambda: next(ids)
    )
    assert [d.copy_id for d in drafts] == ["a-1", "a-2"]


def test_extra_keys_are_ignored():
    drafts = parse_generation('[{"header":"A","mood":"upbeat"}]', HEADER, 1)
    assert drafts[0].components == {"header": "A"}


# -- parse_refinement --------------------------------------------------------


def test_refinement_accepts_single_object():
    assert parse_refinement('{"header":"fixed"}', HEADER) == {"header": "fixed"}


def test_refinement_accepts_one_element_array():
    assert parse_refinement('[{"header":"fixed"}]', HEADER) == {"header": "fixed"}


def test_refinement_rejects_multi_element_array():
    with pytest.raises(ParseFailure):
        parse_refinement('[{"header":"a"},{"header":"b"}]', HEADER)


def test_refinement_rejects_missing_key():
    with pytest.raises(ParseFailure):
        parse_refinement('{"subheader":"x"}', HEADER)


# -- the four rules -----------------------------------------------------------


def test_table_case_ampersand():
    assert format_text("Fast and free") == "Fast & free"


def test_table_case_serial_comma():
    assert format_text("milk, eggs, and bread") == "milk, eggs & bread"


def test_table_case_terminal_period():
    assert format_text("Free delivery saves time.") == "Free delivery saves time"
    unchanged = "Free shipping with no order minimum. You read it right."
    assert format_text(unchanged) == unchanged


def test_serial_comma_needs_an_earlier_comma():
    # two-item coordination keeps its comma pattern intact
    assert apply_rule(BRAND_DEFAULT_V1[0], "fast, and free") == "fast, and free"
    assert apply_rule(BRAND_DEFAULT_V1[0], "milk, eggs, and bread") == "milk, eggs and bread"


def test_serial_comma_applies_left_to_right_repeatedly():
    out = apply_rule(BRAND_DEFAULT_V1[0], "a, b, and c, d, and e")
    assert out == "a, b and c, d and e"


def test_ampersand_is_word_bounded():
    assert apply_rule(BRAND_DEFAULT_V1[1], "brand new sand and gravel") == (
        "brand new sand & gravel"
    )
    assert apply_rule(BRAND_DEFAULT_V1[1], "AND so it goes") == "& so it goes"


def test_terminal_strip_is_single_sentence_only():
    strip = BRAND_DEFAULT_V1[2]
    assert apply_rule(strip, "Buy it!") == "Buy it"
    assert apply_rule(strip, "Buy it;") == "Buy it"
    assert apply_rule(strip, "Ready? Buy it.") == "Ready? Buy it."
    assert apply_rule(strip, "One. Two.") == "One. Two."
    # stacked sentence terminators look multi-sentence, so they stay
    assert apply_rule(strip, "Go!!!") == "Go!!!"
    # stacked soft punctuation comes off all the way
    assert apply_rule(strip, "Buy it;;") == "Buy it"
    assert apply_rule(strip, "Buy it,,,") == "Buy it"


def test_question_mark_is_not_stripped():
    assert format_text("Why wait?") == "Why wait?"


def test_whitespace_collapse():
    assert apply_rule(BRAND_DEFAULT_V1[3], "  a \t b \n c  ") == "a b c"


def test_rules_apply_in_declared_order():
    # serial comma must run before ampersand substitution, or the
    # coordinator pattern would no longer see "and"
    assert format_text("milk, eggs, and bread.") == "milk, eggs & bread"


def test_apply_rules_marks_formatted_and_keeps_other_fields():
    draft = CopyDraft("c9", "u7", {"header": "Fast and free"})
    formatted = apply_rules(draft, BRAND_DEFAULT_V1)
    assert formatted.formatted
    assert formatted.copy_id == "c9" and formatted.usecase_id == "u7"
    assert not draft.formatted


def test_ruleset_for_selects_subset():
    subset = ruleset_for(("whitespace_collapse",))
    assert [r.rule_id for r in subset] == ["whitespace_collapse"]
    assert ruleset_for(None) == BRAND_DEFAULT_V1


def test_unknown_rule_id_raises():
    with pytest.raises(ValueError):
        apply_rule(type(BRAND_DEFAULT_V1[0])("emoji_strip", {}), "x")


# -- idempotence property ------------------------------------------------------

messy_text = st.lists(
    st.sampled_from(
        list("abcdefghij AND,.;:!?&\t\n ") + ["and", ", and", ", &", "  ", "and."]
    ),
    min_size=0,
    max_size=40,
).map("".join)


@settings(max_examples=300)
@given(messy_text)
def test_full_pipeline_is_idempotent(text):
    once = format_text(text)
    assert format_text(once) == once


@settings(max_examples=200)
@given(messy_text)
def test_each_rule_is_idempotent(text):
    for rule in BRAND_DEFAULT_V1:
        once = apply_rule(rule, text)
        assert apply_rule(rule, once) == once
