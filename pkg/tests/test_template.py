import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from imteval.edits import TaggedText
from imteval.template import (
    BLANK,
    Blank,
    Constraint,
    EmptyTemplateError,
    InvalidTemplate,
    LexicalTemplate,
    build_template,
    constraint_char_spans,
    matches,
    to_prompt_string,
)

from oracles import exhaustive_template_match


def tpl(*segs):
    return LexicalTemplate(segments=tuple(segs))


# --- construction -------------------------------------------------------------

def test_build_template_constraint_then_blank():
    t = TaggedText("the cat sat", "k" * 4 + "r" * 3 + "b" * 4)
    assert build_template(t).segments == (Constraint("the cat"), BLANK)


def test_build_template_all_keep():
    t = TaggedText("abc", "kkk")
    assert build_template(t).segments == (Constraint("abc"),)


def test_build_template_placeholder_blank():
    t = TaggedText("ab*cd", "kkbkk")
    assert build_template(t).segments == (Constraint("ab"), BLANK, Constraint("cd"))


def test_build_template_deleted_run_merges_constraints():
    t = TaggedText("abc", "kdk")
    out = build_template(t)
    assert out.segments == (Constraint("ac"),)
    assert out.hints == ((1, "b"),)


def test_build_template_adjacent_blank_runs_merge():
    t = TaggedText("ab*cd", "kbbbk")
    assert build_template(t).segments == (Constraint("a"), BLANK, Constraint("d"))


def test_build_template_leading_and_trailing_hints():
    t = TaggedText("xayb", "dkdk")
    out = build_template(t)
    assert out.segments == (Constraint("ab"),)
    assert out.hints == ((0, "x"), (1, "y"))


def test_template_invariants_enforced():
    with pytest.raises(InvalidTemplate):
        LexicalTemplate(segments=(Constraint("a"), Constraint("b")))
    with pytest.raises(InvalidTemplate):
        LexicalTemplate(segments=(BLANK, Blank()))
    with pytest.raises(EmptyTemplateError):
        LexicalTemplate(segments=())
    with pytest.raises(InvalidTemplate):
        LexicalTemplate(segments=(Constraint(""),))


# --- matching ------------------------------------------------------------------

def test_matches_constraint_blank():
    m = matches(tpl(Constraint("the cat"), BLANK), "the cat sat")
    assert m.satisfied and m.fills == (" sat",)


def test_matches_single_blank_matches_anything():
    assert matches(tpl(BLANK), "whatever").satisfied
    assert matches(tpl(BLANK), "").fills == ("",)


def test_matches_contiguity_without_blank():
    t = TaggedText("abcd", "kkkk")
    assert not matches(tpl(Constraint("ab"), BLANK, Constraint("cd")), "abXdc").satisfied
    assert not matches(build_template(t), "abXcd").satisfied


def test_matches_rejects_out_of_order():
    assert not matches(tpl(Constraint("a"), BLANK, Constraint("c")), "acb").satisfied


def test_matches_exact_constraint_only():
    t = tpl(Constraint("abc"))
    assert matches(t, "abc").satisfied
    assert not matches(t, "abcd").satisfied
    assert not matches(t, "xabc").satisfied


def test_matches_blank_fills_empty():
    m = matches(tpl(Constraint("ab"), BLANK), "ab")
    assert m.satisfied and m.fills == ("",)


def test_matches_witness_interleaves_back_to_candidate():
    t = tpl(BLANK, Constraint("b"), BLANK, Constraint("b"), BLANK)
    m = matches(t, "abcba")
    assert m.satisfied
    rebuilt = []
    fi = 0
    for seg in t.segments:
        if isinstance(seg, Constraint):
            rebuilt.append(seg.text)
        else:
            rebuilt.append(m.fills[fi])
            fi += 1
    assert "".join(rebuilt) == "abcba"


def _all_templates(max_segments=5):
    texts = ["a", "b", "ab", "ba", "aa"]
    for k in range(1, max_segments + 1):
        for first_is_blank in (False, True):
            kinds = []
            blank = first_is_blank
            for _ in range(k):
                kinds.append("b" if blank else "c")
                blank = not blank
            slots = [i for i, x in enumerate(kinds) if x == "c"]
            for combo in itertools.product(texts, repeat=len(slots)):
                segs = []
                ci = 0
                for x in kinds:
                    if x == "c":
                        segs.append(Constraint(combo[ci]))
                        ci += 1
                    else:
                        segs.append(BLANK)
                yield LexicalTemplate(segments=tuple(segs))


def test_matches_agrees_with_exhaustive_enumeration():
    candidates = [
        "".join(t)
        for k in range(0, 6)
        for t in itertools.product("ab", repeat=k)
    ]
    mismatches = 0
    for template in _all_templates(4):
        plain = [
            ("c", s.text) if isinstance(s, Constraint) else ("b", None)
            for s in template.segments
        ]
        for cand in candidates:
            got = matches(template, cand)
            want = exhaustive_template_match(plain, cand)
            if got.satisfied != want:
                mismatches += 1
            if got.satisfied:
                # witness must reproduce the candidate
                rebuilt = []
                fi = 0
                for seg in template.segments:
                    if isinstance(seg, Constraint):
                        rebuilt.append(seg.text)
                    else:
                        rebuilt.append(got.fills[fi])
                        fi += 1
                assert "".join(rebuilt) == cand
    assert mismatches == 0


# --- prompt rendering ------------------------------------------------------------

def test_prompt_constraint_blank():
    assert to_prompt_string(tpl(Constraint("the cat"), BLANK)) == "the cat _"


def test_prompt_single_blank():
    assert to_prompt_string(tpl(BLANK)) == "_"


def test_prompt_infix():
    assert to_prompt_string(tpl(Constraint("a"), BLANK, Constraint("c"))) == "a _ c"


# --- wire form -------------------------------------------------------------------

def test_wire_round_trip():
    t = LexicalTemplate(
        segments=(Constraint("ab"), BLANK, Constraint("cd")),
        hints=((1, "xx"),),
    )
    assert LexicalTemplate.from_wire(t.to_wire()) == t
    assert t.to_wire() == {
        "segments": [{"c": "ab"}, {"b": True}, {"c": "cd"}],
        "hints": [{"at": 1, "text": "xx"}],
    }


# --- witness spans ---------------------------------------------------------------

def test_constraint_char_spans():
    t = tpl(Constraint("the cat"), BLANK)
    m = matches(t, "the cat sat")
    assert constraint_char_spans(t, m) == [
        {"kind": "c", "start": 0, "end": 7},
        {"kind": "b", "start": 7, "end": 11},
    ]


# --- property: templates never have empty or doubled segments --------------------

@given(st.text(alphabet="kirdb", min_size=1, max_size=12))
def test_build_template_normalization_property(tags):
    text = "".join("*" if t == "b" else "x" for t in tags)
    if not any(t in "kirb" for t in tags):
        return
    template = build_template(TaggedText(text, tags))
    segs = template.segments
    assert segs
    for a, b in zip(segs, segs[1:]):
        assert type(a) is not type(b)
    for s in segs:
        if isinstance(s, Constraint):
            assert s.text
