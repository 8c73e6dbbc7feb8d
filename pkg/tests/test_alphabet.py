import pytest
from hypothesis import given, strategies as st

from semitic_morpho.alphabet import (ALL_SYMBOLS, LETTERS, DecodeError,
                                     UnknownSymbol, classify, decode,
                                     dump_table, encode, tokenize_lexical)


def test_classify_consonant():
    assert classify("k") == {"consonant", "non_vowel"}


def test_classify_vowel():
    assert classify("u") == {"short_vowel"}


def test_classify_pattern_slot():
    assert "pattern_consonant_slot" in classify("c2")
    assert "pattern_vowel_slot" in classify("v1")


def test_classify_boundary_is_no_other_primary_class():
    classes = classify("+")
    assert "boundary" in classes
    assert "consonant" not in classes and "short_vowel" not in classes


def test_classify_unknown():
    with pytest.raises(UnknownSymbol):
        classify("z")


def test_classify_total_over_alphabet():
    for sym in ALL_SYMBOLS:
        assert classify(sym)


def test_decode_root():
    assert decode("dHrJ") == ("d", "H", "r", "J")


def test_decode_empty():
    assert decode("") == ()


def test_decode_bad_offset():
    with pytest.raises(DecodeError) as exc:
        decode("kt9b")
    assert exc.value.offset == 2


def test_encode_examples():
    assert encode(("d", "H", "r", "J")) == "dHrJ"
    assert encode(()) == ""
    assert encode(tuple("kuttib")) == "kuttib"


def test_encode_rejects_non_surface():
    with pytest.raises(UnknownSymbol):
        encode(("c1",))


@given(st.text(alphabet=sorted(LETTERS)))
def test_roundtrip_decode_encode(text):
    assert encode(decode(text)) == text


@given(st.lists(st.sampled_from(sorted(LETTERS))))
def test_roundtrip_encode_decode(symbols):
    assert decode(encode(symbols)) == tuple(symbols)


def test_tokenize_lexical_slots():
    assert tokenize_lexical("c1v1c2v2c3") == ("c1", "v1", "c2", "v2", "c3")
    assert tokenize_lexical("wa+") == ("w", "a", "+")


def test_tokenize_lexical_rejects_bad_slot():
    with pytest.raises(DecodeError):
        tokenize_lexical("c9")


def test_dump_table_two_columns():
    lines = dump_table().strip().splitlines()
    assert len(lines) == len(LETTERS)
    for line in lines:
        ascii_char, name = line.split("\t")
        assert len(ascii_char) == 1 and name
