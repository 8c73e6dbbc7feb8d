import pytest

from semitic_morpho.alphabet import decode, encode
from semitic_morpho.engine import analyze
from semitic_morpho.morphosyntax import (FeatureClash, MorphoParse,
                                         UnknownPattern, parse_word,
                                         repair_clash)

# singular, sound plurals, starred (ill-formed) plurals
BROKEN_PLURALS = [
    ("kadiW", ["kudW"], ["kidaaW"]),
    ("kaafil", ["kuffal"], ["kufalaaA", "kuffaal"]),
    ("kafiil", ["kufalaaA"], []),
    ("sahm", ["suhuum", "Aashum"], ["Aashaam"]),
]


def _parses(grammar, lexicon, word):
    return [parse_word(a, lexicon)
            for a in analyze(decode(word), grammar, lexicon)]


def test_sound_plural_parses(grammar, lexicon):
    got = _parses(grammar, lexicon, "kudW")
    assert any(isinstance(p, MorphoParse) and p.inflection == "bp"
               for p in got)


def test_singular_parses(grammar, lexicon):
    got = _parses(grammar, lexicon, "suhuum")
    assert any(isinstance(p, MorphoParse) for p in got)


def test_starred_plural_clashes(grammar, lexicon):
    got = _parses(grammar, lexicon, "kidaaW")
    clashes = [p for p in got if isinstance(p, FeatureClash)]
    assert clashes and all(p.attribute == "bp_pattern" for p in clashes)
    clash = clashes[0]
    assert clash.root_id == "kdW"
    assert clash.pattern_id == "CiCaaC"
    assert clash.inflection == "bp"
    assert clash.expected_patterns == ("CuCC",)


def test_repair_kidaaW(grammar, lexicon):
    clash = next(p for p in _parses(grammar, lexicon, "kidaaW")
                 if isinstance(p, FeatureClash))
    got = [encode(s) for s in repair_clash(clash, grammar, lexicon)]
    assert got == ["kudW"]


def test_repair_kufalaaA_under_kaafil_reading(grammar, lexicon):
    clashes = [p for p in _parses(grammar, lexicon, "kufalaaA")
               if isinstance(p, FeatureClash)]
    kaafil = next(p for p in clashes if p.root_id == "kfl_kaafil")
    got = [encode(s) for s in repair_clash(kaafil, grammar, lexicon)]
    assert got == ["kuffal"]


def test_repair_sahm_row(grammar, lexicon):
    clashes = [p for p in _parses(grammar, lexicon, "Aashaam")
               if isinstance(p, FeatureClash)]
    assert clashes
    got = [encode(s) for s in repair_clash(clashes[0], grammar, lexicon)]
    assert got == ["suhuum", "Aashum"]


def test_repairs_reanalyze_and_reparse(grammar, lexicon):
    for singular, sound, starred in BROKEN_PLURALS:
        for bad in starred:
            for p in _parses(grammar, lexicon, bad):
                if not isinstance(p, FeatureClash) or \
                   p.attribute != "bp_pattern":
                    continue
                for surface in repair_clash(p, grammar, lexicon):
                    reparsed = [parse_word(a, lexicon)
                                for a in analyze(surface, grammar, lexicon)]
                    assert any(isinstance(q, MorphoParse) for q in reparsed)


def test_repair_never_returns_starred(grammar, lexicon):
    starred = {"kidaaW", "kufalaaA", "kuffaal", "Aashaam"}
    unstarred = {"kudW", "kuffal", "kufalaaA", "suhuum", "Aashum"}
    for singular, sound, bad_forms in BROKEN_PLURALS:
        for bad in bad_forms:
            for p in _parses(grammar, lexicon, bad):
                if isinstance(p, FeatureClash) and p.attribute == "bp_pattern":
                    got = {encode(s)
                           for s in repair_clash(p, grammar, lexicon)}
                    assert got <= unstarred
                    assert not (got & (starred - unstarred))


def test_unknown_pattern_raises(grammar, lexicon):
    clash = FeatureClash(root_id="kdW", pattern_id="CiCaaC", inflection="bp",
                         expected_patterns=("NoSuch",),
                         attribute="bp_pattern")
    with pytest.raises(UnknownPattern):
        repair_clash(clash, grammar, lexicon)


def test_parse_word_linear_word(grammar, lexicon):
    a, = analyze(decode("mdiintA"), grammar, lexicon)
    parsed = parse_word(a, lexicon)
    assert isinstance(parsed, MorphoParse)
    assert parsed.inflection is None
