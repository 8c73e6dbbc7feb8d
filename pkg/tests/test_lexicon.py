import pytest
from hypothesis import given, strategies as st

from semitic_morpho.features import conflicts, make_fs, unify, unify_all
from semitic_morpho.lexicon import (DuplicateEntry, MorphemeEntry, advance,
                                    branches, load_lexicon)


def test_bundled_roots(lexicon):
    forms = {"".join(e.body) for e in lexicon.entries("root")}
    assert forms == {"ktb", "dHrJ", "smA", "hwA", "kdW", "kfl", "shm"}


def test_bundled_vocalism_and_pattern_counts(lexicon):
    vocs = {e.id for e in lexicon.entries("vocalism")}
    assert {"a", "ui"} <= vocs
    verbal = [e for e in lexicon.entries("pattern")
              if e.id.startswith(("M", "Q")) and e.kind == ""]
    assert len(verbal) == 19


def test_kdW_entry(lexicon):
    entry = lexicon.entry("root", "kdW")
    assert entry.body == ("k", "d", "W")
    assert entry.features["bp_pattern"] == ("CuCC",)
    node = lexicon.tree("root").root
    for sym in "kdW":
        node = advance(node, sym)
        assert node is not None


def test_advance_examples(lexicon):
    root = lexicon.tree("root").root
    node = advance(root, "k")
    assert node is not None
    node = advance(node, "t")
    node = advance(node, "b")
    assert node is not None
    terminal = advance(node, "+")
    assert terminal is not None and any(e.id == "ktb" for e in terminal.entries)
    assert advance(root, "z") is None


def test_branches_root_tree(lexicon):
    # exact set fixed by the shipped lexicon
    got = branches(lexicon.tree("root").root)
    expected = tuple(sorted({e.form[0] for e in lexicon.entries("root")}))
    assert got == expected == ("d", "h", "k", "s")


def test_branches_vocalism_tree(lexicon):
    got = branches(lexicon.tree("vocalism").root)
    assert set(got) >= {"a", "u"}          # the verbal morphemes
    assert got == ("a", "i", "u")          # shipped nominal vocalisms add i


def test_branches_terminal_is_boundary_only(lexicon):
    node = lexicon.tree("root").root
    for sym in "ktb":
        node = advance(node, sym)
    assert branches(node) == ("+",)


def test_branches_consistent_with_advance(lexicon):
    def walk(node):
        assert set(branches(node)) == \
               {s for s in node.edges if advance(node, s) is not None}
        for child in node.edges.values():
            walk(child)
    for tape in ("pattern", "root", "vocalism"):
        walk(lexicon.tree(tape).root)


def test_every_entry_walkable(lexicon):
    for tape in ("pattern", "root", "vocalism"):
        tree = lexicon.tree(tape)
        for entry in tree.entries:
            node = tree.root
            for sym in entry.form:
                node = advance(node, sym)
                assert node is not None, entry.id
            assert any(e.id == entry.id for e in node.entries)


def test_homograph_roots(lexicon):
    node = lexicon.tree("root").root
    for sym in "kfl+":
        node = advance(node, sym)
    ids = {e.id for e in node.entries}
    assert ids == {"kfl_kaafil", "kfl_kafiil"}


def test_empty_lexicon():
    lex = load_lexicon("")
    assert lex.entries() == []


def test_duplicate_entry_conflicting_features():
    text = "root\tktb\tcat=verb\twrite\nroot\tktb\tcat=noun\twrong\n"
    with pytest.raises(DuplicateEntry):
        load_lexicon(text)


def test_form_constraints():
    with pytest.raises(Exception):
        load_lexicon("root\t\t\t\n")
    entry = load_lexicon("root\tktb\t\t").entries("root")[0]
    assert entry.form[-1] == "+" and "+" not in entry.body


# ---------------------------------------------------------------------------
# feature structures


def test_unify_identity():
    assert unify(make_fs({"voice": "pass"}), {}) == make_fs({"voice": "pass"})


def test_unify_clash():
    assert unify(make_fs({"bp_pattern": "CuCC"}),
                 make_fs({"bp_pattern": "CiCaaC"})) is None


def test_unify_set_restriction():
    got = unify(make_fs({"pat": ["M1", "M2"]}), make_fs({"pat": "M2"}))
    assert got == {"pat": ("M2",)}


def test_conflicts_names_attribute():
    f1 = make_fs({"bp_pattern": "CuCC", "cat": "noun"})
    f2 = make_fs({"bp_pattern": "CiCaaC", "cat": "noun"})
    assert conflicts(f1, f2) == ("bp_pattern",)


_fs = st.dictionaries(
    st.sampled_from(["a", "b", "c", "d"]),
    st.frozensets(st.sampled_from(["x", "y", "z"]), min_size=1, max_size=3),
    max_size=4,
).map(lambda d: {k: tuple(sorted(v)) for k, v in d.items()})


def _norm(fs):
    return None if fs is None else {k: frozenset(v) for k, v in fs.items()}


@given(_fs, _fs)
def test_unify_commutative(f1, f2):
    assert _norm(unify(f1, f2)) == _norm(unify(f2, f1))


@given(_fs, _fs, _fs)
def test_unify_associative(f1, f2, f3):
    left = unify(f1, f2)
    right = unify(f2, f3)
    a = unify(left, f3) if left is not None else None
    b = unify(f1, right) if right is not None else None
    assert _norm(a) == _norm(b)


@given(_fs)
def test_unify_idempotent(fs):
    assert _norm(unify(fs, fs)) == _norm(fs)


@given(_fs, _fs, _fs)
def test_unify_all_matches_pairwise(f1, f2, f3):
    step = unify(f1, f2)
    expect = unify(step, f3) if step is not None else None
    assert _norm(unify_all(f1, f2, f3)) == _norm(expect)
