"""Flat feature structures with set values and unification."""

from __future__ import annotations

from typing import Dict, Mapping, Optional, Tuple

# A feature structure maps attribute names to ordered tuples of admissible
# atomic values. A one-element tuple is an atomic value; a longer tuple is a
# disjunction. Order is preserved so that lexicon preference lists (e.g. a
# root's expected broken-plural patterns) survive unification.
FeatureStructure = Dict[str, Tuple[str, ...]]


def make_fs(pairs: Mapping[str, object]) -> FeatureStructure:
    fs: FeatureStructure = {}
    for attr, value in pairs.items():
        if isinstance(value, str):
            fs[attr] = (value,)
        else:
            fs[attr] = tuple(value)
    return fs


def unify(f1: FeatureStructure, f2: FeatureStructure) -> Optional[FeatureStructure]:
    """Pointwise merge; empty value intersection means failure (None)."""
    out = dict(f1)
    for attr, values in f2.items():
        if attr not in out:
            out[attr] = values
            continue
        merged = tuple(v for v in out[attr] if v in values)
        if not merged:
            return None
        out[attr] = merged
    return out


def unify_all(*structures: FeatureStructure) -> Optional[FeatureStructure]:
    out: Optional[FeatureStructure] = {}
    for fs in structures:
        out = unify(out, fs)
        if out is None:
            return None
    return out


def conflicts(f1: FeatureStructure, f2: FeatureStructure) -> Tuple[str, ...]:
    """Attributes on which the two structures cannot unify."""
    bad = []
    for attr, values in f2.items():
        if attr in f1 and not any(v in values for v in f1[attr]):
            bad.append(attr)
    return tuple(bad)


def restrict(fs: FeatureStructure, drop: frozenset) -> FeatureStructure:
    """Copy of *fs* without the attributes in *drop*."""
    return {a: v for a, v in fs.items() if a not in drop}
