"""Alias relation storage, queries and the dot-completeness closure."""

from hypothesis import given, settings
from hypothesis import strategies as st

from mayalias import AliasRelation

ATTRS = frozenset({"u", "v"})
TAGS = ["a", "b", "u", "v"]
LIMIT = 3

exprs = st.lists(st.sampled_from(TAGS), min_size=0, max_size=LIMIT + 1).map(
    tuple
)
pairs = st.lists(st.tuples(exprs, exprs), max_size=8)


def make(raw, top=()):
    return AliasRelation.make(raw, LIMIT, top)


# -- storage invariants ------------------------------------------------------


@given(pairs)
def test_make_is_irreflexive_ordered_and_bounded(raw):
    r = make(raw)
    for a, b in r.pairs:
        assert a != b
        assert a <= b
        assert len(a) <= LIMIT and len(b) <= LIMIT


@given(pairs)
def test_related_is_symmetric(raw):
    r = make(raw)
    for a, b in r.pairs:
        assert r.related(a, b) and r.related(b, a)


def test_topped_by_length_and_by_prefix():
    r = make([], top=[("a",)])
    assert r.is_topped(("a",))
    assert r.is_topped(("a", "u"))  # everything below a top expression
    assert not r.is_topped(("b",))
    assert r.is_topped(("b",) * (LIMIT + 1))  # over-cutoff, implicitly top
    assert r.related(("a",), ("b",))  # top is aliased to everything


def test_self_aliasing_never_claimed():
    r = make([(("a",), ("b",))])
    assert not r.related(("a",), ("a",))


# -- closure -----------------------------------------------------------------


@given(pairs)
@settings(max_examples=60)
def test_dot_complete_is_idempotent_and_extensive(raw):
    r = make(raw)
    closed = r.dot_complete(ATTRS)
    assert r.claims_subset(closed)
    assert closed.dot_complete(ATTRS) == closed


def test_closure_suffix_rule():
    r = make([(("a",), ("b",))]).dot_complete(ATTRS)
    assert r.related(("a", "u"), ("b", "u"))
    assert r.related(("a", "u", "v"), ("b", "u", "v"))


def test_closure_prefix_transfer_rule():
    # [a, b] and [a.u, c] together force [b.u, c]
    r = make([(("a",), ("b",)), (("a", "u"), ("c",))]).dot_complete(ATTRS)
    assert r.related(("b", "u"), ("c",))


def test_closure_ignores_non_attribute_interior_tags():
    # b is not an attribute, so [a, b] does not extend to [a.b, ...]
    r = make([(("a",), ("c",)), (("a", "b"), ("d",))]).dot_complete(ATTRS)
    assert not r.related(("c", "b"), ("d",))


def test_closure_drops_overflow_quietly():
    # the suffix family of [a, b] stops at the cutoff without topping anyone
    r = make([(("a",), ("b", "u"))]).dot_complete(ATTRS)
    assert not r.top
    assert not r.is_topped(("a",))


def test_untracked_partner_detection():
    # partners of a.u of length 3 extend past the cutoff under a .u suffix
    r = make([(("a", "u"), ("b", "u", "v"))]).dot_complete(ATTRS)
    assert r.has_untracked_partner(("a", "u", "u"), ATTRS)
    assert not r.has_untracked_partner(("a",), ATTRS)
    # a non-attribute suffix denotes no heap path and derives nothing
    assert not r.has_untracked_partner(("a", "u", "b"), ATTRS)


# -- canonical form ----------------------------------------------------------


@given(pairs)
@settings(max_examples=60)
def test_canonical_groups_regenerate_pairs_exactly(raw):
    r = make(raw)
    regenerated = set()
    for group in r.canonical_groups():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                regenerated.add((a, b) if a <= b else (b, a))
    assert regenerated == set(r.pairs)


def test_groups_respect_non_transitivity():
    r = make([(("x",), ("y",)), (("x",), ("z",))])
    assert r.canonical_groups() == [(("x",), ("y",)), (("x",), ("z",))]


# -- operators ---------------------------------------------------------------


def test_minus_pair_removes_exactly_one_pair():
    r = make([(("a",), ("b",)), (("a", "u"), ("b", "u"))])
    cut = r.minus_pair(("a",), ("b",))
    assert not cut.related(("a",), ("b",))
    assert cut.related(("a", "u"), ("b", "u"))


def test_minus_tag_deep_removal_through_current_aliases():
    # c is aliased to Current, so c.x.u is removed along with x-rooted pairs
    r = make([((), ("c",)), (("c", "x", "u"), ("z",)), (("x",), ("w",))])
    out = r.minus_tag("x", deep=True)
    assert not out.related(("c", "x", "u"), ("z",))
    assert not out.related(("x",), ("w",))
    assert out.related((), ("c",))


def test_augment_adds_pairs_and_closes():
    r = make([]).augment(("t",), [("s",), ("s", "u")], ATTRS)
    assert r.related(("t",), ("s",))
    assert r.related(("t", "u"), ("s", "u"))


def test_union_requires_matching_cutoffs():
    import pytest

    with pytest.raises(ValueError):
        make([]).union(AliasRelation.empty(LIMIT + 1))


def test_transpose_round_trip_restores_root_pair():
    from mayalias.lang import concat, inverse_path

    x = ("x",)
    r = make([(("x", "a"), ("y",))])
    inner = r.transpose(x, into_callee=True)
    # the x-rooted member cancels to a callee-relative path
    assert inner.related(("a",), concat(inverse_path(x), ("y",)))
    back = inner.transpose(x, into_callee=False).dot_complete(ATTRS)
    assert back.related(("x", "a"), ("y",))
