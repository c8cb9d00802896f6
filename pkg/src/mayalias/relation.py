"""Alias relations: symmetric irreflexive sets of path-expression pairs.

A relation stores explicit unordered pairs plus a "top" class: expressions
whose tracked length exceeded the cutoff and which are therefore considered
aliased to every expression.  The canonical grouped form is a derived view,
not the storage (relations are not transitive, so clique storage would be
lossy).
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .lang import (
    CURRENT,
    Expr,
    concat,
    expr_str,
    has_negative,
    inverse_path,
)

Pair = tuple[Expr, Expr]


def ordered_pair(a: Expr, b: Expr) -> Pair:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class AliasRelation:
    """Immutable alias relation clamped at a maximum path length."""

    pairs: frozenset[Pair]
    top: frozenset[Expr]
    limit: int

    # -- construction ------------------------------------------------------

    @staticmethod
    def empty(limit: int) -> "AliasRelation":
        if limit < 1:
            raise ValueError("cutoff must be a positive integer")
        return AliasRelation(frozenset(), frozenset(), limit)

    @staticmethod
    def make(
        pairs: Iterable[tuple[Expr, Expr]],
        limit: int,
        top: Iterable[Expr] = (),
    ) -> "AliasRelation":
        """Normalize raw pairs: order members, drop reflexive pairs and pairs
        with a member longer than the cutoff (such expressions are treated as
        aliased to everything already, see `is_topped`).  Top entries are kept
        whatever their length: a transposition across a call boundary can
        stretch one past the cutoff and the inverse transposition must be able
        to shrink it back."""
        kept: set[Pair] = set()
        for a, b in pairs:
            if a == b or len(a) > limit or len(b) > limit:
                continue
            kept.add(ordered_pair(a, b))
        return AliasRelation(frozenset(kept), frozenset(top), limit)

    # -- queries -----------------------------------------------------------

    def is_topped(self, e: Expr) -> bool:
        """True when the expression is folded into the top class, directly or
        through a prefix (everything below a top expression is unknown)."""
        if len(e) > self.limit:
            return True
        if not self.top:
            return False
        for i in range(len(e) + 1):
            if e[:i] in self.top:
                return True
        return False

    def related(self, e: Expr, f: Expr) -> bool:
        """May e and f denote the same object according to this relation?"""
        if e == f:
            return False
        if self.is_topped(e) or self.is_topped(f):
            return True
        return ordered_pair(e, f) in self.pairs

    def partners(self, e: Expr) -> set[Expr]:
        out = {b if a == e else a for a, b in self.pairs if e in (a, b)}
        return out

    def aliases_of(self, e: Expr) -> tuple[set[Expr], bool]:
        """The set of expressions aliased to e, plus e itself, and a flag
        telling whether e falls into the top class (aliased to the whole
        expression universe)."""
        out = self.partners(e)
        out.add(e)
        out.update(self.top)
        return out, self.is_topped(e)

    def has_untracked_partner(self, e: Expr, attrs: frozenset[str]) -> bool:
        """True when dot-completeness derives for e a partner longer than the
        cutoff: e = w.s for some attribute suffix s where a stored partner of
        w, extended with s, exceeds the cutoff.  Such pairs are not stored
        (every over-cutoff expression is already aliased to everything), but
        an operation that copies e's aliases wholesale -- assignment from e,
        binding to e -- must know about them and fold its target into the top
        class."""
        if len(e) > self.limit:
            return True
        n = len(e)
        suffix_lens: dict[Expr, int] = {}
        for i in range(n - 1, -1, -1):
            if e[i] not in attrs:
                break
            suffix_lens[e[:i]] = n - i
        if not suffix_lens:
            return False
        for a, b in self.pairs:
            for m, other in ((a, b), (b, a)):
                s = suffix_lens.get(m)
                if s is not None and len(other) + s > self.limit:
                    return True
        return False

    def expressions(self) -> set[Expr]:
        out: set[Expr] = set(self.top)
        for a, b in self.pairs:
            out.add(a)
            out.add(b)
        return out

    def claims_subset(self, other: "AliasRelation") -> bool:
        """Every aliasing claim of self is also claimed by other."""
        for a, b in self.pairs:
            if not other.related(a, b):
                return False
        return all(other.is_topped(e) for e in self.top)

    # -- primitive operators ----------------------------------------------

    def union(self, other: "AliasRelation") -> "AliasRelation":
        if self.limit != other.limit:
            raise ValueError("cannot unite relations with different cutoffs")
        return AliasRelation(
            self.pairs | other.pairs, self.top | other.top, self.limit
        )

    def minus_tag(self, x: str, deep: bool = True) -> "AliasRelation":
        """Remove every pair with a member rooted at x; with deep removal,
        also members of the form e0.x.e where e0 is aliased to Current.

        Deep removal is only sound for tags that can exist on the current
        object alone (variables, formals, locals); for attribute targets the
        caller passes deep=False and keeps the possibly stale pairs.
        """
        current_aliases: set[Expr] = set()
        if deep:
            current_aliases = self.partners(CURRENT) | set(self.top)

        def removed(m: Expr) -> bool:
            if m and m[0] == x:
                return True
            if deep:
                for i in range(1, len(m)):
                    if m[i] == x and m[:i] in current_aliases:
                        return True
            return False

        pairs = frozenset(
            p for p in self.pairs if not (removed(p[0]) or removed(p[1]))
        )
        top = frozenset(e for e in self.top if not removed(e))
        return AliasRelation(pairs, top, self.limit)

    def minus_exprs(self, exprs: set[Expr], x: str, deep: bool) -> set[Expr]:
        """Set-difference counterpart of minus_tag, applied to a plain set of
        expressions (used by the assignment rule on r/s)."""
        current_aliases: set[Expr] = set()
        if deep:
            current_aliases = self.partners(CURRENT) | set(self.top)

        def removed(m: Expr) -> bool:
            if m and m[0] == x:
                return True
            if deep:
                for i in range(1, len(m)):
                    if m[i] == x and m[:i] in current_aliases:
                        return True
            return False

        return {e for e in exprs if not removed(e)}

    def drop_containing(self, tags: Iterable[str]) -> "AliasRelation":
        """Remove every pair and top entry with a member that mentions one of
        the given tags in any position.  Used to scrub analysis-internal names
        (old-value tags, renamed formals and locals) once the closure has
        derived their caller-expressible consequences."""
        bad = frozenset(tags)

        def dirty(m: Expr) -> bool:
            return any(t in bad for t in m)

        return AliasRelation(
            frozenset(
                p for p in self.pairs if not (dirty(p[0]) or dirty(p[1]))
            ),
            frozenset(e for e in self.top if not dirty(e)),
            self.limit,
        )

    def minus_pair(self, a: Expr, b: Expr) -> "AliasRelation":
        """Remove exactly the pair [a, b].

        Suffixed pairs [a.e, b.e] are deliberately kept: two distinct objects
        can still agree on a field, so a disequality of a and b says nothing
        about their extensions.  Note that a later closure can re-derive
        [a, b] itself from surviving prefix pairs; a cut is therefore a
        local refinement, not a standing invariant.
        """
        return AliasRelation(
            self.pairs - {ordered_pair(a, b)}, self.top, self.limit
        )

    def augment(
        self, x: Expr, ys: Iterable[Expr], attrs: frozenset[str]
    ) -> "AliasRelation":
        """Add the pairs [x, y] for every y and close the whole relation under
        dot-completeness, folding overflow into the top class."""
        new_pairs = set(self.pairs)
        for y in ys:
            if y != x:
                new_pairs.add(ordered_pair(x, y))
        pairs, top = _dot_complete(new_pairs, set(self.top), attrs, self.limit)
        return AliasRelation(frozenset(pairs), frozenset(top), self.limit)

    def dot_complete(self, attrs: frozenset[str]) -> "AliasRelation":
        pairs, top = _dot_complete(
            set(self.pairs), set(self.top), attrs, self.limit
        )
        return AliasRelation(frozenset(pairs), frozenset(top), self.limit)

    def substitute(
        self, olds: list[Expr], news: list[Expr]
    ) -> "AliasRelation":
        """Replace the maximal prefix occurrence of each old expression."""
        if len(olds) != len(news):
            raise ValueError("substitution lists must have equal length")
        if len(set(olds)) != len(olds):
            raise ValueError("substituted expressions must be distinct")
        # longest old first, so the maximal prefix wins
        table = sorted(zip(olds, news), key=lambda on: -len(on[0]))

        def subst(e: Expr) -> Expr:
            for old, new in table:
                if old and len(e) >= len(old) and e[: len(old)] == old:
                    return concat(new, e[len(old):])
            return e

        return AliasRelation.make(
            ((subst(a), subst(b)) for a, b in self.pairs),
            self.limit,
            (subst(e) for e in self.top),
        )

    def transpose(self, x: Expr, into_callee: bool) -> "AliasRelation":
        """Shift the relation across a qualified-call boundary on target x.

        Into the callee every expression is prefixed with the inverse path of
        x; out of the callee, with x itself.  Inverse tags cancel at the
        junction; expressions still carrying negative tags after the outward
        shift denote caller-invisible paths and are dropped.
        """
        prefix = inverse_path(x) if into_callee else x

        def shift(e: Expr) -> Expr:
            return concat(prefix, e)

        pairs: set[tuple[Expr, Expr]] = set()
        for a, b in self.pairs:
            sa, sb = shift(a), shift(b)
            if not into_callee and (has_negative(sa) or has_negative(sb)):
                continue
            pairs.add((sa, sb))
        top: set[Expr] = set()
        for e in self.top:
            se = shift(e)
            if not into_callee and has_negative(se):
                continue
            top.add(se)
        return AliasRelation.make(pairs, self.limit, top)

    def clamp(self, limit: Optional[int] = None) -> "AliasRelation":
        limit = self.limit if limit is None else limit
        return AliasRelation.make(self.pairs, limit, self.top)

    # -- canonical grouped form -------------------------------------------

    def canonical_groups(self) -> list[tuple[Expr, ...]]:
        """Maximal groups of mutually aliased expressions, none a subset of
        another; expanding the groups back to pairs regenerates the relation
        exactly.  Deterministic: members sorted, groups ordered by smallest
        member."""
        adj: dict[Expr, set[Expr]] = defaultdict(set)
        for a, b in self.pairs:
            adj[a].add(b)
            adj[b].add(a)
        cliques = _maximal_cliques(adj)
        groups = [tuple(sorted(c)) for c in cliques if len(c) > 1]
        return sorted(groups)

    def render_canonical(self) -> str:
        parts = [
            "{" + ", ".join(expr_str(e) for e in group) + "}"
            for group in self.canonical_groups()
        ]
        if self.top:
            parts.append(
                "top: {" + ", ".join(expr_str(e) for e in sorted(self.top)) + "}"
            )
        return " ".join(parts) if parts else "{}"

    def to_dict(self) -> dict:
        return {
            "pairs": sorted(
                [expr_str(a), expr_str(b)] for a, b in self.pairs
            ),
            "top": sorted(expr_str(e) for e in self.top),
            "L": self.limit,
        }

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)


# ---------------------------------------------------------------------------
# Dot-completeness closure
# ---------------------------------------------------------------------------


def _dot_complete(
    pairs: set[Pair],
    top: set[Expr],
    attrs: frozenset[str],
    limit: int,
) -> tuple[set[Pair], set[Expr]]:
    """Close a pair set under the two dot-completeness rules:

    (i)  [t, u] and [t.a, v] present  =>  [u.a, v] present;
    (ii) [t, u] present and a an attribute  =>  [t.a, u.a] present;

    iterated to a fixed point.  Pairs whose members both fit the cutoff are
    stored; a derived member that grows past the cutoff is simply not tracked,
    because every expression longer than the cutoff is already treated as
    aliased to everything (see `is_topped`).  This keeps the closure finite
    and small.
    """
    partners: dict[Expr, set[Expr]] = {}
    # parent expr -> set of (extension tag, partner of the extended expr)
    extensions: dict[Expr, set[tuple[str, Expr]]] = {}
    queue: deque[Pair] = deque()
    attrlist = sorted(attrs)
    partners_get = partners.get
    extensions_get = extensions.get
    append = queue.append

    def add(a: Expr, b: Expr) -> None:
        pa = partners_get(a)
        if pa is not None and b in pa:
            return
        if a == b:
            return
        if len(a) > limit or len(b) > limit:
            # not tracked: expressions longer than the cutoff are treated as
            # aliased to everything already (see `is_topped`), and the rules
            # that copy an expression's aliases wholesale compensate for the
            # missing long partners (see `has_untracked_partner`)
            return
        if pa is None:
            pa = partners[a] = set()
        pa.add(b)
        pb = partners_get(b)
        if pb is None:
            pb = partners[b] = set()
        pb.add(a)
        # rule (i) only ever extends by attribute tags: a non-attribute tag
        # in a non-root position cannot denote a heap path, so derivations
        # through it carry no information
        if a and a[-1] in attrs:
            parent = a[:-1]
            ea = extensions_get(parent)
            if ea is None:
                ea = extensions[parent] = set()
            ea.add((a[-1], b))
        if b and b[-1] in attrs:
            parent = b[:-1]
            eb = extensions_get(parent)
            if eb is None:
                eb = extensions[parent] = set()
            eb.add((b[-1], a))
        append((a, b))

    for a, b in pairs:
        add(a, b)

    popleft = queue.popleft
    while queue:
        a, b = popleft()
        # rule (ii): extend both members with every attribute
        if len(a) < limit and len(b) < limit:
            for attr in attrlist:
                add(a + (attr,), b + (attr,))
        for t, u in ((a, b), (b, a)):
            # rule (i), the new pair acting as [t, u]
            if len(u) < limit:
                ext = extensions_get(t)
                if ext:
                    for tag, v in list(ext):
                        add(u + (tag,), v)
            # rule (i), the new pair acting as [t.a, v] (t.a == t here)
            if t and t[-1] in attrs:
                parent, tag = t[:-1], t[-1]
                ws = partners_get(parent)
                if ws:
                    for w in list(ws):
                        if len(w) < limit:
                            add(w + (tag,), u)

    out_pairs = {
        ordered_pair(a, b) for a, bs in partners.items() for b in bs
    }
    return out_pairs, top


# ---------------------------------------------------------------------------
# Maximal cliques (Bron-Kerbosch with pivoting, deterministic order)
# ---------------------------------------------------------------------------


def _maximal_cliques(adj: dict[Expr, set[Expr]]) -> list[list[Expr]]:
    out: list[list[Expr]] = []

    def expand(r: list[Expr], p: list[Expr], x: list[Expr]) -> None:
        if not p and not x:
            out.append(sorted(r))
            return
        p_set = set(p)
        pivot = max(p + x, key=lambda v: len(adj[v] & p_set))
        for v in [v for v in p if v not in adj[pivot]]:
            expand(
                r + [v],
                [w for w in p if w in adj[v]],
                [w for w in x if w in adj[v]],
            )
            p = [w for w in p if w != v]
            x = sorted(set(x) | {v})

    # cliques never span connected components, so search each one separately
    seen: set[Expr] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        component = {start}
        frontier = [start]
        while frontier:
            for w in adj[frontier.pop()]:
                if w not in component:
                    component.add(w)
                    frontier.append(w)
        seen |= component
        expand([], sorted(component), [])
    return out
