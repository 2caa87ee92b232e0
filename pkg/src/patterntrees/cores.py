"""Cores, extension cores and isomorphism of small structures."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainLimit
from .homomorphism import find_homomorphism, iter_homomorphisms
from .projection import projection_under_hom, projection_under_set
from .relational import Structure, marker_symbol, remove, restrict, singleton_marking, sorted_elems, union

DEFAULT_CORE_LIMIT = 16

__all__ = [
    "DEFAULT_CORE_LIMIT", "ExtensionPair", "core", "extension_core", "extension_pair_core",
    "is_isomorphic", "projection_under_hom", "projection_under_set",
]


@dataclass(frozen=True)
class ExtensionPair:
    anchor: Structure
    extension: Structure


def core(a: Structure, limit: int = DEFAULT_CORE_LIMIT) -> Structure:
    """A core of ``a``, as an induced substructure of ``a``.

    Repeatedly looks for an endomorphism that misses some element and
    shrinks to its image.  Elements are tried in a fixed order and merges
    of ``v`` into another element are attempted before a free search, which
    finds most retractions without a full endomorphism search.
    """
    if len(a.domain) > limit:
        raise DomainLimit(f"core search on {len(a.domain)} elements exceeds the limit of {limit}")
    return _core(a)


@lru_cache(maxsize=8192)
def _core(a: Structure) -> Structure:
    cur = a
    while True:
        h = _shrinking_endomorphism(cur)
        if h is None:
            return cur
        cur = restrict(cur, set(h.values()))


def _shrinking_endomorphism(a: Structure) -> dict | None:
    elems = sorted_elems(a.domain)
    for v in elems:
        target = remove(a, {v})
        for u in elems:
            if u != v:
                h = find_homomorphism(a, target, fixed={v: u})
                if h is not None:
                    return h
    return None


def extension_pair_core(p: ExtensionPair, limit: int = DEFAULT_CORE_LIMIT) -> Structure:
    """``core(A u B u S_dom(A))`` with the marker relations removed.

    The markers pin every anchor element, so the result still contains
    ``dom(A)`` and the part of ``B`` that cannot be folded away.
    """
    return _pair_core(p.anchor, p.extension, limit)


@lru_cache(maxsize=8192)
def _pair_core(anchor: Structure, extension: Structure, limit: int) -> Structure:
    anchor_elems = anchor.domain
    marked = union(union(anchor, extension), singleton_marking(anchor_elems))
    c = core(marked, limit)
    return c.without_symbols(marker_symbol(e) for e in anchor_elems)


def extension_core(p: ExtensionPair, limit: int = DEFAULT_CORE_LIMIT) -> Structure:
    """The pair core projected under ``dom(A)``: only the new elements remain, anchors live in annotations."""
    return projection_under_set(extension_pair_core(p, limit), p.anchor.domain)


def is_isomorphic(a: Structure, b: Structure, limit: int = DEFAULT_CORE_LIMIT) -> bool:
    if len(a.domain) != len(b.domain) or a.vocabulary != b.vocabulary:
        return False
    if any(len(a.relation(s)) != len(b.relation(s)) for s in a.vocabulary):
        return False
    if len(a.domain) > limit:
        raise DomainLimit(f"isomorphism test on {len(a.domain)} elements exceeds the limit of {limit}")
    # an injective hom between equal-size structures with equal relation sizes is a bijection on tuples
    return next(iter_homomorphisms(a, b, injective=True), None) is not None
