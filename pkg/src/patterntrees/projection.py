"""Projection of a structure under a set, and of a (query, data) pair under a mapping.

Fixed positions move into the symbol's selection annotations, so
``r3(?z, ?w)`` projected under ``{?z}`` becomes ``r3[1=?z](?w)``.
Positions are always counted in the arity of the original, unannotated
symbol, which keeps repeated projections composable.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .relational import Structure, Symbol, relation_view


def _free_positions(sym: Symbol, width: int) -> list[int]:
    """Original positions of the ``width`` columns still present under ``sym``."""
    taken = {i for i, _ in sym.selections}
    out, i = [], 1
    while len(out) < width:
        if i not in taken:
            out.append(i)
        i += 1
    return out


def _annotate(sym: Symbol, fixed: dict[int, object]) -> Symbol:
    merged = dict(sym.selections)
    merged.update(fixed)
    return Symbol(sym.base, tuple(sorted(merged.items())))


def projection_under_set(s: Structure, v: Iterable) -> Structure:
    v = frozenset(v)
    if not v:
        return s
    rels: dict[Symbol, set] = {}
    for sym, tuples in s.relations.items():
        for t in tuples:
            positions = _free_positions(sym, len(t))
            fixed = {p: x for p, x in zip(positions, t) if x in v}
            rest = tuple(x for x in t if x not in v)
            rels.setdefault(_annotate(sym, fixed), set()).add(rest)
    return Structure(s.domain - v, rels)


def projection_under_hom(query: Structure, data: Structure, h: Mapping) -> tuple[Structure, Structure]:
    """Return ``(Q', D')`` such that ``h`` extends to a homomorphism ``query -> data``
    iff there is a homomorphism ``Q' -> D'``.

    Tuples whose image under ``h`` is already present in ``data`` are dropped;
    other tuples keep their unmapped positions and record the images of the
    mapped ones in the symbol.  Annotation elements inside ``dom(h)`` are
    rewritten through ``h``.  ``D'`` interprets each new symbol by selection
    and projection on the corresponding relation of ``data``.
    """
    rels: dict[Symbol, set] = {}
    for sym, tuples in query.relations.items():
        renamed = Symbol(sym.base, tuple((i, h.get(c, c)) for i, c in sym.selections))
        positions = None
        for t in tuples:
            if all(x in h for x in t):
                image = tuple(h[x] for x in t)
                if image in relation_view(data, renamed):
                    continue
            if positions is None:
                positions = _free_positions(sym, len(t))
            fixed = {p: h[x] for p, x in zip(positions, t) if x in h}
            rest = tuple(x for x in t if x not in h)
            rels.setdefault(_annotate(renamed, fixed), set()).add(rest)
    q_prime = Structure(query.domain - frozenset(h), rels)
    d_prime = Structure(data.domain, {sym: relation_view(data, sym) for sym in rels})
    return q_prime, d_prime
