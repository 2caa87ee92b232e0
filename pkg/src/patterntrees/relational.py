"""Relational structures, atoms and Gaifman graphs.

A set of atoms over variables and a database over constants are both
represented as a :class:`Structure`; the elements of a query structure are
:class:`Var` objects and those of a database are :class:`Const` objects.
Mappings between them are plain ``dict`` objects.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator, Mapping

Element = Hashable


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


def elem_key(e: Any) -> tuple[str, str]:
    """Total order over elements of mixed type, used for every deterministic choice."""
    return (type(e).__name__, str(e))


def sorted_elems(elems: Iterable[Any]) -> list:
    return sorted(elems, key=elem_key)


@dataclass(frozen=True, slots=True)
class Symbol:
    """A relation symbol, optionally carrying selection annotations.

    ``selections`` holds ``(position, element)`` pairs with 1-based positions
    referring to the *original* arity of ``base``.  ``r3[1=?z]`` is the
    symbol obtained from ``r3`` after its first column was fixed to ``?z``.
    """

    base: str
    selections: tuple[tuple[int, Any], ...] = ()

    def __post_init__(self):
        positions = [i for i, _ in self.selections]
        if any(b <= a for a, b in zip(positions, positions[1:])) or any(i < 1 for i in positions):
            raise ValueError(f"selection positions must be strictly increasing and >= 1: {positions}")

    @property
    def annotated(self) -> bool:
        return bool(self.selections)

    def plain(self) -> Symbol:
        return Symbol(self.base)

    def __str__(self) -> str:
        if not self.selections:
            return self.base
        inner = ",".join(f"{i}={c}" for i, c in self.selections)
        return f"{self.base}[{inner}]"


@dataclass(frozen=True, slots=True)
class Atom:
    symbol: Symbol
    args: tuple

    def __post_init__(self):
        if isinstance(self.symbol, str):
            object.__setattr__(self, "symbol", Symbol(self.symbol))
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def variables(self) -> frozenset:
        return frozenset(a for a in self.args if isinstance(a, Var))

    def __str__(self) -> str:
        return f"{self.symbol}({', '.join(str(a) for a in self.args)})"


def atom(symbol: str | Symbol, *args: Any) -> Atom:
    """Shorthand: ``atom("r", "?x", "a")`` builds ``r(?x, a)``.

    String arguments starting with ``?`` become variables, other strings
    constants; non-string arguments are used as they are.
    """
    return Atom(symbol if isinstance(symbol, Symbol) else Symbol(symbol), tuple(term(a) for a in args))


def term(a: Any) -> Any:
    if isinstance(a, str):
        return Var(a[1:]) if a.startswith("?") else Const(a)
    return a


def variables_of(atoms: Iterable[Atom]) -> frozenset:
    return frozenset(v for a in atoms for v in a.variables)


def terms_of(atoms: Iterable[Atom]) -> frozenset:
    return frozenset(x for a in atoms for x in a.args)


class Structure:
    """A finite relational structure.

    Empty relations are dropped on construction, so a symbol absent from
    ``relations`` and a symbol with no tuples are the same thing.  Instances
    are immutable and hashable.
    """

    def __init__(self, domain: Iterable[Element] = (), relations: Mapping[Symbol, Iterable[tuple]] | None = None):
        rels: dict[Symbol, frozenset] = {}
        dom = set(domain)
        for sym, tuples in (relations or {}).items():
            if isinstance(sym, str):
                sym = Symbol(sym)
            ts = frozenset(tuple(t) for t in tuples)
            if not ts:
                continue
            arities = {len(t) for t in ts}
            if len(arities) != 1:
                raise ValueError(f"relation {sym} has tuples of different lengths {sorted(arities)}")
            for t in ts:
                dom.update(t)
            rels[sym] = ts
        object.__setattr__(self, "domain", frozenset(dom))
        object.__setattr__(self, "relations", rels)

    def __setattr__(self, name, value):
        if name in ("domain", "relations"):
            raise AttributeError("Structure is immutable")
        object.__setattr__(self, name, value)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom], domain: Iterable[Element] = ()) -> Structure:
        """Canonical structure of a set of atoms: its terms become the domain."""
        rels: dict[Symbol, set] = {}
        for a in atoms:
            rels.setdefault(a.symbol, set()).add(a.args)
        return cls(domain, rels)

    @cached_property
    def _key(self) -> tuple:
        return (self.domain, frozenset(self.relations.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        body = ", ".join(str(a) for a in self.sorted_atoms())
        iso = sorted_elems(self.isolated())
        extra = f"; isolated {{{', '.join(map(str, iso))}}}" if iso else ""
        return f"Structure({{{body}}}{extra})"

    def __len__(self) -> int:
        return sum(len(ts) for ts in self.relations.values())

    def relation(self, sym: Symbol) -> frozenset:
        return self.relations.get(sym, frozenset())

    @property
    def vocabulary(self) -> frozenset:
        return frozenset(self.relations)

    def atoms(self) -> Iterator[Atom]:
        for sym, ts in self.relations.items():
            for t in ts:
                yield Atom(sym, t)

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms(), key=lambda a: (str(a.symbol), [elem_key(x) for x in a.args]))

    def isolated(self) -> frozenset:
        used = {x for ts in self.relations.values() for t in ts for x in t}
        return self.domain - used

    def rename(self, mapping: Mapping[Element, Element]) -> Structure:
        """Apply an element renaming to tuples, domain and symbol annotations."""
        f = lambda x: mapping.get(x, x)
        rels: dict[Symbol, set] = {}
        for sym, ts in self.relations.items():
            nsym = Symbol(sym.base, tuple((i, f(c)) for i, c in sym.selections))
            rels.setdefault(nsym, set()).update(tuple(f(x) for x in t) for t in ts)
        return Structure((f(x) for x in self.domain), rels)

    def without_symbols(self, symbols: Iterable[Symbol]) -> Structure:
        drop = set(symbols)
        return Structure(self.domain, {s: ts for s, ts in self.relations.items() if s not in drop})


def union(a: Structure, b: Structure) -> Structure:
    rels: dict[Symbol, set] = {s: set(ts) for s, ts in a.relations.items()}
    for s, ts in b.relations.items():
        rels.setdefault(s, set()).update(ts)
    return Structure(a.domain | b.domain, rels)


def restrict(a: Structure, keep: Iterable[Element]) -> Structure:
    """Induced substructure on ``keep`` (intersected with the domain)."""
    keep = frozenset(keep) & a.domain
    rels = {s: {t for t in ts if all(x in keep for x in t)} for s, ts in a.relations.items()}
    return Structure(keep, rels)


def remove(a: Structure, elements: Iterable[Element]) -> Structure:
    return restrict(a, a.domain - frozenset(elements))


def marker_symbol(e: Element) -> Symbol:
    """The fresh unary symbol that pins element ``e``."""
    return Symbol(f"__mark:{e}")


def singleton_marking(elements: Iterable[Element]) -> Structure:
    """One fresh unary relation per element, holding just that element."""
    elems = list(elements)
    return Structure(elems, {marker_symbol(e): {(e,)} for e in elems})


def is_marker(sym: Symbol) -> bool:
    return sym.base.startswith("__mark:")


def relation_view(data: Structure, sym: Symbol) -> frozenset:
    """The relation ``sym`` denotes over ``data``.

    If ``data`` interprets ``sym`` directly, that relation is returned.
    Otherwise an annotated symbol ``R[i=b,...]`` is read as the selection
    ``i=b,...`` on the plain relation ``R`` of ``data`` followed by projection
    onto the unselected positions.
    """
    if sym in data.relations or not sym.selections:
        return data.relation(sym)
    base = data.relation(sym.plain())
    if not base:
        return frozenset()
    sel = dict(sym.selections)
    arity = len(next(iter(base)))
    if max(sel) > arity:
        return frozenset()
    keep = [i for i in range(1, arity + 1) if i not in sel]
    return frozenset(
        tuple(t[i - 1] for i in keep) for t in base if all(t[i - 1] == c for i, c in sel.items())
    )


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; edges are 2-element frozensets."""

    vertices: frozenset = frozenset()
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        es = frozenset(frozenset(e) for e in self.edges)
        for e in es:
            if len(e) != 2:
                raise ValueError(f"self-loop or malformed edge {set(e)}")
            if not e <= self.vertices:
                raise ValueError(f"edge {set(e)} has endpoints outside the vertex set")
        object.__setattr__(self, "edges", es)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable = ()) -> Graph:
        es = [frozenset(e) for e in edges]
        vs = set(vertices)
        for e in es:
            vs |= e
        return cls(frozenset(vs), frozenset(es))

    @cached_property
    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj


def gaifman_graph(source: Structure | Iterable[Atom]) -> Graph:
    """Co-occurrence graph of a structure (all domain elements) or of a set of atoms (their terms)."""
    if isinstance(source, Structure):
        vertices = set(source.domain)
        tuples = [t for ts in source.relations.values() for t in ts]
    else:
        atoms = list(source)
        vertices = set(terms_of(atoms))
        tuples = [a.args for a in atoms]
    edges = set()
    for t in tuples:
        distinct = set(t)
        for u in distinct:
            for v in distinct:
                if elem_key(u) < elem_key(v):
                    edges.add(frozenset((u, v)))
    return Graph(frozenset(vertices), frozenset(edges))
