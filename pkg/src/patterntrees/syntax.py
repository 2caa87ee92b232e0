"""Text formats: queries, fact files, pattern-tree JSON, mappings and pair files.

Query grammar (keywords are case-insensitive)::

    query := SELECT ( '*' | var* ) WHERE group
    group := '{' ( atom | OPTIONAL group )* '}'
    atom  := name '(' [ var ( ',' var )* ] ')' [ '.' ]

The outer group is the root, each OPTIONAL group a child of the group it
appears in; siblings keep their source order.
"""
from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .errors import DataError, ParseError, UnknownVariableWarning
from .patterns import PatternTree
from .relational import Atom, Const, Structure, Symbol, Var, sorted_elems, term

NAME = r"[A-Za-z_][A-Za-z0-9_]*"
CONST = r"[A-Za-z0-9_]+"
RESERVED_PREFIX = "__"

_TOKEN = re.compile(
    rf"(?P<ws>\s+)|(?P<comment>#[^\n]*)|(?P<var>\?{NAME})|(?P<name>{NAME})|(?P<punct>[(){{}},.*])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def keyword(self, word: str) -> None:
        tok = self.next()
        if tok.kind != "name" or tok.text.upper() != word:
            self.fail(f"expected {word}", tok)

    def punct(self, ch: str) -> None:
        tok = self.next()
        if tok.text != ch or tok.kind != "punct":
            self.fail(f"expected {ch!r}", tok)

    def is_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.text.upper() == word

    def query(self) -> PatternTree:
        self.keyword("SELECT")
        star, free = False, []
        if self.peek().text == "*":
            self.next()
            star = True
        else:
            while self.peek().kind == "var":
                free.append(Var(self.next().text[1:]))
        self.keyword("WHERE")
        nodes: list[tuple[int | None, list[Atom]]] = []
        self.group(None, nodes)
        if self.peek().kind != "eof":
            self.fail("expected end of query")
        tree = PatternTree.build(nodes, None if star else free)
        for v in sorted_elems(tree.free_vars - tree.all_vars):
            warnings.warn(f"selected variable {v} does not occur in the query", UnknownVariableWarning)
        return tree

    def group(self, parent: int | None, nodes: list) -> None:
        self.punct("{")
        me = len(nodes)
        atoms: list[Atom] = []
        nodes.append((parent, atoms))
        while True:
            tok = self.peek()
            if tok.text == "}" and tok.kind == "punct":
                self.next()
                return
            if self.is_keyword("OPTIONAL"):
                self.next()
                self.group(me, nodes)
            elif tok.kind == "name":
                atoms.append(self.atom())
            else:
                self.fail("expected an atom, OPTIONAL or '}'")

    def atom(self) -> Atom:
        tok = self.next()
        if tok.text.startswith(RESERVED_PREFIX):
            self.fail("relation names starting with '__' are reserved", tok)
        self.punct("(")
        args = []
        if self.peek().text != ")":
            while True:
                a = self.next()
                if a.kind != "var":
                    self.fail("query atoms take variables like ?x", a)
                args.append(Var(a.text[1:]))
                if self.peek().text == ",":
                    self.next()
                    continue
                break
        self.punct(")")
        if self.peek().text == ".":
            self.next()
        return Atom(Symbol(tok.text), tuple(args))


def parse_query(text: str) -> PatternTree:
    return _Parser(text).query()


def serialize_query(p: PatternTree) -> str:
    if p.free_vars == p.all_vars:
        head = "SELECT *"
    else:
        head = " ".join(["SELECT"] + [str(v) for v in sorted_elems(p.free_vars)])

    def group(t: int, depth: int) -> list[str]:
        pad = "  " * depth
        lines = [f"{pad}  {a}" for a in sorted(p.labels[t], key=str)]
        for c in p.children[t]:
            inner = group(c, depth + 1)
            lines.append(f"{pad}  OPTIONAL {inner[0].lstrip()}")
            lines.extend(inner[1:])
        return [f"{pad}{{"] + lines + [f"{pad}}}"]

    body = group(p.root, 0)
    return f"{head} WHERE {body[0]}\n" + "\n".join(body[1:]) + "\n"


# -- fact files -------------------------------------------------------------

_SYMBOL = rf"(?P<base>{NAME})(?:\[(?P<sel>[^\]]*)\])?"
_FACT = re.compile(rf"^\s*{_SYMBOL}\s*\((?P<args>[^)]*)\)\s*\.?\s*$")
_ELEMENT = re.compile(rf"^\s*(\?{NAME}|{CONST})\s*$")


def _parse_symbol(base: str, sel: str | None, line: int) -> Symbol:
    if base.startswith(RESERVED_PREFIX):
        raise DataError(f"line {line}: relation names starting with '__' are reserved")
    if not sel:
        return Symbol(base)
    pairs = []
    for part in sel.split(","):
        pos, _, val = part.partition("=")
        if not pos.strip().isdigit() or not val.strip():
            raise DataError(f"line {line}: malformed selection {part!r}")
        pairs.append((int(pos), term(val.strip())))
    try:
        return Symbol(base, tuple(pairs))
    except ValueError as e:
        raise DataError(f"line {line}: {e}") from None


def parse_atoms(text: str, allow_vars: bool = True) -> tuple[list[Atom], set]:
    """Atoms of a fact-style text, plus bare elements listed one per line."""
    atoms, bare = [], set()
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _FACT.match(line)
        if m is None:
            e = _ELEMENT.match(line)
            if e is None:
                raise DataError(f"line {n}: cannot parse {raw.strip()!r}")
            bare.add(term(e.group(1)))
            continue
        sym = _parse_symbol(m.group("base"), m.group("sel"), n)
        args = [a.strip() for a in m.group("args").split(",")] if m.group("args").strip() else []
        for a in args:
            if not re.fullmatch(rf"\?{NAME}|{CONST}", a):
                raise DataError(f"line {n}: bad argument {a!r}")
            if a.startswith("?") and not allow_vars:
                raise DataError(f"line {n}: variables are not allowed in a database")
        atoms.append(Atom(sym, tuple(term(a) for a in args)))
    arity: dict[Symbol, int] = {}
    for a in atoms:
        if arity.setdefault(a.symbol, len(a.args)) != len(a.args):
            raise DataError(f"relation {a.symbol} used with arities {arity[a.symbol]} and {len(a.args)}")
    return atoms, bare


def parse_facts(text: str) -> Structure:
    atoms, bare = parse_atoms(text, allow_vars=False)
    return Structure.from_atoms(atoms, domain=bare)


def serialize_facts(s: Structure) -> str:
    lines = [f"{a.symbol}({','.join(str(x) for x in a.args)})." for a in s.sorted_atoms()]
    lines += [str(e) for e in sorted_elems(s.isolated())]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_pair(text: str):
    """A file with ``#anchor`` and ``#extension`` sections; returns an :class:`ExtensionPair`."""
    from .cores import ExtensionPair

    sections: dict[str, list[str]] = {"anchor": [], "extension": []}
    current = None
    for raw in text.splitlines():
        head = raw.strip().lower()
        if head in ("#anchor", "#extension"):
            current = head[1:]
            continue
        if current is None:
            if raw.split("#", 1)[0].strip():
                raise DataError("content before the first #anchor/#extension header")
            continue
        sections[current].append(raw)
    a_atoms, a_bare = parse_atoms("\n".join(sections["anchor"]))
    b_atoms, b_bare = parse_atoms("\n".join(sections["extension"]))
    return ExtensionPair(Structure.from_atoms(a_atoms, a_bare), Structure.from_atoms(b_atoms, b_bare))


# -- JSON documents --------------------------------------------------------

def _var(name: str) -> Var:
    if not isinstance(name, str) or not re.fullmatch(rf"\??{NAME}", name):
        raise DataError(f"bad variable name {name!r}")
    return Var(name.lstrip("?"))


def _query_atom(text: str) -> Atom:
    m = _FACT.match(text)
    if m is None:
        raise DataError(f"cannot parse atom {text!r}")
    sym = _parse_symbol(m.group("base"), m.group("sel"), 0)
    args = [a.strip() for a in m.group("args").split(",")] if m.group("args").strip() else []
    return Atom(sym, tuple(_var(a) for a in args))


def tree_from_json(doc: Mapping[str, Any]) -> PatternTree:
    try:
        nodes = list(doc["nodes"])
        ids = [n["id"] for n in nodes]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate node ids")
        index = {i: k for k, i in enumerate(ids)}
        parents = []
        for n in nodes:
            p = n.get("parent")
            if p is not None and p not in index:
                raise DataError(f"node {n['id']} has unknown parent {p}")
            parents.append(None if p is None else index[p])
        labels = [frozenset(_query_atom(a) for a in n.get("atoms", [])) for n in nodes]
        free = doc.get("freeVars")
    except (KeyError, TypeError) as e:
        raise DataError(f"malformed pattern-tree document: {e}") from None
    try:
        tree = PatternTree(tuple(parents), tuple(labels), frozenset())
    except ValueError as e:
        raise DataError(str(e)) from None
    fv = tree.all_vars if free in (None, "*") else frozenset(_var(v) for v in free)
    return PatternTree(tree.parents, tree.labels, fv)


def tree_to_json(p: PatternTree) -> dict:
    return {
        "freeVars": [v.name for v in sorted_elems(p.free_vars)],
        "nodes": [
            {"id": t, "parent": p.parents[t], "atoms": sorted(str(a).replace("?", "") for a in p.labels[t])}
            for t in p.nodes
        ],
    }


def load_query(text: str) -> PatternTree:
    """Query text or pattern-tree JSON, whichever ``text`` holds."""
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise DataError(f"invalid JSON: {e}") from None
        return tree_from_json(doc)
    return parse_query(text)


def parse_mapping(doc: Mapping[str, Any]) -> dict:
    if not isinstance(doc, Mapping):
        raise DataError("a mapping must be a JSON object")
    out = {}
    for k, v in doc.items():
        if not isinstance(v, (str, int)) or not re.fullmatch(CONST, str(v)):
            raise DataError(f"bad constant {v!r} for {k}")
        out[_var(k)] = Const(str(v))
    return out


def mapping_to_json(mu: Mapping) -> dict:
    return {v.name: str(c) for v, c in sorted(mu.items(), key=lambda kv: kv[0].name)}


def structure_atoms_json(s: Structure) -> list[str]:
    return [str(a) for a in s.sorted_atoms()]


def format_mapping(mu: Mapping) -> str:
    return "{" + ", ".join(f"{v}->{c}" for v, c in sorted(mu.items(), key=lambda kv: kv[0].name)) + "}"


def atoms_text(atoms: Iterable[Atom]) -> str:
    return ", ".join(sorted(str(a) for a in atoms))
