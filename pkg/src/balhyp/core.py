"""Data model for k-uniform k-partite hypergraphs.

Vertices are identified by (part, index) with parts numbered 1..k and
indices 0-based.  Edges are positionally encoded: an edge is a k-tuple of
indices where slot i holds the part-(i+1) member, so "one vertex per part"
is structural and cannot be violated by construction.

A constructed hypergraph is immutable and safe to share across concurrent
readers; incidence and degree caches are built lazily on first use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from balhyp.errors import KhgParseError


class Vertex(NamedTuple):
    part: int  # 1-based
    index: int  # 0-based


Edge = tuple  # k-tuple of 0-based indices, slot i = part i+1


class KPartiteHypergraph:
    """k parts of vertices plus a duplicate-free set of transversal edges.

    The constructor normalizes but does not validate; use `validate` for
    diagnostics or `require_valid` to raise.  Memory is Theta(k * |E|).
    """

    def __init__(self, part_sizes: Sequence[int], edges: Iterable[Sequence[int]]):
        self.part_sizes = tuple(int(s) for s in part_sizes)
        self.k = len(self.part_sizes)
        self.edges = tuple(tuple(int(i) for i in e) for e in edges)

    @property
    def n_balanced(self) -> bool:
        return len(set(self.part_sizes)) <= 1

    @property
    def n(self) -> int:
        """Common part size; only meaningful for n-balanced hypergraphs."""
        if not self.n_balanced:
            raise ValueError("hypergraph is not n-balanced")
        return self.part_sizes[0]

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def incidence(self) -> tuple:
        """incidence[part-1][index] -> tuple of edge positions containing that vertex."""
        inc = [[[] for _ in range(sz)] for sz in self.part_sizes]
        for pos, e in enumerate(self.edges):
            for j, idx in enumerate(e):
                inc[j][idx].append(pos)
        return tuple(tuple(tuple(lst) for lst in part) for part in inc)

    def degree(self, v: Vertex) -> int:
        part, index = v
        return len(self.incidence[part - 1][index])

    @cached_property
    def max_degree(self) -> int:
        if not self.edges:
            return 0
        return max(len(lst) for part in self.incidence for lst in part)

    def transversal_count(self) -> int:
        total = 1
        for sz in self.part_sizes:
            total *= sz
        return total

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KPartiteHypergraph)
            and self.part_sizes == other.part_sizes
            and self.edge_set == other.edge_set
        )

    def __hash__(self):
        return hash((self.part_sizes, self.edge_set))

    def __repr__(self) -> str:
        return f"KPartiteHypergraph(k={self.k}, part_sizes={self.part_sizes}, m={len(self.edges)})"

    def require_valid(self) -> "KPartiteHypergraph":
        diag = validate(self)
        if not diag.ok:
            raise ValueError("invalid hypergraph: " + "; ".join(diag.violations))
        return self


@dataclass(frozen=True)
class Diagnostics:
    ok: bool
    violations: tuple


def validate(h: KPartiteHypergraph) -> Diagnostics:
    """Check all structural invariants; reports violations, never raises."""
    bad = []
    if h.k < 2:
        bad.append(f"k={h.k} must be at least 2")
    for j, sz in enumerate(h.part_sizes):
        if sz < 1:
            bad.append(f"part {j + 1} size {sz} not positive")
    seen = set()
    for pos, e in enumerate(h.edges):
        if len(e) != h.k:
            bad.append(f"edge {pos} {e}: arity {len(e)} != k={h.k}")
            continue
        for j, idx in enumerate(e):
            if not 0 <= idx < h.part_sizes[j]:
                bad.append(f"edge {pos} {e}: index {idx} out of range in part {j + 1}")
        if e in seen:
            bad.append(f"duplicate edge {e}")
        seen.add(e)
    return Diagnostics(ok=not bad, violations=tuple(bad))


class DegreeProfile:
    """Per-vertex degrees, max degree, average degree and minimum codegrees."""

    def __init__(self, h: KPartiteHypergraph):
        self.h = h
        self.per_part_degrees = tuple(
            tuple(len(lst) for lst in part) for part in h.incidence
        )
        self.max_degree = h.max_degree
        # average degree D = |E|/n is defined for n-balanced hypergraphs only
        self.avg_degree: Optional[Fraction] = (
            Fraction(len(h.edges), h.n) if h.n_balanced and h.part_sizes[0] > 0 else None
        )
        self._delta_cache: dict = {}

    def degree(self, v: Vertex) -> int:
        return self.per_part_degrees[v.part - 1][v.index]

    def min_codegree(self, j: int) -> int:
        if j not in self._delta_cache:
            self._delta_cache[j] = min_codegree(self.h, j)
        return self._delta_cache[j]


def codegree(h: KPartiteHypergraph, selection: Iterable[Vertex]) -> int:
    """Number of edges containing every vertex of `selection`.

    The selection must have at most one vertex per part; |selection| = 1
    gives the plain degree and the empty selection gives |E|.
    """
    sel = [v if isinstance(v, Vertex) else Vertex(*v) for v in selection]
    parts_seen = set()
    for v in sel:
        if not 1 <= v.part <= h.k:
            raise ValueError(f"vertex {v}: part out of range")
        if not 0 <= v.index < h.part_sizes[v.part - 1]:
            raise ValueError(f"vertex {v}: index out of range")
        if v.part in parts_seen:
            raise ValueError(f"selection has two vertices in part {v.part}")
        parts_seen.add(v.part)
    if not sel:
        return len(h.edges)
    # intersect incidence lists, smallest first
    lists = sorted((h.incidence[v.part - 1][v.index] for v in sel), key=len)
    live = set(lists[0])
    for lst in lists[1:]:
        live &= set(lst)
        if not live:
            return 0
    return len(live)


def min_codegree(h: KPartiteHypergraph, j: int) -> int:
    """delta_j: minimum codegree over all cross-part selections of size j.

    Exhaustive enumeration over C(k, j) * prod(part sizes) selections; desk
    scale only.
    """
    if not 1 <= j <= h.k:
        raise ValueError(f"j={j} out of range [1, {h.k}]")
    if not h.edges:
        return 0
    best = None
    for parts in itertools.combinations(range(h.k), j):
        for idxs in itertools.product(*(range(h.part_sizes[p]) for p in parts)):
            sel = [Vertex(p + 1, i) for p, i in zip(parts, idxs)]
            d = codegree(h, sel)
            if best is None or d < best:
                best = d
                if best == 0:
                    return 0
    return best


class BalancedSet:
    """Per-part vertex subsets of equal cardinality; side = common size."""

    def __init__(self, parts: Sequence[Iterable[int]]):
        normalized = []
        for j, sub in enumerate(parts):
            sub = tuple(sorted(int(i) for i in sub))
            if len(set(sub)) != len(sub):
                raise ValueError(f"duplicate vertex in part {j + 1}")
            normalized.append(sub)
        self.parts = tuple(normalized)
        sides = {len(sub) for sub in self.parts}
        if len(sides) > 1:
            raise ValueError(f"unequal part sizes {sorted(len(s) for s in self.parts)}")
        self.side = len(self.parts[0]) if self.parts else 0

    def __eq__(self, other):
        return isinstance(other, BalancedSet) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"BalancedSet(side={self.side}, parts={self.parts})"

    def total(self) -> int:
        return self.side * len(self.parts)


def is_balanced_independent(h: KPartiteHypergraph, a: BalancedSet) -> bool:
    """True iff `a` has equal sides (structural) and contains no edge of `h`."""
    if len(a.parts) != h.k:
        raise ValueError(f"balanced set has {len(a.parts)} parts, hypergraph has {h.k}")
    for j, sub in enumerate(a.parts):
        for idx in sub:
            if not 0 <= idx < h.part_sizes[j]:
                raise ValueError(f"index {idx} out of range in part {j + 1}")
    member = [set(sub) for sub in a.parts]
    for e in h.edges:
        if all(e[j] in member[j] for j in range(h.k)):
            return False
    return True


class PartialColoring:
    """Optional color per vertex; colors live in [1..q], None means uncolored."""

    def __init__(self, q: int, colors: Sequence[Sequence[Optional[int]]]):
        self.q = int(q)
        self.colors = tuple(
            tuple(None if c is None else int(c) for c in part) for part in colors
        )
        for part in self.colors:
            for c in part:
                if c is not None and not 1 <= c <= self.q:
                    raise ValueError(f"color {c} outside palette [1..{self.q}]")

    @classmethod
    def uncolored(cls, h: KPartiteHypergraph, q: int) -> "PartialColoring":
        return cls(q, [[None] * sz for sz in h.part_sizes])

    def color_of(self, v: Vertex) -> Optional[int]:
        part, index = v
        return self.colors[part - 1][index]

    def is_total(self) -> bool:
        return all(c is not None for part in self.colors for c in part)

    def colors_used(self) -> tuple:
        used = {c for part in self.colors for c in part if c is not None}
        return tuple(sorted(used))

    def class_of(self, c: int) -> tuple:
        """Per-part index tuples of the vertices colored c."""
        return tuple(
            tuple(i for i, col in enumerate(part) if col == c) for part in self.colors
        )

    def __eq__(self, other):
        return (
            isinstance(other, PartialColoring)
            and self.q == other.q
            and self.colors == other.colors
        )

    def __repr__(self):
        done = sum(c is not None for part in self.colors for c in part)
        return f"PartialColoring(q={self.q}, colored={done})"


def is_proper_on_colored(h: KPartiteHypergraph, phi: PartialColoring) -> bool:
    """No edge has all k members colored with one common color."""
    for e in h.edges:
        c0 = phi.colors[0][e[0]]
        if c0 is None:
            continue
        if all(phi.colors[j][e[j]] == c0 for j in range(1, h.k)):
            return False
    return True


def is_proper_balanced_coloring(
    h: KPartiteHypergraph, phi: PartialColoring, require_total: bool = True
) -> bool:
    """True iff every color class is a balanced independent set.

    Only colored vertices are checked: an edge is violating only when all k
    members carry one common color.  With `require_total`, every vertex must
    be colored as well.
    """
    if len(phi.colors) != h.k or tuple(len(p) for p in phi.colors) != h.part_sizes:
        raise ValueError("coloring shape does not match hypergraph")
    if require_total and not phi.is_total():
        return False
    for c in phi.colors_used():
        cls = phi.class_of(c)
        if len({len(sub) for sub in cls}) > 1:
            return False  # class not balanced
        if not is_balanced_independent(h, BalancedSet(cls)):
            return False
    return True


def complement_edges(h: KPartiteHypergraph) -> Iterator[tuple]:
    """Stream the valid non-edges of `h` in lexicographic order of indices.

    Exactly prod(part_sizes) - |E| tuples are produced (assuming edges are
    duplicate-free), each once; materialization is the caller's choice.
    """
    present = h.edge_set
    for t in itertools.product(*(range(sz) for sz in h.part_sizes)):
        if t not in present:
            yield t


def induced(h: KPartiteHypergraph, subsets: Sequence[Iterable[int]]):
    """Subhypergraph induced by per-part vertex subsets.

    Returns (subhypergraph, remap) where remap[part-1][new_index] is the
    original index.  Keeps exactly the edges fully inside the subsets.
    """
    if len(subsets) != h.k:
        raise ValueError(f"expected {h.k} subsets, got {len(subsets)}")
    remap = []
    back = []
    for j, sub in enumerate(subsets):
        keep = sorted(set(int(i) for i in sub))
        for idx in keep:
            if not 0 <= idx < h.part_sizes[j]:
                raise ValueError(f"index {idx} out of range in part {j + 1}")
        remap.append(tuple(keep))
        back.append({old: new for new, old in enumerate(keep)})
    kept_edges = []
    for e in h.edges:
        if all(e[j] in back[j] for j in range(h.k)):
            kept_edges.append(tuple(back[j][e[j]] for j in range(h.k)))
    sub_h = KPartiteHypergraph([len(r) for r in remap], kept_edges)
    return sub_h, tuple(remap)


# --- `khg v1` text format ---------------------------------------------------
#
# line 1: "khg 1"
# line 2: "<k> <n_1> ... <n_k>"
# line 3: "<m>"
# then m lines of k space-separated 0-based indices (slot i = part i).
# UTF-8, LF line endings, no trailing whitespace.  Emission is canonical
# (edges sorted lexicographically), so parse/emit round-trips canonical
# files byte-identically.


def parse_khg(text: str) -> KPartiteHypergraph:
    if "\r" in text:
        line = text[: text.index("\r")].count("\n") + 1
        raise KhgParseError(line, "CR found; khg v1 requires LF line endings")
    if not text.endswith("\n"):
        raise KhgParseError(max(1, text.count("\n") + 1), "missing final newline")
    lines = text.split("\n")[:-1]

    def fields(i: int, line: str) -> list:
        if line != line.strip() or "  " in line or not line:
            raise KhgParseError(i, f"malformed whitespace in {line!r}")
        return line.split(" ")

    if len(lines) < 3:
        raise KhgParseError(len(lines) or 1, "truncated header")
    if lines[0] != "khg 1":
        raise KhgParseError(1, f"bad magic {lines[0]!r}, expected 'khg 1'")
    head = fields(2, lines[1])
    try:
        k = int(head[0])
        sizes = [int(x) for x in head[1:]]
    except ValueError as exc:
        raise KhgParseError(2, f"non-integer token: {exc}") from None
    if k < 1 or len(sizes) != k:
        raise KhgParseError(2, f"expected k={k} part sizes, got {len(sizes)}")
    try:
        m = int(lines[2])
    except ValueError:
        raise KhgParseError(3, f"bad edge count {lines[2]!r}") from None
    if m < 0:
        raise KhgParseError(3, f"negative edge count {m}")
    if len(lines) != 3 + m:
        raise KhgParseError(len(lines), f"expected {m} edge lines, found {len(lines) - 3}")
    edges = []
    for off, line in enumerate(lines[3:]):
        lineno = 4 + off
        toks = fields(lineno, line)
        if len(toks) != k:
            raise KhgParseError(lineno, f"expected {k} indices, got {len(toks)}")
        try:
            edges.append(tuple(int(t) for t in toks))
        except ValueError as exc:
            raise KhgParseError(lineno, f"non-integer index: {exc}") from None
    return KPartiteHypergraph(sizes, edges)


def emit_khg(h: KPartiteHypergraph) -> str:
    out = ["khg 1", f"{h.k} " + " ".join(str(s) for s in h.part_sizes), str(len(h.edges))]
    for e in sorted(h.edges):
        out.append(" ".join(str(i) for i in e))
    return "\n".join(out) + "\n"


def load_khg(path) -> KPartiteHypergraph:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_khg(fh.read())


def dump_khg(h: KPartiteHypergraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(emit_khg(h))
