"""Finite flag complexes represented by their 1-skeleton.

A flag complex is determined by its underlying graph: every clique spans a
simplex.  We therefore store only the adjacency structure, as one python
integer bitmask per vertex, which makes induced subcomplexes, links and
connectivity checks cheap bit operations.  All operations are pure and a
FlagComplex is immutable after construction, so instances can be shared
freely across workers.

Vertex sets double as elements of the group (Z/2)^n under symmetric
difference; see VertexSet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DuplicateEdge,
    IndexOutOfRange,
    NotASimplex,
    SelfLoop,
    TooLarge,
    WidthMismatch,
)

MAX_STATIC_VERTICES = 4096


@dataclass(frozen=True)
class VertexSet:
    """Subset of vertices as a fixed-width bit vector.

    Doubles as an element of (Z/2)^width: XOR is the group operation,
    the empty set is the identity.
    """

    width: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.width:
            raise WidthMismatch(f"bits do not fit in width {self.width}")

    @classmethod
    def from_indices(cls, width, indices):
        bits = 0
        for i in indices:
            if not 0 <= i < width:
                raise IndexOutOfRange(f"vertex {i} not in [0, {width})")
            bits |= 1 << i
        return cls(width, bits)

    @classmethod
    def full(cls, width):
        return cls(width, (1 << width) - 1)

    @classmethod
    def empty(cls, width):
        return cls(width, 0)

    def __xor__(self, other):
        if self.width != other.width:
            raise WidthMismatch("vertex sets have different widths")
        return VertexSet(self.width, self.bits ^ other.bits)

    def __contains__(self, vertex):
        return bool((self.bits >> vertex) & 1)

    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self):
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def complement(self):
        return VertexSet(self.width, self.bits ^ ((1 << self.width) - 1))

    def indices(self):
        return tuple(self)

    def to_hex(self):
        return format(self.bits, "0{}x".format((self.width + 3) // 4))

    @classmethod
    def from_hex(cls, width, text):
        return cls(width, int(text, 16))


class FlagComplex:
    """Finite flag complex; simplices are exactly the cliques of the graph."""

    def __init__(self, vertex_count, adjacency_masks, labels=None, max_vertices=MAX_STATIC_VERTICES):
        if vertex_count > max_vertices:
            raise TooLarge(f"{vertex_count} vertices exceeds cap {max_vertices}")
        if len(adjacency_masks) != vertex_count:
            raise IndexOutOfRange("adjacency length must equal vertex count")
        for v, mask in enumerate(adjacency_masks):
            if mask >> vertex_count:
                raise IndexOutOfRange(f"adjacency of {v} mentions vertices >= {vertex_count}")
            if (mask >> v) & 1:
                raise SelfLoop(f"vertex {v} adjacent to itself")
        for v, mask in enumerate(adjacency_masks):
            rest = mask
            while rest:
                low = rest & -rest
                w = low.bit_length() - 1
                rest ^= low
                if not (adjacency_masks[w] >> v) & 1:
                    raise IndexOutOfRange(f"adjacency not symmetric at ({v}, {w})")
        self.n = vertex_count
        self.adj = tuple(adjacency_masks)
        self.labels = tuple(labels) if labels is not None else None
        self._simplices = None

    # -- construction --------------------------------------------------

    @classmethod
    def from_graph(cls, n, edges, labels=None):
        """Complex whose simplices are the cliques of the given graph."""
        adj = [0] * n
        seen = set()
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise IndexOutOfRange(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise SelfLoop(f"self loop at {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DuplicateEdge(f"edge {key} given twice")
            seen.add(key)
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(n, adj, labels)

    @classmethod
    def from_text(cls, text):
        """Parse the line format: 'n <count>', 'e <i> <j>', 'label <i> <str>'."""
        n = None
        edges = []
        labels = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(maxsplit=2)
            if parts[0] == "n":
                n = int(parts[1])
            elif parts[0] == "e":
                i, j = parts[1], parts[2].split()[0]
                edges.append((int(i), int(j)))
            elif parts[0] == "label":
                labels[int(parts[1])] = parts[2]
            else:
                raise ValueError(f"unrecognized line: {line!r}")
        if n is None:
            raise ValueError("missing 'n <vertex_count>' line")
        label_list = None
        if labels:
            label_list = [labels.get(i) for i in range(n)]
        return cls.from_graph(n, edges, label_list)

    def to_text(self):
        lines = [f"n {self.n}"]
        for i in range(self.n):
            rest = self.adj[i] >> (i + 1)
            while rest:
                low = rest & -rest
                j = i + 1 + (low.bit_length() - 1)
                rest ^= low
                lines.append(f"e {i} {j}")
        if self.labels is not None:
            for i, lab in enumerate(self.labels):
                if lab is not None:
                    lines.append(f"label {i} {lab}")
        return "\n".join(lines) + "\n"

    # -- basic structure -----------------------------------------------

    @property
    def nonempty(self):
        return self.n > 0

    def edge_count(self):
        return sum(m.bit_count() for m in self.adj) // 2

    def edges(self):
        out = []
        for i in range(self.n):
            rest = self.adj[i] >> (i + 1)
            while rest:
                low = rest & -rest
                out.append((i, i + 1 + low.bit_length() - 1))
                rest ^= low
        return out

    def is_simplex(self, vertices):
        vs = sorted(set(vertices))
        if len(vs) != len(list(vertices)):
            return False
        for v in vs:
            if not 0 <= v < self.n:
                return False
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                if not (self.adj[vs[a]] >> vs[b]) & 1:
                    return False
        return True

    def induced(self, subset: VertexSet):
        """Induced subcomplex on `subset`, vertices renumbered ascending.

        Labels follow the surviving vertices; the original indices are kept
        in `parent_vertices`.
        """
        if subset.width != self.n:
            raise WidthMismatch(f"vertex set width {subset.width} != {self.n}")
        keep = subset.indices()
        pos = {v: i for i, v in enumerate(keep)}
        adj = [0] * len(keep)
        for i, v in enumerate(keep):
            rest = self.adj[v] & subset.bits
            while rest:
                low = rest & -rest
                adj[i] |= 1 << pos[low.bit_length() - 1]
                rest ^= low
        labels = None
        if self.labels is not None:
            labels = [self.labels[v] for v in keep]
        sub = FlagComplex(len(keep), adj, labels)
        sub.parent_vertices = keep
        return sub

    # -- simplex enumeration --------------------------------------------

    def simplices_by_dim(self):
        """All simplices grouped by dimension, each list in lexicographic order."""
        if self._simplices is not None:
            return self._simplices
        by_dim = []

        def grow(prefix, candidates):
            dim = len(prefix) - 1
            while len(by_dim) <= dim:
                by_dim.append([])
            by_dim[dim].append(tuple(prefix))
            rest = candidates
            while rest:
                low = rest & -rest
                v = low.bit_length() - 1
                rest ^= low
                prefix.append(v)
                grow(prefix, candidates & self.adj[v] & ~((1 << (v + 1)) - 1))
                prefix.pop()

        full = (1 << self.n) - 1
        rest = full
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            grow([v], self.adj[v] & ~((1 << (v + 1)) - 1))
        self._simplices = [tuple(level) for level in by_dim]
        return self._simplices

    @property
    def dimension(self):
        return len(self.simplices_by_dim()) - 1

    def f_vector(self):
        """Simplex counts (l_0, ..., l_d); () for the empty complex."""
        return tuple(len(level) for level in self.simplices_by_dim())

    def maximal_simplices(self):
        """Maximal cliques via pivoting Bron-Kerbosch, output sorted lex."""
        if self.n == 0:
            return []
        order = self._degeneracy_order()
        rank = {v: i for i, v in enumerate(order)}
        out = []

        def expand(r, p, x):
            if p == 0 and x == 0:
                out.append(tuple(sorted(r)))
                return
            pivot = -1
            best = -1
            both = p | x
            rest = both
            while rest:
                low = rest & -rest
                u = low.bit_length() - 1
                rest ^= low
                deg = (self.adj[u] & p).bit_count()
                if deg > best:
                    best, pivot = deg, u
            cand = p & ~self.adj[pivot]
            while cand:
                low = cand & -cand
                v = low.bit_length() - 1
                cand ^= low
                expand(r | {v}, p & self.adj[v], x & self.adj[v])
                p &= ~(1 << v)
                x |= 1 << v

        p = (1 << self.n) - 1
        x = 0
        for v in order:
            expand({v}, p & self.adj[v], x & self.adj[v])
            p &= ~(1 << v)
            x |= 1 << v
        out.sort()
        return out

    def _degeneracy_order(self):
        remaining = set(range(self.n))
        degree = {v: (self.adj[v]).bit_count() for v in remaining}
        order = []
        while remaining:
            v = min(remaining, key=lambda u: (degree[u], u))
            order.append(v)
            remaining.discard(v)
            rest = self.adj[v]
            while rest:
                low = rest & -rest
                w = low.bit_length() - 1
                rest ^= low
                if w in remaining:
                    degree[w] -= 1
        return order

    # -- invariants ------------------------------------------------------

    def charney_davis(self, degree):
        """Alternating curvature sum over simplex counts through `degree`.

        Exact rational; for a graph and degree 2 this is
        1 - l_0/2 + l_1/4.
        """
        if degree < 0:
            raise ValueError("degree must be >= 0")
        f = self.f_vector()
        total = Fraction(1)
        for k in range(0, degree + 1):
            lk = f[k] if k < len(f) else 0
            total += Fraction(-1, 2) ** (k + 1) * lk
        return total

    def chromatic_number(self):
        """Exact chromatic number of the 1-skeleton, with witness coloring.

        DSATUR branch and bound seeded with the greedy DSATUR bound; ties
        broken by lowest vertex index so the witness is deterministic.
        """
        n = self.n
        if n == 0:
            return 0, []
        if self.edge_count() == 0:
            return 1, [0] * n
        greedy = self._dsatur_greedy()
        best = [max(greedy) + 1, list(greedy)]
        clique = self._greedy_clique()
        lower = len(clique)

        colors = [-1] * n
        # pre-color a maximum greedy clique: forced distinct colors
        for c, v in enumerate(clique):
            colors[v] = c

        def choose():
            pick, key = -1, (-1, -1, 1)
            for v in range(n):
                if colors[v] >= 0:
                    continue
                sat = len({colors[w] for w in self._neighbors(v) if colors[w] >= 0})
                deg = self.adj[v].bit_count()
                cand = (sat, deg, -v)
                if cand > key:
                    key, pick = cand, v
            return pick

        def solve(used):
            if used >= best[0]:
                return
            v = choose()
            if v < 0:
                best[0] = used
                best[1] = list(colors)
                return
            banned = {colors[w] for w in self._neighbors(v) if colors[w] >= 0}
            for c in range(min(used + 1, best[0] - 1)):
                if c in banned:
                    continue
                colors[v] = c
                solve(max(used, c + 1))
                colors[v] = -1
                if best[0] == lower:
                    return

        solve(len(clique))
        chi = best[0]
        witness = best[1]
        return chi, witness

    def _neighbors(self, v):
        rest = self.adj[v]
        while rest:
            low = rest & -rest
            yield low.bit_length() - 1
            rest ^= low

    def _greedy_clique(self):
        order = sorted(range(self.n), key=lambda v: (-self.adj[v].bit_count(), v))
        clique = []
        mask = (1 << self.n) - 1
        for v in order:
            if (mask >> v) & 1:
                clique.append(v)
                mask &= self.adj[v]
        return clique

    def _dsatur_greedy(self):
        n = self.n
        colors = [-1] * n
        for _ in range(n):
            pick, key = -1, (-1, -1, 1)
            for v in range(n):
                if colors[v] >= 0:
                    continue
                sat = len({colors[w] for w in self._neighbors(v) if colors[w] >= 0})
                cand = (sat, self.adj[v].bit_count(), -v)
                if cand > key:
                    key, pick = cand, v
            banned = {colors[w] for w in self._neighbors(pick) if colors[w] >= 0}
            c = 0
            while c in banned:
                c += 1
            colors[pick] = c
        return colors

    def girth_and_square_free(self):
        """(girth of the 1-skeleton, no-induced-4-cycle flag)."""
        return self._girth(), not self._has_induced_square()

    def _girth(self):
        best = math.inf
        for root in range(self.n):
            dist = {root: 0}
            parent = {root: -1}
            queue = [root]
            qi = 0
            while qi < len(queue):
                u = queue[qi]
                qi += 1
                if dist[u] * 2 >= best:
                    break
                for w in self._neighbors(u):
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        queue.append(w)
                    elif w != parent[u]:
                        best = min(best, dist[u] + dist[w] + 1)
        return best

    def _has_induced_square(self):
        for u in range(self.n):
            for w in range(u + 1, self.n):
                if (self.adj[u] >> w) & 1:
                    continue
                common = self.adj[u] & self.adj[w]
                if common.bit_count() < 2:
                    continue
                # a non-adjacent pair inside the common neighborhood closes
                # an induced square
                rest = common
                while rest:
                    low = rest & -rest
                    x = low.bit_length() - 1
                    rest ^= low
                    if rest & ~self.adj[x]:
                        return True
        return False

    def link_star(self, simplex):
        """(link, star) of a simplex, both as induced subcomplexes.

        Valid because the complex is flag: the star is induced on the link
        vertices together with the simplex itself.
        """
        vs = tuple(sorted(simplex))
        if not vs or not self.is_simplex(vs):
            raise NotASimplex(f"{simplex} is not a simplex of this complex")
        common = (1 << self.n) - 1
        for v in vs:
            common &= self.adj[v]
        link = self.induced(VertexSet(self.n, common))
        star_bits = common
        for v in vs:
            star_bits |= 1 << v
        star = self.induced(VertexSet(self.n, star_bits))
        return link, star

    def is_chamber_complex(self, d):
        """Whether all maximal simplices have dimension d and are gallery connected."""
        maximal = self.maximal_simplices()
        if not maximal:
            return False
        if any(len(m) != d + 1 for m in maximal):
            return False
        if len(maximal) == 1:
            return True
        sets = [frozenset(m) for m in maximal]
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(len(maximal)):
                if j not in seen and len(sets[i] & sets[j]) == d:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(maximal)

    # -- connectivity helper (bitmask flood fill) ------------------------

    def connected_within(self, bits):
        """Whether the induced subgraph on the nonzero mask is connected."""
        if bits == 0:
            return False
        start = bits & -bits
        reach = start
        frontier = start
        while frontier:
            low = frontier & -frontier
            v = low.bit_length() - 1
            frontier ^= low
            new = self.adj[v] & bits & ~reach
            reach |= new
            frontier |= new
        return reach == bits
