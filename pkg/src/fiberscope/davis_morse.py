"""Finite balls of the Davis complex of a right-angled Coxeter group.

The group W_L has one involutive generator per vertex of L, with two
generators commuting exactly when their vertices span an edge.  Its Davis
complex is the cube complex with vertex set W_L where each element g and
each simplex sigma of L span a cube on the 2^|sigma| vertices g times the
products of subsets of sigma.  We build balls of small radius with
canonical forms computed by exhaustive rewriting (delete equal adjacent
letters, swap commuting adjacent letters; the canonical form is the
lexicographically least word of minimal length), assign the game's height
function, and check the Morse-theoretic predictions cell by cell:
ascending links realize coset states, heights are additive on the
even-parity subgroup, and superlevel sets have computable homology.

Everything here runs at toy scale by design; the caps keep the
exponential rewriting tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .coset_game import MoveSystem
from .errors import BoundaryElement, CapExceeded, InconsistentHeight
from .flag_complex import VertexSet
from .homology import HomologyProfile, profile_from_snf

RADIUS_CAP = 8
VERTEX_CAP = 16


def canonical_form(word, adj):
    """Lexicographically least minimal-length word for the group element.

    Exhausts the commuting-swap orbit of the word; any deletable pair of
    equal adjacent letters restarts the search on the shorter word.
    """
    w = tuple(word)
    while True:
        orbit = {w}
        stack = [w]
        shorter = None
        while stack and shorter is None:
            u = stack.pop()
            for i in range(len(u) - 1):
                a, b = u[i], u[i + 1]
                if a == b:
                    shorter = u[:i] + u[i + 2:]
                    break
                if (adj[a] >> b) & 1:
                    v = u[:i] + (b, a) + u[i + 2:]
                    if v not in orbit:
                        orbit.add(v)
                        stack.append(v)
        if shorter is None:
            return min(orbit)
        w = shorter


@dataclass
class CayleyBall:
    """Ball of W_L in the word metric, with the cube structure it carries."""

    complex: FlagComplex
    radius: int
    words: tuple  # canonical forms, sorted by (length, word)
    index: dict  # canonical form -> element id
    length: tuple
    neighbor: tuple  # neighbor[g][v] = element id of g*v, or -1 outside the ball

    @property
    def size(self):
        return len(self.words)

    def parity(self, gid):
        """Per-generator letter parity of the element, as a bitmask."""
        bits = 0
        for letter in self.words[gid]:
            bits ^= 1 << letter
        return bits

    def interior(self, gid):
        return self.length[gid] <= self.radius - 1

    def multiply(self, gid, hid):
        """Element id of the product, or None if it leaves the ball."""
        w = canonical_form(self.words[gid] + self.words[hid], self.complex.adj)
        return self.index.get(w)

    def edges(self):
        """Each ball edge once, as (shorter element, generator, longer element)."""
        out = []
        for g in range(self.size):
            for v in range(self.complex.n):
                h = self.neighbor[g][v]
                if h >= 0 and self.length[h] == self.length[g] + 1:
                    out.append((g, v, h))
        return out

    def dump_text(self):
        lines = []
        for g, w in enumerate(self.words):
            word = "".join(str(x) + "." for x in w) if w else "e"
            nbrs = " ".join(
                f"{v}:{self.neighbor[g][v]}"
                for v in range(self.complex.n)
                if self.neighbor[g][v] >= 0
            )
            lines.append(f"{g} {word} len={self.length[g]} {nbrs}")
        return "\n".join(lines) + "\n"


def racg_ball(complex_, radius, radius_cap=RADIUS_CAP, vertex_cap=VERTEX_CAP):
    """Ball of radius `radius` around the identity, by BFS with rewriting.

    Closure is validated on the way: multiplying any element of the
    (radius-1)-ball by a generator lands on a canonical form inside the
    ball, so canonical forms are unique per group element.
    """
    if radius > radius_cap:
        raise CapExceeded(f"radius {radius} exceeds cap {radius_cap}")
    if complex_.n > vertex_cap:
        raise CapExceeded(f"{complex_.n} generators exceed cap {vertex_cap}")
    adj = complex_.adj
    current = [()]
    seen = {(): 0}
    words = [()]
    for _ in range(radius):
        frontier = set()
        for w in current:
            for v in range(complex_.n):
                c = canonical_form(w + (v,), adj)
                if c not in seen and len(c) == len(w) + 1:
                    frontier.add(c)
        for c in sorted(frontier):
            seen[c] = len(words)
            words.append(c)
        current = sorted(frontier)
    index = {w: i for i, w in enumerate(words)}
    neighbor = []
    for w in words:
        row = []
        for v in range(complex_.n):
            c = canonical_form(w + (v,), adj)
            row.append(index.get(c, -1))
        neighbor.append(tuple(row))
    return CayleyBall(
        complex=complex_,
        radius=radius,
        words=tuple(words),
        index=index,
        length=tuple(len(w) for w in words),
        neighbor=tuple(neighbor),
    )


@dataclass
class HeightAssignment:
    heights: tuple  # per element
    states: tuple  # per element: bitmask of the recalibrated state
    sigma0: VertexSet
    system: MoveSystem


def assign_heights(ball: CayleyBall, sigma0: VertexSet, system: MoveSystem):
    """Heights for every element of the ball, checked on every edge.

    Walking the canonical word of g from the identity, the state starts at
    sigma0 and accumulates the move of each letter; each step climbs when
    the letter lies in the current state and falls otherwise.  Every edge
    of the ball is then revalidated against the same rule; a violation
    means the move system breaks the commutation requirement and raises
    InconsistentHeight.
    """
    heights = []
    states = []
    for w in ball.words:
        h = 0
        state = sigma0.bits
        for letter in w:
            h += 1 if (state >> letter) & 1 else -1
            state ^= system.moves[letter]
        heights.append(h)
        states.append(state)
    for g, v, longer in ball.edges():
        expected = 1 if (states[g] >> v) & 1 else -1
        if heights[longer] - heights[g] != expected:
            raise InconsistentHeight(
                f"edge {g} -{v}-> {longer}: height step "
                f"{heights[longer] - heights[g]} but state demands {expected}"
            )
    return HeightAssignment(
        heights=tuple(heights),
        states=tuple(states),
        sigma0=sigma0,
        system=system,
    )


def asc_desc_link(ball: CayleyBall, ha: HeightAssignment, gid):
    """Ascending and descending links of an interior element.

    Both are induced subcomplexes of L; the ascending one must equal the
    subcomplex induced by the element's recalibrated state.
    """
    if not ball.interior(gid):
        raise BoundaryElement(f"element {gid} has neighbors outside the ball")
    n = ball.complex.n
    up = 0
    for v in range(n):
        h = ball.neighbor[gid][v]
        if ha.heights[h] > ha.heights[gid]:
            up |= 1 << v
    predicted = ha.states[gid]
    assert up == predicted, "ascending link disagrees with the predicted state"
    ascending = ball.complex.induced(VertexSet(n, up))
    descending = ball.complex.induced(VertexSet(n, up ^ ((1 << n) - 1)))
    return ascending, descending, VertexSet(n, predicted)


def commutator_additivity(ball: CayleyBall, ha: HeightAssignment):
    """h(gx) = h(g) + h(x) for every even-parity g and every x with gx in the ball."""
    for g in range(ball.size):
        if ball.parity(g) != 0:
            continue
        for x in range(ball.size):
            gx = ball.multiply(g, x)
            if gx is None:
                continue
            if ha.heights[gx] != ha.heights[g] + ha.heights[x]:
                return False
    return True


# -- cubical superlevel homology ---------------------------------------------


@dataclass
class SuperlevelResult:
    profile: HomologyProfile
    level: int
    ball_truncated: bool = True  # boundary effects: illustrative only
    cell_counts: tuple = ()


def _enumerate_cubes(ball, keep):
    """Cubes with all vertices in `keep`, keyed by vertex set.

    Returns per dimension a sorted list of (base, axes, coords) where base
    is the least vertex id of the cube and coords maps each vertex id to
    its subset of axes relative to the base.
    """
    cliques = [[()]] + [list(level) for level in ball.complex.simplices_by_dim()]
    cubes = {}
    for g in range(ball.size):
        if g not in keep:
            continue
        for level in cliques:
            for sigma in level:
                ids = {(): g}
                ok = True
                for size in range(1, len(sigma) + 1):
                    for tau in combinations(sigma, size):
                        prev = tau[:-1]
                        src = ids.get(prev)
                        if src is None:
                            ok = False
                            break
                        nxt = ball.neighbor[src][tau[-1]]
                        if nxt < 0 or nxt not in keep:
                            ok = False
                            break
                        ids[tau] = nxt
                    if not ok:
                        break
                if not ok:
                    continue
                vset = frozenset(ids.values())
                if vset in cubes:
                    continue
                base = min(vset)
                # re-express every vertex relative to the least corner
                rel = {}
                base_tau = next(t for t, i in ids.items() if i == base)
                for tau, vid in ids.items():
                    rel[vid] = frozenset(set(tau) ^ set(base_tau))
                cubes[vset] = (base, tuple(sigma), rel)
    by_dim = {}
    for vset, (base, sigma, rel) in cubes.items():
        by_dim.setdefault(len(sigma), []).append((base, sigma, rel, vset))
    out = []
    for d in range(0, max(by_dim, default=-1) + 1):
        cells = by_dim.get(d, [])
        cells.sort(key=lambda c: (c[0], c[1]))
        out.append(cells)
    return out


def cubical_chain_complex(ball, keep):
    """(cell counts, boundary matrices) of the cubes with vertices in `keep`.

    Matrix k maps k-cubes to (k-1)-cubes, matrix 0 being the augmentation;
    signs alternate over the sorted axes, with an orientation flip for
    each axis separating a face's least corner from the parent's corner.
    """
    cells = _enumerate_cubes(ball, keep)
    sizes = [len(level_cells) for level_cells in cells]
    index = [
        {cell[3]: i for i, cell in enumerate(level_cells)} for level_cells in cells
    ]
    matrices = [np.ones((1, sizes[0]), dtype=np.int64)]
    for d in range(1, len(cells)):
        mat = np.zeros((sizes[d - 1], sizes[d]), dtype=np.int64)
        for j, (base, axes, rel, _vset) in enumerate(cells[d]):
            for pos, axis in enumerate(sorted(axes)):
                face0 = frozenset(v for v, t in rel.items() if axis not in t)
                face1 = frozenset(v for v, t in rel.items() if axis in t)
                for face_set, side in ((face0, 0), (face1, 1)):
                    i = index[d - 1][face_set]
                    face_base = min(face_set)
                    flips = len(rel[face_base] - {axis})
                    sign = (-1) ** pos * (1 if side else -1) * (-1) ** flips
                    mat[i, j] += sign
        matrices.append(mat)
    return sizes, matrices


def superlevel_homology(ball: CayleyBall, ha: HeightAssignment, level):
    """Reduced homology of the cubical subcomplex at height >= level.

    Cells are kept only when every vertex clears the level and lies in the
    ball, so the answer carries ball-truncation artifacts near the
    boundary; it is illustrative, not a global statement.
    """
    keep = {g for g in range(ball.size) if ha.heights[g] >= level}
    if not keep:
        return SuperlevelResult(
            profile=HomologyProfile(nonempty=False, free_ranks=(), torsion=()),
            level=level,
            cell_counts=(),
        )
    sizes, matrices = cubical_chain_complex(ball, keep)
    profile = profile_from_snf(sizes, matrices)
    return SuperlevelResult(profile=profile, level=level, cell_counts=tuple(sizes))
