"""Magic cubes from chamber projections, zero blocks, positive diagonals.

A magic cube of dimension n and side t is a nonnegative integer weight on
the grid {0..t-1}^n whose every axis slice sums to the same constant N.
Projecting the chambers of a uniformly thick building onto n distinct
panels induces such a cube with N = |Ch| / t, and the combinatorics of its
zero entries control how freely chambers with prescribed projections can
be chosen.  The searches here construct witnesses (positive diagonals,
projection-independent chamber sets, opposite spreads) and verify them
against the cube or the building directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil

import numpy as np

from .errors import DuplicatePanel, NotFound, NotMagic, TooLarge, ZeroWeightCube
from . import building as bldg

DENSE_LIMIT = 10**7


@dataclass
class MagicCube:
    """Weight function on {0..t-1}^n; dense ndarray below DENSE_LIMIT cells."""

    n: int
    t: int
    weights: object  # ndarray of shape (t,)*n, or dict cell->weight
    axis_labels: tuple | None = None  # per axis, ordered chambers of the panel star
    cell_chamber: dict = field(default_factory=dict)  # representative chamber per cell

    @property
    def dense(self):
        return isinstance(self.weights, np.ndarray)

    def weight(self, cell):
        cell = tuple(int(x) for x in cell)
        if self.dense:
            return int(self.weights[cell])
        return int(self.weights.get(cell, 0))

    def total(self):
        if self.dense:
            return int(self.weights.sum())
        return sum(self.weights.values())

    def axis_slice_sum(self, axis, index):
        if self.dense:
            return int(self.weights.take(index, axis=axis).sum())
        return sum(w for cell, w in self.weights.items() if cell[axis] == index)

    def nonzero_cells(self):
        if self.dense:
            return [tuple(int(x) for x in idx) for idx in np.argwhere(self.weights)]
        return sorted(c for c, w in self.weights.items() if w)

    def to_csv(self):
        lines = [f"# n={self.n} t={self.t} N={verify_magic(self)}"]
        header = ",".join(f"i_{a + 1}" for a in range(self.n)) + ",weight"
        lines.append(header)
        for cell in self.nonzero_cells():
            lines.append(",".join(str(x) for x in cell) + f",{self.weight(cell)}")
        return "\n".join(lines) + "\n"


def constant_cube(n, t, value):
    if t**n > DENSE_LIMIT:
        raise TooLarge("constant cube too large for dense storage")
    return MagicCube(n=n, t=t, weights=np.full((t,) * n, value, dtype=np.int64))


def cube_from_panels(building, panels):
    """Cube counting chambers by their projections onto the given panels."""
    panels = [int(p) for p in panels]
    if len(set(panels)) != len(panels):
        raise DuplicatePanel(f"panels {panels} are not distinct")
    n = len(panels)
    t = building.thickness
    labels = []
    position = []
    for pid in panels:
        star = building.panel_chambers[pid]
        if len(star) != t:
            raise ValueError("building is not uniformly thick")
        labels.append(tuple(star))
        position.append({c: i for i, c in enumerate(star)})
    dense = t**n <= DENSE_LIMIT
    weights = np.zeros((t,) * n, dtype=np.int64) if dense else {}
    cell_chamber = {}
    panel_simplices = [building.panels[pid] for pid in panels]
    for cid in range(len(building.chambers)):
        cell = tuple(
            position[i][bldg.projection(building, panel_simplices[i], cid)]
            for i in range(n)
        )
        if dense:
            weights[cell] += 1
        else:
            weights[cell] = weights.get(cell, 0) + 1
        cell_chamber.setdefault(cell, cid)
    return MagicCube(n=n, t=t, weights=weights, axis_labels=tuple(labels),
                     cell_chamber=cell_chamber)


def verify_magic(cube):
    """Return the weight N after checking every axis slice sums to it."""
    expected = cube.axis_slice_sum(0, 0)
    for axis in range(cube.n):
        for index in range(cube.t):
            observed = cube.axis_slice_sum(axis, index)
            if observed != expected:
                raise NotMagic(axis, index, observed, expected)
    return expected


@dataclass
class ZeroBlockResult:
    k_max: int
    exact: bool
    witness: tuple | None  # per-axis index tuples of a zero block, if k_max > 0
    bound_satisfied: bool


def max_zero_block(cube):
    """Largest k with a k x ... x k all-zero block after axis relabelings.

    Equivalent to searching equal-size index subsets per axis with zero
    joint mass.  The search is exact for n <= 2 (subset scan) and for
    n >= 3 with side t <= 8; beyond that a greedy lower bound is returned
    and flagged exact=False.  For cubes with positive weight the result is
    checked against the bound k/t < n^2/(1+n^2).
    """
    n, t = cube.n, cube.t
    total = cube.total()
    if total == 0:
        raise ZeroWeightCube("cube has zero total weight")
    if cube.dense:
        zeros = cube.weights == 0
    else:
        zeros = np.ones((t,) * n, dtype=bool)
        for cell, w in cube.weights.items():
            if w:
                zeros[cell] = False

    if n == 1:
        k_max, witness, exact = 0, None, True
    elif n == 2 and t <= 16:
        k_max, witness = _zero_block_2d(zeros, t)
        exact = True
    elif t <= 8:
        k_max, witness = _zero_block_recursive(zeros, t, n)
        exact = True
    else:
        k_max, witness = _zero_block_greedy(zeros, t, n)
        exact = False

    bound_ok = k_max == 0 or Fraction(k_max, t) < Fraction(n * n, 1 + n * n)
    if not bound_ok and exact:
        raise AssertionError(
            f"zero block {k_max}/{t} violates the n^2/(1+n^2) bound; "
            "the cube cannot be magic with positive weight"
        )
    return ZeroBlockResult(k_max=k_max, exact=exact, witness=witness,
                           bound_satisfied=bound_ok)


def _zero_block_2d(zeros, t):
    # row-subset scan: common zero columns of a row set R support a block
    # of size min(|R|, #cols)
    col_mask = []
    for r in range(t):
        mask = 0
        for c in range(t):
            if zeros[r, c]:
                mask |= 1 << c
        col_mask.append(mask)
    best, witness = 0, None
    for rset in range(1, 1 << t):
        rows = [i for i in range(t) if (rset >> i) & 1]
        common = (1 << t) - 1
        for i in rows:
            common &= col_mask[i]
        k = min(len(rows), common.bit_count())
        if k > best:
            cols = [c for c in range(t) if (common >> c) & 1][:k]
            best, witness = k, (tuple(rows[:k]), tuple(cols))
    return best, witness


def _zero_block_recursive(zeros, t, n):
    best = 0
    witness = None

    def search(k):
        def helper(block, axes_left, chosen):
            if axes_left == 0:
                return chosen if bool(np.all(block)) else None
            for subset in combinations(range(t), k):
                sub = np.all(block[list(subset)], axis=0)
                got = helper(sub, axes_left - 1, chosen + (subset,))
                if got is not None:
                    return got
            return None

        return helper(zeros, n, ())

    for k in range(t, 0, -1):
        got = search(k)
        if got is not None:
            best, witness = k, got
            break
    return best, witness


def _zero_block_greedy(zeros, t, n):
    best, witness = 0, None
    for k in range(t, 0, -1):
        block = zeros
        chosen = []
        for axis in range(n):
            # keep the k indices of the leading axis with most zeros left
            flat = block.reshape(t, -1)
            scores = flat.sum(axis=1)
            order = sorted(range(t), key=lambda i: (-scores[i], i))[:k]
            order.sort()
            chosen.append(tuple(order))
            block = np.all(block[order], axis=0) if axis < n - 1 else block[order]
        if bool(np.all(block)):
            best, witness = k, tuple(chosen)
            break
    return best, witness


def guaranteed_diagonal_length(t, n):
    return ceil(t / (1 + n * n))


def positive_diagonal(cube):
    """Axis permutations whose shared diagonal carries positive weight.

    Greedy extension with a transposition repair step: whenever the next
    diagonal entry is zero, any positive cell in the untouched corner is
    swapped onto the diagonal; when no such cell exists the corner has
    zero mass, which forces the achieved length past t/(1+n^2).  Returns
    (permutations, m); every reported entry is re-verified by a direct
    weight lookup.
    """
    n, t = cube.n, cube.t
    if verify_magic(cube) == 0:
        raise ZeroWeightCube("cube has zero weight")
    perms = [list(range(t)) for _ in range(n)]
    k = 0
    while k < t:
        cell = tuple(perms[i][k] for i in range(n))
        if cube.weight(cell) > 0:
            k += 1
            continue
        found = _positive_cell_in_corner(cube, perms, k)
        if found is None:
            break
        for i in range(n):
            j = perms[i].index(found[i], k)
            perms[i][k], perms[i][j] = perms[i][j], perms[i][k]
        k += 1
    m = k
    bound = guaranteed_diagonal_length(t, n)
    if m < bound:
        # impossible for a verified magic cube of positive weight: an empty
        # corner forces k past t/(1+n^2)
        raise NotFound(f"diagonal of length {bound} not found", achieved=perms)
    for i in range(m):
        cell = tuple(perms[a][i] for a in range(n))
        if cube.weight(cell) <= 0:
            raise AssertionError("diagonal witness failed re-verification")
    return tuple(tuple(p) for p in perms), m


def _positive_cell_in_corner(cube, perms, k):
    n = cube.n
    remaining = [set(perms[i][k:]) for i in range(n)]
    for cell in cube.nonzero_cells():
        if all(cell[i] in remaining[i] for i in range(n)):
            return cell
    return None


def independent_chambers(building, panels, m):
    """Chambers whose projections to every listed panel are pairwise distinct.

    Guaranteed to succeed for m up to ceil(t/(1+n^2)); larger requests are
    attempted best-effort and raise NotFound with the achieved prefix.
    The output is re-verified by direct projection calls.
    """
    cube = cube_from_panels(building, panels)
    perms, achieved = positive_diagonal(cube)
    n = cube.n
    chambers = []
    for i in range(min(m, achieved)):
        cell = tuple(perms[a][i] for a in range(n))
        chambers.append(cube.cell_chamber[cell])
    if len(chambers) < m:
        raise NotFound(
            f"only {len(chambers)} of {m} independent chambers found",
            achieved=chambers,
        )
    panel_simplices = [building.panels[int(p)] for p in panels]
    for i in range(len(chambers)):
        for j in range(i + 1, len(chambers)):
            for pnl in panel_simplices:
                pi = bldg.projection(building, pnl, chambers[i])
                pj = bldg.projection(building, pnl, chambers[j])
                if pi == pj:
                    raise AssertionError("independent chambers share a projection")
    return chambers


def opposite_spread(building, targets, count):
    """Chambers opposite all of `targets` with pairwise hull overlaps only in them.

    Candidates are the common opposites of the target set, tried in order
    of descending total gallery distance to the targets (far chambers
    heuristically overlap least), accepting greedily and verifying the
    hull intersection condition exhaustively on return.  Raises NotFound
    carrying the longest prefix achieved.
    """
    target_ids = [building.chamber_id(c) for c in targets]
    common = None
    for e in target_ids:
        opp = set(bldg.opposite_chambers(building, e))
        common = opp if common is None else common & opp
    union_target_bits = 0
    target_chambers = set(target_ids)
    for e in target_ids:
        union_target_bits |= building.chamber_mask(e)

    def total_distance(d):
        return sum(int(building.distance[d, e]) for e in target_ids)

    candidates = sorted(common or (), key=lambda d: (-total_distance(d), d))
    chosen = []
    chosen_hulls = []  # (chamber set, vertex bits) of the hull union per pick
    for cand in candidates:
        hull_chambers = set()
        hull_bits = 0
        for e in target_ids:
            hc = bldg.convex_hull(building, e, cand)
            hull_chambers.update(hc)
            for x in hc:
                hull_bits |= building.chamber_mask(x)
        ok = True
        for other_chambers, other_bits in chosen_hulls:
            if (hull_chambers & other_chambers) != target_chambers:
                ok = False
                break
            if (hull_bits & other_bits) != union_target_bits:
                ok = False
                break
        if ok:
            chosen.append(cand)
            chosen_hulls.append((hull_chambers, hull_bits))
            if len(chosen) == count:
                break
    # exhaustive re-verification of the returned witness
    for i in range(len(chosen)):
        for j in range(i + 1, len(chosen)):
            ci, bi = chosen_hulls[i]
            cj, bj = chosen_hulls[j]
            if (ci & cj) != target_chambers or (bi & bj) != union_target_bits:
                raise AssertionError("opposite spread failed re-verification")
    if len(chosen) < count:
        raise NotFound(
            f"only {len(chosen)} of {count} spread chambers found",
            achieved=chosen,
        )
    return chosen


def spread_threshold(t, n, d, l, c_d):
    """Thickness threshold above which an l-element spread is guaranteed."""
    return t > (n * (d + 1) + l) * (n * n * c_d) * (1 + (d + 1) ** 2 * n * n)


# -- counting calculus ------------------------------------------------------


def avoidance_probability(m, n):
    """Exact chance that m disjoint n-sets all avoid full containment: ((2^n-1)/2^n)^m."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    return Fraction((2**n - 1) ** m, 2 ** (n * m))


def brute_p_mn(s_size, m, n):
    """Maximal number of subsets of an s_size-set avoiding m disjoint (<=n)-sets.

    Exhaustive: for every placement of the disjoint sets, every subset of S
    is tested for containment of each piece.  Placements are enumerated up
    to relabeling of S (only the size pattern matters by symmetry), taken
    as consecutive blocks.
    """
    if s_size > 24:
        raise TooLarge("brute force capped at 24 elements")
    if m < 1 or n < 1 or s_size < 0:
        raise ValueError("need m, n >= 1 and s_size >= 0")
    subsets = np.arange(1 << s_size, dtype=np.int64)
    best = 0

    def patterns(remaining_slots, max_size, budget):
        if remaining_slots == 0:
            yield ()
            return
        for size in range(min(max_size, budget), -1, -1):
            for rest in patterns(remaining_slots - 1, size, budget - size):
                yield (size,) + rest

    for sizes in patterns(m, n, s_size):
        masks = []
        offset = 0
        for size in sizes:
            masks.append(((1 << size) - 1) << offset)
            offset += size
        keep = np.ones(1 << s_size, dtype=bool)
        for mask in masks:
            if mask == 0:
                keep[:] = False
                break
            keep &= (subsets & mask) != mask
        best = max(best, int(keep.sum()))
    return best
