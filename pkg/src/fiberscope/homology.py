"""Exact reduced integral simplicial homology via Smith normal form.

Everything here is integer-exact: boundary matrices are built over the
integers, and the Smith normal form routine works in machine words with an
overflow guard, escalating the whole computation to python's arbitrary
precision integers the moment entries threaten to overflow.  No floating
point is used anywhere in this module.

The chain complex is augmented (the empty simplex sits in degree -1), so
all homology computed here is reduced: a nonempty connected complex has
trivial homology in degree 0, and "degree -1 information" is just the
nonemptiness flag carried on the profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeOutOfRange

# entries beyond this trigger escalation to python ints; conservative so
# that the row/column updates below cannot wrap in int64
_OVERFLOW_LIMIT = 1 << 30


@dataclass(frozen=True)
class HomologyProfile:
    """Reduced integral homology: per-degree free rank plus torsion divisors."""

    nonempty: bool
    free_ranks: tuple
    torsion: tuple

    def free_rank(self, k):
        if 0 <= k < len(self.free_ranks):
            return self.free_ranks[k]
        return 0

    def torsion_in(self, k):
        if 0 <= k < len(self.torsion):
            return self.torsion[k]
        return ()

    def is_trivial(self, k):
        """Whether the reduced homology in degree k vanishes."""
        return self.free_rank(k) == 0 and not self.torsion_in(k)

    def trivial_through(self, k):
        return all(self.is_trivial(i) for i in range(0, k + 1))

    def to_dict(self):
        return {
            "nonempty": self.nonempty,
            "free": list(self.free_ranks),
            "torsion": [list(t) for t in self.torsion],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            nonempty=bool(d["nonempty"]),
            free_ranks=tuple(int(x) for x in d["free"]),
            torsion=tuple(tuple(int(x) for x in t) for t in d["torsion"]),
        )


def boundary_matrix(complex_, k):
    """Boundary map from k-chains to (k-1)-chains as an integer matrix.

    Simplices are oriented by ascending vertex index and listed in
    lexicographic order; signs alternate with the position of the omitted
    vertex.  Degree 0 is the augmentation: every vertex maps to the single
    empty simplex.
    """
    dim = complex_.dimension
    if k < 0 or k > dim + 1:
        raise DegreeOutOfRange(f"degree {k} outside [0, {dim + 1}]")
    levels = complex_.simplices_by_dim()
    cols = levels[k] if k <= dim else ()
    if k == 0:
        return np.ones((1, len(cols)), dtype=np.int64)
    rows = levels[k - 1]
    index = {s: i for i, s in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, simplex in enumerate(cols):
        for pos in range(len(simplex)):
            face = simplex[:pos] + simplex[pos + 1:]
            mat[index[face], j] = -1 if pos % 2 else 1
    return mat


class _Escalate(Exception):
    pass


def smith_normal_form(matrix):
    """Invariant factors of an integer matrix: (rank, (d_1, ..., d_rank)).

    The divisors form a chain d_1 | d_2 | ... | d_rank, each positive.
    Pivoting always picks the entry of smallest nonzero absolute value
    (ties: lowest row, then lowest column), which keeps intermediate
    growth small and the result deterministic.
    """
    a = np.array(matrix, dtype=np.int64, copy=True)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    try:
        return _snf_core(a, guard=True)
    except _Escalate:
        a = np.array(matrix, dtype=object, copy=True)
        return _snf_core(a, guard=False)


def _snf_core(a, guard):
    rows, cols = a.shape
    divisors = []
    t = 0
    while t < min(rows, cols):
        if guard and np.abs(a).max() > _OVERFLOW_LIMIT:
            raise _Escalate
        sub = a[t:, t:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            break
        vals = np.abs(sub[nz])
        best = int(np.argmin(vals))
        # argmin ties resolve to the first flat index, which with nonzero()
        # ordering is lowest row then lowest column
        pi, pj = int(nz[0][best]) + t, int(nz[1][best]) + t
        if pi != t:
            a[[t, pi], :] = a[[pi, t], :]
        if pj != t:
            a[:, [t, pj]] = a[:, [pj, t]]
        while True:
            if guard and np.abs(a).max() > _OVERFLOW_LIMIT:
                raise _Escalate
            if a[t, t] < 0:
                a[t, :] = -a[t, :]
            pivot = a[t, t]
            col = a[t + 1:, t]
            row = a[t, t + 1:]
            if np.any(col % pivot):
                # euclid step: shrink some entry below the pivot, re-pivot
                q = col // pivot
                a[t + 1:, :] -= np.outer(q, a[t, :])
                i = int(np.nonzero(a[t + 1:, t])[0][0]) + t + 1
                a[[t, i], :] = a[[i, t], :]
                continue
            q = col // pivot
            if np.any(q):
                a[t + 1:, :] -= np.outer(q, a[t, :])
            if np.any(row % pivot):
                q = row // pivot
                a[:, t + 1:] -= np.outer(a[:, t], q)
                j = int(np.nonzero(a[t, t + 1:])[0][0]) + t + 1
                a[:, [t, j]] = a[:, [j, t]]
                continue
            q = row // pivot
            if np.any(q):
                a[:, t + 1:] -= np.outer(a[:, t], q)
            if np.any(a[t + 1:, t]) or np.any(a[t, t + 1:]):
                continue
            rest = a[t + 1:, t + 1:]
            bad = np.nonzero(rest % pivot)
            if len(bad[0]):
                # fold an offending row in, then restart the corner
                a[t, :] += a[int(bad[0][0]) + t + 1, :]
                continue
            break
        divisors.append(int(a[t, t]))
        t += 1
    return len(divisors), tuple(divisors)


def reduced_homology(complex_):
    """HomologyProfile of a flag complex, degrees 0 through its dimension."""
    if not complex_.nonempty:
        return HomologyProfile(nonempty=False, free_ranks=(), torsion=())
    dim = complex_.dimension
    f = complex_.f_vector()
    ranks = []
    torsions = []
    for k in range(dim + 2):
        if k > dim:
            ranks.append(0)
            torsions.append(())
            continue
        rank, divs = smith_normal_form(boundary_matrix(complex_, k))
        ranks.append(rank)
        torsions.append(tuple(d for d in divs if d > 1))
    free = tuple(f[k] - ranks[k] - ranks[k + 1] for k in range(dim + 1))
    torsion = tuple(torsions[k + 1] for k in range(dim + 1))
    return HomologyProfile(nonempty=True, free_ranks=free, torsion=torsion)


def is_k_acyclic(complex_, k):
    """Nonempty with vanishing reduced homology through degree k.

    Degree -1 only asks for nonemptiness, matching the convention that
    (-1)-connected means nonempty.
    """
    if k < -1:
        raise DegreeOutOfRange("k must be >= -1")
    if not complex_.nonempty:
        return False
    if k == -1:
        return True
    if not is_connected(complex_):
        return False
    if k == 0:
        # the fast path above decides degree 0; avoid any matrix work
        return True
    return reduced_homology(complex_).trivial_through(k)


def is_connected(complex_):
    """Nonempty with connected 1-skeleton (pure bitmask flood fill)."""
    if not complex_.nonempty:
        return False
    return complex_.connected_within((1 << complex_.n) - 1)


def top_homology_nontrivial(complex_, d):
    """Whether reduced homology in degree d is nonzero."""
    if not complex_.nonempty or d > complex_.dimension or d < 0:
        return False
    return not reduced_homology(complex_).is_trivial(d)


def profile_from_snf(chain_sizes, boundary_matrices, nonempty=True):
    """Assemble a HomologyProfile from explicit boundary maps.

    `chain_sizes[k]` counts k-cells for k = 0..d; `boundary_matrices[k]`
    is the map from k-chains to (k-1)-chains (degree 0 being the
    augmentation).  Used by the cubical side, which shares this engine.
    """
    if not nonempty:
        return HomologyProfile(nonempty=False, free_ranks=(), torsion=())
    d = len(chain_sizes) - 1
    ranks = []
    torsions = []
    for k in range(d + 2):
        if k > d:
            ranks.append(0)
            torsions.append(())
            continue
        rank, divs = smith_normal_form(boundary_matrices[k])
        ranks.append(rank)
        torsions.append(tuple(x for x in divs if x > 1))
    free = tuple(chain_sizes[k] - ranks[k] - ranks[k + 1] for k in range(d + 1))
    torsion = tuple(torsions[k + 1] for k in range(d + 1))
    return HomologyProfile(nonempty=True, free_ranks=free, torsion=torsion)
