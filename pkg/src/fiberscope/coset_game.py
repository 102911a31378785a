"""Move systems, legal states, coset searches and fibering certificates.

States are subsets of the vertex set of a flag complex, identified with
elements of A = (Z/2)^n under symmetric difference.  A move system picks
for each vertex v a move containing v and avoiding all neighbors of v; the
moves span a subgroup of A, and the object of the game is a coset all of
whose states are legal.  A state is legal at degree m-1 when it and its
complement induce subcomplexes that are (m-1)-acyclic, with degree -1
meaning nonempty.  A winning coset is packaged as a certificate carrying
the homology evidence for every member, replayable from scratch.

Degenerate states follow one fixed convention: the empty complex fails
every connectivity degree including -1, and one-point complexes are
connected.  All counts of "bad" subcomplexes in this module use it.

Scans are embarrassingly parallel over index ranges; counts merge by sum
and searches by lowest index, so outputs are reproducible for any worker
count.  Randomized scans draw from the SplitMix64 streams in `rng`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _fastscan
from .errors import (
    BudgetExceeded,
    ImproperColoring,
    UnsupportedDegree,
    WidthMismatch,
)
from .flag_complex import FlagComplex, VertexSet
from .homology import is_k_acyclic, reduced_homology
from .rng import SplitMix64, worker_seeds

CERT_SCHEMA = "fiberscope-cert/1"
EXHAUSTIVE_VERTEX_CAP = 28
HOMOLOGY_SCAN_CAP = 20


# -- move systems ------------------------------------------------------------


@dataclass(frozen=True)
class MoveSystem:
    """Per-vertex moves plus a row-reduced basis of their span over F_2."""

    width: int
    moves: tuple  # bitmask per vertex
    basis: tuple  # RREF bitmasks, pivots strictly ascending

    @property
    def rank(self):
        return len(self.basis)

    def pivots(self):
        return tuple((b & -b).bit_length() - 1 for b in self.basis)

    def free_positions(self):
        pivots = set(self.pivots())
        return tuple(i for i in range(self.width) if i not in pivots)

    def reduce(self, bits):
        """Canonical coset representative: zero on every pivot coordinate."""
        for b in self.basis:
            if (bits >> ((b & -b).bit_length() - 1)) & 1:
                bits ^= b
        return bits

    @classmethod
    def from_moves(cls, complex_, moves, validate=True):
        if len(moves) != complex_.n:
            raise WidthMismatch("one move per vertex required")
        masks = []
        for v, mv in enumerate(moves):
            bits = mv.bits if isinstance(mv, VertexSet) else int(mv)
            if validate:
                if not (bits >> v) & 1:
                    raise ValueError(f"move of vertex {v} does not contain it")
                if bits & complex_.adj[v]:
                    raise ValueError(f"move of vertex {v} meets its neighbors")
            masks.append(bits)
        return cls(width=complex_.n, moves=tuple(masks), basis=_f2_rref(masks))


def _f2_rref(masks):
    basis = []
    for m in masks:
        for b in basis:
            low = b & -b
            if m & low:
                m ^= b
        if m:
            basis.append(m)
            basis.sort(key=lambda x: x & -x)
    # back-substitute so each pivot appears in exactly one basis vector
    for i, b in enumerate(basis):
        low = b & -b
        for j in range(len(basis)):
            if j != i and basis[j] & low:
                basis[j] ^= b
    basis.sort(key=lambda x: x & -x)
    return tuple(basis)


def move_system_from_coloring(complex_, coloring):
    """Colored move system: the move of v is the color class of v."""
    if len(coloring) != complex_.n:
        raise ImproperColoring("coloring must assign every vertex")
    classes = {}
    for v, c in enumerate(coloring):
        classes.setdefault(c, 0)
        classes[c] |= 1 << v
    for v in range(complex_.n):
        if classes[coloring[v]] & complex_.adj[v]:
            raise ImproperColoring("adjacent vertices share a color")
    moves = [classes[coloring[v]] for v in range(complex_.n)]
    return MoveSystem.from_moves(complex_, moves)


def coset_members(system: MoveSystem, rep: VertexSet):
    """All 2^rank states of rep + span, ordered by basis-subset index."""
    if rep.width != system.width:
        raise WidthMismatch("representative width does not match the system")
    out = []
    for idx in range(1 << system.rank):
        bits = rep.bits
        for b in range(system.rank):
            if (idx >> b) & 1:
                bits ^= system.basis[b]
        out.append(VertexSet(system.width, bits))
    return out


# -- legality ----------------------------------------------------------------


def is_legal_state(complex_, state: VertexSet, m, mode="homological"):
    """Whether the state and its complement both pass degree m-1.

    Connectivity mode handles only m-1 in {-1, 0} (nonempty / connected);
    homological mode asks for (m-1)-acyclicity on both sides and agrees
    with connectivity mode where both apply.
    """
    if state.width != complex_.n:
        raise WidthMismatch("state width does not match the complex")
    k = m - 1
    full = (1 << complex_.n) - 1
    a = state.bits
    b = a ^ full
    if mode == "connectivity":
        if k < -1 or k > 0:
            raise UnsupportedDegree("connectivity mode supports m in {0, 1}")
        if k == -1:
            return a != 0 and b != 0
        return complex_.connected_within(a) and complex_.connected_within(b)
    if mode != "homological":
        raise ValueError(f"unknown mode {mode!r}")
    if k == -1:
        return a != 0 and b != 0
    if not (complex_.connected_within(a) and complex_.connected_within(b)):
        return False
    if k == 0:
        return True
    for bits in (a, b):
        side = complex_.induced(VertexSet(complex_.n, bits))
        if not is_k_acyclic(side, k):
            return False
    return True


def is_sharply_legal_state(complex_, state: VertexSet, k):
    """k-legal (homological), nontrivial degree k+1, trivial degree k+2, both sides."""
    if state.width != complex_.n:
        raise WidthMismatch("state width does not match the complex")
    full = (1 << complex_.n) - 1
    for bits in (state.bits, state.bits ^ full):
        side = complex_.induced(VertexSet(complex_.n, bits))
        if not is_k_acyclic(side, k):
            return False
        profile = reduced_homology(side)
        if profile.is_trivial(k + 1):
            return False
        if not profile.is_trivial(k + 2):
            return False
    return True


# -- certificates ------------------------------------------------------------


@dataclass
class EvidenceEntry:
    state_hex: str
    side_a_profile: dict
    side_b_profile: dict


@dataclass
class FiberCertificate:
    """Witness of a legal coset with per-state homology evidence."""

    complex_text: str
    complex_hash: str
    moves_hex: tuple
    rep_bits_hex: str
    m: int
    mode: str
    sharply: bool
    evidence: tuple
    generated_at: str | None = None

    def to_json(self):
        payload = {
            "schema": CERT_SCHEMA,
            "complex_hash": self.complex_hash,
            "complex_text": self.complex_text,
            "moves": list(self.moves_hex),
            "rep_bits_hex": self.rep_bits_hex,
            "m": self.m,
            "mode": self.mode,
            "sharply": self.sharply,
            "evidence": [
                {
                    "state_hex": e.state_hex,
                    "side_a_profile": e.side_a_profile,
                    "side_b_profile": e.side_b_profile,
                }
                for e in self.evidence
            ],
        }
        if self.generated_at is not None:
            payload["generated_at"] = self.generated_at
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get("schema") != CERT_SCHEMA:
            raise ValueError(f"unsupported certificate schema {d.get('schema')!r}")
        return cls(
            complex_text=d["complex_text"],
            complex_hash=d["complex_hash"],
            moves_hex=tuple(d["moves"]),
            rep_bits_hex=d["rep_bits_hex"],
            m=int(d["m"]),
            mode=d["mode"],
            sharply=bool(d["sharply"]),
            evidence=tuple(
                EvidenceEntry(
                    state_hex=e["state_hex"],
                    side_a_profile=e["side_a_profile"],
                    side_b_profile=e["side_b_profile"],
                )
                for e in d["evidence"]
            ),
            generated_at=d.get("generated_at"),
        )


def complex_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _profile_dict(complex_, bits):
    side = complex_.induced(VertexSet(complex_.n, bits))
    return reduced_homology(side).to_dict()


def build_certificate(complex_, system, rep, m, mode, sharply=False):
    """Assemble the evidence for a found coset, re-checking legality."""
    members = coset_members(system, rep)
    full = (1 << complex_.n) - 1
    evidence = []
    for member in members:
        if sharply:
            ok = is_sharply_legal_state(complex_, member, m - 1)
        else:
            ok = is_legal_state(complex_, member, m, mode)
        if not ok:
            raise AssertionError("coset member failed legality during packaging")
        evidence.append(
            EvidenceEntry(
                state_hex=member.to_hex(),
                side_a_profile=_profile_dict(complex_, member.bits),
                side_b_profile=_profile_dict(complex_, member.bits ^ full),
            )
        )
    text = complex_.to_text()
    return FiberCertificate(
        complex_text=text,
        complex_hash=complex_hash(text),
        moves_hex=tuple(VertexSet(complex_.n, mv).to_hex() for mv in system.moves),
        rep_bits_hex=rep.to_hex(),
        m=m,
        mode=mode,
        sharply=sharply,
        evidence=tuple(evidence),
    )


def verify_certificate(cert: FiberCertificate):
    """Replay a certificate from scratch; returns (ok, list of failures)."""
    failures = []
    if complex_hash(cert.complex_text) != cert.complex_hash:
        failures.append("complex hash mismatch")
        return False, failures
    try:
        cx = FlagComplex.from_text(cert.complex_text)
    except Exception as exc:  # noqa: BLE001 - report any parse failure
        return False, [f"complex parse error: {exc}"]
    try:
        moves = [int(h, 16) for h in cert.moves_hex]
        system = MoveSystem.from_moves(cx, moves)
    except Exception as exc:  # noqa: BLE001
        return False, [f"invalid move system: {exc}"]
    rep = VertexSet.from_hex(cx.n, cert.rep_bits_hex)
    members = coset_members(system, rep)
    if len(members) != len(cert.evidence):
        failures.append("evidence does not cover the coset")
        return False, failures
    full = (1 << cx.n) - 1
    for member, entry in zip(members, cert.evidence):
        if member.to_hex() != entry.state_hex:
            failures.append(f"state mismatch at {entry.state_hex}")
            continue
        prof_a = _profile_dict(cx, member.bits)
        prof_b = _profile_dict(cx, member.bits ^ full)
        if prof_a != entry.side_a_profile or prof_b != entry.side_b_profile:
            failures.append(f"homology mismatch at state {entry.state_hex}")
            continue
        if cert.sharply:
            ok = is_sharply_legal_state(cx, member, cert.m - 1)
        else:
            ok = is_legal_state(cx, member, cert.m, cert.mode)
        if not ok:
            failures.append(f"state {entry.state_hex} is not legal as claimed")
    return not failures, failures


# -- coset search ------------------------------------------------------------


def _spread_gray(index, free_positions):
    g = index ^ (index >> 1)
    bits = 0
    for b, pos in enumerate(free_positions):
        if (g >> b) & 1:
            bits |= 1 << pos
    return bits


def coset_search(complex_, system, m, mode="homological", strategy="exhaustive",
                 samples=None, seed=0, workers=1, cap=EXHAUSTIVE_VERTEX_CAP,
                 sharply=False):
    """First coset whose members are all (m-1)-legal, or None.

    Exhaustive strategy enumerates representatives (zero on the pivot
    coordinates of the move span) in Gray-code order and returns the first
    hit; the sampled strategy draws representative indices from seeded
    worker streams and a miss does not imply nonexistence.
    """
    n = complex_.n
    free = system.free_positions()
    if strategy == "exhaustive":
        if n > cap:
            raise BudgetExceeded(f"{n} vertices exceeds exhaustive cap {cap}")
        fast = not sharply and m <= 1 and n <= 63
        if mode == "connectivity" and m > 1:
            raise UnsupportedDegree("connectivity mode supports m in {0, 1}")
        if fast:
            adj = _fastscan.adjacency_word(complex_)
            idx = _fastscan.coset_scan(
                adj, n,
                np.array(free, dtype=np.int64),
                np.array([np.uint64(b) for b in system.basis], dtype=np.uint64),
                m, workers,
            )
        else:
            if n > HOMOLOGY_SCAN_CAP:
                raise BudgetExceeded(
                    f"homological exhaustive scan capped at {HOMOLOGY_SCAN_CAP} vertices"
                )
            idx = _coset_scan_py(complex_, system, free, m, mode, sharply)
        if idx < 0:
            return None
        rep = VertexSet(n, _spread_gray(idx, free))
        return build_certificate(complex_, system, rep, m, mode, sharply)
    if strategy != "sampled":
        raise ValueError(f"unknown strategy {strategy!r}")
    if samples is None:
        raise ValueError("sampled strategy needs a sample count")
    total = 1 << len(free)
    quotas = split_samples(samples, workers)
    seeds = worker_seeds(seed, workers)
    best = None
    offset = 0
    for w in range(workers):
        gen = SplitMix64(seeds[w])
        for j in range(quotas[w]):
            idx = gen.next_below(total)
            rep = VertexSet(n, _spread_gray(idx, free))
            if _coset_all_legal(complex_, system, rep, m, mode, sharply):
                global_index = offset + j
                if best is None or global_index < best[0]:
                    best = (global_index, rep)
                break
        offset += quotas[w]
    if best is None:
        return None
    return build_certificate(complex_, system, best[1], m, mode, sharply)


def _coset_all_legal(complex_, system, rep, m, mode, sharply):
    for member in coset_members(system, rep):
        if sharply:
            if not is_sharply_legal_state(complex_, member, m - 1):
                return False
        elif not is_legal_state(complex_, member, m, mode):
            return False
    return True


def _coset_scan_py(complex_, system, free, m, mode, sharply):
    for idx in range(1 << len(free)):
        rep = VertexSet(complex_.n, _spread_gray(idx, free))
        if _coset_all_legal(complex_, system, rep, m, mode, sharply):
            return idx
    return -1


def split_samples(samples, workers):
    base, extra = divmod(samples, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


# -- censuses and pigeonhole -------------------------------------------------


def count_not_connected(complex_, workers=1):
    """Exact number of induced subcomplexes that are empty or disconnected."""
    n = complex_.n
    if n > EXHAUSTIVE_VERTEX_CAP:
        raise BudgetExceeded(f"{n} vertices exceeds exhaustive cap")
    return _fastscan.census_not_connected(_fastscan.adjacency_word(complex_), n, workers)


def count_not_connected_py(complex_):
    """Pure-python mirror of count_not_connected, for cross-checking."""
    n = complex_.n
    return sum(
        1 for s in range(1 << n) if not complex_.connected_within(s)
    )


def count_not_k_acyclic(complex_, k, workers=1):
    """Exact number of induced subcomplexes that fail k-acyclicity."""
    n = complex_.n
    if k <= 0:
        if k == -1:
            return 1  # only the empty state
        return count_not_connected(complex_, workers)
    if n > HOMOLOGY_SCAN_CAP:
        raise BudgetExceeded("homological census capped at 20 vertices")
    bad = 0
    for s in range(1 << n):
        side = complex_.induced(VertexSet(n, s))
        if not is_k_acyclic(side, k):
            bad += 1
    return bad


def count_trivial_top_homology(complex_, d):
    """Exact number of induced subcomplexes with trivial degree-d homology."""
    n = complex_.n
    if n > HOMOLOGY_SCAN_CAP:
        raise BudgetExceeded("homological census capped at 20 vertices")
    count = 0
    for s in range(1 << n):
        side = complex_.induced(VertexSet(n, s))
        if _trivial_top(side, d):
            count += 1
    return count


def _trivial_top(side, d):
    if not side.nonempty or d > side.dimension:
        return True
    if d == 1 and side.dimension <= 1:
        # graph case: trivial H_1 means a forest
        comps = _component_count(side)
        return side.edge_count() == side.n - comps
    return reduced_homology(side).is_trivial(d)


def _component_count(complex_):
    remaining = (1 << complex_.n) - 1
    comps = 0
    while remaining:
        start = remaining & -remaining
        reach = start
        frontier = start
        while frontier:
            low = frontier & -frontier
            v = low.bit_length() - 1
            frontier ^= low
            new = complex_.adj[v] & remaining & ~reach
            reach |= new
            frontier |= new
        remaining &= ~reach
        comps += 1
    return comps


@dataclass
class PigeonholeReport:
    n: int
    chi: int
    m: int
    mode: str
    sharp: bool
    verdict: str  # CERTIFIED | NOT-IMPLIED | ESTIMATED
    count: int | None = None  # exact census when exhaustive
    trivial_top_count: int | None = None  # only for the sharp variant
    p_hat: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def threshold_log2(self):
        return self.n - self.chi - 1

    def threshold_str(self):
        return f"2^{self.threshold_log2}"


def pigeonhole_check(complex_, m, mode="homological", counting="exhaustive",
                     samples=None, seed=0, workers=1, sharp=False):
    """Compare the census of bad subcomplexes against 2^(n - chi - 1).

    CERTIFIED means the exhaustively counted census is strictly below the
    threshold, which forces a legal coset for the coloring-induced move
    system; NOT-IMPLIED means the pigeonhole gives no conclusion.  Sampled
    counting only ever reports ESTIMATED.  The sharp variant adds the
    count of subcomplexes with trivial top homology, with m forced to the
    complex dimension.
    """
    chi, _ = complex_.chromatic_number()
    n = complex_.n
    if counting == "exhaustive":
        if sharp:
            d = complex_.dimension
            fail = count_not_k_acyclic(complex_, d - 1, workers)
            trivial = count_trivial_top_homology(complex_, d)
            total = fail + trivial
            certified = (total << (chi + 1)) < (1 << n)
            return PigeonholeReport(
                n=n, chi=chi, m=d, mode=mode, sharp=True,
                verdict="CERTIFIED" if certified else "NOT-IMPLIED",
                count=fail, trivial_top_count=trivial,
            )
        count = count_not_k_acyclic(complex_, m - 1, workers)
        certified = (count << (chi + 1)) < (1 << n)
        return PigeonholeReport(
            n=n, chi=chi, m=m, mode=mode, sharp=False,
            verdict="CERTIFIED" if certified else "NOT-IMPLIED",
            count=count,
        )
    if counting != "sampled":
        raise ValueError(f"unknown counting {counting!r}")
    if samples is None:
        raise ValueError("sampled counting needs a sample count")
    if sharp:
        raise ValueError("sharp pigeonhole is exhaustive-only")
    predicate = "not-connected" if m == 1 else f"not-k-acyclic:{m - 1}"
    est = estimate_fraction(complex_, predicate, samples, seed, workers)
    return PigeonholeReport(
        n=n, chi=chi, m=m, mode=mode, sharp=False,
        verdict="ESTIMATED",
        p_hat=est.p_hat, ci_low=est.ci_low, ci_high=est.ci_high,
        samples=samples, seed=seed,
    )


# -- sampling estimators -----------------------------------------------------


@dataclass
class EstimateResult:
    predicate: str
    samples: int
    seed: int
    p_hat: float
    ci_low: float
    ci_high: float
    half_width: float


def hoeffding_half_width(samples, alpha=0.01):
    """99 percent two-sided Hoeffding half width: sqrt(ln(2/alpha)/(2 samples))."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * samples))


def parse_predicate(name):
    """Split a predicate name like 'not-k-acyclic:2' into (kind, parameter)."""
    if ":" in name:
        kind, arg = name.split(":", 1)
        return kind, int(arg)
    return name, None


def _predicate_fn(complex_, name):
    kind, arg = parse_predicate(name)
    n = complex_.n
    if kind == "not-connected":
        return lambda bits: not complex_.connected_within(bits)
    if kind == "not-k-acyclic":
        return lambda bits: not is_k_acyclic(
            complex_.induced(VertexSet(n, bits)), arg
        )
    if kind == "trivial-top-homology":
        return lambda bits: _trivial_top(complex_.induced(VertexSet(n, bits)), arg)
    if kind == "not-chamber-complex":
        return lambda bits: not complex_.induced(
            VertexSet(n, bits)
        ).is_chamber_complex(arg)
    raise ValueError(f"unknown predicate {name!r}")


def estimate_fraction(complex_, predicate, samples, seed, workers=1):
    """Monte Carlo estimate of a subcomplex-predicate fraction with 99% CI.

    States are drawn uniformly from per-worker SplitMix64 streams; the
    not-connected predicate runs in the compiled kernel, everything else
    falls back to per-sample evaluation on the same streams.
    """
    seeds = worker_seeds(seed, workers)
    quotas = split_samples(samples, workers)
    kind, _ = parse_predicate(predicate)
    if kind == "not-connected":
        counts = _fastscan.sample_not_connected(
            _fastscan.adjacency_words(complex_),
            complex_.n,
            np.array(seeds, dtype=np.uint64),
            np.array(quotas, dtype=np.int64),
        )
        hits = int(counts.sum())
    else:
        fn = _predicate_fn(complex_, predicate)
        hits = 0
        for w in range(workers):
            gen = SplitMix64(seeds[w])
            for _ in range(quotas[w]):
                bits = gen.next_bits(complex_.n)
                if fn(bits):
                    hits += 1
    p_hat = hits / samples
    half = hoeffding_half_width(samples)
    return EstimateResult(
        predicate=predicate,
        samples=samples,
        seed=seed,
        p_hat=p_hat,
        ci_low=max(0.0, p_hat - half),
        ci_high=min(1.0, p_hat + half),
        half_width=half,
    )


def exact_fraction(complex_, predicate, workers=1):
    """Exact census fraction of a predicate over all induced subcomplexes."""
    n = complex_.n
    kind, arg = parse_predicate(predicate)
    if kind == "not-connected":
        hits = count_not_connected(complex_, workers)
    elif kind == "not-k-acyclic":
        hits = count_not_k_acyclic(complex_, arg, workers)
    elif kind == "trivial-top-homology":
        hits = count_trivial_top_homology(complex_, arg)
    else:
        if n > HOMOLOGY_SCAN_CAP:
            raise BudgetExceeded("exhaustive census capped at 20 vertices")
        fn = _predicate_fn(complex_, predicate)
        hits = sum(1 for s in range(1 << n) if fn(s))
    return hits, 1 << n
