"""PBD/GDD data model, exact axiom verification and admissibility arithmetic."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import BelowThreshold, EmptyK

Block = tuple[int, ...]

# Above this many points the O(v^2) triangular counter is replaced by a
# per-point streaming check.
DENSE_PAIR_LIMIT = 20000
WITNESS_CAP = 100

VIOLATION_KINDS = (
    "bad_partition",
    "undersized_block",
    "size_not_declared",
    "group_block_clash",
    "in_group_pair_covered",
    "uncovered_pair",
    "doubly_covered_pair",
)


def _normalize_blocks(v: int, blocks: Iterable[Iterable[int]]) -> tuple[Block, ...]:
    out = []
    for raw in blocks:
        b = tuple(sorted(raw))
        if b and (b[0] < 0 or b[-1] >= v):
            raise ValueError(f"block {b} has points outside 0..{v - 1}")
        if any(b[i] == b[i + 1] for i in range(len(b) - 1)):
            raise ValueError(f"block {b} repeats a point")
        out.append(b)
    out.sort()
    return tuple(out)


def _normalize_sizes(sizes) -> frozenset[int] | None:
    if sizes is None:
        return None
    return frozenset(int(k) for k in sizes)


@dataclass(frozen=True)
class PBDesign:
    """A pairwise balanced design on points ``0..v-1``.

    Blocks are stored sorted, and the block list is sorted lexicographically,
    so equal designs compare equal and serialize identically.  Duplicate
    blocks are kept: they are a defect that :func:`verify_pbd` reports.
    """

    v: int
    blocks: tuple[Block, ...]
    sizes: frozenset[int] | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.v < 1:
            raise ValueError("a design needs at least one point")
        object.__setattr__(self, "blocks", _normalize_blocks(self.v, self.blocks))
        object.__setattr__(self, "sizes", _normalize_sizes(self.sizes))

    @property
    def block_sizes(self) -> frozenset[int]:
        return frozenset(len(b) for b in self.blocks)

    def __repr__(self):
        return f"PBDesign(v={self.v}, blocks={len(self.blocks)}, sizes={sorted(self.block_sizes)})"


@dataclass(frozen=True)
class GroupDesign:
    """A group divisible design: points ``0..v-1``, a group partition, blocks.

    Groups are kept sorted internally and ordered by their smallest point.
    """

    v: int
    groups: tuple[Block, ...]
    blocks: tuple[Block, ...]
    sizes: frozenset[int] | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.v < 1:
            raise ValueError("a design needs at least one point")
        object.__setattr__(self, "groups", _normalize_blocks(self.v, self.groups))
        object.__setattr__(self, "blocks", _normalize_blocks(self.v, self.blocks))
        object.__setattr__(self, "sizes", _normalize_sizes(self.sizes))

    @property
    def block_sizes(self) -> frozenset[int]:
        return frozenset(len(b) for b in self.blocks)

    @property
    def type(self) -> tuple[tuple[int, int], ...]:
        """Group sizes as ``(size, multiplicity)`` pairs, largest size first."""
        counts = Counter(len(g) for g in self.groups)
        return tuple(sorted(counts.items(), reverse=True))

    @property
    def type_str(self) -> str:
        return format_type(self.type)

    def group_of(self) -> list[int]:
        if "group_of" not in self._cache:
            owner = [-1] * self.v
            for gi, g in enumerate(self.groups):
                for x in g:
                    owner[x] = gi
            self._cache["group_of"] = owner
        return self._cache["group_of"]

    def __repr__(self):
        return f"GroupDesign(v={self.v}, type={self.type_str}, blocks={len(self.blocks)})"


def _trusted(cls, v, blocks, sizes=None, groups=None):
    """Build a design from already-canonical parts, skipping normalization.

    Used by constructions that emit millions of sorted blocks; callers must
    pass sorted tuples of sorted tuples.
    """
    obj = object.__new__(cls)
    object.__setattr__(obj, "v", v)
    if cls is GroupDesign:
        object.__setattr__(obj, "groups", groups)
    object.__setattr__(obj, "blocks", blocks)
    object.__setattr__(obj, "sizes", _normalize_sizes(sizes))
    object.__setattr__(obj, "_cache", {})
    return obj


def format_type(type_pairs: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{g}^{u}" for g, u in type_pairs)


def type_from_sizes(sizes: Iterable[int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(Counter(sizes).items(), reverse=True))


def pbd_as_gdd(design: PBDesign) -> GroupDesign:
    """View a PBD as a GDD of type ``1^v``."""
    groups = tuple((x,) for x in range(design.v))
    return _trusted(GroupDesign, design.v, design.blocks, design.sizes, groups)


# --------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class DesignParams:
    alpha: int
    beta: int
    gamma: int


def params(K: Iterable[int]) -> DesignParams:
    ks = sorted(set(K))
    if not ks or ks[0] < 2:
        raise EmptyK()
    alpha = reduce(math.gcd, (k - 1 for k in ks))
    beta = reduce(math.gcd, (k * (k - 1) for k in ks))
    return DesignParams(alpha, beta, beta // alpha)


def admissible(v: int, K: Iterable[int]) -> bool:
    """Local and global necessary conditions for a PBD(v, K)."""
    p = params(K)
    return (v - 1) % p.alpha == 0 and (v * (v - 1)) % p.beta == 0


def failing_condition(v: int, K: Iterable[int]) -> str | None:
    """Name the first necessary condition that ``v`` violates, if any."""
    p = params(K)
    if (v - 1) % p.alpha:
        return f"local condition fails: v-1={v - 1} is not divisible by alpha={p.alpha}"
    if (v * (v - 1)) % p.beta:
        return f"global condition fails: v(v-1)={v * (v - 1)} is not divisible by beta={p.beta}"
    return None


def solve_overlap(y: int, A: int, c: int) -> tuple[int, int]:
    """Write ``y = n*A + x`` with ``c <= x <= n``.

    Returns the division-algorithm witness: ``y - c = n*A + m`` with
    ``0 <= m < A`` and ``x = m + c``.  The bound ``c <= x <= n`` is only
    guaranteed from ``y >= A(A+c+1)+c`` on, so smaller ``y`` is rejected even
    when some representation happens to exist.
    """
    if A < 1 or c < 1:
        raise ValueError("A and c must be positive")
    if y < A * (A + c + 1) + c:
        raise BelowThreshold(y, A, c)
    n, m = divmod(y - c, A)
    return n, m + c


# --------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    valid: bool
    violations: list[tuple[str, tuple]]
    totals: dict[str, int]
    pairs_checked: int
    blocks_checked: int

    def summary(self) -> str:
        if self.valid:
            return f"{self.pairs_checked} pairs, each covered once"
        parts = [f"{kind}={n}" for kind, n in self.totals.items() if n]
        return "invalid: " + ", ".join(parts)


class _Collector:
    def __init__(self):
        self.witnesses: dict[str, list] = {k: [] for k in VIOLATION_KINDS}
        self.totals: dict[str, int] = {k: 0 for k in VIOLATION_KINDS}

    def add(self, kind: str, witnesses: Sequence, total: int | None = None):
        self.totals[kind] += len(witnesses) if total is None else total
        room = WITNESS_CAP - len(self.witnesses[kind])
        if room > 0:
            self.witnesses[kind].extend(tuple(w) if not isinstance(w, tuple) else w for w in witnesses[:room])

    def report(self, pairs_checked: int, blocks_checked: int) -> VerificationReport:
        violations = []
        for kind in VIOLATION_KINDS:
            violations.extend((kind, w) for w in sorted(self.witnesses[kind]))
        return VerificationReport(
            valid=not any(self.totals.values()),
            violations=violations,
            totals={k: n for k, n in self.totals.items()},
            pairs_checked=pairs_checked,
            blocks_checked=blocks_checked,
        )


def blocks_by_size(design) -> dict[int, np.ndarray]:
    """Blocks grouped by size as ``(count, k)`` int arrays (cached)."""
    cache = design._cache
    if "by_size" not in cache:
        buckets: dict[int, list] = {}
        for b in design.blocks:
            buckets.setdefault(len(b), []).append(b)
        cache["by_size"] = {
            k: np.array(bs, dtype=np.int64).reshape(len(bs), k) for k, bs in sorted(buckets.items())
        }
    return cache["by_size"]


def _tri_index(i, j, v):
    # i < j
    return i * (2 * v - i - 1) // 2 + (j - i - 1)


def _tri_unindex(idx, v):
    idx = np.asarray(idx, dtype=np.int64)
    starts = np.arange(v, dtype=np.int64) * (2 * v - np.arange(v, dtype=np.int64) - 1) // 2
    i = np.searchsorted(starts, idx, side="right") - 1
    j = idx - starts[i] + i + 1
    return list(zip(i.tolist(), j.tolist()))


def _block_checks(design, col: _Collector):
    by_size = blocks_by_size(design)
    for k, arr in by_size.items():
        if k < 2:
            col.add("undersized_block", [tuple(r) for r in arr.tolist()])
        if design.sizes is not None and k not in design.sizes:
            col.add("size_not_declared", [tuple(r) for r in arr[:WITNESS_CAP].tolist()], len(arr))


def _dense_pair_counts(design) -> np.ndarray:
    v = design.v
    npairs = v * (v - 1) // 2
    counts = np.zeros(npairs, dtype=np.int64)
    for k, arr in blocks_by_size(design).items():
        if k < 2:
            continue
        ti, tj = np.triu_indices(k, 1)
        # chunk to bound memory on very large blocks
        step = max(1, 4_000_000 // len(ti))
        for s in range(0, len(arr), step):
            chunk = arr[s:s + step]
            idx = _tri_index(chunk[:, ti], chunk[:, tj], v).ravel()
            counts += np.bincount(idx, minlength=npairs)
    return counts


def _point_incidence(design):
    """CSR point -> block-index incidence."""
    pts, owners = [], []
    for bi, b in enumerate(design.blocks):
        pts.extend(b)
        owners.extend([bi] * len(b))
    pts = np.array(pts, dtype=np.int64)
    owners = np.array(owners, dtype=np.int64)
    order = np.argsort(pts, kind="stable")
    ptr = np.concatenate([[0], np.cumsum(np.bincount(pts, minlength=design.v))])
    return ptr, owners[order]


def _streaming_pairs(design, group_of: np.ndarray | None, col: _Collector):
    """Per-point coverage rows: O(v) memory per point instead of O(v^2)."""
    v = design.v
    ptr, inc = _point_incidence(design)
    block_arr = [np.array(b, dtype=np.int64) for b in design.blocks]
    for i in range(v):
        bl = inc[ptr[i]:ptr[i + 1]]
        if len(bl):
            partners = np.concatenate([block_arr[b] for b in bl])
            row = np.bincount(partners, minlength=v)
        else:
            row = np.zeros(v, dtype=np.int64)
        row = row[i + 1:]
        js = np.arange(i + 1, v)
        if group_of is not None:
            same = group_of[i + 1:] == group_of[i]
            hit = js[same & (row > 0)]
            if len(hit):
                col.add("in_group_pair_covered", [(i, int(j)) for j in hit[:WITNESS_CAP]], len(hit))
            row = np.where(same, 1, row)
        un = js[row == 0]
        if len(un):
            col.add("uncovered_pair", [(i, int(j)) for j in un[:WITNESS_CAP]], len(un))
        dbl = js[row >= 2]
        if len(dbl):
            col.add("doubly_covered_pair", [(i, int(j)) for j in dbl[:WITNESS_CAP]], len(dbl))


def _pair_checks(design, group_of, col: _Collector, dense_limit: int):
    v = design.v
    if v < 2:
        return
    if v > dense_limit:
        _streaming_pairs(design, None if group_of is None else np.asarray(group_of), col)
        return
    counts = _dense_pair_counts(design)
    if group_of is not None:
        in_group = []
        for g in design.groups:
            if len(g) >= 2:
                ga = np.array(g, dtype=np.int64)
                ti, tj = np.triu_indices(len(g), 1)
                in_group.append(_tri_index(ga[ti], ga[tj], v))
        if in_group:
            idx = np.concatenate(in_group)
            hit = idx[counts[idx] > 0]
            if len(hit):
                hit.sort()
                col.add("in_group_pair_covered", _tri_unindex(hit[:WITNESS_CAP], v), len(hit))
            counts[idx] = 1
    un = np.flatnonzero(counts == 0)
    if len(un):
        col.add("uncovered_pair", _tri_unindex(un[:WITNESS_CAP], v), len(un))
    dbl = np.flatnonzero(counts >= 2)
    if len(dbl):
        col.add("doubly_covered_pair", _tri_unindex(dbl[:WITNESS_CAP], v), len(dbl))


def verify_pbd(design: PBDesign, *, dense_limit: int = DENSE_PAIR_LIMIT) -> VerificationReport:
    """Check that every pair of distinct points lies in exactly one block."""
    col = _Collector()
    _block_checks(design, col)
    _pair_checks(design, None, col, dense_limit)
    return col.report(design.v * (design.v - 1) // 2, len(design.blocks))


def verify_gdd(design: GroupDesign, *, dense_limit: int = DENSE_PAIR_LIMIT) -> VerificationReport:
    """Check the group partition, block/group intersections and cross-pair exactness."""
    col = _Collector()
    seen = Counter(x for g in design.groups for x in g)
    missing = [(x,) for x in range(design.v) if x not in seen]
    repeated = [(x,) for x, n in sorted(seen.items()) if n > 1]
    if any(len(g) == 0 for g in design.groups):
        col.add("bad_partition", [()])
    if missing or repeated:
        col.add("bad_partition", missing + repeated)
    _block_checks(design, col)
    owner = np.asarray(design.group_of(), dtype=np.int64)
    if not (missing or repeated):
        clashes = []
        total = 0
        for k, arr in blocks_by_size(design).items():
            if k < 2:
                continue
            g = np.sort(owner[arr], axis=1)
            bad = np.flatnonzero((g[:, 1:] == g[:, :-1]).any(axis=1))
            total += len(bad)
            for row in bad[:WITNESS_CAP]:
                gs = g[row].tolist()
                dup = sorted({x for x in gs if gs.count(x) > 1})
                clashes.extend((tuple(arr[row].tolist()), gi) for gi in dup)
        if total:
            col.add("group_block_clash", clashes, total)
    if not (missing or repeated):
        _pair_checks(design, design.group_of(), col, dense_limit)
    return col.report(design.v * (design.v - 1) // 2, len(design.blocks))


def verify(design, **kw) -> VerificationReport:
    if isinstance(design, GroupDesign):
        return verify_gdd(design, **kw)
    return verify_pbd(design, **kw)


def replication_numbers(design) -> np.ndarray:
    """Number of blocks on each point."""
    counts = np.zeros(design.v, dtype=np.int64)
    for arr in blocks_by_size(design).values():
        counts += np.bincount(arr.ravel(), minlength=design.v)
    return counts
