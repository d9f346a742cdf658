"""Generated subspaces, strong subspaces, and exact or sampled (strong) dimension.

A closure grows a point set by firing every block that holds two of its
points (and, for strong closures, every group that it touches) until
nothing changes.  Three interchangeable back ends do the work:

* ``py``: point-pair lookup through nested lists, fastest for small designs;
* ``table``: the same lookup through a dense numpy pair table, batched by
  frontier;
* ``incidence``: per-block counting through point incidences, for designs
  too large for a ``v x v`` table.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .designs import GroupDesign, PBDesign
from .errors import UnknownPoint

PY_LIMIT = 1024
TABLE_LIMIT = 8000
DEFAULT_BUDGET = 10_000_000
DEFAULT_SAMPLES = 10_000


class _Engine:
    def __init__(self, design, strong: bool, mode: str | None = None):
        v = design.v
        self.v = v
        self.strong = strong
        buckets: dict[int, list] = {}
        for b in design.blocks:
            if len(b) >= 2:
                buckets.setdefault(len(b), []).append(b)
        kmax = max(buckets, default=2)
        rows, arrays = [], []
        for k in sorted(buckets):
            arr = np.array(buckets[k], dtype=np.int64).reshape(-1, k)
            arrays.append(arr)
            rows.extend(buckets[k])
        self.block_list = rows
        self.padded = np.full((len(rows), kmax), -1, dtype=np.int64)
        start = 0
        for arr in arrays:
            self.padded[start:start + len(arr), :arr.shape[1]] = arr
            start += len(arr)
        if strong:
            self.groups = list(design.groups)
            self.group_of = np.asarray(design.group_of(), dtype=np.int64)
            gmax = max((len(g) for g in self.groups), default=1)
            self.group_pad = np.full((len(self.groups), gmax), -1, dtype=np.int64)
            for gi, g in enumerate(self.groups):
                self.group_pad[gi, :len(g)] = g
        else:
            self.groups = None
        if mode is None:
            mode = "py" if v <= PY_LIMIT else "table" if v <= TABLE_LIMIT else "incidence"
        self.mode = mode
        if mode in ("py", "table"):
            table = np.full((v, v), -1, dtype=np.int32)
            start = 0
            for arr in arrays:
                ids = np.arange(start, start + len(arr), dtype=np.int32)
                k = arr.shape[1]
                for a in range(k):
                    for b in range(a + 1, k):
                        table[arr[:, a], arr[:, b]] = ids
                        table[arr[:, b], arr[:, a]] = ids
                start += len(arr)
            if strong:
                # pairs inside one group never fire a block
                for g in self.groups:
                    ga = np.array(g)
                    table[np.ix_(ga, ga)] = -1
            self.table = table
            if mode == "py":
                self.rows = table.tolist()
        else:
            pts = self.padded.ravel()
            owners = np.repeat(np.arange(len(rows)), kmax)
            keep = pts >= 0
            pts, owners = pts[keep], owners[keep]
            order = np.argsort(pts, kind="stable")
            self.inc = owners[order]
            self.inc_ptr = np.concatenate([[0], np.cumsum(np.bincount(pts, minlength=v))])

    # -- state handling ---------------------------------------------------
    # py states are (members list, membership bytearray); numpy states are
    # (members array, boolean membership array)

    def empty(self):
        if self.mode == "py":
            return ([], bytearray(self.v))
        return (np.empty(0, dtype=np.int64), np.zeros(self.v, dtype=bool))

    def size(self, state) -> int:
        return len(state[0])

    def is_full(self, state) -> bool:
        return len(state[0]) == self.v

    def contains(self, state, p) -> bool:
        return bool(state[1][p])

    def points(self, state) -> frozenset:
        members = state[0]
        return frozenset(members if self.mode == "py" else members.tolist())

    def extend(self, state, new: Iterable[int]):
        """Closure of ``state`` (already closed) together with ``new``."""
        new = [p for p in new if not state[1][p]]
        if not new:
            return state
        if self.mode == "py":
            members, flags = list(state[0]), bytearray(state[1])
            start = len(members)
            for p in new:
                self._add_py(p, members, flags)
            self._grow_py(members, flags, start)
            return (members, flags)
        members, flags = state[0], state[1].copy()
        fresh = self._expand(np.unique(np.array(new, dtype=np.int64)), flags)
        flags[fresh] = True
        members = np.concatenate([members, fresh])
        return self._grow_np(members, flags, fresh)

    def close(self, seeds: Iterable[int]):
        return self.extend(self.empty(), seeds)

    # -- python back end ----------------------------------------------------

    def _add_py(self, p, members, flags):
        if flags[p]:
            return
        if self.groups is None:
            flags[p] = 1
            members.append(p)
        else:
            for y in self.groups[self.group_of[p]]:
                if not flags[y]:
                    flags[y] = 1
                    members.append(y)

    def _grow_py(self, members, flags, start):
        rows, blocks, v = self.rows, self.block_list, self.v
        fired = set()
        i = start
        while i < len(members) and len(members) < v:
            row = rows[members[i]]
            for j in range(i):
                b = row[members[j]]
                if b < 0 or b in fired:
                    continue
                fired.add(b)
                for x in blocks[b]:
                    if not flags[x]:
                        self._add_py(x, members, flags)
            i += 1

    # -- numpy back ends ----------------------------------------------------

    def _expand(self, pts, flags):
        """Drop points already present; for strong closures add whole groups."""
        pts = pts[~flags[pts]]
        if self.groups is None or not len(pts):
            return pts
        gs = np.unique(self.group_of[pts])
        pts = self.group_pad[gs].ravel()
        pts = pts[pts >= 0]
        return pts[~flags[pts]]

    def _fire_table(self, members, frontier):
        found = []
        chunk = max(1, 4_000_000 // max(1, len(members)))
        for s in range(0, len(frontier), chunk):
            b = self.table[frontier[s:s + chunk, None], members[None, :]].ravel()
            found.append(np.unique(b[b >= 0]))
        return np.unique(np.concatenate(found))

    def _fire_incidence(self, flags, frontier):
        ptr, inc = self.inc_ptr, self.inc
        cand = np.unique(np.concatenate([inc[ptr[p]:ptr[p + 1]] for p in frontier.tolist()]))
        if not len(cand):
            return cand
        rows = self.padded[cand]
        hits = (flags[np.maximum(rows, 0)] & (rows >= 0)).sum(axis=1)
        return cand[hits >= 2]

    def _grow_np(self, members, flags, frontier):
        v = self.v
        while len(frontier) and len(members) < v:
            if self.mode == "table":
                fired = self._fire_table(members, frontier)
            else:
                fired = self._fire_incidence(flags, frontier)
            pts = self.padded[fired].ravel()
            pts = np.unique(pts[pts >= 0])
            fresh = self._expand(pts, flags)
            flags[fresh] = True
            members = np.concatenate([members, fresh])
            frontier = fresh
        return (members, flags)


def engine(design, strong: bool = False, mode: str | None = None) -> _Engine:
    """Closure engine for ``design``, cached on the design object."""
    key = ("engine", strong, mode)
    cache = design._cache
    if key not in cache:
        cache[key] = _Engine(design, strong, mode)
    return cache[key]


def _check_points(design, Y):
    Y = list(Y)
    for y in Y:
        if not 0 <= y < design.v:
            raise UnknownPoint(y, design.v)
    return Y


def span(design: PBDesign, Y: Iterable[int], *, mode: str | None = None) -> frozenset[int]:
    """Smallest subspace containing ``Y``."""
    Y = _check_points(design, Y)
    eng = engine(design, False, mode)
    return eng.points(eng.close(Y))


def strong_span(design: GroupDesign, Y: Iterable[int], *, mode: str | None = None) -> frozenset[int]:
    """Smallest strong subspace (union of whole groups) containing ``Y``."""
    Y = _check_points(design, Y)
    eng = engine(design, True, mode)
    return eng.points(eng.close(Y))


# --------------------------------------------------------------------------
# dimension


@dataclass
class DimensionCertificate:
    """Outcome of a dimension computation.

    ``kind`` is one of:

    * ``exact``: the dimension is ``d``; ``witness`` is a ``(d+1)``-set
      generating every point;
    * ``certified``: every ``d``-set generates a proper (strong) subspace;
    * ``lower_bound_refuted``: ``witness`` is a ``d``-set generating
      everything, so the dimension is below ``d``;
    * ``inconclusive``: nothing proven about ``d``.  From :func:`dimension`
      this means every ``d``-set was shown proper but the next level was
      over budget.
    """

    kind: str
    d: int
    witness: tuple[int, ...] | None = None
    subsets_checked: int = 0
    seed: int | None = None
    method: str = "exhaustive"
    strong: bool = False
    witness_index: int | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["witness"] = list(self.witness) if self.witness is not None else None
        return out

    def lines(self) -> list[str]:
        out = [f"kind {self.kind}", f"d {self.d}"]
        if self.strong:
            out.append("strong yes")
        out.append(f"method {self.method}")
        out.append(f"subsets_checked {self.subsets_checked}")
        if self.witness is not None:
            out.append("witness " + " ".join(map(str, self.witness)))
        if self.witness_index is not None:
            out.append(f"witness_index {self.witness_index}")
        if self.seed is not None:
            out.append(f"seed {self.seed}")
        if self.note:
            out.append(f"note {self.note}")
        return out


class _Found(Exception):
    def __init__(self, witness):
        self.witness = witness


def _exhaustive(eng: _Engine, d: int) -> tuple[int, tuple | None]:
    """Close every ``d``-subset in colex order; stop at the first full span.

    Returns ``(subsets_checked, witness)``.  Prefix spans are reused down the
    search tree, and a new point already inside the prefix span reuses that
    span without a closure.
    """
    checked = 0
    chosen: list[int] = []

    def walk(state, remaining, hi):
        nonlocal checked
        for e in range(remaining - 1, hi):
            nxt = eng.extend(state, (e,))
            if remaining == 1:
                checked += 1
                if eng.is_full(nxt):
                    raise _Found(tuple(sorted(chosen + [e])))
            else:
                chosen.append(e)
                walk(nxt, remaining - 1, e)
                chosen.pop()

    try:
        walk(eng.empty(), d, eng.v)
    except _Found as hit:
        return checked, hit.witness
    return checked, None


def _at_least(design, d, strong, mode, samples, seed, budget, engine_mode):
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > design.v:
        raise ValueError(f"d={d} exceeds the number of points {design.v}")
    eng = engine(design, strong, engine_mode)
    if mode == "exhaustive":
        total = math.comb(design.v, d)
        if budget is not None and total > budget:
            return DimensionCertificate("inconclusive", d, strong=strong,
                                        note=f"C({design.v},{d})={total} exceeds budget {budget}")
        checked, witness = _exhaustive(eng, d)
        if witness is None:
            return DimensionCertificate("certified", d, subsets_checked=checked, strong=strong)
        return DimensionCertificate("lower_bound_refuted", d, witness, checked, strong=strong,
                                    witness_index=checked - 1)
    if mode == "sample":
        rng = np.random.default_rng(seed)
        for t in range(samples):
            Y = sorted(rng.choice(design.v, size=d, replace=False).tolist())
            if eng.is_full(eng.close(Y)):
                return DimensionCertificate("lower_bound_refuted", d, tuple(Y), t + 1, seed,
                                            "sample", strong, t)
        return DimensionCertificate("inconclusive", d, None, samples, seed, "sample", strong,
                                    note="no spanning sample found; sampling never certifies")
    raise ValueError(f"unknown mode {mode!r}")


def dimension_at_least(design: PBDesign, d: int, mode: str = "exhaustive", *,
                       samples: int = DEFAULT_SAMPLES, seed: int = 0,
                       budget: int | None = None, engine_mode: str | None = None) -> DimensionCertificate:
    """Prove or refute "every d-set generates a proper subspace".

    ``mode="sample"`` draws ``samples`` uniform d-sets from ``seed``; it can
    refute but never certify.
    """
    return _at_least(design, d, False, mode, samples, seed, budget, engine_mode)


def strong_dimension_at_least(design: GroupDesign, d: int, mode: str = "exhaustive", *,
                              samples: int = DEFAULT_SAMPLES, seed: int = 0,
                              budget: int | None = None, engine_mode: str | None = None) -> DimensionCertificate:
    return _at_least(design, d, True, mode, samples, seed, budget, engine_mode)


def _dimension(design, strong, budget, engine_mode):
    eng = engine(design, strong, engine_mode)
    v = design.v
    total = 0
    for d in range(1, v + 1):
        if math.comb(v, d) > budget:
            return DimensionCertificate("inconclusive", d - 1, subsets_checked=total, strong=strong,
                                        note=f"dimension >= {d - 1}; C({v},{d}) exceeds budget {budget}")
        checked, witness = _exhaustive(eng, d)
        total += checked
        if witness is not None:
            note = None
            if not strong and len(design.blocks) == 1 and len(design.blocks[0]) == v and v >= 2:
                note = "trivial one-line space"
            return DimensionCertificate("exact", d - 1, witness, total, strong=strong,
                                        witness_index=checked - 1, note=note)
    raise AssertionError("the full point set always generates everything")  # pragma: no cover


def dimension(design: PBDesign, budget: int = DEFAULT_BUDGET, *, engine_mode: str | None = None) -> DimensionCertificate:
    """Exact dimension by exhaustive closure of d-sets for d = 1, 2, ...

    ``budget`` caps the number of d-sets per level; past it the result is
    ``inconclusive`` carrying the largest certified ``d``.
    """
    return _dimension(design, False, budget, engine_mode)


def strong_dimension(design: GroupDesign, budget: int = DEFAULT_BUDGET, *,
                     engine_mode: str | None = None) -> DimensionCertificate:
    return _dimension(design, True, budget, engine_mode)


def dimension_by_subspaces(design, strong: bool = False, budget: int = DEFAULT_BUDGET) -> DimensionCertificate:
    """Exact (strong) dimension by walking distinct generated subspaces.

    The subspaces generated by (i+1)-sets are exactly the closures of
    ``S + {p}`` for S generated by an i-set and p outside S, so it suffices
    to extend each distinct subspace once per outside point.  The dimension
    is one less than the smallest level reaching the full point set.
    ``budget`` caps the number of closures.
    """
    eng = engine(design, strong)
    v = design.v
    layer = {}
    for p in range(v):
        st = eng.close((p,))
        layer.setdefault(eng.points(st), ((p,), st))
    closures = v
    d = 1
    while True:
        for gens, st in layer.values():
            if eng.is_full(st):
                return DimensionCertificate("exact", d - 1, tuple(sorted(gens)), closures,
                                            method="subspaces", strong=strong)
        nxt = {}
        for key in sorted(layer, key=lambda s: sorted(s)):
            gens, st = layer[key]
            for p in range(v):
                if eng.contains(st, p):
                    continue
                closures += 1
                if closures > budget:
                    return DimensionCertificate("inconclusive", d, subsets_checked=closures,
                                                method="subspaces", strong=strong,
                                                note=f"closure budget {budget} exhausted")
                grown = eng.extend(st, (p,))
                if eng.is_full(grown):
                    return DimensionCertificate("exact", d, tuple(sorted(gens + (p,))), closures,
                                                method="subspaces", strong=strong)
                nxt.setdefault(eng.points(grown), (gens + (p,), grown))
        layer = nxt
        d += 1
