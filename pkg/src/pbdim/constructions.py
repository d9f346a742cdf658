"""Dimension-preserving transforms on PBDs and GDDs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .designs import GroupDesign, PBDesign, _trusted, verify
from .errors import BadGroup, BadKeep, UnknownPoint, VerificationFailed
from .ingredients import GDDRequest, IngredientProvider, PBDRequest

log = logging.getLogger(__name__)


def _checked(design, check: bool, what: str):
    if check:
        report = verify(design)
        if not report.valid:
            raise VerificationFailed(f"{what} produced an invalid design: {report.summary()}", report)
    return design


def _finish(cls, v, blocks, sizes, groups=None):
    blocks.sort()
    return _trusted(cls, v, tuple(blocks), sizes, groups)


@dataclass(frozen=True)
class WeightAssignment:
    """Nonnegative weight per master point."""

    weights: tuple[int, ...]

    def __init__(self, weights: Iterable[int]):
        w = tuple(int(x) for x in weights)
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if not any(w):
            raise ValueError("at least one weight must be positive")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, v: int, w: int) -> "WeightAssignment":
        return cls([w] * v)

    def of_block(self, block: Sequence[int]) -> tuple[int, ...]:
        """The ingredient type omega(B), zero weights dropped, ascending."""
        return tuple(sorted(self.weights[x] for x in block if self.weights[x]))

    def of_groups(self, groups: Sequence[Sequence[int]]) -> list[int]:
        sums = [sum(self.weights[x] for x in g) for g in groups]
        return [s for s in sums if s]


def clone_labels(weights: Sequence[int]) -> list[tuple[int, int]]:
    """Output point -> (master point, clone index), in master-point order."""
    return [(x, i) for x, w in enumerate(weights) for i in range(w)]


# --------------------------------------------------------------------------


def break_blocks(design, provider: IngredientProvider, L: Iterable[int], *, check: bool = True):
    """Replace every block whose size is outside ``L`` by a PBD(k, L) on its points.

    Works on GDDs as well as PBDs: groups are left untouched.
    """
    L = frozenset(L)
    relabel = {}
    out = []
    for b in design.blocks:
        k = len(b)
        if k in L:
            out.append(b)
            continue
        if k not in relabel:
            relabel[k] = provider.resolve(PBDRequest(k, L)).blocks
        out.extend(tuple(b[i] for i in sub) for sub in relabel[k])
    if isinstance(design, GroupDesign):
        result = _finish(GroupDesign, design.v, out, L, design.groups)
    else:
        result = _finish(PBDesign, design.v, out, L)
    return _checked(result, check, "break_blocks")


def _ingredient_plan(ingredient: GroupDesign):
    """Ingredient points as (slot, clone) pairs.

    Slots number the ingredient groups by (size, position); master points
    of a block are matched to slots in (weight, point) order.
    """
    order = sorted(range(len(ingredient.groups)), key=lambda gi: (len(ingredient.groups[gi]), gi))
    where = {}
    for slot, gi in enumerate(order):
        for c, x in enumerate(ingredient.groups[gi]):
            where[x] = (slot, c)
    return [tuple(where[x] for x in b) for b in ingredient.blocks]


def wfc(master: GroupDesign, weights, provider: IngredientProvider, K: Iterable[int],
        *, check: bool = True) -> GroupDesign:
    """Wilson's fundamental construction.

    Every master point ``x`` becomes ``weights[x]`` clones numbered in
    master-point order; groups keep master order (empty ones vanish); every
    master block ``B`` is replaced by a K-GDD of type ``omega(B)`` laid on
    the clone sets of its points.
    """
    if isinstance(weights, int):
        weights = WeightAssignment.uniform(master.v, weights)
    elif not isinstance(weights, WeightAssignment):
        weights = WeightAssignment(weights)
    w = weights.weights
    if len(w) != master.v:
        raise ValueError(f"{len(w)} weights for {master.v} master points")
    K = frozenset(K)
    base = [0] * master.v
    total = 0
    for x in range(master.v):
        base[x] = total
        total += w[x]
    ids = list(range(total))
    groups = tuple(tuple(ids[base[x] + i] for x in g for i in range(w[x])) for g in master.groups)
    groups = tuple(sorted(g for g in groups if g))

    plans = {}
    out = []
    for b in master.blocks:
        pts = sorted((x for x in b if w[x]), key=lambda x: (w[x], x))
        if len(pts) < 2:
            continue
        t = tuple(w[x] for x in pts)
        plan = plans.get(t)
        if plan is None:
            plan = plans[t] = _ingredient_plan(provider.resolve(GDDRequest(K, t)))
        starts = [base[x] for x in pts]
        for blk in plan:
            out.append(tuple(sorted(ids[starts[s] + c] for s, c in blk)))
    result = _finish(GroupDesign, total, out, K, groups)
    return _checked(result, check, "wfc")


def truncate(design: GroupDesign, group_index: int, keep: int, *, check: bool = True) -> GroupDesign:
    """Delete all but the first ``keep`` points of one group.

    Blocks lose the deleted points; blocks left with a single point are
    discarded.  Surviving points are renumbered in order.
    """
    if not 0 <= group_index < len(design.groups):
        raise BadGroup(f"group {group_index} does not exist ({len(design.groups)} groups)")
    group = design.groups[group_index]
    if not 1 <= keep <= len(group):
        raise BadKeep(f"keep={keep} must lie in 1..{len(group)}")
    if keep == len(group):
        log.warning("truncate keeps all %d points of group %d: identity", keep, group_index)
        return design
    dropped = set(group[keep:])
    new_id = [-1] * design.v
    n = 0
    for x in range(design.v):
        if x not in dropped:
            new_id[x] = n
            n += 1
    groups = tuple(tuple(new_id[x] for x in g if x not in dropped) for g in design.groups)
    out = []
    for b in design.blocks:
        nb = tuple(new_id[x] for x in b if x not in dropped)
        if len(nb) >= 2:
            out.append(nb)
    sizes = None if design.sizes is None else design.sizes | {k - 1 for k in design.sizes if k > 2}
    result = _finish(GroupDesign, n, out, sizes, groups)
    return _checked(result, check, "truncate")


def delete_point(design: PBDesign, x: int, *, check: bool = True) -> GroupDesign:
    """Remove ``x`` and its blocks; the punctured blocks through ``x`` become groups.

    Points above ``x`` shift down by one.
    """
    if not 0 <= x < design.v:
        raise UnknownPoint(x, design.v)

    def lab(p):
        return p if p < x else p - 1

    groups, out = [], []
    for b in design.blocks:
        if x in b:
            groups.append(tuple(lab(p) for p in b if p != x))
        else:
            out.append(tuple(lab(p) for p in b))
    covered = {p for g in groups for p in g}
    # a point on no block through x (only possible in a broken design) keeps a singleton group
    groups.extend((p,) for p in range(design.v - 1) if p not in covered)
    groups.sort()
    result = _finish(GroupDesign, design.v - 1, out, design.sizes, tuple(groups))
    return _checked(result, check, "delete_point")


def restore_label(p: int, x: int, v: int) -> int:
    """Map a point of ``add_point_fill(delete_point(D, x))`` back to D's label."""
    if p == v - 1:
        return x
    return p if p < x else p + 1


def add_point_fill(design: GroupDesign, provider: IngredientProvider | None = None,
                   K: Iterable[int] | None = None, *, check: bool = True) -> PBDesign:
    """Adjoin a point ``inf = v`` and fill every extended group.

    Without a provider each group ``G`` becomes the single block ``G + {inf}``;
    with one, ``G + {inf}`` carries the blocks of a PBD(|G|+1, K).
    """
    inf = design.v
    out = list(design.blocks)
    sizes = None
    if provider is None:
        out.extend(g + (inf,) for g in design.groups)
        sizes = (design.sizes or frozenset()) | {len(g) + 1 for g in design.groups}
    else:
        K = frozenset(K if K is not None else design.sizes)
        fills = {}
        for g in design.groups:
            n = len(g)
            if n not in fills:
                fills[n] = provider.resolve(PBDRequest(n + 1, K)).blocks
            pts = g + (inf,)
            out.extend(tuple(pts[i] for i in blk) for blk in fills[n])
        sizes = K
    result = _finish(PBDesign, design.v + 1, out, sizes)
    return _checked(result, check, "add_point_fill")
