"""Parameter planning and the staged construction of high-dimension PBDs.

Starting from the lines of AG_d(q), the chain is

1. ``master``: AG_d(q) viewed as a GDD of type 1^(q^d);
2. ``inflate``: weight every point by n and place TD(q, n) on every line;
3. ``break``: replace every block of size q by a PBD(q, {r});
4. ``truncate``: cut the last group down to x points;
5. ``inflate-alpha``: weight every point by alpha and place K-GDDs of
   types alpha^r and alpha^(r-1);
6. ``fill``: adjoin a point and fill every extended group with a PBD(., K).

The result is a PBD(v, K) with ``v = [n(q^d - 1) + x] alpha + 1`` whose
dimension is at least d.  Weak mode is full mode with ``K = {k}``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import algebra
from .closure import (DimensionCertificate, dimension_at_least, strong_dimension_at_least)
from .constructions import add_point_fill, break_blocks, truncate, wfc
from .designs import (GroupDesign, PBDesign, admissible, params, pbd_as_gdd, replication_numbers,
                      type_from_sizes, verify)
from .errors import Inadmissible, MissingIngredient, NoParametersWithinLimits, StageFailed
from .ingredients import GDDRequest, IngredientProvider, PBDRequest

log = logging.getLogger(__name__)

PIPELINE_BUDGET = 20_000
PIPELINE_SAMPLES = 10_000


@dataclass(frozen=True)
class SearchLimits:
    """User caps standing in for the non-effective existence bounds.

    ``c`` is the least admissible truncation size x.
    """

    r_max: int = 40
    q_max: int = 500
    c: int = 1


@dataclass
class PipelinePlan:
    mode: str
    K: frozenset[int]
    d: int
    y: int
    r: int
    q: int
    n: int
    x: int
    alpha: int
    gamma: int
    bindings: dict[str, list[str]]
    limits: SearchLimits
    notes: list[str] = field(default_factory=list)
    provider: IngredientProvider | None = field(default=None, repr=False, compare=False)

    @property
    def v(self) -> int:
        return self.y * self.alpha + 1

    def lines(self) -> list[str]:
        K = ",".join(map(str, sorted(self.K)))
        out = [f"mode {self.mode}", f"K {K}", f"d {self.d}", f"y {self.y}", f"v {self.v}",
               f"r {self.r}", f"q {self.q}", f"n {self.n}", f"x {self.x}",
               f"alpha {self.alpha}", f"gamma {self.gamma}"]
        for stage, reqs in self.bindings.items():
            out.append(f"binding {stage} " + "; ".join(reqs))
        out.extend(f"note {n}" for n in self.notes)
        return out


def _y_admissible(y: int, alpha: int, gamma: int) -> bool:
    return y * (alpha * y + 1) % gamma == 0


def _prime_powers(lo: int, hi: int, step_mod: int) -> Iterator[int]:
    q = lo
    while q <= hi:
        if algebra.prime_power(q):
            yield q
        q += step_mod


def _stage_requests(K, alpha, r, q, n, x):
    reqs = {
        "inflate": [GDDRequest({q}, [n] * q)],
        "break": [PBDRequest(q, {r})],
        "inflate-alpha": [GDDRequest(K, [alpha] * r)],
        "fill": [PBDRequest(n * alpha + 1, K)],
    }
    if x < n:
        reqs["inflate-alpha"].append(GDDRequest(K, [alpha] * (r - 1)))
        reqs["fill"].append(PBDRequest(x * alpha + 1, K))
    return reqs


def _first_missing(provider, reqs):
    for r in reqs:
        if not provider.available(r):
            return r
    return None


def overlap_candidates(y: int, A: int, gamma: int, c: int) -> Iterator[tuple[int, int]]:
    """All ``(n, x)`` with ``y = n*A + x``, ``gamma | n`` and ``c <= x <= n``.

    Ordered by decreasing n, so that above the overlap threshold the first
    candidate is the division-algorithm witness for ``A' = gamma*A``.
    """
    step = gamma * A
    top = (y - c) // step if y >= c else -1
    for m in range(top, 0, -1):
        n = gamma * m
        x = y - n * A
        if c <= x <= n:
            yield n, x


def plan(K: Iterable[int], d: int, y: int | None = None, *, mode: str = "full",
         r: int | None = None, q: int | None = None, n: int | None = None, x: int | None = None,
         provider: IngredientProvider | None = None, limits: SearchLimits | None = None) -> PipelinePlan:
    """Choose r, then q, then (n, x) so that every ingredient resolves.

    Parameters fixed by the caller restrict the search.  When all of r, q, n
    and x are given the plan is validated rather than searched, and the
    convenience constraint ``gamma | n`` is relaxed: only the fill
    ingredients PBD(n*alpha+1, K) and PBD(x*alpha+1, K) must resolve.
    """
    K = frozenset(K)
    p = params(K)
    alpha, gamma = p.alpha, p.gamma
    provider = provider or IngredientProvider()
    limits = limits or SearchLimits()
    if d < 1:
        raise ValueError("d must be >= 1")

    if None not in (r, q, n, x):
        return _explicit_plan(K, d, y, r, q, n, x, alpha, gamma, mode, provider, limits)
    if y is None:
        raise ValueError("a target y is needed unless r, q, n and x are all given")
    if not _y_admissible(y, alpha, gamma):
        raise Inadmissible(f"y={y}: y(alpha*y+1) = {y * (alpha * y + 1)} is not divisible by gamma={gamma}"
                           f" (v={alpha * y + 1} is not admissible for K={sorted(K)})")

    blocked = []
    r_values = [r] if r is not None else [s for s in range(3, limits.r_max + 1) if (s - 1) % gamma == 0]
    for rr in r_values:
        miss = _first_missing(provider, [GDDRequest(K, [alpha] * rr), GDDRequest(K, [alpha] * (rr - 1))])
        if miss is not None:
            blocked.append((f"r={rr}", str(miss)))
            continue
        mod = rr * (rr - 1)
        q_values = [q] if q is not None else _prime_powers(mod + 1, limits.q_max, mod)
        for qq in q_values:
            miss = _first_missing(provider, [PBDRequest(qq, {rr})])
            if miss is not None:
                blocked.append((f"r={rr} q={qq}", str(miss)))
                continue
            A = qq ** d - 1
            found_any = False
            for nn, xx in overlap_candidates(y, A, gamma, limits.c):
                if (n is not None and nn != n) or (x is not None and xx != x):
                    continue
                found_any = True
                if not _y_admissible(xx, alpha, gamma):
                    blocked.append((f"r={rr} q={qq} n={nn} x={xx}", "x inadmissible"))
                    continue
                reqs = _stage_requests(K, alpha, rr, qq, nn, xx)
                miss = _first_missing(provider, [req for rs in reqs.values() for req in rs])
                if miss is not None:
                    blocked.append((f"r={rr} q={qq} n={nn} x={xx}", str(miss)))
                    continue
                notes = []
                threshold = gamma * A * (gamma * A + limits.c + 1) + limits.c
                if y >= threshold:
                    notes.append(f"y is past the overlap threshold {threshold}")
                return PipelinePlan(mode, K, d, y, rr, qq, nn, xx, alpha, gamma,
                                    {s: [str(t) for t in rs] for s, rs in reqs.items()},
                                    limits, notes, provider)
            if not found_any:
                blocked.append((f"r={rr} q={qq}", f"no (n, x) with y=n*{A}+x, {gamma}|n, {limits.c}<=x<=n"))
    first = f"; first blocker: {blocked[0][0]}: {blocked[0][1]}" if blocked else ""
    raise NoParametersWithinLimits(f"no parameters within limits for K={sorted(K)}, d={d}, y={y}{first}", blocked)


def _explicit_plan(K, d, y, r, q, n, x, alpha, gamma, mode, provider, limits):
    notes = []
    if r < 3:
        raise ValueError("r must be >= 3")
    if (r - 1) % gamma:
        raise ValueError(f"r={r} is not 1 mod gamma={gamma}")
    if not algebra.prime_power(q) or (q - 1) % (r * (r - 1)):
        raise ValueError(f"q={q} must be a prime power that is 1 mod r(r-1)={r * (r - 1)}")
    if not 1 <= x <= n:
        raise ValueError(f"x={x} must lie in 1..n={n}")
    yy = n * (q ** d - 1) + x
    if y is not None and y != yy:
        raise ValueError(f"y={y} differs from n(q^d-1)+x = {yy}")
    if not _y_admissible(yy, alpha, gamma):
        raise Inadmissible(f"y={yy} is not admissible for K={sorted(K)}")
    if n % gamma:
        notes.append(f"gamma={gamma} does not divide n={n}; fill ingredients resolved directly")
    if x == n:
        notes.append("x = n: truncation is the identity")
    reqs = _stage_requests(K, alpha, r, q, n, x)
    miss = _first_missing(provider, [req for rs in reqs.values() for req in rs])
    if miss is not None:
        raise MissingIngredient(miss)
    return PipelinePlan(mode, K, d, yy, r, q, n, x, alpha, gamma,
                        {s: [str(t) for t in rs] for s, rs in reqs.items()}, limits, notes, provider)


def weak_plan(k: int, d: int, y: int | None = None, **kw) -> PipelinePlan:
    """Plan a PBD with the single block size k; replication number y."""
    return plan({k}, d, y, mode="weak", **kw)


# --------------------------------------------------------------------------
# execution


def summarize(design) -> str:
    sizes = ",".join(map(str, sorted(design.block_sizes)))
    if isinstance(design, GroupDesign):
        return f"GDD v={design.v} type {design.type_str} blocks={len(design.blocks)} sizes={{{sizes}}}"
    return f"PBD v={design.v} blocks={len(design.blocks)} sizes={{{sizes}}}"


@dataclass
class StageRecord:
    name: str
    input_summary: str
    output_summary: str
    report: object
    certificate: DimensionCertificate | None = None
    skipped: str | None = None
    probe: DimensionCertificate | None = None
    seconds: float = 0.0

    def lines(self) -> list[str]:
        out = [f"stage {self.name}", f"  input {self.input_summary}", f"  output {self.output_summary}",
               f"  verify {'valid' if self.report.valid else 'INVALID'} ({self.report.summary()})"]
        if self.certificate is not None:
            c = self.certificate
            out.append(f"  dimension>= {c.d}: {c.kind} via {c.method}, {c.subsets_checked} checked"
                       + (f" ({c.note})" if c.note else ""))
        if self.skipped:
            out.append(f"  dimension skipped: {self.skipped}")
        if self.probe is not None:
            c = self.probe
            w = " ".join(map(str, c.witness)) if c.witness else "-"
            status = "refuted, witness spans everything" if c.witness else "no witness, uncertified"
            out.append(f"  probe dimension>= {c.d}: {c.kind} via {c.method}, {c.subsets_checked} checked,"
                       f" witness {w}, {status}")
        return out


@dataclass
class StageTrace:
    records: list[StageRecord] = field(default_factory=list)

    def lines(self) -> list[str]:
        return [line for rec in self.records for line in rec.lines()]

    def to_dict(self) -> dict:
        return {"stages": [{
            "name": r.name, "input": r.input_summary, "output": r.output_summary,
            "valid": r.report.valid, "violations": r.report.totals,
            "certificate": r.certificate.to_dict() if r.certificate else None,
            "skipped": r.skipped,
            "probe": r.probe.to_dict() if r.probe else None,
        } for r in self.records]}


def certify(design, d: int, *, budget: int = PIPELINE_BUDGET, samples: int = PIPELINE_SAMPLES,
            seed: int = 0) -> DimensionCertificate:
    """(Strong) dimension >= d by the cheapest sound route available.

    Exhaustive when C(v, d) fits the budget.  Otherwise two exact shortcuts
    cover small d: a pair spans exactly its block, and a point's strong span
    is its group.  Anything else gets a sampled refutation attempt, which
    never certifies.
    """
    strong = isinstance(design, GroupDesign)
    check = strong_dimension_at_least if strong else dimension_at_least
    if math.comb(design.v, d) <= budget:
        return check(design, d, "exhaustive")
    if not strong and d <= 2:
        whole = [b for b in design.blocks if len(b) == design.v]
        if whole:
            return DimensionCertificate("lower_bound_refuted", d, tuple(sorted(whole[0][:d])), 1,
                                        method="pair-span")
        return DimensionCertificate("certified", d, subsets_checked=len(design.blocks), method="pair-span",
                                    note="every pair spans its own block and no block is the whole point set")
    if strong and d == 1:
        ok = len(design.groups) > 1
        return DimensionCertificate("certified" if ok else "lower_bound_refuted", 1,
                                    None if ok else (0,), len(design.groups), method="group-span",
                                    strong=True, note="a point spans its own group")
    cert = check(design, d, "sample", samples=samples, seed=seed)
    if cert.kind == "inconclusive":
        cert.note = f"consistent with >= {d}, not certified"
    return cert


class _Runner:
    def __init__(self, d, budget, samples, seed, certify_stages):
        self.trace = StageTrace()
        self.d, self.budget, self.samples, self.seed = d, budget, samples, seed
        self.certify_stages = certify_stages

    def stage(self, name, source, build, expect_type=None):
        t0 = time.perf_counter()
        try:
            out = build()
        except Exception as exc:
            raise StageFailed(name, str(exc), self.trace) from exc
        report = verify(out)
        rec = StageRecord(name, summarize(source) if source is not None else "-", summarize(out), report)
        self.trace.records.append(rec)
        if not report.valid:
            raise StageFailed(name, f"verification failed: {report.summary()}", self.trace)
        if expect_type is not None and out.type != type_from_sizes(expect_type):
            raise StageFailed(name, f"type {out.type_str} breaks the stage type law", self.trace)
        if self.certify_stages:
            rec.certificate = certify(out, self.d, budget=self.budget, samples=self.samples, seed=self.seed)
            if rec.certificate.kind == "lower_bound_refuted":
                raise StageFailed(name, f"dimension >= {self.d} refuted by {rec.certificate.witness}", self.trace)
        else:
            rec.skipped = "certification disabled"
        rec.seconds = time.perf_counter() - t0
        log.info("stage %s: %s (%.1fs)", name, rec.output_summary, rec.seconds)
        if source is not None:
            source._cache.clear()
        return out

    def probe(self, design):
        rec = self.trace.records[-1]
        if self.d + 1 <= design.v:
            check = strong_dimension_at_least if isinstance(design, GroupDesign) else dimension_at_least
            rec.probe = check(design, self.d + 1, "sample", samples=self.samples, seed=self.seed)


def execute(plan: PipelinePlan, *, budget: int = PIPELINE_BUDGET, samples: int = PIPELINE_SAMPLES,
            seed: int = 0, certify_stages: bool = True, probe: bool = True) -> tuple[PBDesign, StageTrace]:
    """Run all six stages, verifying every intermediate design."""
    provider = plan.provider or IngredientProvider()
    K, d, q, n, x, r, alpha = plan.K, plan.d, plan.q, plan.n, plan.x, plan.r, plan.alpha
    points = q ** d
    run = _Runner(d, budget, samples, seed, certify_stages)

    master = run.stage("master", None, lambda: pbd_as_gdd(algebra.affine_space(q, d)), [1] * points)
    g2 = run.stage("inflate", master, lambda: wfc(master, n, provider, {q}, check=False), [n] * points)
    g3 = run.stage("break", g2, lambda: break_blocks(g2, provider, {r}, check=False), [n] * points)
    g4 = run.stage("truncate", g3, lambda: truncate(g3, len(g3.groups) - 1, x, check=False),
                   [n] * (points - 1) + [x])
    g5 = run.stage("inflate-alpha", g4, lambda: wfc(g4, alpha, provider, K, check=False),
                   [n * alpha] * (points - 1) + [x * alpha])
    final = run.stage("fill", g5, lambda: add_point_fill(g5, provider, K, check=False))
    if probe:
        run.probe(final)

    if final.v != plan.v or final.v != (n * (points - 1) + x) * alpha + 1:
        raise StageFailed("fill", f"v={final.v} differs from [n(q^d-1)+x]alpha+1={plan.v}", run.trace)
    if not admissible(final.v, K):
        raise StageFailed("fill", f"v={final.v} is not admissible", run.trace)
    if plan.mode == "weak":
        (k,) = tuple(K)
        reps = replication_numbers(final)
        if not (reps == (final.v - 1) // (k - 1)).all():
            raise StageFailed("fill", "replication is not uniform", run.trace)
    return final, run.trace


def mini_chain(q: int, d: int, n: int, provider: IngredientProvider | None = None, *,
               budget: int = PIPELINE_BUDGET, samples: int = PIPELINE_SAMPLES, seed: int = 0):
    """AG_d(q) inflated by n with TD(q, n), then a point added with single-block fills."""
    provider = provider or IngredientProvider()
    points = q ** d
    run = _Runner(d, budget, samples, seed, True)
    master = run.stage("master", None, lambda: pbd_as_gdd(algebra.affine_space(q, d)), [1] * points)
    g2 = run.stage("inflate", master, lambda: wfc(master, n, provider, {q}, check=False), [n] * points)
    final = run.stage("fill", g2, lambda: add_point_fill(g2, check=False))
    return final, run.trace
