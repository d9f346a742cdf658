"""The ten acceptance criteria, each at its stated time budget.

A summary line per criterion is printed at the end of the pytest run.
"""

import hashlib
import json
import resource
import time
from itertools import combinations

import numpy as np
import pytest

from bundled import bundled_gdds, bundled_pbds
from oracles import is_pbd, naive_span, representable
from pbdim.algebra import affine_space, steiner_triple_system, transversal_design
from pbdim.closure import (dimension, dimension_at_least, span, strong_dimension, strong_dimension_at_least,
                           strong_span)
from pbdim.constructions import add_point_fill, break_blocks, delete_point, restore_label, truncate, wfc
from pbdim.designs import GroupDesign, PBDesign, admissible, params, pbd_as_gdd, replication_numbers, solve_overlap, verify
from pbdim.fileformat import serialize_design
from pbdim.ingredients import GDDRequest, IngredientProvider, PBDRequest, Registry
from pbdim.pipeline import execute, weak_plan


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.t0 = time.perf_counter()

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0

    def check(self):
        assert self.elapsed < self.limit, f"took {self.elapsed:.1f}s, budget {self.limit}s"
        return f"{self.elapsed:.2f}s (< {self.limit}s)"


def _digest(design) -> str:
    return hashlib.sha256(serialize_design(design).encode()).hexdigest()


# --------------------------------------------------------------------------
# the runs that criterion 10 repeats


def run_ag2_3():
    D = affine_space(3, 2)
    lines = {frozenset(b) for b in D.blocks}
    spans = {T: len(span(D, T)) for T in combinations(range(9), 3)}
    cert = dimension(D)
    return D, lines, spans, cert


def run_add_point_instance():
    master = pbd_as_gdd(affine_space(3, 2))
    G = wfc(master, 4, IngredientProvider(), {3})
    strong = strong_dimension_at_least(G, 2, "exhaustive")
    P = add_point_fill(G)
    pairs = dimension_at_least(P, 2, "exhaustive")
    triples = dimension_at_least(P, 3, "exhaustive")
    return G, strong, P, pairs, triples


def criterion9_provider():
    reg = Registry()
    reg.put(PBDRequest(13, {4}), IngredientProvider().pbd(13, {4}))
    reg.put(GDDRequest({13}, [13] * 13), transversal_design(13, 13))
    reg.put(GDDRequest({3}, [2] * 4), delete_point(steiner_triple_system(9), 0))
    reg.put(GDDRequest({3}, [2] * 3), transversal_design(3, 2))
    return IngredientProvider(reg)


def run_weak_pipeline():
    p = weak_plan(3, 2, r=4, q=13, n=13, x=13, provider=criterion9_provider())
    return p, *execute(p)


FIRST_RUN = {}


# --------------------------------------------------------------------------


def test_criterion_01_admissibility(criterion):
    criterion(1)
    clock = Clock(1.0)
    assert (params({3}).alpha, params({3}).beta, params({3}).gamma) == (2, 6, 3)
    assert (params({3, 4, 5}).alpha, params({3, 4, 5}).beta, params({3, 4, 5}).gamma) == (1, 2, 2)
    for v in range(1, 1001):
        assert admissible(v, {3}) == (v % 6 in (1, 3))
    criterion(1, f"params and 1000 residues, {clock.check()}")


def test_criterion_02_ag2_3(criterion):
    criterion(2)
    clock = Clock(1.0)
    D, lines, spans, cert = run_ag2_3()
    assert D.v == 9 and len(D.blocks) == 12 and D.block_sizes == {3}
    assert is_pbd(9, D.blocks)
    assert len(spans) == 84
    for T, size in spans.items():
        assert size == (3 if frozenset(T) in lines else 9)
        assert size == len(naive_span(D.blocks, T))
    assert (cert.kind, cert.d) == ("exact", 2)
    FIRST_RUN[2] = (_digest(D), json.dumps(cert.to_dict(), sort_keys=True))
    criterion(2, f"12 collinear / 72 spanning triples, dimension 2 exact, {clock.check()}")


def test_criterion_03_ag3_3(criterion):
    criterion(3)
    clock = Clock(30.0)
    D = affine_space(3, 3)
    assert D.v == 27 and D.block_sizes == {3} and verify(D).valid
    at3 = dimension_at_least(D, 3, "exhaustive")
    assert at3.kind == "certified" and at3.subsets_checked == 2925
    cert = dimension(D)
    assert (cert.kind, cert.d) == ("exact", 3)
    assert len(cert.witness) == 4 and len(span(D, cert.witness)) == 27
    criterion(3, f"2925 triples proper, 4-set {cert.witness} spans, {clock.check()}")


def test_criterion_04_td_strong_dimension(criterion):
    criterion(4)
    clock = Clock(5.0)
    for n in (3, 4, 5):
        cert = strong_dimension(transversal_design(3, n))
        assert (cert.kind, cert.d) == ("exact", 1)
    criterion(4, f"n=3,4,5 all exact 1, {clock.check()}")


def test_criterion_05_add_point_instance(criterion):
    criterion(5)
    clock = Clock(60.0)
    G, strong, P, pairs, triples = run_add_point_instance()
    assert G.type_str == "4^9" and len(G.blocks) == 192 and G.block_sizes == {3} and verify(G).valid
    assert strong.kind == "certified" and strong.subsets_checked == 630
    assert P.v == 37 and P.block_sizes == {3, 5} and verify(P).valid
    assert pairs.kind == "certified" and pairs.subsets_checked == 666
    assert triples.kind in ("certified", "lower_bound_refuted")
    if triples.witness is not None:
        assert len(span(P, triples.witness)) == 37
    FIRST_RUN[5] = (_digest(G), _digest(P),
                    json.dumps([c.to_dict() for c in (strong, pairs, triples)], sort_keys=True))
    criterion(5, f"dimension >= 2 certified over 666 pairs; triples {triples.kind}"
                 f" at index {triples.witness_index}, {clock.check()}")


def _closure_laws(design, strong, rng):
    v = design.v
    close = (lambda Y: strong_span(design, Y)) if strong else (lambda Y: span(design, Y))
    for _ in range(20):
        Y = set(rng.choice(v, size=rng.integers(0, min(v, 5) + 1), replace=False).tolist())
        Z = Y | set(rng.choice(v, size=2, replace=False).tolist())
        S = close(Y)
        assert Y <= S and close(S) == S and S <= close(Z)
        if strong:
            assert all(set(g) <= S or not set(g) & S for g in design.groups)


def _exact(design):
    return (strong_dimension if isinstance(design, GroupDesign) else dimension)(design, budget=200_000).d


def test_criterion_06_invariant_suite(criterion):
    criterion(6)
    clock = Clock(300.0)
    rng = np.random.default_rng(0)
    provider = IngredientProvider()
    pbds, gdds = bundled_pbds(), bundled_gdds()
    checks = 0
    for D in pbds.values():
        assert D.v <= 100
        _closure_laws(D, False, rng)
        for x in {0, D.v - 1}:
            P = add_point_fill(delete_point(D, x))
            back = PBDesign(D.v, [tuple(restore_label(p, x, P.v) for p in b) for b in P.blocks])
            assert back.blocks == D.blocks
        checks += 1
    for G in gdds.values():
        assert G.v <= 100
        _closure_laws(G, True, rng)
        d = _exact(G)
        assert dimension_at_least(add_point_fill(G), d, "exhaustive").kind == "certified"
        sizes = sorted(len(g) for g in G.groups)
        if sizes[-1] >= 2:
            gi = max(range(len(G.groups)), key=lambda i: (len(G.groups[i]), i))
            out = truncate(G, gi, len(G.groups[gi]) - 1)
            assert strong_dimension_at_least(out, d, "exhaustive").kind == "certified"
        checks += 1
    breaks = {"ag2(7)": {3}, "ag2(9)": {3}, "pg(8)": {3}, "pg(4)": {2}}
    for name, L in breaks.items():
        D = pbds[name]
        d = _exact(D)
        assert dimension_at_least(break_blocks(D, provider, L), d, "exhaustive").kind == "certified"
    for name, w in {"fano-as-gdd": 2, "td(3,3)": 3, "td(3,4)": 3, "ag2(3)-pt": 3, "td(3,2)": 4}.items():
        G = gdds[name]
        out = wfc(G, w, provider, G.block_sizes)
        assert strong_dimension_at_least(out, _exact(G), "exhaustive").kind == "certified"
    criterion(6, f"{checks} bundled designs, {clock.check()}")


def test_criterion_07_overlap(criterion):
    criterion(7)
    clock = Clock(10.0)
    count = 0
    for A in range(1, 11):
        for c in range(1, 11):
            t = A * (A + c + 1) + c
            for y in range(t, t + 201):
                n, x = solve_overlap(y, A, c)
                assert y == n * A + x and c <= x <= n
                assert representable(y, A, c)
                count += 1
    criterion(7, f"{count} cases, {clock.check()}")


def test_criterion_08_sts(criterion):
    criterion(8)
    clock = Clock(5.0)
    vs = [v for v in range(3, 100) if v % 6 in (1, 3)]
    for v in vs:
        D = steiner_triple_system(v)
        assert verify(D).valid and len(D.blocks) == v * (v - 1) // 6
    criterion(8, f"{len(vs)} orders, {clock.check()}")


@pytest.mark.slow
def test_criterion_09_weak_pipeline(criterion):
    criterion(9)
    clock = Clock(600.0)
    plan, final, trace = run_weak_pipeline()
    types = {r.name: r.output_summary for r in trace.records}
    assert "type 13^169 " in types["inflate"] and "type 13^169 " in types["truncate"]
    assert "type 26^169 " in types["inflate-alpha"]
    assert all(r.report.valid for r in trace.records)
    assert isinstance(final, PBDesign) and final.v == 4395 and final.block_sizes == {3}
    assert verify(final).valid
    reps = replication_numbers(final)
    assert (reps == 2197).all()
    fill = trace.records[-1]
    assert fill.certificate.kind == "certified" and fill.certificate.method == "pair-span"
    assert fill.probe is not None and fill.probe.method == "sample"
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 2 ** 20
    assert peak_gb < 4.0
    FIRST_RUN[9] = (_digest(final), json.dumps(trace.to_dict(), sort_keys=True))
    criterion(9, f"PBD(4395,{{3}}) with {len(final.blocks)} blocks, replication 2197, probe {fill.probe.kind},"
                 f" peak {peak_gb:.2f} GB, {clock.check()}")


@pytest.mark.slow
def test_criterion_10_determinism(criterion):
    criterion(10)
    assert {2, 5, 9} <= FIRST_RUN.keys(), "criteria 2, 5 and 9 must run first"
    D, _, _, cert = run_ag2_3()
    assert (_digest(D), json.dumps(cert.to_dict(), sort_keys=True)) == FIRST_RUN[2]
    G, strong, P, pairs, triples = run_add_point_instance()
    assert (_digest(G), _digest(P),
            json.dumps([c.to_dict() for c in (strong, pairs, triples)], sort_keys=True)) == FIRST_RUN[5]
    _, final, trace = run_weak_pipeline()
    assert (_digest(final), json.dumps(trace.to_dict(), sort_keys=True)) == FIRST_RUN[9]
    criterion(10, "designs and certificates of criteria 2, 5, 9 byte-identical on rerun")
