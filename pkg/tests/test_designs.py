import math
from functools import reduce
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import is_gdd, is_pbd, representable
from pbdim.algebra import affine_space, projective_plane, steiner_triple_system, transversal_design
from pbdim.constructions import delete_point
from pbdim.designs import (GroupDesign, PBDesign, admissible, failing_condition, params, pbd_as_gdd,
                           replication_numbers, solve_overlap, verify, verify_gdd, verify_pbd)
from pbdim.errors import BelowThreshold, EmptyK


def test_params_examples():
    assert tuple(vars(params({3})).values()) == (2, 6, 3)
    assert tuple(vars(params({3, 4, 5})).values()) == (1, 2, 2)
    assert tuple(vars(params({6})).values()) == (5, 30, 6)


@pytest.mark.parametrize("K", [set(), {1}, {0, 3}])
def test_params_rejects_bad_K(K):
    with pytest.raises(EmptyK):
        params(K)


def test_admissible_examples():
    assert admissible(7, {3})
    assert not admissible(6, {3})
    assert admissible(13, {4})
    assert "local" in failing_condition(6, {3})
    assert "global" in failing_condition(5, {3})
    assert failing_condition(9, {3}) is None


def test_admissible_sts_residues():
    for v in range(1, 1001):
        assert admissible(v, {3}) == (v % 6 in (1, 3))


def _all_K():
    sizes = range(2, 13)
    return [frozenset(c) for r in range(1, 12) for c in combinations(sizes, r)]


def test_admissibility_three_forms_agree():
    """Direct form, replication form (single k) and y-form, for v <= 10^4 and every K in {2..12}."""
    v = np.arange(1, 10_001, dtype=np.int64)
    for K in _all_K():
        alpha = reduce(math.gcd, (k - 1 for k in K))
        beta = reduce(math.gcd, (k * (k - 1) for k in K))
        gamma = beta // alpha
        direct = ((v - 1) % alpha == 0) & ((v * (v - 1)) % beta == 0)
        got = np.array([admissible(int(x), K) for x in v[:200]])
        assert (got == direct[:200]).all()
        y, rem = np.divmod(v - 1, alpha)
        yform = (rem == 0) & ((y * (alpha * y + 1)) % gamma == 0)
        assert (direct == yform).all(), sorted(K)
        if len(K) == 1:
            (k,) = K
            r, rem = np.divmod(v - 1, k - 1)
            rform = (rem == 0) & ((r * (r - 1)) % k == 0)
            assert (direct == rform).all(), k


@given(st.integers(1, 10_000), st.sets(st.integers(2, 12), min_size=1))
def test_admissible_matches_y_form_property(v, K):
    p = params(K)
    y, rem = divmod(v - 1, p.alpha)
    assert admissible(v, K) == (rem == 0 and y * (p.alpha * y + 1) % p.gamma == 0)


def test_solve_overlap_examples():
    assert solve_overlap(23, 3, 2) == (7, 2)
    assert solve_overlap(20, 3, 2) == (6, 2)
    assert solve_overlap(4, 1, 1) == (3, 1)
    with pytest.raises(BelowThreshold) as info:
        solve_overlap(3, 1, 1)
    assert info.value.threshold == 4


def test_solve_overlap_against_brute_force():
    for A in range(1, 11):
        for c in range(1, 11):
            t = A * (A + c + 1) + c
            for y in range(t, t + 201):
                n, x = solve_overlap(y, A, c)
                assert y == n * A + x and c <= x <= n
                assert representable(y, A, c)


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 10_000))
def test_solve_overlap_property(A, c, extra):
    y = A * (A + c + 1) + c + extra
    n, x = solve_overlap(y, A, c)
    assert y == n * A + x and c <= x <= n


def test_design_normalization():
    D = PBDesign(3, [(2, 0), (1, 0), (2, 1)])
    assert D.blocks == ((0, 1), (0, 2), (1, 2))
    with pytest.raises(ValueError):
        PBDesign(3, [(0, 3)])
    with pytest.raises(ValueError):
        PBDesign(3, [(0, 0, 1)])


def test_verify_pbd_examples():
    r = verify_pbd(affine_space(3, 2))
    assert r.valid and r.pairs_checked == 36 and r.summary() == "36 pairs, each covered once"
    r = verify_pbd(PBDesign(3, [(0, 1)]))
    assert not r.valid
    assert r.violations == [("uncovered_pair", (0, 2)), ("uncovered_pair", (1, 2))]
    fano = projective_plane(2)
    r = verify_pbd(PBDesign(7, fano.blocks + fano.blocks[:1]))
    assert r.totals["doubly_covered_pair"] == 3
    assert {k for k, _ in r.violations} == {"doubly_covered_pair"}


def test_verify_pbd_other_violations():
    r = verify_pbd(PBDesign(3, [(0, 1, 2), (1,)]))
    assert r.totals["undersized_block"] == 1
    r = verify_pbd(PBDesign(4, [(0, 1, 2, 3)], sizes={3}))
    assert r.totals["size_not_declared"] == 1


def test_verify_gdd_examples():
    assert verify_gdd(transversal_design(3, 4)).valid
    G = transversal_design(3, 3)
    b = list(G.blocks[0])
    mate = next(x for x in G.groups[G.group_of()[b[1]]] if x != b[1])
    b[0] = mate
    broken = GroupDesign(G.v, G.groups, [tuple(b)] + list(G.blocks[1:]))
    r = verify_gdd(broken)
    assert r.totals["group_block_clash"] >= 1
    H = delete_point(affine_space(3, 2), 0)
    assert verify_gdd(H).valid and H.type_str == "2^4" and len(H.blocks) == 8


def test_verify_gdd_partition_and_in_group_pairs():
    r = verify_gdd(GroupDesign(4, [(0, 1), (2,)], [(0, 2), (1, 2)]))
    assert r.totals["bad_partition"] == 1
    r = verify_gdd(GroupDesign(4, [(0, 1), (2, 3)], [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]))
    assert r.totals["in_group_pair_covered"] == 1


def test_witnesses_capped_but_totals_exact():
    D = PBDesign(60, [])
    r = verify_pbd(D)
    assert r.totals["uncovered_pair"] == 60 * 59 // 2
    assert len(r.violations) == 100


def _random_pair_blocks(rng, v, n):
    return [tuple(sorted(rng.choice(v, size=rng.integers(2, 5), replace=False).tolist())) for _ in range(n)]


@pytest.mark.parametrize("seed", range(8))
def test_streaming_path_matches_dense(seed):
    rng = np.random.default_rng(seed)
    v = 12
    blocks = _random_pair_blocks(rng, v, 30)
    D = PBDesign(v, blocks)
    dense, stream = verify_pbd(D), verify_pbd(D, dense_limit=0)
    assert dense == stream
    assert dense.valid == is_pbd(v, D.blocks)
    groups = [tuple(range(i, i + 3)) for i in range(0, v, 3)]
    G = GroupDesign(v, groups, blocks)
    dense, stream = verify_gdd(G), verify_gdd(G, dense_limit=0)
    assert dense == stream
    assert dense.valid == is_gdd(v, G.groups, G.blocks)


@pytest.mark.parametrize("make", [lambda: steiner_triple_system(31), lambda: transversal_design(4, 5),
                                  lambda: affine_space(3, 3)])
def test_streaming_path_on_valid_designs(make):
    assert verify(make(), dense_limit=0).valid


@given(st.integers(2, 9), st.data())
@settings(max_examples=80, deadline=None)
def test_verify_agrees_with_oracle(v, data):
    pairs = list(combinations(range(v), 2))
    chosen = data.draw(st.lists(st.sampled_from(pairs), max_size=len(pairs) + 2))
    D = PBDesign(v, chosen)
    assert verify_pbd(D).valid == is_pbd(v, D.blocks)


def test_pbd_as_gdd():
    fano = projective_plane(2)
    G = pbd_as_gdd(fano)
    assert G.type_str == "1^7" and len(G.blocks) == 7 and verify_gdd(G).valid
    assert pbd_as_gdd(affine_space(3, 2)).type_str == "1^9"
    cross = {p for b in G.blocks for p in combinations(b, 2)}
    assert cross == {p for b in fano.blocks for p in combinations(b, 2)}


def test_replication_numbers():
    assert (replication_numbers(steiner_triple_system(15)) == 7).all()
    assert list(replication_numbers(PBDesign(3, [(0, 1, 2)]))) == [1, 1, 1]


def test_type_notation():
    G = GroupDesign(10, [(0, 1, 2, 3), (4, 5, 6, 7), (8, 9)], [])
    assert G.type == ((4, 2), (2, 1)) and G.type_str == "4^2 2^1"
