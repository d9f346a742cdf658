"""Independent brute-force oracles.

Nothing here imports the package: every check is a direct, slow restatement
of a definition, used to cross-examine the fast implementations.
"""

from itertools import combinations, product


def pair_counts(v, blocks):
    counts = {}
    for b in blocks:
        for a, c in combinations(sorted(b), 2):
            counts[(a, c)] = counts.get((a, c), 0) + 1
    return counts


def is_pbd(v, blocks):
    counts = pair_counts(v, blocks)
    return all(len(b) >= 2 for b in blocks) and all(
        counts.get(pair, 0) == 1 for pair in combinations(range(v), 2))


def is_gdd(v, groups, blocks):
    owner = {}
    for i, g in enumerate(groups):
        for x in g:
            if x in owner:
                return False
            owner[x] = i
    if sorted(owner) != list(range(v)):
        return False
    counts = pair_counts(v, blocks)
    for a, c in combinations(range(v), 2):
        want = 0 if owner[a] == owner[c] else 1
        if counts.get((a, c), 0) != want:
            return False
    return True


def naive_span(blocks, Y):
    S = set(Y)
    changed = True
    while changed:
        changed = False
        for b in blocks:
            if len(S.intersection(b)) >= 2 and not S.issuperset(b):
                S.update(b)
                changed = True
    return frozenset(S)


def naive_strong_span(groups, blocks, Y):
    owner = {x: i for i, g in enumerate(groups) for x in g}
    S = set(Y)
    changed = True
    while changed:
        changed = False
        for x in list(S):
            g = groups[owner[x]]
            if not S.issuperset(g):
                S.update(g)
                changed = True
        for b in blocks:
            inside = [x for x in b if x in S]
            if len({owner[x] for x in inside}) >= 2 and not S.issuperset(b):
                S.update(b)
                changed = True
    return frozenset(S)


def naive_dimension(v, blocks, groups=None):
    """Largest d with every d-set spanning a proper (strong) subspace."""
    for d in range(1, v + 1):
        for Y in combinations(range(v), d):
            S = naive_span(blocks, Y) if groups is None else naive_strong_span(groups, blocks, Y)
            full = len(S) == v
            if full:
                return d - 1
    return v


def representable(y, A, c):
    """Some n, x with y = nA + x and c <= x <= n."""
    return any(c <= y - n * A <= n for n in range(0, y // A + 1))


def poly_is_irreducible(coeffs_desc, p):
    """Monic polynomial over Z_p, by exhaustive search for a monic factor of lower degree."""
    m = len(coeffs_desc) - 1
    target = list(coeffs_desc)
    for deg in range(1, m // 2 + 1):
        for tail in product(range(p), repeat=deg):
            f = [1, *tail]
            for tail2 in product(range(p), repeat=m - deg):
                g = [1, *tail2]
                prod = [0] * (m + 1)
                for i, a in enumerate(f):
                    for j, b in enumerate(g):
                        prod[i + j] = (prod[i + j] + a * b) % p
                if prod == target:
                    return False
    return True


def affine_lines(q, d, add, mul):
    """All lines of F_q^d as frozensets of row-major point ids, using given field ops."""
    pts = list(product(range(q), repeat=d))

    def enc(vec):
        out = 0
        for c in vec:
            out = out * q + c
        return out

    lines = set()
    for base in pts:
        for direction in pts:
            if not any(direction):
                continue
            line = frozenset(enc(tuple(add(b, mul(t, u)) for b, u in zip(base, direction))) for t in range(q))
            lines.add(line)
    return lines
