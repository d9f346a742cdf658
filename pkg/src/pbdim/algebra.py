"""Finite fields GF(p^m) and the concrete designs built from them.

Field elements are the integers ``0..q-1``: the polynomial residue
``c_0 + c_1 x + ... + c_{m-1} x^{m-1}`` is stored as ``sum c_i p^i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .designs import GroupDesign, PBDesign, _trusted
from .errors import Inadmissible, NotPrime, NotPrimePower, TooLarge, Unsupported

FIELD_ORDER_CAP = 1 << 16
# Caps on emitted incidences (blocks x block size) for the generators.
INCIDENCE_CAP = 50_000_000
TABLE_CAP = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q = p**m``, or None if ``q`` is not a prime power."""
    if q < 2:
        return None
    p = next(f for f in range(2, q + 1) if q % f == 0)
    m = 0
    while q % p == 0:
        q //= p
        m += 1
    return (p, m) if q == 1 else None


def _factor(n: int) -> list[int]:
    primes, f = [], 2
    while f * f <= n:
        if n % f == 0:
            primes.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        primes.append(n)
    return primes


# polynomials over Z_p as coefficient lists, constant term first


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = list(a)
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(_trim(a)) - 1 >= db:
        shift = len(a) - 1 - db
        f = a[-1] * inv_lead % p
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
    return a


def _monic_polys(p, deg):
    for n in range(p ** deg):
        coeffs = [(n // p ** i) % p for i in range(deg)]
        yield coeffs + [1]


def is_irreducible(poly_ascending, p) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    m = len(poly_ascending) - 1
    if m < 1:
        return False
    for deg in range(1, m // 2 + 1):
        for f in _monic_polys(p, deg):
            if not _trim(_poly_mod(poly_ascending, f, p)):
                return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``m`` over Z_p.

    Coefficients are compared from the leading term down to the constant
    term; the result is returned in that (descending) order.
    """
    for n in range(p ** m):
        # n's most significant base-p digit is the x^(m-1) coefficient, so
        # increasing n walks the descending coefficient lists in lex order
        asc = [(n // p ** i) % p for i in range(m)] + [1]
        if is_irreducible(asc, p):
            return tuple(reversed(asc))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """GF(p^m) with integer-encoded elements."""

    def __init__(self, p: int, m: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise NotPrime(p)
        if m < 1 or p ** m > FIELD_ORDER_CAP:
            raise TooLarge(f"GF({p}^{m}) exceeds the order cap {FIELD_ORDER_CAP}")
        self.p, self.m, self.q = p, m, p ** m
        if m == 1:
            self.modulus = None
        else:
            if modulus is None:
                modulus = smallest_irreducible(p, m)
            modulus = tuple(modulus)
            if len(modulus) != m + 1 or modulus[0] != 1 or not is_irreducible(list(reversed(modulus)), p):
                raise ValueError(f"{modulus} is not a monic irreducible of degree {m} over Z_{p}")
            self.modulus = modulus
        self._exp = self._log = None

    def __repr__(self):
        return f"GF({self.q})" if self.m == 1 else f"GF({self.p}^{self.m}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def _check(self, *xs):
        for a in xs:
            if not 0 <= a < self.q:
                raise ValueError(f"{a} is not an element of {self}")

    def _digits(self, a):
        p = self.p
        out = []
        for _ in range(self.m):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def _pack(self, digits):
        a = 0
        for c in reversed(digits):
            a = a * self.p + c
        return a

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        return self._pack([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a: int) -> int:
        self._check(a)
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self._pack([(-x) % self.p for x in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _slow_mul(self, a, b):
        p = self.p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        rem = _poly_mod(prod, list(reversed(self.modulus)), p)
        return self._pack(rem + [0] * (self.m - len(rem)))

    def _tables(self):
        if self._exp is None:
            q = self.q
            order = q - 1
            primes = _factor(order)

            def power(g, e):
                r = 1
                while e:
                    if e & 1:
                        r = self._slow_mul(r, g)
                    g = self._slow_mul(g, g)
                    e >>= 1
                return r

            gen = next(g for g in range(2, q) if all(power(g, order // f) != 1 for f in primes))
            exp = [1] * (2 * order)
            for i in range(1, 2 * order):
                exp[i] = self._slow_mul(exp[i - 1], gen)
            log = [0] * q
            for i in range(order):
                log[exp[i]] = i
            self._exp, self._log = exp, log
        return self._exp, self._log

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        exp, log = self._tables()
        return exp[log[a] + log[b]]

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        exp, log = self._tables()
        return exp[(self.q - 1 - log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.q)

    def add_table(self) -> np.ndarray:
        return _tables_for(self)[0]

    def mul_table(self) -> np.ndarray:
        return _tables_for(self)[1]


@lru_cache(maxsize=64)
def _tables_for(F: FiniteField):
    q = F.q
    if q > TABLE_CAP:
        raise TooLarge(f"operation tables for GF({q}) exceed {TABLE_CAP}^2 entries")
    el = np.arange(q)
    if F.m == 1:
        add = (el[:, None] + el[None, :]) % q
        mul = (el[:, None] * el[None, :]) % q
    else:
        add = np.array([[F.add(a, b) for b in el] for a in el], dtype=np.int64)
        mul = np.array([[F.mul(a, b) for b in el] for a in el], dtype=np.int64)
    add.setflags(write=False)
    mul.setflags(write=False)
    return add, mul


def field_make(p: int, m: int = 1) -> FiniteField:
    return FiniteField(p, m)


@lru_cache(maxsize=64)
def field_of_order(q: int) -> FiniteField:
    pm = prime_power(q)
    if pm is None:
        raise NotPrimePower(q)
    return FiniteField(*pm)


def field_arith(F: FiniteField, op: str, a: int, b: int | None = None) -> int:
    """Dispatch ``op`` in {add, sub, mul, div, neg, inv} on ``F``."""
    if op in ("neg", "inv"):
        return getattr(F, op)(a)
    if op not in ("add", "sub", "mul", "div"):
        raise ValueError(f"unknown field operation {op!r}")
    return getattr(F, op)(a, b)


# --------------------------------------------------------------------------
# geometries


@dataclass(frozen=True)
class AffineSpaceSpec:
    q: int
    d: int

    @property
    def points(self) -> int:
        return self.q ** self.d

    @property
    def lines(self) -> int:
        return self.q ** (self.d - 1) * (self.q ** self.d - 1) // (self.q - 1)


def _coords(q, d, pts):
    return np.stack([(pts // q ** (d - 1 - i)) % q for i in range(d)], axis=1)


def _normalized_vectors(q, d):
    """Nonzero vectors of F_q^d whose first nonzero coordinate is 1, in encoding order."""
    out = []
    for code in range(1, q ** d):
        digits = [(code // q ** (d - 1 - i)) % q for i in range(d)]
        if next(c for c in digits if c) == 1:
            out.append(digits)
    return np.array(out, dtype=np.int64).reshape(len(out), d)


def affine_space(q: int, d: int) -> PBDesign:
    """Points and lines of AG_d(q) as a PBD(q^d, {q}).

    The point ``(c_0, ..., c_{d-1})`` is numbered ``sum c_i q^(d-1-i)``.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    spec = AffineSpaceSpec(q, d)
    if spec.lines * q > INCIDENCE_CAP:
        raise TooLarge(f"AG_{d}({q}) has {spec.lines} lines")
    F = field_of_order(q)
    add, mul = F.add_table(), F.mul_table()
    pts = np.arange(q ** d, dtype=np.int64)
    coords = _coords(q, d, pts)
    weights = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    lines = []
    for direction in _normalized_vectors(q, d):
        # row t holds x + t*direction for every point x
        moved = np.stack([(add[coords, mul[t, direction]] * weights).sum(axis=1) for t in range(q)])
        keep = moved.min(axis=0) == pts
        lines.append(np.sort(moved[:, keep].T, axis=1))
    blocks = np.concatenate(lines)
    blocks = blocks[np.lexsort(blocks.T[::-1])]
    return _trusted(PBDesign, q ** d, tuple(map(tuple, blocks.tolist())), {q})


def projective_plane(q: int) -> PBDesign:
    """PG(2, q) as a PBD(q^2+q+1, {q+1}).

    Points are the normalized homogeneous triples numbered in encoding
    order; lines come from the same triples by duality.
    """
    F = field_of_order(q)
    n = q * q + q + 1
    if n * (q + 1) > INCIDENCE_CAP:
        raise TooLarge(f"PG(2,{q}) is too large")
    add, mul = F.add_table(), F.mul_table()
    vecs = _normalized_vectors(q, 3)
    blocks = []
    for a in vecs:
        dot = add[add[mul[a[0], vecs[:, 0]], mul[a[1], vecs[:, 1]]], mul[a[2], vecs[:, 2]]]
        blocks.append(tuple(np.flatnonzero(dot == 0).tolist()))
    return PBDesign(n, blocks, {q + 1})


def transversal_design(k: int, n: int) -> GroupDesign:
    """TD(k, n) from the field GF(n); requires ``2 <= k <= n+1``.

    Group ``i`` holds points ``i*n .. i*n+n-1``.  For ``(a, b)`` in GF(n)^2
    the block takes ``a + e_i*b`` from group ``i < n`` and ``b`` from group
    ``n`` when ``k = n+1``.
    """
    if prime_power(n) is None:
        raise Unsupported(f"TD({k},{n}): {n} is not a prime power; supply it through the registry")
    if not 2 <= k <= n + 1:
        raise Unsupported(f"TD({k},{n}) needs 2 <= k <= n+1 for the field construction")
    if n * n * k > INCIDENCE_CAP:
        raise TooLarge(f"TD({k},{n}) is too large")
    F = field_of_order(n)
    add, mul = F.add_table(), F.mul_table()
    a = np.repeat(np.arange(n), n)
    b = np.tile(np.arange(n), n)
    cols = [i * n + add[a, mul[i, b]] for i in range(min(k, n))]
    if k == n + 1:
        cols.append(n * n + b)
    blocks = np.stack(cols, axis=1)
    blocks = blocks[np.lexsort(blocks.T[::-1])]
    groups = tuple(tuple(range(i * n, (i + 1) * n)) for i in range(k))
    return _trusted(GroupDesign, k * n, tuple(map(tuple, blocks.tolist())), {k}, groups)


def steiner_triple_system(v: int) -> PBDesign:
    """STS(v) by Bose (v = 6n+3) or Skolem (v = 6n+1).

    Point ``(x, i)`` with ``i`` in Z_3 is numbered ``3x + i``; Skolem's extra
    point is ``v - 1``.
    """
    if v < 3 or v % 6 not in (1, 3):
        raise Inadmissible(f"a Steiner triple system needs v = 1 or 3 (mod 6) and v >= 3, got {v}")
    if v * (v - 1) // 6 * 3 > INCIDENCE_CAP:
        raise TooLarge(f"STS({v}) is too large")
    blocks = []
    if v % 6 == 3:
        m = v // 3  # odd order of the idempotent commutative quasigroup
        half = (m + 1) // 2

        def op(x, y):
            return (x + y) * half % m

        blocks += [(3 * x, 3 * x + 1, 3 * x + 2) for x in range(m)]
    else:
        n = (v - 1) // 6
        m = 2 * n
        inf = v - 1

        def op(x, y):
            # half-idempotent commutative quasigroup: Z_2n addition with
            # symbols relabelled so that x o x = (x+n) o (x+n) = x mod n
            s = (x + y) % m
            return s // 2 if s % 2 == 0 else (s - 1) // 2 + n

        blocks += [(3 * x, 3 * x + 1, 3 * x + 2) for x in range(n)]
        blocks += [(inf, 3 * (x + n) + i, 3 * x + (i + 1) % 3) for x in range(n) for i in range(3)]
    for x in range(m):
        for y in range(x + 1, m):
            z = op(x, y)
            blocks += [(3 * x + i, 3 * y + i, 3 * z + (i + 1) % 3) for i in range(3)]
    return PBDesign(v, blocks, {3})
