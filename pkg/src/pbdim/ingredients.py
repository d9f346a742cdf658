"""Ingredient requests, the design registry, and the resolver behind constructions.

Requests name what a construction needs: a PBD(v, K), or a K-GDD of a given
type.  A provider answers from the registry first, then from the algebraic
generators, and otherwise reports the request as missing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from . import algebra
from .designs import GroupDesign, PBDesign, format_type, pbd_as_gdd, type_from_sizes, verify
from .errors import MissingIngredient, VerificationFailed

log = logging.getLogger(__name__)


def _ksets(K) -> str:
    return "{" + ",".join(map(str, sorted(K))) + "}"


@dataclass(frozen=True)
class PBDRequest:
    v: int
    sizes: frozenset[int]

    def __init__(self, v: int, sizes: Iterable[int]):
        object.__setattr__(self, "v", int(v))
        object.__setattr__(self, "sizes", frozenset(sizes))

    def __str__(self):
        return f"PBD({self.v},{_ksets(self.sizes)})"


@dataclass(frozen=True)
class GDDRequest:
    """A K-GDD whose group sizes form the multiset ``type`` (stored ascending)."""

    sizes: frozenset[int]
    type: tuple[int, ...]

    def __init__(self, sizes: Iterable[int], group_sizes: Iterable[int]):
        object.__setattr__(self, "sizes", frozenset(sizes))
        object.__setattr__(self, "type", tuple(sorted(group_sizes)))

    def __str__(self):
        return f"{_ksets(self.sizes)}-GDD of type {format_type(type_from_sizes(self.type))}"


Request = Union[PBDRequest, GDDRequest]


def request_for(design, sizes: Iterable[int] | None = None) -> Request:
    """The tightest request a design satisfies (declared sizes win over observed ones)."""
    K = frozenset(sizes) if sizes is not None else (design.sizes or design.block_sizes)
    if isinstance(design, GroupDesign):
        return GDDRequest(K, [len(g) for g in design.groups])
    return PBDRequest(design.v, K)


def satisfies(design, request: Request) -> bool:
    if not design.block_sizes <= request.sizes:
        return False
    if isinstance(request, PBDRequest):
        return isinstance(design, PBDesign) and design.v == request.v
    return isinstance(design, GroupDesign) and tuple(sorted(len(g) for g in design.groups)) == request.type


def file_name(request: Request) -> str:
    K = "-".join(map(str, sorted(request.sizes)))
    if isinstance(request, PBDRequest):
        return f"pbd_{request.v}_{K}.txt"
    t = "-".join(f"{g}^{u}" for g, u in type_from_sizes(request.type))
    return f"gdd_{K}_{t}.txt"


class Registry:
    """Verified designs keyed by exact request.

    Optionally backed by a directory holding one design file per entry;
    lookup always goes through the parsed header, never the file name.
    """

    def __init__(self, directory: str | Path | None = None):
        self.entries: dict[Request, object] = {}
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None and self.directory.is_dir():
            from .fileformat import read_design

            for path in sorted(self.directory.glob("*.txt")):
                design = read_design(path)
                self.put(request_for(design), design, persist=False)

    def put(self, request: Request, design, *, persist: bool = True):
        report = verify(design)
        if not report.valid:
            raise VerificationFailed(f"{request}: design fails verification ({report.summary()})", report)
        if not satisfies(design, request):
            raise VerificationFailed(f"design does not match request {request}")
        self.entries[request] = design
        if persist and self.directory is not None:
            from .fileformat import write_design

            self.directory.mkdir(parents=True, exist_ok=True)
            path = self.directory / file_name(request)
            write_design(design, path, sizes=request.sizes)
            return path
        return None

    def get(self, request: Request):
        return self.entries.get(request)

    def __contains__(self, request):
        return request in self.entries

    def __len__(self):
        return len(self.entries)


def registry_put(registry: Registry, request: Request, design):
    return registry.put(request, design)


def registry_get(registry: Registry, request: Request):
    return registry.get(request)


# --------------------------------------------------------------------------
# algebraic generators


def _pbd_route(req: PBDRequest):
    """A zero-argument builder for the request, or None when no generator applies."""
    v, K = req.v, req.sizes
    if v == 1:
        return lambda: PBDesign(1, [], K)
    if v in K:
        return lambda: PBDesign(v, [tuple(range(v))], K)
    if 3 in K and v % 6 in (1, 3):
        return lambda: algebra.steiner_triple_system(v)
    for k in sorted(K):
        q = k - 1
        if q * q + q + 1 == v and algebra.prime_power(q):
            return lambda: algebra.projective_plane(q)
    for q in sorted(K):
        if algebra.prime_power(q):
            d, size = 1, q
            while size < v:
                size *= q
                d += 1
            if size == v:
                return lambda: algebra.affine_space(q, d)
    if 2 in K:
        return lambda: PBDesign(v, [(a, b) for a in range(v) for b in range(a + 1, v)], K)
    return None


class IngredientProvider:
    """Resolve ingredient requests: registry entry, then generator, then missing.

    Results are memoized per request so repeated block replacement reuses
    one ingredient design.  A PBD or GDD whose block sizes form a subset of
    the requested sizes satisfies the request.
    """

    def __init__(self, registry: Registry | None = None, generators: bool = True):
        self.registry = registry if registry is not None else Registry()
        self.generators = generators
        self._memo: dict[Request, object] = {}

    def _from_registry(self, req: Request):
        hit = self.registry.get(req)
        if hit is not None:
            return hit
        for key in sorted(self.registry.entries, key=str):
            if type(key) is type(req) and key.sizes <= req.sizes:
                if (isinstance(req, PBDRequest) and key.v == req.v) or (
                        isinstance(req, GDDRequest) and key.type == req.type):
                    return self.registry.entries[key]
        return None

    def _gdd_route(self, req: GDDRequest):
        t = req.type
        if not t:
            return None
        if all(g == 1 for g in t):
            sub = PBDRequest(len(t), req.sizes)
            if not self.available(sub):
                return None
            return lambda: pbd_as_gdd(self.resolve(sub))
        n, k = t[0], len(t)
        if all(g == n for g in t) and k in req.sizes and algebra.prime_power(n) and k <= n + 1:
            return lambda: algebra.transversal_design(k, n)
        return None

    def _route(self, req: Request):
        if not self.generators:
            return None
        return _pbd_route(req) if isinstance(req, PBDRequest) else self._gdd_route(req)

    def available(self, req: Request) -> bool:
        """Whether ``req`` would resolve, without building anything."""
        return req in self._memo or self._from_registry(req) is not None or self._route(req) is not None

    def find(self, req: Request):
        if req in self._memo:
            return self._memo[req]
        design = self._from_registry(req)
        if design is None:
            route = self._route(req)
            design = route() if route is not None else None
        if design is not None:
            self._memo[req] = design
        return design

    def resolve(self, req: Request):
        design = self.find(req)
        if design is None:
            raise MissingIngredient(req)
        return design

    def pbd(self, v: int, K: Iterable[int]):
        return self.resolve(PBDRequest(v, K))

    def gdd(self, K: Iterable[int], group_sizes: Iterable[int]):
        return self.resolve(GDDRequest(K, group_sizes))
