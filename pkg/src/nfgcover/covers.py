"""Finite covers of a graph: construction, enumeration, sampling, averages.

An M-cover takes M copies of every factor and connects the edge copies
according to one permutation per base edge.  The canonical edge orientation
is (earlier factor in file order, then earlier slot): copy ``i`` of the
first endpoint joins copy ``perm[i]`` of the second endpoint.  The identity
permutation on every edge gives M disjoint copies of the base graph.

The degree-M average treats all (M!)^|E| labeled permutation assignments as
equally likely; its M-th root is the degree-M approximation that sits
between the partition sum (M=1) and the variational limit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    EnumerationCapExceeded,
    HalfEdgePresent,
    InvalidGraph,
    MalformedPermutation,
    NotLogSupermodular,
    WrongCardinality,
)
from .graph import Edge, Factor, Nfg, is_log_supermodular, validate
from .partition import DEFAULT_ENUMERATION_CAP, partition_sum
from .tolerances import REL_TOL


@dataclass(frozen=True)
class CoverSpec:
    """Cover degree M plus one image array per full edge."""

    M: int
    perms: dict[str, tuple[int, ...]]

    def crossed_edges(self) -> tuple[str, ...]:
        """Edges whose permutation is not the identity (any M)."""
        return tuple(e for e, p in self.perms.items() if any(p[i] != i for i in range(len(p))))


@dataclass(frozen=True)
class BetheMEstimate:
    M: int
    value: float
    mode: str  # "exact" | "monte-carlo"
    samples: int
    stderr: float | None = None
    seed: int | None = None


@dataclass(frozen=True)
class RuozziReport:
    """Outcome of the cover-sum inequality check Z(cover) <= Z^M."""

    M: int
    mode: str
    z_base: float
    covers_checked: int
    max_ratio: float
    violations: tuple[tuple[str, float], ...]
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def _require_no_half_edges(nfg: Nfg) -> None:
    if nfg.has_half_edges():
        raise HalfEdgePresent(f"graph {nfg.name!r} has half edges")


def _check_spec(nfg: Nfg, spec: CoverSpec) -> None:
    if spec.M < 1:
        raise MalformedPermutation(f"cover degree must be >= 1, got {spec.M}")
    edge_ids = {e.id for e in nfg.edges}
    if set(spec.perms) != edge_ids:
        missing = edge_ids - set(spec.perms)
        extra = set(spec.perms) - edge_ids
        raise MalformedPermutation(f"edge mismatch: missing {missing}, extra {extra}")
    for eid, perm in spec.perms.items():
        if sorted(perm) != list(range(spec.M)):
            raise MalformedPermutation(f"edge {eid!r}: {perm} is not a bijection of 0..{spec.M - 1}")


def trivial_cover(nfg: Nfg, M: int) -> CoverSpec:
    """Identity permutation on every edge: M disjoint copies."""
    _require_no_half_edges(nfg)
    ident = tuple(range(M))
    return CoverSpec(M=M, perms={e.id: ident for e in nfg.edges})


def cover_edge_id(eid: str, copy: int) -> str:
    return f"{eid}~{copy}"


def cover_factor_id(fid: str, copy: int) -> str:
    return f"{fid}~{copy}"


def build_cover(nfg: Nfg, spec: CoverSpec) -> Nfg:
    """Materialize the cover described by ``spec`` as a plain graph."""
    diags = validate(nfg)
    if diags:
        raise InvalidGraph(diags)
    _require_no_half_edges(nfg)
    _check_spec(nfg, spec)
    M = spec.M

    endpoints = nfg.endpoints()
    args: list[list[list[str | None]]] = [
        [[None] * f.degree for _ in range(M)] for f in nfg.factors
    ]
    for e in nfg.edges:
        (f1, s1), (f2, s2) = endpoints[e.id]
        perm = spec.perms[e.id]
        for i in range(M):
            args[f1][i][s1] = cover_edge_id(e.id, i)
            args[f2][perm[i]][s2] = cover_edge_id(e.id, i)

    edges = tuple(
        Edge(id=cover_edge_id(e.id, i), cardinality=e.cardinality, half=False)
        for e in nfg.edges
        for i in range(M)
    )
    factors = tuple(
        Factor(cover_factor_id(f.id, i), tuple(args[fi][i]), f.table)
        for fi, f in enumerate(nfg.factors)
        for i in range(M)
    )
    return Nfg(name=f"{nfg.name}^{M}cover", edges=edges, factors=factors, signed=nfg.signed)


def double_cover_from_mask(nfg: Nfg, mask: int) -> CoverSpec:
    """Double cover with edge i of file order crossed iff bit i of mask is set."""
    _require_no_half_edges(nfg)
    perms = {}
    for i, e in enumerate(nfg.edges):
        perms[e.id] = (1, 0) if (mask >> i) & 1 else (0, 1)
    return CoverSpec(M=2, perms=perms)


def cover_mask(nfg: Nfg, spec: CoverSpec) -> int:
    """Inverse of ``double_cover_from_mask``."""
    mask = 0
    for i, e in enumerate(nfg.edges):
        if spec.perms[e.id] == (1, 0):
            mask |= 1 << i
    return mask


def enumerate_double_covers(
    nfg: Nfg, *, enumeration_cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[CoverSpec]:
    """All 2^|E| labeled double covers, in increasing crossed-mask order."""
    _require_no_half_edges(nfg)
    n = len(nfg.edges)
    if 2**n > enumeration_cap:
        raise EnumerationCapExceeded(f"2^{n} double covers exceed cap {enumeration_cap}")
    for mask in range(2**n):
        yield double_cover_from_mask(nfg, mask)


def sample_cover(nfg: Nfg, M: int, seed: int) -> CoverSpec:
    """One labeled M-cover drawn uniformly: independent Fisher-Yates shuffle
    per edge from a deterministic seeded generator."""
    _require_no_half_edges(nfg)
    rng = np.random.default_rng(seed)
    perms = {e.id: tuple(int(x) for x in rng.permutation(M)) for e in nfg.edges}
    return CoverSpec(M=M, perms=perms)


def _all_cover_specs(nfg: Nfg, M: int) -> Iterator[CoverSpec]:
    """All (M!)^|E| labeled covers in lexicographic permutation order."""
    perms = list(itertools.permutations(range(M)))
    edge_ids = [e.id for e in nfg.edges]
    for assignment in itertools.product(perms, repeat=len(edge_ids)):
        yield CoverSpec(M=M, perms=dict(zip(edge_ids, assignment)))


def _sampled_cover_specs(nfg: Nfg, M: int, samples: int, seed: int) -> Iterator[CoverSpec]:
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        yield CoverSpec(
            M=M,
            perms={e.id: tuple(int(x) for x in rng.permutation(M)) for e in nfg.edges},
        )


def bethe_m(
    nfg: Nfg,
    M: int,
    mode: str = "exact",
    samples: int = 0,
    seed: int = 0,
    *,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> BetheMEstimate:
    """Degree-M average: M-th root of the mean cover partition sum.

    Exact mode averages over all (M!)^|E| labeled covers.  Monte-Carlo mode
    uses a seeded sample mean; the reported stderr is the delta-method
    propagation of the mean's standard error through the M-th root (an
    estimate, not a bound).
    """
    _require_no_half_edges(nfg)
    if mode == "exact":
        n_covers = math.factorial(M) ** len(nfg.edges)
        if n_covers > enumeration_cap:
            raise EnumerationCapExceeded(
                f"({M}!)^{len(nfg.edges)} = {n_covers} covers exceed cap {enumeration_cap}"
            )
        mean = math.fsum(
            partition_sum(build_cover(nfg, s), enumeration_cap=enumeration_cap)
            for s in _all_cover_specs(nfg, M)
        ) / n_covers
        return BetheMEstimate(M=M, value=mean ** (1.0 / M), mode="exact", samples=n_covers)
    if mode == "monte-carlo":
        if samples < 2:
            raise ValueError("monte-carlo mode needs samples >= 2")
        zs = [
            partition_sum(build_cover(nfg, s), enumeration_cap=enumeration_cap)
            for s in _sampled_cover_specs(nfg, M, samples, seed)
        ]
        arr = np.asarray(zs)
        mean = float(arr.mean())
        se_mean = float(arr.std(ddof=1) / math.sqrt(samples))
        value = mean ** (1.0 / M) if mean > 0 else 0.0
        stderr = se_mean * (1.0 / M) * mean ** (1.0 / M - 1.0) if mean > 0 else math.inf
        return BetheMEstimate(
            M=M, value=value, mode="monte-carlo", samples=samples, stderr=stderr, seed=seed
        )
    raise ValueError(f"unknown mode {mode!r}")


def check_ruozzi(
    nfg: Nfg,
    M: int,
    mode: str = "exact",
    samples: int = 0,
    seed: int = 0,
    *,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    rel_tol: float = REL_TOL,
) -> RuozziReport:
    """Verify Z(cover) <= Z^M over enumerated or sampled M-covers.

    The inequality holds for every cover of a binary log-supermodular graph,
    so the expected violation list is empty; the report also carries the
    worst ratio Z(cover)/Z^M observed (the trivial cover attains 1).
    """
    _require_no_half_edges(nfg)
    if not nfg.is_binary():
        raise WrongCardinality("cover-sum inequality check needs binary edges")
    for f in nfg.factors:
        if not is_log_supermodular(f.table):
            raise NotLogSupermodular(f"factor {f.id!r} is not log-supermodular")

    z = partition_sum(nfg, enumeration_cap=enumeration_cap)
    bound = z**M
    if mode == "exact":
        n_covers = math.factorial(M) ** len(nfg.edges)
        if n_covers > enumeration_cap:
            raise EnumerationCapExceeded(
                f"({M}!)^{len(nfg.edges)} = {n_covers} covers exceed cap {enumeration_cap}"
            )
        specs = _all_cover_specs(nfg, M)
        label = "cover"
        used_seed = None
    elif mode == "monte-carlo":
        if samples < 1:
            raise ValueError("monte-carlo mode needs samples >= 1")
        specs = _sampled_cover_specs(nfg, M, samples, seed)
        label = "sample"
        used_seed = seed
    else:
        raise ValueError(f"unknown mode {mode!r}")

    checked = 0
    max_ratio = -math.inf
    violations: list[tuple[str, float]] = []
    for i, spec in enumerate(specs):
        zc = partition_sum(build_cover(nfg, spec), enumeration_cap=enumeration_cap)
        ratio = zc / bound if bound > 0 else (math.inf if zc > 0 else 1.0)
        max_ratio = max(max_ratio, ratio)
        if zc > bound * (1.0 + rel_tol):
            violations.append((f"{label}{i}", zc))
        checked += 1
    return RuozziReport(
        M=M,
        mode=mode,
        z_base=z,
        covers_checked=checked,
        max_ratio=max_ratio,
        violations=tuple(violations),
        seed=used_seed,
    )
