"""Seeded random instance families for exercising the verification suites.

Topologies place factors on graph nodes and variables on graph edges;
self-loops and parallel edges are legal.  In log-supermodular mode,
degree-2 tables are exponentials of supermodular energies (non-negative
pairwise coupling, arbitrary fields), degree-3 tables are drawn by
rejection sampling against the pair checker, nodes of degree 4 and above
become equality factors, and every emitted factor is certified before the
instance is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NotLogSupermodular,
    RejectionBudgetExhausted,
    UnrealizableTopology,
)
from .graph import Edge, Factor, Nfg, equality_tensor, is_log_supermodular

REJECTION_BUDGET = 1000


@dataclass(frozen=True)
class GeneratorSpec:
    """Seeded recipe for one random instance.

    ``strength`` bounds the log-domain couplings and fields.  With
    ``symmetric`` set, degree-2 tables take the form [a, b; b, a] with
    a = exp(J) >= b = exp(-J).  ``equality_fraction`` is the probability
    that an eligible node (degree >= 2) becomes an equality factor; nodes
    of degree >= 4 always do in log-supermodular mode.
    """

    seed: int
    topology: str = "cycle"  # cycle | ladder | random-regular | tree
    factors: int = 4
    degree: int = 3  # random-regular only
    equality_fraction: float = 0.0
    strength: float = 0.7
    symmetric: bool = False


def _topology_edges(spec: GeneratorSpec, rng) -> list[tuple[int, int]]:
    n = spec.factors
    if spec.topology == "cycle":
        if n < 1:
            raise UnrealizableTopology("cycle needs at least 1 factor")
        return [(i, (i + 1) % n) for i in range(n)]
    if spec.topology == "ladder":
        if n < 4 or n % 2:
            raise UnrealizableTopology("ladder needs an even factor count >= 4")
        k = n // 2
        rails = [(i, (i + 1) % k) for i in range(k)]
        rails += [(k + i, k + (i + 1) % k) for i in range(k)]
        rungs = [(i, k + i) for i in range(k)]
        return rails + rungs
    if spec.topology == "random-regular":
        if n < 1 or (n * spec.degree) % 2:
            raise UnrealizableTopology(
                f"{spec.degree}-regular needs an even stub count, got {n} nodes"
            )
        stubs = np.repeat(np.arange(n), spec.degree)
        rng.shuffle(stubs)
        return [(int(stubs[2 * j]), int(stubs[2 * j + 1])) for j in range(len(stubs) // 2)]
    if spec.topology == "tree":
        if n < 2:
            raise UnrealizableTopology("tree needs at least 2 factors")
        return [(int(rng.integers(0, i)), i) for i in range(1, n)]
    raise UnrealizableTopology(f"unknown topology {spec.topology!r}")


def _lsm_degree2(spec: GeneratorSpec, rng) -> np.ndarray:
    if spec.symmetric:
        j = rng.uniform(0.0, spec.strength)
        a, b = np.exp(j), np.exp(-j)
        return np.array([[a, b], [b, a]])
    j = rng.uniform(0.0, spec.strength)
    h1, h2 = rng.uniform(-spec.strength, spec.strength, 2)
    theta = np.array([[0.0, h2], [h1, j + h1 + h2]])
    return np.exp(theta)


def draw_lsm_degree3(rng, strength: float = 0.7) -> np.ndarray:
    """One random log-supermodular degree-3 table.

    Proposals are exponentials of supermodular pairwise+triple energies
    plus uniform noise; each draw is kept only if it passes the pair
    check, so rejection is rare but possible.
    """
    for _ in range(REJECTION_BUDGET):
        j12, j13, j23, j123 = rng.uniform(0.0, strength, 4)
        h = rng.uniform(-strength, strength, 3)
        noise = rng.uniform(-0.15 * strength, 0.15 * strength, (2, 2, 2))
        a = np.arange(2)
        a1 = a[:, None, None]
        a2 = a[None, :, None]
        a3 = a[None, None, :]
        theta = (
            j12 * a1 * a2
            + j13 * a1 * a3
            + j23 * a2 * a3
            + j123 * a1 * a2 * a3
            + h[0] * a1
            + h[1] * a2
            + h[2] * a3
            + noise
        )
        t = np.exp(theta)
        if is_log_supermodular(t):
            return t
    raise RejectionBudgetExhausted(
        f"no log-supermodular degree-3 draw in {REJECTION_BUDGET} tries"
    )


def _free_table(d: int, spec: GeneratorSpec, rng) -> np.ndarray:
    return np.exp(rng.uniform(-spec.strength, spec.strength, (2,) * d))


def gen_instance(spec: GeneratorSpec, lsm: bool = True) -> Nfg:
    """Build the instance described by ``spec``; deterministic in the seed."""
    rng = np.random.default_rng(spec.seed)
    pairs = _topology_edges(spec, rng)

    n = spec.factors
    slots: list[list[str]] = [[] for _ in range(n)]
    edges = []
    for ei, (u, v) in enumerate(pairs):
        eid = f"e{ei}"
        edges.append(Edge(eid, 2))
        slots[u].append(eid)
        slots[v].append(eid)

    factors = []
    for fi in range(n):
        d = len(slots[fi])
        if d == 0:
            raise UnrealizableTopology(f"factor f{fi} has no incident edges")
        eligible = d >= 2
        forced_equality = lsm and d >= 4
        use_equality = forced_equality or (
            eligible and rng.uniform() < spec.equality_fraction
        )
        if use_equality:
            table = equality_tensor(d)
        elif not lsm:
            table = _free_table(d, spec, rng)
        elif d == 1:
            table = _free_table(1, spec, rng)
        elif d == 2:
            table = _lsm_degree2(spec, rng)
        elif d == 3:
            table = draw_lsm_degree3(rng, spec.strength)
        else:
            raise UnrealizableTopology(
                f"factor f{fi} has degree {d}; draws above degree 3 need equality mode"
            )
        factors.append(Factor(f"f{fi}", tuple(slots[fi]), table))

    if lsm:
        for f in factors:
            if not is_log_supermodular(f.table):
                raise NotLogSupermodular(f"generated factor {f.id!r} failed certification")

    name = f"{spec.topology}-n{spec.factors}-s{spec.seed}"
    return Nfg(name=name, edges=tuple(edges), factors=tuple(factors))
