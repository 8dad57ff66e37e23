"""Merging a double cover into a single graph over the pair alphabet.

Each pair of lifted factor copies is boxed into one merged factor whose
arguments range over copy pairs (first-copy bit, second-copy bit), indexed
0..3 as 2*first + second.  Each base edge contributes a degree-3 coupling
factor joining its two pair edges and a binary switch edge: at switch
symbol 0 the coupling is the identity on pairs, at symbol 1 it swaps
(0,1) and (1,0), i.e. it crosses the two copies.  A degree-1 factor pins
the switch to the cover's crossing choice, or averages both choices with
weight 1/2 each.

Valid configurations of the merged graph biject onto configurations of the
cover with equal global function value, so the partition sums agree; the
averaged variant's partition sum is the mean over all 2^|E| double covers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covers import CoverSpec, _check_spec, _require_no_half_edges
from .errors import InvalidGraph, MalformedPermutation, WrongCardinality
from .graph import Edge, Factor, Nfg, validate

#: coupling tables on (pair toward endpoint-1, pair toward endpoint-2, switch)
PAIR_KEEP = np.eye(4)
PAIR_SWAP = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)


def pair_index(first: int, second: int) -> int:
    return 2 * first + second


def pair_bits(index: int) -> tuple[int, int]:
    return index >> 1, index & 1


@dataclass(frozen=True)
class ConstructionMap:
    """Provenance from base elements to merged-graph elements."""

    factor_map: dict[str, str]
    edge_function_map: dict[str, tuple[str, str, str]]  # (coupling, switch edge, switch factor)
    pair_edge_map: dict[str, tuple[str, str]]


def pair_merge(t: np.ndarray) -> np.ndarray:
    """Product of two copies of a binary table, over the pair alphabet.

    Output index p_k = 2*a_k + b_k where a is the first copy's assignment
    and b the second's; the result has shape (4,)*degree.
    """
    t = np.asarray(t, dtype=np.float64)
    if any(s != 2 for s in t.shape):
        raise WrongCardinality(f"table shape {t.shape} is not all-binary")
    d = t.ndim
    g = np.multiply.outer(t, t)
    order = [ax for k in range(d) for ax in (k, d + k)]
    return np.ascontiguousarray(g.transpose(order).reshape((4,) * d))


def _coupling_table() -> np.ndarray:
    table = np.zeros((4, 4, 2))
    table[:, :, 0] = PAIR_KEEP
    table[:, :, 1] = PAIR_SWAP
    return table


def _build_merged(nfg: Nfg, switch_values: dict[str, tuple[float, float]], name: str):
    diags = validate(nfg)
    if diags:
        raise InvalidGraph(diags)
    _require_no_half_edges(nfg)
    if not nfg.is_binary():
        raise WrongCardinality("merged construction needs binary edges")

    endpoints = nfg.endpoints()
    pair_edge_map = {e.id: (f"{e.id}~a", f"{e.id}~b") for e in nfg.edges}
    factor_map = {f.id: f"{f.id}~pair" for f in nfg.factors}
    edge_function_map = {
        e.id: (f"{e.id}~E", f"{e.id}~s", f"{e.id}~sw") for e in nfg.edges
    }

    edges: list[Edge] = []
    for e in nfg.edges:
        pe_a, pe_b = pair_edge_map[e.id]
        edges.append(Edge(pe_a, 4))
        edges.append(Edge(pe_b, 4))
        edges.append(Edge(f"{e.id}~s", 2))

    factors: list[Factor] = []
    for fi, f in enumerate(nfg.factors):
        merged_args = []
        for si, eid in enumerate(f.args):
            side = endpoints[eid].index((fi, si))
            merged_args.append(pair_edge_map[eid][side])
        factors.append(Factor(factor_map[f.id], tuple(merged_args), pair_merge(f.table)))

    coupling = _coupling_table()
    for e in nfg.edges:
        cid, sid, swid = edge_function_map[e.id]
        pe_a, pe_b = pair_edge_map[e.id]
        factors.append(Factor(cid, (pe_a, pe_b, sid), coupling))
        factors.append(Factor(swid, (sid,), np.array(switch_values[e.id])))

    merged = Nfg(name=name, edges=tuple(edges), factors=tuple(factors), signed=False)
    return merged, ConstructionMap(
        factor_map=factor_map,
        edge_function_map=edge_function_map,
        pair_edge_map=pair_edge_map,
    )


def build_mdc(nfg: Nfg, spec: CoverSpec) -> tuple[Nfg, ConstructionMap]:
    """Merged graph of one double cover; its partition sum equals the cover's."""
    if spec.M != 2:
        raise MalformedPermutation(f"merged construction needs a double cover, got M={spec.M}")
    _check_spec(nfg, spec)
    switch = {
        e.id: ((0.0, 1.0) if spec.perms[e.id] == (1, 0) else (1.0, 0.0))
        for e in nfg.edges
    }
    return _build_merged(nfg, switch, name=f"{nfg.name}~merged")


def build_averaged_mdc(nfg: Nfg) -> tuple[Nfg, ConstructionMap]:
    """Merged graph with every switch averaged: Z = mean over all double covers."""
    switch = {e.id: (0.5, 0.5) for e in nfg.edges}
    return _build_merged(nfg, switch, name=f"{nfg.name}~merged-avg")
