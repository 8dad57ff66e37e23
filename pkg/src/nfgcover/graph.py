"""Normal factor graphs: variables live on edges, local functions on nodes.

A graph is a list of edges (each carrying a finite alphabet) plus a list of
factors whose ordered argument lists name edges.  Value tables are dense
float64 arrays in row-major layout, so the first argument varies slowest and
the flat index of an assignment is the usual mixed-radix number.

Full edges must be referenced by exactly two factor argument slots (both may
sit on the same factor: self-loops are allowed); half edges by exactly one.
Base graphs carry non-negative tables; graphs produced by the pair transform
set ``signed=True`` and may hold negative values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import MissingAssignment, WrongArity, WrongCardinality
from .tolerances import INEQ_SLACK


@dataclass(frozen=True)
class Edge:
    id: str
    cardinality: int
    half: bool = False


@dataclass(frozen=True, eq=False)
class Factor:
    """A local function: ordered edge arguments plus a dense value table."""

    id: str
    args: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        # private C-order copy, frozen so factors are safe to share
        table = np.array(self.table, dtype=np.float64, order="C")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def degree(self) -> int:
        return len(self.args)


@dataclass(frozen=True, eq=False)
class Nfg:
    name: str
    edges: tuple[Edge, ...]
    factors: tuple[Factor, ...]
    signed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "factors", tuple(self.factors))

    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def cardinality(self, edge_id: str) -> int:
        for e in self.edges:
            if e.id == edge_id:
                return e.cardinality
        raise KeyError(edge_id)

    def endpoints(self) -> dict[str, list[tuple[int, int]]]:
        """Edge id -> (factor index, slot index) references, in file order.

        For a full edge the first entry is the canonical first endpoint
        (earlier factor, then earlier slot); covers and merged constructions
        rely on this order.
        """
        refs: dict[str, list[tuple[int, int]]] = {e.id: [] for e in self.edges}
        for fi, f in enumerate(self.factors):
            for si, eid in enumerate(f.args):
                if eid in refs:
                    refs[eid].append((fi, si))
        return refs

    def has_half_edges(self) -> bool:
        return any(e.half for e in self.edges)

    def is_binary(self) -> bool:
        return all(e.cardinality == 2 for e in self.edges)


def validate(nfg: Nfg) -> list[str]:
    """Check every structural invariant; returns one diagnostic per violation.

    An empty list means the graph is well formed.  Diagnostics are prefixed
    with a stable tag naming the violated invariant.
    """
    diags: list[str] = []
    seen_edges: set[str] = set()
    for e in nfg.edges:
        if e.id in seen_edges:
            diags.append(f"duplicate-id: edge {e.id!r} defined twice")
        seen_edges.add(e.id)
        if e.cardinality < 1:
            diags.append(f"bad-cardinality: edge {e.id!r} has cardinality {e.cardinality}")

    seen_factors: set[str] = set()
    refcount: dict[str, int] = {e.id: 0 for e in nfg.edges}
    for f in nfg.factors:
        if f.id in seen_factors:
            diags.append(f"duplicate-id: factor {f.id!r} defined twice")
        seen_factors.add(f.id)
        if f.table.ndim != len(f.args):
            diags.append(
                f"arity-mismatch: factor {f.id!r} has {len(f.args)} args "
                f"but a rank-{f.table.ndim} table"
            )
        for si, eid in enumerate(f.args):
            if eid not in refcount:
                diags.append(f"unknown-edge: factor {f.id!r} arg {si} names {eid!r}")
                continue
            refcount[eid] += 1
            card = next(e.cardinality for e in nfg.edges if e.id == eid)
            if si < f.table.ndim and f.table.shape[si] != card:
                diags.append(
                    f"shape-mismatch: factor {f.id!r} axis {si} has length "
                    f"{f.table.shape[si]}, edge {eid!r} has cardinality {card}"
                )
        if not np.all(np.isfinite(f.table)):
            diags.append(f"non-finite-value: factor {f.id!r} table contains nan/inf")
        if not nfg.signed and f.table.size and float(f.table.min()) < 0.0:
            diags.append(f"negative-value: factor {f.id!r} in an unsigned graph")

    for e in nfg.edges:
        want = 1 if e.half else 2
        if refcount[e.id] != want:
            diags.append(
                f"edge-reference-count: edge {e.id!r} referenced {refcount[e.id]} "
                f"times, expected {want}"
            )
    return diags


def global_function(nfg: Nfg, config: Mapping[str, int]) -> float:
    """Product of all local functions at one configuration."""
    for e in nfg.edges:
        if e.id not in config:
            raise MissingAssignment(f"configuration misses edge {e.id!r}")
    value = 1.0
    for f in nfg.factors:
        idx = tuple(config[eid] for eid in f.args)
        value *= float(f.table[idx])
    return value


def matrix_of(f: Factor) -> np.ndarray:
    """2x2 value matrix of a binary degree-2 factor (row = first argument)."""
    if f.degree != 2:
        raise WrongArity(f"factor {f.id!r} has degree {f.degree}, need 2")
    if f.table.shape != (2, 2):
        raise WrongCardinality(f"factor {f.id!r} has shape {f.table.shape}, need (2, 2)")
    return np.array(f.table, dtype=np.float64)


def det_of(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[1, 0] * m[0, 1])


def perm_of(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] + m[1, 0] * m[0, 1])


def _check_binary_table(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if any(s != 2 for s in t.shape):
        raise WrongCardinality(f"table shape {t.shape} is not all-binary")
    return t


def is_log_supermodular(t: np.ndarray, slack: float = INEQ_SLACK) -> bool:
    """f(a')f(a'') <= f(a' min a'')f(a' max a'') for all binary pairs.

    Componentwise min/max of binary assignments is bitwise AND/OR of their
    row-major flat indices, so the check runs over index pairs directly.
    Allowed slack is ``slack * max(t)**2``.
    """
    t = _check_binary_table(t)
    v = t.ravel()
    n = v.size
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    lhs = v[i] * v[j]
    rhs = v[i & j] * v[i | j]
    tol = slack * float(v.max()) ** 2 if n else 0.0
    return bool(np.all(lhs <= rhs + tol))


def is_log_submodular(t: np.ndarray, slack: float = INEQ_SLACK) -> bool:
    """Same pair check with the inequality flipped."""
    t = _check_binary_table(t)
    v = t.ravel()
    n = v.size
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    lhs = v[i] * v[j]
    rhs = v[i & j] * v[i | j]
    tol = slack * float(v.max()) ** 2 if n else 0.0
    return bool(np.all(lhs >= rhs - tol))


def equality_tensor(d: int, cardinality: int = 2) -> np.ndarray:
    """Indicator of all d arguments being equal; value 1 on the diagonal."""
    if d < 1:
        raise WrongArity(f"degree must be >= 1, got {d}")
    t = np.zeros((cardinality,) * d, dtype=np.float64)
    for s in range(cardinality):
        t[(s,) * d] = 1.0
    return t


def is_equality_factor(f: Factor) -> bool:
    """True if the factor's table is exactly an equality indicator."""
    if f.degree < 1:
        return False
    card = f.table.shape[0]
    if any(s != card for s in f.table.shape):
        return False
    return bool(np.array_equal(f.table, equality_tensor(f.degree, card)))


def make_nfg(
    name: str,
    edges: Iterable[Edge | tuple],
    factors: Iterable[Factor | tuple],
    signed: bool = False,
) -> Nfg:
    """Convenience constructor accepting (id, card[, half]) and (id, args, table)."""
    es = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
    cards = {e.id: e.cardinality for e in es}
    fs = []
    for f in factors:
        if isinstance(f, Factor):
            fs.append(f)
        else:
            fid, args, table = f
            table = np.asarray(table, dtype=np.float64)
            if table.ndim == 1 and len(args) != 1:
                table = table.reshape(tuple(cards[a] for a in args))
            fs.append(Factor(fid, tuple(args), table))
    return Nfg(name=name, edges=es, factors=tuple(fs), signed=signed)
