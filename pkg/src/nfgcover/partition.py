"""Exact partition sums by brute-force configuration enumeration.

This is the single oracle every other quantity in the package is checked
against: no variable elimination, just a chunked walk over the full
configuration space.  Chunks are reduced in index order, so results do not
depend on how many worker threads computed them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EnumerationCapExceeded, InvalidGraph
from .graph import Nfg, validate

DEFAULT_ENUMERATION_CAP = 2**28
CHUNK = 1 << 16


@dataclass(frozen=True)
class EnumeratedGraph:
    """Flat array view of a graph, as consumed by the kernels."""

    cards: np.ndarray
    values: np.ndarray
    table_offsets: np.ndarray
    slot_edges: np.ndarray
    slot_strides: np.ndarray
    factor_slot_offsets: np.ndarray
    n_configs: int

    def kernel_args(self) -> tuple:
        return (
            self.values,
            self.table_offsets,
            self.slot_edges,
            self.slot_strides,
            self.factor_slot_offsets,
            self.cards,
        )


def enumerated(nfg: Nfg) -> EnumeratedGraph:
    """Flatten tables and argument wiring into kernel arrays."""
    edge_index = {e.id: i for i, e in enumerate(nfg.edges)}
    cards = np.array([e.cardinality for e in nfg.edges], dtype=np.int64)

    values_parts: list[np.ndarray] = []
    table_offsets: list[int] = []
    slot_edges: list[int] = []
    slot_strides: list[int] = []
    factor_slot_offsets: list[int] = [0]
    offset = 0
    for f in nfg.factors:
        table_offsets.append(offset)
        values_parts.append(f.table.ravel())
        offset += f.table.size
        stride = f.table.size
        for si, eid in enumerate(f.args):
            stride //= f.table.shape[si]
            slot_edges.append(edge_index[eid])
            slot_strides.append(stride)
        factor_slot_offsets.append(len(slot_edges))

    n_configs = 1
    for c in cards.tolist():
        n_configs *= c
    return EnumeratedGraph(
        cards=cards,
        values=np.concatenate(values_parts) if values_parts else np.zeros(0),
        table_offsets=np.array(table_offsets, dtype=np.int64),
        slot_edges=np.array(slot_edges, dtype=np.int64),
        slot_strides=np.array(slot_strides, dtype=np.int64),
        factor_slot_offsets=np.array(factor_slot_offsets, dtype=np.int64),
        n_configs=n_configs,
    )


def _require_valid(nfg: Nfg) -> None:
    diags = validate(nfg)
    if diags:
        raise InvalidGraph(diags)


def _check_cap(n_configs: int, cap: int) -> None:
    if n_configs > cap:
        raise EnumerationCapExceeded(
            f"{n_configs} configurations exceed the enumeration cap {cap}"
        )


def _chunks(n: int, chunk: int = CHUNK):
    for start in range(0, n, chunk):
        yield start, min(start + chunk, n)


def _combine_signed_logs(parts: list[tuple[int, float]]) -> tuple[int, float]:
    sign, logmag = 0, -math.inf
    for s, l in parts:
        if s == 0:
            continue
        if sign == 0:
            sign, logmag = s, l
            continue
        m = max(logmag, l)
        total = sign * math.exp(logmag - m) + s * math.exp(l - m)
        if total == 0.0:
            sign, logmag = 0, -math.inf
        else:
            sign = 1 if total > 0 else -1
            logmag = m + math.log(abs(total))
    return sign, logmag


def partition_sum(
    nfg: Nfg,
    *,
    log_domain: bool = False,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    threads: int = 1,
):
    """Sum of the global function over all configurations.

    Returns a float, or ``(sign, log|Z|)`` when ``log_domain`` is set; the
    log-domain path accumulates log-magnitudes with explicit sign tracking,
    which is required for signed (transformed) graphs with huge summands.
    Half-edge variables are summed like any other.
    """
    _require_valid(nfg)
    eg = enumerated(nfg)
    _check_cap(eg.n_configs, enumeration_cap)
    args = eg.kernel_args()

    if log_domain:
        fn = kernels.signed_log_sum_range
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda r: fn(*args, r[0], r[1]), _chunks(eg.n_configs)))
        else:
            parts = [fn(*args, a, b) for a, b in _chunks(eg.n_configs)]
        return _combine_signed_logs(parts)

    fn = kernels.sum_range
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: fn(*args, r[0], r[1]), _chunks(eg.n_configs)))
    else:
        parts = [fn(*args, a, b) for a, b in _chunks(eg.n_configs)]
    total = 0.0
    for p in parts:
        total += p
    return total


def global_values(
    nfg: Nfg, *, enumeration_cap: int = DEFAULT_ENUMERATION_CAP
) -> np.ndarray:
    """Global function value of every configuration, in enumeration order."""
    _require_valid(nfg)
    eg = enumerated(nfg)
    _check_cap(eg.n_configs, enumeration_cap)
    out = np.empty(eg.n_configs, dtype=np.float64)
    args = eg.kernel_args()
    for a, b in _chunks(eg.n_configs):
        kernels.values_range(*args, a, b, out[a:b])
    return out


def config_digits(nfg: Nfg) -> np.ndarray:
    """Symbol matrix (n_edges, n_configs) matching ``global_values`` order."""
    eg = enumerated(nfg)
    return kernels.config_digits(eg.cards, 0, eg.n_configs)
