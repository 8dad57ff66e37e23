"""Pure-numpy enumeration kernels (fallback backend).

All kernels walk a contiguous range of configuration indices.  Edge ``i``'s
symbol in configuration ``c`` is ``(c // prod(cards[i+1:])) % cards[i]``:
the first edge in file order varies slowest, matching row-major tables.

The compiled backend in ``_fastcore.pyx`` implements the same three
functions with identical signatures and semantics.
"""

from __future__ import annotations

import numpy as np


def config_digits(cards: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Symbol matrix, shape (n_edges, stop - start), for a config range."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(cards), idx.size), dtype=np.int64)
    div = 1
    for i in range(len(cards) - 1, -1, -1):
        out[i] = (idx // div) % cards[i]
        div *= int(cards[i])
    return out


def _factor_values(values, table_offsets, slot_edges, slot_strides,
                   factor_slot_offsets, digits):
    """Yield the per-config table values of each factor, vectorized."""
    n_factors = len(table_offsets)
    for fi in range(n_factors):
        lo = factor_slot_offsets[fi]
        hi = factor_slot_offsets[fi + 1]
        flat = np.full(digits.shape[1], table_offsets[fi], dtype=np.int64)
        for s in range(lo, hi):
            flat += digits[slot_edges[s]] * slot_strides[s]
        yield values[flat]


def sum_range(values, table_offsets, slot_edges, slot_strides,
              factor_slot_offsets, cards, start, stop) -> float:
    """Sum of the global function over configurations [start, stop)."""
    if stop <= start:
        return 0.0
    digits = config_digits(cards, start, stop)
    prod = np.ones(stop - start, dtype=np.float64)
    for fv in _factor_values(values, table_offsets, slot_edges, slot_strides,
                             factor_slot_offsets, digits):
        prod *= fv
    return float(prod.sum())


def values_range(values, table_offsets, slot_edges, slot_strides,
                 factor_slot_offsets, cards, start, stop, out) -> None:
    """Write the per-configuration global function values into ``out``."""
    if stop <= start:
        return
    digits = config_digits(cards, start, stop)
    prod = np.ones(stop - start, dtype=np.float64)
    for fv in _factor_values(values, table_offsets, slot_edges, slot_strides,
                             factor_slot_offsets, digits):
        prod *= fv
    out[: stop - start] = prod


def signed_log_sum_range(values, table_offsets, slot_edges, slot_strides,
                         factor_slot_offsets, cards, start, stop) -> tuple[int, float]:
    """Signed log-domain sum over [start, stop).

    Per configuration the log-magnitudes of the factor values are added and
    the signs multiplied; the range is then reduced with a signed
    log-sum-exp.  Returns ``(sign, log|sum|)`` with sign 0 for an exact zero.
    """
    if stop <= start:
        return (0, -np.inf)
    digits = config_digits(cards, start, stop)
    n = stop - start
    logmag = np.zeros(n, dtype=np.float64)
    sign = np.ones(n, dtype=np.float64)
    with np.errstate(divide="ignore"):
        for fv in _factor_values(values, table_offsets, slot_edges, slot_strides,
                                 factor_slot_offsets, digits):
            logmag += np.log(np.abs(fv))
            sign *= np.sign(fv)
    live = sign != 0.0
    if not live.any():
        return (0, -np.inf)
    m = float(logmag[live].max())
    total = float((sign[live] * np.exp(logmag[live] - m)).sum())
    if total == 0.0:
        return (0, -np.inf)
    return (1 if total > 0 else -1, m + float(np.log(abs(total))))
