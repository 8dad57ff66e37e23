"""Pair-alphabet transform of merged double covers and its closed forms.

The transform contracts a fixed symmetric, self-inverse 4x4 matrix onto
every pair-alphabet axis.  The matrix fixes the symbols (0,0) and (1,1)
and rotates the span of (0,1),(1,0) by the 2x2 Hadamard/sqrt(2), so a
crossing coupling becomes the diagonal gate diag(1,1,-1,1) and the
averaged coupling becomes diag(1,1,0,1).  Applying the transform to a
merged graph leaves the partition sum unchanged while concentrating all
sign information in those gates: for log-supermodular factors of degree
2 or 3 (and equality factors of any degree) the transformed tables are
entrywise non-negative, which is what drives the cover-sum inequality
Z(cover) <= Z(base)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassViolation,
    NegativePartitionSum,
    NotLogSupermodular,
    NotMergedCover,
    WrongArity,
    WrongCardinality,
)
from .graph import (
    Edge,
    Factor,
    Nfg,
    det_of,
    is_equality_factor,
    is_log_supermodular,
    perm_of,
)
from .covers import CoverSpec, _check_spec, _require_no_half_edges
from .mdc import ConstructionMap, pair_merge
from .partition import (
    DEFAULT_ENUMERATION_CAP,
    config_digits,
    global_values,
    partition_sum,
)
from .tolerances import ABS_TOL, INEQ_SLACK, REL_TOL

_R = 1.0 / math.sqrt(2.0)

#: symmetric, self-inverse transform on the pair alphabet
PAIR_TRANSFORM = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, _R, _R, 0.0],
        [0.0, _R, -_R, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)
PAIR_TRANSFORM.setflags(write=False)

GAMMA = _R


def transform_tensor(t: np.ndarray) -> np.ndarray:
    """Contract the pair transform onto every axis (an involution)."""
    t = np.asarray(t, dtype=np.float64)
    if any(s != 4 for s in t.shape):
        raise WrongCardinality(f"table shape {t.shape} is not all-pair-alphabet")
    out = t
    for ax in range(t.ndim):
        out = np.moveaxis(np.tensordot(PAIR_TRANSFORM, out, axes=(1, ax)), 0, ax)
    return np.ascontiguousarray(out)


def edge_gate(p0: float, p1: float) -> np.ndarray:
    """Diagonal of the transformed per-edge gate for switch weights (p0, p1).

    Boxing the coupling factor, its two transform nodes and the switch
    factor gives p0 * I + p1 * diag(1,1,-1,1); for the normalized weights
    used here (p0 + p1 = 1) that is diag(1, 1, p0 - p1, 1).
    """
    if p0 < 0 or p1 < 0:
        raise ValueError("switch weights must be non-negative")
    s = p0 + p1
    return np.array([s, s, p0 - p1, s])


@dataclass(frozen=True)
class TransformMap:
    """Provenance from base elements to transformed-graph elements."""

    factor_map: dict[str, str]
    gate_map: dict[str, str]
    pair_edge_map: dict[str, tuple[str, str]]


def transform_mdc(merged: Nfg, cmap: ConstructionMap) -> tuple[Nfg, TransformMap]:
    """Transform a merged double cover: same partition sum, signed tables.

    Every merged factor is replaced by its transformed table; every
    (coupling, switch edge, switch factor) cluster collapses to one
    degree-2 diagonal gate between the two pair edges.
    """
    factors_by_id = {f.id: f for f in merged.factors}
    edges_by_id = {e.id: e for e in merged.edges}

    def _missing(kind: str, name: str):
        return NotMergedCover(f"construction map names unknown {kind} {name!r}")

    new_factors: list[Factor] = []
    for base_fid, merged_fid in cmap.factor_map.items():
        f = factors_by_id.get(merged_fid)
        if f is None:
            raise _missing("factor", merged_fid)
        new_factors.append(Factor(f.id, f.args, transform_tensor(f.table)))

    keep_edges: list[Edge] = []
    for base_eid, (pe_a, pe_b) in cmap.pair_edge_map.items():
        for pe in (pe_a, pe_b):
            e = edges_by_id.get(pe)
            if e is None:
                raise _missing("edge", pe)
            if e.cardinality != 4:
                raise NotMergedCover(f"pair edge {pe!r} has cardinality {e.cardinality}")
            keep_edges.append(e)

    gate_map: dict[str, str] = {}
    for base_eid, (coupling_id, switch_eid, switch_fid) in cmap.edge_function_map.items():
        coupling = factors_by_id.get(coupling_id)
        switch = factors_by_id.get(switch_fid)
        if coupling is None or switch is None:
            raise _missing("factor", coupling_id if coupling is None else switch_fid)
        pe_a, pe_b = cmap.pair_edge_map[base_eid]
        if coupling.args != (pe_a, pe_b, switch_eid):
            raise NotMergedCover(
                f"coupling {coupling_id!r} args {coupling.args} do not match "
                f"({pe_a!r}, {pe_b!r}, {switch_eid!r})"
            )
        if switch.args != (switch_eid,):
            raise NotMergedCover(f"switch factor {switch_fid!r} is not on {switch_eid!r}")
        p0, p1 = float(switch.table[0]), float(switch.table[1])
        gate_id = f"{base_eid}~gate"
        gate_map[base_eid] = gate_id
        new_factors.append(Factor(gate_id, (pe_a, pe_b), np.diag(edge_gate(p0, p1))))

    transformed = Nfg(
        name=f"{merged.name}~t",
        edges=tuple(keep_edges),
        factors=tuple(new_factors),
        signed=True,
    )
    tmap = TransformMap(
        factor_map=dict(cmap.factor_map),
        gate_map=gate_map,
        pair_edge_map=dict(cmap.pair_edge_map),
    )
    return transformed, tmap


def bethe2_via_transform(
    nfg: Nfg, *, enumeration_cap: int = DEFAULT_ENUMERATION_CAP
) -> float:
    """Degree-2 average from a single graph: sqrt of the averaged transform's sum.

    The averaged transformed sum is a mean of cover partition sums, hence
    non-negative; a substantially negative value signals a construction or
    numerical fault and raises.
    """
    from .mdc import build_averaged_mdc

    merged, cmap = build_averaged_mdc(nfg)
    transformed, _ = transform_mdc(merged, cmap)
    z = partition_sum(transformed, enumeration_cap=enumeration_cap)
    if z < -ABS_TOL:
        raise NegativePartitionSum(f"averaged transformed sum is {z}")
    return math.sqrt(max(z, 0.0))


def conditional_matrix(t: np.ndarray, axis: int, value: int) -> np.ndarray:
    """2x2 value matrix of a degree-3 binary table with one argument pinned."""
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (2, 2, 2):
        raise WrongArity(f"need a binary degree-3 table, got shape {t.shape}")
    return np.take(t, value, axis=axis)


def closed_form_degree2(t: np.ndarray) -> np.ndarray:
    """Transformed table of a binary degree-2 factor, written out directly.

    Corner block: squared corner values; middle row/column: sqrt(2)-weighted
    products; center: permanent of the value matrix; (2,2): its determinant.
    Agrees with ``transform_tensor(pair_merge(t))`` to float accuracy.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (2, 2):
        raise WrongArity(f"need a binary degree-2 table, got shape {t.shape}")
    r2 = math.sqrt(2.0)
    t00, t01, t10, t11 = t[0, 0], t[0, 1], t[1, 0], t[1, 1]
    return np.array(
        [
            [t00 * t00, r2 * t00 * t01, 0.0, t01 * t01],
            [r2 * t00 * t10, perm_of(t), 0.0, r2 * t01 * t11],
            [0.0, 0.0, det_of(t), 0.0],
            [t10 * t10, r2 * t10 * t11, 0.0, t11 * t11],
        ]
    )


def closed_form_degree3(t: np.ndarray) -> np.ndarray:
    """Transformed table of a binary degree-3 factor.

    The general transform of the merged table is authoritative here; the
    published closed-form array is handled separately by
    ``degree3_printed_cells`` / ``verify_degree3_printed`` because two of
    its printed cells are unreliable.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (2, 2, 2):
        raise WrongArity(f"need a binary degree-3 table, got shape {t.shape}")
    return transform_tensor(pair_merge(t))


def pair_products(t: np.ndarray) -> tuple[float, float, float, float]:
    """The four antipodal products of a degree-3 table, scaled by gamma.

    s0 = g*t000*t111, s1 = g*t100*t011, s2 = g*t010*t101, s3 = g*t001*t110
    with g = 1/sqrt(2).  For log-supermodular tables s0 dominates s1, s2,
    s3 and s0*s1 >= s2*s3, which makes all four signed combinations
    s0 +- s1 -+ s2 -+ s3 appearing in the transform non-negative.
    """
    t = np.asarray(t, dtype=np.float64)
    s0 = GAMMA * float(t[0, 0, 0] * t[1, 1, 1])
    s1 = GAMMA * float(t[1, 0, 0] * t[0, 1, 1])
    s2 = GAMMA * float(t[0, 1, 0] * t[1, 0, 1])
    s3 = GAMMA * float(t[0, 0, 1] * t[1, 1, 0])
    return s0, s1, s2, s3


@dataclass(frozen=True)
class PrintedCell:
    """One cell of the published degree-3 closed-form array.

    ``corrected`` is None for cells whose published formula is unambiguous;
    for the flagged cells it carries the pattern-consistent alternative.
    """

    index: tuple[int, int, int]
    printed: float
    corrected: float | None = None


def degree3_printed_cells(t: np.ndarray) -> list[PrintedCell]:
    """Evaluate every cell of the published degree-3 array for table ``t``.

    The array is indexed (p1, p2, p3); its four published 4x4 blocks are the
    slices over the third index.  Slices 0 and 3 are the degree-2 closed
    forms of the table with the third argument pinned.  Three cells are
    flagged with an alternative reading:

    * (1,1,1): the published formula's last product breaks the symmetry of
      its three siblings; the alternative uses the antipodal product.
    * (2,0,2) and (2,3,2): published with the same first-argument
      conditioning as (0,2,2); the slice pattern of the outer blocks
      suggests second-argument conditionings instead.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (2, 2, 2):
        raise WrongArity(f"need a binary degree-3 table, got shape {t.shape}")
    r2 = math.sqrt(2.0)
    g = GAMMA

    def tv(a, b, c) -> float:
        return float(t[a, b, c])

    cond = conditional_matrix
    P = tv(0, 0, 0) * tv(1, 1, 1)
    Q = tv(1, 0, 0) * tv(0, 1, 1)
    R = tv(0, 1, 0) * tv(1, 0, 1)
    S = tv(0, 0, 1) * tv(1, 1, 0)

    cells: list[PrintedCell] = []
    arr = np.zeros((4, 4, 4))

    arr[:, :, 0] = closed_form_degree2(cond(t, 2, 0))
    arr[:, :, 3] = closed_form_degree2(cond(t, 2, 1))

    # middle slice p3 = 1
    arr[0, 0, 1] = r2 * tv(0, 0, 0) * tv(0, 0, 1)
    arr[0, 1, 1] = perm_of(cond(t, 0, 0))
    arr[0, 3, 1] = r2 * tv(0, 1, 0) * tv(0, 1, 1)
    arr[1, 0, 1] = perm_of(cond(t, 1, 0))
    arr[1, 3, 1] = perm_of(cond(t, 1, 1))
    arr[2, 2, 1] = g * (P - Q - R + S)
    arr[3, 0, 1] = r2 * tv(1, 0, 0) * tv(1, 0, 1)
    arr[3, 1, 1] = perm_of(cond(t, 0, 1))
    arr[3, 3, 1] = r2 * tv(1, 1, 0) * tv(1, 1, 1)

    # middle slice p3 = 2
    arr[0, 2, 2] = det_of(cond(t, 0, 0))
    arr[1, 2, 2] = g * (P + Q - R - S)
    arr[2, 1, 2] = g * (P - Q + R - S)
    arr[3, 2, 2] = det_of(cond(t, 0, 1))

    flagged = {
        (1, 1, 1): (g * (P + Q + R + tv(0, 0, 0) * tv(1, 1, 0)), g * (P + Q + R + S)),
        (2, 0, 2): (det_of(cond(t, 0, 0)), det_of(cond(t, 1, 0))),
        (2, 3, 2): (det_of(cond(t, 0, 0)), det_of(cond(t, 1, 1))),
    }

    for p1 in range(4):
        for p2 in range(4):
            for p3 in range(4):
                idx = (p1, p2, p3)
                if idx in flagged:
                    printed, corrected = flagged[idx]
                    cells.append(PrintedCell(idx, printed, corrected))
                else:
                    cells.append(PrintedCell(idx, float(arr[idx])))
    return cells


@dataclass(frozen=True)
class Degree3PrintReport:
    """Published degree-3 array vs the general transform, for one table."""

    checked: int
    max_abs_err: float
    mismatches: tuple[tuple[int, int, int], ...]
    resolutions: tuple[tuple[tuple[int, int, int], str], ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_degree3_printed(t: np.ndarray, atol: float = 1e-12) -> Degree3PrintReport:
    """Compare the published array against the general transform.

    Unambiguous cells must match within ``atol``.  Each flagged cell is
    resolved to 'printed', 'corrected', 'both' (formulas coincide on this
    table) or 'neither'.
    """
    general = closed_form_degree3(t)
    mismatches: list[tuple[int, int, int]] = []
    resolutions: list[tuple[tuple[int, int, int], str]] = []
    checked = 0
    max_err = 0.0
    for cell in degree3_printed_cells(t):
        truth = float(general[cell.index])
        if cell.corrected is None:
            checked += 1
            err = abs(cell.printed - truth)
            max_err = max(max_err, err)
            if err > atol:
                mismatches.append(cell.index)
        else:
            hit_printed = abs(cell.printed - truth) <= atol
            hit_corrected = abs(cell.corrected - truth) <= atol
            verdict = {
                (True, True): "both",
                (True, False): "printed",
                (False, True): "corrected",
                (False, False): "neither",
            }[(hit_printed, hit_corrected)]
            resolutions.append((cell.index, verdict))
    return Degree3PrintReport(
        checked=checked,
        max_abs_err=max_err,
        mismatches=tuple(mismatches),
        resolutions=tuple(resolutions),
    )


def closed_form_equality(d: int) -> np.ndarray:
    """Transformed table of a merged equality factor with d >= 2 arguments.

    Value 1 at all-index-0 and all-index-3; value 2^(1-d/2) where every
    index lies in {1, 2} and the number of index-2 arguments is even;
    0 elsewhere.
    """
    if d < 2:
        raise WrongArity(f"equality closed form needs degree >= 2, got {d}")
    out = np.zeros((4,) * d)
    out[(0,) * d] = 1.0
    out[(3,) * d] = 1.0
    mid = 2.0 ** (1.0 - d / 2.0)
    for bits in range(2**d):
        if bin(bits).count("1") % 2 == 0:
            idx = tuple(2 if (bits >> i) & 1 else 1 for i in range(d))
            out[idx] = mid
    return out


def check_nonnegative_transform(
    t: np.ndarray, *, require_lsm: bool = True, slack: float = INEQ_SLACK
) -> tuple[bool, float]:
    """Is the transformed merged table entrywise non-negative?

    Expected to hold for log-supermodular tables of degree 2 or 3.  Pass
    ``require_lsm=False`` to probe tables outside that class (the check
    then typically fails, e.g. on log-submodular tables whose determinant
    cell is negative).  Returns (verdict, minimum entry).
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim not in (2, 3):
        raise WrongArity(f"need degree 2 or 3, got degree {t.ndim}")
    if any(s != 2 for s in t.shape):
        raise WrongCardinality(f"table shape {t.shape} is not all-binary")
    if require_lsm and not is_log_supermodular(t):
        raise NotLogSupermodular("table is not log-supermodular")
    th = transform_tensor(pair_merge(t))
    mn = float(th.min())
    mx = float(th.max())
    return (mn >= -slack * max(mx, 1.0), mn)


def transformed_pair_graph(nfg: Nfg, crossed: tuple[str, ...] = ()) -> Nfg:
    """Transformed double cover collapsed onto one pair symbol per base edge.

    The per-edge gates are diagonal, so configurations assigning different
    symbols to an edge's two pair edges contribute zero; enumerating one
    symbol per base edge reproduces every nonzero term of the transformed
    graph.  Uncrossed gates are identity and drop out; each crossed edge's
    diag(1,1,-1,1) is boxed into its first endpoint's transformed table,
    which flips signs without changing any magnitude.
    """
    endpoints = nfg.endpoints()
    tables = [transform_tensor(pair_merge(f.table)) for f in nfg.factors]
    cross_gate = np.array([1.0, 1.0, -1.0, 1.0])
    for eid in crossed:
        fi, si = endpoints[eid][0]
        shape = [1] * tables[fi].ndim
        shape[si] = 4
        tables[fi] = tables[fi] * cross_gate.reshape(shape)
    edges = tuple(Edge(e.id, 4) for e in nfg.edges)
    factors = tuple(
        Factor(f"{f.id}~pair", f.args, tables[fi]) for fi, f in enumerate(nfg.factors)
    )
    return Nfg(name=f"{nfg.name}~pairs", edges=edges, factors=factors, signed=True)


@dataclass(frozen=True)
class SignStructureReport:
    """Per-configuration sign audit of a transformed double cover."""

    n_configs: int
    violations: tuple[tuple[str, int], ...]  # (check name, config index)
    min_trivial: float
    z_cover: float
    z_base_squared: float
    inequality_ok: bool
    identity_ok: bool

    @property
    def ok(self) -> bool:
        return not self.violations and self.inequality_ok and self.identity_ok


def check_sign_structure(
    nfg: Nfg,
    spec: CoverSpec,
    *,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    rel_tol: float = REL_TOL,
    slack: float = INEQ_SLACK,
) -> SignStructureReport:
    """Audit the transformed double cover against its trivial counterpart.

    Enumerates all pair-alphabet configurations of the collapsed
    transformed graphs and verifies, per configuration: the trivial
    graph's global value is non-negative; the cover's global value has
    equal magnitude; and its sign is (-1)^(number of crossed edges whose
    symbol is index 2).  Summing both sides yields Z(cover) <= Z(base)^2,
    which is cross-checked against direct enumeration of the cover.
    """
    from .covers import build_cover

    if spec.M != 2:
        raise MalformedPermutation(f"sign audit needs a double cover, got M={spec.M}")
    _check_spec(nfg, spec)
    _require_no_half_edges(nfg)
    if not nfg.is_binary():
        raise WrongCardinality("sign audit needs binary edges")
    for f in nfg.factors:
        if not is_equality_factor(f) and f.degree not in (2, 3):
            raise ClassViolation(
                f"factor {f.id!r} has degree {f.degree} and is not an equality factor"
            )
        if not is_log_supermodular(f.table):
            raise NotLogSupermodular(f"factor {f.id!r} is not log-supermodular")

    crossed = spec.crossed_edges()
    graph_cover = transformed_pair_graph(nfg, crossed)
    graph_trivial = transformed_pair_graph(nfg, ())

    g = global_values(graph_cover, enumeration_cap=enumeration_cap)
    g0 = global_values(graph_trivial, enumeration_cap=enumeration_cap)
    digits = config_digits(graph_trivial)

    scale = float(np.abs(g0).max()) if g0.size else 1.0
    tol = slack * max(scale, 1.0)

    edge_pos = {e.id: i for i, e in enumerate(nfg.edges)}
    parity = np.zeros(g.shape, dtype=np.int64)
    for eid in crossed:
        parity += digits[edge_pos[eid]] == 2
    signs = np.where(parity % 2 == 0, 1.0, -1.0)

    violations: list[tuple[str, int]] = []
    neg = np.nonzero(g0 < -tol)[0]
    violations.extend(("trivial-negative", int(i)) for i in neg)
    mag_err = np.abs(np.abs(g) - g0)
    bad_mag = np.nonzero(mag_err > np.maximum(tol, rel_tol * np.abs(g0)))[0]
    violations.extend(("magnitude", int(i)) for i in bad_mag)
    bad_sign = np.nonzero(np.abs(g - signs * g0) > tol)[0]
    violations.extend(("sign", int(i)) for i in bad_sign)

    z_cover = float(g.sum())
    z_sq = float(g0.sum())
    inequality_ok = z_cover <= z_sq * (1.0 + rel_tol) + tol

    z_cover_direct = partition_sum(build_cover(nfg, spec), enumeration_cap=enumeration_cap)
    z_base = partition_sum(nfg, enumeration_cap=enumeration_cap)
    identity_ok = (
        abs(z_cover - z_cover_direct) <= max(ABS_TOL, rel_tol * max(abs(z_cover), abs(z_cover_direct)))
        and abs(z_sq - z_base**2) <= max(ABS_TOL, rel_tol * max(abs(z_sq), z_base**2))
    )

    return SignStructureReport(
        n_configs=int(g.size),
        violations=tuple(violations),
        min_trivial=float(g0.min()) if g0.size else 0.0,
        z_cover=z_cover,
        z_base_squared=z_sq,
        inequality_ok=inequality_ok,
        identity_ok=identity_ok,
    )
