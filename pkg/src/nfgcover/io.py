"""JSON and CSV interchange.

Graph files carry edges, factors, and flat row-major value tables; tables
equal to an equality indicator are stored as ``"kind": "equality"`` with no
values.  Floats are written with 17 significant digits, so saving and
reloading reproduces every table bit-exactly.  CSV emitters pin their
column schema in a versioned header comment.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .covers import CoverSpec
from .graph import Edge, Factor, Nfg, equality_tensor, is_equality_factor
from .mdc import ConstructionMap

CENSUS_CSV_HEADER = "# nfgcover-census v1: bitmask,Z,ratio_to_base_pow_M"
EQ4_CSV_HEADER = "# nfgcover-eq4 v1: bitmask,Z_cover,Z_merged,Z_transformed,max_rel_err"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps_nfg(nfg: Nfg) -> str:
    lines = ["{"]
    lines.append(f'  "name": {json.dumps(nfg.name)},')
    lines.append(f'  "signed": {json.dumps(nfg.signed)},')
    lines.append('  "edges": [')
    for i, e in enumerate(nfg.edges):
        comma = "," if i + 1 < len(nfg.edges) else ""
        lines.append(
            f'    {{"id": {json.dumps(e.id)}, "cardinality": {e.cardinality}, '
            f'"half": {json.dumps(e.half)}}}{comma}'
        )
    lines.append("  ],")
    lines.append('  "factors": [')
    for i, f in enumerate(nfg.factors):
        comma = "," if i + 1 < len(nfg.factors) else ""
        args = ", ".join(json.dumps(a) for a in f.args)
        if is_equality_factor(f):
            lines.append(
                f'    {{"id": {json.dumps(f.id)}, "args": [{args}], "kind": "equality"}}{comma}'
            )
        else:
            values = ", ".join(_fmt(v) for v in f.table.ravel())
            lines.append(
                f'    {{"id": {json.dumps(f.id)}, "args": [{args}], '
                f'"kind": "dense", "values": [{values}]}}{comma}'
            )
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_nfg(text: str) -> Nfg:
    doc = json.loads(text)
    edges = tuple(
        Edge(id=e["id"], cardinality=int(e["cardinality"]), half=bool(e.get("half", False)))
        for e in doc["edges"]
    )
    cards = {e.id: e.cardinality for e in edges}
    factors = []
    for fd in doc["factors"]:
        args = tuple(fd["args"])
        kind = fd.get("kind", "dense")
        if kind == "equality":
            card = cards[args[0]]
            if any(cards[a] != card for a in args):
                raise ValueError(f"equality factor {fd['id']!r} has mixed cardinalities")
            table = equality_tensor(len(args), card)
        elif kind == "dense":
            shape = tuple(cards[a] for a in args)
            table = np.array(fd["values"], dtype=np.float64).reshape(shape)
        else:
            raise ValueError(f"unknown factor kind {kind!r}")
        factors.append(Factor(fd["id"], args, table))
    return Nfg(
        name=doc.get("name", ""),
        edges=edges,
        factors=tuple(factors),
        signed=bool(doc.get("signed", False)),
    )


def save_nfg(nfg: Nfg, path: str | Path) -> None:
    Path(path).write_text(dumps_nfg(nfg))


def load_nfg(path: str | Path) -> Nfg:
    return loads_nfg(Path(path).read_text())


def dumps_cover(spec: CoverSpec) -> str:
    doc = {"M": spec.M, "perms": {eid: list(p) for eid, p in spec.perms.items()}}
    return json.dumps(doc, indent=2) + "\n"


def loads_cover(text: str) -> CoverSpec:
    doc = json.loads(text)
    return CoverSpec(
        M=int(doc["M"]),
        perms={eid: tuple(int(i) for i in p) for eid, p in doc["perms"].items()},
    )


def save_cover(spec: CoverSpec, path: str | Path) -> None:
    Path(path).write_text(dumps_cover(spec))


def load_cover(path: str | Path) -> CoverSpec:
    return loads_cover(Path(path).read_text())


def dumps_construction_map(cmap: ConstructionMap) -> str:
    doc = {
        "factors": cmap.factor_map,
        "edge_functions": {
            eid: {"coupling": c, "switch_edge": se, "switch_factor": sf}
            for eid, (c, se, sf) in cmap.edge_function_map.items()
        },
        "pair_edges": {eid: list(pair) for eid, pair in cmap.pair_edge_map.items()},
    }
    return json.dumps(doc, indent=2) + "\n"


def loads_construction_map(text: str) -> ConstructionMap:
    doc = json.loads(text)
    return ConstructionMap(
        factor_map=dict(doc["factors"]),
        edge_function_map={
            eid: (d["coupling"], d["switch_edge"], d["switch_factor"])
            for eid, d in doc["edge_functions"].items()
        },
        pair_edge_map={eid: tuple(pair) for eid, pair in doc["pair_edges"].items()},
    )


def save_construction_map(cmap: ConstructionMap, path: str | Path) -> None:
    Path(path).write_text(dumps_construction_map(cmap))


def load_construction_map(path: str | Path) -> ConstructionMap:
    return loads_construction_map(Path(path).read_text())


def write_census_csv(fh: IO[str], rows: Iterable[tuple[int, float, float]]) -> None:
    """Rows are (bitmask, Z, ratio to Z_base^M), ordered by bitmask."""
    fh.write(CENSUS_CSV_HEADER + "\n")
    fh.write("bitmask,Z,ratio\n")
    for mask, z, ratio in rows:
        fh.write(f"{mask},{_fmt(z)},{_fmt(ratio)}\n")


def write_eq4_csv(
    fh: IO[str], rows: Iterable[tuple[int, float, float, float, float]]
) -> None:
    """Rows are (bitmask, Z_cover, Z_merged, Z_transformed, max rel err)."""
    fh.write(EQ4_CSV_HEADER + "\n")
    fh.write("bitmask,Z_cover,Z_merged,Z_transformed,max_rel_err\n")
    for mask, zc, zm, zt, err in rows:
        fh.write(f"{mask},{_fmt(zc)},{_fmt(zm)},{_fmt(zt)},{_fmt(err)}\n")
