"""Persistent JSON formats (system, candidate, report) and graph exports."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .blocks import KINDS, BlockSystem, PartitionChoice
from .gf import FieldError, FieldSpec
from .group import GroupSpec, Subset
from .pds import PdsCandidate, SrgParams

FORMAT = "srg-forge/1"


class FormatError(ValueError):
    pass


def _dump(obj: dict, path) -> None:
    text = json.dumps(obj, indent=1, separators=(",", ": "))
    Path(path).write_text(text + "\n")


def _load(path, kind: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict) or data.get("format") != FORMAT:
        raise FormatError(f"{path}: missing or unknown format tag (want {FORMAT!r})")
    if data.get("kind") != kind:
        raise FormatError(f"{path}: expected a {kind} file, got {data.get('kind')!r}")
    return data


def group_to_list(group: GroupSpec) -> list[dict]:
    return [f.to_dict() for f in group.factors]


def group_from_list(items: list[dict]) -> GroupSpec:
    try:
        factors = [FieldSpec(int(f["p"]), int(f["d"]), f["modulus"], int(f["primitive"]))
                   for f in items]
    except (KeyError, TypeError, FieldError) as exc:
        raise FormatError(f"bad factor list: {exc}") from exc
    return GroupSpec(factors)


def subset_to_list(S: Subset) -> list[int]:
    return S.indices().tolist()


def subset_from_list(group: GroupSpec, items: list[int]) -> Subset:
    arr = np.asarray(items, dtype=np.int64)
    if arr.size and (np.any(np.diff(arr) <= 0) or arr[0] < 0 or arr[-1] >= group.order):
        raise FormatError("element indices must be strictly increasing and below |G|")
    return Subset.from_indices(group, arr)


###############################################################################
#   system files
###############################################################################

def system_to_dict(sys: BlockSystem) -> dict:
    blocks = {kind: {f"{x},{y}": subset_to_list(sys.block(kind, x, y))
                     for x in range(sys.m) for y in range(sys.m)} for kind in KINDS}
    return {
        "format": FORMAT,
        "kind": "system",
        "m": sys.m,
        "u": sys.u,
        "factors": group_to_list(sys.group),
        "provenance": sys.provenance,
        "blocks": blocks,
    }


def system_from_dict(data: dict) -> BlockSystem:
    try:
        m, u = int(data["m"]), int(data["u"])
        group = group_from_list(data["factors"])
        blocks = {}
        for kind in KINDS:
            blocks[kind] = {}
            for key, items in data["blocks"][kind].items():
                x, y = (int(t) for t in key.split(","))
                blocks[kind][(x, y)] = subset_from_list(group, items)
        prov = data.get("provenance", {})
        _check_provenance(prov)
        return BlockSystem(m, group, u, blocks["top"], blocks["bot"], prov)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed system file: {exc!r}") from exc
    except ValueError as exc:
        raise FormatError(f"invalid system file: {exc}") from exc


def _check_provenance(node: dict):
    kind = node.get("kind")
    if kind == "base":
        PartitionChoice.from_dict(node["partition"])
    elif kind == "product":
        _check_provenance(node["left"])
        _check_provenance(node["right"])


def save_system(sys: BlockSystem, path) -> None:
    _dump(system_to_dict(sys), path)


def load_system(path) -> BlockSystem:
    return system_from_dict(_load(path, "system"))


###############################################################################
#   candidate files
###############################################################################

def candidate_to_dict(c: PdsCandidate) -> dict:
    return {
        "format": FORMAT,
        "kind": "pds",
        "factors": group_to_list(c.group),
        "provenance": c.provenance,
        "predicted": c.predicted.to_dict() if c.predicted else None,
        "size": len(c.D),
        "elements": subset_to_list(c.D),
    }


def candidate_from_dict(data: dict) -> PdsCandidate:
    try:
        group = group_from_list(data["factors"])
        D = subset_from_list(group, data["elements"])
        pred = data.get("predicted")
        predicted = None
        if pred:
            predicted = SrgParams(int(pred["v"]), int(pred["k"]), int(pred["lambda"]), int(pred["mu"]))
        return PdsCandidate(group, D, data.get("provenance") or {"kind": "external"}, predicted)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed candidate file: {exc!r}") from exc


def save_candidate(c: PdsCandidate, path) -> None:
    _dump(candidate_to_dict(c), path)


def load_candidate(path) -> PdsCandidate:
    return candidate_from_dict(_load(path, "pds"))


def save_report(report: dict, path) -> None:
    _dump(dict({"format": FORMAT, "kind": "report"}, **report), path)


###############################################################################
#   graph exports
###############################################################################

GRAPH6_MAX = 258047


def _graph6_size(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= GRAPH6_MAX:
        return bytes([126, 63 + (n >> 12 & 63), 63 + (n >> 6 & 63), 63 + (n & 63)])
    raise FormatError(f"graph6 export supports at most {GRAPH6_MAX} vertices")


def cayley_upper_bits(D: Subset) -> np.ndarray:
    """Upper-triangle adjacency bits in graph6 order: column j, rows 0..j-1."""
    group = D.group
    n = group.order
    out = np.zeros(n * (n - 1) // 2, dtype=np.uint8)
    pos = 0
    for j in range(1, n):
        rows = np.arange(j, dtype=np.int64)
        out[pos:pos + j] = D.mask[group.sub(rows, j)]
        pos += j
    return out


def to_graph6(D: Subset, header: bool = False) -> bytes:
    bits = cayley_upper_bits(D)
    pad = (-bits.size) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, 6)
    vals = bits @ np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8) + 63
    body = _graph6_size(D.group.order) + vals.astype(np.uint8).tobytes()
    return (b">>graph6<<" if header else b"") + body


def from_graph6(data: bytes) -> np.ndarray:
    """Decode graph6 into a dense 0/1 adjacency matrix."""
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if data[0] != 126:
        n, rest = data[0] - 63, data[1:]
    elif data[1] != 126:
        n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
        rest = data[4:]
    else:
        raise FormatError("graph6 inputs above 258047 vertices are not supported")
    vals = np.frombuffer(rest, dtype=np.uint8).astype(np.int64) - 63
    bits = ((vals[:, None] >> np.arange(5, -1, -1)) & 1).reshape(-1)
    need = n * (n - 1) // 2
    if bits.size < need:
        raise FormatError("graph6 data too short")
    A = np.zeros((n, n), dtype=np.uint8)
    iu = np.triu_indices(n, 1)
    # graph6 enumerates by column: (0,1), (0,2), (1,2), (0,3), ...
    order = np.lexsort((iu[0], iu[1]))
    A[iu[0][order], iu[1][order]] = bits[:need]
    return A | A.T


def edge_lines(D: Subset):
    group = D.group
    members = D.indices()
    for i in range(group.order):
        nbrs = np.sort(group.add(i, members))
        for j in nbrs[nbrs > i].tolist():
            yield f"{i} {j}"
