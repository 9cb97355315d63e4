"""Partial difference sets derived from block systems, and their verification.

Three independent checks are provided: difference counting (authoritative,
integers only), the exact character scan, and the dense adjacency-matrix
identity A^2 = (lambda - mu) A + (k - mu) I + mu J.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockSystem, verify_cond4, verify_cond5
from .group import GroupSpec, Subset, char_scan

MATRIX_LIMIT = 4096
CHAR_LIMIT = 10**5
# element pairs per chunk when counting differences
_DIFF_CHUNK = 1 << 22

LATIN = "Latin"
NEGATIVE_LATIN = "negative-Latin"
CONFERENCE = "conference"
OTHER = "other"


class PdsError(ValueError):
    pass


@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    def __iter__(self):
        return iter((self.v, self.k, self.lam, self.mu))

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.v, self.k, self.lam, self.mu)

    def feasible(self) -> bool:
        return self.k * (self.k - self.lam - 1) == (self.v - self.k - 1) * self.mu

    @property
    def degenerate(self) -> str | None:
        if self.k == 0:
            return "edgeless"
        if self.k == self.v - 1:
            return "complete"
        return None

    @property
    def is_conference(self) -> bool:
        v = self.v
        return (v - 1) % 4 == 0 and (self.k, self.lam, self.mu) == ((v - 1) // 2, (v - 5) // 4, (v - 1) // 4)

    def latin_forms(self) -> list[tuple[int, int, int]]:
        """Every (u, c, eps) with (v,k,lam,mu) = (u^2, c(u-eps), eps u + c^2 - 3 eps c, c^2 - eps c).

        Conference parameters on u^2 vertices match both eps = -1 (c = (u-1)/2)
        and eps = 1 (c = (u+1)/2); the negative Latin form is listed first.
        """
        u = math.isqrt(self.v)
        if u * u != self.v:
            return []
        out = []
        for eps in (-1, 1):
            if u - eps == 0 or self.k % (u - eps):
                continue
            c = self.k // (u - eps)
            if srg_from_latin(u, c, eps) == self:
                out.append((u, c, eps))
        return out

    def latin_form(self) -> tuple[int, int, int] | None:
        forms = self.latin_forms()
        return forms[0] if forms else None

    @property
    def type_tag(self) -> str:
        form = self.latin_form()
        if form is not None:
            return LATIN if form[2] == 1 else NEGATIVE_LATIN
        if self.is_conference:
            return CONFERENCE
        return OTHER

    def to_dict(self) -> dict:
        out = {"v": self.v, "k": self.k, "lambda": self.lam, "mu": self.mu,
               "type": self.type_tag, "conference": self.is_conference}
        form = self.latin_form()
        if form is not None:
            out.update(u=form[0], c=form[1], eps=form[2])
        out["forms"] = [list(f) for f in self.latin_forms()]
        return out

    def __str__(self):
        return f"{self.v} {self.k} {self.lam} {self.mu}"


def srg_from_latin(u: int, c: int, eps: int) -> SrgParams:
    return SrgParams(u * u, c * (u - eps), eps * u + c * c - 3 * eps * c, c * c - eps * c)


def params_main1(u: int, m: int, i: int) -> SrgParams:
    """Negative Latin square parameters with c = i (u-1)/m."""
    if (u - 1) % m:
        raise PdsError(f"m={m} does not divide u-1={u - 1}")
    if not 0 <= i <= m:
        raise PdsError(f"i={i} outside 0..{m}")
    return srg_from_latin(u, i * (u - 1) // m, -1)


def params_main2(u: int, m: int, form: int, i: int, j: int) -> SrgParams:
    """Latin square parameters; form 1: c = (i+j)(u-1)/m + j, i <= m-2, j <= 2;
    form 2: c = (i+j)(u-1)/m + 2j, i <= m-1, j <= 1."""
    if (u - 1) % m:
        raise PdsError(f"m={m} does not divide u-1={u - 1}")
    w = (u - 1) // m
    if form == 1:
        if not (0 <= i <= m - 2 and 0 <= j <= 2):
            raise PdsError("form 1 needs 0 <= i <= m-2 and 0 <= j <= 2")
        c = (i + j) * w + j
    elif form == 2:
        if not (0 <= i <= m - 1 and 0 <= j <= 1):
            raise PdsError("form 2 needs 0 <= i <= m-1 and 0 <= j <= 1")
        c = (i + j) * w + 2 * j
    else:
        raise PdsError("form must be 1 or 2")
    return srg_from_latin(u, c, 1)


def main2_c_values(u: int, m: int) -> set[int]:
    out = set()
    for i in range(m - 1):
        for j in range(3):
            out.add(params_main2(u, m, 1, i, j).k // (u - 1))
    for i in range(m):
        for j in range(2):
            out.add(params_main2(u, m, 2, i, j).k // (u - 1))
    return out


###############################################################################
#   candidates and reports
###############################################################################

@dataclass
class PdsCandidate:
    group: GroupSpec
    D: Subset
    provenance: dict = field(default_factory=lambda: {"kind": "external"})
    predicted: SrgParams | None = None

    def __len__(self):
        return len(self.D)


@dataclass
class PdsReport:
    passed: bool = False
    methods: dict = field(default_factory=dict)
    params: SrgParams | None = None
    eigenvalues: tuple[int, ...] | None = None
    witness: dict | None = None
    degenerate: str | None = None
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "methods": {k: _method_dict(v) for k, v in self.methods.items()},
            "params": self.params.to_dict() if self.params else None,
            "eigenvalues": list(self.eigenvalues) if self.eigenvalues else None,
            "witness": self.witness,
            "degenerate": self.degenerate,
            "skipped": self.skipped,
        }


@dataclass
class MethodResult:
    method: str
    passed: bool
    params: SrgParams | None = None
    eigenvalues: tuple[int, ...] | None = None
    witness: dict | None = None
    degenerate: str | None = None


def _method_dict(r: MethodResult) -> dict:
    return {"passed": r.passed, "params": list(r.params) if r.params else None,
            "eigenvalues": list(r.eigenvalues) if r.eigenvalues else None,
            "witness": r.witness, "degenerate": r.degenerate}


def _basic_checks(method: str, D: Subset) -> MethodResult | None:
    v, k = D.group.order, len(D)
    if 0 in D:
        return MethodResult(method, False, witness={"reason": "0 in D", "element": 0})
    neg = D.negate()
    if neg != D:
        g = int(np.flatnonzero(D.mask != neg.mask)[0])
        return MethodResult(method, False, witness={"reason": "D != -D", "element": g})
    if k == 0:
        return MethodResult(method, False, degenerate="edgeless",
                            witness={"reason": "edgeless graph"})
    if k == v - 1:
        return MethodResult(method, False, degenerate="complete",
                            witness={"reason": "complete graph"})
    return None


def difference_counts(D: Subset) -> np.ndarray:
    """#{(d1, d2) in D x D : d1 - d2 = g} for every g."""
    group = D.group
    idx = D.indices()
    counts = np.zeros(group.order, dtype=np.int64)
    if idx.size == 0:
        return counts
    step = max(1, _DIFF_CHUNK // idx.size)
    for lo in range(0, idx.size, step):
        diffs = group.sub(idx[lo:lo + step, None], idx[None, :])
        counts += np.bincount(diffs.reshape(-1), minlength=group.order)
    return counts


def check_pds_diff(c: PdsCandidate) -> MethodResult:
    D = c.D
    early = _basic_checks("diff", D)
    if early is not None:
        return early
    counts = difference_counts(D)
    v, k = D.group.order, len(D)
    on = counts[D.mask]
    off_mask = ~D.mask
    off_mask[0] = False
    off = counts[off_mask]
    if np.unique(on).size != 1:
        g = int(D.indices()[np.argmax(on != on[0])])
        return MethodResult("diff", False, witness={"reason": "lambda not constant", "element": g,
                                                    "count": int(counts[g])})
    if np.unique(off).size != 1:
        g = int(np.flatnonzero(off_mask)[np.argmax(off != off[0])])
        return MethodResult("diff", False, witness={"reason": "mu not constant", "element": g,
                                                    "count": int(counts[g])})
    params = SrgParams(v, k, int(on[0]), int(off[0]))
    if not params.feasible():
        return MethodResult("diff", False, params, witness={"reason": "infeasible parameters"})
    return MethodResult("diff", True, params, eigenvalues=_eigs_from_params(params))


def _eigs_from_params(p: SrgParams) -> tuple[int, ...] | None:
    # r + s = lam - mu, r s = mu - k
    b, c = p.lam - p.mu, p.mu - p.k
    disc = b * b - 4 * c
    root = math.isqrt(disc) if disc >= 0 else -1
    if root < 0 or root * root != disc:
        return None
    return tuple(sorted(((b - root) // 2, (b + root) // 2)))


def check_pds_char(c: PdsCandidate, backend: str = "naive") -> MethodResult:
    D = c.D
    early = _basic_checks("char", D)
    if early is not None:
        return early
    table = char_scan(D, backend)
    ints = table.integer_mask()
    if not ints[1:].all():
        a = int(np.flatnonzero(~ints[1:])[0]) + 1
        return MethodResult("char", False, witness={"reason": "non-integer character value",
                                                    "character": a,
                                                    "value": table[a].to_dict()})
    vals = table.integer_part()[1:]
    distinct = sorted(set(vals.tolist()))
    if len(distinct) != 2:
        return MethodResult("char", False, eigenvalues=tuple(distinct[:8]),
                            witness={"reason": f"{len(distinct)} distinct restricted eigenvalues"})
    r, s = distinct
    v, k = D.group.order, len(D)
    mu = k + r * s
    lam = mu + r + s
    params = SrgParams(v, k, lam, mu)
    if not params.feasible():
        return MethodResult("char", False, params, (r, s), witness={"reason": "infeasible parameters"})
    return MethodResult("char", True, params, eigenvalues=(r, s))


def adjacency_matrix(D: Subset) -> np.ndarray:
    group = D.group
    n = group.order
    idx = np.arange(n, dtype=np.int64)
    return D.mask[group.sub(idx[:, None], idx[None, :])].astype(np.int64)


def check_srg_matrix(c: PdsCandidate, limit: int = MATRIX_LIMIT) -> MethodResult | None:
    """Returns None when v exceeds the dense-matrix guard."""
    D = c.D
    v = D.group.order
    if v > limit:
        return None
    early = _basic_checks("matrix", D)
    if early is not None:
        return early
    A = adjacency_matrix(D)
    if not np.array_equal(A, A.T) or np.any(np.diag(A)):
        return MethodResult("matrix", False, witness={"reason": "not a simple undirected graph"})
    # float64 products are exact here: every partial sum is an integer <= v
    A2 = np.rint(A.astype(np.float64) @ A.astype(np.float64)).astype(np.int64)
    k = int(A[0].sum())
    nbrs = np.flatnonzero(A[0])
    non = np.flatnonzero((A[0] == 0) & (np.arange(v) != 0))
    lam = int(A2[0, nbrs[0]])
    mu = int(A2[0, non[0]])
    rhs = (lam - mu) * A + (k - mu) * np.eye(v, dtype=np.int64) + mu
    if not np.array_equal(A2, rhs):
        i, j = np.argwhere(A2 != rhs)[0]
        return MethodResult("matrix", False, witness={"reason": "A^2 identity fails",
                                                      "entry": [int(i), int(j)],
                                                      "value": int(A2[i, j]),
                                                      "expected": int(rhs[i, j])})
    params = SrgParams(v, k, lam, mu)
    return MethodResult("matrix", True, params, eigenvalues=_eigs_from_params(params))


METHODS = ("diff", "char", "matrix")


def check_pds(c: PdsCandidate, methods=METHODS, backend: str = "naive",
              matrix_limit: int = MATRIX_LIMIT, char_limit: int | None = None) -> PdsReport:
    """Run the requested checks; pass iff all ran, all passed, and all agree."""
    rep = PdsReport()
    v = c.group.order
    for name in methods:
        if name == "diff":
            res = check_pds_diff(c)
        elif name == "char":
            if char_limit is not None and v > char_limit:
                rep.skipped.append("char")
                continue
            res = check_pds_char(c, backend)
        elif name == "matrix":
            res = check_srg_matrix(c, matrix_limit)
            if res is None:
                rep.skipped.append("matrix")
                continue
        else:
            raise PdsError(f"unknown method {name!r}")
        rep.methods[name] = res
    results = list(rep.methods.values())
    rep.passed = bool(results) and all(r.passed for r in results)
    for r in results:
        if r.degenerate:
            rep.degenerate = r.degenerate
        if not r.passed and rep.witness is None:
            rep.witness = dict(r.witness or {}, method=r.method)
    param_set = {r.params for r in results if r.params is not None}
    if len(param_set) > 1:
        rep.passed = False
        rep.witness = {"reason": "methods disagree",
                       "params": {r.method: list(r.params) for r in results if r.params}}
    if results and results[0].params is not None:
        rep.params = results[0].params
    eig = [r.eigenvalues for r in results if r.eigenvalues]
    if eig:
        rep.eigenvalues = eig[0]
    return rep


###############################################################################
#   derivation from block systems
###############################################################################

def _candidate(sys: BlockSystem, D: Subset, prov: dict, predicted: SrgParams | None):
    return PdsCandidate(sys.group, D, prov, predicted)


def derive_all_S(sys: BlockSystem) -> list[PdsCandidate]:
    rep = verify_cond4(sys)
    if not rep.passed:
        raise PdsError(f"condition (4) fails: {rep.witness}")
    pred = params_main1(sys.u, sys.m, 1)
    return [_candidate(sys, rep.extracted["S"][x], {"kind": "S", "x": x}, pred)
            for x in range(sys.m)]


def derive_S(sys: BlockSystem, x: int) -> PdsCandidate:
    return derive_all_S(sys)[x % sys.m]


def predicted_T(u: int, m: int, y1: int, y2: int) -> SrgParams:
    extra = 0 if (y1 % m and y2 % m) else (2 if (y1 % m == 0 and y2 % m == 0) else 1)
    return srg_from_latin(u, (u - 1) // m + extra, 1)


def derive_all_T(sys: BlockSystem) -> dict[tuple[int, int], PdsCandidate]:
    rep = verify_cond5(sys)
    if not rep.passed:
        raise PdsError(f"condition (5) fails: {rep.witness}")
    m, u = sys.m, sys.u
    return {(y1, y2): _candidate(sys, rep.extracted["T"][(y1, y2)],
                                 {"kind": "T", "y1": y1, "y2": y2}, predicted_T(u, m, y1, y2))
            for y1 in range(m) for y2 in range(m)}


def derive_T(sys: BlockSystem, y1: int, y2: int) -> PdsCandidate:
    return derive_all_T(sys)[(y1 % sys.m, y2 % sys.m)]


def _check_partition(group: GroupSpec, family: list[PdsCandidate]):
    cover = np.zeros(group.order, dtype=np.int64)
    for c in family:
        cover += c.D.mask
    if cover[0] != 0 or np.any(cover[1:] != 1):
        g = int(np.flatnonzero(np.r_[cover[0] != 0, cover[1:] != 1])[0])
        raise PdsError(f"family does not partition G minus 0 (element {g} covered {int(cover[g])} times)")


def partition_family_S(sys: BlockSystem) -> list[PdsCandidate]:
    fam = derive_all_S(sys)
    _check_partition(sys.group, fam)
    return fam


def partition_family_T(sys: BlockSystem, t: int) -> list[PdsCandidate]:
    """T_{y, y+t}, y in Z_m."""
    allT = derive_all_T(sys)
    m = sys.m
    fam = [allT[(y, (y + t) % m)] for y in range(m)]
    _check_partition(sys.group, fam)
    return fam


###############################################################################
#   fusion and difference families
###############################################################################

class FusionError(PdsError):
    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


def fuse(cands: list[PdsCandidate], methods=("diff",)) -> PdsCandidate:
    """Union of pairwise disjoint candidates of one (negative) Latin type.

    Disjointness and the type of each member are checked; the predicted
    parameters of the union add the members' c values.
    """
    if not cands:
        raise FusionError("nothing to fuse", {"reason": "empty"})
    group = cands[0].group
    for c in cands[1:]:
        if c.group != group:
            raise FusionError("candidates live on different groups", {"reason": "group mismatch"})
    for (i, a), (j, b) in itertools.combinations(enumerate(cands), 2):
        both = a.D.mask & b.D.mask
        if both.any():
            g = int(np.flatnonzero(both)[0])
            raise FusionError(f"candidates {i} and {j} overlap at {g}",
                              {"reason": "overlap", "pair": [i, j], "element": g})
    options = []
    for i, c in enumerate(cands):
        rep = check_pds(c, methods)
        forms = rep.params.latin_forms() if (rep.passed and rep.params) else []
        if not forms:
            raise FusionError(f"candidate {i} is not a (negative) Latin square type PDS",
                              {"reason": "untyped", "candidate": i,
                               "params": list(rep.params) if rep.params else None})
        options.append({(f[0], f[2]): f[1] for f in forms})
    common = set.intersection(*(set(o) for o in options))
    if not common:
        raise FusionError("mixed Latin / negative Latin types",
                          {"reason": "mixed types", "forms": [sorted(o) for o in options]})
    # a conference member fits either type; follow the members' predicted type if any
    hinted = {c.predicted.latin_form()[::2] for c in cands
              if c.predicted is not None and c.predicted.latin_form() is not None}
    preferred = [key for key in sorted(common) if key in hinted]
    u, eps = preferred[0] if len(preferred) == 1 else min(common, key=lambda t: t[1])
    c_total = sum(o[(u, eps)] for o in options)
    mask = np.zeros(group.order, dtype=bool)
    for c in cands:
        mask |= c.D.mask
    pred = srg_from_latin(u, c_total, eps)
    prov = {"kind": "fusion", "members": [c.provenance for c in cands]}
    return PdsCandidate(group, Subset(group, mask), prov, pred)


@dataclass
class DifferenceFamilyReport:
    passed: bool
    v: int
    k: int
    lam: int | None
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "v": self.v, "k": self.k, "lambda": self.lam,
                "witness": self.witness}


def check_difference_family(family: list[PdsCandidate]) -> DifferenceFamilyReport:
    """Internal differences of all blocks together cover every nonzero element k-1 times."""
    if not family:
        raise PdsError("empty family")
    group = family[0].group
    sizes = {len(c) for c in family}
    if len(sizes) != 1:
        raise PdsError(f"blocks of unequal size {sorted(sizes)}")
    k = sizes.pop()
    total = np.zeros(group.order, dtype=np.int64)
    for c in family:
        if c.group != group:
            raise PdsError("blocks live on different groups")
        total += difference_counts(c.D)
    total[0] -= k * len(family)   # the d - d = 0 terms
    bad = np.flatnonzero(total[1:] != k - 1)
    if bad.size:
        g = int(bad[0]) + 1
        return DifferenceFamilyReport(False, group.order, k, None,
                                      {"element": g, "count": int(total[g]), "expected": k - 1})
    return DifferenceFamilyReport(True, group.order, k, k - 1)
