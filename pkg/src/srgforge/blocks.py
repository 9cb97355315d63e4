"""Systems of 2m^2 building blocks top(x, y), bot(x, y), x, y in Z_m.

Base systems live in (GF(q^4), +) with 2m | q + 1 and are assembled from
2m-th and (q^2+1)-th cyclotomic classes.  Products fold systems over
G_1 x G_2.  The verifiers check the five defining conditions exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .gf import FieldSpec, build_field, prime_power
from .group import GroupSpec, Subset, char_scan_many, multiset_accumulate

KINDS = ("top", "bot")


class ConstructionError(ValueError):
    pass


###############################################################################
#   semi-primitive Gauss periods
###############################################################################

def semiprimitive_exponent(p: int, N: int) -> int | None:
    """Least j >= 1 with p^j = -1 (mod N), or None."""
    seen = set()
    j, r = 1, p % N
    while r not in seen:
        if r == N - 1:
            return j
        seen.add(r)
        r = (r * p) % N
        j += 1
    return None


def semiprimitive_value(p: int, j: int, s: int, N: int, i: int) -> int:
    """psi(C_i^(N, p^(2js))) for the canonical additive character.

    Requires N > 2 and j the least exponent with p^j = -1 (mod N).
    """
    if N <= 2:
        raise ValueError("N must exceed 2")
    if s < 1:
        raise ValueError("s must be positive")
    if semiprimitive_exponent(p, N) != j:
        raise ValueError(f"j={j} is not the least exponent with {p}^j = -1 mod {N}")
    if not 0 <= i < N:
        raise ValueError("class index out of range")
    u = p ** (j * s)
    sign = -1 if s % 2 else 1
    eps = -1 if (N % 2 == 0 and ((p**j + 1) // N) % 2 == 1) else 1
    special = 0 if eps**s == 1 else N // 2
    base, rem = divmod(sign * u - 1, N)
    assert rem == 0
    if i == special:
        return base + (-sign) * u
    return base


###############################################################################
#   partition choice
###############################################################################

@dataclass(frozen=True)
class PartitionChoice:
    """The free choices in a base system: the A_x and the bijections sigma0, sigma1.

    `A[x]` lists even residues mod q^2+1; `sigma0[r]` / `sigma1[r]` give the
    Z_m label of the even / odd residue r mod 2m.
    """
    q: int
    m: int
    A: tuple[tuple[int, ...], ...]
    sigma0: dict
    sigma1: dict
    seed: int | None = None

    def __post_init__(self):
        self.validate()

    @property
    def modulus(self) -> int:
        return self.q * self.q + 1

    def validate(self):
        q, m = self.q, self.m
        if m < 2 or (q + 1) % (2 * m):
            raise ConstructionError(f"need m >= 2 and 2m | q+1 (q={q}, m={m})")
        chunk = (q * q - 1) // (2 * m)
        if len(self.A) != m:
            raise ConstructionError("need exactly m sets A_x")
        flat = sorted(a for part in self.A for a in part)
        if flat != list(range(0, q * q, 2)):
            raise ConstructionError("A_x do not partition the even residues 0..q^2-1")
        sizes = [len(part) for part in self.A]
        if sizes[0] != chunk + 1 or any(s != chunk for s in sizes[1:]):
            raise ConstructionError(f"bad A_x sizes {sizes}")
        if sorted(self.sigma0) != list(range(0, 2 * m, 2)) or sorted(self.sigma0.values()) != list(range(m)):
            raise ConstructionError("sigma0 is not a bijection onto Z_m")
        if sorted(self.sigma1) != list(range(1, 2 * m, 2)) or sorted(self.sigma1.values()) != list(range(m)):
            raise ConstructionError("sigma1 is not a bijection onto Z_m")

    def B(self, x: int) -> tuple[int, ...]:
        n = self.modulus
        return tuple((-a + n // 2) % n for a in self.A[x % self.m])

    def sigma0_inv(self, x: int) -> int:
        return {v: k for k, v in self.sigma0.items()}[x % self.m]

    def sigma1_inv(self, x: int) -> int:
        return {v: k for k, v in self.sigma1.items()}[x % self.m]

    def to_dict(self) -> dict:
        return {
            "q": self.q, "m": self.m,
            "A": [list(part) for part in self.A],
            "sigma0": {str(k): v for k, v in sorted(self.sigma0.items())},
            "sigma1": {str(k): v for k, v in sorted(self.sigma1.items())},
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PartitionChoice":
        return cls(
            q=int(d["q"]), m=int(d["m"]),
            A=tuple(tuple(int(a) for a in part) for part in d["A"]),
            sigma0={int(k): int(v) for k, v in d["sigma0"].items()},
            sigma1={int(k): int(v) for k, v in d["sigma1"].items()},
            seed=d.get("seed"),
        )


def default_partition(q: int, m: int, seed: int | None = None) -> PartitionChoice:
    if m < 2:
        raise ConstructionError("m must be at least 2")
    if (q + 1) % (2 * m):
        raise ConstructionError(f"2m={2 * m} does not divide q+1={q + 1}")
    chunk = (q * q - 1) // (2 * m)
    evens = list(range(0, q * q, 2))
    even_res = list(range(0, 2 * m, 2))
    odd_res = list(range(1, 2 * m, 2))
    labels0 = list(range(m))
    labels1 = list(range(m))
    if seed is not None:
        rng = np.random.default_rng(seed)
        evens = [int(v) for v in rng.permutation(evens)]
        labels0 = [int(v) for v in rng.permutation(labels0)]
        labels1 = [int(v) for v in rng.permutation(labels1)]
    cuts = [0, chunk + 1] + [chunk + 1 + chunk * k for k in range(1, m)]
    A = tuple(tuple(sorted(evens[cuts[x]:cuts[x + 1]])) for x in range(m))
    return PartitionChoice(
        q=q, m=m, A=A,
        sigma0=dict(zip(even_res, labels0)),
        sigma1=dict(zip(odd_res, labels1)),
        seed=seed,
    )


###############################################################################
#   block systems
###############################################################################

@dataclass
class BlockSystem:
    m: int
    group: GroupSpec
    u: int
    top: dict
    bot: dict
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.u * self.u != self.group.order:
            raise ConstructionError(f"u^2 = {self.u ** 2} != |G| = {self.group.order}")
        keys = {(x, y) for x in range(self.m) for y in range(self.m)}
        for kind in KINDS:
            blocks = getattr(self, kind)
            if set(blocks) != keys:
                raise ConstructionError(f"{kind} blocks do not cover Z_m x Z_m")
            if any(b.group != self.group for b in blocks.values()):
                raise ConstructionError("blocks live on different groups")

    def block(self, kind: str, x: int, y: int) -> Subset:
        return getattr(self, kind)[(x % self.m, y % self.m)]

    def items(self) -> Iterator[tuple[str, int, int, Subset]]:
        for kind in KINDS:
            for x in range(self.m):
                for y in range(self.m):
                    yield kind, x, y, self.block(kind, x, y)

    @property
    def is_base(self) -> bool:
        return self.provenance.get("kind") == "base"

    def base_choices(self) -> list[PartitionChoice]:
        """Partition choices of the base factors, left to right."""
        def walk(node):
            if node.get("kind") == "base":
                return [PartitionChoice.from_dict(node["partition"])]
            return walk(node["left"]) + walk(node["right"])
        return walk(self.provenance)

    def with_block(self, kind: str, x: int, y: int, S: Subset) -> "BlockSystem":
        """Copy with one block replaced (used for negative controls)."""
        top, bot = dict(self.top), dict(self.bot)
        (top if kind == "top" else bot)[(x % self.m, y % self.m)] = S
        return BlockSystem(self.m, self.group, self.u, top, bot, dict(self.provenance))


def field_for(q: int) -> FieldSpec:
    p, f = prime_power(q)
    return build_field(p, 4 * f)


def construct_base(field: FieldSpec, m: int, choice: PartitionChoice) -> BlockSystem:
    """The base system in (GF(q^4), +)."""
    if field.d % 4:
        raise ConstructionError("field degree must be a multiple of 4")
    q = field.p ** (field.d // 4)
    if (choice.q, choice.m) != (q, m):
        raise ConstructionError(f"partition is for (q={choice.q}, m={choice.m}), not ({q}, {m})")
    choice.validate()
    n_big = q * q + 1
    log = field.log
    nonzero = log >= 0
    cls_2m = np.where(nonzero, log % (2 * m), -1)
    cls_big = np.where(nonzero, log % n_big, -1)
    zero = np.zeros(field.order, dtype=bool)
    zero[0] = True
    top, bot = {}, {}
    for x in range(m):
        for y in range(m):
            t = (cls_2m == choice.sigma1_inv(x)) | np.isin(cls_big, choice.A[y])
            b = (cls_2m == choice.sigma0_inv(x)) | np.isin(cls_big, choice.B(y))
            if y == 0:
                t, b = t | zero, b | zero
            top[(x, y)] = Subset(field.group, t)
            bot[(x, y)] = Subset(field.group, b)
    prov = {"kind": "base", "q": q, "partition": choice.to_dict()}
    return BlockSystem(m, field.group, q * q, top, bot, prov)


def product(sys1: BlockSystem, sys2: BlockSystem, require_base: bool = True) -> BlockSystem:
    """Product system over G_1 x G_2; the right factor must be a base system
    unless require_base is False (experimental: (4)/(5) are then unproven).

    top(x,y) = sum_{a,b} top1(x-a, y-b) x (bot2(x+y-a, a) & top2(x+y-b, b))
    bot(x,y) = sum_{a,b} bot1(x-b, y-a) x (bot2(x+y-a, a) & top2(x+y-b, b))
    Summands are checked to be disjoint while assembling.
    """
    if sys1.m != sys2.m:
        raise ConstructionError(f"m mismatch: {sys1.m} vs {sys2.m}")
    if require_base and not sys2.is_base:
        raise ConstructionError("right factor of a product must be a base system")
    m = sys1.m
    group = sys1.group * sys2.group
    out = {"top": {}, "bot": {}}
    for x in range(m):
        for y in range(m):
            for kind in KINDS:
                count = np.zeros((sys2.group.order, sys1.group.order), dtype=np.uint8)
                for a in range(m):
                    for b in range(m):
                        right = (sys2.block("bot", x + y - a, a).mask
                                 & sys2.block("top", x + y - b, b).mask)
                        if not right.any():
                            continue
                        if kind == "top":
                            left = sys1.block("top", x - a, y - b).mask
                        else:
                            left = sys1.block("bot", x - b, y - a).mask
                        count[np.ix_(right, left)] += 1
                if count.max(initial=0) > 1:
                    j, i = np.unravel_index(int(np.argmax(count)), count.shape)
                    raise ConstructionError(
                        f"summands of {kind}({x},{y}) overlap at element "
                        f"{int(i) + sys1.group.order * int(j)}")
                out[kind][(x, y)] = Subset(group, count.reshape(-1).astype(bool))
    prov = {"kind": "product", "left": sys1.provenance, "right": sys2.provenance}
    return BlockSystem(m, group, sys1.u * sys2.u, out["top"], out["bot"], prov)


def build_system(m: int, qs: list[int], seed: int | None = None) -> BlockSystem:
    """Base systems for each q, folded left to right with the product."""
    if not qs:
        raise ConstructionError("need at least one q")
    for q in qs:
        try:
            p, _ = prime_power(q)
        except ValueError:
            raise ConstructionError(f"q={q} is not a prime power")
        if p == 2 or (q + 1) % (2 * m):
            raise ConstructionError(f"q={q}: need q odd with 2m={2 * m} dividing q+1")
    if seed is None:
        seeds = [None] * len(qs)
    elif len(qs) == 1:
        seeds = [seed]
    else:
        seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(len(qs))]
    systems = [construct_base(field_for(q), m, default_partition(q, m, s))
               for q, s in zip(qs, seeds)]
    acc = systems[0]
    for nxt in systems[1:]:
        acc = product(acc, nxt)
    return acc


###############################################################################
#   verifiers for conditions (1)-(5)
###############################################################################

@dataclass
class ConditionReport:
    condition: int
    passed: bool
    witness: dict | None = None
    details: dict = field(default_factory=dict)
    extracted: dict = field(default_factory=dict)

    def fail(self, **witness) -> "ConditionReport":
        self.passed = False
        if self.witness is None:
            self.witness = witness
        return self

    def to_dict(self) -> dict:
        return {"condition": self.condition, "passed": self.passed,
                "witness": self.witness, "details": self.details}


def verify_cond1(sys: BlockSystem) -> ConditionReport:
    u, m = sys.u, sys.m
    rep = ConditionReport(1, True)
    sizes = {}
    for kind, x, y, B in sys.items():
        want = (u * u - u) // m + (u if y == 0 else 0)
        sizes[f"{kind}({x},{y})"] = len(B)
        if len(B) != want:
            rep.fail(block=[kind, x, y], size=len(B), expected=want)
    if (u * u - u) % m:
        rep.fail(reason=f"m={m} does not divide u^2-u")
    rep.details["sizes"] = sizes
    return rep


def verify_cond2(sys: BlockSystem) -> ConditionReport:
    rep = ConditionReport(2, True)
    m = sys.m
    for kind in KINDS:
        for x in range(m):
            for y in range(m):
                acc = multiset_accumulate(sys.block(kind, x - z, y + z) for z in range(m))
                bad = np.flatnonzero(acc.coeff != 1)
                if bad.size:
                    g = int(bad[0])
                    rep.fail(kind=kind, x=x, y=y, element=g, coefficient=int(acc.coeff[g]))
    return rep


def block_character_values(sys: BlockSystem, backend: str = "naive", threads: int = 1):
    """Exact character tables of all 2m^2 blocks, shape (|G|, 2, m, m) plus integrality."""
    order = [(kind, x, y) for kind, x, y, _ in sys.items()]
    tables = char_scan_many([sys.block(*k) for k in order], backend, threads)
    m = sys.m
    vals = np.zeros((sys.group.order, 2, m, m), dtype=np.int64)
    integral = np.ones(sys.group.order, dtype=bool)
    for (kind, x, y), t in zip(order, tables):
        vals[:, KINDS.index(kind), x, y] = t.integer_part()
        integral &= t.integer_mask()
    return vals, integral


def verify_cond3(sys: BlockSystem, backend: str = "naive", threads: int = 1) -> ConditionReport:
    """Exact check of the character pattern; records psi -> (kind', x', y')."""
    rep = ConditionReport(3, True)
    u, m = sys.u, sys.m
    vals, integral = block_character_values(sys, backend, threads)
    n = sys.group.order
    ok = integral.copy()
    ok[0] = True
    ok &= np.all(np.isin(vals, (0, u, -u)), axis=(1, 2, 3)) | (np.arange(n) == 0)
    nz = np.any(vals != 0, axis=(2, 3))                    # (n, 2)
    ok &= nz.sum(axis=1) == 1
    kind_idx = np.argmax(nz, axis=1)
    chosen = vals[np.arange(n), kind_idx]                  # (n, m, m)
    neg = (chosen == -u).reshape(n, -1)
    pos = (chosen == u).reshape(n, -1)
    ok &= neg.any(axis=1) & pos.any(axis=1)
    xp = np.argmax(neg, axis=1) // m
    yp = np.argmax(pos, axis=1) % m
    xs = np.arange(m)
    row = xs[None, :, None] == xp[:, None, None]
    col = xs[None, None, :] == yp[:, None, None]
    expect = np.where(row & ~col, -u, 0) + np.where(col & ~row, u, 0)
    ok &= np.all(chosen == expect, axis=(1, 2))
    ok[0] = True
    bad = np.flatnonzero(~ok)
    if bad.size:
        a = int(bad[0])
        rep.fail(character=a, integral=bool(integral[a]),
                 values={KINDS[k]: vals[a, k].tolist() for k in range(2)},
                 failures=int(bad.size))
    labels = np.stack([kind_idx, xp, yp], axis=1)
    labels[0] = -1
    rep.extracted["labeling"] = labels
    rep.details["labeling_counts"] = {
        "top": int(np.sum(kind_idx[1:] == 0)), "bot": int(np.sum(kind_idx[1:] == 1))}
    return rep


def verify_cond4(sys: BlockSystem) -> ConditionReport:
    """sum_y (top(x,y) + bot(x,y)) = m S_x + G + [0]; extracts S_x."""
    rep = ConditionReport(4, True)
    m = sys.m
    S = {}
    for x in range(m):
        acc = multiset_accumulate(
            [sys.block("top", x, y) for y in range(m)] + [sys.block("bot", x, y) for y in range(m)])
        c = acc.coeff
        if c[0] != 2:
            rep.fail(x=x, element=0, coefficient=int(c[0]), expected=2)
        rest = c[1:]
        bad = np.flatnonzero((rest != 1) & (rest != m + 1))
        if bad.size:
            g = int(bad[0]) + 1
            rep.fail(x=x, element=g, coefficient=int(c[g]), expected=[1, m + 1])
        mask = c == m + 1
        mask[0] = False
        S[x] = Subset(sys.group, mask)
    rep.extracted["S"] = S
    rep.details["sizes"] = {str(x): len(s) for x, s in S.items()}
    return rep


def cond5_zero_coefficient(m: int, y1: int, y2: int) -> int:
    if y1 % m and y2 % m:
        return 0
    if y1 % m == 0 and y2 % m == 0:
        return 2 * m
    return m


def verify_cond5(sys: BlockSystem) -> ConditionReport:
    """sum_x (top(x,y1) + bot(x,y2)) = m T + G + delta [0]; extracts T_{y1,y2}."""
    rep = ConditionReport(5, True)
    m = sys.m
    T = {}
    for y1 in range(m):
        for y2 in range(m):
            acc = multiset_accumulate(
                [sys.block("top", x, y1) for x in range(m)] + [sys.block("bot", x, y2) for x in range(m)])
            c = acc.coeff
            want0 = cond5_zero_coefficient(m, y1, y2)
            if c[0] != want0:
                rep.fail(y1=y1, y2=y2, element=0, coefficient=int(c[0]), expected=want0)
            rest = c[1:]
            bad = np.flatnonzero((rest != 1) & (rest != m + 1))
            if bad.size:
                g = int(bad[0]) + 1
                rep.fail(y1=y1, y2=y2, element=g, coefficient=int(c[g]), expected=[1, m + 1])
            mask = c == m + 1
            mask[0] = False
            T[(y1, y2)] = Subset(sys.group, mask)
    rep.extracted["T"] = T
    rep.details["sizes"] = {f"{a},{b}": len(s) for (a, b), s in T.items()}
    return rep


def verify(sys: BlockSystem, conditions=(1, 2, 3, 4, 5), backend: str = "naive",
           threads: int = 1) -> dict[int, ConditionReport]:
    out = {}
    for c in conditions:
        if c == 1:
            out[1] = verify_cond1(sys)
        elif c == 2:
            out[2] = verify_cond2(sys)
        elif c == 3:
            out[3] = verify_cond3(sys, backend, threads)
        elif c == 4:
            out[4] = verify_cond4(sys)
        elif c == 5:
            out[5] = verify_cond5(sys)
        else:
            raise ValueError(f"unknown condition {c}")
    return out


def is_building_block(B: Subset, u: int, backend: str = "naive") -> bool:
    """|psi(B)|^2 in {0, u^2} for every non-principal psi, via exact abs_square."""
    from .group import char_scan
    table = char_scan(B, backend)
    for a in range(1, len(table)):
        sq = table[a].abs_square().as_integer()
        if sq not in (0, u * u):
            return False
    return True

