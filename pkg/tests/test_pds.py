import itertools

import networkx as nx
import pytest

from srgforge.gf import cyclotomic_class
from srgforge.group import Subset
from srgforge.pds import (
    CONFERENCE, LATIN, NEGATIVE_LATIN, FusionError, PdsCandidate, PdsError, SrgParams,
    check_difference_family, check_pds, check_pds_char, check_pds_diff, check_srg_matrix,
    derive_all_S, derive_all_T, derive_S, fuse, main2_c_values, params_main1,
    params_main2, partition_family_S, partition_family_T, srg_from_latin,
)


def brute_srg(D: Subset):
    """Oracle: build the Cayley graph and count common neighbours pairwise."""
    G = D.group
    g = nx.Graph()
    g.add_nodes_from(range(G.order))
    members = D.indices()
    for i in range(G.order):
        for j in G.add(i, members).tolist():
            g.add_edge(i, j)
    degs = {d for _, d in g.degree()}
    assert len(degs) == 1
    lam, mu = set(), set()
    nbr = {v: set(g[v]) for v in g}
    for a, b in itertools.combinations(range(G.order), 2):
        (lam if b in nbr[a] else mu).add(len(nbr[a] & nbr[b]))
    assert len(lam) == 1 and len(mu) == 1
    return SrgParams(G.order, degs.pop(), lam.pop(), mu.pop())


@pytest.fixture(scope="module")
def paley9(gf9):
    return PdsCandidate(gf9.group, cyclotomic_class(gf9, 2, 0))


def test_paley9(paley9):
    rep = check_pds(paley9)
    assert rep.passed
    assert rep.params.astuple() == (9, 4, 1, 2)
    assert rep.eigenvalues == (-2, 1)
    assert brute_srg(paley9.D) == rep.params
    assert rep.params.is_conference


def test_paley9_matrix_identity(paley9):
    r = check_srg_matrix(paley9)
    assert r.passed and r.params.astuple() == (9, 4, 1, 2)
    # lam - mu = -1, k - mu = 2, mu = 2
    assert (r.params.lam - r.params.mu, r.params.k - r.params.mu, r.params.mu) == (-1, 2, 2)


def test_S_x_q3(sys_m2q3):
    for c in derive_all_S(sys_m2q3):
        rep = check_pds(c)
        assert rep.passed and rep.params.astuple() == (81, 40, 19, 20)
        assert set(rep.eigenvalues) == {4, -5}
        assert c.predicted == rep.params
        assert brute_srg(c.D) == rep.params


def test_T_q3(sys_m2q3):
    T = derive_all_T(sys_m2q3)
    r11 = check_pds(T[(1, 1)])
    assert r11.params.astuple() == (81, 32, 13, 12) and set(r11.eigenvalues) == {-4, 5}
    r00 = check_pds(T[(0, 0)])
    assert set(r00.eigenvalues) == {-6, 3}
    for key, c in T.items():
        rep = check_pds(c)
        assert rep.passed and rep.params == c.predicted, key


def test_type_tags():
    assert SrgParams(81, 32, 13, 12).type_tag == LATIN
    assert SrgParams(625, 208, 63, 72).type_tag == NEGATIVE_LATIN
    p = SrgParams(81, 40, 19, 20)
    assert p.is_conference
    assert p.latin_forms() == [(9, 4, -1), (9, 5, 1)]
    assert SrgParams(13, 6, 2, 3).type_tag == CONFERENCE
    assert SrgParams(10, 3, 0, 1).latin_forms() == []


@pytest.mark.parametrize("k", [0, 1, 5])
def test_rejects_before_matrix(gf9, k):
    G = gf9.group
    D = Subset.from_indices(G, [0, 1, 2][:k] if k < 5 else range(1, 6))
    c = PdsCandidate(G, D)
    rep = check_pds(c)
    assert not rep.passed
    if k == 0:
        assert rep.degenerate == "edgeless"


def test_zero_in_D_rejected(gf9):
    D = Subset.from_indices(gf9.group, [0, 1, 2])
    r = check_pds_diff(PdsCandidate(gf9.group, D))
    assert not r.passed and r.witness["reason"] == "0 in D"


def test_asymmetric_rejected(gf9):
    D = Subset.from_indices(gf9.group, [1])
    r = check_pds_char(PdsCandidate(gf9.group, D))
    assert not r.passed and r.witness["reason"] == "D != -D"


def test_non_pds_witness(gf81):
    D = cyclotomic_class(gf81, 10, 0) | cyclotomic_class(gf81, 4, 1)
    rep = check_pds(PdsCandidate(gf81.group, D))
    assert not rep.passed and rep.witness is not None


def test_complete_graph_degenerate(gf9):
    full = Subset.full(gf9.group) - Subset.zero(gf9.group)
    rep = check_pds(PdsCandidate(gf9.group, full))
    assert rep.degenerate == "complete" and not rep.passed


def test_methods_agree_and_eigen_relations(sys_m3q5):
    for c in derive_all_S(sys_m3q5):
        rep = check_pds(c, methods=("diff", "char"))
        assert rep.passed
        p = rep.params
        assert p.astuple() == (625, 208, 63, 72)
        r, s = rep.eigenvalues
        assert r + s == p.lam - p.mu and r * s == p.mu - p.k


def test_backends_agree(sys_m2q3):
    c = derive_S(sys_m2q3, 0)
    assert check_pds_char(c, "naive") == check_pds_char(c, "fast")


def test_params_main1():
    assert params_main1(9, 2, 1) == srg_from_latin(9, 4, -1)
    assert params_main1(25, 3, 1).astuple() == (625, 208, 63, 72)
    assert params_main1(81, 2, 1).astuple() == (6561, 3280, 1639, 1640)
    with pytest.raises(PdsError):
        params_main1(26, 3, 1)
    with pytest.raises(PdsError):
        params_main1(25, 3, 4)


def test_params_main2():
    assert params_main2(9, 2, 1, 0, 1).astuple() == (81, 40, 19, 20)
    assert params_main2(9, 2, 2, 0, 1).astuple() == (81, 48, 27, 30)
    assert params_main2(9, 2, 1, 0, 0).degenerate == "edgeless"
    with pytest.raises(PdsError):
        params_main2(9, 2, 1, 1, 0)
    with pytest.raises(PdsError):
        params_main2(9, 2, 3, 0, 0)


def test_main2_c_values():
    # form 1: c in {0, 5, 10}; form 2: c in {0, 6, 4, 10}
    assert main2_c_values(9, 2) == {0, 4, 5, 6, 10}
    assert all(srg_from_latin(25, c, 1).feasible() for c in main2_c_values(25, 3))


def test_partition_families(sys_m2q3):
    assert [len(c) for c in partition_family_S(sys_m2q3)] == [40, 40]
    assert sorted(len(c) for c in partition_family_T(sys_m2q3, 0)) == [32, 48]
    assert [len(c) for c in partition_family_T(sys_m2q3, 1)] == [40, 40]


def test_fusion_S(sys_m3q5):
    S = derive_all_S(sys_m3q5)
    two = fuse(S[:2])
    rep = check_pds(two, methods=("diff",))
    assert rep.passed and rep.params == two.predicted
    assert rep.params.astuple() == (625, 416, 279, 272)
    allS = fuse(S)
    assert len(allS) == 624 and check_pds(allS, ("diff",)).degenerate == "complete"


def test_fusion_T_family_c_values(sys_m3q5):
    for t in range(3):
        fam = partition_family_T(sys_m3q5, t)
        for r in range(1, 3):
            for sub in itertools.combinations(fam, r):
                f = fuse(list(sub))
                rep = check_pds(f, ("diff",))
                assert rep.passed and rep.params == f.predicted
                c = f.predicted.k // 24
                assert c in main2_c_values(25, 3)
                assert rep.params.type_tag == LATIN or rep.params.degenerate


def test_fusion_rejects_overlap(sys_m2q3):
    c = derive_S(sys_m2q3, 0)
    with pytest.raises(FusionError) as ei:
        fuse([c, c])
    assert ei.value.witness["reason"] == "overlap"


def test_fusion_rejects_mixed(gf81):
    neg = PdsCandidate(gf81.group, cyclotomic_class(gf81, 4, 0))    # (81,20,1,6)
    pos = PdsCandidate(gf81.group, cyclotomic_class(gf81, 10, 5))   # (81,8,7,0)
    assert check_pds(neg).params.type_tag == NEGATIVE_LATIN
    assert check_pds(pos).params.type_tag == LATIN
    with pytest.raises(FusionError) as ei:
        fuse([neg, pos])
    assert ei.value.witness["reason"] == "mixed types"


def test_fusion_rejects_non_pds(gf81):
    # every union of classes of order 10 is a PDS here, so break the pattern by hand
    C0 = cyclotomic_class(gf81, 10, 0)
    g = int(cyclotomic_class(gf81, 10, 1).indices()[0])
    extra = Subset.from_indices(gf81.group, [g, int(gf81.neg(g))])
    junk = PdsCandidate(gf81.group, C0 | extra)
    ok = PdsCandidate(gf81.group, cyclotomic_class(gf81, 10, 5))
    assert not check_pds(junk).passed
    with pytest.raises(FusionError) as ei:
        fuse([ok, junk])
    assert ei.value.witness["reason"] == "untyped" and ei.value.witness["candidate"] == 1


def test_difference_families(sys_m2q3, sys_m3q5, paley9):
    r = check_difference_family(derive_all_S(sys_m2q3))
    assert r.passed and (r.v, r.k, r.lam) == (81, 40, 39)
    r = check_difference_family(derive_all_S(sys_m3q5))
    assert r.passed and (r.v, r.k, r.lam) == (625, 208, 207)
    assert not check_difference_family([paley9]).passed


def test_feasibility():
    assert SrgParams(625, 416, 279, 272).feasible()
    assert SrgParams(625, 192, 65, 56).feasible()
    # k(k - lam - 1) = (v - k - 1) mu fails for these
    assert not SrgParams(625, 416, 247, 272).feasible()
    assert not SrgParams(625, 192, 49, 56).feasible()
