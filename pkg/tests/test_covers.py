import math

import numpy as np
import pytest

from nfgcover import (
    CoverSpec,
    bethe_m,
    build_cover,
    check_ruozzi,
    cover_mask,
    double_cover_from_mask,
    enumerate_double_covers,
    make_nfg,
    partition_sum,
    sample_cover,
    trivial_cover,
    validate,
)
from nfgcover.errors import (
    EnumerationCapExceeded,
    HalfEdgePresent,
    MalformedPermutation,
    NotLogSupermodular,
)

from _oracles import brute_z


def test_trivial_cover_spec(c2):
    assert trivial_cover(c2, 2).perms == {"e1": (0, 1), "e2": (0, 1)}
    assert trivial_cover(c2, 3).perms == {"e1": (0, 1, 2), "e2": (0, 1, 2)}


def test_trivial_cover_rejects_half_edges():
    g = make_nfg("h", [("e", 2), ("h", 2, True)], [("f", ("e", "e", "h"), np.ones((2, 2, 2)))])
    with pytest.raises(HalfEdgePresent):
        trivial_cover(g, 2)


def test_cover_is_valid_and_trivial_is_power(c2):
    for m in (1, 2, 3):
        cov = build_cover(c2, trivial_cover(c2, m))
        assert validate(cov) == []
        assert partition_sum(cov) == pytest.approx(partition_sum(c2) ** m, rel=1e-9)


def test_cover_census_values(c2):
    zs = [partition_sum(build_cover(c2, s)) for s in enumerate_double_covers(c2)]
    assert zs == [100.0, 82.0, 82.0, 100.0]


def test_crossed_single_edge_is_four_cycle(c2):
    spec = CoverSpec(2, {"e1": (1, 0), "e2": (0, 1)})
    cov = build_cover(c2, spec)
    assert partition_sum(cov) == pytest.approx(3.0**4 + 1.0, rel=1e-12)
    assert partition_sum(cov) == pytest.approx(brute_z(cov), rel=1e-12)


def test_crossing_both_edges_relabels(c2):
    spec = CoverSpec(2, {"e1": (1, 0), "e2": (1, 0)})
    assert partition_sum(build_cover(c2, spec)) == pytest.approx(100.0, rel=1e-12)


def test_enumerate_double_covers_order(c2):
    specs = list(enumerate_double_covers(c2))
    assert len(specs) == 4
    assert specs[0].perms == trivial_cover(c2, 2).perms
    assert [cover_mask(c2, s) for s in specs] == [0, 1, 2, 3]


def test_enumerate_double_covers_self_loop(self_loop):
    assert len(list(enumerate_double_covers(self_loop))) == 2


def test_enumerate_cap(c2):
    with pytest.raises(EnumerationCapExceeded):
        list(enumerate_double_covers(c2, enumeration_cap=2))


def test_self_loop_cover_values(self_loop):
    zs = [partition_sum(build_cover(self_loop, s)) for s in enumerate_double_covers(self_loop)]
    assert zs == [16.0, 10.0]  # disjoint squares vs trace of the squared matrix


def test_malformed_permutation(c2):
    with pytest.raises(MalformedPermutation):
        build_cover(c2, CoverSpec(2, {"e1": (0, 0), "e2": (0, 1)}))
    with pytest.raises(MalformedPermutation):
        build_cover(c2, CoverSpec(2, {"e1": (0, 1)}))


def test_sample_cover_deterministic(c2):
    assert sample_cover(c2, 2, 42).perms == sample_cover(c2, 2, 42).perms
    assert sample_cover(c2, 1, 7).perms == {"e1": (0,), "e2": (0,)}


def test_sample_cover_crossing_frequency(c2):
    crossings = {"e1": 0, "e2": 0}
    n = 10000
    for seed in range(n):
        spec = sample_cover(c2, 2, seed)
        for eid in crossings:
            crossings[eid] += spec.perms[eid] == (1, 0)
    for eid, count in crossings.items():
        assert abs(count / n - 0.5) < 0.02


def test_bethe_m_exact_values(c2):
    assert bethe_m(c2, 1).value == pytest.approx(10.0, rel=1e-12)
    assert bethe_m(c2, 2).value == pytest.approx(math.sqrt(91.0), rel=1e-12)
    # 36 labeled 3-covers: identity/transposition/3-cycle census 1000/820/730
    expected = ((1000.0 + 3 * 820.0 + 2 * 730.0) / 6.0) ** (1.0 / 3.0)
    assert bethe_m(c2, 3).value == pytest.approx(expected, rel=1e-12)


def test_bethe_m_exact_equals_double_cover_mean(c2):
    zs = [partition_sum(build_cover(c2, s)) for s in enumerate_double_covers(c2)]
    assert bethe_m(c2, 2).value == pytest.approx(math.sqrt(sum(zs) / len(zs)), rel=1e-12)


def test_bethe_m_monte_carlo(c2):
    est = bethe_m(c2, 2, mode="monte-carlo", samples=2000, seed=123)
    assert est.stderr is not None and est.stderr > 0
    assert abs(est.value - math.sqrt(91.0)) < 3 * est.stderr


def test_bethe_m_cap(c2):
    with pytest.raises(EnumerationCapExceeded):
        bethe_m(c2, 3, enumeration_cap=35)


def test_check_ruozzi_exact(c2):
    report = check_ruozzi(c2, 2, mode="exact")
    assert report.ok
    assert report.covers_checked == 4
    assert report.max_ratio == pytest.approx(1.0, rel=1e-12)


def test_check_ruozzi_sampled(c2):
    report = check_ruozzi(c2, 3, mode="monte-carlo", samples=200, seed=5)
    assert report.ok
    assert report.covers_checked == 200
    assert report.max_ratio <= 1.0 + 1e-9


def test_check_ruozzi_rejects_submodular():
    g = make_nfg(
        "sub",
        [("e1", 2), ("e2", 2)],
        [("f1", ("e1", "e2"), [1, 2, 2, 1]), ("f2", ("e1", "e2"), [2, 1, 1, 2])],
    )
    with pytest.raises(NotLogSupermodular):
        check_ruozzi(g, 2)


def test_degree_m_average_bounded_by_z_for_lsm():
    from nfgcover import GeneratorSpec, gen_instance

    for seed in range(6):
        nfg = gen_instance(
            GeneratorSpec(seed=seed, topology="cycle", factors=3, equality_fraction=0.3),
            lsm=True,
        )
        z = partition_sum(nfg)
        for m in (2, 3):
            assert bethe_m(nfg, m).value <= z * (1.0 + 1e-9)


def test_gauge_invariance_of_factor_relabeling():
    """Toggling the crossing of all non-self-loop edges at one factor
    relabels its two copies, leaving the cover partition sum unchanged."""
    from conftest import random_binary_nfg

    for seed in range(8):
        nfg = random_binary_nfg(seed)
        endpoints = nfg.endpoints()
        target = 0  # first factor
        touched = 0
        for i, e in enumerate(nfg.edges):
            (f1, _), (f2, _) = endpoints[e.id]
            if (f1 == target) != (f2 == target):
                touched |= 1 << i
        if touched == 0:
            continue
        for mask in range(2 ** len(nfg.edges)):
            z1 = partition_sum(build_cover(nfg, double_cover_from_mask(nfg, mask)))
            z2 = partition_sum(build_cover(nfg, double_cover_from_mask(nfg, mask ^ touched)))
            assert z1 == pytest.approx(z2, rel=1e-9)
