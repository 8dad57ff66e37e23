import math

import numpy as np
import pytest

from nfgcover import global_values, make_nfg, partition_sum
from nfgcover.errors import EnumerationCapExceeded, InvalidGraph
from nfgcover.partition import config_digits

from _oracles import brute_z
from conftest import random_binary_nfg


def test_c2_value(c2):
    assert partition_sum(c2) == pytest.approx(10.0, rel=1e-12)
    assert brute_z(c2) == pytest.approx(10.0, rel=1e-12)


def test_self_loop_trace(self_loop):
    assert partition_sum(self_loop) == pytest.approx(4.0, rel=1e-12)


def test_zero_factor_graph():
    z = make_nfg(
        "z0",
        [("e1", 2), ("e2", 2)],
        [("f1", ("e1", "e2"), [0, 0, 0, 0]), ("f2", ("e1", "e2"), [2, 1, 1, 2])],
    )
    assert partition_sum(z) == 0.0
    sign, logz = partition_sum(z, log_domain=True)
    assert sign == 0 and logz == -math.inf


def test_half_edges_summed_like_any_other():
    # one factor with a full self-loop and one half edge
    g = make_nfg(
        "h",
        [("e", 2), ("h", 2, True)],
        [("f", ("e", "e", "h"), np.arange(1.0, 9.0).reshape(2, 2, 2))],
    )
    assert partition_sum(g) == pytest.approx(brute_z(g), rel=1e-12)


def test_matches_brute_force_on_random_instances():
    for seed in range(25):
        nfg = random_binary_nfg(seed)
        assert partition_sum(nfg) == pytest.approx(brute_z(nfg), rel=1e-10)


def test_log_domain_agrees_with_plain():
    for seed in range(10):
        nfg = random_binary_nfg(seed)
        z = partition_sum(nfg)
        sign, logz = partition_sum(nfg, log_domain=True)
        assert sign == 1
        assert math.exp(logz) == pytest.approx(z, rel=1e-9)


def test_log_domain_signed_graph():
    g = make_nfg(
        "signed",
        [("a", 2), ("b", 2)],
        [("f1", ("a", "b"), [3, 1, 1, -2]), ("f2", ("a", "b"), [1, 2, 2, 1])],
        signed=True,
    )
    z = partition_sum(g)
    sign, logz = partition_sum(g, log_domain=True)
    assert sign == (1 if z > 0 else -1)
    assert sign * math.exp(logz) == pytest.approx(z, rel=1e-9)


def test_enumeration_cap():
    edges = [(f"e{i}", 2) for i in range(10)]
    factors = [(f"f{i}", (f"e{i}", f"e{(i + 1) % 10}"), [1, 1, 1, 1]) for i in range(10)]
    ring = make_nfg("ring", edges, factors)
    with pytest.raises(EnumerationCapExceeded):
        partition_sum(ring, enumeration_cap=512)
    assert partition_sum(ring, enumeration_cap=1024) == pytest.approx(2.0**10)


def test_invalid_graph_rejected():
    dangling = make_nfg("bad", [("e", 2)], [])
    with pytest.raises(InvalidGraph):
        partition_sum(dangling)


def test_threads_do_not_change_result():
    nfg = random_binary_nfg(3)
    assert partition_sum(nfg, threads=2) == pytest.approx(partition_sum(nfg), rel=1e-12)
    s1, l1 = partition_sum(nfg, log_domain=True, threads=2)
    s2, l2 = partition_sum(nfg, log_domain=True)
    assert s1 == s2 and l1 == pytest.approx(l2, rel=1e-12)


def test_empty_graph_sums_to_one():
    empty = make_nfg("empty", [], [])
    assert partition_sum(empty) == 1.0


def test_log_domain_beyond_double_range():
    # plain accumulation overflows; the log-domain path must not
    big = math.exp(600.0)  # each factor value; products overflow float64
    g = make_nfg(
        "big",
        [("a", 2), ("b", 2)],
        [("f1", ("a", "b"), [big] * 4), ("f2", ("a", "b"), [big] * 4)],
    )
    assert partition_sum(g) == math.inf
    sign, logz = partition_sum(g, log_domain=True)
    assert sign == 1
    assert logz == pytest.approx(2 * 600.0 + math.log(4.0), rel=1e-12)


def test_three_factor_chain_with_half_edges():
    """A chain of degree-3 factors with dangling half edges at both ends,
    shaped like the usual introductory example graphs."""
    rng = np.random.default_rng(8)
    edges = [("h1", 2, True), ("e2", 2), ("e3", 2), ("e5", 2), ("e6", 2),
             ("h4", 2, True), ("e7", 2), ("e8", 2)]
    factors = [
        ("f1", ("h1", "e2", "e5"), rng.uniform(0.1, 1.5, 8)),
        ("f2", ("e2", "e3", "e6"), rng.uniform(0.1, 1.5, 8)),
        ("f3", ("e3", "h4", "e7"), rng.uniform(0.1, 1.5, 8)),
        ("f4", ("e5", "e6", "e8"), rng.uniform(0.1, 1.5, 8)),
        ("f5", ("e7", "e8"), rng.uniform(0.1, 1.5, 4)),
    ]
    g = make_nfg("chain", edges, factors)
    from nfgcover import validate

    assert validate(g) == []
    assert partition_sum(g) == pytest.approx(brute_z(g), rel=1e-10)


def test_global_values_order_and_sum(c2):
    vals = global_values(c2)
    # enumeration: e1 slowest -> configs (0,0),(0,1),(1,0),(1,1)
    assert list(vals) == [4.0, 1.0, 1.0, 4.0]
    digits = config_digits(c2)
    assert digits.shape == (2, 4)
    assert list(digits[0]) == [0, 0, 1, 1]
    assert list(digits[1]) == [0, 1, 0, 1]
