import numpy as np
import pytest

from nfgcover import GeneratorSpec, gen_instance, is_log_supermodular, validate
from nfgcover.errors import UnrealizableTopology
from nfgcover.io import dumps_nfg


def test_deterministic_output():
    spec = GeneratorSpec(seed=17, topology="random-regular", factors=4, degree=3,
                         equality_fraction=0.3)
    assert dumps_nfg(gen_instance(spec)) == dumps_nfg(gen_instance(spec))


def test_symmetric_cycle_matches_c2_form():
    import math

    spec = GeneratorSpec(seed=1, topology="cycle", factors=2, strength=math.log(2.0),
                         symmetric=True)
    nfg = gen_instance(spec, lsm=True)
    assert len(nfg.edges) == 2 and len(nfg.factors) == 2
    for f in nfg.factors:
        t = f.table
        assert t[0, 0] == t[1, 1] and t[0, 1] == t[1, 0]
        assert t[0, 0] >= t[0, 1]
        assert t[0, 0] <= 2.0 + 1e-12


def test_lsm_instances_certified():
    passed = 0
    for seed in range(100):
        topo = ["cycle", "ladder", "random-regular"][seed % 3]
        n = {"cycle": 4, "ladder": 4, "random-regular": 4}[topo]
        spec = GeneratorSpec(seed=seed, topology=topo, factors=n,
                             equality_fraction=0.25)
        nfg = gen_instance(spec, lsm=True)
        assert validate(nfg) == []
        assert all(is_log_supermodular(f.table) for f in nfg.factors)
        passed += 1
    assert passed == 100


def test_topology_edge_counts():
    assert len(gen_instance(GeneratorSpec(seed=0, topology="cycle", factors=5)).edges) == 5
    assert len(gen_instance(GeneratorSpec(seed=0, topology="ladder", factors=4)).edges) == 6
    g = gen_instance(GeneratorSpec(seed=0, topology="random-regular", factors=4, degree=3))
    assert len(g.edges) == 6
    assert len(gen_instance(GeneratorSpec(seed=0, topology="tree", factors=7), lsm=False).edges) == 6


def test_degree4_nodes_become_equality_in_lsm_mode():
    g = gen_instance(GeneratorSpec(seed=3, topology="random-regular", factors=3, degree=4))
    from nfgcover.graph import is_equality_factor

    assert all(is_equality_factor(f) for f in g.factors)
    assert validate(g) == []


def test_unrealizable_topologies():
    with pytest.raises(UnrealizableTopology):
        gen_instance(GeneratorSpec(seed=0, topology="ladder", factors=3))
    with pytest.raises(UnrealizableTopology):
        gen_instance(GeneratorSpec(seed=0, topology="random-regular", factors=3, degree=3))
    with pytest.raises(UnrealizableTopology):
        gen_instance(GeneratorSpec(seed=0, topology="tree", factors=1))
    with pytest.raises(UnrealizableTopology):
        gen_instance(GeneratorSpec(seed=0, topology="torus", factors=4))


def test_degree3_rejection_sampler_yields_lsm():
    from nfgcover.generators import draw_lsm_degree3

    rng = np.random.default_rng(5)
    for _ in range(50):
        t = draw_lsm_degree3(rng, strength=1.0)
        assert t.shape == (2, 2, 2)
        assert is_log_supermodular(t)
