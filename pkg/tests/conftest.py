import numpy as np
import pytest

from nfgcover import make_nfg


@pytest.fixture
def c2():
    """Two binary edges in a 2-cycle, both factors [2, 1, 1, 2]."""
    return make_nfg(
        "c2",
        [("e1", 2), ("e2", 2)],
        [("f1", ("e1", "e2"), [2, 1, 1, 2]), ("f2", ("e1", "e2"), [2, 1, 1, 2])],
    )


@pytest.fixture
def self_loop():
    """One factor with a binary self-loop, table [2, 1, 1, 2]."""
    return make_nfg("loop", [("e", 2)], [("f", ("e", "e"), [2, 1, 1, 2])])


def random_binary_nfg(seed: int, max_edges: int = 4):
    """Small random non-negative binary instance (mixed topology)."""
    from nfgcover import GeneratorSpec, gen_instance

    rng = np.random.default_rng(seed)
    choices = [
        ("cycle", int(rng.integers(1, max_edges + 1)), 3),
        ("tree", int(rng.integers(2, max_edges + 2)), 3),
        ("random-regular", int(rng.integers(1, max_edges // 2 + 1)) * 2, 2),
    ]
    topology, n, degree = choices[int(rng.integers(0, len(choices)))]
    spec = GeneratorSpec(
        seed=seed, topology=topology, factors=n, degree=degree,
        strength=float(rng.uniform(0.3, 1.0)),
    )
    return gen_instance(spec, lsm=bool(rng.integers(0, 2)))
