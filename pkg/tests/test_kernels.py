import math

import numpy as np
import pytest

from nfgcover.kernels import available_backends
from nfgcover.partition import enumerated

from conftest import random_binary_nfg

BACKENDS = available_backends()


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_backends_agree_on_sums():
    for seed in range(15):
        nfg = random_binary_nfg(seed)
        eg = enumerated(nfg)
        args = eg.kernel_args() + (0, eg.n_configs)
        results = {name: impl.sum_range(*args) for name, impl in BACKENDS.items()}
        a, b = results["python"], results["compiled"]
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_backends_agree_on_values():
    nfg = random_binary_nfg(7)
    eg = enumerated(nfg)
    outs = {}
    for name, impl in BACKENDS.items():
        out = np.empty(eg.n_configs)
        impl.values_range(*eg.kernel_args(), 0, eg.n_configs, out)
        outs[name] = out
    np.testing.assert_allclose(outs["python"], outs["compiled"], rtol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_backends_agree_on_signed_log_sums():
    rng = np.random.default_rng(0)
    from nfgcover import make_nfg

    for trial in range(10):
        vals = rng.uniform(-1.5, 2.0, 8)
        g = make_nfg(
            "s",
            [("a", 2), ("b", 2), ("c", 2)],
            [("f1", ("a", "b", "c"), vals), ("eq", ("a", "b", "c"), np.ones((2, 2, 2)))],
            signed=True,
        )
        eg = enumerated(g)
        args = eg.kernel_args() + (0, eg.n_configs)
        res = {name: impl.signed_log_sum_range(*args) for name, impl in BACKENDS.items()}
        (s1, l1), (s2, l2) = res["python"], res["compiled"]
        assert s1 == s2
        if math.isfinite(l1) or math.isfinite(l2):
            assert l1 == pytest.approx(l2, rel=1e-9)


def test_partial_ranges_compose():
    nfg = random_binary_nfg(11)
    eg = enumerated(nfg)
    for name, impl in BACKENDS.items():
        full = impl.sum_range(*eg.kernel_args(), 0, eg.n_configs)
        mid = eg.n_configs // 3
        split = impl.sum_range(*eg.kernel_args(), 0, mid) + impl.sum_range(
            *eg.kernel_args(), mid, eg.n_configs
        )
        assert split == pytest.approx(full, rel=1e-12)
