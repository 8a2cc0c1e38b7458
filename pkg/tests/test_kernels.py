import numpy as np
import pytest

from paretoflow import kernels
from paretoflow._accel import HAVE_NUMBA, get_backend, set_backend

from .helpers import random_sets


def both(fn, *args):
    out = {}
    for b in ["numpy"] + (["numba"] if HAVE_NUMBA else []):
        prev = set_backend(b)
        try:
            out[b] = fn(*args)
        finally:
            set_backend(prev)
    return out


def test_set_backend_roundtrip():
    prev = set_backend("numpy")
    assert get_backend() == "numpy"
    assert set_backend(prev) == "numpy"
    with pytest.raises(ValueError):
        set_backend("cuda")


def test_layers_agree_between_backends():
    rng = np.random.default_rng(0)
    for F in random_sets(rng, 40, max_n=120):
        for k in (-1, 1, 3):
            out = both(kernels.dominance_layers, F, k)
            ref = out["numpy"]
            for v in out.values():
                assert np.array_equal(v, ref)


def test_min_sq_dist_agree():
    rng = np.random.default_rng(1)
    for _ in range(30):
        d = int(rng.integers(1, 5))
        X, Y = rng.random((int(rng.integers(1, 60)), d)), rng.random((int(rng.integers(1, 60)), d))
        for plus in (False, True):
            out = both(kernels.min_sq_dist, X, Y, plus)
            for v in out.values():
                np.testing.assert_allclose(v, out["numpy"], rtol=1e-12, atol=1e-15)


def test_edit_distance_agree_and_known_values():
    assert kernels.edit_distance(np.array([0, 1]), np.array([0, 2])) == 1
    assert kernels.edit_distance(np.array([], dtype=np.int64), np.array([1, 2, 3])) == 3
    rng = np.random.default_rng(2)
    for _ in range(30):
        a, b = rng.integers(0, 4, int(rng.integers(0, 12))), rng.integers(0, 4, int(rng.integers(0, 12)))
        out = both(kernels.edit_distance, a, b)
        assert len(set(out.values())) == 1


@pytest.mark.parametrize("d", [2, 3])
def test_hypervolume_agree(d):
    rng = np.random.default_rng(3 + d)
    fn = kernels.hypervolume_2d if d == 2 else kernels.hypervolume_3d
    for _ in range(30):
        P = rng.random((int(rng.integers(1, 30)), d))
        out = both(fn, P, np.zeros(d))
        for v in out.values():
            assert v == pytest.approx(out["numpy"], rel=1e-12, abs=1e-15)
