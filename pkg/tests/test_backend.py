"""Hot-kernel backends: correctness and compiled/python parity."""

import numpy as np
import pytest

from nsgvd import backend
from nsgvd.backend import _numpy
from nsgvd.rng import substream

try:
    from nsgvd.backend import _core
except ImportError:
    _core = None

IMPLS = [("python", _numpy)] + ([("compiled", _core)] if _core is not None else [])


@pytest.mark.parametrize("name,impl", IMPLS)
def test_hand_case(name, impl):
    a = np.array([[0.0, 0.0], [1.0, 2.0]])
    b = np.array([[1.0, 0.0]])
    np.testing.assert_allclose(impl.pairwise_sqdist(a, b), [[1.0], [4.0]])


@pytest.mark.parametrize("name,impl", IMPLS)
def test_self_variant_exact_symmetry(name, impl):
    rng = substream(1, "backend", name)
    a = rng.standard_normal((7, 5))
    s = impl.pairwise_sqdist_self(a)
    assert (s == s.T).all()
    assert (np.diag(s) == 0.0).all()
    full = impl.pairwise_sqdist(a, a)
    np.testing.assert_allclose(s, full, rtol=1e-12, atol=1e-12)


@pytest.mark.skipif(_core is None, reason="compiled backend not built")
def test_backend_parity():
    rng = substream(2, "parity")
    a = rng.standard_normal((20, 33))
    b = rng.standard_normal((15, 33))
    np.testing.assert_allclose(
        _core.pairwise_sqdist(a, b), _numpy.pairwise_sqdist(a, b), rtol=1e-12, atol=1e-12
    )
    np.testing.assert_allclose(
        _core.pairwise_sqdist_self(a), _numpy.pairwise_sqdist_self(a), rtol=1e-12, atol=1e-12
    )


def test_chunked_fallback_matches_unchunked(monkeypatch):
    rng = substream(3, "chunk")
    a = rng.standard_normal((11, 9))
    b = rng.standard_normal((6, 9))
    expected = _numpy.pairwise_sqdist(a, b)
    monkeypatch.setattr(_numpy, "_BLOCK_ELEMS", 64)  # force many row blocks
    np.testing.assert_allclose(_numpy.pairwise_sqdist(a, b), expected, rtol=0, atol=0)


def test_selected_backend_exposed():
    assert backend.BACKEND in ("compiled", "python")
    a = np.zeros((2, 3))
    assert backend.pairwise_sqdist(a, a).shape == (2, 2)
