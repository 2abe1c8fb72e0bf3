import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from hzspf.metrics import evaluate

masks = st.integers(1, 12).flatmap(
    lambda n: st.tuples(arrays(bool, (n, 7)), arrays(bool, (n, 7)))
)


def test_identical():
    m = np.zeros((5, 5), dtype=bool)
    m[1:3] = True
    r = evaluate(m, m)
    assert (r.dsc, r.js) == (1.0, 1.0)


def test_disjoint():
    a = np.zeros((4, 4), dtype=bool)
    a[0] = True
    b = np.zeros((4, 4), dtype=bool)
    b[3] = True
    r = evaluate(a, b)
    assert (r.dsc, r.js) == (0.0, 0.0)


def test_counted_example():
    a = np.zeros(300, dtype=bool)
    b = np.zeros(300, dtype=bool)
    a[:100] = True
    b[50:150] = True
    r = evaluate(a.reshape(15, 20), b.reshape(15, 20))
    assert r.dsc == 0.5
    assert r.js == 50 / 150


def test_empty_conventions():
    z = np.zeros((3, 3), dtype=bool)
    o = np.ones((3, 3), dtype=bool)
    assert evaluate(z, z).dsc == 1.0 and evaluate(z, z).js == 1.0
    assert evaluate(z, o).dsc == 0.0 and evaluate(o, z).js == 0.0


def test_shape_mismatch():
    with pytest.raises(ValueError):
        evaluate(np.zeros((3, 3)), np.zeros((3, 4)))


@given(masks)
def test_against_counter_oracle(pair):
    a, b = pair
    na, nb, both, either = oracles.mask_counts(a.tolist(), b.tolist())
    r = evaluate(a, b)
    if na + nb == 0:
        assert (r.dsc, r.js) == (1.0, 1.0)
        return
    assert r.dsc == 2 * both / (na + nb)
    assert r.js == both / either


@given(masks)
def test_identities_and_symmetry(pair):
    a, b = pair
    r = evaluate(a, b)
    assert r == evaluate(b, a)
    assert 0.0 <= r.js <= r.dsc <= 1.0
    assert abs(r.dsc - 2 * r.js / (1 + r.js)) <= 1e-12
