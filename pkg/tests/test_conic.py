import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wfkit import catalog, conic
from wfkit.conic import (EXACT_TOL, Everywhere, Line, Nowhere, Points, ProductUndefined,
                         SampledSet, Tolerance, Verdict, hormander_check, kernel_wf_from_difference,
                         member, oplus, product_wf_bound, pullback_wf, tensor_wf, union)


def wf(ident):
    return catalog.exact_wf(catalog.from_id(ident))


def supp(ident):
    return catalog.support(catalog.from_id(ident))


TOL = Tolerance(1e-6, 1e-6)


# ------------------------------------------------------------- membership

def test_member_examples():
    d = wf("delta")
    assert member(d, [0.0], [5.0])
    assert not member(d, [1.0], [5.0])
    assert not member(wf("bv+"), [0.0], [1.0])
    assert member(wf("bv+"), [0.0], [-1.0])


def test_member_rejects_zero_covector():
    with pytest.raises(ValueError):
        member(wf("delta"), [0.0], [0.0])


def test_sampled_set_rejects_zero_direction():
    with pytest.raises(ValueError):
        SampledSet(2, [[0, 0]], [[0, 0]])


def test_sampled_membership_rule():
    s = SampledSet(2, [[0.0, 0.0]], [[1.0, 0.0]])
    t = Tolerance(0.1, math.radians(10))
    assert s.member([0.05, 0.0], [1.0, 0.1], t)
    assert not s.member([0.2, 0.0], [1.0, 0.0], t)
    assert not s.member([0.0, 0.0], [1.0, 1.0], t)


IDS = ["delta", "delta:dim=2", "heaviside", "bv+", "bv-", "sum:a=1.0", "tensor-delta-1",
       "tensor-delta-2", "halfplane", "disk:r=1.0"]


@pytest.mark.parametrize("ident", IDS)
@given(lam=st.floats(1e-3, 1e3), seed=st.integers(0, 2 ** 16))
def test_positive_scaling_invariance(ident, lam, seed):
    s = wf(ident)
    rng = np.random.default_rng(seed)
    dim = s.dim
    pts = s.base_points(step=0.25)
    x = pts[rng.integers(len(pts))] if len(pts) and rng.random() < 0.7 else rng.uniform(-1.5, 1.5, dim)
    k = rng.normal(size=dim)
    t = Tolerance(1e-3, 0.05)
    assert s.member(x, k, t) == s.member(x, lam * k, t)


@pytest.mark.parametrize("ident", IDS)
@given(seed=st.integers(0, 2 ** 16), f=st.floats(0.0, 1.0))
def test_shrinking_tolerance_never_adds_members(ident, seed, f):
    s = wf(ident)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.2, 1.2, s.dim)
    k = rng.normal(size=s.dim)
    t = Tolerance(0.2, 0.3)
    if s.member(x, k, t.shrunk(f)):
        assert s.member(x, k, t)


# ------------------------------------------------------------------ union

def test_union_shifted_sum_example():
    a = 1.0
    shifted = conic.ExactSet(1, lambda x, k, t: k[0] > 0, lambda x, t: np.array([[1.0]]),
                             Points.of([-a]), tag="WF(1/(x+a-i0))")
    u = union(wf("bv+"), shifted)
    target = wf("sum:a=1.0")
    for x in ([0.0], [-1.0], [0.5]):
        for k in ([1.0], [-1.0]):
            assert u.member(x, k, TOL) == target.member(x, k, TOL)


def _random_sampled(rng, n):
    pts = rng.integers(-2, 3, size=(n, 2)) * 0.5
    dirs = rng.normal(size=(n, 2))
    return SampledSet(2, pts, dirs)


def _probe(rng, m=40):
    return [(rng.integers(-2, 3, size=2) * 0.5, rng.normal(size=2)) for _ in range(m)]


@given(seed=st.integers(0, 2 ** 16))
def test_union_laws_sampled(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (_random_sampled(rng, rng.integers(0, 6)) for _ in range(3))
    t = Tolerance(1e-9, 0.4)
    probes = _probe(rng) + [(x, k) for x, k in zip(a.points, a.directions)]
    for x, k in probes:
        ab, ba = union(a, b).member(x, k, t), union(b, a).member(x, k, t)
        assert ab == ba
        assert union(union(a, b), c).member(x, k, t) == union(a, union(b, c)).member(x, k, t)
        assert union(a, a).member(x, k, t) == a.member(x, k, t)
        assert union(a, SampledSet.empty(2)).member(x, k, t) == a.member(x, k, t)
    assert len(union(a, a)) == len(a)


def test_union_laws_exact():
    a, b = wf("tensor-delta-1"), wf("halfplane")
    rng = np.random.default_rng(1)
    for x, k in _probe(rng, 200):
        x = np.where(rng.random(2) < 0.5, 0.0, x)
        assert union(a, b).member(x, k, TOL) == union(b, a).member(x, k, TOL)
        assert union(a, a).member(x, k, TOL) == a.member(x, k, TOL)


def test_union_dim_mismatch():
    with pytest.raises(ValueError):
        union(wf("delta"), wf("halfplane"))


# ------------------------------------------------------------------- oplus

def test_oplus_delta_delta_hits_zero_section():
    s = oplus(wf("delta"), wf("delta"))
    assert (0.0,) in s.zero_hits


def test_oplus_bv_plus_no_zero_hit():
    s = oplus(wf("bv+"), wf("bv+"))
    assert s.zero_hits == ()
    assert s.member([0.0], [-1.0], TOL)
    assert not s.member([0.0], [1.0], TOL)


def test_oplus_with_empty_is_empty():
    s = oplus(wf("bv+"), SampledSet.empty(1))
    assert s.is_empty()
    assert not s.member([0.0], [-1.0], TOL)


# -------------------------------------------------------------- hormander

@pytest.mark.parametrize("a,b,ok", [
    ("delta", "delta", False), ("heaviside", "heaviside", False), ("bv+", "bv+", True),
    ("bv-", "bv-", True), ("bv+", "bv-", False), ("tensor-delta-1", "tensor-delta-2", True),
    ("halfplane", "halfplane", False), ("halfplane", "tensor-delta-1", True)])
def test_hormander_examples_and_symmetry(a, b, ok):
    v = hormander_check(wf(a), wf(b))
    assert v.ok is ok
    assert hormander_check(wf(b), wf(a)).ok is ok
    if not ok:
        x, k = v.witness
        assert wf(a).member(x, k, TOL) and wf(b).member(x, -np.asarray(k), TOL)


def test_delta_witness_at_origin():
    v = hormander_check(wf("delta"), wf("delta"))
    assert v.witness[0] == (0.0,)


@given(seed=st.integers(0, 2 ** 16))
def test_hormander_symmetry_sampled(seed):
    rng = np.random.default_rng(seed)
    a, b = _random_sampled(rng, rng.integers(0, 5)), _random_sampled(rng, rng.integers(0, 5))
    t = Tolerance(1e-9, 0.3)
    assert hormander_check(a, b, tol=t).ok == hormander_check(b, a, tol=t).ok


def test_verdict_invariant():
    with pytest.raises(ValueError):
        Verdict(False, None)
    with pytest.raises(ValueError):
        Verdict(True, ((0.0,), (1.0,)))


# ----------------------------------------------------------- product bound

def test_product_bound_delta1_delta2():
    b = product_wf_bound(wf("tensor-delta-1"), supp("tensor-delta-1"),
                         wf("tensor-delta-2"), supp("tensor-delta-2"))
    for k in [(1, 1), (1, -2), (-3, 1), (1, 0), (0, -1), (-1, 0), (0, 1)]:
        assert b.member([0.0, 0.0], k, TOL)
    for x in [(0.5, 0.0), (0.0, 0.5), (-1.0, 0.0), (0.3, 0.3)]:
        for k in [(1, 0), (0, 1), (1, 1)]:
            assert not b.member(x, k, TOL)


def test_product_bound_smooth_factor_returns_other():
    u = wf("halfplane")
    b = product_wf_bound(u, supp("halfplane"), SampledSet.empty(2), Everywhere(2))
    rng = np.random.default_rng(3)
    for _ in range(300):
        x = rng.uniform(-1, 1, 2)
        if rng.random() < 0.5:
            x[1] = 0.0
        k = rng.normal(size=2)
        assert b.member(x, k, TOL) == u.member(x, k, TOL)


def test_product_bound_both_empty():
    b = product_wf_bound(SampledSet.empty(1), Everywhere(1), SampledSet.empty(1), Everywhere(1))
    assert b.is_empty()
    assert not b.member([0.0], [1.0], TOL)


def test_product_bound_refuses_violation():
    with pytest.raises(ProductUndefined):
        product_wf_bound(wf("delta"), supp("delta"), wf("delta"), supp("delta"))


def test_product_bound_bv_square():
    b = product_wf_bound(wf("bv+"), supp("bv+"), wf("bv+"), supp("bv+"))
    assert b.member([0.0], [-1.0], TOL)
    assert not b.member([0.0], [1.0], TOL)


# ---------------------------------------------------------------- pullback

def _minkowski(x):
    return np.array([x[0] ** 2 - x[1:] @ x[1:]])


def _minkowski_jac(x):
    return np.concatenate([[2 * x[0]], -2 * x[1:]])[None, :]


def test_pullback_light_cone():
    rng = np.random.default_rng(0)
    d = rng.normal(size=(50, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rng.uniform(0.2, 2, 50)
    s = np.where(rng.random(50) < 0.5, -1, 1)
    pts = np.column_stack([s * r, r[:, None] * d])
    pulled, samples, verdict = pullback_wf(_minkowski, _minkowski_jac, wf("bv-"), pts,
                                           tol=Tolerance(1e-9, 1e-9))
    assert verdict.ok
    assert len(samples) == 50
    for x, k in zip(samples.points, samples.directions):
        target = np.concatenate([[x[0]], -x[1:]])
        assert np.allclose(k, target / np.linalg.norm(target), atol=1e-12)
    assert pulled.member([1.0, 1.0, 0, 0], [1.0, -1.0, 0, 0], Tolerance(1e-9, 1e-9))
    assert not pulled.member([1.0, 1.0, 0, 0], [-1.0, 1.0, 0, 0], Tolerance(1e-9, 1e-9))


def test_pullback_identity():
    u = wf("bv+")
    pulled, samples, verdict = pullback_wf(lambda x: x, lambda x: np.eye(1), u, [[0.0], [0.5]])
    assert verdict.ok
    for x in ([0.0], [0.5]):
        for k in ([1.0], [-1.0]):
            assert pulled.member(x, k, TOL) == u.member(x, k, TOL)


def test_pullback_constant_map_hits_nf():
    _, _, verdict = pullback_wf(lambda x: np.zeros(1), lambda x: np.zeros((1, 2)), wf("delta"),
                                [[0.3, 0.4]])
    assert not verdict.ok
    assert verdict.witness is not None


# ------------------------------------------------------------------ tensor

def test_tensor_one_theta():
    t = tensor_wf(SampledSet.empty(1), Everywhere(1), wf("heaviside"), supp("heaviside"))
    for x1 in (-1.0, 0.0, 0.7):
        assert t.member([x1, 0.0], [0.0, 1.0], TOL)
        assert t.member([x1, 0.0], [0.0, -2.0], TOL)
        assert not t.member([x1, 0.0], [1.0, 1.0], TOL)
        assert not t.member([x1, 0.3], [0.0, 1.0], TOL)


def test_tensor_delta_delta_pieces():
    t = tensor_wf(wf("delta"), supp("delta"), wf("delta"), supp("delta"))
    for k in [(1, 1), (1, -1), (1, 0), (0, 1), (-2, 3)]:
        assert t.member([0.0, 0.0], k, TOL)
    assert not t.member([0.5, 0.0], [1.0, 0.0], TOL)


def test_tensor_smooth_smooth_empty():
    t = tensor_wf(SampledSet.empty(1), Everywhere(1), SampledSet.empty(1), Everywhere(1))
    assert t.is_empty()


# -------------------------------------------------------- difference kernel

def test_kernel_from_delta():
    s = kernel_wf_from_difference(wf("delta"))
    for x in (-0.5, 0.0, 1.2):
        assert s.member([x, x], [1.0, -1.0], TOL)
        assert s.member([x, x], [-3.0, 3.0], TOL)
        assert not s.member([x, x], [1.0, 1.0], TOL)
        assert not s.member([x, x + 0.5], [1.0, -1.0], TOL)


def test_kernel_from_empty():
    assert kernel_wf_from_difference(SampledSet.empty(1)).is_empty()


def test_kernel_from_bv_plus():
    s = kernel_wf_from_difference(wf("bv+"))
    assert s.member([0.3, 0.3], [-1.0, 1.0], TOL)
    assert not s.member([0.3, 0.3], [1.0, -1.0], TOL)
