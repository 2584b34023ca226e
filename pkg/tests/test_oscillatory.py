import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wfkit import catalog, oscillatory as osc
from wfkit import geometry as geo
from wfkit.conic import Tolerance
from wfkit.core import angle_between
from wfkit.errors import MalformedInput


# ---------------------------------------------------------------- phases

@pytest.mark.parametrize("ident", osc.PHASE_IDS + ("circle:r=0.5",))
def test_phase_checks(ident):
    hom, grad = osc.phase_from_id(ident).check(samples=64, seed=3)
    assert hom <= 1e-9
    assert grad <= 1e-6


def test_phase_ids_rejected():
    for bad in ("blob", "circle:q=1", "circle:r=x", "linear:[[", "linear:5",
                "linear:[[]]", "linear:[[[1,0.5]]]", "linear:[[[1,1]],[[1,1,1]]]"):
        with pytest.raises(MalformedInput):
            osc.phase_from_id(bad)


def test_linear_phase_evaluates_polynomials():
    # phi = (x1^2 + x2^2 - 1) xi, same as the circle phase.
    p = osc.phase_from_id("linear:[[[1,2,0],[1,0,2],[-1,0,0]]]")
    c = osc.circle_phase()
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, xi = rng.normal(size=2), rng.normal(size=1)
        assert math.isclose(float(p.phi(x, xi)), float(c.phi(x, xi)), abs_tol=1e-12)
        assert np.allclose(p.dx_phi(x, xi), c.dx_phi(x, xi), atol=1e-12)


# ------------------------------------------------------ critical directions

@given(phi=st.floats(0, 2 * math.pi))
def test_circle_critical_on_and_off(phi):
    p = osc.circle_phase()
    x = np.array([math.cos(phi), math.sin(phi)])
    crit = osc.critical_directions(p, x)
    assert sorted(float(c[0]) for c in crit) == [-1.0, 1.0]
    assert osc.critical_directions(p, 1.2 * x) == []
    assert osc.critical_directions(p, 0.7 * x) == []


@given(v=st.tuples(*[st.floats(-1, 1)] * 3), lam=st.floats(0.1, 3))
def test_wightman_critical_direction(v, lam):
    xi0 = np.array(v)
    if np.linalg.norm(xi0) < 1e-3:
        return
    x = np.concatenate([[lam * np.linalg.norm(xi0)], -lam * xi0])
    p = osc.wightman_phase()
    crit = osc.critical_directions(p, x)
    target = xi0 / np.linalg.norm(xi0)
    assert any(np.allclose(c, target, atol=1e-8) for c in crit)
    for c in crit:
        assert np.linalg.norm(p.dxi_phi(x, c)) < 1e-8


def test_wightman_off_cone_has_no_critical_direction():
    p = osc.wightman_phase()
    assert osc.critical_directions(p, np.array([0.5, 1.0, 0.0, 0.0])) == []
    assert osc.critical_directions(p, np.array([2.0, 1.0, 0.0, 0.0])) == []


# ----------------------------------------------------------------- bounds

def test_circle_bound_matches_conormal_both_ways():
    p = osc.circle_phase()
    base = osc.lattice_near_critical(p, 1.5, 0.1)
    assert len(base) > 0
    assert np.allclose(np.linalg.norm(base, axis=1), 1.0, atol=1e-8)
    b = osc.wf_bound_from_phase(p, base)
    cb = geo.conormal_bundle(geo.circle())
    tol = Tolerance(1e-6, math.radians(10))
    for x, k in zip(b.points, b.directions):
        assert cb.member(x, k, tol)
    # Every conormal probe is covered by a nearby sample in both directions.
    spacing = np.max(np.diff(np.sort(np.arctan2(base[:, 1], base[:, 0]))))
    for phi in 2 * math.pi * (np.arange(64) + 0.5) / 64:
        x = np.array([math.cos(phi), math.sin(phi)])
        for s in (1, -1):
            near = np.linalg.norm(b.points - x, axis=1) <= spacing + 1e-9
            ang = [angle_between(k, s * x) for k in b.directions[near]]
            assert ang and min(ang) <= math.radians(10)


def test_bound_directions_are_unit_and_nonzero():
    p = osc.circle_phase()
    b = osc.wf_bound_from_phase(p, [[1.0, 0.0], [0.0, -1.0]])
    assert len(b) == 4
    assert np.allclose(np.linalg.norm(b.directions, axis=1), 1.0)
    # Scaling the generating fiber point leaves the emitted direction unchanged.
    for x, k, xi in zip(b.points, b.directions, b.extra["xi"]):
        for lam in (0.5, 3.0):
            q = -np.asarray(p.dx_phi(x, lam * np.asarray(xi)))
            assert np.allclose(q / np.linalg.norm(q), k, atol=1e-12)


def test_wightman_samples_lightlike_and_orthogonal():
    pts = osc.light_cone_samples(300, seed=5)
    fut = pts[pts[:, 0] > 0]
    b = osc.wf_bound_from_phase(osc.wightman_phase(), fut)
    assert len(b) >= len(fut)
    k = b.directions
    assert np.all(np.abs(k[:, 0] - np.linalg.norm(k[:, 1:], axis=1)) <= 1e-8)
    x = b.points
    assert np.all(np.abs(k[:, 0] * x[:, 0] + np.sum(k[:, 1:] * x[:, 1:], axis=1)) <= 1e-8)
    exact = catalog.exact_wf(catalog.from_id("wightman"))
    tol = Tolerance(1e-9, 1e-7)
    assert all(exact.member(xx, kk, tol) for xx, kk in zip(x, k))


def test_no_critical_set_gives_empty_bound():
    p = osc.phase_from_id("linear:[[[1,2,0],[1,0,2],[1,0,0]]]")
    g = np.stack(np.meshgrid(np.linspace(-1, 1, 9), np.linspace(-1, 1, 9)), -1).reshape(-1, 2)
    b = osc.wf_bound_from_phase(p, g)
    assert len(b) == 0 and b.extra["degenerate"] == []


def test_degenerate_points_are_reported():
    # phi = x1^2 xi is critical where x1 = 0, and d_x phi vanishes there too.
    p = osc.phase_from_id("linear:[[[1,2,0]]]")
    b = osc.wf_bound_from_phase(p, [[0.0, 0.3], [0.0, -0.4]])
    assert len(b) == 0
    assert len(b.extra["degenerate"]) == 2


# ----------------------------------------------------------------- Feynman

def test_feynman_examples():
    for x, k in (([1.0, 1.0, 0.0, 0.0], [1.0, -1.0, 0.0, 0.0]),
                 ([-1.0, 1.0, 0.0, 0.0], [-1.0, -1.0, 0.0, 0.0])):
        a = osc.feynman_route_causal(x)
        _, s, _ = osc.feynman_route_pullback(np.array([x]))
        target = np.array(k) / np.linalg.norm(k)
        assert len(a) == 1 and np.allclose(a[0], target, atol=1e-9)
        assert len(s) >= 1
        assert all(np.allclose(d, target, atol=1e-9) for d in s.directions)
    x = [0.0, 1.0, 0.0, 0.0]
    assert osc.feynman_route_causal(x) == []
    _, s, _ = osc.feynman_route_pullback(np.array([x]))
    assert len(s) == 0


def test_feynman_two_routes_agree():
    rep = osc.feynman_wf_oracle_check(n_samples=1000, seed=0)
    assert rep.ok, rep.witnesses[:3]
    assert rep.n_samples == 1000 and rep.witnesses == []
    assert rep.origin_ok and rep.spacelike_ok


def test_light_cone_samples():
    pts = osc.light_cone_samples(200, seed=1, include_origin=True)
    assert np.allclose(pts[0], 0)
    assert np.allclose(np.abs(pts[1:, 0]), np.linalg.norm(pts[1:, 1:], axis=1))
    assert (pts[1:, 0] > 0).any() and (pts[1:, 0] < 0).any()
    assert np.array_equal(pts, osc.light_cone_samples(200, seed=1, include_origin=True))
