import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wfkit import catalog
from wfkit import radon as rd
from wfkit.core import SampledField, Window, angle_between, centered_grid
from wfkit.errors import ParameterError


def field(ident, n=256):
    d = catalog.from_id(ident)
    g = centered_grid(2, 3.0, n)
    return catalog.sample(d, g)


def gaussian(n=256, c=(0.1, -0.05)):
    g = centered_grid(2, 3.0, n)
    X, Y = g.coords()
    return SampledField(g, np.exp(-((X - c[0]) ** 2 + (Y - c[1]) ** 2) / (2 * 0.15 ** 2)))


W = Window((0.0, 0.0), 0.3, 0.6)


def _mass_error(f, theta):
    w = Window((0.2, -0.1), 0.3, 0.6)
    prof = rd.radon(f, w, [math.cos(theta), math.sin(theta)])
    total = f.grid.h ** 2 * np.sum(f.values * w.on_grid(f.grid))
    return abs(prof.integral() - total) / abs(total)


@given(theta=st.floats(0, 2 * math.pi))
def test_mass_consistency_resolved_fields(theta):
    for f in (field("disk:r=1.0"), gaussian()):
        assert _mass_error(f, theta) <= 1e-6


@given(theta=st.floats(0, 2 * math.pi))
def test_mass_consistency_node_sampled_halfplane(theta):
    assert _mass_error(field("halfplane"), theta) <= 1e-6


def test_zero_field():
    g = centered_grid(2, 3.0, 256)
    f = SampledField(g, np.zeros(g.shape))
    prof = rd.radon(f, W, [0.6, 0.8])
    assert np.all(prof.values == 0)
    assert rd.fourier_slice(f, W, [0.6, 0.8]) == 0.0
    assert len(rd.estimate_wf_pm(f, [[0.0, 0.0]])) == 0


def test_halfplane_profile_jumps_at_zero_for_edge_normal():
    f = field("halfplane")
    prof = rd.radon(f, W, [0.0, 1.0])
    s, v = prof.offsets, prof.values.real
    # Reference: integral of the window along the edge line (the plateau bump is radial).
    t = np.linspace(-0.6, 0.6, 20001)
    ref = np.trapezoid(W.radial(np.abs(t)), t)
    assert np.all(np.abs(v[s < -f.grid.h]) < 1e-12)
    near = (s > f.grid.h) & (s < 0.05)
    assert np.allclose(v[near], ref, rtol=2e-2)
    jump = np.argmax(np.abs(np.diff(v)))
    assert abs(0.5 * (s[jump] + s[jump + 1])) <= f.grid.h


def test_halfplane_profile_smooth_off_normal():
    f = field("halfplane")
    p = rd.RadonParams().resolve(f.grid)
    w = p.window((0.0, 0.0))
    for phi in np.radians([20.0, 45.0, 70.0]):
        nu = [math.sin(phi), math.cos(phi)]
        prof = rd.radon(f, w, nu, m_max=p.m_max)
        assert rd.smoothness(prof, np.zeros(2), f.grid.h, p).smooth
    prof = rd.radon(f, w, [0.0, 1.0], m_max=p.m_max)
    assert not rd.smoothness(prof, np.zeros(2), f.grid.h, p).smooth


def test_fourier_slice_gaussian_and_disk():
    g = gaussian()
    for th in np.linspace(0, math.pi, 7):
        assert rd.fourier_slice(g, W, [math.cos(th), math.sin(th)]) < 1e-6
    d = field("disk:r=1.0")
    w = Window((0.0, 0.0), 1.1, 1.4)
    assert rd.fourier_slice(d, w, [1.0, 0.0], kmax_frac=0.25) < 1e-2


def test_fourier_slice_against_closed_form():
    # Independent route: the windowed Gaussian transform by direct 2D quadrature
    # is compared with the 1D transform of the Radon profile.
    f = gaussian(256)
    nu = np.array([math.cos(0.4), math.sin(0.4)])
    prof = rd.radon(f, W, nu, offset_step=f.grid.h / 8, line_step=f.grid.h / 4)
    X, Y = f.grid.coords()
    img = f.values * W.on_grid(f.grid)
    for k in (0.0, 5.0, 20.0):
        a = f.grid.h ** 2 * np.sum(img * np.exp(1j * k * (nu[0] * X + nu[1] * Y)))
        # The profile integrates the bilinear interpolant, whose transform
        # is the node sum times the hat factor.
        hk = k * f.grid.h / (2 * math.pi)
        a *= np.sinc(hk * nu[0]) ** 2 * np.sinc(hk * nu[1]) ** 2
        w = np.full(len(prof.offsets), prof.step)
        w[0] = w[-1] = prof.step / 2
        b = np.sum(w * prof.values * np.exp(1j * k * prof.offsets))
        assert abs(a - b) < 1e-4 * abs(a)


@pytest.mark.parametrize("theta", [0.3, 0.7, 1.1, 2.0])
def test_fourier_slice_refinement(theta):
    nu = [math.cos(theta), math.sin(theta)]
    coarse = rd.fourier_slice(gaussian(128), W, nu)
    fine = rd.fourier_slice(gaussian(256), W, nu)
    assert fine * 1.5 <= coarse


def test_estimate_pm_halfplane_edge():
    f = field("halfplane")
    s = rd.estimate_wf_pm(f, [[0.0, 0.0], [0.4, 0.0]])
    assert len(s) > 0
    p = rd.RadonParams().resolve(f.grid)
    step = math.pi / p.directions
    for k in s.directions:
        assert min(angle_between(k, [0, 1]), angle_between(k, [0, -1])) <= step + 1e-9
    assert any(angle_between(k, [0, 1]) < 1e-9 for k in s.directions)


def test_estimate_pm_disk_top():
    f = field("disk:r=1.0")
    s = rd.estimate_wf_pm(f, [[0.0, 1.0]])
    assert any(angle_between(k, [0, 1]) < 1e-9 for k in s.directions)
    assert any(angle_between(k, [0, -1]) < 1e-9 for k in s.directions)
    for k in s.directions:
        assert min(angle_between(k, [0, 1]), angle_between(k, [0, -1])) <= math.radians(15)


def test_estimate_pm_smooth_is_empty():
    f = gaussian()
    assert len(rd.estimate_wf_pm(f, [[0.0, 0.0], [0.3, 0.3], [-0.4, 0.2]])) == 0


@pytest.mark.parametrize("ident,pts", [
    ("halfplane", [[0.0, 0.0], [-0.5, 0.02], [0.3, 0.6]]),
    ("disk:r=1.0", [[1.0, 0.0], [0.6, 0.8], [0.0, 0.0], [-0.71, -0.71]])])
def test_estimate_pm_sign_symmetric(ident, pts):
    s = rd.estimate_wf_pm(field(ident), pts)
    keys = {(tuple(np.round(x, 12)), tuple(np.round(k, 12))) for x, k in zip(s.points, s.directions)}
    for x, k in keys:
        assert (x, tuple(np.round(-np.asarray(k), 12) + 0.0)) in keys


def test_sign_symmetrize():
    from wfkit.conic import SampledSet
    s = SampledSet(2, [[0, 0], [0, 0]], [[1, 0], [-1, 0]])
    out = rd.sign_symmetrize(s)
    assert len(out) == 2
    t = rd.sign_symmetrize(SampledSet(2, [[0, 0]], [[0, 1]]))
    assert len(t) == 2


def test_radon_needs_2d():
    g = centered_grid(1, 4.0, 256)
    f = catalog.sample(catalog.from_id("heaviside"), g)
    with pytest.raises(ParameterError):
        rd.estimate_wf_pm(f, [[0.0]])


def test_params_validation():
    g = centered_grid(2, 3.0, 256)
    with pytest.raises(ParameterError):
        rd.RadonParams(directions=2).resolve(g)
    with pytest.raises(ParameterError):
        rd.RadonParams(growth_threshold=1.0).resolve(g)
