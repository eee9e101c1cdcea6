import pytest
from mpmath import mp

from crosspoly.errors import AmbiguousTraceError
from crosspoly.geometry import CrossGeometry
from crosspoly.identities import sample_points
from crosspoly.surface import (
    SurfacePoint,
    abel_map,
    eval_phi,
    eval_w,
    eval_w_trace,
    lattice_reduce,
    theta,
    z_from_abel,
)


def test_w_branch_at_infinity():
    g = CrossGeometry(1, 2)
    z = mp.mpc(300, 170)
    assert abs(eval_w(z, g) / z ** 2 - 1) < 1e-4
    with pytest.raises(AmbiguousTraceError):
        eval_w(mp.mpc(0.5, 0), g)


def test_w_traces_are_opposite():
    g = CrossGeometry(1, 2)
    s = mp.mpc(0, 1.3)
    plus, minus = eval_w_trace(g, 2, s, +1), eval_w_trace(g, 2, s, -1)
    assert abs(plus + minus) < 1e-15
    assert abs(plus ** 2 - (s ** 2 - 1) * (s ** 2 + 4)) < 1e-12


def test_period_b_in_upper_half_plane(ctx11, ctx12):
    for ctx in (ctx11, ctx12):
        assert mp.im(ctx.B) > 0
    # a = b makes the surface symmetric and B purely imaginary
    assert abs(mp.re(ctx11.B)) < 1e-30


def test_omega_tau_are_one_half(ctx12):
    with mp.workprec(128):
        assert abs(ctx12.omega - 0.5) < 1e-25
        assert abs(ctx12.tau - 0.5) < 1e-25


def test_theta_quasi_periodicity(ctx12):
    with mp.workprec(128):
        zeta = mp.mpc("0.17", "0.05")
        B = ctx12.B
        assert abs(theta(zeta + 1, ctx12) - theta(zeta, ctx12)) < 1e-25
        shifted = theta(zeta + B, ctx12) * mp.expjpi(B + 2 * zeta)
        assert abs(shifted - theta(zeta, ctx12)) < 1e-25
        # the zero sits at the half period (1 + B)/2
        assert abs(theta((1 + B) / 2, ctx12)) < 1e-25


def test_lattice_reduce_recovers_integers(ctx12):
    with mp.workprec(128):
        B = ctx12.B
        rest, l, m = lattice_reduce(mp.mpc("0.1", "0.02") + 3 - 2 * B, B)
        assert (l, m) == (3, -2)
        assert abs(rest - mp.mpc("0.1", "0.02")) < 1e-25


def test_abel_map_inverts(ctx12):
    with mp.workprec(128):
        for p in sample_points(ctx12.geometry, count=4, seed=3):
            assert abs(z_from_abel(abel_map(p, ctx12), ctx12) - p.z) < 1e-15


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 0.5)])
def test_phi_at_origin(a, b):
    g = CrossGeometry(a, b)
    with mp.workprec(128):
        target = mp.expj(mp.atan(mp.mpf(a) / b))
        assert abs(eval_phi(SurfacePoint.origin(), g) - target) < 1e-10


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 0.5)])
def test_capacity_normalization(a, b):
    g = CrossGeometry(a, b)
    with mp.workprec(128):
        target = -mp.sqrt(g.A ** 2 + g.B ** 2) / 2
        for z in (mp.mpc(3e12, 1e12), mp.mpc(-2e12, 5e12)):
            assert abs(z / eval_phi(SurfacePoint.at(z, 0), g) - target) < 1e-10


def test_phi_reciprocity_and_growth():
    g = CrossGeometry(1, 2)
    with mp.workprec(128):
        for p in sample_points(g, count=8, seed=5):
            assert abs(eval_phi(p, g) * eval_phi(p.star(), g) - 1) < 1e-10
            if p.sheet == 0:
                assert abs(eval_phi(p, g)) > 1


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 0.5)])
def test_phi_traces_on_cross_have_unit_modulus(a, b):
    g = CrossGeometry(a, b)
    with mp.workprec(128):
        for i in range(1, 5):
            for tau in ("0.1", "0.5", "0.9"):
                s = g.arc_point(i, mp.mpf(tau))
                for side in (+1, -1):
                    assert abs(abs(eval_phi(SurfacePoint.at(s, 0, side), g)) - 1) < 1e-8


def test_phi_changes_sign_across_cycles():
    g = CrossGeometry(1, 2)
    eps = mp.mpf(10) ** -20
    with mp.workprec(128):
        for path in (g.alpha_path, g.beta_path):
            for t in ("0.3", "1.1"):
                z = path(mp.mpf(t))
                inner = eval_phi(SurfacePoint.at(z * (1 - eps), 0), g)
                outer = eval_phi(SurfacePoint.at(z * (1 + eps), 0), g)
                assert abs(inner + outer) < 1e-10
