import pytest
from mpmath import mp

from crosspoly.errors import SingularPointError, UnsupportedRegimeError
from crosspoly.geometry import builtin_weight, eval_weight, perturbed_weight
from crosspoly.harness import fit_decay
from crosspoly.surface import SurfacePoint, trace_w_tau
from crosspoly.szego import compute_c_rho, eval_S, origin_limit, szego_cross_check


@pytest.fixture(scope="module")
def perturbed_data(ctx11):
    with mp.workprec(128):
        return compute_c_rho(perturbed_weight(base="legendre"), ctx11)


@pytest.fixture(scope="module")
def jacobi_data(ctx11):
    with mp.workprec(128):
        return compute_c_rho(builtin_weight("jacobi-quarter"), ctx11)


def test_c_rho_of_symmetric_builtins(ctx11):
    with mp.workprec(128):
        assert abs(compute_c_rho(builtin_weight("legendre"), ctx11).c_rho) < 1e-30
        assert abs(compute_c_rho(builtin_weight("chebyshev"), ctx11).c_rho) < 1e-30
        jac = compute_c_rho(builtin_weight("jacobi-quarter"), ctx11)
        assert abs(jac.c_rho + ctx11.B / 2) < 1e-30


def test_chebyshev_szego_function_is_constant(ctx11):
    with mp.workprec(128):
        data = compute_c_rho(builtin_weight("chebyshev"), ctx11)
        for z in (mp.mpc(0.6, 0.9), mp.mpc(-2, 0.1)):
            assert abs(eval_S(SurfacePoint.at(z, 0), data) - 1) < 1e-30


def test_jump_across_alpha(perturbed_data):
    g = perturbed_data.geometry
    with mp.workprec(128):
        target = mp.expjpi(2 * perturbed_data.c_rho)
        for t in ("0.2", "0.7", "1.3"):
            p = SurfacePoint.at(g.alpha_path(mp.mpf(t)), 0)
            ratio = eval_S(p, perturbed_data, +1) / eval_S(p, perturbed_data, -1)
            assert abs(ratio - target) < 1e-8


def test_jump_across_cross(perturbed_data):
    spec = perturbed_data.spec
    g = spec.geometry
    with mp.workprec(128):
        for i in range(1, 5):
            for tau in (mp.mpf("0.25"), mp.mpf("0.6")):
                s = g.arc_point(i, tau)
                plus = eval_S(SurfacePoint.at(s, 0, +1), perturbed_data)
                # the other side of the lift of the arc lies on sheet 1
                minus = eval_S(SurfacePoint.at(s, 1, -1), perturbed_data)
                rw = eval_weight(spec, i, s) * trace_w_tau(g, i, tau, +1)
                assert abs(plus * rw / minus - 1) < 1e-8


def test_reciprocity(perturbed_data):
    with mp.workprec(128):
        for z in (mp.mpc(0.3, 0.2), mp.mpc(-1.5, 2.0), mp.mpc(0.1, -0.8)):
            p = SurfacePoint.at(z, 0)
            assert abs(eval_S(p, perturbed_data) * eval_S(p.star(), perturbed_data) - 1) < 1e-8


def test_value_at_infinity_is_the_limit(perturbed_data):
    with mp.workprec(128):
        far = eval_S(SurfacePoint.at(mp.mpc(4e6, 3e6), 0), perturbed_data)
        assert abs(far - eval_S(SurfacePoint.infinity(0), perturbed_data)) < 1e-5


def test_shared_nodes_agree_with_mpmath_quadrature(perturbed_data):
    with mp.workprec(128):
        p = SurfacePoint.at(mp.mpc(0.6, 0.9), 0)
        assert abs(eval_S(p, perturbed_data) - szego_cross_check(p, perturbed_data)) < 1e-15


def test_singular_points_are_refused(perturbed_data):
    g = perturbed_data.geometry
    with pytest.raises(SingularPointError):
        eval_S(SurfacePoint.origin(), perturbed_data)
    with pytest.raises(SingularPointError):
        eval_S(SurfacePoint.at(g.arc_point(1, mp.mpf("0.5")), 0), perturbed_data)


def test_endpoint_exponent(perturbed_data):
    g = perturbed_data.geometry
    hs = [mp.mpf(10) ** (-k / 2) for k in range(4, 11)]
    with mp.workprec(128):
        for i in range(1, 5):
            ai = g.endpoint(i)
            vals = [abs(eval_S(SurfacePoint.at(ai * (1 + h * mp.expjpi(0.25)), 0), perturbed_data)) for h in hs]
            slope = -fit_decay([float(h) for h in hs], [float(v) for v in vals])["exponent"]
            assert abs(slope + 0.25) < 0.05


def test_origin_limit_matches_extrapolation(jacobi_data):
    with mp.workprec(128):
        exact = origin_limit(jacobi_data)
        assert abs(exact - origin_limit(jacobi_data, "richardson")) < 1e-6 * abs(exact)


def test_origin_limit_needs_nonzero_exponent(perturbed_data):
    with pytest.raises(UnsupportedRegimeError):
        origin_limit(perturbed_data)
