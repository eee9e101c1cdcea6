import json

import pytest
from mpmath import mp

from crosspoly.classic import family_for, to_mp
from crosspoly.direct import (
    arc_mass,
    compute_Rn,
    compute_rho_hat,
    direct_Qn,
    pade,
    polynomial_zeros,
    quadrature_moments,
    solution_from_dict,
    solution_to_dict,
    solve_Qn,
    zero_counts,
)
from crosspoly.errors import PrecisionError, ProximityError
from crosspoly.geometry import CrossGeometry, builtin_weight, perturbed_weight


@pytest.fixture(scope="module")
def legendre_moments():
    return quadrature_moments(builtin_weight("legendre"), 33, 128)


def test_moments_converged(legendre_moments):
    assert legendre_moments.k_max == 33
    assert max(legendre_moments.quad_error) < 1e-30


def test_legendre_matches_reference(legendre_moments):
    ref = family_for("legendre")
    with mp.workprec(128):
        for n in (2, 4, 6, 8):
            sol = solve_Qn(legendre_moments, n)
            exact = to_mp(ref(n))
            assert sol.effective_degree == n
            assert max(abs(x - y) for x, y in zip(sol.coeffs, exact)) < 1e-30


def test_degenerate_index_drops_degree(legendre_moments):
    with mp.workprec(128):
        sol = solve_Qn(legendre_moments, 7)
        assert sol.effective_degree == 6
        assert len(sol.padded()) == 8
        assert max(abs(x - y) for x, y in zip(sol.coeffs, solve_Qn(legendre_moments, 6).coeffs)) < 1e-30


def test_solver_needs_enough_moments(legendre_moments):
    with pytest.raises(ValueError):
        solve_Qn(legendre_moments, 20)


def test_precision_error_instead_of_wrong_numbers():
    spec = builtin_weight("chebyshev")
    with pytest.raises(PrecisionError):
        direct_Qn(spec, 40, 64)


def test_remainder_decays_like_inverse_power():
    spec = perturbed_weight()
    sol = direct_Qn(spec, 6, 128)
    with mp.workprec(128):
        r1 = compute_Rn(sol, spec, mp.mpc(200, 50))
        r2 = compute_Rn(sol, spec, mp.mpc(400, 100))
        # R_n = O(z^-(n+1)) up to an O(1/z) correction
        assert abs(mp.log(abs(r1 / r2), 2) - 7) < 0.05


def test_pade_interpolates_at_infinity():
    spec = perturbed_weight()
    sol = direct_Qn(spec, 4, 128)
    approx = pade(sol)
    with mp.workprec(128):
        z = mp.mpc(12, 3)
        rho = compute_rho_hat(spec, z, sol.moments.quadrature)
        err = abs(rho - approx(z))
        # remainder identity R_n = Q_n rho_hat - P_n
        assert abs((rho - approx(z)) * sol(z) - compute_Rn(sol, spec, z)) < 1e-25
        assert err < abs(z) ** -8


def test_points_on_the_cross_are_refused():
    spec = builtin_weight("legendre")
    with pytest.raises(ProximityError):
        compute_rho_hat(spec, mp.mpc(0.5, 0))


def test_arc_masses_sum_to_one():
    g = CrossGeometry(1, 2)
    with mp.workprec(80):
        masses = [arc_mass(g, i) for i in range(1, 5)]
        assert abs(sum(masses) - 1) < 1e-12
        assert abs(masses[0] - masses[2]) < 1e-12
        sym = [arc_mass(CrossGeometry(1, 1), i) for i in range(1, 5)]
        assert all(abs(m - 0.25) < 1e-12 for m in sym)


def test_zeros_and_counts():
    zs = polynomial_zeros([mp.mpc(1), 0, 0, 0, mp.mpc(-1, 0) / 16], 64)
    counts = zero_counts(zs, CrossGeometry(1, 1))
    assert counts == {1: 1, 2: 1, 3: 1, 4: 1}


def test_solution_round_trip_is_exact(tmp_path):
    sol = direct_Qn(perturbed_weight(), 5, 128)
    path = tmp_path / "sol.json"
    path.write_text(json.dumps(solution_to_dict(sol)))
    back = solution_from_dict(json.loads(path.read_text()))
    assert back.n == 5 and back.effective_degree == sol.effective_degree
    with mp.workprec(128):
        assert all(x == y for x, y in zip(back.coeffs, sol.coeffs))
