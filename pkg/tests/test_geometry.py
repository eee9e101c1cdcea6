import json

import pytest
from mpmath import mp

from crosspoly.errors import ConfigurationError, DomainError
from crosspoly.geometry import (
    INF_CLASS,
    CrossGeometry,
    builtin_weight,
    compute_nu,
    eval_weight,
    load_weight,
    perturbed_weight,
    principal_nu,
    validate_weight_class,
    weight_from_dict,
)


def test_geometry_rejects_nonpositive_lengths():
    with pytest.raises(DomainError):
        CrossGeometry(0, 1)
    with pytest.raises(DomainError):
        CrossGeometry(1, -2)


def test_arc_parametrization_round_trip():
    g = CrossGeometry(1.5, 0.7)
    for i in range(1, 5):
        s = g.arc_point(i, mp.mpf("0.3"))
        assert abs(g.arc_tau(i, s) - mp.mpf("0.3")) < 1e-14
    with pytest.raises(DomainError):
        g.arc_tau(1, mp.mpc(0, 0.5))


def test_gram_matches_w_squared():
    g = CrossGeometry(1, 2)
    for i in range(1, 5):
        s = g.arc_point(i, mp.mpf("0.4"))
        direct = abs((g.A ** 2 - s ** 2) * (s ** 2 + g.B ** 2))
        assert abs(g.gram(i, mp.mpf("0.4")) - direct) < 1e-12


@pytest.mark.parametrize("name,alpha", [("chebyshev", -0.5), ("legendre", 0), ("jacobi-quarter", -0.25)])
def test_builtin_weights_match_closed_form(name, alpha):
    spec = builtin_weight(name)
    g = spec.geometry
    for i in range(1, 5):
        assert spec.alpha(i) == alpha
        tau = mp.mpf("0.35")
        s = g.arc_point(i, tau)
        # |rho| = |w|^(2 alpha) on every arc
        assert abs(abs(eval_weight(spec, i, s)) - g.gram(i, tau) ** alpha) < 1e-12


@pytest.mark.parametrize("name", ["chebyshev", "legendre", "jacobi-quarter"])
def test_builtins_satisfy_class_conditions(name):
    report = validate_weight_class(builtin_weight(name))
    assert all(report.passed.values()), report.residuals
    assert report.ell == INF_CLASS


def test_perturbed_weight_is_in_class():
    report = validate_weight_class(perturbed_weight())
    assert all(report.passed.values()), report.residuals


def test_origin_exponent_of_builtins():
    assert abs(compute_nu(builtin_weight("chebyshev"))[0]) < 1e-30
    assert abs(compute_nu(builtin_weight("legendre"))[0]) < 1e-30
    assert abs(compute_nu(builtin_weight("jacobi-quarter"))[0] - mp.mpf(1) / 2) < 1e-30


def test_origin_exponent_is_normalized():
    spec = perturbed_weight(1, 2, base="legendre")
    nu, offsets = compute_nu(spec)
    assert -0.5 < mp.re(nu) <= 0.5
    # principal logs agree with the stored branches up to an integer
    raw = principal_nu([spec.rho_at_origin(i) for i in range(1, 5)])
    shift = nu - raw
    assert abs(shift - mp.nint(mp.re(shift))) < 1e-12


def test_weights_do_not_inherit_low_precision():
    with mp.workprec(53):
        low = builtin_weight("legendre")
    high = builtin_weight("legendre")
    with mp.workprec(256):
        assert abs(low.rho(1, mp.mpf("0.3")) - high.rho(1, mp.mpf("0.3"))) < mp.mpf(10) ** -70


def test_weight_from_dict_poly_and_builtin(tmp_path):
    data = {
        "a": 1,
        "b": 2,
        "name": "flat-ish",
        "arcs": [
            {"alpha": 0, "analytic": {"kind": "poly", "coeffs": [1, 0.1]}},
            {"alpha": 0, "analytic": {"kind": "poly", "coeffs": [-1, -0.1]}},
            {"alpha": 0, "analytic": {"kind": "poly", "coeffs": [1, 0.1]}},
            {"alpha": 0, "analytic": {"kind": "poly", "coeffs": [-1, -0.1]}},
        ],
    }
    spec = weight_from_dict(data)
    assert spec.name == "flat-ish" and spec.geometry.b == 2
    s = spec.geometry.arc_point(1, mp.mpf("0.5"))
    assert abs(eval_weight(spec, 1, s) - (1 + mp.mpf("0.1") * s)) < 1e-14

    path = tmp_path / "w.json"
    path.write_text(json.dumps({"builtin": "legendre", "a": 2}))
    loaded = load_weight(path, b=3)
    assert loaded.name == "legendre" and loaded.geometry.a == 2 and loaded.geometry.b == 3


def test_weight_from_dict_rational_and_factored():
    rational = {"alpha": -0.5, "analytic": {"kind": "rational", "num": [2, 1], "den": [3, 1]}}
    factored = {"alpha": -0.5, "analytic": {"kind": "factored", "const": 2, "factors": [[-2, 1], [-3, -1]]}}
    a = weight_from_dict({"arcs": [rational] * 4})
    b = weight_from_dict({"arcs": [factored] * 4})
    s = a.geometry.arc_point(3, mp.mpf("0.25"))
    # same factors, constant 2 against 1
    assert abs(eval_weight(b, 3, s) - 2 * eval_weight(a, 3, s)) < 1e-12


@pytest.mark.parametrize(
    "data",
    [
        {"arcs": []},
        {"arcs": [{"alpha": 0}] * 4, "colour": "red"},
        {"arcs": [{"alpha": -1.5}] * 4},
        {"arcs": [{"alpha": 0, "analytic": {"kind": "spline"}}] * 4},
        {"arcs": [{"alpha": 0, "analytic": {"kind": "poly", "coeffs": [0.5, -1]}}] * 4},
        {"builtin": "hermite"},
    ],
)
def test_weight_from_dict_rejects_bad_input(data):
    with pytest.raises((ConfigurationError, DomainError)):
        weight_from_dict(data)
