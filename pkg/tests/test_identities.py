from crosspoly.identities import TOLERANCE, IdentityResult, geometry_identities, run_identities, weight_identities

GEOMETRY_NAMES = {"omega-tau-half", "phi-theta-form", "phi-at-origin", "abel-inverse", "modulus-ratio", "differential-period", "theta-quotient-slope"}
WEIGHT_NAMES = {"phi-special-points", "phi-special-product", "psi-product-limit", "wronskian-origin-0", "wronskian-origin-1", "wronskian-ratio-0", "wronskian-ratio-1"}


def test_result_bookkeeping():
    r = IdentityResult("x", 1.0, 1.0 + 1e-12, 1e-12)
    assert r.ok
    d = IdentityResult("x", 1, 2, 0.5).as_dict()
    assert d["ok"] is False and d["lhs"] == [1.0, 0.0]
    assert TOLERANCE == 1e-8


def test_geometry_identities_hold_off_diagonal(ctx12):
    results = geometry_identities(1, 2, 128, ctx12)
    assert {r.name for r in results} == GEOMETRY_NAMES
    bad = [(r.name, r.residual) for r in results if not r.ok]
    assert not bad


def test_weight_identities_hold(models):
    results = weight_identities(models["perturbed"])
    assert {r.name for r in results} == WEIGHT_NAMES
    bad = [(r.name, r.residual) for r in results if not r.ok]
    assert not bad


def test_weight_identities_skip_infinite_special_points(models):
    # for Chebyshev both z_k sit over infinity and the Phi(z_k) identities do not apply
    assert weight_identities(models["chebyshev"]) == []


def test_full_suite_default_weight():
    results = run_identities(1, 1, 96)
    assert len(results) == len(GEOMETRY_NAMES) + len(WEIGHT_NAMES)
    assert all(r.ok for r in results), [(r.name, r.residual) for r in results]
