import pytest
from mpmath import mp

from crosspoly.asym import AsymptoticModel
from crosspoly.geometry import CrossGeometry, builtin_weight, perturbed_weight
from crosspoly.surface import compute_periods

# filled by test_acceptance; one line per criterion in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(autouse=True)
def _reset_precision():
    # a test that fails inside workprec must not leak its precision into the next one
    prec = mp.prec
    yield
    mp.prec = prec


@pytest.fixture(scope="session")
def ctx11():
    return compute_periods(CrossGeometry(1, 1), 128)


@pytest.fixture(scope="session")
def ctx12():
    return compute_periods(CrossGeometry(1, 2), 128)


@pytest.fixture(scope="session")
def models(ctx11):
    """Asymptotic models of the three builtins and the perturbed weight at a = b = 1."""
    specs = {name: builtin_weight(name) for name in ("chebyshev", "legendre", "jacobi-quarter")}
    specs["perturbed"] = perturbed_weight()
    return {name: AsymptoticModel(spec, prec=128, ctx=ctx11) for name, spec in specs.items()}
