"""Direct-versus-predicted comparisons and report output.

A run solves for ``Q_n`` from the weight's moments, evaluates the asymptotic
model on a fixed grid and records relative errors, a fitted decay exponent,
zero counts per arc and, optionally, the remainder ``w R_n``.
"""

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from mpmath import mp

from .asym import AsymptoticModel
from .direct import (
    WeightQuadrature,
    arc_mass,
    compute_Rn,
    compute_rho_hat,
    pade,
    polynomial_zeros,
    quadrature_moments,
    solve_Qn,
    zero_counts,
)
from .errors import CrossPolyError, UnsupportedRegimeError
from .precision import DEFAULT_DIRECT_PREC, DEFAULT_SURFACE_PREC
from .surface import eval_w

CIRCLE_POINTS = 20
NEAR_POINTS = 12
NEAR_FRACTION = 0.3
CUT_MARGIN = 0.15
CUT_TAUS = (0.2, 0.5, 0.8)
# R_n cancels by about |Phi|^(-2n) against its integrand; 30 digits leave ample room for n <= 40
REMAINDER_TOL = mp.mpf(10) ** -30


@dataclass(frozen=True)
class Grid:
    """Evaluation points: ``interior`` off the cross and ``cut`` inside the arcs."""

    interior: tuple
    cut: tuple = ()

    def as_dict(self):
        return {"interior": [_pair(z) for z in self.interior], "cut": [_pair(z) for z in self.cut]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(mp.mpc(*p) for p in data["interior"]), tuple(mp.mpc(*p) for p in data.get("cut", [])))


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def default_grid(geometry):
    """20 points on ``|z| = 2 sqrt(a^2 + b^2)``, 12 at distance ``0.3 min(a, b)`` from the cross, 12 on the arcs."""
    g = geometry
    R = 2 * mp.sqrt(g.A ** 2 + g.B ** 2)
    circle = [R * mp.expjpi(2 * (mp.mpf(j) + mp.mpf(1) / 4) / CIRCLE_POINTS) for j in range(CIRCLE_POINTS)]
    d = NEAR_FRACTION * min(g.A, g.B)
    near = []
    for i in range(1, 5):
        ai = g.endpoint(i)
        unit = ai / abs(ai)
        normal = 1j * unit
        # two points beside the arc, on opposite sides, and one past its end
        near.append(g.arc_point(i, mp.mpf("0.3")) + normal * d)
        near.append(g.arc_point(i, mp.mpf("0.6")) - normal * d)
        near.append(ai + unit * d)
    cut = [g.arc_point(i, mp.mpf(t)) for i in range(1, 5) for t in CUT_TAUS]
    return Grid(tuple(circle + near), tuple(cut))


def parse_grid(text, geometry):
    """``"default"``, ``"circle:N:R"`` or a JSON grid file path."""
    if text in (None, "default"):
        return default_grid(geometry)
    if text.startswith("circle:"):
        _, count, radius = text.split(":")
        count, radius = int(count), mp.mpf(radius)
        pts = [radius * mp.expjpi(2 * (mp.mpf(j) + mp.mpf(1) / 4) / count) for j in range(count)]
        return Grid(tuple(pts))
    with open(text) as fh:
        return Grid.from_dict(json.load(fh))


def fit_decay(ns, errors):
    """Least-squares slope of ``log error`` against ``log n``; returns exponent, stderr, residual."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    if len(x) < 2:
        return {"exponent": None, "stderr": None, "residual": None}
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    fitted = A @ coef
    resid = float(np.sqrt(np.mean((y - fitted) ** 2)))
    if len(x) > 2:
        s2 = float(np.sum((y - fitted) ** 2)) / (len(x) - 2)
        stderr = math.sqrt(s2 / float(np.sum((x - x.mean()) ** 2)))
    else:
        stderr = 0.0
    return {"exponent": float(-coef[0]), "intercept": float(coef[1]), "stderr": stderr, "residual": resid}


def rate_band(ns, errors, exponent, width=3.0):
    """Fit ``C n^-exponent`` with the exponent held fixed and report whether
    every error lies within a factor ``width`` of the fitted curve."""
    logs = [math.log(e) + exponent * math.log(n) for n, e in zip(ns, errors)]
    log_c = sum(logs) / len(logs)
    ratios = [e / math.exp(log_c - exponent * math.log(n)) for n, e in zip(ns, errors)]
    inside = all(1 / width <= r <= width for r in ratios)
    return {"constant": math.exp(log_c), "exponent": exponent, "width": width, "ratios": ratios, "inside": inside}


@dataclass
class GridRow:
    n: int
    z: complex
    direct: complex
    predicted0: complex
    predicted1: object

    @property
    def rel_err0(self):
        return abs(self.direct - self.predicted0) / abs(self.direct)

    @property
    def rel_err1(self):
        if self.predicted1 is None:
            return None
        return abs(self.direct - self.predicted1) / abs(self.direct)


@dataclass
class NResult:
    n: int
    effective_degree: int
    sup_err0: float
    sup_err1: object
    cut_err0: object
    cut_err1: object
    remainder_err: object = None
    zero_counts: object = None


@dataclass
class ComparisonReport:
    weight: str
    a: float
    b: float
    n_list: list
    grid: dict
    orders: list
    precisions: dict
    results: list
    decay: dict
    expected_exponent: object
    rows: list = field(default_factory=list, repr=False)
    notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def result(self, n):
        return next(r for r in self.results if r.n == n)

    def sup_errors(self, order=0):
        return [getattr(r, f"sup_err{order}") for r in self.results]

    def to_dict(self, timings=True):
        out = {
            "weight": self.weight,
            "a": self.a,
            "b": self.b,
            "n": self.n_list,
            "grid": self.grid,
            "orders": self.orders,
            "precisions": self.precisions,
            "results": [asdict(r) for r in self.results],
            "decay": self.decay,
            "expected_exponent": self.expected_exponent,
            "notes": self.notes,
        }
        if timings:
            out["timings"] = self.timings
        return out

    def to_json(self, timings=True):
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)

    def write_json(self, path, timings=True):
        with open(path, "w") as fh:
            fh.write(self.to_json(timings) + "\n")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            write_rows(fh, self.rows)


CSV_COLUMNS = ["n", "re z", "im z", "|direct|", "|predicted0|", "|predicted1|", "rel_err0", "rel_err1"]


def write_rows(fh, rows):
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        p1 = "" if r.predicted1 is None else repr(float(abs(r.predicted1)))
        e1 = "" if r.rel_err1 is None else repr(float(r.rel_err1))
        writer.writerow(
            [
                r.n,
                repr(float(mp.re(r.z))),
                repr(float(mp.im(r.z))),
                repr(float(abs(r.direct))),
                repr(float(abs(r.predicted0))),
                p1,
                repr(float(r.rel_err0)),
                e1,
            ]
        )


def _order1(model, n, z, on_cut=False):
    try:
        if on_cut:
            return model.predict_Q_on_cut(n, z, order=1)
        return model.predict_Q(n, z, order=1)
    except UnsupportedRegimeError:
        return None


def run_comparison(
    spec,
    n_set,
    grid=None,
    orders=(0, 1),
    surface_prec=DEFAULT_SURFACE_PREC,
    direct_prec=DEFAULT_DIRECT_PREC,
    remainder=False,
    zeros=False,
    model=None,
):
    """Compare direct ``Q_n`` with the asymptotic prediction for each ``n`` in ``n_set``."""
    n_set = sorted(int(n) for n in n_set)
    timings = {}
    t0 = time.perf_counter()
    model = model or AsymptoticModel(spec, prec=surface_prec)
    timings["model"] = time.perf_counter() - t0
    grid = grid or default_grid(spec.geometry)
    notes = []
    if not model.z_finite and 1 in orders:
        notes.append("first-order constants unavailable for z_k over infinity; order 1 equals order 0 when A_n = 0")
    t0 = time.perf_counter()
    moments = quadrature_moments(spec, 2 * max(n_set) + 1, direct_prec)
    timings["moments"] = time.perf_counter() - t0
    results, rows = [], []
    for n in n_set:
        t0 = time.perf_counter()
        sol = solve_Qn(moments, n)
        with mp.workprec(direct_prec):
            err0, err1 = [], []
            for z in grid.interior:
                d = sol(z)
                p0 = model.predict_Q(n, z, 0)
                p1 = _order1(model, n, z) if 1 in orders else None
                row = GridRow(n, complex(z), d, p0, p1)
                rows.append(row)
                err0.append(float(row.rel_err0))
                if row.rel_err1 is not None:
                    err1.append(float(row.rel_err1))
            cut0, cut1 = _cut_errors(model, sol, n, grid.cut, orders)
            rem = _remainder_error(model, sol, spec, n, grid.interior) if remainder else None
            counts = None
            if zeros:
                counts = zero_counts(polynomial_zeros(sol.coeffs, direct_prec), spec.geometry)
        results.append(
            NResult(
                n,
                sol.effective_degree,
                max(err0),
                max(err1) if len(err1) == len(err0) else None,
                cut0,
                cut1,
                rem,
                counts,
            )
        )
        timings[f"n={n}"] = time.perf_counter() - t0
    decay = {
        "order0": fit_decay(n_set, [r.sup_err0 for r in results]),
    }
    if all(r.sup_err1 is not None for r in results):
        decay["order1"] = fit_decay(n_set, [r.sup_err1 for r in results])
    return ComparisonReport(
        weight=spec.name,
        a=float(spec.geometry.a),
        b=float(spec.geometry.b),
        n_list=n_set,
        grid=grid.as_dict(),
        orders=list(orders),
        precisions={"surface": surface_prec, "direct": direct_prec},
        results=results,
        decay=decay,
        expected_exponent=model.d_exponent,
        rows=rows,
        notes=notes,
        timings=timings,
    )


def _cut_errors(model, sol, n, cut, orders):
    """Sup over the cut points of ``|direct - predicted|``, relative to the sup of ``|direct|``."""
    if not cut:
        return None, None
    d = [sol(s) for s in cut]
    scale = max(abs(x) for x in d)
    p0 = [model.predict_Q_on_cut(n, s, 0, margin=mp.mpf(CUT_MARGIN)) for s in cut]
    e0 = float(max(abs(x - y) for x, y in zip(d, p0)) / scale)
    e1 = None
    if 1 in orders:
        p1 = [_order1(model, n, s, on_cut=True) for s in cut]
        if all(p is not None for p in p1):
            e1 = float(max(abs(x - y) for x, y in zip(d, p1)) / scale)
    return e0, e1


def _remainder_error(model, sol, spec, n, points):
    worst = 0.0
    for z in points:
        direct = eval_w(z, spec.geometry) * compute_Rn(sol, spec, z, tol=REMAINDER_TOL)
        pred = model.predict_R(n, z, 0)
        worst = max(worst, float(abs(direct - pred) / abs(direct)))
    return worst


def remainder_errors(model, spec, n, grid=None, direct_prec=DEFAULT_DIRECT_PREC, order=0):
    """Per-point relative errors of ``w R_n`` against its prediction."""
    grid = grid or default_grid(spec.geometry)
    sol = solve_Qn(quadrature_moments(spec, 2 * n + 1, direct_prec), n)
    out = []
    with mp.workprec(direct_prec):
        for z in grid.interior:
            direct = eval_w(z, spec.geometry) * compute_Rn(sol, spec, z, tol=REMAINDER_TOL)
            pred = model.predict_R(n, z, order)
            out.append(float(abs(direct - pred) / abs(direct)))
    return out


def zero_distribution(spec, n, precision=DEFAULT_DIRECT_PREC):
    """Zeros of ``Q_n`` per arc next to ``n`` times the equilibrium mass of each arc."""
    sol = solve_Qn(quadrature_moments(spec, 2 * n + 1, precision), n)
    zs = polynomial_zeros(sol.coeffs, precision)
    counts = zero_counts(zs, spec.geometry)
    with mp.workprec(precision):
        masses = {i: float(arc_mass(spec, i)) for i in range(1, 5)}
    return {"n": n, "degree": sol.effective_degree, "counts": counts, "expected": {i: n * m for i, m in masses.items()}}


def pade_error(solution, spec, z, quad=None):
    """``rho_hat(z) - [n/n](z)`` evaluated directly at the solution's precision."""
    prec = solution.moments.precision
    with mp.workprec(prec + 20):
        quad = quad or solution.moments.quadrature or WeightQuadrature(spec, prec)
        approx = pade(solution, spec)
        val, _ = quad.integrate(lambda s: 1 / (s - z), what="Cauchy transform")
        return val / (2j * mp.pi) - approx(z)


def pade_slope(spec, n, radii=(8, 16, 32, 64), angle=mp.mpf("0.1"), precision=DEFAULT_DIRECT_PREC):
    """Fitted slope of ``log |rho_hat - [n/n]|`` against ``log |z|`` along a ray."""
    sol = solve_Qn(quadrature_moments(spec, 2 * n + 1, precision), n)
    errs = []
    for r in radii:
        z = mp.mpf(r) * mp.expjpi(angle)
        errs.append(float(abs(pade_error(sol, spec, z))))
    fit = fit_decay(radii, errs)
    return {"n": n, "slope": -fit["exponent"], "errors": errs, "radii": list(radii), "degree": sol.effective_degree}


# --- spurious poles -----------------------------------------------------------

@dataclass
class PoleRow:
    n: int
    target: complex
    sheet: int
    kind: str
    found: object
    distance: object


def pade_pole_tracker(spec, n_set, precision=DEFAULT_DIRECT_PREC, model=None):
    """Locate Pade poles (sheet 0) or extra interpolation points (sheet 1) near ``pi(z_{n mod 2})``."""
    model = model or AsymptoticModel(spec)
    n_set = sorted(n_set)
    if not any(model.zk[n % 2].finite for n in n_set):
        return {"status": "no finite z_k", "rows": []}
    moments = quadrature_moments(spec, 2 * max(n_set) + 1, precision)
    rows = []
    for n in n_set:
        zk = model.zk[n % 2]
        if not zk.finite or zk.point.tag is not None:
            continue
        target = zk.point.z
        sol = solve_Qn(moments, n)
        with mp.workprec(precision):
            if zk.point.sheet == 0:
                zs = polynomial_zeros(sol.coeffs, precision)
                found = min(zs, key=lambda x: abs(x - target))
                kind = "pole"
            else:
                found = _interpolation_point(sol, spec, target)
                kind = "interpolation"
            dist = None if found is None else float(abs(found - target))
        rows.append(PoleRow(n, complex(target), zk.point.sheet, kind, None if found is None else complex(found), dist))
    return {"status": "ok", "rows": rows}


def _interpolation_point(sol, spec, target):
    """Zero of ``R_n`` near ``target``, where the approximant interpolates once more."""
    f = lambda z: compute_Rn(sol, spec, z) * z ** (sol.n + 1)  # noqa: E731
    try:
        return mp.findroot(f, (target, target * (1 + mp.mpf("1e-3"))), solver="secant", tol=mp.mpf(10) ** (-20))
    except (ValueError, ZeroDivisionError, CrossPolyError):
        return None
