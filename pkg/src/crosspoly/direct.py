"""Ground truth from the weight itself: moments, ``Q_n``, ``R_n`` and Pade data.

Everything here works in plain arbitrary-precision arithmetic without any
surface machinery. Integrals over an arc use Gauss-Jacobi rules in the arc
parameter ``t`` (``s = a_i (1 - t)``) with the endpoint exponent of the weight
absorbed into the rule, so the remaining integrand is analytic on the arc.
"""

from dataclasses import dataclass, field

from mpmath import mp

from .errors import DegenerateWeightError, PrecisionError, ProximityError
from .precision import DEFAULT_DIRECT_PREC, digits
from .quadrature import gauss_jacobi01

_START_NODES = 32
_MAX_NODES = 1024
_GUARD = 20


class WeightQuadrature:
    """Per-arc Gauss-Jacobi nodes ``(s, W)`` with ``int_Delta f rho ds ~ sum W f(s)``."""

    def __init__(self, spec, prec=DEFAULT_DIRECT_PREC):
        self.spec = spec
        self.prec = prec
        self._rules = {}

    def rule(self, n):
        if n not in self._rules:
            g = self.spec.geometry
            out = []
            with mp.workprec(self.prec + _GUARD):
                for i in range(1, 5):
                    alpha = mp.mpf(self.spec.arcs[i - 1].alpha)
                    ai = g.endpoint(i)
                    ts, ws = gauss_jacobi01(n, alpha, self.prec + _GUARD)
                    for t, wt in zip(ts, ws):
                        omt = 1 - t
                        smooth = mp.exp(self.spec.log_rho(i, t, omt) - alpha * mp.log(t))
                        out.append((ai * omt, -ai * wt * smooth, i))
            self._rules[n] = out
        return self._rules[n]

    def integrate(self, f, tol=None, what="weighted integral"):
        """``int_Delta f(s) rho(s) ds`` with node doubling; returns ``(value, error)``."""
        tol = tol if tol is not None else mp.mpf(10) ** (-(digits(self.prec) - 5))
        prev = None
        n = _START_NODES
        while n <= _MAX_NODES:
            with mp.workprec(self.prec + _GUARD):
                nodes = self.rule(n)
                val = mp.fsum(W * f(s) for s, W, _ in nodes)
                scale = mp.fsum(abs(W * f(s)) for s, W, _ in nodes)
            if prev is not None and abs(val - prev) <= tol * max(scale, mp.mpf(10) ** -300):
                return val, abs(val - prev)
            prev = val
            n *= 2
        raise PrecisionError(f"{what} did not converge", module="direct", nodes=n // 2)


@dataclass
class MomentTable:
    mu: list
    precision: int
    quad_error: list
    nodes: int
    quadrature: object = field(repr=False, default=None)

    @property
    def k_max(self):
        return len(self.mu) - 1


def quadrature_moments(spec, k_max, precision=DEFAULT_DIRECT_PREC):
    """``mu_k = int_Delta s^k rho(s) ds`` for ``k = 0..k_max``."""
    quad = WeightQuadrature(spec, precision)
    tol = mp.mpf(10) ** (-(digits(precision) - 3))
    prev = None
    n = _START_NODES
    diags = {}
    while n <= _MAX_NODES:
        with mp.workprec(precision + _GUARD):
            nodes = quad.rule(n)
            mu = [mp.mpc(0)] * (k_max + 1)
            scale = [mp.mpf(0)] * (k_max + 1)
            for s, W, _ in nodes:
                p = W
                for k in range(k_max + 1):
                    mu[k] += p
                    scale[k] += abs(p)
                    p *= s
            if prev is not None:
                errs = [abs(x - y) for x, y in zip(mu, prev)]
                if all(e <= tol * sc for e, sc in zip(errs, scale)):
                    with mp.workprec(precision):
                        return MomentTable([+m for m in mu], precision, errs, n, quad)
                diags[n] = float(max(e / sc for e, sc in zip(errs, scale)))
            prev = mu
        n *= 2
    raise PrecisionError("moments did not converge", module="direct", relative_change=diags)


@dataclass
class DirectSolution:
    n: int
    coeffs: list
    effective_degree: int
    rank_gap: object
    spec: object = field(repr=False, default=None)
    moments: object = field(repr=False, default=None)
    error_estimate: object = None

    def __call__(self, z):
        return mp.polyval(self.coeffs, z)

    def padded(self):
        """Coefficients padded with leading zeros to length ``n + 1``."""
        return [mp.mpc(0)] * (self.n - self.effective_degree) + list(self.coeffs)


def _hankel(mu, rows, cols):
    return mp.matrix([[mu[k + j] for j in range(cols)] for k in range(rows)])


def _singular_ratio(M):
    if M.rows == 0 or M.cols == 0:
        return mp.mpf(1)
    sv = mp.svd_c(M, compute_uv=False)
    vals = [abs(sv[i]) for i in range(len(sv))]
    top = max(vals)
    return min(vals) / top if top else mp.mpf(0)


def _solve_degree(mu, n, m):
    """Least-squares monic degree-``m`` solution of the ``n`` orthogonality conditions."""
    if m == 0:
        resid = max(abs(mu[k]) for k in range(n))
        return [mp.mpc(1)], resid
    H = _hankel(mu, n, m)
    rhs = mp.matrix([-mu[k + m] for k in range(n)])
    if n == m:
        x = mp.lu_solve(H, rhs)
        resid = mp.mpf(0)
    else:
        x, resid = mp.qr_solve(H, rhs)
    # lower-order coefficients c_0..c_{m-1}; return highest first
    coeffs = [mp.mpc(1)] + [x[j] for j in range(m - 1, -1, -1)]
    return coeffs, resid


def _classify(ratio, threshold, floor):
    if ratio > threshold:
        return "regular"
    if ratio <= floor:
        return "degenerate"
    return "ambiguous"


def solve_Qn(moments, n, tol=None):
    """Monic ``Q_n`` of minimal degree with ``int s^k Q_n rho ds = 0`` for ``k < n``.

    A Hankel block counts as singular when its singular-value ratio sits near
    the rounding level; a ratio between that level and ``tol`` cannot be told
    apart from ill-conditioning and raises ``PrecisionError``.
    """
    prec = moments.precision
    mu = moments.mu
    if len(mu) < 2 * n:
        raise ValueError(f"need moments through index {2 * n - 1}")
    with mp.workprec(prec):
        if n == 0:
            return DirectSolution(0, [mp.mpc(1)], 0, mp.mpf(1), moments.quadrature.spec if moments.quadrature else None, moments)
        threshold = tol if tol is not None else mp.mpf(10) ** (-(digits(prec) // 2))
        floor = mp.mpf(10) ** (-(digits(prec) * 4 // 5))
        scale = max(abs(m) for m in mu[: 2 * n + 1]) or mp.mpf(1)

        def check(ratio, m):
            kind = _classify(ratio, threshold, floor)
            if kind == "ambiguous":
                raise PrecisionError(
                    f"cannot tell a degenerate index from ill-conditioning at n={n} with {prec} bits",
                    module="direct",
                    singular_ratio=float(ratio),
                    degree=m,
                    precision=prec,
                )
            return kind

        ratio = _singular_ratio(_hankel(mu, n, n))
        if check(ratio, n) == "regular":
            coeffs, _ = _solve_degree(mu, n, n)
            est = _stability(mu, n, n, coeffs, prec)
            return _finish(moments, n, coeffs, n, ratio, est)
        for m in range(n - 1, -1, -1):
            if m and check(_singular_ratio(_hankel(mu, n, m)), m) == "degenerate":
                continue
            coeffs, resid = _solve_degree(mu, n, m)
            if resid <= threshold * scale * (1 + max(abs(c) for c in coeffs)):
                est = _stability(mu, n, m, coeffs, prec)
                return _finish(moments, n, coeffs, m, ratio, est)
        raise DegenerateWeightError(f"no monic polynomial of degree <= {n} satisfies the conditions", module="direct")


def _stability(mu, n, m, coeffs, prec):
    """Estimate the coefficient error by re-solving with moments rounded to fewer bits."""
    if m == 0:
        return mp.mpf(0)
    drop = 24
    with mp.workprec(prec - drop):
        rough = [+x for x in mu]
    with mp.workprec(prec):
        alt, _ = _solve_degree(rough, n, m)
        diff = max(abs(x - y) for x, y in zip(alt, coeffs))
        size = max(abs(c) for c in coeffs)
        return diff / size * mp.mpf(2) ** (-drop)


def _finish(moments, n, coeffs, degree, ratio, est):
    prec = moments.precision
    allowed = mp.mpf(10) ** (-(digits(prec) // 3))
    if est > allowed:
        raise PrecisionError(
            f"Hankel system for n={n} is too ill-conditioned at {prec} bits",
            module="direct",
            estimated_error=float(est),
            precision=prec,
        )
    spec = moments.quadrature.spec if moments.quadrature else None
    # the linear solvers carry guard bits; store exactly ``prec`` so serialization round-trips
    with mp.workprec(prec):
        coeffs = [+c for c in coeffs]
    return DirectSolution(n, coeffs, degree, ratio, spec, moments, est)


def direct_Qn(spec, n, precision=DEFAULT_DIRECT_PREC):
    """Convenience: moments plus solve."""
    moments = quadrature_moments(spec, 2 * n + 1, precision)
    return solve_Qn(moments, n)


def _check_clear(spec, z, margin):
    g = spec.geometry
    if g.distance_to_cross(z) < margin * min(g.A, g.B):
        raise ProximityError("point too close to the cross for the Cauchy integral", module="direct")


def compute_rho_hat(spec, z, quad=None, margin=mp.mpf("1e-3")):
    """``(1 / 2 pi i) int_Delta rho(s) ds / (s - z)``."""
    z = mp.mpc(z)
    _check_clear(spec, z, margin)
    quad = quad or WeightQuadrature(spec)
    val, _ = quad.integrate(lambda s: 1 / (s - z), what="Cauchy transform")
    return val / (2j * mp.pi)


def compute_Rn(solution, spec, z, margin=mp.mpf("1e-3"), tol=None):
    """``R_n(z) = (1 / 2 pi i) int Q_n(s) rho(s) ds / (s - z)``.

    ``tol`` is relative to the sum of absolute contributions; the default asks
    for the full working precision.
    """
    z = mp.mpc(z)
    _check_clear(spec, z, margin)
    quad = _quad_of(solution, spec)
    coeffs = solution.coeffs
    val, _ = quad.integrate(lambda s: mp.polyval(coeffs, s) / (s - z), tol=tol, what="R_n integral")
    return val / (2j * mp.pi)


def _quad_of(solution, spec):
    if solution.moments is not None and solution.moments.quadrature is not None:
        return solution.moments.quadrature
    return WeightQuadrature(spec)


@dataclass
class PadeApproximant:
    numerator: list
    denominator: list

    def __call__(self, z):
        return mp.polyval(self.numerator, z) / mp.polyval(self.denominator, z)


def pade(solution, spec=None):
    """Diagonal Pade approximant ``P_n / Q_n`` of ``rho_hat`` built from the moments.

    Uses ``R_n = Q_n rho_hat - P_n``, which gives
    ``P_n(z) = -(1 / 2 pi i) sum_j q_j sum_{i<j} mu_i z^(j-1-i)``.
    """
    mu = solution.moments.mu
    with mp.workprec(solution.moments.precision):
        q = list(reversed(solution.coeffs))  # q[j] multiplies z^j
        deg = len(q) - 1
        num = [mp.mpc(0)] * max(deg, 1)  # num[e] multiplies z^e
        for j in range(1, deg + 1):
            for i in range(j):
                num[j - 1 - i] += q[j] * mu[i]
        num = [-c / (2j * mp.pi) for c in num]
        return PadeApproximant(list(reversed(num)), list(solution.coeffs))


def polynomial_zeros(coeffs, prec=None):
    """Roots of a polynomial given highest coefficient first."""
    prec = prec or mp.prec
    with mp.workprec(prec):
        if len(coeffs) <= 1:
            return []
        return list(mp.polyroots(coeffs, maxsteps=400, extraprec=prec))


def arc_mass(spec_or_geometry, i):
    """Equilibrium mass of arc ``i``: ``(1/pi) int |s / w_+(s)| |ds|``."""
    from .surface import trace_w_tau

    g = getattr(spec_or_geometry, "geometry", spec_or_geometry)
    r = g.arc_length(i)
    f = lambda t: r * abs(g.arc_point(i, t)) / abs(trace_w_tau(g, i, t, +1))
    return mp.quad(f, [0, 1]) / mp.pi


def zero_counts(zeros, geometry):
    """Assign zeros to the nearest arc; returns counts for arcs 1..4."""
    counts = {i: 0 for i in range(1, 5)}
    for z in zeros:
        i = min(range(1, 5), key=lambda j: abs(z - geometry.nearest_on_arc(j, z)[1]))
        counts[i] += 1
    return counts


def _exact(x, prec):
    """Decimal string with enough digits to round-trip at ``prec`` bits."""
    return mp.nstr(x, int(prec * 0.30103) + 5, strip_zeros=False, min_fixed=1, max_fixed=0)


def solution_to_dict(solution):
    prec = solution.moments.precision if solution.moments else mp.prec
    with mp.workprec(prec):
        coeffs = [[_exact(mp.re(c), prec), _exact(mp.im(c), prec)] for c in solution.coeffs]
    spec = solution.spec
    return {
        "n": solution.n,
        "effective_degree": solution.effective_degree,
        "precision": prec,
        "coeffs": coeffs,
        "weight": spec.name if spec is not None else None,
        "a": float(spec.geometry.a) if spec is not None else None,
        "b": float(spec.geometry.b) if spec is not None else None,
        "error_estimate": float(solution.error_estimate) if solution.error_estimate is not None else None,
    }


def solution_from_dict(data):
    prec = int(data["precision"])
    with mp.workprec(prec):
        coeffs = [mp.mpc(mp.mpf(re), mp.mpf(im)) for re, im in data["coeffs"]]
    return DirectSolution(
        int(data["n"]),
        coeffs,
        int(data["effective_degree"]),
        None,
        error_estimate=data.get("error_estimate"),
    )
