"""Szego function of a weight on the cross and the constant ``c_rho``.

On sheet 0,

    log S(z) = -(w(z) / 2 pi i) sum_i int_{Delta_i} phi_i(s) ds / (s - z)
               + 2 pi i c_rho w(z) H(z),

with ``phi_i = log(rho_i w_+) / w_+`` and ``H`` the Cauchy integral of
``1/w`` over the fourth-quadrant ellipse arc. Sheet 1 carries ``1/S``.

All arc integrals share one set of nested tanh-sinh nodes per arc, built
once per weight; evaluating ``S`` at a new point only re-sums them. Points
close to an arc are handled by subtracting ``phi`` at the nearest arc point,
which leaves a bounded integrand and an explicit logarithm. On the arc
itself the same split gives the one-sided boundary values exactly.
"""

from dataclasses import dataclass

from mpmath import mp

from .errors import PrecisionError, ProximityError, SingularPointError, UnsupportedRegimeError
from .precision import quad_tol
from .quadrature import tanh_sinh
from .surface import (
    SurfacePoint,
    _arc_of,
    _ellipse_diffs,
    _left_normal,
    _w_from_diffs,
    eval_w,
    point_w,
    trace_w_tau,
)

_MIN_LEVEL = 3
_MAX_LEVEL = 10
_CLAMP = mp.mpf("0.02")
_NEAR = mp.mpf("0.25")


def _log_limit(ratio, dratio):
    """``Log(ratio)`` continued from the side ``ratio + t dratio`` when ``ratio < 0``."""
    if ratio.imag == 0 and ratio.real < 0:
        return mp.log(-ratio.real) + (1j * mp.pi if dratio.imag > 0 else -1j * mp.pi)
    return mp.log(ratio)


class _NodeSet:
    """Nested tanh-sinh nodes on one parameterized path with a cached density."""

    def __init__(self, prec, make):
        self.prec = prec
        self.rule = tanh_sinh(prec)
        self._make = make
        self.levels = []

    def level(self, k):
        while len(self.levels) <= k:
            j = len(self.levels)
            self.levels.append([self._make(tau, omt, wgt) for tau, omt, wgt in self.rule.level(j)])
        return self.levels[k]

    def integrate(self, g, tol, what="arc integral"):
        """``sum W g(node)`` refined until two levels agree; ``g`` receives a node tuple."""
        partial = mp.mpc(0)
        prev = None
        for k in range(_MAX_LEVEL + 1):
            partial += mp.fsum(g(node) for node in self.level(k))
            est = partial * mp.mpf(2) ** (-k)
            if prev is not None and k >= _MIN_LEVEL and abs(est - prev) <= tol * max(1, abs(est)):
                return est
            prev = est
        raise PrecisionError(f"{what} did not converge", module="szego", last_change=float(abs(est - prev)))


@dataclass
class SzegoData:
    spec: object
    ctx: object
    c_rho: object
    arcs: tuple
    alpha_nodes: object

    @property
    def geometry(self):
        return self.spec.geometry

    @property
    def prec(self):
        return self.ctx.prec

    @property
    def tol(self):
        return quad_tol(self.ctx.prec)


def _arc_nodes(spec, i, prec):
    g = spec.geometry
    ai = g.endpoint(i)

    def make(tau, omt, wgt):
        with mp.workprec(prec + 10):
            L = spec.log_rho_w(i, tau, omt)
            wp = trace_w_tau(g, i, tau, +1)
            return (ai * omt, -ai * wgt, L / wp, tau)

    return _NodeSet(prec, make)


def _alpha_nodes(g, prec):
    def make(tau, omt, wgt):
        with mp.workprec(prec + 10):
            z, dz, d = _ellipse_diffs(g, "alpha", tau, omt)
            # the path is stored from a_1; integrals run from a_4
            return (z, -dz * wgt, 1 / _w_from_diffs(z, *d), tau)

    return _NodeSet(prec, make)


def phi_density(data, i, tau):
    """``log(rho_i w_+)(s) / w_+(s)`` at ``s = a_i (1 - tau)``."""
    spec = data.spec
    return spec.log_rho_w(i, tau) / trace_w_tau(spec.geometry, i, tau, +1)


def compute_c_rho(spec, ctx, canonical=True):
    """``c_rho`` from the sheet-0 arc integrals; returns a ready ``SzegoData``.

    With ``canonical`` the log branches are adjusted so that ``c_rho`` lands in
    the cell ``x + yB``, ``x, y`` in ``[-1/2, 1/2)``. Otherwise the branches of
    ``spec`` are used as given.
    """
    with mp.workprec(ctx.prec):
        tol = quad_tol(ctx.prec)
        for _ in range(2):
            arcs = tuple(_arc_nodes(spec, i, ctx.prec) for i in range(1, 5))
            total = mp.fsum(nodes.integrate(lambda n: n[1] * n[2], tol, "c_rho integral") for nodes in arcs)
            c = total / (mp.pi * 1j * ctx.alpha_period)
            m, l = _cell_shift(c, ctx.B)
            if not canonical or (m == 0 and l == 0):
                break
            # moving c by m + l B is the same as moving the log branches on
            # arcs 1, 3, 4 by (m, l, m + l) turns; nu is unchanged
            k = spec.offsets
            spec = spec.with_offsets((k[0] + m, k[1], k[2] + l, k[3] + m + l))
        return SzegoData(spec, ctx, c, arcs, _alpha_nodes(spec.geometry, ctx.prec))


def _cell_shift(c, B):
    """Integers ``(m, l)`` with ``c - m - l B`` in the cell ``[-1/2, 1/2)^2``."""
    slack = mp.mpf(10) ** -10
    y = mp.im(c) / mp.im(B)
    l = int(mp.floor(y + mp.mpf(1) / 2 + slack))
    x = mp.re(c - l * B)
    m = int(mp.floor(x + mp.mpf(1) / 2 + slack))
    return m, l


def _cauchy_arc(data, i, z, side=0):
    """``int_{Delta_i} phi_i(s) ds / (s - z)``; ``side`` selects a boundary value when ``z`` is on the arc."""
    g = data.geometry
    ai = g.endpoint(i)
    nodes = data.arcs[i - 1]
    on_arc = side != 0 and _arc_of(g, z) == i
    if on_arc:
        tau_star = g.arc_tau(i, z)
        s_star = z
    else:
        tau_star, s_star = g.nearest_on_arc(i, z)
        if abs(z - s_star) > _NEAR * g.arc_length(i):
            return nodes.integrate(lambda n: n[1] * n[2] / (n[0] - z), data.tol, "Cauchy integral")
        tau_star = max(tau_star, _CLAMP)
        s_star = g.arc_point(i, tau_star)
    phi_star = phi_density(data, i, tau_star)
    if on_arc:
        # a node can land exactly on z; the difference quotient there is the derivative
        dphi = mp.diff(lambda t: phi_density(data, i, t), tau_star) / (-ai)
        body = nodes.integrate(
            lambda n: n[1] * ((n[2] - phi_star) / (n[0] - z) if n[0] != z else dphi), data.tol, "Cauchy integral"
        )
        ratio = -z / (ai - z)
        dratio = -ai / (ai - z) ** 2 * side * _left_normal(g, i)
        log_part = _log_limit(ratio, dratio)
    else:
        body = nodes.integrate(lambda n: n[1] * (n[2] - phi_star) / (n[0] - z), data.tol, "Cauchy integral")
        log_part = mp.log(-z / (ai - z))
    return body + phi_star * log_part


def _nearest_on_alpha(g, z):
    """Parameter of the closest point of the fourth-quadrant ellipse arc to ``z``."""
    a, b = g.A, g.B
    t = mp.atan2(-z.imag * a, z.real * b)
    t = min(max(t, mp.mpf(0)), mp.pi / 2)
    for _ in range(30):
        p = g.alpha_path(t)
        dp = g.alpha_path_deriv(t)
        ddp = -mp.mpc(a * mp.cos(t), -b * mp.sin(t))
        f = mp.re((p - z) * mp.conj(dp))
        df = mp.re(dp * mp.conj(dp)) + mp.re((p - z) * mp.conj(ddp))
        if df == 0:
            break
        step = f / df
        t = min(max(t - step, mp.mpf(0)), mp.pi / 2)
        if abs(step) < mp.mpf(2) ** (-mp.prec + 8):
            break
    return t


def _in_lens(g, z):
    return z.real > 0 and z.imag < 0 and g.ellipse_level(z) < 1 and z.real / g.A - z.imag / g.B > 1


def eval_H(z, data, alpha_side=0, clearance=None):
    """Cauchy integral of ``1/w`` over the fourth-quadrant ellipse arc, times ``1/(2 pi i)``.

    ``alpha_side=+1`` (``-1``) evaluates the boundary value from inside (outside)
    the ellipse for ``z`` on the arc.
    """
    g = data.geometry
    z = mp.mpc(z)
    nodes = data.alpha_nodes
    scale = min(g.A, g.B)
    t_star = _nearest_on_alpha(g, z)
    near = g.alpha_path(t_star)
    dist = abs(z - near)
    if clearance is None:
        clearance = mp.mpf(2) ** (-data.prec // 3) * scale
    if alpha_side == 0 and dist < clearance:
        raise ProximityError("point too close to the alpha arc; request a side", module="szego")
    if dist > _NEAR * scale:
        val = nodes.integrate(lambda n: n[1] * n[2] / (n[0] - z), data.tol, "H integral")
        return val / (2j * mp.pi)
    lo = _CLAMP * mp.pi / 2
    if alpha_side == 0:
        t_star = min(max(t_star, lo), mp.pi / 2 - lo)
    elif not lo <= t_star <= mp.pi / 2 - lo:
        raise ProximityError("alpha boundary values are not resolved this close to an endpoint", module="szego")
    t_pt = g.alpha_path(t_star)
    f_star = 1 / eval_w(t_pt, g)
    if alpha_side:
        z = t_pt
    # derivative of 1/w, used if a node coincides with z
    df_star = -t_pt * (2 * t_pt ** 2 + g.B ** 2 - g.A ** 2) * f_star ** 3
    body = nodes.integrate(
        lambda n: n[1] * ((n[2] - f_star) / (n[0] - z) if n[0] != z else df_star), data.tol, "H integral"
    )
    a1, a4 = g.endpoint(1), g.endpoint(4)
    log_part = mp.log((a1 - z) / (a4 - z))
    inside = _in_lens(g, z) if alpha_side == 0 else alpha_side > 0
    if inside:
        log_part += 2j * mp.pi
    return (body + f_star * log_part) / (2j * mp.pi)


def _log_S0(data, z, side=0, alpha_side=0):
    g = data.geometry
    arc = _arc_of(g, z)
    if arc is not None:
        w = trace_w_tau(g, arc, g.arc_tau(arc, z), side)
    else:
        w = eval_w(z, g)
    cauchy = mp.fsum(_cauchy_arc(data, i, z, side if i == arc else 0) for i in range(1, 5))
    H = eval_H(z, data, alpha_side)
    return -w / (2j * mp.pi) * cauchy + 2j * mp.pi * data.c_rho * w * H


def log_S_infinity(data):
    """``log S`` at ``inf^(0)`` from the first moments of the densities."""
    tol = data.tol
    I1 = mp.fsum(nodes.integrate(lambda n: n[1] * n[0] * n[2], tol) for nodes in data.arcs)
    J1 = data.alpha_nodes.integrate(lambda n: n[1] * n[0] * n[2], tol)
    return I1 / (2j * mp.pi) - data.c_rho * J1


def eval_S(p, data, alpha_side=0):
    """``S_rho`` at a surface point; ``alpha_side`` selects a boundary value on the alpha arc."""
    with mp.workprec(data.prec):
        if p.tag == "inf":
            v = mp.exp(log_S_infinity(data))
            return v if p.sheet == 0 else 1 / v
        if p.tag is not None:
            raise SingularPointError(
                f"S has no value at {p.tag}; approach it along a direction", module="szego", point=p.tag
            )
        if p.z == 0:
            raise SingularPointError("S has no value at the origin; use origin_limit", module="szego")
        arc = _arc_of(data.geometry, p.z)
        if arc is not None and p.side == 0:
            raise SingularPointError("point on the cross needs a side", module="szego")
        v = mp.exp(_log_S0(data, p.z, p.side, alpha_side))
        return v if p.sheet == 0 else 1 / v


def origin_log_constant(data):
    """``C`` with ``log S(z) = -nu log|z| + C + o(1)`` along ``arg z = 5 pi / 4``."""
    g = data.geometry
    tol = data.tol
    iab = 1j * g.A * g.B
    total = mp.mpc(0)
    for i in range(1, 5):
        ai = g.endpoint(i)
        phi0 = phi_density(data, i, mp.mpf(1))
        theta_i = mp.arg(mp.expjpi(mp.mpf(1) / 4) / (ai / abs(ai)))
        regular = data.arcs[i - 1].integrate(lambda n: n[1] * (n[2] - phi0) / n[0], tol)
        total += phi0 * (1j * theta_i - mp.log(abs(ai))) + regular
    H0 = eval_H(mp.mpc(0), data)
    return -iab / (2j * mp.pi) * total + 2j * mp.pi * data.c_rho * iab * H0


def origin_limit(data, method="exact"):
    """``lim |z|^(2 nu) S(z)^2`` as ``z -> 0`` along ``arg z = 5 pi / 4``.

    ``method="richardson"`` extrapolates sampled values instead of using the
    closed form and serves as an independent check.
    """
    with mp.workprec(data.prec):
        nu = data.spec.nu
        if abs(mp.re(nu)) < mp.mpf(10) ** -12:
            raise UnsupportedRegimeError("origin limit is only used when Re(nu) != 0", module="szego")
        if method == "exact":
            return mp.exp(2 * origin_log_constant(data))
        direction = mp.expjpi(mp.mpf(5) / 4)
        scale = min(data.geometry.A, data.geometry.B)

        def sample(r):
            z = r * direction
            return mp.exp(2 * nu * mp.log(r) + 2 * _log_S0(data, z))

        hs = [scale * mp.mpf(2) ** (-k) / 8 for k in range(6, 12)]
        values = [sample(h) for h in hs]
        # leading corrections are O(h) and O(h log h); eliminate the linear term twice
        for _ in range(2):
            values = [2 * values[j + 1] - values[j] for j in range(len(values) - 1)]
        return values[-1]


def szego_cross_check(p, data):
    """``S`` at a sheet-0 point from mpmath's own quadrature instead of the shared nodes."""
    with mp.workprec(data.prec):
        g = data.geometry
        z = p.z
        w = eval_w(z, g)
        cauchy = mp.mpc(0)
        for i in range(1, 5):
            ai = g.endpoint(i)
            cauchy += -ai * mp.quad(lambda t, i=i, ai=ai: phi_density(data, i, t) / (ai * (1 - t) - z), [0, 1])

        def h(t):
            pt = g.alpha_path(t)
            return g.alpha_path_deriv(t) / ((pt - z) * eval_w(pt, g))

        # the arc runs from a_4 (t = pi/2) to a_1 (t = 0)
        H = -mp.quad(h, [0, mp.pi / 2]) / (2j * mp.pi)
        log_s = -w / (2j * mp.pi) * cauchy + 2j * mp.pi * data.c_rho * w * H
        return mp.exp(log_s if p.sheet == 0 else -log_s)


def sqrt_w(z, geometry):
    """Branch of ``sqrt(w)`` holomorphic off the cross with ``sqrt(w) ~ z`` at infinity."""
    z = mp.mpc(z)
    a, b = geometry.A, geometry.B
    p = mp.sqrt((z - a) * (z + a) / (z * z))
    q = mp.sqrt((z - 1j * b) * (z + 1j * b) / (z * z))
    return z * mp.sqrt(p) * mp.sqrt(q)


class Szego:
    """Convenience wrapper bundling weight, surface context and ``c_rho``."""

    def __init__(self, spec, ctx):
        self.spec = spec
        self.ctx = ctx
        self.data = compute_c_rho(spec, ctx)

    @property
    def c_rho(self):
        return self.data.c_rho

    def __call__(self, p, alpha_side=0):
        return eval_S(p, self.data, alpha_side)

    def at_infinity(self):
        return eval_S(SurfacePoint.infinity(0), self.data)

    def origin_limit(self, method="exact"):
        return origin_limit(self.data, method)

    def w(self, p):
        with mp.workprec(self.ctx.prec):
            return point_w(p, self.spec.geometry)
