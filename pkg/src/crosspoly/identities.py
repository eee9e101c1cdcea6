"""Numerical checks of the theta-function identities behind the asymptotics.

Each check evaluates both sides independently and reports the relative
residual ``|lhs - rhs| / max(1, |rhs|)``. Geometry checks need only ``(a, b)``;
the weight checks need a weight whose special points ``z_k`` are finite and
use :func:`geometry.perturbed_weight` unless one is supplied.
"""

import random
from dataclasses import dataclass

from mpmath import mp

from .asym import AsymptoticModel
from .geometry import CrossGeometry, perturbed_weight
from .precision import DEFAULT_SURFACE_PREC
from .surface import SurfacePoint, abel_map, compute_periods, eval_phi, point_w, theta, z_from_abel

TOLERANCE = 1e-8


@dataclass
class IdentityResult:
    name: str
    lhs: object
    rhs: object
    residual: float
    detail: str = ""

    @property
    def ok(self):
        return self.residual < TOLERANCE

    def as_dict(self):
        return {
            "name": self.name,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "residual": self.residual,
            "detail": self.detail,
            "ok": self.ok,
        }


def _num(x):
    x = complex(x)
    return [x.real, x.imag]


def _result(name, lhs, rhs, detail=""):
    res = abs(lhs - rhs) / max(1, abs(rhs))
    return IdentityResult(name, lhs, rhs, float(res), detail)


def _worst(name, pairs):
    """Collapse several ``(lhs, rhs, detail)`` samples into the worst one."""
    results = [_result(name, l, r, d) for l, r, d in pairs]
    return max(results, key=lambda r: r.residual)


def sample_points(g, count=6, seed=7):
    """Deterministic points off the cross on both sheets, inside and outside the cycle ellipses."""
    rng = random.Random(seed)
    pts = []
    for j in range(count):
        radius = 0.35 + 1.4 * rng.random()
        angle = 2 * mp.pi * (j + rng.random()) / count
        z = mp.mpc(radius * g.A * mp.cos(angle), radius * g.B * mp.sin(angle))
        pts.append(SurfacePoint.at(z, j % 2))
    return pts


# --- geometry identities ----------------------------------------------------

def check_omega_tau(ctx):
    return _worst("omega-tau-half", [(ctx.omega, mp.mpf(1) / 2, "omega"), (ctx.tau, mp.mpf(1) / 2, "tau")])


def check_phi_theta(ctx, points):
    pairs = []
    for p in points:
        u = abel_map(p, ctx)
        K = ctx.Kplus
        rhs = mp.expjpi(-u) * theta(u - K, ctx) / theta(u + K, ctx)
        pairs.append((eval_phi(p, ctx.geometry), rhs, p.label()))
    return _worst("phi-theta-form", pairs)


def check_phi_origin(ctx):
    rhs = mp.expjpi(ctx.Kminus) * theta(mp.mpf(1) / 2, ctx) / theta(ctx.B / 2, ctx)
    return _result("phi-at-origin", eval_phi(SurfacePoint.origin(), ctx.geometry), rhs)


def check_z_theta(ctx, points):
    return _worst("abel-inverse", [(z_from_abel(abel_map(p, ctx), ctx), p.z, p.label()) for p in points])


def check_moduli(ctx):
    g = ctx.geometry
    half, hb, t0 = theta(mp.mpf(1) / 2, ctx), theta(ctx.B / 2, ctx), theta(0, ctx)
    lhs = mp.expjpi(ctx.B / 2) * half ** 2 * hb ** 2 / t0 ** 4
    return _result("modulus-ratio", lhs, (g.A ** 2 + g.B ** 2) / (4 * g.A * g.B))


def check_alpha_period(ctx):
    g = ctx.geometry
    s = mp.sqrt(g.A ** 2 + g.B ** 2)
    rhs = 2j * mp.pi / s * mp.expjpi(ctx.Kplus) * theta(mp.mpf(1) / 2, ctx) * theta(ctx.B / 2, ctx)
    return _result("differential-period", ctx.alpha_period, rhs)


def _central(f, x, h):
    # fourth-order central difference
    return (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h)


def check_theta_derivative(ctx, count=4, seed=11):
    rng = random.Random(seed)
    K, Km = ctx.Kplus, ctx.Kminus
    h = mp.mpf(2) ** (-ctx.prec // 5)

    def left(z):
        return mp.expjpi(z) * theta(z + K, ctx) / theta(z - K, ctx)

    pairs = []
    for _ in range(count):
        zeta = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4) * mp.im(ctx.B))
        rhs = 1j * mp.pi * theta(0, ctx) ** 2 * mp.expjpi(zeta)
        rhs *= theta(zeta - Km, ctx) * theta(zeta + Km, ctx) / theta(zeta - K, ctx) ** 2
        pairs.append((_central(left, zeta, h), rhs, mp.nstr(zeta, 8)))
    return _worst("theta-quotient-slope", pairs)


def geometry_identities(a, b, prec=DEFAULT_SURFACE_PREC, ctx=None):
    with mp.workprec(prec):
        ctx = ctx or compute_periods(CrossGeometry(a, b), prec)
        points = sample_points(ctx.geometry)
        return [
            check_omega_tau(ctx),
            check_phi_theta(ctx, points),
            check_phi_origin(ctx),
            check_z_theta(ctx, points),
            check_moduli(ctx),
            check_alpha_period(ctx),
            check_theta_derivative(ctx),
        ]


# --- weight identities --------------------------------------------------------

def product_limit(model, n, points=32, radius=None):
    """``lim z^-2 Psi_n(z^(0)) Psi_{n-1}(z^(1))`` as a circle mean.

    ``Phi`` and ``S`` are reciprocal on the two sheets, so only ``Phi(z^(0))``
    and the two ``T`` factors survive.
    """
    ctx = model.ctx
    R = radius if radius is not None else 4 * model.sqrt_norm
    i, j = n % 2, (n - 1) % 2
    total = mp.mpc(0)
    for k in range(points):
        z = R * mp.expjpi(2 * (mp.mpf(k) + mp.mpf(1) / 3) / points)
        p = SurfacePoint.at(z, 0)
        u = abel_map(p, ctx)
        total += eval_phi(p, model.geometry) * model.T(i, u) * model.T(j, -u) / z ** 2
    return total / points


def wronskian_at(model, n, starred):
    """``(T_i' T_j / Phi - T_i (T_j / Phi)')`` at the origin point, with ``i = n mod 2``.

    ``Phi'`` vanishes there, so the value is ``(T_i' T_j - T_i T_j') / Phi``;
    derivatives in ``z`` come from differences in the Abel variable.
    """
    ctx = model.ctx
    o = SurfacePoint.origin(starred)
    u = abel_map(o, ctx)
    du = 1 / (ctx.alpha_period * point_w(o, model.geometry))
    i, j = n % 2, (n - 1) % 2
    Ti, Tj = (lambda v: model.T(i, v)), (lambda v: model.T(j, v))
    h = mp.mpf(2) ** (-ctx.prec // 5)
    dTi, dTj = _central(Ti, u, h) * du, _central(Tj, u, h) * du
    return (dTi * Tj(u) - Ti(u) * dTj) / eval_phi(o, model.geometry)


def weight_identities(model, parities=(0, 1)):
    ctx = model.ctx
    g = model.geometry
    c = model.c_rho
    s = model.sqrt_norm
    (z0, z1) = model.zk
    out = []
    if not model.z_finite:
        return out
    K, Km = ctx.Kplus, ctx.Kminus
    t0 = theta(0, ctx)
    phi0, phi1 = model.phi_zk(0), model.phi_zk(1)
    rhs0 = (-1) ** ((z0.l + z0.m) % 2) * mp.expjpi(-(c - K)) * theta(c + 2 * Km, ctx) / theta(c, ctx)
    rhs1 = (-1) ** ((z1.l + z1.m) % 2) * mp.expjpi(-(c + K)) * theta(c, ctx) / theta(c + 2 * K, ctx)
    out.append(_worst("phi-special-points", [(phi0, rhs0, "z_0"), (phi1, rhs1, "z_1")]))
    sign = (-1) ** ((z0.l - z1.l + z0.m - z1.m) % 2)
    out.append(_result("phi-special-product", phi0 * phi1, -sign))
    phi_o = eval_phi(SurfacePoint.origin(), g)
    phi_os = eval_phi(SurfacePoint.origin(True), g)
    common = theta(c, ctx) ** 2 / t0 ** 2
    X, Y, Z = [], [], []
    for par in parities:
        n = 2 + par
        Xn = product_limit(model, n)
        Yn = wronskian_at(model, n, False)
        Zn = wronskian_at(model, n, True)
        sgn = (-1) ** ((z0.l + z0.m + par) % 2)
        X.append((Xn, 4 / s ** 2 * common * (-1) ** par / phi1 ** (2 * par), f"parity {par}"))
        Y.append((Yn, sgn * 2 * mp.expjpi(c) / s * phi0 / phi_o ** 2 * common, f"parity {par}"))
        Z.append((Zn, sgn * 2 * mp.expjpi(-c) / s * phi0 / phi_os ** 2 * common, f"parity {par}"))
    out.append(_worst("psi-product-limit", X))
    out.append(_worst("wronskian-origin-0", Y))
    out.append(_worst("wronskian-origin-1", Z))
    XY, XZ = [], []
    for (Xn, _, d), (Yn, _, _), (Zn, _, _), par in zip(X, Y, Z, parities):
        phik = phi0 if par == 0 else phi1
        base = model.sigma[par] * s / 2 * phik
        XY.append((Yn / Xn, base * mp.expjpi(c) / phi_o ** 2, d))
        XZ.append((Zn / Xn, base * mp.expjpi(-c) / phi_os ** 2, d))
    out.append(_worst("wronskian-ratio-0", XY))
    out.append(_worst("wronskian-ratio-1", XZ))
    return out


def run_identities(a, b, prec=DEFAULT_SURFACE_PREC, spec=None):
    """Full suite at one geometry; ``spec`` defaults to a perturbed Chebyshev weight."""
    with mp.workprec(prec):
        g = CrossGeometry(a, b)
        ctx = compute_periods(g, prec)
        results = geometry_identities(a, b, prec, ctx)
        spec = spec or perturbed_weight(a, b)
        model = AsymptoticModel(spec, prec=prec, ctx=ctx)
        results.extend(weight_identities(model))
        return results
