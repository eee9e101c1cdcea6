"""Strong asymptotics of ``Q_n`` and ``R_n`` assembled from surface data.

``Psi_n = Phi^n S T_{n mod 2}`` on the surface. The predicted polynomial is
``gamma_n Psi_n`` on sheet 0, corrected at first order by ``L_{n,i} / z``
terms; sheet 1 gives ``w R_n``. All per-point work (``Phi``, ``S`` and the
Abel value) is cached so that sweeping ``n`` at fixed points is cheap.
"""

import math

from mpmath import mp

from .errors import ExcludedIndexError, ProximityError, UnsupportedRegimeError
from .geometry import INF_CLASS
from .precision import DEFAULT_SURFACE_PREC
from .surface import SurfacePoint, compute_periods, eval_phi, eval_T_abel, locate_zk, point_w, theta, abel_map
from .szego import compute_c_rho, eval_S, origin_limit

_NU_TOL = mp.mpf(10) ** -12
DEFAULT_EPSILON = 0.1


def d_exponent(nu, ell):
    """Error-decay exponent for origin exponent ``nu`` and class ``ell``.

    Returns ``(value, branch)`` where ``branch`` is ``"first"``, ``"second"``,
    ``"infinite"`` or ``"refused"`` (value ``None``) when the pair is outside
    the supported range.
    """
    r = abs(float(mp.re(nu)))
    if not ell_nu_supported(nu, ell):
        return None, "refused"
    if ell == INF_CLASS or ell == math.inf:
        return 0.5 + r, "infinite"
    ell = int(ell)
    threshold = 4 * r * (1 + r) / (1 - 2 * r) if r < 0.5 else math.inf
    if ell >= threshold:
        return (0.5 + r) * (ell - 2 * r) / (ell + 1 + 2 * r), "first"
    return (ell * (3 - 2 * r) - 2 * r * (3 + 2 * r)) / (2 * (ell + 3 + 2 * r)), "second"


def ell_nu_supported(nu, ell):
    r = abs(float(mp.re(nu)))
    eps = 1e-12
    if ell == INF_CLASS or ell == math.inf:
        return r <= 0.5 + eps
    ell = int(ell)
    if ell == 1:
        return r < math.sqrt(7) / 2 - 1
    if ell == 2:
        return r < 0.5 - eps
    return r <= 0.5 + eps


class _PointData:
    """``Phi``, ``S`` and the Abel value at a sheet-0 point (possibly a trace)."""

    __slots__ = ("phi", "S", "u", "z")

    def __init__(self, phi, S, u, z):
        self.phi, self.S, self.u, self.z = phi, S, u, z

    def star(self):
        return _PointData(1 / self.phi, 1 / self.S, -self.u, self.z)


class AsymptoticModel:
    """Per-weight data for the asymptotic formulas.

    ``canonical=False`` keeps the log branches of ``spec`` as given, so ``c_rho``
    may be any lattice representative; predictions do not depend on it.
    """

    def __init__(self, spec, prec=DEFAULT_SURFACE_PREC, epsilon=DEFAULT_EPSILON, ctx=None, canonical=True):
        self.spec = spec
        self.prec = prec
        self.epsilon = epsilon
        with mp.workprec(prec):
            self.geometry = g = spec.geometry
            self.ctx = ctx if ctx is not None else compute_periods(g, prec)
            self.szego = compute_c_rho(spec, self.ctx, canonical=canonical)
            self.c_rho = self.szego.c_rho
            self.zk = (locate_zk(0, self.c_rho, self.ctx), locate_zk(1, self.c_rho, self.ctx))
            self.sigma = tuple((-1) ** ((z.l + z.m + k) % 2) for k, z in enumerate(self.zk))
            self.nu = self.szego.spec.nu
            re_nu = mp.re(self.nu)
            if abs(re_nu) < _NU_TOL:
                self.varsigma, self.o_point = 0, None
            else:
                self.varsigma = 1 if re_nu > 0 else -1
                self.o_point = SurfacePoint.origin(starred=self.varsigma < 0)
            self.ell = spec.class_index
            self.ell_nu_ok = ell_nu_supported(self.nu, self.ell)
            self.d_exponent, self.d_branch = d_exponent(self.nu, self.ell)
            self.sqrt_norm = mp.sqrt(g.A ** 2 + g.B ** 2)
            self.S_inf = eval_S(SurfacePoint.infinity(0), self.szego)
            self.T_inf = tuple(eval_T_abel(k, self.ctx.Kplus, self.c_rho, self.ctx) for k in (0, 1))
        self._origin_limit = None
        self._points = {}
        self._gamma = {}
        self._A = {}
        self._L = {}

    # -- basic constants -------------------------------------------------

    @property
    def z_finite(self):
        return self.zk[0].finite and self.zk[1].finite

    def excluded(self, n):
        """True when ``z_{n mod 2}`` is ``inf^(0)``."""
        zk = self.zk[n % 2]
        return zk.point.tag == "inf" and zk.point.sheet == 0

    def A_rho(self):
        """Prefactor built from the weight values at the origin."""
        rho = [self.spec.rho_at_origin(i) for i in range(1, 5)]
        with mp.workprec(self.prec):
            if self.varsigma > 0:
                return mp.expjpi(self.nu) * rho[2] * (rho[1] + rho[2]) / rho[1]
            g = self.geometry
            return (rho[2] + rho[3]) / (rho[2] * rho[3]) / (g.A * g.B) ** 2

    def origin_limit(self):
        if self._origin_limit is None:
            self._origin_limit = origin_limit(self.szego)
        return self._origin_limit

    def phi_zk(self, k):
        zk = self.zk[k].point
        if zk.tag == "inf":
            return mp.inf if zk.sheet == 0 else mp.mpc(0)
        if zk.tag is None:
            return self._point(zk).phi
        return eval_phi(zk, self.geometry)

    def A_prime(self, n):
        with mp.workprec(self.prec):
            g = self.geometry
            vs, nu = self.varsigma, self.nu
            return (
                self.A_rho()
                * mp.expjpi(vs * (self.c_rho + mp.mpf(1) / 4))
                * self.sqrt_norm / 2
                * mp.gamma(1 - vs * nu) / mp.sqrt(2 * mp.pi)
                * self.origin_limit() ** vs
                * (g.A * g.B / (2 * n)) ** (mp.mpf(1) / 2 - vs * nu)
            )

    def A(self, n):
        """``A_{rho,n}``; zero when ``Re nu = 0`` or ``z_{n mod 2} = inf^(1)``."""
        if n not in self._A:
            with mp.workprec(self.prec):
                k = n % 2
                zk = self.zk[k].point
                if self.varsigma == 0 or (zk.tag == "inf" and zk.sheet == 1):
                    val = mp.mpc(0)
                elif zk.tag == "inf":
                    val = mp.inf
                else:
                    phi_o = eval_phi(self.o_point, self.geometry)
                    val = self.sigma[k] * self.A_prime(n) * self.phi_zk(k) * phi_o ** (2 * (n - 1))
            self._A[n] = val
        return self._A[n]

    def B_parity(self, n):
        """``A_{rho,n} / (Phi(o)^(2(n-1)) n^(varsigma nu - 1/2))``; depends on ``n mod 2`` only."""
        if self.varsigma == 0:
            return mp.mpc(0)
        with mp.workprec(self.prec):
            phi_o = eval_phi(self.o_point, self.geometry)
            return self.A(n) / (phi_o ** (2 * (n - 1)) * mp.mpf(n) ** (self.varsigma * self.nu - mp.mpf(1) / 2))

    def allowable_indices(self, epsilon=None, n_max=40):
        eps = self.epsilon if epsilon is None else epsilon
        out = []
        for n in range(1, n_max + 1):
            if self.excluded(n):
                continue
            if abs(1 - self.A(n)) >= eps:
                out.append(n)
        return out

    def is_allowable(self, n, epsilon=None):
        eps = self.epsilon if epsilon is None else epsilon
        return not self.excluded(n) and abs(1 - self.A(n)) >= eps

    # -- T and Psi -------------------------------------------------------

    def T(self, k, u):
        return eval_T_abel(k, u, self.c_rho, self.ctx)

    def gamma(self, n):
        """``lim z^n / Psi_n(z^(0))`` in closed form."""
        if self.excluded(n):
            raise ExcludedIndexError(f"n={n}: z_{n % 2} is inf^(0)", module="asym", n=n)
        if n not in self._gamma:
            with mp.workprec(self.prec):
                self._gamma[n] = (-self.sqrt_norm / 2) ** n / (self.S_inf * self.T_inf[n % 2])
        return self._gamma[n]

    def gamma_laurent(self, n, points=64, radius=None):
        """``gamma_n`` from the mean of ``z^n / Psi_n`` over a large circle."""
        with mp.workprec(self.prec):
            R = radius if radius is not None else 10 * self.sqrt_norm
            total = mp.mpc(0)
            for j in range(points):
                z = R * mp.expjpi(2 * (mp.mpf(j) + mp.mpf(1) / 3) / points)
                total += z ** n / self.psi(n, SurfacePoint.at(z, 0))
            return total / points

    def _point(self, p):
        """Cached data for the sheet-0 image of ``p``."""
        base = p if p.sheet == 0 else p.star()
        key = (base.tag, base.z, base.side)
        data = self._points.get(key)
        if data is None:
            with mp.workprec(self.prec):
                g = self.geometry
                phi = eval_phi(base, g)
                S = eval_S(base, self.szego)
                u = abel_map(base, self.ctx)
                data = _PointData(phi, S, u, base.z)
            self._points[key] = data
        return data if p.sheet == 0 else data.star()

    def psi(self, n, p):
        d = self._point(p)
        with mp.workprec(self.prec):
            return d.phi ** n * d.S * self.T(n % 2, d.u)

    # -- first-order constants ---------------------------------------------

    def ratio_T(self, u):
        """``(T_0 / T_1)`` as a function of the Abel value."""
        c, K = self.c_rho, self.ctx.Kplus
        return mp.expjpi(-u) * theta(u - c - K, self.ctx) / theta(u - c + K, self.ctx)

    def ratio_T_derivative(self, p):
        """``d/dz (T_0 / T_1)`` at a point, in closed form."""
        with mp.workprec(self.prec):
            ctx, c = self.ctx, self.c_rho
            K, Km = ctx.Kplus, ctx.Kminus
            u = abel_map(p, ctx)
            w = point_w(p, self.geometry)
            pref = -self.sqrt_norm / (2 * w) * mp.expjpi(-K) * theta(0, ctx) ** 2
            pref /= theta(mp.mpf(1) / 2, ctx) * theta(ctx.B / 2, ctx)
            # (T0/T1)(u) / theta(u - c - K+) written out to stay finite at a zero of T0
            body = mp.expjpi(-u) * theta(u - c + Km, ctx) * theta(u - c - Km, ctx) / theta(u - c + K, ctx) ** 2
            return pref * body

    def ratio_T_derivative_numeric(self, p, h=None):
        """Same derivative from a central difference in the Abel variable."""
        with mp.workprec(self.prec):
            u = abel_map(p, self.ctx)
            w = point_w(p, self.geometry)
            # explicit step: theta pins its own precision, which defeats mp.diff's tiny default step
            h = h or mp.mpf(2) ** (-self.prec // 5)
            f = self.ratio_T
            d = (8 * (f(u + h) - f(u - h)) - (f(u + 2 * h) - f(u - 2 * h))) / (12 * h)
            return d / (self.ctx.alpha_period * w)

    def L(self, n):
        """``(L_{n1}, L_{n2})``."""
        if n in self._L:
            return self._L[n]
        with mp.workprec(self.prec):
            A = self.A(n)
            if A == 0:
                out = (mp.mpc(0), mp.mpc(0))
            elif not self.z_finite:
                raise UnsupportedRegimeError(
                    "first-order constants are not available when z_k lies over infinity", module="asym"
                )
            else:
                o = self.o_point
                u = abel_map(o, self.ctx)
                r = self.ratio_T(u)
                dr = self.ratio_T_derivative(o)
                phi_o = eval_phi(o, self.geometry)
                lead = (-1) ** (n % 2) * A / (1 - A)
                first = lead * r / dr
                if n % 2:
                    second = lead * (-phi_o) / dr
                else:
                    second = lead * (-phi_o) * r * r / dr
                out = (first, second)
        self._L[n] = out
        return out

    # -- predictions ---------------------------------------------------------

    def _check(self, n):
        if not self.ell_nu_ok:
            raise UnsupportedRegimeError(
                "the origin exponent and smoothness class are outside the supported range",
                module="asym",
                nu=complex(self.nu),
                ell=self.ell,
            )
        if self.excluded(n):
            raise ExcludedIndexError(f"n={n}: z_{n % 2} is inf^(0)", module="asym", n=n)

    def _combine(self, n, z, order, psi_n, psi_m):
        g_n = self.gamma(n)
        if order == 0:
            return g_n * psi_n
        L1, L2 = self.L(n)
        return g_n * ((1 + L1 / z) * psi_n + L2 / z * psi_m)

    def predict_Q(self, n, z, order=0):
        """Predicted ``Q_n(z)`` off the cross."""
        self._check(n)
        with mp.workprec(self.prec):
            z = mp.mpc(z)
            p = SurfacePoint.at(z, 0)
            psi_m = self.psi(n - 1, p) if order else None
            return self._combine(n, z, order, self.psi(n, p), psi_m)

    def predict_R(self, n, z, order=0):
        """Predicted ``w(z) R_n(z)`` off the cross."""
        self._check(n)
        with mp.workprec(self.prec):
            z = mp.mpc(z)
            p = SurfacePoint.at(z, 1)
            psi_m = self.psi(n - 1, p) if order else None
            return self._combine(n, z, order, self.psi(n, p), psi_m)

    def predict_Q_on_cut(self, n, s, order=0, margin=mp.mpf("0.15")):
        """Predicted ``Q_n(s)`` for ``s`` inside an arc: the sum of both traces."""
        self._check(n)
        g = self.geometry
        with mp.workprec(self.prec):
            s = mp.mpc(s)
            arc = _arc_index(g, s)
            if arc is None:
                raise ProximityError("point is not on the cross", module="asym")
            tau = g.arc_tau(arc, s)
            if not margin <= tau <= 1 - margin:
                raise ProximityError("point too close to an arc end", module="asym", tau=float(tau))
            total = mp.mpc(0)
            for side in (+1, -1):
                p = SurfacePoint.at(s, 0, side)
                psi_m = self.psi(n - 1, p) if order else None
                total += self._combine(n, s, order, self.psi(n, p), psi_m)
            return total


def _arc_index(g, s):
    from .surface import _arc_of

    return _arc_of(g, s)


def build_model(spec, prec=DEFAULT_SURFACE_PREC, epsilon=DEFAULT_EPSILON):
    return AsymptoticModel(spec, prec=prec, epsilon=epsilon)
