"""The genus-one surface of ``w**2 = (z**2 - a**2)(z**2 + b**2)``.

Sheet 0 carries the branch ``w(z) ~ z**2`` at infinity; sheet 1 carries
``-w``. The homology cycles project onto the quarter ellipses through the
first (``beta``) and fourth (``alpha``) quadrants. Abel integrals start at
``-a`` and follow a fixed path system that never crosses those ellipse arcs:

* points of sheet 0 outside the two quarter-ellipse interiors are reached
  through the real ray ``(-inf, -a)``, the circle ``|z| = R`` and a radial
  segment;
* points inside a quarter-ellipse interior are reached through sheet 1,
  entering it across the left real cut and leaving it across the adjacent
  imaginary cut;
* points of sheet 1 use the involution, which negates the integral.
"""

from dataclasses import dataclass, field

from mpmath import mp

from .errors import AmbiguousTraceError, DomainError, GeometryError, PoleError, PrecisionError, SingularPointError
from .geometry import CrossGeometry
from .precision import DEFAULT_SURFACE_PREC, digits, quad_tol
from .quadrature import integrate_param, integrate_segment, tanh_sinh

_ANCHOR_STEPS = 16


# --- points -------------------------------------------------------------

@dataclass(frozen=True)
class SurfacePoint:
    """A point of the surface.

    ``tag`` marks the special points: ``"inf"`` (with ``sheet``), ``"origin"``
    (sheet 0 reached through the first or third quadrant), ``"origin*"``
    (reached through the second or fourth), ``"a1"``..``"a4"``. For a point
    on the cross ``side`` picks the trace: ``+1`` for the left side of the
    arc oriented toward the origin, ``-1`` for the right side.
    """

    z: object = None
    sheet: int = 0
    tag: str = None
    side: int = 0

    @classmethod
    def at(cls, z, sheet=0, side=0):
        return cls(mp.mpc(z), int(sheet), None, int(side))

    @classmethod
    def infinity(cls, sheet):
        return cls(None, int(sheet), "inf")

    @classmethod
    def origin(cls, starred=False):
        return cls(mp.mpc(0), 0, "origin*" if starred else "origin")

    @classmethod
    def branch(cls, i):
        return cls(None, 0, f"a{i}")

    def star(self):
        if self.tag == "origin":
            return SurfacePoint.origin(True)
        if self.tag == "origin*":
            return SurfacePoint.origin(False)
        if self.tag is not None and self.tag.startswith("a"):
            return self
        return SurfacePoint(self.z, 1 - self.sheet, self.tag, self.side)

    def projection(self, geometry):
        if self.tag == "inf":
            return None
        if self.tag is not None and self.tag.startswith("a"):
            return geometry.endpoint(int(self.tag[1]))
        return self.z

    def label(self):
        if self.tag == "inf":
            return f"inf^({self.sheet})"
        if self.tag is not None:
            return self.tag
        side = {1: "+", -1: "-", 0: ""}[self.side]
        return f"({mp.nstr(self.z, 12)})^({self.sheet}){side}"


def _on_cross(g, z):
    return (z.imag == 0 and abs(z.real) <= g.A) or (z.real == 0 and abs(z.imag) <= g.B)


def _arc_of(g, z):
    """Arc index for a point strictly inside an arc, else ``None``."""
    if z.imag == 0 and 0 < abs(z.real) < g.A:
        return 1 if z.real > 0 else 3
    if z.real == 0 and 0 < abs(z.imag) < g.B:
        return 2 if z.imag > 0 else 4
    return None


def _left_normal(g, i):
    ai = g.endpoint(i)
    return 1j * (-ai / abs(ai))


# --- branch w -----------------------------------------------------------

def _sqrt_sided(x, dx):
    """Square root of ``x`` continued from the side ``x + t dx``, ``t -> 0+``."""
    if x.imag == 0 and x.real < 0:
        if dx.imag == 0:
            raise AmbiguousTraceError("approach direction runs along the cut", module="surface")
        root = mp.sqrt(-x.real)
        return mp.mpc(0, root if dx.imag > 0 else -root)
    return mp.sqrt(x)


def _uv(g, z, direction=None):
    """Factors ``u ~ z`` and ``v ~ z`` with ``u**2 = z**2 - a**2``, ``v**2 = z**2 + b**2``."""
    a2, b2 = g.A ** 2, g.B ** 2
    xu = (z - g.A) * (z + g.A) / (z * z)
    xv = (z - 1j * g.B) * (z + 1j * g.B) / (z * z)
    if direction is None:
        return z * mp.sqrt(xu), z * mp.sqrt(xv)
    z3 = z ** 3
    return z * _sqrt_sided(xu, 2 * a2 / z3 * direction), z * _sqrt_sided(xv, -2 * b2 / z3 * direction)


def _w_from_diffs(z, d1, d2, d3, d4):
    """``w`` from accurately known differences ``z - a_i``."""
    zz = z * z
    return z * mp.sqrt(d1 * d3 / zz) * z * mp.sqrt(d2 * d4 / zz)


def eval_w(z, geometry):
    """Branch of ``sqrt((z^2 - a^2)(z^2 + b^2))`` with ``w ~ z^2`` at infinity."""
    z = mp.mpc(z)
    if _on_cross(geometry, z):
        raise AmbiguousTraceError("w is two-valued on the cross; use eval_w_trace", module="surface")
    u, v = _uv(geometry, z)
    return u * v


def eval_w_trace(geometry, arc, s, side=+1):
    """Boundary value ``w_+(s)`` (``side=+1``) or ``w_-(s) = -w_+(s)`` on arc ``arc``."""
    s = mp.mpc(s)
    tau = geometry.arc_tau(arc, s)
    if tau <= 0 or tau >= 1:
        raise SingularPointError("trace requested at an arc endpoint", module="surface", arc=arc)
    return trace_w_tau(geometry, arc, tau, side)


def trace_w_tau(geometry, arc, tau, side=+1):
    value = (-1) ** arc * mp.mpc(0, 1) * mp.sqrt(geometry.gram(arc, tau))
    return value if side > 0 else -value


def point_w(p, geometry):
    """``w`` lifted to the surface: ``(-1)^k w(z)`` on sheet ``k``."""
    if p.tag == "inf":
        raise PoleError("w has a pole at infinity", module="surface")
    if p.tag == "origin":
        return mp.mpc(0, geometry.A * geometry.B)
    if p.tag == "origin*":
        return mp.mpc(0, -geometry.A * geometry.B)
    if p.tag is not None:
        return mp.mpc(0)
    sign = -1 if p.sheet else 1
    arc = _arc_of(geometry, p.z)
    if arc is not None:
        if p.side == 0:
            raise AmbiguousTraceError("point on the cross needs a side", module="surface")
        tau = geometry.arc_tau(arc, p.z)
        return sign * trace_w_tau(geometry, arc, tau, p.side)
    return sign * eval_w(p.z, geometry)


# --- Phi ----------------------------------------------------------------

def _region(g, z, side=0):
    """``"I1"``/``"I4"`` inside the first/fourth quarter ellipse, else ``"O"``."""
    arc = _arc_of(g, z)
    if arc is not None:
        if side == 0:
            raise AmbiguousTraceError("point on the cross needs a side", module="surface")
        n = side * _left_normal(g, arc)
        re_pos = z.real > 0 or (z.real == 0 and n.real > 0)
        im_pos = z.imag > 0 or (z.imag == 0 and n.imag > 0)
        im_neg = z.imag < 0 or (z.imag == 0 and n.imag < 0)
        if not re_pos:
            return "O"
        return "I1" if im_pos else ("I4" if im_neg else "O")
    if z.real <= 0 or z.imag == 0:
        return "O"
    level = g.ellipse_level(z)
    if level == 1:
        raise DomainError("point lies on a homology arc", module="surface")
    if level > 1:
        return "O"
    return "I1" if z.imag > 0 else "I4"


def _phi_star(g, z, side=0):
    scale = mp.sqrt(g.A ** 2 + g.B ** 2)
    arc = _arc_of(g, z)
    if arc is not None:
        u, v = _uv(g, z, side * _left_normal(g, arc))
    else:
        u, v = _uv(g, z)
    return (u + v) / scale


def eval_phi(p, geometry):
    """``Phi`` on the surface cut along the homology arcs; ``Phi(-a) = 1``."""
    g = geometry
    s = mp.sqrt(g.A ** 2 + g.B ** 2)
    if p.tag == "inf":
        if p.sheet == 0:
            raise PoleError("Phi has a pole at inf^(0)", module="surface")
        return mp.mpc(0)
    if p.tag == "origin":
        return mp.mpc(g.B, g.A) / s
    if p.tag == "origin*":
        return mp.mpc(g.B, -g.A) / s
    if p.tag is not None:
        return {"a1": mp.mpc(-1), "a2": mp.mpc(0, -1), "a3": mp.mpc(1), "a4": mp.mpc(0, 1)}[p.tag]
    z = p.z
    if z == 0:
        raise AmbiguousTraceError("use SurfacePoint.origin for the origin", module="surface")
    value = _phi_star(g, z, p.side)
    if _region(g, z, p.side) == "O":
        value = -value
    return value if p.sheet == 0 else 1 / value


# --- periods and theta --------------------------------------------------

@dataclass
class ThetaContext:
    geometry: CrossGeometry
    B: object
    alpha_period: object
    prec: int
    omega: object = None
    tau: object = None
    _anchors: dict = field(default_factory=dict, repr=False)

    @property
    def Kplus(self):
        return (1 + self.B) / 4

    @property
    def Kminus(self):
        return (1 - self.B) / 4

    @property
    def digits(self):
        return digits(self.prec)

    @property
    def tol(self):
        return quad_tol(self.prec)

    def truncation(self, max_im=None):
        """Number of theta terms each side of zero for arguments with ``|Im| <= max_im``."""
        with mp.workprec(self.prec):
            imb = mp.im(self.B)
            m = imb / 2 if max_im is None else mp.mpf(max_im)
            budget = (self.digits + 10) * mp.log(10)
            disc = (2 * mp.pi * m) ** 2 + 4 * mp.pi * imb * budget
            return int(mp.ceil((2 * mp.pi * m + mp.sqrt(disc)) / (2 * mp.pi * imb))) + 1

    @property
    def truncationN(self):
        return self.truncation()


def _ellipse_diffs(g, path, tau, omt):
    """Point on a quarter ellipse and its differences to the four endpoints.

    ``tau`` maps to ``t = pi tau / 2``; both ends are resolved without
    cancellation.
    """
    a, b = g.A, g.B
    sgn = -1 if path == "alpha" else 1
    t = mp.pi * tau / 2
    r = mp.pi * omt / 2
    ct, st = mp.cos(t), mp.sin(t)
    z = mp.mpc(a * ct, sgn * b * st)
    dz = mp.mpc(-a * st, sgn * b * ct) * (mp.pi / 2)
    if tau < mp.mpf(1) / 2:
        d1 = mp.mpc(-2 * a * mp.sin(t / 2) ** 2, sgn * b * st)
        d_near = None
    else:
        d1 = z - a
        # z - (sgn i b) = a sin r - sgn i b (1 - cos r)
        d_near = mp.mpc(a * mp.sin(r), -sgn * 2 * b * mp.sin(r / 2) ** 2)
    d3 = z + a
    if path == "alpha":
        d2, d4 = z - 1j * b, (d_near if d_near is not None else z + 1j * b)
    else:
        d2, d4 = (d_near if d_near is not None else z - 1j * b), z + 1j * b
    return z, dz, (d1, d2, d3, d4)


def _half_cycle(g, path, prec, kernel):
    """``2 * integral`` of ``kernel(z) dz / w`` over the sheet-0 arc of a cycle.

    Both cycles run toward ``a_1`` on sheet 0.
    """
    rule = tanh_sinh(prec)

    def f(tau, omt):
        z, dz, d = _ellipse_diffs(g, path, tau, omt)
        return kernel(z) * dz / _w_from_diffs(z, *d)

    value, _, _ = rule.integrate(f, quad_tol(prec), min_level=4, max_level=12)
    # parameter runs away from a_1; the cycle runs toward it
    return -2 * value


def compute_periods(geometry, prec=DEFAULT_SURFACE_PREC):
    """Periods of ``dz/w`` and the normalized ``B``, with the ``omega``/``tau`` self-check."""
    with mp.workprec(prec):
        g = geometry
        one = lambda z: mp.mpf(1)  # noqa: E731
        ident = lambda z: z  # noqa: E731
        A_alpha = _half_cycle(g, "alpha", prec, one)
        A_beta = _half_cycle(g, "beta", prec, one)
        B = A_beta / A_alpha
        omega = -_half_cycle(g, "beta", prec, ident) / (2j * mp.pi)
        tau = _half_cycle(g, "alpha", prec, ident) / (2j * mp.pi)
        if not mp.im(B) > 0:
            raise PrecisionError("period B has non-positive imaginary part", module="surface", B=str(B))
        return ThetaContext(g, B, A_alpha, prec, omega=omega, tau=tau)


def lattice_reduce(zeta, B):
    """Write ``zeta = rest + l + m B`` with ``rest`` in the fundamental cell centred at 0."""
    m = int(mp.nint(mp.im(zeta) / mp.im(B)))
    rest = zeta - m * B
    l = int(mp.nint(mp.re(rest)))
    return rest - l, l, m


def theta(zeta, ctx):
    """``sum_n exp(pi i B n^2 + 2 pi i n zeta)``."""
    with mp.workprec(ctx.prec + 10):
        zeta = mp.mpc(zeta)
        B = ctx.B
        rest, _, m = lattice_reduce(zeta, B)
        n_max = ctx.truncationN
        q = mp.expjpi(B)
        x = mp.expjpi(2 * rest)
        total = mp.mpc(1)
        # terms n and -n share q**(n^2); accumulate q**(n^2) by odd increments
        qn2 = mp.mpc(1)
        q_odd = q
        xn = mp.mpc(1)
        for _ in range(1, n_max + 1):
            qn2 *= q_odd
            q_odd *= q * q
            xn *= x
            total += qn2 * (xn + 1 / xn)
        if m:
            total *= mp.expjpi(-m * m * B - 2 * m * rest)
        return +total


# --- Abel map -----------------------------------------------------------

def _inv_w(g):
    return lambda z: 1 / eval_w(z, g)


def _radius(g):
    return 2 * mp.sqrt(g.A ** 2 + g.B ** 2)


def _anchor_table(ctx, upper):
    """Unnormalized integrals from ``-a`` to ``R exp(i phi_j)`` along the outer route."""
    key = ("upper" if upper else "lower", ctx.prec)
    table = ctx._anchors.get(key)
    if table is not None:
        return table
    g = ctx.geometry
    R = _radius(g)
    f = _inv_w(g)
    start = ctx._anchors.get(("ray", ctx.prec))
    if start is None:
        start = integrate_segment(f, g.endpoint(3), mp.mpc(-R), ctx.tol, singular_start=True)
        ctx._anchors[("ray", ctx.prec)] = start
    step = mp.pi / _ANCHOR_STEPS
    angles = [(mp.pi - j * step) if upper else (-mp.pi + j * step) for j in range(2 * _ANCHOR_STEPS + 1)]
    values = [start]
    for p0, p1 in zip(angles, angles[1:]):
        piece = integrate_param(lambda t: 1j * R * mp.expj(t) * f(R * mp.expj(t)), p0, p1, ctx.tol)
        values.append(values[-1] + piece)
    table = (angles, values)
    ctx._anchors[key] = table
    return table


def _outer_integral(ctx, z):
    """Unnormalized integral to a sheet-0 point of the outer region."""
    g = ctx.geometry
    R = _radius(g)
    f = _inv_w(g)
    phi = mp.arg(z)
    upper = phi >= 0
    angles, values = _anchor_table(ctx, upper)
    step = mp.pi / _ANCHOR_STEPS
    j = int(mp.floor((mp.pi - phi) / step)) if upper else int(mp.floor((phi + mp.pi) / step))
    j = max(0, min(j, len(angles) - 1))
    acc = values[j]
    if phi != angles[j]:
        acc += integrate_param(lambda t: 1j * R * mp.expj(t) * f(R * mp.expj(t)), angles[j], phi, ctx.tol)
    on_circle = R * mp.expj(phi)
    if abs(on_circle - z) > 0:
        acc += integrate_segment(f, on_circle, z, ctx.tol)
    return acc


def _gate_integral(ctx, quadrant):
    """Unnormalized integral from ``-a`` to the gate exit inside quarter ellipse ``quadrant``.

    The route dips across the left real cut onto sheet 1 and climbs back to
    sheet 0 across the imaginary cut.
    """
    key = ("gate", quadrant, ctx.prec)
    hit = ctx._anchors.get(key)
    if hit is not None:
        return hit
    g = ctx.geometry
    a, b = g.A, g.B
    sgn = 1 if quadrant == 1 else -1
    f = _inv_w(g)
    p0 = mp.mpc(-a / 2, -sgn * b / 4)
    p1 = mp.mpc(-a / 2, sgn * b / 4)
    p2 = mp.mpc(-a / 4, sgn * b / 2)
    p3 = mp.mpc(-a / 4 * 0, sgn * b / 2)  # crossing point on the imaginary cut
    p4 = mp.mpc(a / 4, sgn * b / 2)
    first = integrate_segment(f, g.endpoint(3), p0, ctx.tol, singular_start=True)
    # p0 -> p1 crosses the real cut at -a/2: sheet 0 below the crossing, sheet 1 after it
    cross_r = mp.mpc(-a / 2, 0)
    leg_a = integrate_segment(f, p0, cross_r, ctx.tol)
    leg_b = -integrate_segment(f, cross_r, p1, ctx.tol)
    leg_c = -integrate_segment(f, p1, p2, ctx.tol)
    leg_d = -integrate_segment(f, p2, p3, ctx.tol)
    leg_e = integrate_segment(f, p3, p4, ctx.tol)
    total = first + leg_a + leg_b + leg_c + leg_d + leg_e
    ctx._anchors[key] = (total, p4)
    return total, p4


def _raw_integral(ctx, z, side=0):
    """Unnormalized integral of ``dz/w`` from ``-a`` to ``z`` on sheet 0."""
    g = ctx.geometry
    region = _region(g, z, side)
    arc = _arc_of(g, z)
    if arc is not None:
        # finish with a short normal hop onto the cut from the requested side
        n = side * _left_normal(g, arc)
        r = abs(z)
        hop = min(g.A, g.B) / 10
        if arc in (1, 2, 4):
            length, other = g.arc_length(arc), g.other_length(arc)
            hop = min(hop, other * mp.sqrt(1 - (r / length) ** 2) / 2)
        q = z + hop * n
        f = _inv_w(g)
        return _raw_integral(ctx, q) + integrate_segment(f, q, z, ctx.tol)
    if region == "O":
        return _outer_integral(ctx, z)
    total, exit_point = _gate_integral(ctx, 1 if region == "I1" else 4)
    return total + integrate_segment(_inv_w(g), exit_point, z, ctx.tol)


def abel_map(p, ctx):
    """Integral of the normalized differential from ``-a`` to ``p`` along the fixed paths."""
    with mp.workprec(ctx.prec):
        if p.tag == "inf":
            return ctx.Kplus if p.sheet == 0 else -ctx.Kplus
        if p.tag == "origin":
            return -ctx.Kminus
        if p.tag == "origin*":
            return ctx.Kminus
        if p.tag == "a3":
            return mp.mpc(0)
        if p.tag is not None:
            return _branch_abel(ctx, int(p.tag[1]))
        if p.z == 0:
            raise AmbiguousTraceError("use SurfacePoint.origin for the origin", module="surface")
        try:
            raw = _raw_integral(ctx, p.z, p.side)
        except PrecisionError as exc:
            raise GeometryError("Abel path integration failed", module="surface", point=p.label()) from exc
        value = raw / ctx.alpha_period
        return -value if p.sheet else value


def _branch_abel(ctx, i):
    """Abel value at ``a_1``, ``a_2`` or ``a_4`` reached from the outer region."""
    g = ctx.geometry
    ai = g.endpoint(i)
    R = _radius(g)
    target = ai / abs(ai) * R
    f = _inv_w(g)
    raw = _outer_integral(ctx, target) - integrate_segment(f, ai, target, ctx.tol, singular_start=True)
    return raw / ctx.alpha_period


# --- T_k and z_k --------------------------------------------------------

def eval_T_abel(k, u, c_rho, ctx):
    """``T_k`` from an Abel value ``u``."""
    with mp.workprec(ctx.prec):
        den = theta(u - ctx.Kplus, ctx)
        if abs(den) < mp.mpf(10) ** (-ctx.digits + 5):
            raise PoleError("T_k has a pole at inf^(1)", module="surface")
        num = theta(u - c_rho - (-1) ** k * ctx.Kplus, ctx)
        return mp.expjpi(k * u) * num / den


def eval_T(k, p, c_rho, ctx):
    if p.tag == "inf" and p.sheet == 1:
        raise PoleError("T_k has a pole at inf^(1)", module="surface")
    return eval_T_abel(k, abel_map(p, ctx), c_rho, ctx)


def z_from_abel(u, ctx):
    """Projection of the surface point with Abel value ``u``."""
    with mp.workprec(ctx.prec):
        g = ctx.geometry
        s = mp.sqrt(g.A ** 2 + g.B ** 2)
        K, Km = ctx.Kplus, ctx.Kminus
        pref = -s / 2 * mp.expjpi(-K) * theta(0, ctx) ** 2 / (theta(mp.mpf(1) / 2, ctx) * theta(ctx.B / 2, ctx))
        num = theta(u - Km, ctx) * theta(u + Km, ctx)
        den = theta(u - K, ctx) * theta(u + K, ctx)
        return pref * num / den


@dataclass(frozen=True)
class SpecialPoint:
    point: SurfacePoint
    l: int
    m: int
    residual: object

    @property
    def finite(self):
        return self.point.tag != "inf"


def locate_zk(k, c_rho, ctx, tol=mp.mpf("1e-8")):
    """Zero ``z_k`` of ``T_k`` and the lattice integers ``(l_k, m_k)``."""
    with mp.workprec(ctx.prec):
        g = ctx.geometry
        u = c_rho - (-1) ** k * ctx.Kplus
        for j in (0, 1):
            rest, l, m = lattice_reduce(u - (-1) ** j * ctx.Kplus, ctx.B)
            if abs(rest) < mp.mpf("1e-10"):
                return SpecialPoint(SurfacePoint.infinity(j), -l, -m, abs(rest))
        z = z_from_abel(u, ctx)
        scale = max(g.A, g.B)
        if abs(z) < mp.mpf("1e-10") * scale:
            candidates = [SurfacePoint.origin(False), SurfacePoint.origin(True)]
        elif any(abs(z - ai) < mp.mpf("1e-10") * scale for ai in g.endpoints):
            i = min(range(1, 5), key=lambda i: abs(z - g.endpoint(i)))
            candidates = [SurfacePoint.branch(i)]
        else:
            z = _snap_to_cross(g, z)
            if _arc_of(g, z) is not None:
                candidates = [SurfacePoint.at(z, 0, +1), SurfacePoint.at(z, 0, -1)]
            else:
                z = _nudge_off_cycles(g, z)
                candidates = [SurfacePoint.at(z, 0), SurfacePoint.at(z, 1)]
        best = None
        for cand in candidates:
            rest, l, m = lattice_reduce(abel_map(cand, ctx) - u, ctx.B)
            if best is None or abs(rest) < best.residual:
                best = SpecialPoint(cand, l, m, abs(rest))
        if best.residual > tol:
            raise PrecisionError(
                "could not match the Abel value of z_k on either sheet",
                module="surface",
                residual=float(best.residual),
            )
        return best


def _snap_to_cross(g, z):
    eps = mp.mpf(10) ** (-mp.dps // 2) * max(g.A, g.B)
    if abs(z.imag) < eps and abs(z.real) < g.A:
        return mp.mpc(z.real, 0)
    if abs(z.real) < eps and abs(z.imag) < g.B:
        return mp.mpc(0, z.imag)
    return z


def _nudge_off_cycles(g, z):
    if z.real > 0 and z.imag != 0 and abs(g.ellipse_level(z) - 1) < mp.mpf(10) ** (-mp.dps // 2):
        return z * (1 + mp.mpf(10) ** (-mp.dps // 3))
    return z


class Surface:
    """Bundle of a geometry with its theta context at a fixed precision."""

    def __init__(self, geometry, prec=DEFAULT_SURFACE_PREC):
        self.geometry = geometry
        self.prec = prec
        self.ctx = compute_periods(geometry, prec)

    def w(self, p):
        with mp.workprec(self.prec):
            return point_w(p, self.geometry)

    def phi(self, p):
        with mp.workprec(self.prec):
            return eval_phi(p, self.geometry)

    def abel(self, p):
        return abel_map(p, self.ctx)

    def theta(self, zeta):
        return theta(zeta, self.ctx)
