"""The cross, its arcs, and Jacobi-type weights on it.

Arc ``i`` (1-based) joins the endpoint ``a_i`` to the origin and is oriented
toward the origin; the endpoints are ``a, ib, -a, -ib``. Points on an arc are
addressed by ``tau`` with ``s = a_i (1 - tau)``, so ``tau = 0`` is the endpoint
and ``tau = 1`` the origin. Keeping ``tau`` around lets the weight be evaluated
next to the endpoint without cancellation in ``s - a_i``.

A weight on arc ``i`` is stored in factored form

    rho_i(s) = C_i * prod_j (s - r_j)**p_j * (s - a_i)**alpha_i,

where the log of each factor is continued along the arc from the origin and
``(s - a_i)**alpha_i`` uses the logarithm whose cut runs from ``a_i`` away
from the origin.
"""

import functools
import json
from dataclasses import dataclass, field
from pathlib import Path

from mpmath import mp

from .errors import ConfigurationError, DegenerateWeightError, DomainError, SingularPointError

INF_CLASS = float("inf")
BUILTINS = ("chebyshev", "legendre", "jacobi-quarter")

# argument of (0 - a_i); the rotated log agrees with it at the origin
_REF_ARG_TURNS = {1: 1, 2: mp.mpf(-1) / 2, 3: 0, 4: mp.mpf(1) / 2}


def _mpc(value):
    if isinstance(value, (list, tuple)):
        return mp.mpc(value[0], value[1] if len(value) > 1 else 0)
    if isinstance(value, str):
        return mp.mpc(complex(value.replace(" ", "")))
    return mp.mpc(value)


@dataclass(frozen=True)
class CrossGeometry:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError("cross half-lengths must be positive", module="geometry")

    @property
    def A(self):
        return mp.mpf(self.a)

    @property
    def B(self):
        return mp.mpf(self.b)

    def endpoint(self, i):
        return {1: mp.mpc(self.A, 0), 2: mp.mpc(0, self.B), 3: mp.mpc(-self.A, 0), 4: mp.mpc(0, -self.B)}[i]

    @property
    def endpoints(self):
        return tuple(self.endpoint(i) for i in range(1, 5))

    def arc_length(self, i):
        return self.A if i in (1, 3) else self.B

    def other_length(self, i):
        return self.B if i in (1, 3) else self.A

    def ref_arg(self, i):
        return mp.pi * _REF_ARG_TURNS[i]

    def arc_point(self, i, tau):
        return self.endpoint(i) * (1 - tau)

    def arc_tau(self, i, s):
        """Inverse of ``arc_point``; raises when ``s`` is not on arc ``i``."""
        ai = self.endpoint(i)
        ratio = s / ai
        if abs(ratio.imag) > mp.mpf(10) ** (-mp.dps // 2) or not (0 <= ratio.real <= 1):
            raise DomainError("point is not on the requested arc", module="geometry", arc=i)
        return 1 - ratio.real

    def gram(self, i, tau):
        """``|w(s)|**2 = (a^2 - s^2)(s^2 + b^2)`` on arc ``i``, in factored form."""
        r, q = self.arc_length(i), self.other_length(i)
        return r * r * tau * (2 - tau) * (q * q + r * r * (1 - tau) ** 2)

    def log_gram(self, i, tau, omt=None):
        r, q = self.arc_length(i), self.other_length(i)
        if omt is None:
            omt = 1 - tau
        return 2 * mp.log(r) + mp.log(tau) + mp.log(1 + omt) + mp.log(q * q + r * r * omt * omt)

    def alpha_path(self, t):
        """Quarter ellipse through the fourth quadrant, ``t=0`` at ``a_1``."""
        return mp.mpc(self.A * mp.cos(t), -self.B * mp.sin(t))

    def alpha_path_deriv(self, t):
        return mp.mpc(-self.A * mp.sin(t), -self.B * mp.cos(t))

    def beta_path(self, t):
        """Quarter ellipse through the first quadrant, ``t=0`` at ``a_1``."""
        return mp.mpc(self.A * mp.cos(t), self.B * mp.sin(t))

    def beta_path_deriv(self, t):
        return mp.mpc(-self.A * mp.sin(t), self.B * mp.cos(t))

    def ellipse_level(self, z):
        """``(Re z / a)^2 + (Im z / b)^2``; equals 1 on the homology arcs."""
        return (z.real / self.A) ** 2 + (z.imag / self.B) ** 2

    def distance_to_cross(self, z):
        z = mp.mpc(z)
        best = None
        for i in range(1, 5):
            d = abs(z - self.nearest_on_arc(i, z)[1])
            best = d if best is None or d < best else best
        return best

    def nearest_on_arc(self, i, z):
        ai = self.endpoint(i)
        u = mp.re(z / ai)
        u = min(max(u, mp.mpf(0)), mp.mpf(1))
        return 1 - u, ai * u


@dataclass(frozen=True)
class ArcWeight:
    """Factored weight on one arc (see module docstring)."""

    const: object
    alpha: object
    factors: tuple = ()
    label: str = "custom"

    def log_analytic(self, s):
        """Continuous log of ``C * prod (s - r)**p`` along the arc."""
        acc = mp.log(self.const)
        for r, p in self.factors:
            acc += p * (mp.log((s - r) / (-r)) + mp.log(-r))
        return acc

    def log_taylor(self, geometry, i, order):
        """Coefficients ``c_1..c_order`` of ``log rho_i(s) - log rho_i(0)``."""
        ai = geometry.endpoint(i)
        out = []
        for m in range(1, order + 1):
            acc = self.alpha * ai ** (-m)
            for r, p in self.factors:
                acc += p * r ** (-m)
            out.append(-acc / m)
        return out


@dataclass
class WeightSpec:
    geometry: CrossGeometry
    arcs: tuple
    class_index: object = INF_CLASS
    name: str = "custom"
    offsets: tuple = None
    _nu: object = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.arcs) != 4:
            raise ConfigurationError("a weight needs exactly four arcs", module="geometry")
        for i, arc in enumerate(self.arcs, start=1):
            if not mp.mpf(arc.alpha) > -1:
                raise DomainError(f"exponent on arc {i} must exceed -1", module="geometry", arc=i)
            for r, _ in arc.factors:
                if self._on_arc(i, r):
                    raise DomainError(
                        f"analytic part on arc {i} has a zero or pole on that arc", module="geometry", arc=i
                    )
        if self.offsets is None:
            self.offsets, self._nu = _select_offsets(self)
        else:
            self._nu = _nu_from(self, self.offsets)

    def _on_arc(self, i, r):
        g = self.geometry
        ratio = mp.mpc(r) / g.endpoint(i)
        tol = mp.mpf(10) ** (-10)
        return abs(ratio.imag) < tol and -tol <= ratio.real <= 1 + tol

    @property
    def nu(self):
        return self._nu

    def alpha(self, i):
        return mp.mpf(self.arcs[i - 1].alpha)

    def log_rho(self, i, tau, omt=None):
        """Branch of ``log rho_i`` at ``s = a_i (1 - tau)`` including the arc offset."""
        g = self.geometry
        arc = self.arcs[i - 1]
        s = g.arc_point(i, tau) if omt is None else g.endpoint(i) * omt
        alpha = mp.mpf(arc.alpha)
        log_dist = mp.log(g.arc_length(i) * tau) + 1j * g.ref_arg(i)
        base = arc.log_analytic(s) + alpha * log_dist
        return base + 2j * mp.pi * (self._base_shift(i) + self.offsets[i - 1])

    def rho(self, i, tau, omt=None):
        return mp.exp(self.log_rho(i, tau, omt))

    def rho_at_origin(self, i):
        return self.rho(i, mp.mpf(1), mp.mpf(0))

    def _base_shift(self, i):
        """Integer making the branch at the origin the principal one.

        Computed once per arc; arguments within rounding of ``-pi`` count as
        ``+pi`` so the choice does not depend on the working precision.
        """
        cache = self.__dict__.setdefault("_shift_cache", {})
        if i not in cache:
            g = self.geometry
            arc = self.arcs[i - 1]
            with mp.workprec(max(mp.prec, 128) + 30):
                raw = arc.log_analytic(mp.mpc(0)) + mp.mpf(arc.alpha) * (
                    mp.log(g.arc_length(i)) + 1j * g.ref_arg(i)
                )
                turns = mp.im(raw) / (2 * mp.pi)
                # principal argument lies in (-pi, pi]
                cache[i] = int(mp.floor(mp.mpf(1) / 2 + mp.mpf(10) ** (-20) - turns))
        return cache[i]

    def log_rho_w(self, i, tau, omt=None):
        """``log(rho_i w_+)`` with the branch fixed by the stored offsets."""
        g = self.geometry
        if omt is None:
            omt = 1 - tau
        return self.log_rho(i, tau, omt) + g.log_gram(i, tau, omt) / 2 + (-1) ** i * 1j * mp.pi / 2

    def with_offsets(self, offsets):
        """The same weight with different per-arc log branches."""
        return WeightSpec(self.geometry, self.arcs, self.class_index, name=self.name, offsets=tuple(offsets))

    def with_scale(self, factor):
        """The same weight multiplied by a common constant on every arc."""
        arcs = tuple(
            ArcWeight(const=mp.mpc(a.const) * factor, alpha=a.alpha, factors=a.factors, label=a.label)
            for a in self.arcs
        )
        return WeightSpec(self.geometry, arcs, self.class_index, name=f"{self.name}*scaled")


def _nu_from(spec, offsets):
    total = mp.mpc(0)
    for i in range(1, 5):
        lw = spec.log_rho_w(i, mp.mpf(1), mp.mpf(0)) if offsets is spec.offsets else None
        if lw is None:
            raise AssertionError
        total += (-1) ** i * lw
    return total / (2j * mp.pi)


def _select_offsets(spec):
    spec.offsets = (0, 0, 0, 0)
    raw = _nu_from(spec, spec.offsets)
    # adding 2*pi*i to the arc-1 log lowers nu by one
    slack = mp.mpf(10) ** (-mp.dps // 2)
    shift = int(mp.ceil(mp.re(raw) - mp.mpf(1) / 2 - slack))
    offsets = (shift, 0, 0, 0)
    spec.offsets = offsets
    nu = _nu_from(spec, offsets)
    return offsets, nu


def compute_nu(spec):
    """Origin exponent ``nu`` with ``Re nu`` in ``(-1/2, 1/2]`` and the arc offsets used.

    The exponent is read off the branches of ``log(rho_i w_+)`` at the origin.
    Those branches are the ones entering the Szego function, so the value is
    the exponent that governs its behaviour at the origin.
    """
    for i in range(1, 5):
        if abs(spec.rho_at_origin(i)) == 0:
            raise DegenerateWeightError("weight vanishes at the origin", module="geometry", arc=i)
    return spec.nu, spec.offsets


def principal_nu(values_at_origin):
    """``(1/2 pi i) sum (-1)^i Log rho_i(0)`` with principal logs."""
    total = mp.mpc(0)
    for i, v in enumerate(values_at_origin, start=1):
        total += (-1) ** i * mp.log(mp.mpc(v))
    return total / (2j * mp.pi)


def eval_weight(spec, arc, s):
    """``rho_i(s)`` for ``s`` strictly inside arc ``i``."""
    g = spec.geometry
    s = mp.mpc(s)
    tau = g.arc_tau(arc, s)
    if tau <= 0 or tau > 1:
        if spec.alpha(arc) < 0:
            raise SingularPointError("weight is singular at the arc endpoint", module="geometry", arc=arc)
    if tau == 1:
        return spec.rho_at_origin(arc)
    return spec.rho(arc, tau)


@dataclass
class ValidationReport:
    passed: dict
    residuals: dict
    ell: object

    @property
    def ok(self):
        return all(self.passed.values())

    def as_dict(self):
        return {
            "passed": dict(self.passed),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "ell": "inf" if self.ell == INF_CLASS else int(self.ell),
        }


def validate_weight_class(spec, tol=1e-10, taylor_order=40, samples=16):
    """Check the four class conditions and find the largest matching order."""
    g = spec.geometry
    tol = mp.mpf(tol)
    passed, residuals = {}, {}
    passed["i"] = all(spec.alpha(i) > -1 for i in range(1, 5))
    residuals["i"] = min(spec.alpha(i) + 1 for i in range(1, 5))

    rho0 = [spec.rho_at_origin(i) for i in range(1, 5)]
    scale = max(abs(v) for v in rho0)
    residuals["iii"] = abs(mp.fsum(rho0)) / scale
    passed["iii"] = residuals["iii"] < tol

    # ratio rho1 rho3 / (rho2 rho4) sampled on a small circle about the origin
    radius = min(g.A, g.B) / 4
    logs = []
    for k in range(samples):
        z = radius * mp.expjpi(mp.mpf(2 * k + 1) / samples)
        lr = [_log_rho_continued(spec, i, z) for i in range(1, 5)]
        logs.append(lr[0] + lr[2] - lr[1] - lr[3])
    ref = logs[0]
    residuals["ii"] = max(abs(mp.exp(v - ref) - 1) for v in logs)
    passed["ii"] = residuals["ii"] < tol

    coeffs = [spec.arcs[i - 1].log_taylor(g, i, taylor_order) for i in range(1, 5)]
    ell = INF_CLASS
    worst = mp.mpf(0)
    for m in range(taylor_order):
        col = [coeffs[i][m] for i in range(4)]
        spread = max(abs(c - col[0]) for c in col) * radius ** (m + 1)
        if spread > tol:
            ell = m + 1
            worst = spread
            break
    declared = spec.class_index
    if declared != INF_CLASS and (ell == INF_CLASS or ell > declared):
        ell = declared
    residuals["iv"] = worst
    passed["iv"] = ell == INF_CLASS or ell >= 1
    return ValidationReport(passed, residuals, ell)


def _log_rho_continued(spec, i, z):
    """Analytic continuation of ``log rho_i`` to a point ``z`` near the origin."""
    g = spec.geometry
    arc = spec.arcs[i - 1]
    ai = g.endpoint(i)
    log_dist = mp.log((z - ai) / (-ai)) + mp.log(g.arc_length(i)) + 1j * g.ref_arg(i)
    return arc.log_analytic(z) + mp.mpf(arc.alpha) * log_dist


# --- builtins -----------------------------------------------------------

_BUILTIN_SPECS = {
    # name: (exponent of G, per-arc constant multiplying G**beta)
    "chebyshev": (mp.mpf(-1) / 2, lambda i: -((-1) ** i) * 1j),
    "legendre": (mp.mpf(0), lambda i: (-1) ** i),
    "jacobi-quarter": (mp.mpf(-1) / 4, lambda i: {1: 1j, 2: 1, 3: -1j, 4: -1}[i]),
}


_BUILD_PREC = 320


def _built_precisely(fn):
    """Construct weights at a fixed high precision so constants do not inherit a low working precision."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with mp.workprec(max(mp.prec, _BUILD_PREC)):
            return fn(*args, **kwargs)

    return wrapper


def gpower_arc(geometry, i, beta, const, extra=(), label="gpower"):
    """Arc weight ``const * G(s)**beta * prod extra``, with ``G**beta > 0`` on the arc.

    ``G(s) = (a^2 - s^2)(s^2 + b^2) = |w(s)|^2`` on the cross.
    """
    beta = mp.mpf(beta)
    factors = tuple((geometry.endpoint(j), beta) for j in range(1, 5) if j != i) + tuple(extra)
    probe = ArcWeight(const=mp.mpc(1), alpha=beta, factors=factors, label=label)
    tau = mp.mpf(1) / 2
    s = geometry.arc_point(i, tau)
    log_probe = probe.log_analytic(s) + beta * (mp.log(geometry.arc_length(i) * tau) + 1j * geometry.ref_arg(i))
    log_extra = mp.mpc(0)
    for r, p in extra:
        log_extra += p * (mp.log((s - r) / (-r)) + mp.log(-r))
    target = beta * mp.log(geometry.gram(i, tau)) + log_extra
    c = mp.exp(target - log_probe) * const
    return ArcWeight(const=c, alpha=beta, factors=factors, label=label)


@_built_precisely
def builtin_weight(name, a=1, b=1):
    if name not in _BUILTIN_SPECS:
        raise ConfigurationError(f"unknown builtin weight {name!r}", module="geometry", choices=BUILTINS)
    g = CrossGeometry(a, b)
    beta, const = _BUILTIN_SPECS[name]
    arcs = tuple(gpower_arc(g, i, beta, mp.mpc(const(i)), label=name) for i in range(1, 5))
    return WeightSpec(g, arcs, INF_CLASS, name=name)


@_built_precisely
def perturbed_weight(a=1, b=1, base="chebyshev", zero=(1.5, 1.0), pole=(-1.2, 1.4)):
    """A builtin weight times a common rational factor ``(s - zero)/(s - pole)``.

    The common factor leaves the class conditions intact but moves ``c_rho``
    off the lattice points, which makes the special points ``z_k`` finite.
    """
    g = CrossGeometry(a, b)
    beta, const = _BUILTIN_SPECS[base]
    extra = ((_mpc(zero), mp.mpf(1)), (_mpc(pole), mp.mpf(-1)))
    arcs = tuple(gpower_arc(g, i, beta, mp.mpc(const(i)), extra=extra, label=f"{base}-perturbed") for i in range(1, 5))
    return WeightSpec(g, arcs, INF_CLASS, name=f"{base}-perturbed")


# --- serialization ------------------------------------------------------

def _poly_factors(coeffs):
    """Leading constant and ``(root, 1)`` factors of an ascending coefficient list."""
    cs = [_mpc(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    if all(c == 0 for c in cs):
        raise DegenerateWeightError("analytic part is identically zero", module="geometry")
    lead = cs[-1]
    if len(cs) == 1:
        return lead, ()
    roots = mp.polyroots(list(reversed(cs)), maxsteps=200, extraprec=2 * mp.prec)
    return lead, tuple((mp.mpc(r), mp.mpf(1)) for r in roots)


def _arc_from_dict(g, i, entry):
    if not isinstance(entry, dict):
        raise ConfigurationError(f"arc {i} entry must be a mapping", module="geometry")
    unknown = set(entry) - {"alpha", "analytic"}
    if unknown:
        raise ConfigurationError(f"unknown keys on arc {i}: {sorted(unknown)}", module="geometry")
    analytic = entry.get("analytic", {"kind": "poly", "coeffs": [1]})
    kind = analytic.get("kind")
    if kind == "builtin":
        name = analytic.get("name")
        if name not in _BUILTIN_SPECS:
            raise ConfigurationError(f"unknown builtin {name!r}", module="geometry")
        beta, const = _BUILTIN_SPECS[name]
        if "alpha" in entry and mp.mpf(entry["alpha"]) != beta:
            raise ConfigurationError(f"builtin {name} fixes alpha = {beta}", module="geometry")
        return gpower_arc(g, i, beta, mp.mpc(const(i)), label=name)
    if "alpha" not in entry:
        raise ConfigurationError(f"arc {i} needs an alpha", module="geometry")
    alpha = mp.mpf(entry["alpha"])
    if kind == "poly":
        c, fac = _poly_factors(analytic["coeffs"])
        return ArcWeight(const=c, alpha=alpha, factors=fac, label="poly")
    if kind == "rational":
        cn, fn = _poly_factors(analytic["num"])
        cd, fd = _poly_factors(analytic["den"])
        fac = fn + tuple((r, -p) for r, p in fd)
        return ArcWeight(const=cn / cd, alpha=alpha, factors=fac, label="rational")
    if kind == "factored":
        c = _mpc(analytic.get("const", 1))
        fac = tuple((_mpc(f[0]), mp.mpf(f[1])) for f in analytic.get("factors", []))
        return ArcWeight(const=c, alpha=alpha, factors=fac, label="factored")
    raise ConfigurationError(f"unknown analytic kind {kind!r} on arc {i}", module="geometry")


@_built_precisely
def weight_from_dict(data, a=None, b=None):
    """Build a ``WeightSpec`` from the documented weight-file mapping.

    Explicit ``a``/``b`` arguments override the file values.
    """
    if not isinstance(data, dict):
        raise ConfigurationError("weight file must hold a mapping", module="geometry")
    allowed = {"a", "b", "class", "arcs", "builtin", "name"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"unknown weight-file keys: {sorted(unknown)}", module="geometry")
    a = data.get("a", 1) if a is None else a
    b = data.get("b", 1) if b is None else b
    try:
        a, b = float(a), float(b)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError("a and b must be numbers", module="geometry") from exc
    if "builtin" in data:
        spec = builtin_weight(data["builtin"], a, b)
        return spec
    g = CrossGeometry(a, b)
    arcs = data.get("arcs")
    if not isinstance(arcs, list) or len(arcs) != 4:
        raise ConfigurationError("'arcs' must list four entries", module="geometry")
    cls = data.get("class", "inf")
    cls = INF_CLASS if cls in ("inf", "infinity", None) else int(cls)
    built = tuple(_arc_from_dict(g, i, e) for i, e in enumerate(arcs, start=1))
    return WeightSpec(g, built, cls, name=data.get("name", "custom"))


def load_weight(path, a=None, b=None):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read weight file {path}: {exc}", module="geometry") from exc
    return weight_from_dict(data, a, b)
