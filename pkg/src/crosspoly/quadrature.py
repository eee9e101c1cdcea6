"""Quadrature rules at arbitrary precision.

Three rules are provided:

* a nested tanh-sinh rule on ``[0, 1]`` whose nodes are stored as the pair
  ``(tau, 1 - tau)`` so integrands can resolve both endpoints without
  cancellation;
* adaptive composite Gauss-Legendre on parameterized segments, with an
  optional square substitution at a start point where the integrand blows up
  like an inverse square root;
* Gauss-Jacobi nodes on ``[0, 1]`` for the weight ``t**alpha``, refined by
  Newton's method from double-precision seeds.
"""

import math

import numpy as np
from mpmath import mp
from scipy.special import roots_jacobi

from .errors import PrecisionError

_DE_CACHE = {}
_GL_CACHE = {}
_GJ_CACHE = {}


class TanhSinhRule:
    """Nested double-exponential rule on ``[0, 1]``.

    Level ``k`` uses step ``2**-k``; the nodes of level ``k`` are those of
    level ``k - 1`` plus the odd multiples of the new step, so successive
    estimates share all previous function values.
    """

    def __init__(self, prec):
        self.prec = prec
        with mp.workprec(prec):
            umax = prec * math.log(2) + 20
            self.tmax = float(mp.asinh(2 * umax / mp.pi))
        self._levels = []

    def _make_level(self, k):
        with mp.workprec(self.prec + 20):
            h = mp.mpf(2) ** (-k)
            nmax = int(self.tmax / float(h)) + 1
            if k == 0:
                js = range(-nmax, nmax + 1)
            else:
                js = range(-nmax if nmax % 2 else -nmax + 1, nmax + 1, 2)
            out = []
            for j in js:
                t = j * h
                u = mp.pi / 2 * mp.sinh(t)
                e = mp.exp(-2 * abs(u))
                small = e / (1 + e)
                large = 1 / (1 + e)
                tau, omt = (large, small) if u > 0 else (small, large)
                wgt = mp.pi / 2 * mp.cosh(t) * 2 * e / (1 + e) ** 2
                out.append((+tau, +omt, +wgt))
        return out

    def level(self, k):
        """Nodes introduced at level ``k`` as ``(tau, 1 - tau, weight)``.

        Weights exclude the step ``2**-k``.
        """
        while len(self._levels) <= k:
            self._levels.append(self._make_level(len(self._levels)))
        return self._levels[k]

    def integrate(self, f, tol, min_level=3, max_level=10):
        """Integrate ``f(tau, 1 - tau)`` over ``[0, 1]``.

        Returns ``(value, error_estimate, level)``. Raises ``PrecisionError``
        when successive levels fail to agree within ``tol``.
        """
        partial = mp.mpf(0)
        prev = None
        for k in range(max_level + 1):
            partial += mp.fsum(f(tau, omt) * wgt for tau, omt, wgt in self.level(k))
            est = partial * mp.mpf(2) ** (-k)
            if prev is not None and k >= min_level:
                err = abs(est - prev)
                if err <= tol:
                    return est, err, k
            prev = est
        raise PrecisionError(
            "tanh-sinh quadrature did not converge",
            module="quadrature",
            last_error=float(abs(est - prev)) if prev is not None else None,
        )


def tanh_sinh(prec):
    rule = _DE_CACHE.get(prec)
    if rule is None:
        rule = _DE_CACHE[prec] = TanhSinhRule(prec)
    return rule


def gauss_legendre_nodes(prec, degree=4):
    """``3 * 2**(degree - 1)`` Gauss-Legendre nodes on ``[-1, 1]``."""
    key = (prec, degree)
    nodes = _GL_CACHE.get(key)
    if nodes is None:
        from mpmath.calculus.quadrature import GaussLegendre

        with mp.workprec(prec):
            raw = GaussLegendre(mp).calc_nodes(degree, prec + 20)
            nodes = [(mp.mpf(x), mp.mpf(w)) for x, w in raw]
        _GL_CACHE[key] = nodes
    return nodes


def _gl_panel(f, z0, z1, nodes):
    mid = (z0 + z1) / 2
    half = (z1 - z0) / 2
    return half * mp.fsum(w * f(mid + half * x) for x, w in nodes)


def integrate_segment(f, z0, z1, tol, singular_start=False, max_depth=40):
    """Integrate ``f(z) dz`` along the straight segment from ``z0`` to ``z1``.

    With ``singular_start`` the substitution ``z = z0 + (z1 - z0) u**2``
    removes an inverse-square-root singularity at ``z0``.
    """
    if singular_start:
        d = z1 - z0

        def g(u):
            return f(z0 + d * u * u) * 2 * d * u

        return _adaptive(g, mp.mpf(0), mp.mpf(1), tol, max_depth)
    return _adaptive(lambda t: f(z0 + (z1 - z0) * t) * (z1 - z0), mp.mpf(0), mp.mpf(1), tol, max_depth)


def integrate_param(f, t0, t1, tol, max_depth=40):
    """Adaptive Gauss-Legendre for a real parameter interval."""
    return _adaptive(f, mp.mpf(t0), mp.mpf(t1), tol, max_depth)


def _adaptive(g, t0, t1, tol, max_depth):
    nodes = gauss_legendre_nodes(mp.prec)
    total = mp.mpf(0)
    stack = [(t0, t1, _gl_panel(g, t0, t1, nodes), 0)]
    span = abs(t1 - t0)
    while stack:
        a, b, whole, depth = stack.pop()
        m = (a + b) / 2
        left = _gl_panel(g, a, m, nodes)
        right = _gl_panel(g, m, b, nodes)
        if abs(left + right - whole) <= tol * abs(b - a) / span or depth >= max_depth:
            if depth >= max_depth and abs(left + right - whole) > tol:
                raise PrecisionError("adaptive Gauss-Legendre hit depth limit", module="quadrature")
            total += left + right
        else:
            stack.append((a, m, left, depth + 1))
            stack.append((m, b, right, depth + 1))
    return total


def _jacobi_eval(n, a, b, x):
    """Return ``P_n(x), P_{n-1}(x)`` for Jacobi parameters ``(a, b)``."""
    p0 = mp.mpf(1)
    if n == 0:
        return p0, mp.mpf(0)
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + a + b
        num = (c - 1) * (c * (c - 2) * x + a * a - b * b) * p1 - 2 * (k + a - 1) * (k + b - 1) * c * p0
        p0, p1 = p1, num / (2 * k * (k + a + b) * (c - 2))
    return p1, p0


def gauss_jacobi01(n, alpha, prec):
    """Nodes ``t`` and weights on ``[0, 1]`` for the weight ``t**alpha``.

    The rule integrates ``t**alpha * p(t)`` exactly for polynomials of degree
    below ``2 n``.
    """
    key = (n, str(alpha), prec)
    hit = _GJ_CACHE.get(key)
    if hit is not None:
        return hit
    with mp.workprec(prec + 20):
        a = mp.mpf(0)
        b = mp.mpf(alpha)
        seeds, _ = roots_jacobi(n, 0.0, float(alpha))
        xs = []
        for x0 in np.sort(seeds):
            x = mp.mpf(float(x0))
            for _ in range(60):
                pn, pm = _jacobi_eval(n, a, b, x)
                c = 2 * n + a + b
                dp = (n * ((a - b) - c * x) * pn + 2 * (n + a) * (n + b) * pm) / (c * (1 - x * x))
                dx = pn / dp
                x -= dx
                if abs(dx) < mp.mpf(2) ** (-(prec + 10)):
                    break
            else:
                raise PrecisionError("Gauss-Jacobi Newton refinement stalled", module="quadrature")
            xs.append(x)
        const = (
            mp.gamma(n + a + 1) * mp.gamma(n + b + 1) / (mp.gamma(n + a + b + 1) * mp.factorial(n))
            * mp.mpf(2) ** (a + b + 1)
        )
        nodes, weights = [], []
        for x in xs:
            pn, pm = _jacobi_eval(n, a, b, x)
            c = 2 * n + a + b
            dp = (n * ((a - b) - c * x) * pn + 2 * (n + a) * (n + b) * pm) / (c * (1 - x * x))
            wgt = const / ((1 - x * x) * dp * dp)
            # map x in [-1, 1] with weight (1 + x)^alpha to t = (1 + x) / 2
            nodes.append((1 + x) / 2)
            weights.append(wgt / mp.mpf(2) ** (b + 1))
    out = ([+t for t in nodes], [+w for w in weights])
    _GJ_CACHE[key] = out
    return out
