"""Exact reference families for the symmetric cross weights.

Monic orthogonal polynomials on an interval from their three-term recurrence
``p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}``, with rational recurrence
coefficients kept as ``Fraction`` so the coefficients come out exact.
"""

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp


@dataclass(frozen=True)
class ReferenceFamily:
    """``kind`` is ``chebyshev``, ``legendre`` or ``jacobi01`` (weight ``x^a (1-x)^b`` on ``[0, 1]``)."""

    kind: str
    a_exp: Fraction = Fraction(0)
    b_exp: Fraction = Fraction(0)

    def recurrence(self, k):
        """``(alpha_k, beta_k)``; ``beta_0`` is unused and returned as 0."""
        if self.kind == "chebyshev":
            beta = Fraction(0) if k == 0 else (Fraction(1, 2) if k == 1 else Fraction(1, 4))
            return Fraction(0), beta
        if self.kind == "legendre":
            beta = Fraction(0) if k == 0 else Fraction(k * k, 4 * k * k - 1)
            return Fraction(0), beta
        if self.kind == "jacobi01":
            return _jacobi01_recurrence(self.a_exp, self.b_exp, k)
        raise ValueError(f"unknown family {self.kind!r}")


CHEBYSHEV = ReferenceFamily("chebyshev")
LEGENDRE = ReferenceFamily("legendre")
JACOBI_EVEN = ReferenceFamily("jacobi01", Fraction(-3, 4), Fraction(-1, 4))
JACOBI_ODD = ReferenceFamily("jacobi01", Fraction(1, 4), Fraction(-1, 4))


def _jacobi01_recurrence(a, b, k):
    # [0, 1] weight x^a (1-x)^b is the [-1, 1] Jacobi weight (1-y)^p (1+y)^q
    # with p = b, q = a under x = (1 + y) / 2
    p, q = Fraction(b), Fraction(a)
    s = p + q
    if k == 0:
        alpha = (q - p) / (s + 2)
        beta = Fraction(0)
    else:
        c = 2 * k + s
        alpha = (q * q - p * p) / (c * (c + 2)) if c != 0 else (q - p) / (s + 2)
        if k == 1:
            # the factor (k + p + q) cancels against (c - 1); keep the reduced form
            beta = 4 * (1 + p) * (1 + q) / ((2 + s) ** 2 * (3 + s))
        else:
            beta = 4 * k * (k + p) * (k + q) * (k + s) / (c * c * (c + 1) * (c - 1))
    return (alpha + 1) / 2, beta / 4


def reference_poly(family, m):
    """Monic coefficients (highest first) of the degree-``m`` member, as ``Fraction``."""
    prev, cur = [], [Fraction(1)]
    for k in range(m):
        alpha, beta = family.recurrence(k)
        nxt = cur + [Fraction(0)]
        for j, c in enumerate(cur):
            nxt[j + 1] -= alpha * c
        if prev:
            shift = len(nxt) - len(prev)
            for j, c in enumerate(prev):
                nxt[j + shift] -= beta * c
        prev, cur = cur, nxt
    return cur


def compose_cross(family, m, power, prefactor=1):
    """Coefficients of ``prefactor * p_m(z^power)``; ``prefactor`` is ``1`` or ``"z"``."""
    base = reference_poly(family, m)
    out = []
    for j, c in enumerate(base):
        out.append(c)
        if j < len(base) - 1:
            out.extend([Fraction(0)] * (power - 1))
    if prefactor == "z":
        out.append(Fraction(0))
    elif prefactor != 1:
        raise ValueError("prefactor must be 1 or 'z'")
    return out


def family_for(name):
    """``builder(n)`` giving the exact ``Q_n`` of a builtin weight at ``a = b = 1``."""
    if name in ("chebyshev", "legendre"):
        fam = CHEBYSHEV if name == "chebyshev" else LEGENDRE
        return lambda n: compose_cross(fam, n // 2, 2)
    if name == "jacobi-quarter":

        def build(n):
            if n % 4 == 0:
                return compose_cross(JACOBI_EVEN, n // 4, 4)
            return compose_cross(JACOBI_ODD, n // 4, 4, "z")

        return build
    raise ValueError(f"no reference family for {name!r}")


def to_mp(coeffs):
    return [mp.mpf(c.numerator) / c.denominator for c in coeffs]


def beta_moment(a, b, k):
    """``int_0^1 x^(a+k) (1-x)^b dx``; ``a`` and ``b`` may be ``Fraction``."""
    a, b = (mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x) for x in (a, b))
    return mp.beta(a + k + 1, b + 1)
