"""Complex special functions and the normalizing constants of the toolkit.

Gamma evaluation delegates to scipy's complex implementation (relative
accuracy ~1e-14 on the strips exercised here).  Poles are never evaluated
directly: callers that need the pole structure go through
``reciprocal_gamma`` (entire, exactly zero at the poles) or the residue
helpers.  Everything in this module is pure and stateless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as _sc

from .errors import PoleError

__all__ = [
    "Dimension",
    "gamma",
    "reciprocal_gamma",
    "h_n",
    "h_n_reciprocal",
    "h_n_residue",
    "omega",
    "inversion_constant",
]


@dataclass(frozen=True)
class Dimension:
    """Ambient dimension ``n`` and plane dimension ``k`` with 1 <= k <= n-1."""

    n: int
    k: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"ambient dimension must be an integer >= 2, got n={self.n}")
        if int(self.k) != self.k or not 1 <= self.k <= self.n - 1:
            raise ValueError(f"plane dimension must satisfy 1 <= k <= n-1, got k={self.k}, n={self.n}")


def is_nonpositive_integer(z) -> bool:
    """True when z is exactly a nonpositive integer (0, -1, -2, ...)."""
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real)


def gamma(z) -> complex:
    """Gamma function on the complex plane, away from its poles.

    Raises ``PoleError`` for z in {0, -1, -2, ...}; use ``reciprocal_gamma``
    when the pole structure itself is needed.
    """
    if is_nonpositive_integer(z):
        raise PoleError(f"gamma has a pole at z={z}; use reciprocal_gamma for the limit structure")
    return complex(_sc.gamma(complex(z)))


def reciprocal_gamma(z) -> complex:
    """1/Gamma(z), entire in z; exactly 0 at the nonpositive integers."""
    if is_nonpositive_integer(z):
        return 0.0 + 0.0j
    return complex(_sc.rgamma(complex(z)))


def gamma_residue(m: int) -> float:
    """Residue of Gamma at z = -m: lim_{z->-m} (z+m) Gamma(z) = (-1)^m / m!."""
    if m < 0:
        raise ValueError("residues sit at the nonpositive integers; m must be >= 0")
    return (-1.0) ** m / math.factorial(m)


def h_n(n: int, alpha) -> complex:
    """Normalizing factor 2^a pi^{n/2} Gamma(a/2) / Gamma((n-a)/2) of the potentials.

    Exactly zero for alpha in n + 2N_0.  Raises ``PoleError`` at the simple
    poles alpha in -2N_0, where ``h_n_residue`` supplies the limit instead.
    """
    alpha = complex(alpha)
    if is_nonpositive_integer(alpha) and round(alpha.real) % 2 == 0:
        m = int(-round(alpha.real)) // 2
        raise PoleError(
            f"h_n({n}, {alpha}) is a simple pole; use h_n_residue(n, {m})",
            residue=h_n_residue(n, m),
        )
    return (
        2.0**alpha
        * math.pi ** (n / 2.0)
        * gamma(alpha / 2.0)
        * reciprocal_gamma((n - alpha) / 2.0)
    )


def h_n_reciprocal(n: int, alpha) -> complex:
    """1/h_n, computed through the entire reciprocal gamma.

    Exactly zero at alpha in -2N_0 (the poles of h_n).  Raises ``PoleError``
    at alpha in n + 2N_0, where h_n vanishes and the reciprocal blows up.
    """
    alpha = complex(alpha)
    if alpha.imag == 0.0 and alpha.real == round(alpha.real):
        j = round(alpha.real) - n
        if j >= 0 and j % 2 == 0:
            raise PoleError(f"1/h_n({n}, {alpha}) is a pole: h_n vanishes at alpha = n + 2m")
    return (
        2.0 ** (-alpha)
        * math.pi ** (-n / 2.0)
        * gamma((n - alpha) / 2.0)
        * reciprocal_gamma(alpha / 2.0)
    )


def h_n_residue(n: int, m: int) -> complex:
    """lim_{alpha -> -2m} (alpha + 2m) h_n(alpha), in closed form.

    The pole of Gamma(alpha/2) at -m contributes 2 (-1)^m / m!, so the
    residue is 2^{1-2m} pi^{n/2} (-1)^m / (m! Gamma(n/2 + m)).  At m = 0 this
    is the sphere surface measure omega(n).
    """
    if m < 0:
        raise ValueError("m must be a nonnegative integer")
    return complex(
        2.0 ** (1 - 2 * m)
        * math.pi ** (n / 2.0)
        * gamma_residue(m)
        / float(_sc.gamma(n / 2.0 + m))
    )


def omega(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / float(_sc.gamma(n / 2.0))


def inversion_constant(dim: Dimension) -> float:
    """Constant (4 pi)^{-k/2} Gamma((n-k)/2) / Gamma(n/2) of the inversion formula."""
    n, k = dim.n, dim.k
    return (
        (4.0 * math.pi) ** (-k / 2.0)
        * float(_sc.gamma((n - k) / 2.0))
        / float(_sc.gamma(n / 2.0))
    )
