"""Spherical means via quadrature on S^{n-1}, and radial profiles.

Rules are antipodally symmetric by construction (node sets closed under
negation), which makes the evenness of mean-value profiles exact at the
quadrature level.  n = 2 uses equally spaced nodes on the circle (spectral
for periodic integrands); n = 3 uses Lebedev designs; n >= 4 falls back to
product Gauss rules over the angular coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import lebedev_rule
from scipy.special import roots_gegenbauer

from .errors import TaylorFailureError
from .fields import ScalarField
from .specfun import omega

__all__ = [
    "SphereRule",
    "sphere_rule",
    "mean_value",
    "RadialProfile",
    "profile_of",
    "combine_profiles",
]


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Quadrature nodes/weights on S^{n-1} with weights summing to omega(n)."""

    dim: int
    nodes: np.ndarray  # (m, dim) unit vectors
    weights: np.ndarray  # (m,) positive
    order: int  # polynomial exactness degree
    antipodal: bool = True

    def __post_init__(self):
        norms = np.linalg.norm(self.nodes, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-12):
            raise ValueError("rule nodes must be unit vectors")
        if np.any(self.weights <= 0):
            raise ValueError("rule weights must be positive")
        if not math.isclose(float(self.weights.sum()), omega(self.dim), rel_tol=1e-12):
            raise ValueError("rule weights must sum to the sphere surface measure")


def _pair_antipodal(half_nodes: np.ndarray, half_weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # exact closure under negation: append the bitwise negations
    return np.vstack([half_nodes, -half_nodes]), np.concatenate([half_weights, half_weights])


@lru_cache(maxsize=64)
def _circle_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    m = max(4, 2 * ((order + 2) // 2))  # even node count >= order+1
    half = m // 2
    theta = 2.0 * np.pi * np.arange(half) / m
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    weights = np.full(half, 2.0 * np.pi / m)
    return _pair_antipodal(nodes, weights)


_LEBEDEV_ORDERS = (
    3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31, 35, 41, 47, 53,
    59, 65, 71, 77, 83, 89, 95, 101, 107, 113, 119, 125, 131,
)


@lru_cache(maxsize=64)
def _lebedev(order: int) -> tuple[np.ndarray, np.ndarray, int]:
    for o in _LEBEDEV_ORDERS:
        if o >= order:
            break
    else:
        o = _LEBEDEV_ORDERS[-1]
    x, w = lebedev_rule(o)
    return x.T.copy(), w.copy(), o


@lru_cache(maxsize=32)
def _product_rule(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    # S^{n-1} as x = (sin(theta) y, cos(theta)), y in S^{n-2};
    # the polar factor integrates with weight (1-t^2)^{(n-3)/2}, t = cos(theta)
    if n == 2:
        return _circle_rule(order)
    sub_nodes, sub_weights = _product_rule(n - 1, order)
    m = max(2, (order + 2) // 2)
    m += m % 2  # even count avoids a node at t = 0, keeping pairs exact
    t, wt = roots_gegenbauer(m, (n - 2) / 2.0)
    pos = t > 0
    t, wt = t[pos], wt[pos]
    s = np.sqrt(1.0 - t * t)
    nodes = np.concatenate(
        [s[:, None, None] * sub_nodes[None, :, :], np.broadcast_to(t[:, None, None], (t.size, sub_nodes.shape[0], 1))],
        axis=2,
    ).reshape(-1, n)
    weights = (wt[:, None] * sub_weights[None, :]).ravel()
    return _pair_antipodal(nodes, weights)


def sphere_rule(n: int, order: int = 23) -> SphereRule:
    """Antipodally symmetric rule on S^{n-1}, exact on polynomials up to ``order``."""
    if n < 2:
        raise ValueError("sphere rules require n >= 2")
    if n == 2:
        nodes, weights = _circle_rule(order)
        actual = len(nodes) - 1
    elif n == 3:
        nodes, weights, actual = _lebedev(order)
    else:
        nodes, weights = _product_rule(n, order)
        actual = order
    return SphereRule(dim=n, nodes=nodes, weights=weights, order=actual)


# ---------------------------------------------------------------------------
# Mean values


def mean_value(f: ScalarField, center, r: float, rule: SphereRule) -> float:
    """Average of f over the sphere of radius r around center.

    At r = 0 this returns f(center) exactly.
    """
    if rule.dim != f.dim:
        raise ValueError("rule dimension must match the field")
    center = np.asarray(center, dtype=float)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0.0:
        return float(f(center))
    vals = f(center[None, :] + r * rule.nodes)
    return float(np.dot(rule.weights, vals) / omega(f.dim))


def _mean_values(f: ScalarField, center: np.ndarray, rs: np.ndarray, rule: SphereRule) -> np.ndarray:
    """Vectorized means over many radii (quadrature route).

    Zero radii stay inside the same batched field call: the weighted sum of
    identical values reproduces f(center) to roundoff, and keeping it
    in-batch makes the evaluation error continuous in r for derived fields.
    """
    rs = np.asarray(rs, dtype=float)
    pts = center[None, None, :] + rs[:, None, None] * rule.nodes[None, :, :]
    vals = f(pts)
    return vals @ rule.weights / omega(f.dim)


def _windowed_circle_means(
    f: ScalarField, center: np.ndarray, rs: np.ndarray, n_nodes: int = 64
) -> np.ndarray:
    """Circle means of a compactly supported plane field, resolved per radius.

    From a center far outside the support, the support subtends a small
    angular window on the circle of radius r; fixed node sets step over it.
    Here the window [-gamma, gamma] toward the support is computed per
    radius and integrated with Gauss-Legendre nodes placed inside it.
    """
    sc, sr = f.support
    rs = np.asarray(rs, dtype=float)
    u = sc - center
    dist = float(np.linalg.norm(u))
    gx, gw = _gl_rule_cached(n_nodes)
    if dist < 1e-12:
        gamma = np.where(rs <= sr, np.pi, 0.0)
        base = 0.0
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            cosb = (rs * rs + dist * dist - sr * sr) / (2.0 * rs * dist)
        cosb = np.where(rs == 0.0, -1.0, cosb)  # a zero-radius circle is the center point
        gamma = np.arccos(np.clip(cosb, -1.0, 1.0))
        base = math.atan2(u[1], u[0])
    theta = base + gamma[:, None] * gx[None, :]
    weights = gamma[:, None] * gw[None, :]
    pts = center[None, None, :] + rs[:, None, None] * np.stack(
        [np.cos(theta), np.sin(theta)], axis=-1
    )
    return np.einsum("tj,tj->t", f(pts), weights) / (2.0 * np.pi)


@lru_cache(maxsize=16)
def _gl_rule_cached(n: int):
    from scipy.special import roots_legendre

    return roots_legendre(n)


# ---------------------------------------------------------------------------
# Radial profiles


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """An evaluable function on [0, inf) with the metadata the continuation needs.

    ``taylor`` holds coefficients c_0..c_l of the profile at 0 (not
    derivatives: M(t) = sum c_j t^j + o(t^l)).  Even-parity profiles carry
    exact zeros in the odd slots.  ``analytic_near_zero`` marks profiles
    whose Taylor data came from a closed form, enabling the spectral inner
    quadrature path.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    decay_exponent: float
    taylor: Optional[np.ndarray] = None
    parity_even: bool = True
    continuity_order: float = 0
    hoelder_index: Optional[float] = None
    support_radius: Optional[float] = None
    breakpoints: tuple = ()
    analytic_near_zero: bool = False
    mass_radius: float = 0.0  # radius where the profile's mass concentrates
    label: str = ""

    def __post_init__(self):
        if self.taylor is not None and self.parity_even:
            odd = np.asarray(self.taylor)[1::2]
            if odd.size and np.any(odd != 0.0):
                raise ValueError("even profile declared with nonzero odd Taylor coefficients")

    def __call__(self, r) -> np.ndarray:
        return self.evaluate(np.asarray(r, dtype=float))


def _numeric_even_taylor(
    ev: Callable[[np.ndarray], np.ndarray], order: int, h0: float, rtol: float = 1e-4
) -> np.ndarray:
    """Even-order Taylor coefficients of an even profile by Richardson-extrapolated
    central differences in r; odd slots are exact zeros.

    Coefficients are peeled sequentially: c_{2m} from (M(h) - partial_sum)/h^{2m}
    at h and h/2.  Raises ``TaylorFailureError`` when the two finest
    extrapolants disagree.
    """
    coeffs = np.zeros(order + 1)
    coeffs[0] = float(ev(np.zeros(1))[0])
    for m in range(1, order // 2 + 1):
        est_prev = None
        ok = False
        for h in (h0, h0 / 2.0, h0 / 4.0):
            d1 = (float(ev(np.array([h]))[0]) - np.polyval(coeffs[: 2 * m][::-1], h)) / h ** (2 * m)
            d2 = (float(ev(np.array([h / 2.0]))[0]) - np.polyval(coeffs[: 2 * m][::-1], h / 2.0)) / (
                h / 2.0
            ) ** (2 * m)
            est = (4.0 * d2 - d1) / 3.0  # leading error term is O(h^2)
            if est_prev is not None and abs(est - est_prev) <= rtol * max(1.0, abs(est)):
                coeffs[2 * m] = est
                ok = True
                break
            est_prev = est
        if not ok:
            raise TaylorFailureError(
                f"numerical Taylor coefficient of order {2 * m} did not converge "
                f"(last estimates {est_prev:.6g}, {est:.6g})"
            )
    return coeffs[: order + 1]


def profile_of(
    f: ScalarField,
    center,
    rule: SphereRule,
    taylor_order: int = 0,
    taylor_step: float = 0.2,
    taylor_order_hint: Optional[int] = None,
) -> RadialProfile:
    """Spherical-mean profile r -> mean_value(f, center, r) with Taylor data.

    Taylor coefficients are exact when the catalog supplies them, otherwise
    numerical (odd orders forced to zero by parity).  ``taylor_order`` is
    the order that must be delivered; ``taylor_order_hint`` asks for more
    when a closed form makes the extra coefficients free.  Decay and
    smoothness are inherited from the field; kink radii induced by compact
    support are recorded as breakpoints.
    """
    center = np.asarray(center, dtype=float)
    if taylor_order < 0:
        raise ValueError("taylor_order must be >= 0")
    generous = max(taylor_order, taylor_order_hint or 0)

    at_origin = not np.any(center)
    if f.radial and at_origin:
        axis = np.zeros(f.dim)
        ev = lambda rs: f(np.multiply.outer(np.asarray(rs, dtype=float), _e1(f.dim)))
        analytic_hint = True  # radial shortcut evaluates the field itself
    else:
        exact = None
        if f.exact_spherical_mean is not None:
            exact = f.exact_spherical_mean(center, np.zeros(1))
        if exact is not None:
            mean_fn = f.exact_spherical_mean
            ev = lambda rs: mean_fn(center, rs)
            analytic_hint = True
        elif f.support is not None and f.dim == 2:
            ev = lambda rs: _windowed_circle_means(f, center, rs)
            analytic_hint = False
        else:
            ev = lambda rs: _mean_values(f, center, rs, rule)
            analytic_hint = False

    taylor = None
    if f.radial_taylor_at is not None:
        taylor = f.radial_taylor_at(center, generous)
    if taylor is None:
        if taylor_order <= 1:
            taylor = np.zeros(taylor_order + 1)
            taylor[0] = float(ev(np.zeros(1))[0])
        else:
            taylor = _numeric_even_taylor(ev, taylor_order, taylor_step)
        analytic = False
    else:
        taylor = np.asarray(taylor, dtype=float)[: generous + 1]
        if taylor.size < generous + 1:
            taylor = np.pad(taylor, (0, generous + 1 - taylor.size))
        analytic = analytic_hint

    support_radius = None
    breakpoints = ()
    if f.support is not None:
        d = float(np.linalg.norm(center - f.support[0]))
        support_radius = d + f.support[1]
        breakpoints = tuple(sorted({abs(d - f.support[1]), d + f.support[1]}))
    anchor = np.zeros(f.dim) if f.decay_anchor is None else f.decay_anchor

    return RadialProfile(
        evaluate=ev,
        decay_exponent=f.decay_exponent,
        taylor=taylor,
        parity_even=True,
        continuity_order=f.smoothness.continuity_order,
        hoelder_index=f.smoothness.hoelder_index,
        support_radius=support_radius,
        breakpoints=breakpoints,
        analytic_near_zero=analytic,
        mass_radius=float(np.linalg.norm(center - anchor)),
        label=f"mean[{f.name}]@{np.array2string(center, precision=3)}",
    )


@lru_cache(maxsize=16)
def _e1(n: int) -> np.ndarray:
    e = np.zeros(n)
    e[0] = 1.0
    return e


def combine_profiles(a: float, p: RadialProfile, b: float, q: RadialProfile) -> RadialProfile:
    """Linear combination a*p + b*q with metadata merged conservatively."""
    taylor = None
    if p.taylor is not None and q.taylor is not None:
        m = min(len(p.taylor), len(q.taylor))
        taylor = a * np.asarray(p.taylor[:m]) + b * np.asarray(q.taylor[:m])
    sup = None
    if p.support_radius is not None and q.support_radius is not None:
        sup = max(p.support_radius, q.support_radius)
    return RadialProfile(
        evaluate=lambda rs: a * p(rs) + b * q(rs),
        decay_exponent=min(p.decay_exponent, q.decay_exponent),
        taylor=taylor,
        parity_even=p.parity_even and q.parity_even,
        continuity_order=min(p.continuity_order, q.continuity_order),
        hoelder_index=None
        if p.hoelder_index is None or q.hoelder_index is None
        else min(p.hoelder_index, q.hoelder_index),
        support_radius=sup,
        breakpoints=tuple(sorted(set(p.breakpoints) | set(q.breakpoints))),
        analytic_near_zero=p.analytic_near_zero and q.analytic_near_zero,
        mass_radius=max(p.mass_radius, q.mass_radius),
        label=f"{a:g}*{p.label}+{b:g}*{q.label}",
    )
