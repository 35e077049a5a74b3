"""Regularized one-sided power integrals with analytic continuation.

The basic object is the map  alpha -> (1/Gamma(alpha+1)) int_0^inf f(t) t^alpha dt
on decaying profiles f.  Inside the convergent strip -1 < Re alpha the
integral is computed directly; past alpha = -1 it is continued by the
split representation

    (1/Gamma(alpha+1)) [ int_0^rho t^alpha A(t) dt
                         + int_rho^inf t^alpha f(t) dt
                         + sum_{j<=l} c_j rho^{alpha+j+1} / (alpha+j+1) ]

where A(t) = f(t) - sum_{j<=l} c_j t^j subtracts the Taylor polynomial of f
at 0.  The value is independent of the split radius rho and of l (uniqueness
of the continuation); both are exposed so the invariance is testable.

The split bracket (without the reciprocal-gamma prefactor) is shared with
the fractional-integral module, which applies its own normalizing prefactor
after cancelling the gamma factors analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DivergenceError,
    MissingCoefficientError,
    NegativeIntegerOrderError,
    PoleError,
    StripViolationError,
)
from .fields import ScalarField
from .quadrature import gauss_jacobi_unit, gauss_legendre_panels, geometric_edges, tanh_sinh_nodes
from .specfun import is_nonpositive_integer, omega, reciprocal_gamma
from .spherical import RadialProfile, SphereRule, profile_of

__all__ = [
    "ContinuationConfig",
    "SplitValue",
    "LimitResult",
    "required_taylor_order",
    "split_bracket",
    "xplus",
    "xplus_direct",
    "xplus_at_negative_integer",
    "xplus_right_limit",
    "r_alpha",
]

_RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class ContinuationConfig:
    """Parameters of the split representation and its quadrature.

    ``rho`` is the split radius (provably immaterial to the value);
    ``taylor_order`` pins the subtraction order l (None = smallest
    admissible for the requested order); ``truncation_radius`` is the
    minimum outer truncation, which the tail bound may enlarge.
    """

    rho: float = 0.5
    taylor_order: Optional[int] = None
    truncation_radius: Optional[float] = None
    inner_level: int = 6
    inner_nodes: int = 64
    outer_nodes: int = 24
    tolerance: float = 1e-9
    inner_method: str = "auto"  # auto | tanh_sinh | gauss_jacobi
    max_radius: float = 1e14

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("split radius rho must lie in (0, 1)")
        if self.truncation_radius is not None and self.truncation_radius < 1.0:
            raise ValueError("truncation radius must be >= 1")
        if self.inner_level < 1 or self.inner_nodes < 4 or self.outer_nodes < 2:
            raise ValueError("quadrature resolutions must be positive")
        if self.inner_method not in ("auto", "tanh_sinh", "gauss_jacobi"):
            raise ValueError(f"unknown inner_method {self.inner_method!r}")

    def with_tolerance(self, tol: float) -> "ContinuationConfig":
        return replace(self, tolerance=tol)


@dataclass(frozen=True)
class SplitValue:
    """The three terms of the split representation plus diagnostics."""

    inner: complex
    outer: complex
    bterm: complex
    taylor_order: int
    rho: float
    truncation_radius: float
    tail_bound: float

    @property
    def bracket(self) -> complex:
        return self.inner + self.outer + self.bterm


@dataclass(frozen=True)
class LimitResult:
    """A one-sided limit estimate with its raw convergence trace."""

    estimate: complex
    orders: np.ndarray
    values: np.ndarray
    converged: bool


def required_taylor_order(order_re: float, hoelder_index: Optional[float]) -> int:
    """Smallest subtraction order l admitting the given integration order.

    With Hoelder index eps on the top derivatives the strip reaches down to
    -l-eps-1, so l is the smallest integer with l + eps > -order-1; with
    continuity only, the strict inequality l > -order-1 is required.
    """
    need = -order_re - 1.0
    if need < 0.0:
        return 0
    if hoelder_index is not None:
        return max(0, math.ceil(need - hoelder_index + 1e-12))
    return max(0, math.floor(need + 1e-12) + 1)


def preferred_taylor_order(order_re: float) -> int:
    """Subtraction order that keeps the continued quadrature well conditioned.

    Left of the base strip the weight t^order amplifies the cancellation
    noise of the subtracted integrand; subtracting well past the resonant
    index pushes that noise floor below tolerance (and moves any
    near-resonant mass into the closed-form term, where it belongs).
    """
    need = -order_re - 1.0
    if need <= 0.0:
        return 0
    return math.ceil(2.5 * need) + 1


def _effective_decay(profile: RadialProfile) -> float:
    return math.inf if profile.support_radius is not None else profile.decay_exponent


def _strip_check(profile: RadialProfile, order: complex) -> None:
    a = _effective_decay(profile)
    if order.real >= a - 1.0:
        raise StripViolationError(
            f"order {order} violates the decay bound Re(order) < a-1 = {a - 1.0:g}"
        )
    reach = profile.continuity_order + (profile.hoelder_index or 0.0)
    if -order.real - 1.0 >= reach:
        raise StripViolationError(
            f"order {order} lies left of the continuation strip: the profile's "
            f"regularity (l={profile.continuity_order:g}, eps={profile.hoelder_index}) "
            f"reaches only down to order > {-reach - 1.0:g}"
        )


def _pick_taylor_order(profile: RadialProfile, order: complex, cfg: ContinuationConfig) -> int:
    l_min = required_taylor_order(order.real, profile.hoelder_index)
    avail = -1 if profile.taylor is None else len(profile.taylor) - 1
    if cfg.taylor_order is not None:
        l_used = cfg.taylor_order
        if l_used < l_min:
            raise StripViolationError(
                f"taylor_order={l_used} is below the smallest admissible order {l_min} "
                f"for integration order {order}"
            )
    else:
        l_used = min(max(l_min, preferred_taylor_order(order.real)), max(avail, l_min))
    if l_used > avail:
        raise StripViolationError(
            f"order {order} needs Taylor data to order {l_used}, profile supplies {avail}"
        )
    return l_used


def _inner_rho(profile: RadialProfile, cfg: ContinuationConfig) -> float:
    rho = cfg.rho
    inside = [b for b in profile.breakpoints if 1e-9 < b <= rho]
    if inside:
        rho = min(rho, 0.7 * min(inside))
    return rho


def _subtracted(profile: RadialProfile, t: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    vals = profile(t)
    if coeffs.size:
        vals = vals - P.polyval(t, coeffs)
    return vals


def _inner_integral(
    profile: RadialProfile, order: complex, rho: float, coeffs: np.ndarray, cfg: ContinuationConfig
) -> complex:
    method = cfg.inner_method
    if method == "auto":
        method = (
            "gauss_jacobi"
            if profile.analytic_near_zero
            and order.imag == 0.0
            and order.real > -1.0
            and not profile.breakpoints
            else "tanh_sinh"
        )
    if method == "gauss_jacobi":
        if order.real <= -1.0:
            raise ValueError(
                "the Gauss-Jacobi inner rule needs Re(order) > -1; "
                "use the tanh_sinh method for continued orders"
            )
        x, w = gauss_jacobi_unit(cfg.inner_nodes, order.real)
        t = rho * x
        return rho ** (order.real + 1.0) * complex(np.dot(w, _subtracted(profile, t, coeffs)))
    x, log_x, log_w = tanh_sinh_nodes(cfg.inner_level)
    if order.real < -1.0:
        # Left of the base strip the weight t^order grows toward 0 and only
        # the vanishing of the subtracted integrand A(t) = O(t^{l+1}) keeps
        # the sum finite.  Below t ~ eps^{1/(l+1)} the computed A is pure
        # cancellation noise amplified by the weight, so those nodes are
        # dropped; the discarded true mass is O(eps) of the integral.
        vanish = max(len(coeffs), 1)
        keep = log_x >= math.log(np.finfo(float).eps) / vanish
        x, log_x, log_w = x[keep], log_x[keep], log_w[keep]
    t = rho * x
    cw = np.exp(log_w + complex(order) * log_x) * rho ** (complex(order) + 1.0)
    return complex(np.dot(cw, _subtracted(profile, t, coeffs)))


def _choose_truncation(
    profile: RadialProfile, order: complex, rho: float, cfg: ContinuationConfig
) -> tuple[float, float]:
    """Outer truncation radius and the analytic tail bound it leaves behind.

    The search starts beyond the radius where the profile's mass sits
    (spherical means around off-origin centers peak near that distance), so
    a small sample at small radii cannot truncate away the bulk.
    """
    if profile.support_radius is not None:
        return max(profile.support_radius, rho * (1 + 1e-12)), 0.0
    d = profile.mass_radius
    r0 = max(cfg.truncation_radius or 1.0, 2.0 * rho, 1.0)
    a = profile.decay_exponent
    tol = cfg.tolerance
    if math.isinf(a):
        w = max(r0, 4.0)
        while True:
            r = d + w
            m = abs(complex(profile(np.array([r]))[0]))
            if m * max(r, 1.0) ** (order.real + 1.0) < 0.1 * tol:
                return r, m * max(r, 1.0) ** (order.real + 1.0)
            w *= 2.0
            if d + w > cfg.max_radius:
                raise DivergenceError(
                    "profile declares super-polynomial decay but has not decayed "
                    f"below tolerance by radius {cfg.max_radius:g}"
                )
    margin = a - 1.0 - order.real  # positive by the strip check
    ts = np.geomspace(max(rho, 1.0), max(4.0 * r0, 2.0 * (d + 1.0)), 16)
    c = float(np.max(np.abs(profile(ts)) * ts**a))
    c = max(c, 1e-300)
    r = max(r0, 2.0 * (d + 1.0), (c / (tol * margin)) ** (1.0 / margin))
    r = min(r, cfg.max_radius)
    tail = c * r ** (order.real + 1.0 - a) / margin
    m_end = abs(float(profile(np.array([r]))[0]))
    if m_end > 10.0 * c * r ** (-a):
        raise DivergenceError(
            f"declared decay exponent {a:g} fails empirically at the truncation "
            f"radius {r:g}: |f(R)| = {m_end:.3g} exceeds the fitted envelope"
        )
    return r, tail


def _bump_refinement(rho: float, radius: float, mass_radius: float) -> tuple[float, ...]:
    """Unit-width panel edges across the zone where an off-origin profile peaks.

    Geometric panels resolve power-law behavior but step over a bump of
    width O(1) sitting at a large radius; these extra edges pin it down.
    """
    if mass_radius <= 2.0:
        return ()
    lo = max(rho, mass_radius - 8.0)
    hi = min(radius, mass_radius + 8.0)
    if hi <= lo:
        return ()
    count = int(math.ceil(hi - lo)) + 1
    return tuple(np.linspace(lo, hi, max(count, 2)))


def _outer_integral(
    profile: RadialProfile, order: complex, rho: float, radius: float, cfg: ContinuationConfig
) -> complex:
    if radius <= rho * (1 + 1e-9):
        return 0.0 + 0.0j
    extra = profile.breakpoints + _bump_refinement(rho, radius, profile.mass_radius)
    edges = geometric_edges(rho, radius, breakpoints=extra)
    t, w = gauss_legendre_panels(edges, cfg.outer_nodes)
    return complex(np.dot(w * np.exp(complex(order) * np.log(t)), profile(t)))


def _b_term(coeffs: np.ndarray, order: complex, rho: float) -> complex:
    total = 0.0 + 0.0j
    for j, c in enumerate(coeffs):
        if c == 0.0:
            continue
        d = order + j + 1.0
        if abs(d) < _RESONANCE_TOL:
            raise PoleError(
                f"split representation is singular: nonzero Taylor coefficient c_{j} "
                f"meets the resonant order {order}"
            )
        total += c * rho**d / d
    return total


def split_bracket(profile: RadialProfile, order: complex, cfg: ContinuationConfig) -> SplitValue:
    """Evaluate the three-term split bracket at the given integration order.

    This is the continued value of int_0^inf f(t) t^order dt, without any
    gamma prefactor.  Resonant orders whose Taylor coefficient vanishes are
    removable and simply skipped; a nonzero coefficient at a resonance
    raises ``PoleError``.
    """
    order = complex(order)
    _strip_check(profile, order)
    l_used = _pick_taylor_order(profile, order, cfg)
    coeffs = np.asarray(profile.taylor[: l_used + 1], dtype=float)
    rho = _inner_rho(profile, cfg)
    inner = _inner_integral(profile, order, rho, coeffs, cfg)
    radius, tail = _choose_truncation(profile, order, rho, cfg)
    outer = _outer_integral(profile, order, rho, radius, cfg)
    bterm = _b_term(coeffs, order, rho)
    return SplitValue(
        inner=inner,
        outer=outer,
        bterm=bterm,
        taylor_order=l_used,
        rho=rho,
        truncation_radius=radius,
        tail_bound=tail,
    )


def xplus(profile: RadialProfile, alpha, cfg: Optional[ContinuationConfig] = None) -> complex:
    """The regularized power functional (1/Gamma(alpha+1)) int_0^inf f t^alpha dt.

    Valid on the continued strip of the profile; negative integer orders
    have the closed form ``xplus_at_negative_integer`` and are rejected
    here.
    """
    cfg = cfg or ContinuationConfig()
    alpha = complex(alpha)
    if is_nonpositive_integer(alpha) and alpha.real < 0:
        raise NegativeIntegerOrderError(
            f"alpha = {alpha} is a negative integer; use xplus_at_negative_integer"
        )
    value = split_bracket(profile, alpha, cfg).bracket
    return reciprocal_gamma(alpha + 1.0) * value


def xplus_direct(profile: RadialProfile, alpha, cfg: Optional[ContinuationConfig] = None) -> complex:
    """Plain quadrature of the defining integral, valid only for -1 < Re alpha < a-1.

    Exists as the independent cross-check of the split representation on
    the interior of the base strip.
    """
    cfg = cfg or ContinuationConfig()
    alpha = complex(alpha)
    a = _effective_decay(profile)
    if not -1.0 < alpha.real < a - 1.0:
        raise StripViolationError(
            f"direct evaluation requires -1 < Re alpha < {a - 1.0:g}, got {alpha}"
        )
    rho = _inner_rho(profile, cfg)
    no_subtraction = np.zeros(0)
    inner = _inner_integral(profile, alpha, rho, no_subtraction, cfg)
    radius, _ = _choose_truncation(profile, alpha, rho, cfg)
    outer = _outer_integral(profile, alpha, rho, radius, cfg)
    return reciprocal_gamma(alpha + 1.0) * (inner + outer)


def xplus_at_negative_integer(profile: RadialProfile, m: int) -> complex:
    """Closed-form continuation value at a negative integer order.

    At alpha = m in {-l-1, ..., -1} the continued functional equals
    (-1)^{-m-1} f^{(-m-1)}(0), read off the profile's Taylor data
    (f^{(j)}(0) = j! c_j).
    """
    if m != int(m) or m >= 0:
        raise ValueError(f"m must be a negative integer, got {m}")
    j = -int(m) - 1
    if profile.taylor is None or j >= len(profile.taylor):
        raise MissingCoefficientError(
            f"order {m} needs the Taylor coefficient of order {j}, "
            f"profile supplies {0 if profile.taylor is None else len(profile.taylor)} coefficients"
        )
    return complex((-1.0) ** j * math.factorial(j) * profile.taylor[j])


def aitken_extrapolate(values: np.ndarray) -> tuple[complex, bool]:
    """Aitken delta-squared limit of a convergent sequence, with a stability flag."""
    v = np.asarray(values, dtype=complex)
    if v.size < 3:
        return v[-1], False
    d2 = v[2:] - 2.0 * v[1:-1] + v[:-2]
    ok = np.abs(d2) > 1e-300
    acc = np.where(ok, v[2:] - np.where(ok, (v[2:] - v[1:-1]) ** 2, 0.0) / np.where(ok, d2, 1.0), v[2:])
    est = complex(acc[-1])
    if acc.size >= 2:
        last_gap = abs(acc[-1] - acc[-2])
        raw_gap = abs(v[-1] - v[-2])
        converged = last_gap <= max(1e-9, 0.5 * raw_gap)
    else:
        converged = False
    return est, converged


def xplus_right_limit(
    profile: RadialProfile, s_sequence: Sequence[float], cfg: Optional[ContinuationConfig] = None
) -> LimitResult:
    """The limit of the power functional as the order decreases to -1.

    For continuous decaying profiles the limit equals f(0); the raw trace is
    returned alongside the extrapolated estimate so slow convergence is
    visible rather than hidden.
    """
    cfg = cfg or ContinuationConfig()
    s = np.asarray(list(s_sequence), dtype=float)
    if s.size < 2 or np.any(np.diff(s) >= 0) or np.any((s <= -1.0) | (s >= 0.0)):
        raise ValueError("s_sequence must strictly decrease within (-1, 0)")
    values = np.array([xplus(profile, si, cfg) for si in s])
    estimate, converged = aitken_extrapolate(values)
    return LimitResult(estimate=estimate, orders=s, values=values, converged=converged)


def r_alpha(
    field: ScalarField,
    alpha,
    center,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
) -> complex:
    """Fractional radial moment (1/Gamma(alpha+n)) int |x|^alpha f(x+center) dx.

    Reduced to the 1-D functional through the spherical-mean profile
    (polar coordinates); integer orders in {-l-n, ..., -n} use the closed
    form through the profile derivatives at 0.
    """
    from .spherical import sphere_rule  # local import to avoid cycle at module load

    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    n = field.dim
    alpha = complex(alpha)
    order = alpha + n - 1.0

    if alpha.imag == 0.0 and alpha.real == round(alpha.real) and alpha.real <= -n:
        j = int(-alpha.real) - n
        hoelder = field.smoothness.hoelder_index
        if field.smoothness.continuity_order + (hoelder or 0.0) <= j:
            raise StripViolationError(
                f"order {alpha} needs profile regularity beyond C^{j}; field declares "
                f"l={field.smoothness.continuity_order:g}, eps={hoelder}"
            )
        profile = profile_of(field, center, rule, taylor_order=j)
        if profile.taylor is None or len(profile.taylor) <= j:
            raise MissingCoefficientError(f"profile Taylor data to order {j} unavailable")
        return complex(omega(n) * (-1.0) ** j * math.factorial(j) * profile.taylor[j])

    l_req = required_taylor_order(order.real, field.smoothness.hoelder_index)
    if cfg.taylor_order is not None:
        l_req = max(l_req, cfg.taylor_order)
    profile = profile_of(
        field, center, rule, taylor_order=l_req, taylor_order_hint=preferred_taylor_order(order.real)
    )
    return omega(n) * xplus(profile, order, cfg)
