"""Fractional integrals on R^n: direct evaluation, meromorphic continuation,
the order-zero identity, and the semigroup law.

The potential of order alpha is the convolution with |y|^{alpha-n} divided
by the normalizing factor h_n(alpha).  Everything is evaluated through the
1-D split bracket of the spherical-mean profile: both gamma factors of the
textbook formula are cancelled analytically first, so the orders the
inversion needs (alpha in -N_0) are genuinely removable:

  - alpha in -2N_0: the pole of h_n meets the resonant split term; only
    that term survives the limit, giving a local value from the profile's
    Taylor coefficient (order 0 reproduces the field value exactly);
  - alpha negative odd: the resonant coefficient vanishes by parity and the
    full bracket divided by h_n(alpha) is returned (nonlocal value);
  - alpha in n + 2N_0: genuine simple poles, flagged with a residue
    estimate.

Derived fields (potentials of potentials, backprojections) carry decay and
smoothness metadata propagated by the mapping-property rules, so downstream
strip checks stay honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .alphaline import (
    ContinuationConfig,
    LimitResult,
    aitken_extrapolate,
    preferred_taylor_order,
    required_taylor_order,
    split_bracket,
)
from .errors import PoleError, StripViolationError
from .fields import ScalarField, Smoothness
from .quadrature import _gl_rule, gauss_legendre_panels, geometric_edges, tanh_sinh_nodes
from .specfun import h_n, h_n_reciprocal, h_n_residue, omega
from .spherical import SphereRule, profile_of, sphere_rule

__all__ = [
    "RieszRequest",
    "riesz",
    "riesz_value",
    "riesz_many",
    "riesz_right_limit",
    "potential_field",
    "semigroup_defect",
    "beta_identity_check",
]


@dataclass(frozen=True, eq=False)
class RieszRequest:
    """One pointwise fractional-integral evaluation."""

    field: ScalarField
    alpha: complex
    x: np.ndarray
    cfg: ContinuationConfig
    rule: SphereRule

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.x.shape != (self.field.dim,):
            raise ValueError(f"evaluation point must have shape ({self.field.dim},)")
        if self.rule.dim != self.field.dim:
            raise ValueError("sphere rule dimension must match the field")


def _is_real_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real == round(z.real)


def _pole_check(n: int, alpha: complex, residue_thunk) -> None:
    if _is_real_integer(alpha):
        j = round(alpha.real) - n
        if j >= 0 and j % 2 == 0:
            raise PoleError(
                f"alpha = {alpha} is a genuine simple pole of the continued potential "
                f"(zero of h_n)",
                residue=residue_thunk(),
            )


def riesz(req: RieszRequest) -> complex:
    """The continued fractional integral of ``req.field`` at ``req.x``."""
    field, alpha, x, cfg, rule = req.field, complex(req.alpha), req.x, req.cfg, req.rule
    n = field.dim
    a_eff = math.inf if field.support is not None else field.decay_exponent
    if alpha.real >= a_eff:
        raise StripViolationError(f"Re alpha = {alpha.real:g} must stay below the decay exponent {a_eff:g}")

    if _is_real_integer(alpha) and alpha.real <= 0 and round(alpha.real) % 2 == 0:
        # resonance of the h_n pole with the split term: only the resonant
        # Taylor term survives; the limit is exact algebra, never numerics
        m = int(-round(alpha.real)) // 2
        reach = field.smoothness.continuity_order + (field.smoothness.hoelder_index or 0.0)
        if 2 * m >= reach:
            raise StripViolationError(
                f"alpha = {alpha} needs local regularity beyond C^{2 * m}; field "
                f"declares l={field.smoothness.continuity_order:g}, "
                f"eps={field.smoothness.hoelder_index}"
            )
        profile = profile_of(field, x, rule, taylor_order=2 * m)
        c = profile.taylor[2 * m]
        return complex(omega(n) * c / h_n_residue(n, m))

    def residue_estimate():
        l_req = required_taylor_order(alpha.real - 1.0, field.smoothness.hoelder_index)
        profile = profile_of(field, x, rule, taylor_order=l_req)
        bracket = split_bracket(profile, alpha - 1.0, cfg).bracket
        h = 1e-6
        dh = (h_n(n, alpha + h) - h_n(n, alpha - h)) / (2.0 * h)
        return omega(n) * bracket / dh

    _pole_check(n, alpha, residue_estimate)

    l_req = required_taylor_order(alpha.real - 1.0, field.smoothness.hoelder_index)
    if cfg.taylor_order is not None:
        l_req = max(l_req, cfg.taylor_order)
    profile = profile_of(
        field, x, rule, taylor_order=l_req, taylor_order_hint=preferred_taylor_order(alpha.real - 1.0)
    )
    bracket = split_bracket(profile, alpha - 1.0, cfg).bracket
    return omega(n) * h_n_reciprocal(n, alpha) * bracket


def riesz_value(field: ScalarField, alpha, x, cfg=None, rule=None) -> complex:
    """Convenience wrapper building the request with default configuration."""
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    return riesz(RieszRequest(field, alpha, np.asarray(x, dtype=float), cfg, rule))


# ---------------------------------------------------------------------------
# Batched evaluation (derived fields)


def _means_matrix(
    field: ScalarField, centers: np.ndarray, ts: np.ndarray, rule: SphereRule, chunk: int = 1_500_000
) -> np.ndarray:
    """(m, T) spherical means of ``field`` around each center.

    ``ts`` may hold shared radii (T,) or per-center radii (m, T).
    """
    centers = np.atleast_2d(centers)
    ts = np.asarray(ts, dtype=float)
    if field.exact_spherical_mean is not None:
        out = field.exact_spherical_mean(centers, ts)
        if out is not None:
            return np.asarray(out)
    m, t_count, w_count = centers.shape[0], ts.shape[-1], rule.nodes.shape[0]
    out = np.empty((m, t_count))
    rows = max(1, chunk // max(1, t_count * w_count))
    for i0 in range(0, m, rows):
        sub = centers[i0 : i0 + rows]
        tt = ts[None, :, None, None] if ts.ndim == 1 else ts[i0 : i0 + rows, :, None, None]
        pts = sub[:, None, None, :] + tt * rule.nodes[None, None, :, :]
        out[i0 : i0 + rows] = field(pts) @ rule.weights / omega(field.dim)
    return out


def _log_spaced_rows(a: np.ndarray, b: np.ndarray, count: int) -> np.ndarray:
    """(m, count+1) log-spaced edges between per-row endpoints a < b."""
    frac = np.linspace(0.0, 1.0, count + 1)
    return a[:, None] * np.exp(frac[None, :] * np.log(b / a)[:, None])


def _batch_bracket(
    field: ScalarField, centers: np.ndarray, order: complex, cfg: ContinuationConfig, rule: SphereRule
) -> np.ndarray:
    """Split brackets around many centers at once.

    Valid for fields without compact support whose required subtraction
    order is <= 1, i.e. the subtraction reduces to the center value c_0
    (odd coefficients vanish by parity).  The inner grid is shared; the
    outer grids are per-center, with a linearly refined zone across the
    radius where each center's spherical-mean profile peaks.
    """
    order = complex(order)
    l_req = required_taylor_order(order.real, field.smoothness.hoelder_index)
    if l_req > 1 or field.support is not None:
        raise ValueError("batched bracket supports only support-free fields with l <= 1")
    if abs(order + 1.0) < 1e-12:
        raise PoleError("batched bracket hit the resonant order -1")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    mcount = centers.shape[0]
    c0 = np.asarray(field(centers), dtype=float)
    rho = cfg.rho
    anchor = np.zeros(field.dim) if field.decay_anchor is None else field.decay_anchor
    d = np.linalg.norm(centers - anchor[None, :], axis=1)

    x, log_x, log_w = tanh_sinh_nodes(cfg.inner_level)
    if order.real < -1.0:
        # below eps^{1/2} the subtracted mean is cancellation noise amplified
        # by the growing weight (profiles are even: A = O(t^2) after c_0)
        keep = log_x >= math.log(np.finfo(float).eps) / 2.0
    else:
        coeff = log_w + order.real * log_x
        keep = coeff >= coeff.max() - 46.0
    x, log_x, log_w = x[keep], log_x[keep], log_w[keep]
    t_in = rho * x
    cw_in = np.exp(log_w + order * log_x) * rho ** (order + 1.0)
    m_in = _means_matrix(field, centers, t_in, rule)
    inner = (m_in - c0[:, None]) @ cw_in

    # per-center truncation radius, searched beyond each profile's peak;
    # the search is per-point so the evaluation error is a deterministic
    # function of the point alone (independent of batch composition)
    a = field.decay_exponent
    tol = cfg.tolerance
    r0 = max(cfg.truncation_radius or 1.0, 2.0 * rho, 1.0)
    if math.isinf(a):
        w = np.full(mcount, max(r0, 4.0))
        active = np.ones(mcount, dtype=bool)
        while np.any(active):
            probe = (d[active] + w[active])[:, None]
            mv = np.abs(_means_matrix(field, centers[active], probe, rule))[:, 0]
            done = mv * np.maximum(d[active] + w[active], 1.0) ** (order.real + 1.0) < 0.1 * tol
            idx = np.flatnonzero(active)
            active[idx[done]] = False
            w[idx[~done]] *= 2.0
            if float(np.max(d + w)) > cfg.max_radius:
                raise StripViolationError("batched truncation search exceeded the radius cap")
        radius = d + w
    else:
        margin = a - 1.0 - order.real
        if margin <= 0:
            raise StripViolationError(f"order {order} violates the decay bound for a = {a:g}")
        base = np.maximum(max(rho, 1.0), d + 2.0)
        probes = base[:, None] * np.array([1.0, 2.0, 4.0, 8.0])[None, :]
        mv = np.abs(_means_matrix(field, centers, probes, rule))
        c_env = np.maximum(np.max(mv * probes**a, axis=1), 1e-300)
        radius = np.maximum.reduce(
            [
                np.full(mcount, r0),
                2.0 * (d + 1.0),
                (c_env / (tol * margin)) ** (1.0 / margin),
            ]
        )
        radius = np.minimum(radius, cfg.max_radius)

    # per-center outer edges: log panels to the peak zone, unit-scale panels
    # across it, log panels out to the truncation radius
    lo_bump = np.maximum(2.0 * rho, d - 8.0)
    hi_bump = np.minimum(radius, d + 8.0)
    hi_bump = np.maximum(hi_bump, lo_bump * (1.0 + 1e-9) + 1e-12)
    radius = np.maximum(radius, hi_bump * (1.0 + 1e-9))
    e1, e2, e3 = 8, 16, 6
    seg1 = _log_spaced_rows(np.full(mcount, rho), lo_bump, e1)
    seg2 = lo_bump[:, None] + (hi_bump - lo_bump)[:, None] * np.linspace(0.0, 1.0, e2 + 1)[None, :]
    seg3 = _log_spaced_rows(hi_bump, radius, e3)
    edges = np.concatenate([seg1[:, :-1], seg2[:, :-1], seg3], axis=1)
    x0, w0 = _gl_rule(cfg.outer_nodes)
    aa = edges[:, :-1, None]
    bb = edges[:, 1:, None]
    t_out = (0.5 * (bb - aa) * (x0[None, None, :] + 1.0) + aa).reshape(mcount, -1)
    w_out = (0.5 * (bb - aa) * w0[None, None, :]).reshape(mcount, -1)
    m_out = _means_matrix(field, centers, t_out, rule)
    outer = np.sum(m_out * w_out * np.exp(order * np.log(t_out)), axis=1)

    bterm = c0 * rho ** (order + 1.0) / (order + 1.0)
    return inner + outer + bterm


def riesz_many(
    field: ScalarField,
    alpha,
    points: np.ndarray,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
) -> np.ndarray:
    """Fractional integral of one field at many points (shared-grid fast path).

    Falls back to pointwise evaluation when the field's support or the
    required subtraction order rules out a shared quadrature grid.
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    alpha = complex(alpha)
    n = field.dim
    l_req = required_taylor_order(alpha.real - 1.0, field.smoothness.hoelder_index)
    fast = (
        field.support is None
        and l_req <= 1
        and not (_is_real_integer(alpha) and alpha.real <= 0)
        and cfg.taylor_order is None
    )
    if fast:
        bracket = _batch_bracket(field, pts, alpha - 1.0, cfg, rule)
        return omega(n) * h_n_reciprocal(n, alpha) * bracket
    return np.array([riesz(RieszRequest(field, alpha, p, cfg, rule)) for p in pts])


def potential_field(
    field: ScalarField,
    beta,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
    chunk: int = 4096,
) -> ScalarField:
    """The fractional integral of ``field`` as a derived field with honest metadata.

    Requires 0 < Re beta < min(a, n) (the strip of the decay mapping
    property).  Decay drops by Re beta from min(a, n); smoothness rises by
    the integer part of Re beta, keeping the source's Hoelder index (its
    supremum form, for continuity-only sources every index below 1).
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    beta = complex(beta)
    n = field.dim
    a = field.decay_exponent if field.support is None else math.inf
    if not 0.0 < beta.real < min(a, n):
        raise StripViolationError(
            f"potential order must satisfy 0 < Re beta < min(a, n) = {min(a, n):g}, got {beta}"
        )
    b = min(a, n)
    if a == n:
        b -= 1e-9
    gain = math.floor(beta.real)
    sm = field.smoothness
    if sm.hoelder_index is not None:
        out_sm = Smoothness(sm.continuity_order + gain, sm.hoelder_index, sm.exceptional_set)
    else:
        out_sm = Smoothness(max(sm.continuity_order + gain - 1, 0), 1.0, sm.exceptional_set)

    def ev(pts):
        flat = np.asarray(pts, dtype=float).reshape(-1, n)
        out = np.empty(flat.shape[0])
        for i0 in range(0, flat.shape[0], chunk):
            out[i0 : i0 + chunk] = riesz_many(field, beta, flat[i0 : i0 + chunk], cfg, rule).real
        return out.reshape(np.asarray(pts).shape[:-1])

    return ScalarField(
        name=f"I^{beta.real:g}[{field.name}]",
        dim=n,
        evaluate=ev,
        decay_exponent=b - beta.real,
        smoothness=out_sm,
        radial=field.radial,
    )


def riesz_right_limit(
    field: ScalarField,
    x,
    s_sequence: Sequence[float],
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
) -> LimitResult:
    """Limit of the potential as the order decreases to 0 from the right.

    The route for fields carrying no Hoelder metadata, where the exact
    order-zero branch has no Taylor data to stand on; the limit recovers
    the field value for any continuous decaying field.
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    s = np.asarray(list(s_sequence), dtype=float)
    if s.size < 2 or np.any(np.diff(s) >= 0) or np.any(s <= 0.0):
        raise ValueError("s_sequence must strictly decrease within (0, inf)")
    x = np.asarray(x, dtype=float)
    values = np.array([riesz(RieszRequest(field, si, x, cfg, rule)) for si in s])
    estimate, converged = aitken_extrapolate(values)
    return LimitResult(estimate=estimate, orders=s, values=values, converged=converged)


def semigroup_defect(
    field: ScalarField,
    alpha,
    beta,
    x,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
    inner_rule: Optional[SphereRule] = None,
) -> float:
    """| I^alpha(I^beta f)(x) - I^{alpha+beta} f(x) | on the composition strip.

    The inner potential is evaluated on demand as a derived field carrying
    the propagated decay metadata; ``inner_rule`` optionally lowers the
    sphere-rule order used when profiling the (smooth) inner potential.
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    alpha, beta = complex(alpha), complex(beta)
    a = field.decay_exponent if field.support is None else math.inf
    n = field.dim
    if not (alpha.real > 0.0 and beta.real > 0.0 and (alpha + beta).real < min(a, n)):
        raise StripViolationError(
            "semigroup strip requires Re alpha > 0, Re beta > 0 and "
            f"Re(alpha+beta) < min(a, n) = {min(a, n):g}"
        )
    inner = potential_field(field, beta, cfg, rule)
    outer_rule = inner_rule or rule
    lhs = riesz(RieszRequest(inner, alpha, np.asarray(x, dtype=float), cfg, outer_rule))
    rhs = riesz(RieszRequest(field, alpha + beta, np.asarray(x, dtype=float), cfg, rule))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# The convolution-of-kernels identity behind the semigroup law


def _smooth_bump(r: np.ndarray, lo: float = 0.3, hi: float = 0.45) -> np.ndarray:
    """C^2 radial bump: 1 below lo, 0 above hi, quintic in between."""
    s = np.clip((np.asarray(r, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s))


def beta_identity_check(
    n: int, alpha: float, beta: float, resolution: int = 96
) -> tuple[float, float]:
    """Numerically integrate int |e-v|^{beta-n} |v|^{alpha-n} dv against its closed form.

    Returns ``(numeric, closed_form)`` where the closed form is
    h_n(alpha) h_n(beta) / h_n(alpha+beta).  The integral is split with a
    smooth partition of unity around the two singularities; the remainder is
    integrated over geometrically growing panels out to a radius set by the
    tail exponent alpha + beta - n - 1.
    """
    if n not in (1, 2):
        raise ValueError("the numeric check is implemented for n in {1, 2}")
    if not (alpha > 0 and beta > 0 and alpha + beta < n):
        raise StripViolationError("need alpha > 0, beta > 0, alpha + beta < n")
    closed = complex(h_n(n, alpha) * h_n(n, beta) / h_n(n, alpha + beta)).real

    lo, hi = 0.3, 0.45
    tol = 1e-7
    s = alpha + beta
    x, log_x, log_w = tanh_sinh_nodes(6)

    def ts_power_integral(power: float, scale: float, fn) -> float:
        # int_0^scale r^power fn(r) dr with power > -1
        log_c = log_w + power * log_x
        keep = log_c > log_c.max() - 40.0
        r = scale * x[keep]
        w = np.exp(log_w[keep] + power * log_x[keep]) * scale ** (power + 1.0)
        return float(np.dot(w, fn(r)))

    if n == 1:
        piece0 = ts_power_integral(
            alpha - 1.0, hi, lambda r: _smooth_bump(r, lo, hi) * ((1.0 - r) ** (beta - 1.0) + (1.0 + r) ** (beta - 1.0))
        )
        piece1 = ts_power_integral(
            beta - 1.0, hi, lambda r: _smooth_bump(r, lo, hi) * ((1.0 - r) ** (alpha - 1.0) + (1.0 + r) ** (alpha - 1.0))
        )
        radius = max(4.0, (2.0 / (tol * (1.0 - s))) ** (1.0 / (1.0 - s)))

        def rest_integrand(v):
            g = (1.0 - _smooth_bump(np.abs(v), lo, hi)) * (1.0 - _smooth_bump(np.abs(v - 1.0), lo, hi))
            return g * np.abs(v) ** (alpha - 1.0) * np.abs(1.0 - v) ** (beta - 1.0)

        inner_edges = np.linspace(-2.0, 2.0, 41)
        left = -geometric_edges(2.0, radius)[::-1]
        right = geometric_edges(2.0, radius)
        edges = np.unique(np.concatenate([left, inner_edges, right]))
        t, w = gauss_legendre_panels(edges, 24)
        rest = float(np.dot(w, rest_integrand(t)))
        return piece0 + piece1 + rest, closed

    # n == 2: polar pieces around each singularity plus a smooth remainder
    theta, wt = gauss_legendre_panels(np.linspace(0.0, 2.0 * np.pi, 9), max(12, resolution // 8))
    ct, st = np.cos(theta), np.sin(theta)

    def angular0(r):
        # int |e - r w|^{beta-2} dtheta, smooth for r <= hi
        d2 = 1.0 - 2.0 * np.multiply.outer(r, ct) + np.multiply.outer(r * r, np.ones_like(ct))
        return d2 ** ((beta - 2.0) / 2.0) @ wt

    def angular1(r):
        # int |e + r w|^{alpha-2} dtheta
        d2 = 1.0 + 2.0 * np.multiply.outer(r, ct) + np.multiply.outer(r * r, np.ones_like(ct))
        return d2 ** ((alpha - 2.0) / 2.0) @ wt

    piece0 = ts_power_integral(alpha - 1.0, hi, lambda r: _smooth_bump(r, lo, hi) * angular0(r))
    piece1 = ts_power_integral(beta - 1.0, hi, lambda r: _smooth_bump(r, lo, hi) * angular1(r))

    radius = max(8.0, (2.0 * np.pi / (tol * (2.0 - s))) ** (1.0 / (2.0 - s)))
    r_edges = np.unique(
        np.concatenate(
            [
                np.linspace(lo, 2.0, 18),
                geometric_edges(2.0, radius),
            ]
        )
    )
    r_nodes, r_w = gauss_legendre_panels(r_edges, 24)

    def rest_radial(r):
        v1 = np.multiply.outer(r, ct)
        v2 = np.multiply.outer(r, st)
        d = np.hypot(v1 - 1.0, v2)
        g = (1.0 - _smooth_bump(r, lo, hi))[:, None] * (1.0 - _smooth_bump(d, lo, hi))
        vals = g * d ** (beta - 2.0)
        return (vals @ wt) * r ** (alpha - 1.0)

    rest = float(np.dot(r_w, rest_radial(r_nodes)))
    return piece0 + piece1 + rest, closed
