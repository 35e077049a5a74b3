"""Catalog of analytic test functions on R^n with class metadata.

Fields are immutable evaluators, not grids: every operator downstream is
pointwise, so discretization is deferred to the one consumer that needs it.
Each field carries the metadata the continuation machinery consumes --
decay exponent, smoothness record (continuity order, Hoelder index,
exceptional set), compact support if any, and, where closed forms exist,
exact spherical means and radial Taylor data.

Evaluators are vectorized: ``field(points)`` accepts an array of shape
(..., n) and returns shape (...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _sgamma, hyp0f1, ive, poch

from .errors import DegenerateSampleError

__all__ = [
    "Smoothness",
    "ScalarField",
    "CatalogEntry",
    "gaussian",
    "gaussian_laplacian",
    "hoelder_cap",
    "log_modulus",
    "power_decay",
    "translate",
    "scale",
    "estimate_decay_exponent",
    "estimate_hoelder_index",
    "get_field",
    "catalog_entries",
]


@dataclass(frozen=True)
class Smoothness:
    """Regularity record: continuity order l, Hoelder index of the l-th
    derivatives (None = continuity only), and a description of where the
    stated regularity degenerates."""

    continuity_order: float
    hoelder_index: Optional[float]
    exceptional_set: str = ""


@dataclass(frozen=True, eq=False)
class ScalarField:
    """An evaluable function on R^n with decay and smoothness metadata.

    ``exact_spherical_mean(center, radii)`` may return None when no closed
    form exists at that center; consumers then fall back to quadrature.
    ``radial_taylor_at(center, order)`` returns coefficients c_0..c_order of
    the spherical-mean profile at the center, or None when unavailable.
    """

    name: str
    dim: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    decay_exponent: float
    smoothness: Smoothness
    radial: bool = False
    support: Optional[tuple[np.ndarray, float]] = None
    exact_spherical_mean: Optional[Callable[[np.ndarray, np.ndarray], Optional[np.ndarray]]] = None
    radial_taylor_at: Optional[Callable[[np.ndarray, int], Optional[np.ndarray]]] = None
    exact_laplacian: Optional["ScalarField"] = None
    decay_anchor: Optional[np.ndarray] = None  # where the mass sits; None = origin

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"expected points in R^{self.dim}, got shape {pts.shape}")
        return self.evaluate(pts)

    def __repr__(self):
        return f"ScalarField({self.name!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    field: ScalarField
    closed_form_notes: str = ""


def _sqnorm(pts: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", pts, pts)


# ---------------------------------------------------------------------------
# Gaussian and its Laplacian (the closed-form oracle family)


def _pairwise(c: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(c*r, c-r, c^2+r^2) either pairing rows of r to entries of c, or as
    full outer products when shapes do not align row-wise."""
    c = np.asarray(c, dtype=float)
    r = np.asarray(r, dtype=float)
    if r.ndim == c.ndim + 1 and r.shape[: c.ndim] == c.shape:
        cc = c[..., None]
        return cc * r, cc - r, cc * cc + r * r
    return np.multiply.outer(c, r), np.subtract.outer(c, r), np.add.outer(c * c, r * r)


def _scaled_hyp0f1(b: float, c: np.ndarray, r: np.ndarray) -> np.ndarray:
    """exp(-c^2-r^2) 0F1(b; (c r)^2) over paired or outer-combined (c, r).

    Large arguments go through the exponentially scaled Bessel function,
    Gamma(b) (cr)^{1-b} ive(b-1, 2cr) exp(-(c-r)^2), which stays finite
    where the naive product overflows into 0 * inf.
    """
    z, diff, sq = _pairwise(c, r)
    small = z < 1e-6
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        main = float(_sgamma(b)) * z ** (1.0 - b) * ive(b - 1.0, 2.0 * z) * np.exp(-diff * diff)
    series = np.exp(-sq) * hyp0f1(b, np.where(small, z * z, 0.0))
    return np.where(small, series, main)


def _gaussian_mean(n: int, center: np.ndarray, r: np.ndarray) -> np.ndarray:
    # mean of exp(-|y|^2) over the sphere of radius r around center:
    # exp(-|c|^2 - r^2) 0F1(n/2; r^2 |c|^2); broadcasts over batched centers
    center = np.asarray(center, dtype=float)
    c = np.sqrt(np.einsum("...i,...i->...", center, center))
    return _scaled_hyp0f1(n / 2.0, c, np.asarray(r, dtype=float))


def _gaussian_taylor(n: int, center: np.ndarray, order: int) -> np.ndarray:
    c2 = float(np.dot(center, center))
    coeffs = np.zeros(order + 1)
    for q in range(order // 2 + 1):
        m = np.arange(q + 1)
        terms = (
            (-1.0) ** (q - m)
            * c2**m
            / (poch(n / 2.0, m) * np.array([math.factorial(int(i)) for i in m]))
            / np.array([math.factorial(int(q - i)) for i in m])
        )
        coeffs[2 * q] = math.exp(-c2) * terms.sum()
    return coeffs


def gaussian_laplacian(n: int) -> ScalarField:
    """Laplacian of exp(-|x|^2): (4|x|^2 - 2n) exp(-|x|^2), with exact means."""

    def ev(pts):
        s = _sqnorm(pts)
        return (4.0 * s - 2.0 * n) * np.exp(-s)

    def mean(center, r):
        center = np.asarray(center, dtype=float)
        c = np.sqrt(np.einsum("...i,...i->...", center, center))
        r = np.asarray(r, dtype=float)
        z, _, csum = _pairwise(c, r)
        psi = _scaled_hyp0f1(n / 2.0, c, r)
        # d/db 0F1(n/2; b^2/4) = (b/n) 0F1(n/2+1; b^2/4) with b = 2 r |c|
        b_psip = (4.0 * z * z / n) * _scaled_hyp0f1(n / 2.0 + 1.0, c, r)
        return (4.0 * csum - 2.0 * n) * psi - 4.0 * b_psip

    return ScalarField(
        name=f"gaussian_laplacian(n={n})",
        dim=n,
        evaluate=ev,
        decay_exponent=math.inf,
        smoothness=Smoothness(math.inf, 1.0),
        radial=True,
        exact_spherical_mean=mean,
    )


def gaussian(n: int) -> ScalarField:
    """x -> exp(-|x|^2); smooth, super-polynomial decay, fully closed-form."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def ev(pts):
        return np.exp(-_sqnorm(pts))

    return ScalarField(
        name="gaussian",
        dim=n,
        evaluate=ev,
        decay_exponent=math.inf,
        smoothness=Smoothness(math.inf, 1.0),
        radial=True,
        exact_spherical_mean=lambda c, r: _gaussian_mean(n, c, r),
        radial_taylor_at=lambda c, order: _gaussian_taylor(n, c, order),
        exact_laplacian=gaussian_laplacian(n),
    )


# ---------------------------------------------------------------------------
# Compactly supported Hoelder cap


def hoelder_cap(n: int, eps: float) -> ScalarField:
    """x -> max(0, 1-|x|^2)^eps; smooth off the unit sphere, Hoelder-eps on it."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")

    def ev(pts):
        return np.maximum(0.0, 1.0 - _sqnorm(pts)) ** eps

    def taylor(center, order):
        if float(np.dot(center, center)) > 0.0:
            return None
        # (1-t^2)^eps = sum_q binom(eps, q) (-1)^q t^{2q}
        coeffs = np.zeros(order + 1)
        for q in range(order // 2 + 1):
            b = 1.0
            for i in range(q):
                b *= (eps - i) / (i + 1)
            coeffs[2 * q] = (-1.0) ** q * b
        return coeffs

    return ScalarField(
        name=f"cap:{eps:g}",
        dim=n,
        evaluate=ev,
        decay_exponent=math.inf,
        smoothness=Smoothness(0, eps, "Hoelder index eps across the support sphere |x| = 1"),
        radial=True,
        support=(np.zeros(n), 1.0),
        radial_taylor_at=taylor,
    )


# ---------------------------------------------------------------------------
# Continuous but nowhere-Hoelder-at-0 witness

# quintic smoothstep cutoff: 1 on [0, 1/2], 0 on [1, inf), C^2
_CUT_LO, _CUT_HI = 0.5, 1.0


def _cutoff(r: np.ndarray) -> np.ndarray:
    s = np.clip((np.asarray(r, dtype=float) - _CUT_LO) / (_CUT_HI - _CUT_LO), 0.0, 1.0)
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s))


def log_modulus(n: int) -> ScalarField:
    """x -> b(|x|) / log(e + 1/|x|) with a smoothstep cutoff b.

    Continuous everywhere and compactly supported, but Hoelder at no index
    at the origin: the local oscillation decays only like 1/log(1/s).
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def ev(pts):
        r = np.sqrt(_sqnorm(pts))
        out = np.zeros_like(r)
        pos = r > 0.0
        out[pos] = _cutoff(r[pos]) / np.log(math.e + 1.0 / r[pos])
        return out

    def taylor(center, order):
        if float(np.dot(center, center)) > 0.0 or order > 0:
            return None  # derivatives at 0 do not exist
        return np.zeros(1)

    return ScalarField(
        name="logmod",
        dim=n,
        evaluate=ev,
        decay_exponent=math.inf,
        smoothness=Smoothness(0, None, "continuous; Hoelder at no index at the origin"),
        radial=True,
        support=(np.zeros(n), _CUT_HI),
        radial_taylor_at=taylor,
    )


# ---------------------------------------------------------------------------
# Finite polynomial decay (class-boundary experiments)


def power_decay(n: int, p: float) -> ScalarField:
    """x -> (1+|x|^2)^{-p/2}; smooth with decay exponent exactly p."""
    if p <= 0:
        raise ValueError("p must be positive")

    def ev(pts):
        return (1.0 + _sqnorm(pts)) ** (-p / 2.0)

    def taylor(center, order):
        if float(np.dot(center, center)) > 0.0:
            return None
        coeffs = np.zeros(order + 1)
        for q in range(order // 2 + 1):
            b = 1.0
            for i in range(q):
                b *= (-p / 2.0 - i) / (i + 1)
            coeffs[2 * q] = b
        return coeffs

    return ScalarField(
        name=f"power:{p:g}",
        dim=n,
        evaluate=ev,
        decay_exponent=p,
        smoothness=Smoothness(math.inf, 1.0),
        radial=True,
        radial_taylor_at=taylor,
    )


# ---------------------------------------------------------------------------
# Combinators


def translate(f: ScalarField, v) -> ScalarField:
    """Field x -> f(x - v); all metadata carried along, support shifted."""
    v = np.asarray(v, dtype=float)
    if v.shape != (f.dim,):
        raise ValueError(f"shift vector must have shape ({f.dim},)")

    base_ev = f.evaluate
    mean = None
    if f.exact_spherical_mean is not None:
        base_mean = f.exact_spherical_mean
        mean = lambda c, r: base_mean(np.asarray(c, float) - v, r)
    taylor = None
    if f.radial_taylor_at is not None:
        base_taylor = f.radial_taylor_at
        taylor = lambda c, order: base_taylor(np.asarray(c, float) - v, order)
    anchor = (np.zeros(f.dim) if f.decay_anchor is None else f.decay_anchor) + v
    return replace(
        f,
        name=f"{f.name}+shift",
        evaluate=lambda pts: base_ev(np.asarray(pts, float) - v),
        radial=f.radial and not np.any(v),
        support=None if f.support is None else (f.support[0] + v, f.support[1]),
        exact_spherical_mean=mean,
        radial_taylor_at=taylor,
        exact_laplacian=None if f.exact_laplacian is None else translate(f.exact_laplacian, v),
        decay_anchor=anchor,
    )


def scale(f: ScalarField, c: float) -> ScalarField:
    """Field x -> c * f(x); decay and smoothness metadata unchanged."""
    c = float(c)
    base_ev = f.evaluate
    mean = None
    if f.exact_spherical_mean is not None:
        base_mean = f.exact_spherical_mean

        def mean(ctr, r, _bm=base_mean):
            m = _bm(ctr, r)
            return None if m is None else c * m

    taylor = None
    if f.radial_taylor_at is not None:
        base_taylor = f.radial_taylor_at

        def taylor(ctr, order, _bt=base_taylor):
            t = _bt(ctr, order)
            return None if t is None else c * t

    return replace(
        f,
        name=f"{c:g}*{f.name}",
        evaluate=lambda pts: c * base_ev(np.asarray(pts, float)),
        exact_spherical_mean=mean,
        radial_taylor_at=taylor,
        exact_laplacian=None if f.exact_laplacian is None else scale(f.exact_laplacian, c),
    )


# ---------------------------------------------------------------------------
# Class-membership diagnostics


def estimate_decay_exponent(f: ScalarField, direction, radii) -> float:
    """Least-squares slope of log|f(r d)| against log r, negated.

    Super-polynomial decay shows up as an estimate that grows with the
    radii; finite decay a produces an estimate near a.
    """
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    radii = np.asarray(radii, dtype=float)
    if radii.size < 4 or np.any(np.diff(radii) <= 0) or radii[0] <= 1.0:
        raise ValueError("need at least 4 increasing radii, all > 1")
    vals = np.abs(f(radii[:, None] * d[None, :]))
    if np.any(vals < 1e-280):
        raise DegenerateSampleError("field vanishes (to double precision) at sampled radii")
    slope = np.polyfit(np.log(radii), np.log(vals), 1)[0]
    return -float(slope)


def estimate_hoelder_index(
    f: ScalarField, x, probe_scales, n_directions: int = 32, seed: int = 0
) -> float:
    """Slope of log local oscillation against log scale, clamped to (0, 1].

    The oscillation sup_{|h|<=s} |f(x+h) - f(x)| is probed with
    ``n_directions`` random unit directions per scale.  Locally
    Lipschitz-or-better behavior returns 1.
    """
    x = np.asarray(x, dtype=float)
    scales = np.asarray(probe_scales, dtype=float)
    if scales.size < 4 or np.any(np.diff(scales) >= 0) or np.any((scales <= 0) | (scales >= 1)):
        raise ValueError("need at least 4 decreasing scales in (0, 1)")
    rng = np.random.default_rng(seed)
    fx = float(f(x))
    osc = np.empty(scales.size)
    for i, s in enumerate(scales):
        u = rng.standard_normal((n_directions, x.size))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        osc[i] = np.max(np.abs(f(x + s * u) - fx))
    if np.any(osc == 0.0):
        return 1.0
    slope = float(np.polyfit(np.log(scales), np.log(osc), 1)[0])
    return min(max(slope, 1e-12), 1.0)


# ---------------------------------------------------------------------------
# Catalog


def catalog_entries(n: int) -> list[CatalogEntry]:
    return [
        CatalogEntry(
            "gaussian",
            gaussian(n),
            "spherical mean exp(-|c|^2-r^2) 0F1(n/2; r^2|c|^2); "
            "plane integral pi^{k/2} exp(-d^2); fractional integral of order a at 0 "
            "equals Gamma((n-a)/2) / (2^a Gamma(n/2))",
        ),
        CatalogEntry(
            "cap:0.75",
            hoelder_cap(n, 0.75),
            "compact support; spherical mean at the center is (1-r^2)^eps",
        ),
        CatalogEntry(
            "logmod",
            log_modulus(n),
            "continuous, value 0 at the origin, oscillation 1/log(1/s); "
            "separates the limit inversion route from the Hoelder route",
        ),
        CatalogEntry(
            "power:3",
            power_decay(n, 3.0),
            "decay exponent exactly p; class-boundary experiments",
        ),
    ]


def get_field(spec: str, n: int) -> ScalarField:
    """Resolve a catalog name like 'gaussian', 'cap:0.75', 'logmod', 'power:2.5'."""
    spec = spec.strip()
    head, _, arg = spec.partition(":")
    head = head.lower()
    if head == "gaussian":
        return gaussian(n)
    if head in ("cap", "hoelder_cap"):
        return hoelder_cap(n, float(arg) if arg else 0.75)
    if head in ("logmod", "log_modulus"):
        return log_modulus(n)
    if head in ("power", "power_decay"):
        return power_decay(n, float(arg) if arg else 3.0)
    raise KeyError(f"unknown catalog field {spec!r}")
