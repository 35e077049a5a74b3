"""k-plane transforms: forward plane integrals, the dual transform
(backprojection), and the proportionality linking them to fractional
integrals.

The production route for the dual transform is its radial representation,

    dual(x) = omega(k) * int_0^inf M_x(r) r^{k-1} dr,

which reuses the split-bracket engine exactly; averaging the forward
transform over random k-planes through a point exists only as a stochastic
cross-check, since no measure discretization of the frame manifold is
canonical.  The inversion pipeline consumes plane-integral oracles, so
externally supplied plane data is admissible in principle; at desk scale
oracles are synthesized from fields by ``forward``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _gamma

from .alphaline import ContinuationConfig, split_bracket
from .errors import DivergenceError
from .fields import ScalarField, Smoothness
from .quadrature import gauss_legendre_panels
from .riesz import RieszRequest, _batch_bracket, riesz
from .specfun import Dimension, omega
from .spherical import SphereRule, profile_of, sphere_rule

__all__ = [
    "KPlane",
    "PlaneIntegralOracle",
    "forward",
    "forward_oracle",
    "random_frames",
    "dual_composite",
    "backprojection_field",
    "dual_sampled",
    "dual_riesz_defect",
    "sinogram_table",
]

_ORTHO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KPlane:
    """An affine k-plane: an orthonormal k-frame plus an orthogonal offset."""

    frame: np.ndarray  # (k, n) rows orthonormal
    offset: np.ndarray  # (n,) orthogonal to every frame row

    def __post_init__(self):
        frame = np.atleast_2d(np.asarray(self.frame, dtype=float))
        offset = np.asarray(self.offset, dtype=float)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "offset", offset)
        k, n = frame.shape
        if not 1 <= k <= n - 1:
            raise ValueError(f"frame must be a k x n matrix with 1 <= k <= n-1, got {frame.shape}")
        gram = frame @ frame.T
        if not np.allclose(gram, np.eye(k), atol=_ORTHO_TOL):
            raise ValueError("frame rows must be orthonormal to 1e-12")
        if np.any(np.abs(frame @ offset) > _ORTHO_TOL * max(1.0, float(np.linalg.norm(offset)))):
            raise ValueError("offset must be orthogonal to the frame")

    @property
    def k(self) -> int:
        return self.frame.shape[0]

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    @staticmethod
    def through(frame, point) -> "KPlane":
        """The plane spanned by ``frame`` passing through ``point``."""
        frame = np.atleast_2d(np.asarray(frame, dtype=float))
        point = np.asarray(point, dtype=float)
        offset = point - frame.T @ (frame @ point)
        return KPlane(frame=frame, offset=offset)


@dataclass(frozen=True, eq=False)
class PlaneIntegralOracle:
    """Plane-integral data: a map from k-planes to their integrals."""

    evaluate: Callable[[KPlane], float]
    provenance: str  # "synthesized-from-field" | "external"

    def __call__(self, plane: KPlane) -> float:
        return float(self.evaluate(plane))


def _plane_truncation(field: ScalarField, plane: KPlane, tol: float) -> tuple[float, np.ndarray]:
    """Radius of the in-plane integration ball and its center in plane coordinates.

    Returns radius 0 when a compact support misses the plane entirely.
    """
    k = plane.k
    if field.support is not None:
        sc, sr = field.support
        rel = sc - plane.offset
        t0 = plane.frame @ rel
        dist2 = float(rel @ rel - t0 @ t0)
        if dist2 >= sr * sr:
            return 0.0, t0
        return math.sqrt(sr * sr - dist2), t0
    a = field.decay_exponent
    t0 = np.zeros(k)
    dirs = np.concatenate([plane.frame, -plane.frame], axis=0)  # (2k, n)
    if math.isinf(a):
        r = 4.0
        while True:
            probe = plane.offset[None, :] + r * dirs
            if float(np.max(np.abs(field(probe)))) * max(r, 1.0) ** k < 0.1 * tol:
                return r, t0
            r *= 2.0
            if r > 1e9:
                raise DivergenceError("field declared super-polynomial decay but has not decayed")
    if a <= k:
        raise DivergenceError(f"plane integral needs decay exponent > k = {k}, field declares {a:g}")
    rs = np.geomspace(2.0, 64.0, 10)
    pts = plane.offset[None, None, :] + rs[:, None, None] * dirs[None, :, :]
    c = max(float(np.max(np.abs(field(pts)) * rs[:, None] ** a)), 1e-300)
    r = (c * omega(k) / (tol * (a - k))) ** (1.0 / (a - k))
    return max(r, 4.0), t0


def forward(field: ScalarField, plane: KPlane, resolution: int = 16, tol: float = 1e-10) -> float:
    """Integral of the field over the affine k-plane (tensor-product quadrature).

    Truncation is driven by the field's decay metadata; a plane missing a
    compact support returns exactly 0.  Raises ``DivergenceError`` when the
    declared decay does not exceed the plane dimension.
    """
    if plane.n != field.dim:
        raise ValueError("plane and field dimensions differ")
    radius, t0 = _plane_truncation(field, plane, tol)
    if radius == 0.0:
        return 0.0
    k = plane.k
    panels = max(4, int(math.ceil(2.0 * radius)))
    axes = []
    for i in range(k):
        edges = np.linspace(t0[i] - radius, t0[i] + radius, panels + 1)
        axes.append(gauss_legendre_panels(edges, resolution))
    if k == 1:
        t, w = axes[0]
        pts = plane.offset[None, :] + t[:, None] * plane.frame[0][None, :]
        return float(np.dot(w, field(pts)))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    weights = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    t_flat = np.stack([g.ravel() for g in grids], axis=1)  # (m, k)
    w_flat = np.prod(np.stack([w.ravel() for w in weights], axis=1), axis=1)
    pts = plane.offset[None, :] + t_flat @ plane.frame
    return float(np.dot(w_flat, field(pts)))


def forward_oracle(field: ScalarField, resolution: int = 16) -> PlaneIntegralOracle:
    """Plane-integral oracle synthesized from a field by quadrature."""
    return PlaneIntegralOracle(
        evaluate=lambda plane: forward(field, plane, resolution=resolution),
        provenance="synthesized-from-field",
    )


def random_frames(dim: Dimension, count: int, seed: int = 0) -> np.ndarray:
    """Uniformly random orthonormal k-frames in R^n, seeded for reproducibility."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, dim.n, dim.k))
    frames = np.empty((count, dim.k, dim.n))
    for i in range(count):
        q, _ = np.linalg.qr(g[i])
        frames[i] = q.T
    return frames


def dual_composite(
    field: ScalarField,
    x,
    dim: Dimension,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
) -> float:
    """The dual transform of the field's plane transform, by its radial form.

    Computed as omega(k) * int_0^inf M_x(r) r^{k-1} dr through the split
    bracket (the gamma prefactors of the power functional cancel against
    the plane measure constants).
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    _require_dual_class(field, dim)
    profile = profile_of(field, np.asarray(x, dtype=float), rule, taylor_order=0)
    bracket = split_bracket(profile, float(dim.k - 1), cfg).bracket
    return float(omega(dim.k) * bracket.real)


def _require_dual_class(field: ScalarField, dim: Dimension) -> None:
    if field.dim != dim.n:
        raise ValueError("field dimension does not match the requested geometry")
    a_eff = math.inf if field.support is not None else field.decay_exponent
    if a_eff <= dim.k:
        raise DivergenceError(
            f"the dual transform needs decay exponent > k = {dim.k}, field declares {a_eff:g}"
        )


def backprojection_field(
    field: ScalarField,
    dim: Dimension,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
    chunk: int = 4096,
) -> ScalarField:
    """The dual transform as a derived field with propagated metadata.

    The dual of the plane transform is a positive multiple of the
    fractional integral of order k, so decay drops by k from min(a, n) and
    smoothness rises by k (by k-1, at every Hoelder index below 1, for
    continuity-only sources).
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    _require_dual_class(field, dim)
    n, k = dim.n, dim.k
    a = math.inf if field.support is not None else field.decay_exponent
    b = min(a, n) - (1e-9 if a == n else 0.0)
    sm = field.smoothness
    if sm.hoelder_index is not None:
        out_sm = Smoothness(sm.continuity_order + k, sm.hoelder_index, sm.exceptional_set)
    else:
        out_sm = Smoothness(max(sm.continuity_order + k - 1, 0), 1.0, sm.exceptional_set)

    fast = field.support is None

    def ev(pts):
        arr = np.asarray(pts, dtype=float)
        flat = arr.reshape(-1, n)
        out = np.empty(flat.shape[0])
        if fast:
            for i0 in range(0, flat.shape[0], chunk):
                out[i0 : i0 + chunk] = (
                    omega(k) * _batch_bracket(field, flat[i0 : i0 + chunk], float(k - 1), cfg, rule).real
                )
        else:
            for i, p in enumerate(flat):
                out[i] = dual_composite(field, p, dim, cfg, rule)
        return out.reshape(arr.shape[:-1])

    return ScalarField(
        name=f"dual[{field.name};k={k}]",
        dim=n,
        evaluate=ev,
        decay_exponent=b - k,
        smoothness=out_sm,
        radial=field.radial,
    )


def dual_sampled(oracle: PlaneIntegralOracle, x, dim: Dimension, frames: np.ndarray) -> float:
    """Average of the oracle over k-planes through x with the given frames."""
    frames = np.asarray(frames, dtype=float)
    if frames.ndim != 3 or frames.shape[1:] != (dim.k, dim.n):
        raise ValueError(f"frames must have shape (count, {dim.k}, {dim.n})")
    if frames.shape[0] == 0:
        raise ValueError("need at least one frame")
    x = np.asarray(x, dtype=float)
    vals = [oracle(KPlane.through(f, x)) for f in frames]
    return float(np.mean(vals))


def dual_riesz_defect(
    field: ScalarField,
    x,
    dim: Dimension,
    cfg: Optional[ContinuationConfig] = None,
    rule: Optional[SphereRule] = None,
) -> float:
    """Defect of the proportionality between the dual transform and the
    fractional integral of order k:

        dual(x) = (4 pi)^{k/2} (Gamma(n/2) / Gamma((n-k)/2)) I^k f (x).

    Both sides are computed independently; the absolute difference returns.
    """
    cfg = cfg or ContinuationConfig()
    rule = rule or sphere_rule(field.dim)
    n, k = dim.n, dim.k
    lhs = dual_composite(field, x, dim, cfg, rule)
    const = (4.0 * math.pi) ** (k / 2.0) * float(_gamma(n / 2.0) / _gamma((n - k) / 2.0))
    rhs = const * riesz(RieszRequest(field, float(k), np.asarray(x, dtype=float), cfg, rule)).real
    return abs(lhs - rhs)


def sinogram_table(
    field: ScalarField,
    dim: Dimension,
    n_angles: int,
    n_offsets: int,
    offset_max: float = 3.0,
    resolution: int = 16,
) -> np.ndarray:
    """Forward line-transform values on an angle/offset grid (n = 2, k = 1).

    Returns rows (theta, offset_x, offset_y, value); angles sweep [0, pi)
    and signed offsets sweep [-offset_max, offset_max] along the line normal.
    """
    if (dim.n, dim.k) != (2, 1):
        raise ValueError("sinogram export is implemented for lines in the plane (n=2, k=1)")
    thetas = np.pi * np.arange(n_angles) / n_angles
    ds = np.linspace(-offset_max, offset_max, n_offsets)
    rows = np.empty((n_angles * n_offsets, 4))
    i = 0
    for th in thetas:
        direction = np.array([math.cos(th), math.sin(th)])
        normal = np.array([-math.sin(th), math.cos(th)])
        for d in ds:
            plane = KPlane(frame=direction[None, :], offset=d * normal)
            rows[i] = (th, d * normal[0], d * normal[1], forward(field, plane, resolution))
            i += 1
    return rows
