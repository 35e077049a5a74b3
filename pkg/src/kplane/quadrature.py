"""Quadrature primitives shared by the continuation and transform modules.

Three building blocks cover every 1-D integral in the toolkit:

- double-exponential (tanh-sinh) nodes on (0, 1), for integrands with an
  algebraic endpoint singularity x^beta (Re beta > -1) at 0; weights are
  exposed in log space so x^beta * w can be formed without overflow even
  for nodes at x ~ 1e-300;
- Gauss-Legendre panels over an arbitrary edge sequence, for smooth
  integrands;
- geometric edge sequences, for smooth integrands with power-law decay on
  [a, R] where R/a may span many orders of magnitude.

Gauss-Jacobi nodes with the weight x^beta on (0, rho) are also provided as
an alternative inner rule for profiles analytic at the origin and real
orders.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "tanh_sinh_nodes",
    "power_weights",
    "gauss_legendre_panels",
    "geometric_edges",
    "gauss_jacobi_unit",
]

# exp under/overflow guard for the double-exponential map
_DE_UMAX_LOG = 700.0


@lru_cache(maxsize=32)
def tanh_sinh_nodes(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh nodes on (0, 1), clustered at both endpoints.

    Returns ``(x, log_x, log_w)`` with step h = 2^-level.  The transform is
    x = 1/(1 + exp(-pi sinh u)); log_x and log_w stay finite down to the
    smallest representable nodes, so callers can form x^beta * w in log
    space.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    h = 2.0 ** (-level)
    # beyond this |u| the map saturates at double precision
    u_max = np.arcsinh(_DE_UMAX_LOG / np.pi)
    j = np.arange(-int(np.floor(u_max / h)), int(np.floor(u_max / h)) + 1)
    u = j * h
    s = np.pi * np.sinh(u)
    # sigma(u) = 1/(1+e^{-s}); log sigma via log1p for both tails
    log_sig = -np.log1p(np.exp(-np.clip(s, -_DE_UMAX_LOG, _DE_UMAX_LOG)))
    log_sig_m = -np.log1p(np.exp(-np.clip(-s, -_DE_UMAX_LOG, _DE_UMAX_LOG)))
    x = np.exp(log_sig)
    # sigma'(u) = pi cosh(u) sigma(u) sigma(-u)
    log_w = np.log(h) + np.log(np.pi * np.cosh(u)) + log_sig + log_sig_m
    keep = log_w > -745.0  # weights below double-precision floor carry nothing
    return x[keep], log_sig[keep], log_w[keep]


def power_weights(log_x: np.ndarray, log_w: np.ndarray, beta: complex) -> np.ndarray:
    """Complex weights x^beta * w from log-space nodes, overflow-safe."""
    return np.exp(log_w + complex(beta) * log_x)


@lru_cache(maxsize=256)
def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    return x, w


def gauss_legendre_panels(edges, nodes_per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over consecutive [e_i, e_{i+1}] panels."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("edges must be strictly increasing with at least two entries")
    x0, w0 = _gl_rule(nodes_per_panel)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    x = (0.5 * (b - a) * (x0[None, :] + 1.0) + a).ravel()
    w = (0.5 * (b - a) * w0[None, :]).ravel()
    return x, w


def geometric_edges(a: float, b: float, breakpoints=(), factor: float = 2.0) -> np.ndarray:
    """Edge sequence from a to b with geometrically growing spacing.

    Any breakpoints inside (a, b) are inserted exactly, so integrand kinks
    can be aligned with panel boundaries.
    """
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    edges = [a]
    e = a
    while e * factor < b:
        e *= factor
        edges.append(e)
    edges.append(b)
    pts = [p for p in breakpoints if a < p < b]
    out = np.unique(np.concatenate([np.asarray(edges), np.asarray(pts, dtype=float)]))
    # drop near-duplicate edges produced by breakpoints landing on the grid
    keep = np.concatenate([[True], np.diff(out) > 1e-12 * out[1:]])
    return out[keep]


@lru_cache(maxsize=64)
def gauss_jacobi_unit(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^1 x^beta g(x) dx with g smooth (beta > -1).

    Derived from the Jacobi rule with weight (1+t)^beta on [-1, 1]; the
    returned weights already include the x^beta factor.
    """
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    t, w = roots_jacobi(n, 0.0, beta)
    x = 0.5 * (t + 1.0)
    return x, w * 0.5 ** (beta + 1.0)
