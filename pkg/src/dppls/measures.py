"""Reference probability measures on the line, Gauss quadrature, and a grid
based inverse-CDF sampler for densities g with respect to the measure.

Everything downstream (Christoffel sampling, DPP conditionals) reduces to
drawing from some density g*mu on a bounded interval, so that machinery
lives here.
"""

import os
import math

import numpy as np
from dataclasses import dataclass
from functools import lru_cache
from scipy.interpolate import PchipInterpolator
from scipy.linalg import eigh_tridiagonal

from .errors import (EmptyDesignError, NegativeDensityError, NotADensityError,
                     UnsupportedOrderError, ValidationError)

DEFAULT_MAX_QUAD_ORDER = 512

# fixed 4-point Gauss-Legendre rule used per grid cell when integrating
# densities; exact on each cell for polynomials up to degree 7
_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


def max_quad_order():
    """Quadrature order cap, overridable via DPPLS_MAX_QUAD_ORDER."""
    raw = os.environ.get("DPPLS_MAX_QUAD_ORDER")
    if raw is None:
        return DEFAULT_MAX_QUAD_ORDER
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"DPPLS_MAX_QUAD_ORDER={raw!r} is not an integer") from exc
    if cap < 1:
        raise ValidationError("DPPLS_MAX_QUAD_ORDER must be >= 1")
    return cap


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for a probability measure: weights sum to 1 and the rule
    integrates polynomials up to degree 2*order - 1 exactly."""
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, values_or_fn):
        vals = values_or_fn(self.nodes) if callable(values_or_fn) else values_or_fn
        return float(self.weights @ np.asarray(vals, dtype=float))


class ReferenceMeasure:
    """A 1-D probability measure with density, i.i.d. sampling and Gauss
    quadrature. Concrete kinds: UniformInterval, StandardGaussian."""

    kind = "abstract"

    def density(self, x):
        raise NotImplementedError

    def sample(self, rng, n):
        raise NotImplementedError

    def gauss_quadrature(self, order):
        raise NotImplementedError

    def effective_support(self, m=1):
        """Interval [lo, hi] carrying all but a negligible part of every
        density handled for a basis of dimension m."""
        raise NotImplementedError


class UniformInterval(ReferenceMeasure):
    """Uniform probability measure on [a, b]."""

    kind = "uniform"

    def __init__(self, a=-1.0, b=1.0):
        a, b = float(a), float(b)
        if not a < b:
            raise ValidationError(f"need a < b, got a={a}, b={b}")
        self.a = a
        self.b = b

    def __repr__(self):
        return f"UniformInterval({self.a}, {self.b})"

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def sample(self, rng, n):
        if n < 1:
            raise EmptyDesignError("need n >= 1 draws")
        return rng.uniform(self.a, self.b, size=n)

    def gauss_quadrature(self, order):
        nodes, weights = _gauss_jacobi_uniform(order)
        mid = 0.5 * (self.a + self.b)
        half = 0.5 * (self.b - self.a)
        return QuadratureRule(mid + half * nodes, weights, order)

    def effective_support(self, m=1):
        return (self.a, self.b)


class StandardGaussian(ReferenceMeasure):
    """Standard normal measure on the real line."""

    kind = "gaussian"

    def __repr__(self):
        return "StandardGaussian()"

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    def sample(self, rng, n):
        if n < 1:
            raise EmptyDesignError("need n >= 1 draws")
        return rng.standard_normal(size=n)

    def gauss_quadrature(self, order):
        nodes, weights = _gauss_hermite_prob(order)
        return QuadratureRule(nodes, weights, order)

    def effective_support(self, m=1):
        # all Hermite-weighted densities of degree < m are below 1e-12 of
        # their peak outside this radius
        r = max(12.0, math.sqrt(4.0 * m + 2.0) + 4.0)
        return (-r, r)


def _check_order(order):
    if order < 1:
        raise UnsupportedOrderError(f"quadrature order must be >= 1, got {order}")
    cap = max_quad_order()
    if order > cap:
        raise UnsupportedOrderError(f"quadrature order {order} exceeds cap {cap}")
    return int(order)


def _golub_welsch(offdiag):
    """Nodes and probability weights from a symmetric Jacobi matrix with
    zero diagonal (all our measures are symmetric)."""
    q = offdiag.size + 1
    if q == 1:
        nodes, weights = np.zeros(1), np.ones(1)
    else:
        nodes, vecs = eigh_tridiagonal(np.zeros(q), offdiag)
        weights = vecs[0] ** 2
        weights = weights / weights.sum()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@lru_cache(maxsize=64)
def _jacobi_uniform_cached(order):
    k = np.arange(1, order, dtype=float)
    return _golub_welsch(k / np.sqrt(4.0 * k * k - 1.0))


@lru_cache(maxsize=64)
def _hermite_prob_cached(order):
    k = np.arange(1, order, dtype=float)
    return _golub_welsch(np.sqrt(k))


def _gauss_jacobi_uniform(order):
    return _jacobi_uniform_cached(_check_order(order))


def _gauss_hermite_prob(order):
    return _hermite_prob_cached(_check_order(order))


def density(measure, x):
    """Lebesgue density of the measure at x (0 outside support)."""
    return measure.density(x)


def sample_iid(measure, rng, n):
    """n i.i.d. draws from the measure using the given RNG stream."""
    return measure.sample(rng, n)


def gauss_quadrature(measure, order):
    """Gauss rule of the given order for the measure, weights summing to 1."""
    return measure.gauss_quadrature(order)


class GridDensitySampler:
    """Inverse-CDF sampler for a density g with respect to a reference
    measure, tabulated on a grid.

    The cumulative masses are known at the grid nodes; within each run of
    positive-mass cells the inverse CDF is interpolated by a monotone
    piecewise cubic (PCHIP). Cells of zero mass are never selected, which
    keeps supports with holes (e.g. DPP conditionals on occupied intervals)
    exact.
    """

    def __init__(self, nodes, cell_masses, tol):
        nodes = np.asarray(nodes, dtype=float)
        cell_masses = np.asarray(cell_masses, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
            raise ValidationError("grid nodes must be strictly increasing")
        if cell_masses.size != nodes.size - 1:
            raise ValidationError("need one mass per grid cell")
        if np.any(cell_masses < 0):
            raise NegativeDensityError("negative cell mass")

        total = float(cell_masses.sum())
        self.tolerance = float(tol)
        self.total_mass = total
        if not math.isfinite(total) or abs(total - 1.0) > tol:
            raise NotADensityError(total, tol)

        # drop numerically empty cells so flat CDF stretches cannot leak
        # samples into zero-density regions
        masses = cell_masses.copy()
        masses[masses < 1e-15 * total] = 0.0
        cum = np.concatenate(([0.0], np.cumsum(masses)))
        cum /= cum[-1]
        cum[-1] = 1.0

        self.nodes = nodes
        self.cum = cum

        positive = masses > 0
        # maximal runs of consecutive positive-mass cells
        starts = np.flatnonzero(positive & ~np.concatenate(([False], positive[:-1])))
        ends = np.flatnonzero(positive & ~np.concatenate((positive[1:], [False])))
        self._run_u_lo = cum[starts]
        self._run_u_hi = cum[ends + 1]
        self._inverses = [
            PchipInterpolator(cum[s:e + 2], nodes[s:e + 2], extrapolate=False)
            for s, e in zip(starts, ends)
        ]
        self._forward = None

    def sample(self, rng, n=None):
        """Draw n samples (or one scalar if n is None) through the inverse CDF."""
        scalar = n is None
        u = rng.random(1 if scalar else n)
        run = np.searchsorted(self._run_u_lo, u, side="right") - 1
        run = np.clip(run, 0, len(self._inverses) - 1)
        out = np.empty_like(u)
        for r in np.unique(run):
            sel = run == r
            ur = np.clip(u[sel], self._run_u_lo[r], self._run_u_hi[r])
            out[sel] = self._inverses[r](ur)
        lo, hi = self.nodes[0], self.nodes[-1]
        out = np.clip(out, lo, hi)
        return float(out[0]) if scalar else out

    def cdf(self, x):
        """Cumulative distribution of g*mu at x, by monotone interpolation
        of the tabulated node values."""
        if self._forward is None:
            self._forward = PchipInterpolator(self.nodes, self.cum, extrapolate=False)
        x = np.asarray(x, dtype=float)
        out = self._forward(x)
        out = np.where(x <= self.nodes[0], 0.0, out)
        out = np.where(x >= self.nodes[-1], 1.0, out)
        return out


def _cell_masses(g, measure, nodes):
    """Mass of g*mu over each grid cell by 4-point Gauss-Legendre."""
    lo, hi = nodes[:-1], nodes[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = np.asarray(g(x.ravel()), dtype=float) * measure.density(x.ravel())
    vals = vals.reshape(x.shape)
    neg_floor = -1e-12 * max(1.0, float(np.abs(vals).max(initial=0.0)))
    if np.any(vals < neg_floor):
        raise NegativeDensityError("density evaluated negatively on the grid")
    np.clip(vals, 0.0, None, out=vals)
    return (vals @ _GL_W) * half


def refined_grid(g, measure, *, support=None, initial_cells=2048,
                 max_cell_mass=1e-3, breakpoints=None, max_refinements=12):
    """Adaptive grid for tabulating the density g w.r.t. the measure.

    Starts from ``initial_cells`` uniform cells on the support (plus any
    known ``breakpoints`` of g), then bisects cells heavier than
    ``max_cell_mass`` so that no single cell dominates the inverse CDF.
    Returns (nodes, cell_masses).
    """
    lo, hi = support if support is not None else measure.effective_support()
    nodes = np.linspace(lo, hi, initial_cells + 1)
    if breakpoints is not None:
        pts = np.asarray(breakpoints, dtype=float)
        pts = pts[(pts > lo) & (pts < hi)]
        nodes = np.unique(np.concatenate((nodes, pts)))

    masses = _cell_masses(g, measure, nodes)
    for _ in range(max_refinements):
        heavy = masses > max_cell_mass
        if not heavy.any():
            break
        extra = 0.5 * (nodes[:-1][heavy] + nodes[1:][heavy])
        nodes = np.unique(np.concatenate((nodes, extra)))
        masses = _cell_masses(g, measure, nodes)
    return nodes, masses


def build_density_sampler(g, measure, tol=1e-8, *, support=None,
                          initial_cells=2048, max_cell_mass=1e-3,
                          breakpoints=None, max_refinements=12):
    """Build a GridDensitySampler for the density g w.r.t. the measure.

    Parameters
    ----------
    g : callable
        Vectorized candidate density with respect to ``measure``; must
        integrate to 1 within ``tol``.
    measure : ReferenceMeasure
    tol : float
        Mass-verification tolerance.
    support : (lo, hi), optional
        Interval to grid; defaults to the measure's effective support.
    initial_cells, max_cell_mass, breakpoints, max_refinements :
        Grid controls, see ``refined_grid``.
    """
    nodes, masses = refined_grid(
        g, measure, support=support, initial_cells=initial_cells,
        max_cell_mass=max_cell_mass, breakpoints=breakpoints,
        max_refinements=max_refinements)
    return GridDensitySampler(nodes, masses, tol)
