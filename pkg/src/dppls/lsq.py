"""Empirical Gram matrices, weighted least-squares fitting, exact-norm
error evaluation through adaptive quadrature, best approximation, and
averaging of independent estimators.
"""

import math

import numpy as np
from dataclasses import dataclass

from .bases import PiecewiseConstantBasis
from .errors import (EmptyAggregateError, NumericError,
                     QuadratureAccuracyError, SingularDesignError,
                     ValidationError)
from .measures import QuadratureRule, max_quad_order

# lambda_min at or below this declares the design unusable; below unit
# roundoff amplification for m <= 50
SINGULARITY_THRESHOLD = 1e-12
ADAPTIVE_RTOL = 1e-10


@dataclass(frozen=True)
class EmpiricalGram:
    """G^w = (1/n) sum_i w(x_i)^{-1} phi(x_i) phi(x_i)^T with its extreme
    eigenvalues."""

    matrix: np.ndarray
    lambda_min: float
    lambda_max: float


@dataclass(frozen=True)
class LsqFit:
    """Coefficients of the empirical projection plus diagnostics."""

    coefficients: np.ndarray
    lambda_min: float
    n: int
    m: int
    sampler_id: str
    attempts: int


def empirical_gram(design, basis, weight=None):
    """Empirical Gram matrix of the design; eigenvalues from a symmetric
    eigensolver. `weight` overrides the weights recorded on the design."""
    pts = design.points
    w = weight.evaluate(basis, pts) if weight is not None else design.weights
    phi = basis.feature_matrix(pts)
    if not (np.isfinite(phi).all() and np.isfinite(w).all()):
        raise NumericError("non-finite feature or weight values")
    G = (phi.T * (1.0 / (w * len(pts)))) @ phi
    G = 0.5 * (G + G.T)
    evals = np.linalg.eigvalsh(G)
    return EmpiricalGram(G, float(evals[0]), float(evals[-1]))


def weighted_lsq_fit(f_values, design, basis):
    """Coefficients minimizing (1/n) sum_i w(x_i)^{-1} (f(x_i) - g(x_i))^2
    over g in V_m.

    Solved through an orthogonal factorization of the row-scaled design
    matrix with rows w(x_i)^{-1/2} phi(x_i)^T, not the normal equations;
    the Gram matrix is still formed separately for the lambda_min
    diagnostic.
    """
    f_values = np.asarray(f_values, dtype=float)
    if f_values.shape != (design.n,):
        raise ValidationError("f_values length must match the design size")
    gram = empirical_gram(design, basis)
    if gram.lambda_min <= SINGULARITY_THRESHOLD:
        raise SingularDesignError(gram.lambda_min)
    scale = 1.0 / np.sqrt(design.n * design.weights)
    A = basis.feature_matrix(design.points) * scale[:, None]
    coef, *_ = np.linalg.lstsq(A, f_values * scale, rcond=None)
    return LsqFit(coef, gram.lambda_min, design.n, basis.m,
                  design.sampler_id, design.attempts)


def empirical_seminorm(f_values, design):
    """The weighted empirical semi-norm
    ||f||_n = ((1/n) sum_i w(x_i)^{-1} f(x_i)^2)^{1/2}."""
    f_values = np.asarray(f_values, dtype=float)
    if f_values.shape != (design.n,):
        raise ValidationError("f_values length must match the design size")
    return math.sqrt(float(np.mean(f_values * f_values / design.weights)))


def averaged_estimator(fits):
    """Coefficient-wise mean of independent fits (all sharing m)."""
    fits = list(fits)
    if not fits:
        raise EmptyAggregateError("cannot average zero fits")
    m = fits[0].m
    if any(fit.m != m for fit in fits):
        raise ValidationError("fits mix different basis dimensions")
    return np.mean([fit.coefficients for fit in fits], axis=0)


# ---------------------------------------------------------------------------
# quadrature-backed exact norms

def _rule_for(basis, order):
    """Quadrature for integrals of (basis function) x (smooth target).

    Polynomial families use the measure's Gauss rule directly. The
    piecewise-constant family gets a composite per-cell Gauss rule, since
    a global rule cannot see the cell boundaries.
    """
    if not isinstance(basis, PiecewiseConstantBasis):
        return basis.measure.gauss_quadrature(order)
    per_cell = max(2, math.ceil(order / basis.m))
    t, u = np.polynomial.legendre.leggauss(per_cell)
    edges = basis.cell_edges()
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = np.broadcast_to(u / u.sum() / basis.m, (basis.m, per_cell)).ravel()
    return QuadratureRule(nodes, weights.copy(), order)


def _adaptive(values_at, basis, quad=None, rtol=ADAPTIVE_RTOL):
    """Evaluate `values_at(rule)` at doubling quadrature orders until the
    result moves by less than rtol (relative), starting from `quad` or
    from order max(64, 2m)."""
    order = quad.order if quad is not None else max(64, 2 * basis.m)
    order = max(order, basis.m + 1)
    cap = max_quad_order()
    if order > cap:
        raise QuadratureAccuracyError(
            f"starting order {order} already exceeds the cap {cap}")
    prev = np.asarray(values_at(_rule_for(basis, order)), dtype=float)
    last_change = None
    while True:
        order *= 2
        if order > cap:
            raise QuadratureAccuracyError(
                f"quadrature not converged below order cap {cap} "
                f"(last relative change {last_change:.3e}); raise the "
                f"DPPLS_MAX_QUAD_ORDER environment variable"
                if last_change is not None else
                f"order cap {cap} leaves no room to double from "
                f"order {order // 2}")
        cur = np.asarray(values_at(_rule_for(basis, order)), dtype=float)
        last_change = _change(prev, cur)
        if last_change < rtol:
            return cur
        prev = cur


def _change(a, b):
    num = float(np.linalg.norm(np.atleast_1d(a - b)))
    den = max(1.0, float(np.linalg.norm(np.atleast_1d(b))))
    return num / den


def best_approximation(f, basis, quad=None):
    """Coefficients a_i = integral of f phi_i d(mu) of the orthogonal
    projection of f onto V_m, with an adaptive order-doubling check."""

    def values_at(rule):
        return basis.feature_matrix(rule.nodes).T @ (rule.weights * f(rule.nodes))

    return _adaptive(values_at, basis, quad)


def _f_moments(f, basis, quad):
    """Adaptively converged [||f||^2, integral of f phi_0, ..., f phi_{m-1}].

    Only integrals linear in the features appear here. Quadrature sums of
    feature products (Gram entries, pointwise residuals) are avoided on
    purpose: Golub-Welsch weights below ~1e-32 carry O(1) relative noise,
    and products of two feature values grow large enough in the Gaussian
    tail to turn that noise into visible error. Integrands damped by f
    stay clean.
    """

    def values_at(rule):
        fvals = np.asarray(f(rule.nodes), dtype=float)
        norm2 = float(rule.weights @ (fvals * fvals))
        coefs = basis.feature_matrix(rule.nodes).T @ (rule.weights * fvals)
        return np.concatenate(([norm2], coefs)), rule, fvals

    keep = {}

    def wrapped(rule):
        combined, rule, fvals = values_at(rule)
        keep["rule"], keep["fvals"] = rule, fvals
        return combined

    converged = _adaptive(wrapped, basis, quad)
    return float(converged[0]), converged[1:], keep["rule"], keep["fvals"]


def l2_error(f, coefficients, basis, quad=None):
    """||f - sum_i a_i phi_i|| in L^2_mu via adaptive quadrature.

    Expanded through the exact orthonormality of the features:
    ||f - phi c||^2 = ||f||^2 - 2 c.a + ||c||^2 with a the projection
    coefficients, so only f-linear integrals are quadratured.
    """
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (basis.m,):
        raise ValidationError("coefficient vector length must equal m")
    norm2, a, _, _ = _f_moments(f, basis, quad)
    err2 = norm2 - 2.0 * float(c @ a) + float(c @ c)
    return math.sqrt(max(err2, 0.0))


class ErrorEvaluator:
    """Precomputed context for evaluating many fits of one target.

    Fixes a converged quadrature rule once, caches the feature matrix and
    target values on its nodes, the best-approximation coefficients and
    the exact norms; per-fit relative errors then cost one matrix-vector
    product.
    """

    def __init__(self, f, basis, quad=None):
        self.basis = basis
        self.f = f
        norm2, coefs, rule, fvals = _f_moments(f, basis, quad)
        self.rule = rule
        self.f_norm = math.sqrt(norm2)
        self.best_coefficients = coefs
        # ||f - Pf||^2 = ||f||^2 - ||a||^2, exact by orthonormality
        self.best_error = math.sqrt(max(norm2 - float(coefs @ coefs), 0.0))
        self.best_rel_error = self.best_error / self.f_norm

    def abs_error(self, coefficients):
        """||f - phi^T c|| from the error split
        ||f - phi c||^2 = ||f - Pf||^2 + ||a - c||^2."""
        d = self.best_coefficients - np.asarray(coefficients, dtype=float)
        return math.sqrt(self.best_error ** 2 + float(d @ d))

    def rel_error(self, coefficients):
        """||f - phi^T c|| / ||f||."""
        return self.abs_error(coefficients) / self.f_norm

    def f_values(self, xs):
        return np.asarray(self.f(xs), dtype=float)
