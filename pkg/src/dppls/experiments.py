"""Seeded Monte Carlo experiment harness: stability maps, error tables,
error histograms, the spectral-tail comparison between the projection
process and i.i.d. sampling, and design dumps, all emitted as CSV.

Every run is a pure function of its configuration and seed. Each
replicate owns an RNG stream derived from (seed, replicate, cell), so
splitting replicates across any number of worker processes cannot change
a single output byte.
"""

import csv
import io
import math
import sys

import numpy as np
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bases import BASIS_FAMILIES, make_basis
from .errors import DpplsError, SingularDesignError, ValidationError
from .lsq import ErrorEvaluator, empirical_gram, weighted_lsq_fit
from .measures import max_quad_order
from .samplers import (SCHEMES, canonical_scheme, draw_design,
                       replicate_stream)

BLOWUP_CAP = 1e15
DEFAULT_M_VALUES = (10, 20, 30, 40, 50)
DEFAULT_N_MULTIPLIERS = (2, 5, 10)
DEFAULT_DELTA = 0.75
STABILITY_SCHEMES = ("iid-mu", "iid-christoffel", "volume", "repeated-dpp")


@dataclass(frozen=True)
class TargetFunction:
    """A named target f to approximate; the evaluator must be finite on
    the effective support of the measure in use."""

    id: str
    evaluator: object


def _inv_quad(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + 2.0 * x * x)


TARGETS = {
    "inv-quad": TargetFunction("inv-quad", _inv_quad),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared knobs for all experiment drivers.

    Exactly one of n_values (absolute sizes) and n_multipliers (factors
    of m) is used; when both are None the defaults n = 2m, 5m, 10m apply.
    """

    basis_family: str = "hermite"
    schemes: tuple = SCHEMES
    m_values: tuple = DEFAULT_M_VALUES
    n_values: tuple = None
    n_multipliers: tuple = None
    alpha: float = 1.0
    delta: float = DEFAULT_DELTA
    replicates: int = 1000
    seed: int = 0
    target_id: str = "inv-quad"
    workers: int = 1
    max_attempts: int = 1000

    def __post_init__(self):
        if self.basis_family not in BASIS_FAMILIES:
            raise ValidationError(f"unknown basis family {self.basis_family!r}")
        object.__setattr__(self, "schemes",
                           tuple(canonical_scheme(s) for s in self.schemes))
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValidationError(f"unknown scheme {s!r}")
        if not self.schemes:
            raise ValidationError("at least one scheme is required")
        if not self.m_values:
            raise ValidationError("at least one m value is required")
        for m in self.m_values:
            if int(m) < 1:
                raise ValidationError(f"m must be >= 1, got {m}")
        if self.n_values is not None and self.n_multipliers is not None:
            raise ValidationError("give n_values or n_multipliers, not both")
        if int(self.replicates) < 1:
            raise ValidationError(f"replicates must be >= 1, got {self.replicates}")
        if not (0.0 < self.alpha <= 1.0):
            raise ValidationError(f"alpha must lie in (0,1], got {self.alpha}")
        if not (0.0 < self.delta < 1.0):
            raise ValidationError(f"delta must lie in (0,1), got {self.delta}")
        if self.target_id not in TARGETS:
            raise ValidationError(f"unknown target {self.target_id!r}")
        if int(self.workers) < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")

    def n_for(self, m):
        if self.n_values is not None:
            ns = tuple(int(n) for n in self.n_values)
        else:
            mult = self.n_multipliers or DEFAULT_N_MULTIPLIERS
            ns = tuple(int(round(k * m)) for k in mult)
        for n in ns:
            if n < m:
                raise ValidationError(
                    f"every scheme needs n >= m, got n={n} at m={m}")
        return ns


# ---------------------------------------------------------------------------
# worker-side execution (top-level functions and caches: picklable tasks)

_basis_cache = {}
_evaluator_cache = {}


def _get_basis(family, m):
    key = (family, m)
    if key not in _basis_cache:
        _basis_cache[key] = make_basis(family, m)
    return _basis_cache[key]


def _get_evaluator(family, m, target_id):
    # the cap is part of the key: an evaluator certified under one order
    # limit must not be served after DPPLS_MAX_QUAD_ORDER changes
    key = (family, m, target_id, max_quad_order())
    if key not in _evaluator_cache:
        basis = _get_basis(family, m)
        f = TARGETS[target_id].evaluator
        _evaluator_cache[key] = ErrorEvaluator(f, basis)
    return _evaluator_cache[key]


def _cell_key(m, n, scheme):
    return (int(m), int(n), SCHEMES.index(scheme))


def _run_chunk(task):
    """Execute replicates [start, stop) of one experiment cell.

    Returns (cell, records); records carry the replicate index so the
    aggregation can sort them independently of scheduling.
    """
    (kind, family, m, n, scheme, alpha, delta, max_attempts, target_id,
     seed, start, stop) = task
    basis = _get_basis(family, m)
    cell = _cell_key(m, n, scheme)
    records = []
    for rep in range(start, stop):
        gen = replicate_stream(seed, rep, *cell)
        if kind == "stability":
            try:
                design = draw_design(scheme, basis, n, gen, alpha=alpha,
                                     delta=delta, max_attempts=max_attempts)
                lam = empirical_gram(design, basis).lambda_min
                records.append((rep, "ok", 1.0 if lam >= 1.0 - delta else 0.0))
            except DpplsError:
                records.append((rep, "failed", 0.0))
        elif kind == "error":
            evaluator = _get_evaluator(family, m, target_id)
            try:
                design = draw_design(scheme, basis, n, gen, alpha=alpha,
                                     delta=delta, max_attempts=max_attempts)
                fvals = evaluator.f_values(design.points)
                fit = weighted_lsq_fit(fvals, design, basis)
                err = evaluator.rel_error(fit.coefficients)
                if err > BLOWUP_CAP:
                    records.append((rep, "capped", BLOWUP_CAP))
                else:
                    records.append((rep, "ok", err))
            except SingularDesignError:
                records.append((rep, "capped", BLOWUP_CAP))
            except DpplsError:
                records.append((rep, "failed", math.nan))
        elif kind == "conjecture":
            lam_dpp = empirical_gram(
                draw_design("repeated-dpp", basis, basis.m, gen), basis).lambda_min
            lam_iid = empirical_gram(
                draw_design("iid-christoffel", basis, basis.m, gen), basis).lambda_min
            records.append((rep, lam_dpp, lam_iid))
        else:
            raise ValidationError(f"unknown task kind {kind!r}")
    return cell, records


def _chunk_ranges(replicates, workers):
    """Contiguous replicate ranges, a few per worker for load balance."""
    if workers <= 1:
        return [(0, replicates)]
    size = max(1, math.ceil(replicates / (workers * 4)))
    return [(a, min(a + size, replicates)) for a in range(0, replicates, size)]


def _run_cells(kind, config, cells):
    """Run all (m, n, scheme) cells, returning {cell_key: sorted records}."""
    tasks = []
    for (m, n, scheme) in cells:
        for (a, b) in _chunk_ranges(config.replicates, config.workers):
            tasks.append((kind, config.basis_family, m, n, scheme,
                          config.alpha, config.delta, config.max_attempts,
                          config.target_id, config.seed, a, b))
    out = {}
    if config.workers <= 1:
        results = map(_run_chunk, tasks)
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_chunk, tasks))
    for cell, records in results:
        out.setdefault(cell, []).extend(records)
    for records in out.values():
        records.sort(key=lambda r: r[0])
    return out


# ---------------------------------------------------------------------------
# CSV plumbing

def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_point(x):
    """17 significant digits: enough for float64 round trips."""
    return format(float(x), ".17g")


def write_csv(out, header, rows):
    """RFC-4180 CSV with a header row, '.' decimals and LF endings, to a
    path, an open text stream, or stdout when out is None."""
    text = io.StringIO()
    writer = csv.writer(text, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    payload = text.getvalue()
    if out is None:
        sys.stdout.write(payload)
    elif hasattr(out, "write"):
        out.write(payload)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(payload)
    return payload


# ---------------------------------------------------------------------------
# experiment drivers

def stability_map(config, out=None):
    """Empirical P(lambda_min(G^w) >= 1 - delta) over the (m, n) grid.

    Sampler failures never abort the map: a failed replicate counts in
    the failures column and as a miss in p_hat (the denominator stays at
    `replicates`).
    """
    for s in config.schemes:
        if s not in STABILITY_SCHEMES:
            raise ValidationError(
                f"stability map supports {STABILITY_SCHEMES}, got {s!r}")
    cells = [(m, n, s) for m in config.m_values for n in config.n_for(m)
             for s in config.schemes]
    results = _run_cells("stability", config, cells)
    header = ["m", "n", "scheme", "p_hat", "replicates", "seed", "failures"]
    rows = []
    for (m, n, s) in cells:
        records = results[_cell_key(m, n, s)]
        hits = sum(ev for (_, status, ev) in records if status == "ok")
        failures = sum(1 for (_, status, _) in records if status == "failed")
        rows.append([m, n, s, hits / config.replicates,
                     config.replicates, config.seed, failures])
    write_csv(out, header, rows)
    return header, rows


def _quantile95(values):
    """Type-7 (linear interpolation) empirical 0.95 quantile."""
    return float(np.quantile(np.asarray(values, dtype=float), 0.95,
                             method="linear"))


def error_table(config, out=None):
    """Relative-error table: deterministic best column, then per scheme
    the RMS relative error sqrt(mean of squared ||f-fhat||/||f||) and the
    95% empirical quantile over replicates.

    Singular and blown-up fits are capped at 1e15 and counted; sampler
    failures are counted separately and excluded from the statistics.
    """
    cells = [(m, n, s) for m in config.m_values for n in config.n_for(m)
             for s in config.schemes]
    results = _run_cells("error", config, cells)
    header = ["m", "n", "best"]
    for s in config.schemes:
        header += [f"{s}_rms", f"{s}_q95", f"{s}_capped", f"{s}_failures"]
    header += ["replicates", "seed"]
    rows = []
    for m in config.m_values:
        evaluator = _get_evaluator(config.basis_family, m, config.target_id)
        for n in config.n_for(m):
            row = [m, n, evaluator.best_rel_error]
            for s in config.schemes:
                records = results[_cell_key(m, n, s)]
                errs = [e for (_, status, e) in records if status in ("ok", "capped")]
                capped = sum(1 for (_, status, _) in records if status == "capped")
                failures = sum(1 for (_, status, _) in records if status == "failed")
                if errs:
                    rms = math.sqrt(float(np.mean(np.square(errs))))
                    q95 = _quantile95(errs)
                else:
                    rms = q95 = math.nan
                row += [rms, q95, capped, failures]
            row += [config.replicates, config.seed]
            rows.append(row)
    write_csv(out, header, rows)
    return header, rows


def error_histogram(config, out=None):
    """One row per replicate with the relative error and its natural
    logarithm; binning is left to plotting tools."""
    cells = [(m, n, s) for m in config.m_values for n in config.n_for(m)
             for s in config.schemes]
    results = _run_cells("error", config, cells)
    header = ["m", "n", "scheme", "replicate", "status",
              "rel_error", "log_rel_error"]
    rows = []
    for (m, n, s) in cells:
        for (rep, status, err) in results[_cell_key(m, n, s)]:
            if status == "failed":
                rows.append([m, n, s, rep, status, "", ""])
            else:
                rows.append([m, n, s, rep, status, err, math.log(err)])
    write_csv(out, header, rows)
    return header, rows


def conjecture_check(m, t_grid, replicates, seed, basis_family="legendre",
                     workers=1, out=None):
    """Compare tail probabilities of F = lambda_min(G^{w_m})^-1 under the
    m-point projection process and under m i.i.d. draws from nu_m.

    For each t the CSV reports both empirical tails with binomial
    3-sigma half-widths. The verdict column says CONSISTENT when
    dpp_tail <= iid_tail + 3 sigma at every t, with sigma the two-sample
    binomial standard error, else VIOLATION. A verdict is Monte Carlo
    evidence, not proof.
    """
    m = int(m)
    if not 1 <= m <= 12:
        raise ValidationError(f"m must lie in [1, 12] for tail comparison, got {m}")
    replicates = int(replicates)
    if replicates < 1000:
        raise ValidationError(f"need at least 1000 replicates, got {replicates}")
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(t <= 0 for t in t_grid):
        raise ValidationError("t grid must be non-empty and positive")
    config = ExperimentConfig(basis_family=basis_family, schemes=("repeated-dpp",),
                              m_values=(m,), n_values=(m,), replicates=replicates,
                              seed=seed, workers=workers)
    records = _run_cells("conjecture", config, [(m, m, "repeated-dpp")])
    records = records[_cell_key(m, m, "repeated-dpp")]
    lam_dpp = np.array([r[1] for r in records])
    lam_iid = np.array([r[2] for r in records])

    def tail(lams, t):
        # F > t  <=>  lambda_min < 1/t
        return float(np.mean(lams < 1.0 / t))

    stats = []
    consistent = True
    for t in t_grid:
        p_d, p_i = tail(lam_dpp, t), tail(lam_iid, t)
        hw_d = 3.0 * math.sqrt(p_d * (1.0 - p_d) / replicates)
        hw_i = 3.0 * math.sqrt(p_i * (1.0 - p_i) / replicates)
        sigma = math.sqrt(p_d * (1.0 - p_d) / replicates
                          + p_i * (1.0 - p_i) / replicates)
        if p_d > p_i + 3.0 * sigma:
            consistent = False
        stats.append((t, p_d, hw_d, p_i, hw_i))
    verdict = "CONSISTENT" if consistent else "VIOLATION"
    header = ["m", "t", "dpp_tail", "dpp_half_width", "iid_tail",
              "iid_half_width", "verdict", "replicates", "seed"]
    rows = [[m, t, p_d, hw_d, p_i, hw_i, verdict, replicates, seed]
            for (t, p_d, hw_d, p_i, hw_i) in stats]
    write_csv(out, header, rows)
    return header, rows


def dump_design(scheme, basis_family, m, n, seed, alpha=1.0,
                delta=DEFAULT_DELTA, out=None):
    """Serialize one design draw as index,x,w rows; the decimal format
    (17 significant digits) round-trips float64 bit for bit."""
    basis = _get_basis(basis_family, int(m))
    design = draw_design(scheme, basis, int(n), int(seed), alpha=alpha,
                         delta=delta)
    header = ["index", "x", "w"]
    rows = [[i, format_point(x), format_point(w)]
            for i, (x, w) in enumerate(zip(design.points, design.weights))]
    write_csv(out, header, rows)
    return header, rows


def minimal_stable_n(basis_family, scheme, m, delta, replicates, seed,
                     n_max, workers=1, alpha=1.0):
    """Smallest n with empirical P(lambda_min(G^w) >= 1-delta) >= 1/2,
    walking n upward from m; None when n_max is passed without reaching
    the threshold."""
    for n in range(int(m), int(n_max) + 1):
        config = ExperimentConfig(basis_family=basis_family, schemes=(scheme,),
                                  m_values=(m,), n_values=(n,),
                                  replicates=replicates, seed=seed,
                                  delta=delta, workers=workers, alpha=alpha)
        results = _run_cells("stability", config, [(m, n, scheme)])
        records = results[_cell_key(m, n, scheme)]
        hits = sum(ev for (_, status, ev) in records if status == "ok")
        if hits / replicates >= 0.5:
            return n
    return None
