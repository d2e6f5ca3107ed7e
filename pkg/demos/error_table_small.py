"""A desk-scale error table for the Gaussian benchmark target.

f(x) = 1/(1+2x^2) is approximated in the degree-(m-1) polynomial space
under the standard Gaussian measure. The table reports the deterministic
best relative error next to the RMS and 95% quantile of the weighted
least-squares error per sampling scheme. At n = 2m the heavy upper tail
of the plain i.i.d. Christoffel design is already visible in its
quantile; the projection-based designs are the tightest.
"""

import io
import os

# Gauss quadrature for this analytic-but-slowly-converging integrand
# certifies near order 2000, above the interactive default cap.
os.environ.setdefault("DPPLS_MAX_QUAD_ORDER", "2048")

from dppls.experiments import ExperimentConfig, error_table  # noqa: E402


def main():
    config = ExperimentConfig(
        basis_family="hermite",
        schemes=("iid-christoffel", "volume", "repeated-dpp",
                 "repeated-dpp-cond"),
        m_values=(10,),
        n_multipliers=(2, 5),
        replicates=200,
        seed=0,
        workers=4)
    header, rows = error_table(config, out=io.StringIO())
    for row in rows:
        cells = dict(zip(header, row))
        print(f"m = {cells['m']}, n = {cells['n']}, "
              f"best = {cells['best']:.3e}")
        for scheme in config.schemes:
            print(f"  {scheme:<18} rms = {cells[f'{scheme}_rms']:.3e}   "
                  f"q95 = {cells[f'{scheme}_q95']:.3e}")
    print()
    print("200 replicates keep this quick; tail-sensitive statistics of "
          "the i.i.d. column move a lot between replicate budgets.")


if __name__ == "__main__":
    main()
