"""What the Chernoff machinery promises before any sampling happens.

For a target failure probability eta, each scheme has a closed-form
sample size that guarantees the stability event. The i.i.d. bound scales
like m log m; the volume design pays an extra m for its projection
block; the repeated projection design's bound has the same form but
rests on a conjecture. The guarantees are conservative next to the
empirical stability maps, which is exactly what tail bounds are for.
"""

from dppls.bounds import (chernoff_constants, required_sample_size,
                          stability_failure_bound)


def main():
    print("Chernoff exponents:")
    for delta in (0.25, 0.5, 0.75):
        cc = chernoff_constants(delta)
        print(f"  delta = {delta}: c = {cc.c_delta:.6f}, "
              f"d = {cc.d_delta:.6f}")
    print()

    print("points guaranteeing P(lambda_min < 1-delta) <= 1/2 "
          "at delta = 3/4:")
    print(f"{'m':>4} {'iid':>6} {'volume':>7} {'repeated-dpp*':>14}")
    for m in (10, 20, 50):
        sizes = [required_sample_size(s, m, 0.75, 0.5)
                 for s in ("iid", "volume", "repeated-dpp")]
        print(f"{m:>4} {sizes[0]:>6} {sizes[1]:>7} {sizes[2]:>14}")
    print("  (* conjecture-dependent)")
    print()

    print("halving the mixture weight alpha doubles the i.i.d. budget:")
    for alpha in (1.0, 0.5):
        n = required_sample_size("iid", 20, 0.75, 0.5, alpha)
        print(f"  alpha = {alpha}: n = {n}")
    print()

    print("raw failure bounds at m = 20, n = 2m (may exceed 1):")
    for scheme in ("iid", "volume", "repeated-dpp"):
        b = stability_failure_bound(scheme, 20, 40, 0.75)
        tag = "  [conjecture-dependent]" if b.conjecture_dependent else ""
        print(f"  {scheme:<14} {b.predicted_failure_prob:.3f}{tag}")


if __name__ == "__main__":
    main()
