"""Choosing observation times that equalize null cumulative incidence.

Different cluster-size mixes reach a given infected fraction at different
speeds (bigger clusters transmit more).  This script inverts the exact
count-chain incidence to find the horizon T at which the expected infected
fraction of the cohort hits 0.15 under beta = gamma = 0, across several
size distributions.

Run:  python3 demos/calibrate_horizon.py
"""

import math

from clusterbias import Fixed, ShiftedPoisson, calibrate_T, cohort_null_incidence

ALPHA, OMEGA, TARGET = 1e-4, 0.01, 0.15


def main():
    print(f"target incidence {TARGET} at alpha={ALPHA}, omega={OMEGA}\n")

    t = calibrate_T(TARGET, ALPHA, 0.0, Fixed(4))
    print(f"no transmission (analytic -ln(1-c)/alpha): T = {t:.1f} "
          f"(exact {-math.log(1 - TARGET) / ALPHA:.1f})")

    for n in (2, 4, 8):
        t = calibrate_T(TARGET, ALPHA, OMEGA, Fixed(n))
        print(f"fixed n = {n}: T = {t:.1f}")

    print()
    for mu in (1.0, 2.0, 3.0, 4.0):
        dist = ShiftedPoisson(mu, 1)
        t = calibrate_T(TARGET, ALPHA, OMEGA, dist)
        check = cohort_null_incidence(ALPHA, OMEGA, dist, t)
        print(f"Pois({mu:.0f})+1 sizes: T = {t:.1f}  "
              f"(achieved incidence {check:.6f})")


if __name__ == "__main__":
    main()
