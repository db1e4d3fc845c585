"""Two-person clusters: where the risk ratio points the wrong way.

Computes the closed-form risk ratio over a (beta, gamma) grid, renders the
two-panel heatmap, and walks through one direction-biased parameter point:
the analytic eligibility condition, the reversal time t*, and the risk
ratio on both sides of it.

Run:  python3 demos/pair_map.py
"""

from clusterbias import (
    EpidemicParams,
    GridSpec,
    direction_bias_condition,
    exact_risk_ratio,
    render_heatmap_svg,
    run_exact_map,
    tstar_bound,
    write_map_csv,
)

ALPHA, OMEGA = 1e-4, 0.01


def main():
    grid = GridSpec(-3.0, 3.0, 0.25, -3.0, 3.0, 0.25)
    result = run_exact_map(grid, ALPHA, OMEGA, incidence_target=0.15)
    write_map_csv(result, "pair_map.csv")
    render_heatmap_svg(result, "pair_map.svg")
    biased = [c for c in result.cells if c.classification == "direction-biased"]
    print(f"grid: {len(result.cells)} cells, {len(biased)} direction-biased")
    print("wrote pair_map.csv / pair_map.svg")

    # one biased point in detail: beta < 0 (protective hazard) but gamma
    # sufficiently negative turns the long-run risk ratio harmful
    params = EpidemicParams(ALPHA, OMEGA, beta=-0.5, gamma=-2.0)
    print(f"\nbeta={params.beta}, gamma={params.gamma}: "
          f"eligible={direction_bias_condition(params)}")
    t_star = tstar_bound(params)
    print(f"reversal time t* = {t_star:.1f}")
    for t in (0.5 * t_star, t_star, 2 * t_star, 10 * t_star):
        rr = exact_risk_ratio(params, t)
        tag = "faithful" if (rr < 1) == (params.beta < 0) else "reversed"
        print(f"  t = {t:8.1f}: RR = {rr:.4f}  ({tag})")


if __name__ == "__main__":
    main()
