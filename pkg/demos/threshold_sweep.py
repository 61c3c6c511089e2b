"""Where does recovery switch on? A sweep of read length on a line of 5000 cells.

Binary uniform symbols on {0..4999}, one read starting at every position. The
critical read length is about 2 ln(5000) / ln 2 = 24.6. Well below it, some shell
repeats and blocks recovery; well above it, every overlap window is unique.
Between the two, neither certificate fires and the trial counts as unknown.

Usage: python3 demos/threshold_sweep.py [trials]   (default 200; takes about a minute)
"""
import math
import sys

from shotgun_id import ScenarioConfig, sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200
cfg = ScenarioConfig("ex1", {"d": 1, "ell": 1, "R": 5000, "r": 6}, trials=trials, seed=1)
results = sweep(cfg, "r", [6, 8, 12, 16, 20, 24, 28, 35, 40])

print(f"critical read length ~ {2 * math.log(5000) / math.log(2):.1f}")
print(f"{'r':>3} {'|K|/ln|CK|':>10} {'id':>6} {'non-id':>7} {'unknown':>8}  95% interval for P(identifiable)")
for res in results:
    lo, hi = res.p_id_interval
    print(f"{res.resolved['r']:>3} {res.lambda_ratio:>10.2f} {res.frac_id:>6.2f} {res.frac_nonid:>7.2f} "
          f"{res.n_unknown / res.trials:>8.2f}  [{lo:.3f}, {hi:.3f}]")
print(f"lambda_c = {results[0].lambda_c:.3f}")
