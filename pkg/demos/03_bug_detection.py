"""Catching look-ahead bugs.

Runs the randomization check and the causality audit on the bundled trending
fixture, once with the correct pipeline and once with a build whose baseline
includes the current week.
"""

from trendlab import StrategyConfig
from trendlab.hygiene import causality_audit, randomization_bug_check
from trendlab.ingest import TRENDING_K, load_trending_fixture

svi, prices = load_trending_fixture()
config = StrategyConfig(k=TRENDING_K)

for label, lag in (("correct", 1), ("unlagged baseline", 0)):
    check = randomization_bug_check(svi, prices, config, n_trials=500, seed=3, baseline_lag=lag)
    audit = causality_audit(svi, prices, config, baseline_lag=lag)
    print(f"{label}: randomization {check.verdict}")
    for arm in check.arms.values():
        print(f"    {arm.name:28s} mean t {arm.mean:+.3f} (limit {arm.threshold:.3f})")
    print(f"    audit: {audit.n_reads} reads, {len(audit.violations)} future reads")
    if audit.violations:
        requested, series, as_of = audit.violations[0]
        print(f"    e.g. read {requested} with data only known up to {as_of}")
