"""How big does a t-stat get by chance?

Scores 2000 noise SVI series against one return stream. About 5% of |t| should
exceed 1.95. Then draws keyword-set-sized nulls to show the best |t| of a
100-200 keyword list.
"""

import time

from trendlab.hygiene import TAIL_195, NullStudyConfig, keyword_set_extremes, null_study
from trendlab.ingest import GeneratorKind, SyntheticSpec

returns = SyntheticSpec(416, GeneratorKind.IID_GAUSSIAN, seed=1, stdev=0.02)

t0 = time.perf_counter()
study = null_study(NullStudyConfig(2000, returns, k=10, master_seed=1))
print(f"2000 trials in {time.perf_counter() - t0:.1f}s")
print(f"mean {study.mean:+.3f}  sd {study.stdev:.3f}  |t|>1.95: {study.frac_above_195:.4f} "
      f"(normal: {TAIL_195:.4f})")
print("largest:", ", ".join(f"#{i} {t:+.2f}" for i, t in study.top))

for size, s in zip((200, 100, 100, 100), keyword_set_extremes(returns, master_seed=1)):
    print(f"set of {size}: best |t| = {s.max_abs:.2f}")
