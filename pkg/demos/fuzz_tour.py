"""A short tour of the fuzzer: draw a few instances and show what was checked.

The same seed always produces the same instances, so any report line can be
replayed with ``toricflip fuzz --n N --seed S --count K``.
"""

import json
from collections import Counter

from toricflip.lab.fuzz import fuzz

for n in (3, 4):
    verdicts = Counter()
    checks = Counter()
    for report in fuzz(n, 30, seed=1):
        verdicts[report.verdict] += 1
        for name, verdict in report.values.items():
            checks[(name.split("#")[0], verdict)] += 1
        if report.verdict == "violation":
            print(json.dumps(report.to_dict(), indent=1, default=str))
    print(f"n = {n}: {dict(verdicts)}")
    for (name, verdict), k in sorted(checks.items()):
        print(f"  {name:14} {verdict:15} {k}")
