"""Both deciders over the built-in corpus, side by side.

Run: python3 demos/corpus_sweep.py [selector]
where selector is all (default), tag:<tag> or a comma-separated id list.
"""

import sys

from latsieve.harness import render_report, run_validate

selector = sys.argv[1] if len(sys.argv) > 1 else "all"
report = run_validate(selector, jobs=1)
print(render_report(report))

free = [r for r in report.rows if r.l9_free]
print(f"\n{len(free)} of {len(report.rows)} groups are L9-free")
not_modular = [r.id for r in free if not r.modular]
print("L9-free but not modular:", ", ".join(not_modular))
