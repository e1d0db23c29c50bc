"""Pre-compute acceptance-branch solves into the on-disk cache.

Usage: python tests/_warm_acceptance.py LANE  (LANE = a or b)

Each lane is a single process; the two lanes together cover every solve the
acceptance suite needs, split to balance wall-clock time on two cores.
Safe to re-run: cached speeds are skipped.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from test_acceptance import _cached_branch  # noqa: E402

from darkwave import PotentialSpec  # noqa: E402

ROTON = (PotentialSpec.e1(0.5, -1.0), 60.0, 2399, 6.25e-3)
E1REF = (PotentialSpec.e1(1.0, 0.4), 50.0, 999, 0.05 / 4.0)
E2REF = (PotentialSpec.e2(1.0), 50.0, 999, 0.05 / 4.0)
WIDE = (PotentialSpec.e1(0.15, 0.05), 400.0, 6399, 0.01)

SWEEP = [(PotentialSpec.e1(0.5, lam), 60.0, 1201, 1.25e-2)
         for lam in (-10.0, -2.0, -0.5, 0.1)]

LANES = {
    "c": [(cfg, (0.1,)) for cfg in SWEEP],
    "a": [
        (ROTON, (1.0,)),
        (ROTON, (0.5,)),
        (E2REF, (0.1, 0.25, 0.5, 0.75, 1.0, 1.25)),
    ],
    "b": [
        (ROTON, (1.25,)),
        (ROTON, (0.75,)),
        (ROTON, (0.25,)),
        (ROTON, (0.1,)),
        (E1REF, (0.1, 0.25, 0.5, 0.75, 1.0, 1.25)),
        (WIDE, (0.1, 0.25, 0.5, 0.75, 1.0, 1.25)),
    ],
}


def main() -> None:
    lane = sys.argv[1]
    for (spec, L, N, eps2), speeds in LANES[lane]:
        t0 = time.perf_counter()
        _, results = _cached_branch(spec, L, N, eps2, speeds=speeds)
        dt = time.perf_counter() - t0
        for c in speeds:
            r = results[c]
            print(
                f"[lane {lane}] {spec.label()} N={N} c={c}: iters={r['iterations']} "
                f"F={r['final_objective']:.4g} trivial={r['is_trivial']} ({dt:.0f}s)",
                flush=True,
            )


if __name__ == "__main__":
    main()
