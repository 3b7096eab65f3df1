"""Compare the numba and numpy kernel backends on regret-free scans.

    python benchmarks/bench_backends.py [--repeat 3]

Each case builds the outcome table once, then times the full regret-free
check (rescue tables plus deviation scan) under each backend.  Verdicts and
witnesses are compared so a speedup never hides a disagreement.
"""

import argparse
import time

from rgf import _kernels
from rgf.axioms import check
from rgf.engine import build_outcome_table
from rgf.rules import RuleSpec, ScoreVector, TieBreak

CASES = [
    ("A-maxmin 2x5", RuleSpec.maxmin(2, 5, TieBreak.fixed(range(5)))),
    ("A-maxmin 3x4", RuleSpec.maxmin(3, 4, TieBreak.fixed(range(4)))),
    ("A-2-approval 3x4", RuleSpec.scoring(3, 4, ScoreVector.approval(4, 2), TieBreak.fixed(range(4)))),
    ("A-borda 2x6", RuleSpec.scoring(2, 6, ScoreVector.borda(6), TieBreak.fixed(range(6)))),
    ("N-maxmin 4x4", RuleSpec.maxmin(4, 4, TieBreak.by_agent(1))),
]


def timed(spec, table, backend, repeat):
    _kernels.force_backend(backend)
    check(spec, "regret_free", table=table, workers=1)  # warm-up / JIT compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        verdict = check(spec, "regret_free", table=table, workers=1)
        best = min(best, time.perf_counter() - t0)
    return best, verdict


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"]
    try:
        _kernels.force_backend("numba")
        backends.insert(0, "numba")
    except RuntimeError:
        print("numba unavailable; timing numpy only")
    print(f"{'case':20s} {'entries':>10s} " + " ".join(f"{b:>10s}" for b in backends) + "   verdict")
    for name, spec in CASES:
        table = build_outcome_table(spec)
        times, verdicts = [], []
        for b in backends:
            t, v = timed(spec, table, b, args.repeat)
            times.append(t)
            verdicts.append(v)
        agree = all(v == verdicts[0] for v in verdicts)
        cols = " ".join(f"{t:9.3f}s" for t in times)
        print(f"{name:20s} {len(table):>10d} {cols}   {verdicts[0].status}{'' if agree else '  BACKENDS DISAGREE'}")


if __name__ == "__main__":
    main()
