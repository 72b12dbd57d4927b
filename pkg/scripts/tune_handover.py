"""One-shot tuning sweep for the handover policy constants.

Sweeps the pacing knobs and prints the metrics the scenario tests lock in:
peak state activation at visited states (clean saddle visits), fork dwell
under the hesitant default, commitment latency for each cue, and the
reach->release transit window used to place the disengage cue.

Run:  python3 scripts/tune_handover.py
The winning constants are frozen in src/phasta/scenario.py.
"""

import itertools

import numpy as np

import phasta.scenario as sc
from phasta.scenario import handover_runconfig, run_handover


def metrics(chain, release_pull, fork_base):
    sc.CHAIN_ADVANCE = chain
    sc.RELEASE_PULL = release_pull
    sc.FORK_BASE = fork_base
    rc = handover_runconfig()
    rl, rr, lift, release = (rc.index("reach_left"), rc.index("reach_right"),
                             rc.index("lift"), rc.index("release"))

    def run_stats(script, duration):
        tr = run_handover(script, duration=duration, runcfg=handover_runconfig())
        lam = np.array([[t.Lambda[i, i] for i in range(rc.n)] for t in tr.ticks])
        ts = np.array([t.t for t in tr.ticks])
        visited = sorted(set(tr.dominant_names), key=rc.state_names.index)
        peaks = {name: float(lam[:, rc.index(name)].max()) for name in visited}
        lift_arrival = next((t.t for t, n in zip(tr.ticks, tr.dominant_names) if n == "lift"), None)
        commit = next((t.t for k, t in enumerate(tr.ticks)
                       if lam[k, rl] > 0.5 or lam[k, rr] > 0.5), None)
        window = [t.t for t in tr.ticks
                  if t.Lambda[release, rl] > 0.5 and 0.2 < t.Phi[release, rl] < 0.7]
        return peaks, lift_arrival, commit, (window[0], window[-1]) if window else None

    out = {}
    peaks_l, _, commit_l, window = run_stats([(1.0, "left_extended")], 7.0)
    peaks_b, _, commit_b, _ = run_stats([(1.0, "both_extended")], 7.0)
    peaks_n, lift_n, commit_n, _ = run_stats([], 14.0)
    out["min_reach_peak"] = min(peaks_l.get("reach_left", 0.0), peaks_b.get("reach_left", 0.0))
    out["retract_peak"] = min(peaks_l.get("retract", 0.0), peaks_b.get("retract", 0.0))
    out["fork_dwell_none"] = None if commit_n is None or lift_n is None else commit_n - lift_n
    out["commit_left"] = commit_l
    out["commit_both"] = commit_b
    out["commit_none"] = commit_n
    out["disengage_window"] = window
    return out


def main():
    grid = itertools.product([1e-4, 2e-4, 5e-4], [0.05, 0.1, 0.15], [5e-3])
    for chain, pull, fork in grid:
        m = metrics(chain, pull, fork)
        print(f"chain={chain:g} pull={pull:g} fork={fork:g} -> "
              f"reach_peak={m['min_reach_peak']:.3f} retract_peak={m['retract_peak']:.3f} "
              f"fork_dwell={m['fork_dwell_none'] and round(m['fork_dwell_none'], 2)} "
              f"commit(left/both/none)={m['commit_left'] and round(m['commit_left'], 2)}/"
              f"{m['commit_both'] and round(m['commit_both'], 2)}/"
              f"{m['commit_none'] and round(m['commit_none'], 2)} "
              f"window={m['disengage_window'] and tuple(round(w, 2) for w in m['disengage_window'])}")


if __name__ == "__main__":
    main()
