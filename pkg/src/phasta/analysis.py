"""Measurement helpers over recorded tick sequences."""

import numpy as np


def series(ticks, getter):
    return np.array([getter(t) for t in ticks])


def dominant_intervals(ticks):
    """[(state, t_start, t_end)] for each maximal run of one dominant state."""
    out = []
    for tick in ticks:
        if out and out[-1][0] == tick.dominant:
            out[-1][2] = tick.t
        else:
            out.append([tick.dominant, tick.t, tick.t])
    return [tuple(o) for o in out]


def dominant_sequence(ticks):
    return [s for s, _, _ in dominant_intervals(ticks)]


def _interp_crossing(t0, v0, t1, v1, level):
    if v1 == v0:
        return t1
    return t0 + (t1 - t0) * (level - v0) / (v1 - v0)


def transition_traversals(ticks, j, i, lo=0.3, hi=0.7, active=0.5):
    """Durations of each traversal of transition i->j, measured as the time
    for the phase to climb from `lo` to `hi` while the transition is active.

    The phase milestones are linearly interpolated between ticks.  The
    central band avoids the asymptotic tails near the saddles, where the
    phase only converges asymptotically; see docs for why this is the
    duration measure used for speed-scaling checks.
    """
    out = []
    t_lo = None
    prev = None
    for tick in ticks:
        lam = tick.Lambda[j, i]
        phi = tick.Phi[j, i]
        if lam >= active and prev is not None:
            p_lam, p_phi, p_t = prev
            if p_phi < lo <= phi:
                t_lo = _interp_crossing(p_t, p_phi, tick.t, phi, lo)
            if t_lo is not None and p_phi < hi <= phi:
                out.append((t_lo, _interp_crossing(p_t, p_phi, tick.t, phi, hi)))
                t_lo = None
        if lam < active:
            t_lo = None
        prev = (lam, phi, tick.t)
    return [(b - a) for a, b in out]


def extinction_time(ticks, j, i, threshold=0.1):
    """Last simulated time the activation of transition i->j was at or above
    the threshold; 0.0 if it never reached it."""
    last = 0.0
    for tick in ticks:
        if tick.Lambda[j, i] >= threshold:
            last = tick.t
    return last


def activation_pulses(ticks, j, i, threshold=0.05):
    """Contiguous windows where transition i->j is active: list of
    (t_start, t_end, peak_activation, phi_min, phi_max, phi_monotone)."""
    out = []
    cur = None
    prev_phi = None
    for tick in ticks:
        lam = tick.Lambda[j, i]
        phi = tick.Phi[j, i]
        if lam > threshold:
            if cur is None:
                cur = [tick.t, tick.t, lam, phi, phi, True]
                prev_phi = phi
            else:
                cur[1] = tick.t
                cur[2] = max(cur[2], lam)
                cur[3] = min(cur[3], phi)
                cur[4] = max(cur[4], phi)
                if phi < prev_phi - 1e-6:
                    cur[5] = False
                prev_phi = phi
        elif cur is not None:
            out.append(tuple(cur))
            cur = None
    if cur is not None:
        out.append(tuple(cur))
    return out
