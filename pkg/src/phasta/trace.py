"""Newline-delimited JSON trace records: one serializer for files and wire.

Records are decimated on the way out, but every tick where the dominant state
changes or a cue arrives is always kept, so replays and plots never miss an
event.  With a fixed seed, re-running a config reproduces the file
byte-for-byte.
"""

import json

import numpy as np

# Activation entries below this are omitted from serialized records.
SPARSE_EPS = 1e-4


def record_from_tick(tick):
    """Serializable record for one Tick; plain Python types only."""
    lam = tick.Lambda
    n = lam.shape[0]
    lam_sparse = []
    phi_sparse = []
    for j in range(n):
        for i in range(n):
            v = lam[j, i]
            if v > SPARSE_EPS:
                lam_sparse.append([j, i, float(v)])
                if j != i and tick.phi_valid[j, i]:
                    phi_sparse.append([j, i, float(tick.Phi[j, i])])
    rec = {
        "tick": int(tick.tick),
        "t": float(tick.t),
        "x": [float(v) for v in tick.x],
        "dominant": int(tick.dominant),
        "lambda": lam_sparse,
        "phi": phi_sparse,
        "eta": float(tick.eta),
        "delta_dot": [float(v) for v in tick.delta_dot],
        "g": [float(v) for v in tick.g],
        "cue": tick.cue,
        "command": None,
    }
    if tick.command is not None:
        rec["command"] = {
            "mean": [float(v) for v in tick.command.mean],
            "cov": [[float(v) for v in row] for row in tick.command.cov],
            "weights": [[_slot_name(slot), float(w)] for slot, w in tick.command.weights],
        }
    return rec


def _slot_name(slot):
    if slot[0] == "state":
        return f"state:{slot[1]}"
    return f"transition:{slot[1]}->{slot[2]}"


def dumps(rec):
    return json.dumps(rec, separators=(",", ":"))


class TraceWriter:
    """Decimating writer for newline-delimited JSON records.

    Emits every `every`-th tick, plus the first tick, plus any tick whose
    dominant state or active cue differs from the previous tick.
    """

    def __init__(self, fh, every=1):
        self.fh = fh
        self.every = max(1, int(every))
        self._prev_dominant = None
        self._prev_cue = None
        self.count = 0

    def feed(self, tick):
        keep = (tick.tick % self.every == 0
                or tick.dominant != self._prev_dominant
                or tick.cue != self._prev_cue)
        self._prev_dominant = tick.dominant
        self._prev_cue = tick.cue
        if keep:
            self.fh.write(dumps(record_from_tick(tick)))
            self.fh.write("\n")
            self.count += 1


def write_trace(path, ticks, every=1):
    """Write an iterable of Ticks to an NDJSON file; returns records written."""
    with open(path, "w") as fh:
        w = TraceWriter(fh, every)
        for tick in ticks:
            w.feed(tick)
        return w.count


def read_trace(path):
    """Read an NDJSON trace file back into a list of record dicts."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def dense_series(records, n, key="lambda"):
    """Rebuild a dense (len(records), n, n) array from sparse record entries."""
    out = np.zeros((len(records), n, n))
    for k, rec in enumerate(records):
        for j, i, v in rec[key]:
            out[k, j, i] = v
    return out
