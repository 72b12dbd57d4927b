"""Run configuration: a single JSON file describing system, modulation
defaults, motion goals, scenario and output settings.

Matrices are entered sparsely as (from, to, value) triples over state names;
everything unspecified falls back to documented defaults (see docs/config.md).
"""

import json
from dataclasses import dataclass

import numpy as np

from .blending import MotionGoal, TransitionPrimitive
from .dynamics import SystemConfig
from .errors import ConfigError
from .modulation import ModulationInputs
from .session import GoalSet, Session

DEFAULT_GAMMA = 2.0
DEFAULT_DT = 1e-3
DEFAULT_DECIMATION = 20


def _line_of(text, key):
    if not text:
        return None
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None


class _Ctx:
    """Carries the source text so schema errors can name field and line."""

    def __init__(self, text=None):
        self.text = text

    def fail(self, path, message):
        leaf = path.split(".")[-1].split("[")[0]
        line = _line_of(self.text, leaf)
        where = f"{path} (line {line})" if line else path
        raise ConfigError(f"{where}: {message}")


@dataclass
class RunConfig:
    """Validated configuration of one run or session."""

    state_names: list
    alpha: np.ndarray
    beta: np.ndarray
    nu: np.ndarray
    gamma: float
    dt: float
    T: np.ndarray
    initial_state: int
    B: np.ndarray
    A: np.ndarray
    g: np.ndarray
    bias_offset: np.ndarray
    epsilon: float
    seed: int
    goals: GoalSet
    scenario: dict
    decimation: int
    trace_path: str

    @property
    def n(self):
        return len(self.state_names)

    def system_config(self):
        return SystemConfig.make(self.alpha, self.beta, self.nu, self.gamma, self.T, self.dt)

    def initial_inputs(self):
        return ModulationInputs(B=self.B.copy(), A=self.A.copy(), g=self.g.copy(),
                                epsilon=self.epsilon, bias_offset=self.bias_offset.copy())

    def make_session(self, seed=None, policy=None):
        return Session(self.system_config(), self.initial_inputs(), goals=self.goals,
                       policy=policy, seed=self.seed if seed is None else seed,
                       initial_state=self.initial_state, state_names=self.state_names)

    def index(self, name):
        try:
            return self.state_names.index(name)
        except ValueError:
            raise ConfigError(f"unknown state name {name!r}") from None


def parse_config(path):
    """Load and validate a config file; raises ConfigError naming field and line."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON (line {exc.lineno}): {exc.msg}") from None
    return config_from_dict(raw, text)


def apply_overrides(raw, overrides):
    """Apply KEY=VALUE overrides (dotted paths, JSON-parsed values) to a raw dict."""
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must have the form KEY=VALUE")
        key, _, value = item.partition("=")
        try:
            value = json.loads(value)
        except json.JSONDecodeError:
            pass  # keep as bare string
        node = raw
        parts = key.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r}: {part} is not an object")
        node[parts[-1]] = value
    return raw


def config_from_dict(raw, text=None):
    ctx = _Ctx(text)
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    system = raw.get("system")
    if not isinstance(system, dict):
        ctx.fail("system", "missing or not an object")

    names = system.get("states")
    if names is None:
        n = system.get("n")
        if not isinstance(n, int) or n < 2:
            ctx.fail("system.n", "need states list or integer n >= 2")
        names = [f"s{i}" for i in range(n)]
    if (not isinstance(names, list) or len(names) < 2
            or len(set(names)) != len(names)):
        ctx.fail("system.states", "must be a list of unique state names")
    n = len(names)

    def index(name, path):
        if name not in names:
            ctx.fail(path, f"unknown state {name!r} (states: {names})")
        return names.index(name)

    edges = system.get("transitions")
    if not isinstance(edges, list) or not edges:
        ctx.fail("system.transitions", "missing or empty edge list")
    T = np.zeros((n, n))
    for k, edge in enumerate(edges):
        if not (isinstance(edge, list) and len(edge) == 2):
            ctx.fail(f"system.transitions[{k}]", "each edge is [from, to]")
        frm, to = edge
        if frm == to:
            ctx.fail(f"system.transitions[{k}]", f"self-loop on {frm!r} not allowed")
        T[index(to, f"system.transitions[{k}]"), index(frm, f"system.transitions[{k}]")] = 1.0

    if "alpha" in system:
        alpha = np.asarray(system["alpha"], dtype=float)
        beta = np.asarray(system.get("beta", np.ones(n)), dtype=float)
        nu = np.asarray(system.get("nu", np.ones(n)), dtype=float)
    else:
        alpha0 = float(system.get("alpha0", 10.0))
        alpha, beta, nu = alpha0 * np.ones(n), np.ones(n), np.ones(n)
    for vec, field in ((alpha, "alpha"), (beta, "beta"), (nu, "nu")):
        if vec.shape != (n,):
            ctx.fail(f"system.{field}", f"needs {n} entries")
        if np.any(vec <= 0):
            ctx.fail(f"system.{field}", "entries must be strictly positive")

    gamma = float(system.get("gamma", DEFAULT_GAMMA))
    dt = float(system.get("dt", DEFAULT_DT))
    if dt <= 0:
        ctx.fail("system.dt", "must be positive")
    initial = system.get("initial_state", names[0])
    initial_index = index(initial, "system.initial_state")

    mod = raw.get("modulation", {})
    if not isinstance(mod, dict):
        ctx.fail("modulation", "must be an object")

    def triples(field):
        m = np.zeros((n, n))
        for k, triple in enumerate(mod.get(field, [])):
            if not (isinstance(triple, list) and len(triple) == 3):
                ctx.fail(f"modulation.{field}[{k}]", "each entry is [from, to, value]")
            frm, to, val = triple
            m[index(to, f"modulation.{field}[{k}]"),
              index(frm, f"modulation.{field}[{k}]")] = float(val)
        return m

    B = triples("bias")
    A = triples("speed")
    g_raw = mod.get("greediness", 1.0)
    g = np.full(n, float(g_raw)) if np.isscalar(g_raw) else np.asarray(g_raw, dtype=float)
    if g.shape != (n,):
        ctx.fail("modulation.greediness", f"needs a scalar or {n} entries")
    off_raw = mod.get("bias_offset", 0.0)
    bias_offset = (np.full(n, float(off_raw)) if np.isscalar(off_raw)
                   else np.asarray(off_raw, dtype=float))
    if bias_offset.shape != (n,):
        ctx.fail("modulation.bias_offset", f"needs a scalar or {n} entries")
    epsilon = float(mod.get("epsilon", 0.0))
    if epsilon < 0:
        ctx.fail("modulation.epsilon", "must be >= 0")
    seed = int(mod.get("seed", 0))

    goals = _parse_goals(raw.get("goals"), names, T, ctx)

    scenario = raw.get("scenario", {})
    if scenario and not isinstance(scenario, dict):
        ctx.fail("scenario", "must be an object")

    output = raw.get("output", {})
    decimation = int(output.get("decimation", DEFAULT_DECIMATION))
    if decimation < 1:
        ctx.fail("output.decimation", "must be >= 1")
    trace_path = output.get("trace")

    return RunConfig(state_names=list(names), alpha=alpha, beta=beta, nu=nu,
                     gamma=gamma, dt=dt, T=T, initial_state=initial_index,
                     B=B, A=A, g=g, bias_offset=bias_offset, epsilon=epsilon,
                     seed=seed, goals=goals, scenario=scenario,
                     decimation=decimation, trace_path=trace_path)


def _parse_goals(section, names, T, ctx):
    if not section:
        return None
    if not isinstance(section, dict):
        ctx.fail("goals", "must be an object")
    d = section.get("dimension")
    if not isinstance(d, int) or d < 1:
        ctx.fail("goals.dimension", "must be a positive integer")
    mode = section.get("combination", "moment")
    if mode not in ("moment", "product"):
        ctx.fail("goals.combination", "must be 'moment' or 'product'")

    def cov_of(spec, path):
        if "cov" in spec:
            cov = np.asarray(spec["cov"], dtype=float)
        elif "cov_diag" in spec:
            diag = np.asarray(spec["cov_diag"], dtype=float)
            if diag.shape != (d,):
                ctx.fail(path, f"cov_diag needs {d} entries")
            cov = np.diag(diag)
        else:
            cov = np.eye(d) * 1e-4
        if cov.shape != (d, d):
            ctx.fail(path, f"covariance must be {d}x{d}")
        return cov

    goal_map = {}
    for name, spec in section.get("states", {}).items():
        if name not in names:
            ctx.fail(f"goals.states.{name}", "unknown state")
        mean = np.asarray(spec.get("mean", np.zeros(d)), dtype=float)
        if mean.shape != (d,):
            ctx.fail(f"goals.states.{name}", f"mean needs {d} entries")
        goal_map[names.index(name)] = MotionGoal(mean=mean, cov=cov_of(spec, f"goals.states.{name}"))

    missing = [names[i] for i in range(len(names))
               if i not in goal_map]
    if missing:
        ctx.fail("goals.states", f"states without a goal: {missing}")

    via = {}
    for k, spec in enumerate(section.get("primitives", [])):
        path = f"goals.primitives[{k}]"
        frm, to = spec.get("from"), spec.get("to")
        if frm not in names or to not in names:
            ctx.fail(path, "from/to must be state names")
        i, j = names.index(frm), names.index(to)
        if not T[j, i]:
            ctx.fail(path, f"no transition {frm} -> {to} in the graph")
        knots = []
        for knot in spec.get("knots", []):
            phase = float(knot.get("phase", -1.0))
            if not 0.0 < phase < 1.0:
                ctx.fail(path, "interior knot phases must lie strictly in (0, 1)")
            mean = np.asarray(knot.get("mean"), dtype=float)
            if mean.shape != (d,):
                ctx.fail(path, f"knot mean needs {d} entries")
            knots.append((phase, mean, cov_of(knot, path)))
        via[(j, i)] = knots

    # every transition gets a primitive; endpoint knots come from the state
    # goals so boundary consistency holds by construction
    primitives = {}
    n = len(names)
    for j in range(n):
        for i in range(n):
            if not T[j, i]:
                continue
            start, end = goal_map[i], goal_map[j]
            knots = [(0.0, start.mean, start.cov)] + via.get((j, i), []) \
                + [(1.0, end.mean, end.cov)]
            prim = TransitionPrimitive.from_knots(knots)
            prim.check_boundaries(start, end)
            primitives[(j, i)] = prim

    return GoalSet(dimension=d, goals=goal_map, primitives=primitives, mode=mode)
