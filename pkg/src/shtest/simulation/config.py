"""Declarative simulation grids.

A config file (YAML, or JSON with the same schema) looks like::

    seed: 20180417        # master seed
    reps: 200             # replicates per cell
    full_reps: 1000       # used instead of reps with --full
    alpha: 0.05
    workers: 1
    methods:
      - {method: sh, label: sh_n2, m: n/2}
      - {method: simes}
      - {method: lopes, k: 10}
    scenarios:
      - id: ar_null
        n: [20, 50]       # shorthand for n_x = n_y
        p: 600
        cov: {kind: ar, rho: [0.3, 0.75, 0.95]}
        signal: null
      - id: ar_power
        n: 50
        p: 600
        cov: {kind: ar, rho: 0.5}
        signal: {beta: [0.85, 0.95, 0.99], norm_factor: 2.5}

Any list-valued leaf of a scenario is a grid axis; a scenario expands to the
Cartesian product of its axes in the order the keys appear. ``signal`` takes
either ``norm_sq`` or ``norm_factor`` (the latter through
:func:`target_norm_sq`). Other scenario keys: ``n_x``, ``n_y``,
``noise`` (none, laplace, exponential), ``equal_cov_groups``,
``scale_factor_group1`` and ``signal.seed``.
"""

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import yaml

from ..core.rng import DEFAULT_SEED, RngState
from ..errors import ConfigInvalid, ParseError
from .covariance import CovarianceSpec
from .engine import MethodSpec, ScenarioSpec
from .signal import SignalSpec, target_norm_sq

_SCENARIO_KEYS = {
    "id", "n", "n_x", "n_y", "p", "cov", "signal", "noise", "equal_cov_groups", "scale_factor_group1",
}
_METHOD_KEYS = {"method", "label", "m", "B", "L", "k", "equal_cov", "combiner"}


@dataclass(frozen=True)
class Cell:
    index: int
    scenario: ScenarioSpec
    seed: int


@dataclass(frozen=True)
class SimulationConfig:
    seed: int
    reps: int
    full_reps: int
    alpha: float
    workers: int
    methods: tuple
    cells: tuple


def load_config_file(path):
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        mark = getattr(exc, "problem_mark", None)
        line = getattr(exc, "lineno", None) or (mark.line + 1 if mark is not None else None)
        raise ParseError(f"cannot parse config: {exc}", path=path, line=line) from None


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _unflatten(flat):
    out = {}
    for key, v in flat.items():
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = v
    return out


def expand_grid(entry):
    """Expand list-valued leaves into ``(suffix, cell_dict)`` pairs."""
    flat = _flatten(entry)
    axes = [k for k, v in flat.items() if isinstance(v, list)]
    for combo in itertools.product(*(list(enumerate(flat[k])) for k in axes)):
        cell = dict(flat)
        cell.update((k, v) for k, (_, v) in zip(axes, combo))
        suffix = "_".join(_label(k, i, v) for k, (i, v) in zip(axes, combo))
        yield suffix, _unflatten(cell)


def _label(key, i, v):
    # scalar values name the cell; structured ones use their position
    name = key.split(".")[-1]
    if isinstance(v, (str, int, float)) and not isinstance(v, bool):
        return f"{name}{v}"
    return f"{name}{i}"


def build_scenario(d, scenario_id):
    unknown = set(d) - _SCENARIO_KEYS
    if unknown:
        raise ConfigInvalid(f"{scenario_id}: unknown scenario keys {sorted(unknown)}")
    n_x = d.get("n_x", d.get("n"))
    n_y = d.get("n_y", d.get("n"))
    if n_x is None or n_y is None or "p" not in d or "cov" not in d:
        raise ConfigInvalid(f"{scenario_id}: scenarios need n (or n_x and n_y), p and cov")
    p = int(d["p"])
    cov_d = dict(d["cov"])
    cov = CovarianceSpec(
        kind=cov_d.pop("kind", None),
        p=p,
        rho=float(cov_d.pop("rho", 0.0)),
        block_size=cov_d.pop("block_size", None),
    )
    if cov_d:
        raise ConfigInvalid(f"{scenario_id}: unknown cov keys {sorted(cov_d)}")
    signal = None
    if d.get("signal"):
        s = dict(d["signal"])
        if "norm_sq" in s:
            norm_sq = float(s.pop("norm_sq"))
            s.pop("norm_factor", None)
        else:
            norm_sq = target_norm_sq(int(n_x), int(n_y), float(s.pop("norm_factor", 2.5)))
        signal = SignalSpec(p=p, beta=float(s.pop("beta", 0.0)), norm_sq=norm_sq, seed=s.pop("seed", None))
        if s:
            raise ConfigInvalid(f"{scenario_id}: unknown signal keys {sorted(s)}")
    return ScenarioSpec(
        n_x=int(n_x),
        n_y=int(n_y),
        cov=cov,
        signal=signal,
        noise=d.get("noise") or "none",
        equal_cov_groups=bool(d.get("equal_cov_groups", True)),
        scale_factor_group1=float(d.get("scale_factor_group1", 2.0)),
        scenario_id=scenario_id,
    )


def build_method(d):
    unknown = set(d) - _METHOD_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown method keys {sorted(unknown)}")
    return MethodSpec(**d)


def parse_config(raw, seed=None):
    """Validate a raw config mapping and expand its scenarios into cells.

    Cell ``i`` (in file order, after expansion) runs with seed
    ``RngState(master_seed).derive(i).seed``, so a cell's results depend only
    on the master seed and its position.
    """
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a mapping")
    master = int(seed if seed is not None else raw.get("seed", DEFAULT_SEED))
    try:
        methods = tuple(build_method(dict(m)) for m in raw.get("methods") or [])
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"invalid method entry: {exc}") from None
    if not methods:
        raise ConfigInvalid("config lists no methods")
    cells = []
    root = RngState(master)
    for k, entry in enumerate(raw.get("scenarios") or []):
        base = str(entry.get("id", f"scenario{k}"))
        for suffix, d in expand_grid(entry):
            d.pop("id", None)
            sid = f"{base}_{suffix}" if suffix else base
            try:
                scn = build_scenario(d, sid)
            except (ValueError, TypeError) as exc:
                msg = str(exc)
                raise ConfigInvalid(msg if msg.startswith(sid) else f"cell {sid}: {msg}") from None
            cells.append(Cell(len(cells), scn, root.derive(len(cells)).seed))
    if not cells:
        raise ConfigInvalid("config lists no scenarios")
    ids = [c.scenario.scenario_id for c in cells]
    if len(set(ids)) != len(ids):
        raise ConfigInvalid("scenario ids are not unique after grid expansion")
    return SimulationConfig(
        seed=master,
        reps=int(raw.get("reps", 200)),
        full_reps=int(raw.get("full_reps", 1000)),
        alpha=float(raw.get("alpha", 0.05)),
        workers=int(raw.get("workers", 1)),
        methods=methods,
        cells=tuple(cells),
    )
