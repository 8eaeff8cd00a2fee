"""Run configuration: YAML schema, validation, canonical serialization.

The config format is a small YAML document. Unknown keys are rejected at
every level (schema errors name the offending key); value constraints are
reported as semantic errors. A parsed RunConfig is fully resolved: every
default is materialized, so serialize/parse round-trips exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import yaml

from .annealing import VARIANTS, AnnealingSchedule
from .errors import SchemaError, SemanticError
from .objectives import Objective, from_config as objective_from_config

MODES = ("ssa", "deterministic", "langevin")


@dataclass(frozen=True)
class Exclusion:
    """Region removed from the initialization box (ball or axis-aligned box)."""

    kind: str
    center: tuple = ()
    radius: float = 0.0
    bounds: tuple = ()

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            c = np.asarray(self.center)
            return np.linalg.norm(x - c, axis=-1) <= self.radius
        b = np.asarray(self.bounds)
        return np.all((x >= b[:, 0]) & (x <= b[:, 1]), axis=-1)


@dataclass(frozen=True)
class SweepSpec:
    Ns: tuple
    betas: tuple
    n_trials: int = 40


@dataclass(frozen=True)
class RunConfig:
    objective_name: str
    dim: int
    objective_params: tuple  # sorted (key, value) pairs
    mode: str
    schedule: AnnealingSchedule
    N: int
    h: float
    n_T: int
    seed: int
    record_stride: int
    init_box: tuple  # ((lo, hi), ...) of length dim
    exclusion: Optional[Exclusion]
    initial_masses: Optional[tuple]  # None means uniform 1/N
    sweep: Optional[SweepSpec] = None

    def objective(self) -> Objective:
        return objective_from_config(
            self.objective_name, self.dim, dict(self.objective_params)
        )

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def default_record_stride(n_T: int) -> int:
    # keeps trajectories plot-sized (~2000 recorded points)
    return max(1, n_T // 2000)


# ---------------------------------------------------------------------------
# Parsing


def _require_mapping(node, where):
    if not isinstance(node, dict):
        raise SchemaError(f"{where} must be a mapping")
    return node


def _check_keys(node, allowed, where):
    for key in node:
        if key not in allowed:
            raise SchemaError(f"unknown key {key!r} in {where}")


def _get_int(node, key, where, default=None, required=False):
    if key not in node or node[key] is None:
        if required:
            raise SchemaError(f"missing required key {key!r} in {where}")
        return default
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"key {key!r} in {where} must be an integer")
    return v


def _get_float(node, key, where, default=None, required=False):
    if key not in node or node[key] is None:
        if required:
            raise SchemaError(f"missing required key {key!r} in {where}")
        return default
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"key {key!r} in {where} must be a number")
    return float(v)


def _get_str(node, key, where, default=None, required=False):
    if key not in node or node[key] is None:
        if required:
            raise SchemaError(f"missing required key {key!r} in {where}")
        return default
    v = node[key]
    if not isinstance(v, str):
        raise SchemaError(f"key {key!r} in {where} must be a string")
    return v


def _parse_objective(node):
    if isinstance(node, str):
        return node, {}
    node = _require_mapping(node, "objective")
    _check_keys(node, {"name", "params"}, "objective")
    name = _get_str(node, "name", "objective", required=True)
    params = node.get("params") or {}
    params = _require_mapping(params, "objective.params")
    out = {}
    for k, v in params.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"objective parameter {k!r} must be a number")
        out[str(k)] = float(v)
    return name, out


def _parse_schedule(node) -> AnnealingSchedule:
    node = _require_mapping(node, "schedule")
    _check_keys(node, {"variant", "alpha", "beta", "sharpness"}, "schedule")
    variant = _get_str(node, "variant", "schedule", required=True)
    if variant not in VARIANTS:
        raise SemanticError(f"unknown schedule variant {variant!r}")
    try:
        return AnnealingSchedule(
            variant=variant,
            alpha=_get_float(node, "alpha", "schedule", default=1.0),
            beta=_get_float(node, "beta", "schedule", default=1.0),
            sharpness=_get_float(node, "sharpness", "schedule", default=1000.0),
        )
    except ValueError as exc:
        raise SemanticError(str(exc)) from exc


def _parse_box(node, dim, where):
    if node is None:
        return None
    if not isinstance(node, (list, tuple)) or not node:
        raise SchemaError(f"{where} must be a non-empty list of [lo, hi] pairs")
    pairs = node
    if len(node) == 2 and all(isinstance(v, (int, float)) for v in node):
        pairs = [node] * dim  # single pair broadcasts over dimensions
    out = []
    for pair in pairs:
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)
        ):
            raise SchemaError(f"{where} entries must be [lo, hi] number pairs")
        lo, hi = float(pair[0]), float(pair[1])
        if not lo < hi:
            raise SemanticError(f"{where} has an empty interval [{lo}, {hi}]")
        out.append((lo, hi))
    if len(out) != dim:
        raise SemanticError(f"{where} has {len(out)} intervals for dim={dim}")
    return tuple(out)


def _parse_exclusion(node, dim) -> Optional[Exclusion]:
    if node is None:
        return None
    node = _require_mapping(node, "init.exclusion")
    kind = _get_str(node, "kind", "init.exclusion", required=True)
    if kind == "ball":
        _check_keys(node, {"kind", "center", "radius"}, "init.exclusion")
        center = node.get("center")
        if not isinstance(center, (list, tuple)) or len(center) != dim:
            raise SchemaError("init.exclusion.center must be a list of length dim")
        radius = _get_float(node, "radius", "init.exclusion", required=True)
        if radius <= 0:
            raise SemanticError("init.exclusion.radius must be > 0")
        return Exclusion(kind="ball", center=tuple(float(c) for c in center), radius=radius)
    if kind == "box":
        _check_keys(node, {"kind", "bounds"}, "init.exclusion")
        bounds = _parse_box(node.get("bounds"), dim, "init.exclusion.bounds")
        if bounds is None:
            raise SchemaError("missing required key 'bounds' in init.exclusion")
        return Exclusion(kind="box", bounds=bounds)
    raise SemanticError(f"unknown exclusion kind {kind!r}")


def _parse_sweep(node) -> Optional[SweepSpec]:
    if node is None:
        return None
    node = _require_mapping(node, "sweep")
    _check_keys(node, {"Ns", "betas", "n_trials"}, "sweep")
    for key in ("Ns", "betas"):
        if key not in node or not isinstance(node[key], (list, tuple)) or not node[key]:
            raise SchemaError(f"sweep.{key} must be a non-empty list")
    Ns = tuple(int(v) for v in node["Ns"])
    betas = tuple(float(v) for v in node["betas"])
    if any(n < 1 for n in Ns):
        raise SemanticError("sweep.Ns entries must be >= 1")
    if any(b <= 0 for b in betas):
        raise SemanticError("sweep.betas entries must be > 0")
    n_trials = _get_int(node, "n_trials", "sweep", default=40)
    if n_trials < 1:
        raise SemanticError("sweep.n_trials must be >= 1")
    return SweepSpec(Ns=Ns, betas=betas, n_trials=n_trials)


_TOP_KEYS = {
    "objective", "dim", "mode", "schedule", "N", "h", "n_T",
    "seed", "record_stride", "init", "sweep",
}


def parse_and_validate(text: str) -> RunConfig:
    """Parse config text into a fully-resolved, validated RunConfig."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"config is not valid YAML: {exc}") from exc
    raw = _require_mapping(raw, "config")
    _check_keys(raw, _TOP_KEYS, "config")

    name, params = _parse_objective(raw.get("objective"))
    if raw.get("objective") is None:
        raise SchemaError("missing required key 'objective' in config")
    dim = _get_int(raw, "dim", "config", required=True)
    if dim < 1:
        raise SemanticError("dim must be >= 1")

    mode = _get_str(raw, "mode", "config", default="ssa")
    if mode not in MODES:
        raise SemanticError(f"unknown mode {mode!r}")

    if raw.get("schedule") is not None:
        schedule = _parse_schedule(raw["schedule"])
    elif mode == "deterministic":
        schedule = AnnealingSchedule(variant="zero")
    else:
        raise SchemaError("missing required key 'schedule' in config")
    if mode == "deterministic" and schedule.variant != "zero":
        raise SemanticError("mode 'deterministic' requires schedule variant 'zero'")
    if mode == "langevin" and schedule.variant != "constant":
        raise SemanticError("mode 'langevin' requires schedule variant 'constant'")

    n_agents = _get_int(raw, "N", "config", required=True)
    if n_agents < 1:
        raise SemanticError("N must be >= 1")
    h = _get_float(raw, "h", "config", required=True)
    if not np.isfinite(h) or h <= 0:
        raise SemanticError("h must be a positive finite number")
    n_T = _get_int(raw, "n_T", "config", required=True)
    if n_T < 0:
        raise SemanticError("n_T must be >= 0")
    seed = _get_int(raw, "seed", "config", required=True)
    record_stride = _get_int(raw, "record_stride", "config", default=default_record_stride(n_T))
    if record_stride < 1:
        raise SemanticError("record_stride must be >= 1")

    try:
        objective = objective_from_config(name, dim, params)
    except (ValueError, TypeError) as exc:
        raise SemanticError(f"objective: {exc}") from exc

    init = raw.get("init") or {}
    init = _require_mapping(init, "init")
    _check_keys(init, {"box", "exclusion", "masses"}, "init")
    box = _parse_box(init.get("box"), dim, "init.box")
    if box is None:
        box = tuple(objective.box)
    exclusion = _parse_exclusion(init.get("exclusion"), dim)
    if exclusion is not None:
        _check_exclusion_leaves_room(box, exclusion)

    masses = init.get("masses", "uniform")
    if masses == "uniform" or masses is None:
        initial_masses = None
    elif isinstance(masses, (list, tuple)):
        if len(masses) != n_agents:
            raise SemanticError(f"init.masses has {len(masses)} entries for N={n_agents}")
        vals = []
        for v in masses:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
                raise SemanticError("init.masses entries must be positive numbers")
            vals.append(float(v))
        if abs(sum(vals) - 1.0) > 1e-12:
            raise SemanticError("init.masses must sum to 1 within 1e-12")
        initial_masses = tuple(vals)
    else:
        raise SchemaError("init.masses must be 'uniform' or a list of numbers")

    return RunConfig(
        objective_name=name,
        dim=dim,
        objective_params=tuple(sorted(params.items())),
        mode=mode,
        schedule=schedule,
        N=n_agents,
        h=h,
        n_T=n_T,
        seed=seed,
        record_stride=record_stride,
        init_box=box,
        exclusion=exclusion,
        initial_masses=initial_masses,
        sweep=_parse_sweep(raw.get("sweep")),
    )


def _check_exclusion_leaves_room(box, exclusion: Exclusion):
    b = np.asarray(box, dtype=float)
    if exclusion.kind == "ball":
        c = np.asarray(exclusion.center)
        # farthest box corner from the center; if even that is inside the
        # ball the exclusion swallows the whole box
        far = np.maximum(np.abs(b[:, 0] - c), np.abs(b[:, 1] - c))
        if float(np.linalg.norm(far)) <= exclusion.radius:
            raise SemanticError("init.exclusion ball swallows the whole init box")
    else:
        e = np.asarray(exclusion.bounds, dtype=float)
        if np.all((e[:, 0] <= b[:, 0]) & (e[:, 1] >= b[:, 1])):
            raise SemanticError("init.exclusion box swallows the whole init box")


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_and_validate(fh.read())


# ---------------------------------------------------------------------------
# Serialization


def to_dict(config: RunConfig) -> dict:
    """Canonical plain-data form (used for serialization and hashing)."""
    out = {
        "objective": {
            "name": config.objective_name,
            "params": {k: v for k, v in config.objective_params},
        },
        "dim": config.dim,
        "mode": config.mode,
        "schedule": {
            "variant": config.schedule.variant,
            "alpha": config.schedule.alpha,
            "beta": config.schedule.beta,
            "sharpness": config.schedule.sharpness,
        },
        "N": config.N,
        "h": config.h,
        "n_T": config.n_T,
        "seed": config.seed,
        "record_stride": config.record_stride,
        "init": {
            "box": [list(pair) for pair in config.init_box],
            "exclusion": None,
            "masses": "uniform" if config.initial_masses is None
            else list(config.initial_masses),
        },
        "sweep": None,
    }
    if config.exclusion is not None:
        if config.exclusion.kind == "ball":
            out["init"]["exclusion"] = {
                "kind": "ball",
                "center": list(config.exclusion.center),
                "radius": config.exclusion.radius,
            }
        else:
            out["init"]["exclusion"] = {
                "kind": "box",
                "bounds": [list(pair) for pair in config.exclusion.bounds],
            }
    if config.sweep is not None:
        out["sweep"] = {
            "Ns": list(config.sweep.Ns),
            "betas": list(config.sweep.betas),
            "n_trials": config.sweep.n_trials,
        }
    return out


def serialize(config: RunConfig) -> str:
    return yaml.safe_dump(to_dict(config), sort_keys=True)


def config_hash(config: RunConfig) -> str:
    payload = json.dumps(to_dict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]
