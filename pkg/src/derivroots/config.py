"""Experiment configuration: JSON parsing with exhaustive validation."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from .anticonc import KSchedule, k_schedule
from .errors import ConfigError, ValidationError
from .sampler import RootDistribution, dist_from_spec, dist_to_spec

EXPERIMENTS = ("convergence_sweep", "anticonc_sweep", "potential_check",
               "log_field_scan")

_KNOWN_KEYS = {
    "experiment", "distribution", "n_values", "k_schedule", "epsilon",
    "trials", "seeds", "z", "y_mode", "annulus", "grid_step", "bump_radius",
    "mnv_p", "mnv_B", "output_dir", "master_seed",
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    distribution: RootDistribution
    n_values: Tuple[int, ...]
    k_schedule: KSchedule = field(default_factory=KSchedule.paper)
    epsilon: float = 0.1
    trials: int = 20
    seeds: int = 5
    z: complex = 0j
    y_mode: str = "transform"
    annulus_r: Optional[float] = None
    annulus_R: Optional[float] = None
    quad_nodes: int = 4096
    grid_step: float = 0.05
    bump_radius: float = 3.0
    mnv_p: float = 0.5
    mnv_B: float = 1.0
    output_dir: str = "runs"
    master_seed: int = 0

    def to_dict(self) -> dict:
        ks = {"mode": self.k_schedule.mode}
        if self.k_schedule.k0 is not None:
            ks["k0"] = self.k_schedule.k0
        if self.k_schedule.beta is not None:
            ks["beta"] = self.k_schedule.beta
        return {
            "experiment": self.experiment,
            "distribution": dist_to_spec(self.distribution),
            "n_values": list(self.n_values),
            "k_schedule": ks,
            "epsilon": self.epsilon,
            "trials": self.trials,
            "seeds": self.seeds,
            "z": [self.z.real, self.z.imag],
            "y_mode": self.y_mode,
            "annulus": {"r": self.annulus_r, "R": self.annulus_R,
                        "quad_nodes": self.quad_nodes},
            "grid_step": self.grid_step,
            "bump_radius": self.bump_radius,
            "mnv_p": self.mnv_p,
            "mnv_B": self.mnv_B,
            "output_dir": self.output_dir,
            "master_seed": self.master_seed,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True,
                           separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def with_overrides(self, output_dir: Optional[str] = None,
                       master_seed: Optional[int] = None) -> "ExperimentConfig":
        cfg = self
        if output_dir is not None:
            cfg = replace(cfg, output_dir=output_dir)
        if master_seed is not None:
            cfg = replace(cfg, master_seed=master_seed)
        return cfg


def validate_config(text: str) -> Tuple[Optional[ExperimentConfig], list]:
    """Parse and validate, returning (config-or-None, list of all problems)."""
    problems = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return None, [f"not valid JSON: {exc}"]
    if not isinstance(doc, dict):
        return None, ["top level must be a JSON object"]

    for key in sorted(set(doc) - _KNOWN_KEYS):
        problems.append(f"unknown field '{key}'")

    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        problems.append(
            f"experiment must be one of {', '.join(EXPERIMENTS)}; got {experiment!r}")

    dist = None
    if "distribution" not in doc:
        problems.append("missing field 'distribution'")
    else:
        try:
            dist = dist_from_spec(doc["distribution"])
        except (ValidationError, KeyError, TypeError, ValueError) as exc:
            problems.append(f"distribution: {exc}")

    n_values: Tuple[int, ...] = ()
    raw_n = doc.get("n_values")
    if not isinstance(raw_n, list) or not raw_n or \
            not all(isinstance(v, int) and v >= 1 for v in raw_n):
        problems.append("n_values must be a non-empty list of positive integers")
    else:
        if any(b <= a for a, b in zip(raw_n, raw_n[1:])):
            problems.append("n_values not increasing")
        else:
            n_values = tuple(raw_n)

    schedule = KSchedule.paper()
    if "k_schedule" in doc:
        ks = doc["k_schedule"]
        if not isinstance(ks, dict) or "mode" not in ks:
            problems.append("k_schedule must be an object with a 'mode'")
        else:
            try:
                schedule = KSchedule(mode=ks.get("mode"),
                                     k0=ks.get("k0"), beta=ks.get("beta"))
            except ValidationError as exc:
                problems.append(f"k_schedule: {exc}")
    if n_values:
        try:
            k_smallest = k_schedule(min(n_values), schedule)
            if k_smallest >= min(n_values):
                problems.append("k_schedule yields k >= n for the smallest n")
        except ValidationError as exc:
            problems.append(f"k_schedule: {exc}")

    def number(key, default, check, desc):
        val = doc.get(key, default)
        if not isinstance(val, (int, float)) or isinstance(val, bool) \
                or not check(val):
            problems.append(f"{key} must be {desc}; got {val!r}")
            return default
        return val

    epsilon = float(number("epsilon", 0.1, lambda v: v > 0, "a positive number"))
    trials = number("trials", 20, lambda v: isinstance(v, int) and v >= 1,
                    "a positive integer")
    seeds = number("seeds", 5, lambda v: isinstance(v, int) and v >= 1,
                   "a positive integer")
    grid_step = float(number("grid_step", 0.05, lambda v: v > 0,
                             "a positive number"))
    bump_radius = float(number("bump_radius", 3.0, lambda v: v > 0,
                               "a positive number"))
    mnv_p = float(number("mnv_p", 0.5, lambda v: 0 < v < 1, "in (0, 1)"))
    mnv_B = float(number("mnv_B", 1.0, lambda v: v > 0, "a positive number"))
    master_seed = number("master_seed", 0,
                         lambda v: isinstance(v, int), "an integer")

    z = 0j
    if "z" in doc:
        zv = doc["z"]
        if isinstance(zv, (int, float)) and not isinstance(zv, bool):
            z = complex(zv)
        elif isinstance(zv, list) and len(zv) == 2 and \
                all(isinstance(c, (int, float)) for c in zv):
            z = complex(zv[0], zv[1])
        else:
            problems.append("z must be a number or a [re, im] pair")

    y_mode = doc.get("y_mode", "transform")
    if y_mode not in ("transform", "direct"):
        problems.append("y_mode must be 'transform' or 'direct'")

    annulus_r = annulus_R = None
    quad_nodes = 4096
    if "annulus" in doc:
        ann = doc["annulus"]
        if not isinstance(ann, dict):
            problems.append("annulus must be an object")
        else:
            for key in sorted(set(ann) - {"r", "R", "quad_nodes"}):
                problems.append(f"annulus: unknown field '{key}'")
            annulus_r = ann.get("r")
            annulus_R = ann.get("R")
            quad_nodes = ann.get("quad_nodes", 4096)
            for name, val in (("annulus.r", annulus_r), ("annulus.R", annulus_R)):
                if val is not None and (not isinstance(val, (int, float))
                                        or isinstance(val, bool) or val <= 0):
                    problems.append(f"{name} must be a positive number")
            if annulus_r is not None and annulus_R is not None and \
                    not annulus_r < annulus_R:
                problems.append("annulus requires r < R")
            if not isinstance(quad_nodes, int) or quad_nodes <= 0 or \
                    (quad_nodes & (quad_nodes - 1)) != 0:
                problems.append("annulus.quad_nodes must be a positive power of two")

    output_dir = doc.get("output_dir", "runs")
    if not isinstance(output_dir, str) or not output_dir:
        problems.append("output_dir must be a non-empty string")

    if problems or dist is None or not n_values:
        return None, problems

    cfg = ExperimentConfig(
        experiment=experiment, distribution=dist, n_values=n_values,
        k_schedule=schedule, epsilon=epsilon, trials=trials, seeds=seeds,
        z=z, y_mode=y_mode,
        annulus_r=None if annulus_r is None else float(annulus_r),
        annulus_R=None if annulus_R is None else float(annulus_R),
        quad_nodes=quad_nodes, grid_step=grid_step, bump_radius=bump_radius,
        mnv_p=mnv_p, mnv_B=mnv_B, output_dir=output_dir,
        master_seed=master_seed)
    return cfg, []


def parse_config(text: str) -> ExperimentConfig:
    """Parse a JSON experiment document; raises ConfigError carrying every
    validation problem, not just the first."""
    cfg, problems = validate_config(text)
    if problems:
        raise ConfigError(problems)
    assert cfg is not None
    return cfg
