"""JSON experiment configs: schema checks, object resolution, defaults.

One config document drives one run.  Parse errors always name the path of
the offending field so a config can be fixed without reading this file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from .errors import ConfigError, OrliczLabError
from .space import (MeasurableFn, MeasureSpace, SubAlgebra,
                    SymbolicAtomSequence, build_atomic_space,
                    build_rotation_space, build_symmetric_space, default_n_max,
                    fn_from_array, space_from_config)
from .expr import parse_expr
from .young import YoungFunction, from_config as young_from_config

SCHEMA_VERSION = "1"
COMMANDS = ("young", "norm", "condexp", "opnorm", "criteria", "essnorm",
            "gch", "verify-all")
BUILDERS = ("symmetric", "rotation", "atomic", "symbolic")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    seed: int
    young_specs: dict[str, YoungFunction] = field(default_factory=dict)
    space: Optional[MeasureSpace] = None
    alg: Optional[SubAlgebra] = None
    symbolic: Optional[SymbolicAtomSequence] = None
    weight: Optional[MeasurableFn] = None
    params: dict = field(default_factory=dict)
    output_dir: Optional[str] = None

    @property
    def atom_source(self):
        """What the criterion checks consume: the sequence, or (space, alg)."""
        if self.symbolic is not None:
            return self.symbolic
        return (self.space, self.alg)

    def young(self, name: str, where: str = "params") -> YoungFunction:
        if name not in self.young_specs:
            known = ", ".join(sorted(self.young_specs)) or "none defined"
            raise ConfigError(f"{where}: unknown Young spec {name!r} ({known})")
        return self.young_specs[name]

    def young_default(self, key: str, fallback: str,
                      required: bool = True) -> Optional[YoungFunction]:
        """Resolve params[key] as a spec name, else the conventional name,
        else the first spec in file order."""
        name = self.params.get(key)
        if name is not None:
            return self.young(str(name), f"params.{key}")
        if fallback in self.young_specs:
            return self.young_specs[fallback]
        if self.young_specs:
            return next(iter(self.young_specs.values()))
        if required:
            raise ConfigError(f"young: command needs a spec for {key!r}")
        return None


def _expect(doc: Mapping, key: str, kinds, path: str, required: bool = False,
            default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    val = doc[key]
    if kinds is not None and not isinstance(val, kinds):
        want = kinds[0].__name__ if isinstance(kinds, tuple) else kinds.__name__
        raise ConfigError(f"{path}.{key}: expected {want}, "
                          f"got {type(val).__name__}")
    return val


def _positive_int(doc: Mapping, key: str, path: str, required: bool = False,
                  default=None) -> Optional[int]:
    val = _expect(doc, key, (int,), path, required, default)
    if val is not None and (isinstance(val, bool) or val < 1):
        raise ConfigError(f"{path}.{key}: must be a positive integer")
    return val


def _build_space(spec: Mapping, path: str):
    """Returns (space, alg, symbolic); exactly one of the two forms is set."""
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{path}: expected an object")
    builder = spec.get("builder")
    if builder is None:
        space, alg = space_from_config(spec, path)
        return space, alg, None
    if builder not in BUILDERS:
        raise ConfigError(f"{path}.builder: must be one of {BUILDERS}")
    try:
        if builder == "symmetric":
            n = _positive_int(spec, "n_cells", path, required=True)
            return (*build_symmetric_space(n), None)
        if builder == "rotation":
            n = _positive_int(spec, "n", path, required=True)
            k = _positive_int(spec, "cells_per_interval", path, required=True)
            return (*build_rotation_space(n, k), None)
        if builder == "atomic":
            masses = _expect(spec, "masses", (list,), path, required=True)
            return (*build_atomic_space([float(m) for m in masses]), None)
        mass_fn = _expect(spec, "mass_fn", (str,), path, required=True)
        value_fn = _expect(spec, "value_fn", (str,), path, required=True)
        n_max = _positive_int(spec, "n_max", path, default=None)
        seq = SymbolicAtomSequence(mass_fn, value_fn,
                                   n_max=n_max or default_n_max())
        return None, None, seq
    except ConfigError:
        raise
    except (OrliczLabError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _build_weight(spec: Mapping, space: MeasureSpace, path: str) -> MeasurableFn:
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{path}: expected an object")
    forms = [k for k in ("values", "constant", "expression") if k in spec]
    if len(forms) != 1:
        raise ConfigError(f"{path}: give exactly one of values | constant "
                          "| expression")
    form = forms[0]
    try:
        if form == "values":
            vals = np.asarray([float(v) for v in spec["values"]])
            if vals.size != len(space.cells):
                raise ConfigError(
                    f"{path}.values: expected {len(space.cells)} entries, "
                    f"got {vals.size}")
            return fn_from_array(space, vals)
        if form == "constant":
            return fn_from_array(
                space, np.full(len(space.cells), float(spec["constant"])))
        coords = [c.coord for c in space.cells]
        if any(c is None for c in coords):
            raise ConfigError(f"{path}.expression: space has cells without "
                              "coordinates; use values instead")
        # the grammar's free variable n binds to the cell coordinate here
        expr = parse_expr(str(spec["expression"]))
        return fn_from_array(space, expr(np.asarray(coords, dtype=float)))
    except ConfigError:
        raise
    except (OrliczLabError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{form}: {exc}") from None


def parse_config(doc: Mapping, seed: Optional[int] = None,
                 output_dir: Optional[str] = None) -> ExperimentConfig:
    if not isinstance(doc, Mapping):
        raise ConfigError("config: expected a JSON object")
    version = _expect(doc, "schema_version", (str,), "config", required=True)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config.schema_version: expected "
                          f"{SCHEMA_VERSION!r}, got {version!r}")
    command = _expect(doc, "command", (str,), "config", required=True)
    if command not in COMMANDS:
        raise ConfigError(f"config.command: must be one of {COMMANDS}")
    if seed is None:
        seed = _expect(doc, "seed", (int,), "config", default=0)
        if isinstance(seed, bool) or seed < 0:
            raise ConfigError("config.seed: must be a non-negative integer")
    if output_dir is None:
        output_dir = _expect(doc, "output_dir", (str,), "config")

    young_specs: dict[str, YoungFunction] = {}
    raw_young = _expect(doc, "young", (Mapping,), "config", default={})
    for name, sub in raw_young.items():
        young_specs[str(name)] = young_from_config(sub, f"young.{name}")

    space = alg = symbolic = weight = None
    if "space" in doc:
        space, alg, symbolic = _build_space(doc["space"], "space")
    if "weight" in doc:
        if symbolic is not None:
            raise ConfigError("weight: a symbolic space already carries its "
                              "weight in value_fn")
        if space is None:
            raise ConfigError("weight: no space to define the weight on")
        weight = _build_weight(doc["weight"], space, "weight")

    params = _expect(doc, "params", (Mapping,), "config", default={})
    return ExperimentConfig(command=command, seed=int(seed),
                            young_specs=young_specs, space=space, alg=alg,
                            symbolic=symbolic, weight=weight,
                            params=dict(params), output_dir=output_dir)


def load_config(path: str, seed: Optional[int] = None,
                output_dir: Optional[str] = None) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from None
    return parse_config(doc, seed=seed, output_dir=output_dir)
