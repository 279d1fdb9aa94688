"""Finite measure spaces, partition sub-algebras, conditional expectation.

A space is a finite list of positively weighted cells.  Cells tagged
sigma-atom model genuine atoms; cells tagged fragment discretize the
non-atomic part, and refining the fragment count is the convergence knob.
Infinite atom families are handled separately by SymbolicAtomSequence,
which materializes finite truncations of a closed-form tail.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ArgumentError, ConfigError
from .expr import SymbolicExpr, parse_expr

CELL_KINDS = ("sigma-atom", "fragment")
BLOCK_KINDS = ("a-atom", "carrier")

DEFAULT_N_MAX = 10_000


def default_n_max() -> int:
    raw = os.environ.get("ORLICZ_LAB_NMAX")
    if raw is None:
        return DEFAULT_N_MAX
    try:
        val = int(raw)
    except ValueError:
        raise ConfigError(f"ORLICZ_LAB_NMAX must be an integer, got {raw!r}") from None
    if val < 1:
        raise ConfigError("ORLICZ_LAB_NMAX must be >= 1")
    return val


@dataclass(frozen=True)
class Cell:
    cell_id: str
    mass: float
    kind: str = "sigma-atom"
    coord: Optional[float] = None  # midpoint when the cell discretizes an interval

    def __post_init__(self):
        if not self.cell_id:
            raise ArgumentError("cell_id must be non-empty")
        if not (self.mass > 0) or not np.isfinite(self.mass):
            raise ArgumentError(f"cell {self.cell_id!r}: mass must be finite and > 0")
        if self.kind not in CELL_KINDS:
            raise ArgumentError(f"cell {self.cell_id!r}: kind must be one of {CELL_KINDS}")


@dataclass(frozen=True)
class MeasureSpace:
    cells: tuple[Cell, ...]
    _index: dict = field(init=False, repr=False, compare=False)
    _masses: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.cells:
            raise ArgumentError("a measure space needs at least one cell")
        ids = [c.cell_id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise ArgumentError("cell_ids must be unique")
        object.__setattr__(self, "_index", {cid: i for i, cid in enumerate(ids)})
        masses = np.array([c.mass for c in self.cells], dtype=float)
        if not np.isfinite(masses.sum()):
            raise ArgumentError("total mass must be finite")
        object.__setattr__(self, "_masses", masses)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def masses(self) -> np.ndarray:
        return self._masses

    @property
    def total_mass(self) -> float:
        return float(self._masses.sum())

    def ids(self) -> tuple[str, ...]:
        return tuple(c.cell_id for c in self.cells)

    def index_of(self, cell_id: str) -> int:
        try:
            return self._index[cell_id]
        except KeyError:
            raise ArgumentError(f"unknown cell_id {cell_id!r}") from None

    def coords(self) -> np.ndarray:
        out = np.array([np.nan if c.coord is None else c.coord for c in self.cells])
        return out


@dataclass(frozen=True)
class Block:
    label: str
    cells: tuple[str, ...]
    kind: str = "a-atom"

    def __post_init__(self):
        if not self.cells:
            raise ArgumentError(f"block {self.label!r}: must contain at least one cell")
        if self.kind not in BLOCK_KINDS:
            raise ArgumentError(f"block {self.label!r}: kind must be one of {BLOCK_KINDS}")


@dataclass(frozen=True)
class SubAlgebra:
    space: MeasureSpace
    blocks: tuple[Block, ...]
    _cell_block: np.ndarray = field(init=False, repr=False, compare=False)
    _block_masses: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.space.n_cells
        owner = np.full(n, -1, dtype=np.intp)
        for bi, blk in enumerate(self.blocks):
            for cid in blk.cells:
                ci = self.space.index_of(cid)
                if owner[ci] != -1:
                    raise ArgumentError(f"cell {cid!r} appears in two blocks")
                owner[ci] = bi
        if (owner == -1).any():
            missing = self.space.cells[int(np.argmax(owner == -1))].cell_id
            raise ArgumentError(f"blocks do not cover cell {missing!r}")
        bm = np.bincount(owner, weights=self.space.masses, minlength=len(self.blocks))
        object.__setattr__(self, "_cell_block", owner)
        object.__setattr__(self, "_block_masses", bm)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def cell_block(self) -> np.ndarray:
        return self._cell_block

    @property
    def block_masses(self) -> np.ndarray:
        return self._block_masses

    def block_of(self, cell_id: str) -> Block:
        return self.blocks[int(self._cell_block[self.space.index_of(cell_id)])]


@dataclass(frozen=True)
class MeasurableFn:
    space: MeasureSpace
    values: tuple
    _arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.values) != self.space.n_cells:
            raise ArgumentError("function must be defined on every cell of its space")
        arr = np.asarray(self.values)
        if np.iscomplexobj(arr):
            arr = arr.astype(complex)
        else:
            arr = arr.astype(float)
        arr.setflags(write=False)
        object.__setattr__(self, "_arr", arr)

    @property
    def arr(self) -> np.ndarray:
        return self._arr

    def value_at(self, cell_id: str):
        return self._arr[self.space.index_of(cell_id)]

    def abs(self) -> "MeasurableFn":
        return MeasurableFn(self.space, tuple(np.abs(self._arr)))

    def conj(self) -> "MeasurableFn":
        return MeasurableFn(self.space, tuple(np.conj(self._arr)))

    def __mul__(self, other: "MeasurableFn") -> "MeasurableFn":
        if other.space is not self.space and other.space != self.space:
            raise ArgumentError("functions live on different spaces")
        return MeasurableFn(self.space, tuple(self._arr * other._arr))


def fn_from_array(space: MeasureSpace, values) -> MeasurableFn:
    return MeasurableFn(space, tuple(np.asarray(values)))


def fn_from_map(space: MeasureSpace, mapping: Mapping[str, Any]) -> MeasurableFn:
    vals = []
    for c in space.cells:
        if c.cell_id not in mapping:
            raise ArgumentError(f"no value given for cell {c.cell_id!r}")
        vals.append(mapping[c.cell_id])
    extra = set(mapping) - set(space.ids())
    if extra:
        raise ArgumentError(f"unknown cell_id {sorted(extra)[0]!r}")
    return MeasurableFn(space, tuple(vals))


def fn_from_coords(space: MeasureSpace, f: Callable[[np.ndarray], np.ndarray]) -> MeasurableFn:
    coords = space.coords()
    if np.isnan(coords).any():
        raise ArgumentError("space has cells without coordinates")
    return MeasurableFn(space, tuple(np.asarray(f(coords))))


def indicator(space: MeasureSpace, cell_ids: Iterable[str]) -> MeasurableFn:
    vals = np.zeros(space.n_cells)
    for cid in cell_ids:
        vals[space.index_of(cid)] = 1.0
    return MeasurableFn(space, tuple(vals))


def constant_fn(space: MeasureSpace, value) -> MeasurableFn:
    return MeasurableFn(space, tuple(np.full(space.n_cells, value)))


def integrate(f: MeasurableFn, over: Optional[Iterable[str]] = None):
    """Sum of value * mass over the subset (default: all cells)."""
    if over is None:
        total = np.dot(f.arr, f.space.masses)
    else:
        idx = np.array([f.space.index_of(cid) for cid in over], dtype=np.intp)
        total = np.dot(f.arr[idx], f.space.masses[idx])
    if np.iscomplexobj(f.arr):
        return complex(total)
    return float(total)


def is_measurable(f: MeasurableFn, alg: SubAlgebra) -> bool:
    """Exact block-constancy check."""
    owner = alg.cell_block
    n = len(owner)
    # reversed fancy assignment leaves the first occurrence of each block
    first_idx = np.empty(alg.n_blocks, dtype=np.intp)
    first_idx[owner[::-1]] = np.arange(n - 1, -1, -1)
    rep = f.arr[first_idx]
    return bool((f.arr == rep[owner]).all())


def _average_blocks(vals: np.ndarray, alg: SubAlgebra) -> np.ndarray:
    w = vals * alg.space.masses
    sums = np.bincount(alg.cell_block, weights=w, minlength=alg.n_blocks)
    return sums / alg.block_masses


def cond_exp(f: MeasurableFn, alg: SubAlgebra) -> MeasurableFn:
    """Blockwise average.  Returns f itself when f is already block-constant,
    which makes idempotence exact rather than within rounding."""
    if alg.space is not f.space and alg.space != f.space:
        raise ArgumentError("sub-algebra belongs to a different space")
    if is_measurable(f, alg):
        return f
    if np.iscomplexobj(f.arr):
        avg = (_average_blocks(f.arr.real, alg)
               + 1j * _average_blocks(f.arr.imag, alg))
    else:
        avg = _average_blocks(f.arr, alg)
    return MeasurableFn(f.space, tuple(avg[alg.cell_block]))


def sigma_algebra(space: MeasureSpace) -> SubAlgebra:
    """Finest partition: every cell is its own block (A = Sigma)."""
    blocks = tuple(
        Block(label=c.cell_id,
              cells=(c.cell_id,),
              kind="a-atom" if c.kind == "sigma-atom" else "carrier")
        for c in space.cells)
    return SubAlgebra(space, blocks)


def build_symmetric_space(n_cells: int) -> tuple[MeasureSpace, SubAlgebra]:
    """[-1, 1] with half-Lebesgue weight, cells paired with their mirrors."""
    if n_cells < 2 or n_cells % 2 != 0:
        raise ArgumentError("n_cells must be an even integer >= 2")
    width = 2.0 / n_cells
    coords = np.empty(n_cells)
    for i in range(n_cells // 2):
        w = -1.0 + (i + 0.5) * width
        coords[i] = w
        coords[n_cells - 1 - i] = -w  # exact mirror, so |w| is block-constant
    cells = []
    for i in range(n_cells):
        cells.append(Cell(cell_id=f"c{i:04d}", mass=width / 2.0,
                          kind="fragment", coord=float(coords[i])))
    space = MeasureSpace(tuple(cells))
    blocks = []
    for i in range(n_cells // 2):
        j = n_cells - 1 - i
        blocks.append(Block(label=f"pair{i:04d}",
                            cells=(f"c{i:04d}", f"c{j:04d}"),
                            kind="carrier"))
    return space, SubAlgebra(space, tuple(blocks))


def build_rotation_space(n: int, cells_per_interval: int) -> tuple[MeasureSpace, SubAlgebra]:
    """[0, 1] with Lebesgue measure; blocks are orbits of w -> w + 1/n mod 1."""
    if n < 2:
        raise ArgumentError("n must be >= 2")
    if cells_per_interval < 1:
        raise ArgumentError("cells_per_interval must be >= 1")
    total = n * cells_per_interval
    width = 1.0 / total
    cells = []
    for i in range(total):
        w = (i + 0.5) * width
        cells.append(Cell(cell_id=f"c{i:04d}", mass=width,
                          kind="fragment", coord=w))
    space = MeasureSpace(tuple(cells))
    blocks = []
    for j in range(cells_per_interval):
        members = tuple(f"c{i * cells_per_interval + j:04d}" for i in range(n))
        blocks.append(Block(label=f"orbit{j:04d}", cells=members, kind="carrier"))
    return space, SubAlgebra(space, tuple(blocks))


def build_atomic_space(masses: Sequence[float]) -> tuple[MeasureSpace, SubAlgebra]:
    """Purely atomic space with A = Sigma (singleton atom blocks)."""
    if len(masses) == 0:
        raise ArgumentError("need at least one atom")
    cells = tuple(Cell(cell_id=f"a{i + 1:04d}", mass=float(m), kind="sigma-atom")
                  for i, m in enumerate(masses))
    space = MeasureSpace(cells)
    return space, sigma_algebra(space)


ExprLike = Union[str, SymbolicExpr]


def _as_expr(e: ExprLike, what: str) -> SymbolicExpr:
    if isinstance(e, SymbolicExpr):
        return e
    if isinstance(e, str):
        return parse_expr(e)
    raise ArgumentError(f"{what} must be an expression string")


@dataclass(frozen=True)
class SymbolicAtomSequence:
    """Closed-form atom family (mass_fn(n), value_fn(n)) for n = 1, 2, ..."""

    mass_fn: SymbolicExpr
    value_fn: SymbolicExpr
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        object.__setattr__(self, "mass_fn", _as_expr(self.mass_fn, "mass_fn"))
        object.__setattr__(self, "value_fn", _as_expr(self.value_fn, "value_fn"))
        if self.n_max < 1:
            raise ArgumentError("n_max must be >= 1")
        # spot-check positivity cheaply; full check happens in masses()
        probe = self.mass_fn(np.array([1.0, float(self.n_max)]))
        if not (probe > 0).all() or not np.isfinite(probe).all():
            raise ArgumentError("mass_fn must be positive for 1 <= n <= n_max")

    def indices(self, upto: Optional[int] = None) -> np.ndarray:
        m = self.n_max if upto is None else min(upto, self.n_max)
        return np.arange(1, m + 1, dtype=float)

    def masses(self, upto: Optional[int] = None) -> np.ndarray:
        out = self.mass_fn(self.indices(upto))
        if not (out > 0).all() or not np.isfinite(out).all():
            raise ArgumentError("mass_fn must be positive for 1 <= n <= n_max")
        return out

    def values(self, upto: Optional[int] = None) -> np.ndarray:
        return self.value_fn(self.indices(upto))

    def materialize(self, upto: Optional[int] = None):
        """Finite truncation: atomic space with A = Sigma plus the weight."""
        space, alg = build_atomic_space(self.masses(upto))
        u = fn_from_array(space, self.values(upto))
        return space, alg, u

    def to_config(self) -> dict:
        return {"mass_fn": self.mass_fn.to_config(),
                "value_fn": self.value_fn.to_config(),
                "n_max": self.n_max}


def space_to_config(space: MeasureSpace, alg: SubAlgebra) -> dict:
    atoms = [{"id": c.cell_id, "mass": c.mass}
             for c in space.cells if c.kind == "sigma-atom"]
    fragments = [{"id": c.cell_id, "mass": c.mass}
                 for c in space.cells if c.kind == "fragment"]
    blocks = [{"label": b.label, "cells": list(b.cells), "kind": b.kind}
              for b in alg.blocks]
    cfg: dict = {"atoms": atoms, "fragments": fragments, "blocks": blocks}
    coords = {c.cell_id: c.coord for c in space.cells if c.coord is not None}
    if coords:
        cfg["coords"] = coords
    return cfg


def space_from_config(cfg: Mapping[str, Any], path: str = "space") -> tuple[MeasureSpace, SubAlgebra]:
    if not isinstance(cfg, Mapping):
        raise ConfigError(f"{path}: expected an object")
    coords = cfg.get("coords", {})
    cells = []
    for key, kind in (("atoms", "sigma-atom"), ("fragments", "fragment")):
        entries = cfg.get(key, [])
        if not isinstance(entries, list):
            raise ConfigError(f"{path}.{key}: expected a list")
        for i, ent in enumerate(entries):
            where = f"{path}.{key}[{i}]"
            if not isinstance(ent, Mapping) or "id" not in ent or "mass" not in ent:
                raise ConfigError(f"{where}: needs 'id' and 'mass'")
            try:
                cells.append(Cell(cell_id=str(ent["id"]), mass=float(ent["mass"]),
                                  kind=kind, coord=coords.get(ent["id"])))
            except (ArgumentError, TypeError, ValueError) as exc:
                raise ConfigError(f"{where}: {exc}") from None
    if not cells:
        raise ConfigError(f"{path}: no cells given")
    try:
        space = MeasureSpace(tuple(cells))
    except ArgumentError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    raw_blocks = cfg.get("blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        raise ConfigError(f"{path}.blocks: expected a non-empty list")
    blocks = []
    for i, ent in enumerate(raw_blocks):
        where = f"{path}.blocks[{i}]"
        if not isinstance(ent, Mapping) or "cells" not in ent:
            raise ConfigError(f"{where}: needs 'cells'")
        try:
            blocks.append(Block(label=str(ent.get("label", f"b{i:04d}")),
                                cells=tuple(str(c) for c in ent["cells"]),
                                kind=str(ent.get("kind", "a-atom"))))
        except ArgumentError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    try:
        alg = SubAlgebra(space, tuple(blocks))
    except ArgumentError as exc:
        raise ConfigError(f"{path}.blocks: {exc}") from None
    return space, alg
