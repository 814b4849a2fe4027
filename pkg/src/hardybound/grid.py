"""Uniform lattices, n-linear cell gradients and singular-weight quadrature.

Nodes carry field values; cells are the lattice boxes between ``2**n``
corner nodes.  A node is *masked* (a free degree of freedom) when it lies in
the domain at distance at least ``band * h`` from the boundary; fields vanish
on every other node.  Two cell sets are used:

``interior``
    all corners masked -- the regularised set for singular weights.
``support``
    at least one corner masked -- the support of a field's n-linear
    interpolant, needed wherever the gradient of a field is integrated.

With ``band >= 1`` and ``n <= 3`` every support cell has its centre inside the
domain at distance ``>= (band - sqrt(n) / 2) * h > 0``.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateGridError, ParameterDomainError
from .geometry import Domain


@dataclass(frozen=True, eq=False)
class Grid:
    domain: Domain
    lo: np.ndarray
    h: float
    dims: tuple
    band: float
    node_distance: np.ndarray  # nan outside the domain
    mask: np.ndarray
    cell_distance: np.ndarray  # nan where the cell centre is outside the domain

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def cell_dims(self) -> tuple:
        return tuple(d - 1 for d in self.dims)

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    def node_coords(self) -> np.ndarray:
        """Node coordinates, shape ``dims + (n,)``."""
        axes = [self.lo[k] + self.h * np.arange(self.dims[k]) for k in range(self.n)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def cell_centers(self) -> np.ndarray:
        axes = [self.lo[k] + self.h * (np.arange(self.dims[k] - 1) + 0.5) for k in range(self.n)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def _corner_slices(self):
        for offset in itertools.product((0, 1), repeat=self.n):
            yield offset, tuple(slice(o, o + c) for o, c in zip(offset, self.cell_dims))

    @cached_property
    def interior_cells(self) -> np.ndarray:
        out = np.ones(self.cell_dims, dtype=bool)
        for _, sl in self._corner_slices():
            out &= self.mask[sl]
        return out

    @cached_property
    def support_cells(self) -> np.ndarray:
        out = np.zeros(self.cell_dims, dtype=bool)
        for _, sl in self._corner_slices():
            out |= self.mask[sl]
        return out

    def cells(self, which: str) -> np.ndarray:
        if which == "interior":
            return self.interior_cells
        if which == "support":
            return self.support_cells
        raise ValueError(f"unknown cell set {which!r}")


@dataclass(frozen=True, eq=False)
class GridField:
    """Nodal values on a grid; exactly zero off the mask."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.dims:
            raise ValueError(f"field shape {vals.shape} does not match grid {self.grid.dims}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        if np.any(vals[~self.grid.mask] != 0):
            raise ValueError("field must vanish off the interior mask")
        object.__setattr__(self, "values", vals)

    def __mul__(self, c):
        return GridField(self.grid, self.values * c)

    __rmul__ = __mul__


def field_from_values(grid: Grid, values) -> GridField:
    """Wrap nodal values, zeroing everything off the mask."""
    vals = np.where(grid.mask, np.asarray(values, dtype=float), 0.0)
    return GridField(grid, vals)


def field_from_function(grid: Grid, func) -> GridField:
    """Evaluate ``func`` (batch of points -> values) on the masked nodes."""
    vals = np.zeros(grid.dims)
    pts = grid.node_coords()[grid.mask]
    vals[grid.mask] = func(pts)
    return GridField(grid, vals)


def distance_power_field(grid: Grid, exponent: float) -> GridField:
    vals = np.zeros(grid.dims)
    vals[grid.mask] = grid.node_distance[grid.mask] ** exponent
    return GridField(grid, vals)


def build_grid(domain: Domain, bbox, resolution: int, band: float = 1.0) -> Grid:
    """Lattice over ``bbox = (lo, hi)`` with spacing ``(hi[0] - lo[0]) / resolution``.

    Other axes get as many nodes as fit in ``bbox`` (rounded to the nearest
    whole number of cells).
    """
    if int(resolution) != resolution or resolution < 8:
        raise ParameterDomainError(f"resolution must be an integer >= 8, got {resolution!r}")
    if not band >= 1:
        raise ParameterDomainError(f"band must be >= 1, got {band!r}")
    lo = np.asarray(bbox[0], dtype=float)
    hi = np.asarray(bbox[1], dtype=float)
    if lo.shape != (domain.dim,) or hi.shape != (domain.dim,) or not np.all(hi > lo):
        raise ParameterDomainError(f"bbox must be (lo, hi) points of dimension {domain.dim} with hi > lo")
    h = (hi[0] - lo[0]) / resolution
    dims = tuple(int(round((hi[k] - lo[k]) / h)) + 1 for k in range(domain.dim))
    if min(dims) < 2:
        raise DegenerateGridError("bbox is too thin for the requested resolution")

    axes = [lo[k] + h * np.arange(dims[k]) for k in range(domain.dim)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    node_d = np.full(len(nodes), np.nan)
    inside = domain.contains(nodes)
    node_d[inside] = domain._distance(nodes[inside])
    node_d = node_d.reshape(dims)
    # relative slack keeps nodes at exactly band*h (e.g. i*h on a box face) in the mask
    mask = np.nan_to_num(node_d, nan=-1.0) >= band * h * (1 - 1e-9)
    if not mask.any():
        raise DegenerateGridError("no grid node lies at distance >= band*h inside the domain")

    cdims = tuple(d - 1 for d in dims)
    caxes = [lo[k] + h * (np.arange(cdims[k]) + 0.5) for k in range(domain.dim)]
    centers = np.stack(np.meshgrid(*caxes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    cell_d = np.full(len(centers), np.nan)
    cin = domain.contains(centers)
    cell_d[cin] = domain._distance(centers[cin])
    return Grid(
        domain=domain,
        lo=lo,
        h=float(h),
        dims=dims,
        band=float(band),
        node_distance=node_d,
        mask=mask,
        cell_distance=cell_d.reshape(cdims),
    )


# -- discrete operators ---------------------------------------------------------


def _values(field) -> tuple[Grid, np.ndarray]:
    return field.grid, field.values


def gradient(field: GridField) -> np.ndarray:
    """Cell-centre gradient of the n-linear interpolant, shape ``cell_dims + (n,)``.

    Along each axis this is the mean of the forward differences over the
    ``2**(n-1)`` cell edges parallel to that axis.
    """
    grid, vals = _values(field)
    return nodal_gradient(grid, vals)


def nodal_gradient(grid: Grid, vals: np.ndarray) -> np.ndarray:
    n = grid.n
    out = np.zeros(grid.cell_dims + (n,))
    scale = 1.0 / (2 ** (n - 1) * grid.h)
    for offset, sl in grid._corner_slices():
        corner = vals[sl]
        for k in range(n):
            if offset[k]:
                out[..., k] += corner
            else:
                out[..., k] -= corner
    return out * scale


def gradient_adjoint(grid: Grid, cell_vectors: np.ndarray) -> np.ndarray:
    """Transpose of :func:`nodal_gradient`: cell vectors -> nodal values."""
    n = grid.n
    out = np.zeros(grid.dims)
    scale = 1.0 / (2 ** (n - 1) * grid.h)
    for offset, sl in grid._corner_slices():
        contrib = np.zeros(grid.cell_dims)
        for k in range(n):
            if offset[k]:
                contrib += cell_vectors[..., k]
            else:
                contrib -= cell_vectors[..., k]
        out[sl] += contrib
    return out * scale


def cell_average(grid: Grid, vals: np.ndarray) -> np.ndarray:
    """Value of the n-linear interpolant at cell centres (mean of the corners)."""
    out = np.zeros(grid.cell_dims)
    for _, sl in grid._corner_slices():
        out += vals[sl]
    return out / 2**grid.n


def cell_average_adjoint(grid: Grid, cell_values: np.ndarray) -> np.ndarray:
    out = np.zeros(grid.dims)
    for _, sl in grid._corner_slices():
        out[sl] += cell_values
    return out / 2**grid.n


def _node_index(grid: Grid) -> np.ndarray:
    return np.arange(int(np.prod(grid.dims))).reshape(grid.dims)


def gradient_matrix(grid: Grid) -> sp.csr_matrix:
    """Sparse form of :func:`nodal_gradient`; rows are (cell, axis) in C order."""
    n = grid.n
    ncell = int(np.prod(grid.cell_dims))
    idx = _node_index(grid)
    scale = 1.0 / (2 ** (n - 1) * grid.h)
    rows, cols, data = [], [], []
    cell_ids = np.arange(ncell)
    for offset, sl in grid._corner_slices():
        nodes = idx[sl].ravel()
        for k in range(n):
            rows.append(cell_ids * n + k)
            cols.append(nodes)
            data.append(np.full(ncell, scale if offset[k] else -scale))
    shape = (ncell * n, int(np.prod(grid.dims)))
    return sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=shape)


def average_matrix(grid: Grid) -> sp.csr_matrix:
    ncell = int(np.prod(grid.cell_dims))
    idx = _node_index(grid)
    rows, cols = [], []
    for _, sl in grid._corner_slices():
        rows.append(np.arange(ncell))
        cols.append(idx[sl].ravel())
    data = np.full(ncell * 2**grid.n, 1.0 / 2**grid.n)
    shape = (ncell, int(np.prod(grid.dims)))
    return sp.csr_matrix((data, (np.concatenate(rows), np.concatenate(cols))), shape=shape)


def cell_weights(grid: Grid, weight_exponent: float, cells: str = "interior") -> np.ndarray:
    """``d(centre) ** -s * h**n`` on the chosen cell set, zero elsewhere."""
    sel = grid.cells(cells)
    w = np.zeros(grid.cell_dims)
    w[sel] = grid.cell_distance[sel] ** (-weight_exponent) * grid.cell_volume
    return w


def mass_cell_set(weight_exponent: float, power: float) -> str:
    """Cell set for ``int |f|^power / d^weight_exponent``.

    A field vanishing linearly at the boundary gives a finite integral exactly
    when ``weight_exponent - power < 1``; then the whole support is integrated.
    Otherwise the boundary-layer integral is infinite in the continuum, its
    midpoint value is an artefact, and only interior cells are used.
    """
    return "support" if weight_exponent - power < 1 else "interior"


def complete_hat_nodes(grid: Grid) -> np.ndarray:
    """Masked nodes whose ``2**n`` surrounding cells all lie on the grid."""
    out = grid.mask.copy()
    for k in range(grid.n):
        edge = [slice(None)] * grid.n
        edge[k] = 0
        out[tuple(edge)] = False
        edge[k] = -1
        out[tuple(edge)] = False
    return out


def interior_hat_nodes(grid: Grid) -> np.ndarray:
    """Masked nodes whose hat is supported on interior cells only.

    Such hats vanish on a neighbourhood of the boundary band, the discrete
    analogue of a test function compactly supported in the domain.
    """
    out = complete_hat_nodes(grid)
    for _, sl in grid._corner_slices():
        out[sl] &= grid.interior_cells
    return out


def weighted_integral(grid: Grid, integrand: np.ndarray, weight_exponent: float, cells: str = "interior") -> float:
    """Midpoint rule for ``int integrand / d**s`` over the chosen cell set.

    ``integrand`` holds one value per cell; cells outside the set are ignored
    (their entries may be anything, including non-finite).
    """
    sel = grid.cells(cells)
    vals = np.asarray(integrand, dtype=float)[sel]
    return float(np.sum(vals * grid.cell_distance[sel] ** (-weight_exponent)) * grid.cell_volume)


def hat_functions(grid: Grid) -> Iterator[GridField]:
    """Nodal basis fields, one per masked node, in C order of the nodes."""
    for idx in zip(*np.nonzero(grid.mask)):
        vals = np.zeros(grid.dims)
        vals[idx] = 1.0
        yield GridField(grid, vals)


def write_field_csv(field: GridField, stream) -> None:
    """Write ``x0, ..., x{n-1}, value`` rows for every node."""
    grid = field.grid
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([f"x{k}" for k in range(grid.n)] + ["value"])
    coords = grid.node_coords().reshape(-1, grid.n)
    for x, v in zip(coords, field.values.ravel()):
        writer.writerow([f"{c:.17g}" for c in x] + [f"{v:.17g}"])
