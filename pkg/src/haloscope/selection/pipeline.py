"""The five-step selection pipeline: mask, mark, grid, extract, rank.

The full intermediate state (grid, classification, marked rows) rides
along in the result so the threshold can be re-run later without
repeating the mask/mark/grid steps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..camera import CameraPose
from ..errors import EmptySelectionError
from .clusters import ClusterSet, split_clusters
from .grid import (
    DensityGrid,
    SelectionParams,
    ThresholdMode,
    build_density_grid,
)
from .lasso import LassoRegion, rasterize_lasso
from .marking import mark_positions
from .raster import rank_projected_areas
from .surface import IsoSurfaceMesh, VoxelClassification, classify_voxels, extract_cluster_surfaces


@dataclass
class SelectionResult:
    primary_cluster_id: int | None
    clusters: ClusterSet
    projected_pixel_counts: dict[int, int]
    grid: DensityGrid
    classification: VoxelClassification
    mesh: IsoSurfaceMesh
    rho0: float
    marked_indices: np.ndarray        # rows into the source snapshot, ascending
    camera: CameraPose
    params: SelectionParams

    @property
    def primary_cluster(self):
        if self.primary_cluster_id is None:
            return None
        return self.clusters.by_id(self.primary_cluster_id)


def resolve_threshold(grid: DensityGrid, params: SelectionParams) -> float:
    if params.threshold_mode is ThresholdMode.EXPLICIT:
        return float(params.rho0)
    return float(grid.node_density.mean())


def select_on_grid(
    grid: DensityGrid,
    rho0: float,
    camera: CameraPose,
    params: SelectionParams,
    marked_indices: np.ndarray,
) -> SelectionResult:
    """Threshold, extract, split and rank on an already-built grid."""
    classification = classify_voxels(grid, rho0)
    mesh = extract_cluster_surfaces(grid, classification)
    clusters = split_clusters(grid, classification, rho0, mesh)
    counts, primary = rank_projected_areas(clusters, camera, params.area_resolution)
    return SelectionResult(
        primary_cluster_id=primary,
        clusters=clusters,
        projected_pixel_counts=counts,
        grid=grid,
        classification=classification,
        mesh=mesh,
        rho0=rho0,
        marked_indices=marked_indices,
        camera=camera,
        params=params,
    )


def wysiwyg_select(
    snapshot,
    camera: CameraPose,
    lasso: LassoRegion,
    params: SelectionParams = SelectionParams(),
) -> SelectionResult:
    """Run the whole pipeline on one snapshot under one camera and lasso."""
    mask = rasterize_lasso(lasso, tuple(camera.viewport))
    if not mask.bits.any():
        raise EmptySelectionError("lasso region covers no pixels")
    marked = mark_positions(snapshot.positions, camera, mask)
    if len(marked) == 0:
        raise EmptySelectionError("no particles project into the lasso")
    grid = build_density_grid(snapshot.positions[marked], params)
    rho0 = resolve_threshold(grid, params)
    return select_on_grid(grid, rho0, camera, params, marked)


def rethreshold(result: SelectionResult, rho0: float) -> SelectionResult:
    """Re-run classify/extract/split/rank on the cached grid with a new
    threshold; the mask/mark/grid steps are not repeated."""
    if rho0 < 0:
        raise ValueError("rho0 must be >= 0")
    params = replace(result.params, threshold_mode=ThresholdMode.EXPLICIT, rho0=float(rho0))
    return select_on_grid(result.grid, float(rho0), result.camera, params, result.marked_indices)
