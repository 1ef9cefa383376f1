"""Structure-aware WYSIWYG selection: lasso masking, density gridding,
isosurface extraction, cluster splitting and projected-area ranking."""

from .clusters import Cluster, ClusterSet, label_voxels, split_clusters
from .grid import (
    DensityGrid,
    Deposition,
    SelectionParams,
    ThresholdMode,
    axis_weights,
    build_density_grid,
    trilinear_density,
)
from .lasso import CircleLasso, LassoRegion, PolygonLasso, ScreenMask, rasterize_lasso
from .marking import mark_particles, mark_positions
from .pipeline import SelectionResult, rethreshold, select_on_grid, wysiwyg_select
from .raster import rank_projected_areas, rasterize_coverage
from .surface import (
    CELL_INNER,
    CELL_OUTER,
    IsoSurfaceMesh,
    VoxelClassification,
    classify_particle_in_isosurface,
    classify_points_in_isosurface,
    classify_voxels,
    extract_cluster_surfaces,
    write_triangle_soup,
)

__all__ = [
    "CELL_INNER",
    "CELL_OUTER",
    "CircleLasso",
    "Cluster",
    "ClusterSet",
    "DensityGrid",
    "Deposition",
    "IsoSurfaceMesh",
    "LassoRegion",
    "PolygonLasso",
    "ScreenMask",
    "SelectionParams",
    "SelectionResult",
    "ThresholdMode",
    "VoxelClassification",
    "axis_weights",
    "build_density_grid",
    "classify_particle_in_isosurface",
    "classify_points_in_isosurface",
    "classify_voxels",
    "extract_cluster_surfaces",
    "label_voxels",
    "mark_particles",
    "mark_positions",
    "rank_projected_areas",
    "rasterize_coverage",
    "rasterize_lasso",
    "rethreshold",
    "select_on_grid",
    "split_clusters",
    "trilinear_density",
    "write_triangle_soup",
    "wysiwyg_select",
]
