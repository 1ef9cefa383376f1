"""haloscope: structure-aware selection of particle clusters in cosmology
point clouds and exploration of the selected halos' merger histories."""

from . import errors
from .camera import CameraPose, project_points
from .forest import (
    HaloRecord,
    MergerForest,
    MergerSubtree,
    TracePath,
    TraceSegment,
    Violation,
    extract_merger_subtree,
    extract_trace_paths,
    halos_in_selection,
    load_merger_forest,
    main_progenitor_line,
    validate_forest,
    write_catalog,
)
from .layout import (
    DiscStyle,
    Layout2D,
    TreeLayout,
    encode_discs,
    layout_halos,
    layout_merger_tree,
    mds_project,
    pick_halo,
    time_colormap,
)
from .selection import (
    CircleLasso,
    ClusterSet,
    DensityGrid,
    Deposition,
    IsoSurfaceMesh,
    PolygonLasso,
    SelectionParams,
    SelectionResult,
    ThresholdMode,
    VoxelClassification,
    build_density_grid,
    classify_particle_in_isosurface,
    classify_voxels,
    extract_cluster_surfaces,
    mark_particles,
    rank_projected_areas,
    rasterize_lasso,
    rethreshold,
    split_clusters,
    wysiwyg_select,
)
from .snapshots import ParticleSnapshot, read_snapshot, write_snapshot

__version__ = "0.1.0"
