"""Learning geodesic distance functions on point clouds via vector-field heat flow."""

from .dataset import (LabeledPointCloud, PointCloud, load_points, load_scalar_field,
                      sample_plane_grid, sample_sphere, sample_swiss_roll_clusters,
                      sample_torus, save_points, save_scalar_field)
from .fields import DistanceField, VectorField
from .gdl import (GdlParams, GeodesicDistanceLearner, gdl_multi, gdl_single)
from .graph import NeighborGraph, assign_weights, build_knn_graph, graph_laplacian
from .metrics import (average_precision, mean_abs_error, mean_average_precision,
                      precision_at, recall_at)
from .oracle import shortest_path_distances
from .tangent import TangentFrames, estimate_tangent_spaces

__version__ = "0.1.0"
