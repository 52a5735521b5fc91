# Local
from .hull import HullPoint, extreme_indices, hull_vertex_labels, hull_vertices, is_vertex
from .model import ModelSpec, SegmentSummary, segment_loglik_at, segment_maxloglik
