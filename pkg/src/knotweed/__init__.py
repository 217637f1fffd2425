"""knotweed: monotonic simplification of knot diagrams.

Generalized Reidemeister moves Z1/Z2/Z3 plus the connected-sum moves C and
C-tilde, applied greedily without ever increasing the crossing count, with
knot invariants (Goeritz determinant, Alexander polynomial) as independent
soundness oracles.
"""

from .diagram import (ArcRef, Diagram, DiagramError, DualGraph, EmbeddingError,
                      FaceMap, OpenDiagram, PDLabelError, PDSyntaxError,
                      SplitDiagramError, canonical_code, delete_arc, dual_graph,
                      emit_pd, insert_arc, maximal_arcs, parse_pd, trace_faces)

__all__ = [
    "ArcRef", "Diagram", "DiagramError", "DualGraph", "EmbeddingError",
    "FaceMap", "OpenDiagram", "PDLabelError", "PDSyntaxError",
    "SplitDiagramError", "canonical_code", "delete_arc", "dual_graph",
    "emit_pd", "insert_arc", "maximal_arcs", "parse_pd", "trace_faces",
]

__version__ = "0.1.0"
