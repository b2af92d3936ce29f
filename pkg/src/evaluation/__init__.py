"""Evaluation package: rejection orderings and accuracy-rejection curves.

The hybrid ordering lives in ``src.evaluation.hybrid`` and is imported from there.
"""

from .arc import ArcCurve, Direction, InstanceOrdering, ScoredInstance, arc, mean_arc, order_instances, order_scores

__all__ = [
    "ArcCurve",
    "Direction",
    "InstanceOrdering",
    "ScoredInstance",
    "arc",
    "mean_arc",
    "order_instances",
    "order_scores",
]
