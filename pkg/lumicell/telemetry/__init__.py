from .metrics import BaseMetrics, NullMetrics, SimMetrics
from .tracing import NullTracing, SimTracing

__all__ = [
    "BaseMetrics",
    "NullMetrics",
    "SimMetrics",
    "NullTracing",
    "SimTracing",
]
