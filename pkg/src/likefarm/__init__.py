"""Like-farm detection: co-clustering, timeline features and classifiers."""

__version__ = "1.0.0"
