"""Cost-optimal hull-cleaning schedules from data-driven fuel predictions."""

__version__ = "0.1.0"
