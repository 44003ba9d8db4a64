"""Exact decision procedures and tent-map constructions for two-variate coherent distributions."""

from .coherence import (
    CoherenceReport,
    ExpertModel,
    ExtremalityReport,
    FeasibilitySystem,
    RepresentationPair,
    build_system,
    check_coherence,
    check_extreme,
    check_minimality,
    check_uniqueness,
    coherence_defect,
    from_expert_model,
)
from .measures import DiscreteMeasure, Measure1D, dominates, marginal_x, marginal_y, scale_add

__version__ = "0.1.0"
