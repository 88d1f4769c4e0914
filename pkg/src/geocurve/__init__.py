"""Feature augmentation along class-wise geodesics in Kendall pre-shape space."""

__version__ = "0.1.0"

from .preshape import center, duplicate, geodesic_distance, normalize, project, project_rows
from .geodesic import GeodesicCurve, gamma, interp, interp_batch, make_curve
from .losses import LossReport, divergence_loss, sim_loss, total_loss
from .fitting import FitConfig, FittedCurve, fit, fit_all_classes
from .augment_eval import EvalConfig, EvalReport, augment_dataset, evaluate, knn_predict, sample_curve
from .dataset import LabeledFeatureSet

__all__ = [
    "center", "duplicate", "geodesic_distance", "normalize", "project", "project_rows",
    "GeodesicCurve", "gamma", "interp", "interp_batch", "make_curve",
    "LossReport", "divergence_loss", "sim_loss", "total_loss",
    "FitConfig", "FittedCurve", "fit", "fit_all_classes",
    "EvalConfig", "EvalReport", "augment_dataset", "evaluate", "knn_predict", "sample_curve",
    "LabeledFeatureSet",
]
