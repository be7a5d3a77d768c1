from .cv import CvReport, CvRow, cross_validate_k, fold_assignment
from .eig import EigenError, eig_sym
from .modelio import load_model, save_model
from .pca import PcaModel, pca_fit, pca_project, pca_reconstruct, size_reduction, variance_retained
from .regression import (
    RegressionModel,
    prediction_accuracy,
    regress_fit,
    regress_predict,
)

__all__ = [
    "CvReport", "CvRow", "cross_validate_k", "fold_assignment",
    "EigenError", "eig_sym",
    "load_model", "save_model",
    "PcaModel", "pca_fit", "pca_project", "pca_reconstruct", "size_reduction", "variance_retained",
    "RegressionModel", "prediction_accuracy", "regress_fit", "regress_predict",
]
