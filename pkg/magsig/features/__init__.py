"""
Признаки: банк из 20 признаков на компоненту, векторы из трёх соседних кадров, нормировка
"""
from .bank import FEATURE_NAMES, N_FEATURES, extract_component_features, feature_bank
from .io import read_feature_matrix, write_feature_matrix
from .scaler import FeatureScaler, apply_scaler, fit_scaler
from .vectors import (
    BLOCK_DIM,
    VECTOR_DIM,
    FeatureMatrix,
    FeatureVector,
    build_feature_vector,
    column_names,
    concat_matrices,
    featurize_recording,
    recurrent_view,
)

__all__ = [
    "BLOCK_DIM",
    "FEATURE_NAMES",
    "N_FEATURES",
    "VECTOR_DIM",
    "FeatureMatrix",
    "FeatureScaler",
    "FeatureVector",
    "apply_scaler",
    "build_feature_vector",
    "column_names",
    "concat_matrices",
    "extract_component_features",
    "feature_bank",
    "featurize_recording",
    "fit_scaler",
    "read_feature_matrix",
    "recurrent_view",
    "write_feature_matrix",
]
