"""
Классификаторы: SVM, SVM_PCA, DNN, RNN, GRU, LSTM и протокол обучения
"""
from .adam import AdamState, adam_step
from .early_stopping import EarlyStopper
from .gradcheck import gradient_check
from .networks import DenseNetwork, GRUNetwork, LSTMNetwork, RecurrentNetwork, build_network, softmax
from .pca import PCABasis, pca_fit, pca_inverse, pca_transform
from .persistence import export_history, load_model, save_model
from .spec import N_CLASSES, AdamConfig, ModelFamily, ModelSpec, TrainConfig
from .training import EpochRecord, TrainedModel, predict, predict_proba, stratified_batches, stratified_split, train

__all__ = [
    "N_CLASSES",
    "AdamConfig",
    "AdamState",
    "DenseNetwork",
    "EarlyStopper",
    "EpochRecord",
    "GRUNetwork",
    "LSTMNetwork",
    "ModelFamily",
    "ModelSpec",
    "PCABasis",
    "RecurrentNetwork",
    "TrainConfig",
    "TrainedModel",
    "adam_step",
    "build_network",
    "export_history",
    "gradient_check",
    "load_model",
    "pca_fit",
    "pca_inverse",
    "pca_transform",
    "predict",
    "predict_proba",
    "save_model",
    "softmax",
    "stratified_batches",
    "stratified_split",
    "train",
]
