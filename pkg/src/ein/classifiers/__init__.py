from .baselines import majority_label, trivial_baselines
from .forest import RandomForest, Tree, build_tree, train_cart, train_random_forest
from .linear import (LinearModel, coefficients, logistic_loss_and_grad, train_linear_svm,
                     train_logistic_regression)
from .serialize import load_model, model_from_dict, model_to_dict, save_model

__all__ = [
    "LinearModel", "RandomForest", "Tree", "build_tree", "coefficients", "load_model",
    "logistic_loss_and_grad", "majority_label", "model_from_dict", "model_to_dict", "save_model",
    "train_cart", "train_linear_svm", "train_logistic_regression", "train_random_forest",
    "trivial_baselines",
]
