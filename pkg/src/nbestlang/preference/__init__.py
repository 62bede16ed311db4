from .functions import DEFAULT_FUNCTIONS, FunctionSpec, preference_vector, speech_function
from .model import PreferenceModel
from .scaling import (ScalingFactors, bracket_f1, edit_distance, residual, select_best,
                      select_index, similarity, tiebreak_key, top1_count, total_score,
                      train_scaling_phase1, train_scaling_phase2)
from .tables import ObjectScoreTable, combining_score, smoothed_score, train_object_scores
from .training import TrainingUtterance, train_model

__all__ = [
    "DEFAULT_FUNCTIONS", "FunctionSpec", "ObjectScoreTable", "PreferenceModel", "ScalingFactors",
    "TrainingUtterance", "bracket_f1", "combining_score", "edit_distance", "preference_vector",
    "residual", "select_best", "select_index", "similarity", "smoothed_score", "speech_function",
    "tiebreak_key", "top1_count", "total_score", "train_model", "train_object_scores",
    "train_scaling_phase1", "train_scaling_phase2",
]
