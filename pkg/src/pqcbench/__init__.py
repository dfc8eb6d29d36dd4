"""Variational quantum classifier benchmark toolkit.

Simulates small parameterized circuits, estimates their expressibility and
entangling capability, trains them as binary classifiers on nine synthetic
2-D datasets, and correlates the descriptors with classification accuracy.
"""

from .circuits import CircuitTemplate, embedding_program, param_count
from .datasets import Dataset, generate, split
from .descriptors import (DescriptorConfig, DescriptorResult,
                          entangling_capability, expressibility, haar_pdf,
                          meyer_wallach_q, sample_fidelities)
from .sim import Gate, Statevector, apply_gate, fidelity, probabilities, \
    reduced_purity, zero_state
from .training import RunRecord, TrainConfig, accuracy, classify, gradient, \
    loss_l1, loss_l2, predict_value, train

__version__ = "0.1.0"

__all__ = [
    "CircuitTemplate", "Dataset", "DescriptorConfig", "DescriptorResult",
    "Gate", "RunRecord", "Statevector", "TrainConfig", "accuracy",
    "apply_gate", "classify", "embedding_program", "entangling_capability",
    "expressibility", "fidelity", "generate", "gradient", "haar_pdf",
    "loss_l1", "loss_l2", "meyer_wallach_q", "param_count", "predict_value",
    "probabilities", "reduced_purity", "sample_fidelities", "split", "train",
    "zero_state",
]
