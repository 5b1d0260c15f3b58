"""Torch bindings for the sandra ontology reasoner.

``OntologyLayer`` makes graded description satisfaction available as a
differentiable module: a learnable linear map projects features into
the ontology's vector space, and the core reasoner scores the rectified
result, with its closed-form jacobian wired into autograd.  ``toy_train``
runs a small, fully seeded training loop over synthetic situations to
demonstrate the layer inside a real optimization.
"""

from .layer import OntologyLayer, rectified_satisfaction
from .toy import ToyDataset, ToyTrainConfig, synthesize_samples, toy_train

__version__ = "0.1.0"

__all__ = [
    "OntologyLayer",
    "ToyDataset",
    "ToyTrainConfig",
    "rectified_satisfaction",
    "synthesize_samples",
    "toy_train",
]
