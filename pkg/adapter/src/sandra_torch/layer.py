"""Differentiable description-satisfaction layer for torch.

The core package owns every piece of ontology math.  This module only
moves tensors: it projects feature batches into the ontology's vector
space with a learnable linear map, rectifies them, and evaluates the
core's graded satisfaction row by row.  Gradients flow through the
core's closed-form jacobian via a custom autograd function, so the
layer differentiates exactly the function the core computes.

All internal math runs in float64 — the core's precision — regardless
of the input dtype; outputs are cast back to the input dtype.  Feeding
float64 tensors therefore reproduces the core bit for bit.
"""

from __future__ import annotations

import warnings
from typing import Mapping

import numpy as np
import torch
from torch import nn

from sandra import (
    Basis,
    DimensionMismatchError,
    KinkWarning,
    Mode,
    Ontology,
    build_all_bases,
    deduce,
    jacobian,
)

__all__ = ["OntologyLayer", "rectified_satisfaction"]


def _as_float64_rows(tensor: torch.Tensor) -> np.ndarray:
    return tensor.detach().cpu().to(torch.float64).numpy()


class _RectifiedSatisfaction(torch.autograd.Function):
    """Row-wise rectified satisfaction with the analytic jacobian as backward.

    The forward pass is the core's ``deduce(..., relu)`` applied to each
    batch row; no arithmetic is layered on top, so float64 inputs yield
    bit-identical probabilities.  The backward pass chains the upstream
    gradient through the core's ``jacobian``.  Minibatch trajectories
    routinely cross rectifier kinks, where the core's convention is a
    zero subgradient; the per-coefficient kink warning is silenced here
    because it would fire on nearly every training step.
    """

    @staticmethod
    def forward(
        ctx,
        vectors: torch.Tensor,
        onto: Ontology,
        bases: Mapping,
    ) -> torch.Tensor:
        rows = _as_float64_rows(vectors)
        probs = np.stack([deduce(onto, bases, row, Mode.RELU) for row in rows])
        ctx.onto = onto
        ctx.bases = bases
        ctx.save_for_backward(vectors)
        out = torch.from_numpy(probs)
        return out.to(dtype=vectors.dtype, device=vectors.device)

    @staticmethod
    @torch.autograd.function.once_differentiable
    def backward(ctx, upstream: torch.Tensor):
        (vectors,) = ctx.saved_tensors
        rows = _as_float64_rows(vectors)
        up = _as_float64_rows(upstream)
        grads = np.empty_like(rows)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", KinkWarning)
            for i, row in enumerate(rows):
                grads[i] = up[i] @ jacobian(ctx.onto, ctx.bases, row)
        out = torch.from_numpy(grads)
        return out.to(dtype=vectors.dtype, device=vectors.device), None, None


def rectified_satisfaction(
    vectors: torch.Tensor, onto: Ontology, bases: Mapping | None = None
) -> torch.Tensor:
    """Satisfaction probabilities of a batch of already-encoded vectors.

    ``vectors`` is ``[batch, dim]`` in the ontology's coordinate space;
    the result is ``[batch, descriptions]`` in index order.  Differentiable
    with respect to ``vectors``.
    """
    if vectors.ndim != 2:
        raise DimensionMismatchError(
            f"expected a [batch, dim] tensor, got shape {tuple(vectors.shape)}"
        )
    if vectors.shape[1] != onto.dim:
        raise DimensionMismatchError(
            f"vectors have width {vectors.shape[1]}, ontology dimension is {onto.dim}"
        )
    if bases is None:
        bases = build_all_bases(onto)
    return _RectifiedSatisfaction.apply(vectors, onto, bases)


class OntologyLayer(nn.Module):
    """Project features into an ontology's vector space and read satisfaction.

    ``forward(x)`` computes the rectified satisfaction of ``relu(W @ x)``
    for each batch row, where ``W`` is a learnable, bias-free linear map
    from ``in_features`` to the ontology dimension.  The output has one
    column per description, in index order, and is differentiable with
    respect to both the features and ``W``.
    """

    def __init__(self, ontology: Ontology, in_features: int):
        super().__init__()
        self.ontology = ontology
        self.bases: Mapping[object, Basis] = build_all_bases(ontology)
        self.in_features = int(in_features)
        self.out_features = len(ontology.description_order)
        self.projection = nn.Linear(self.in_features, ontology.dim, bias=False)

    @property
    def descriptions(self) -> tuple[str, ...]:
        """Description names in output-column order."""
        return tuple(d.name for d in self.ontology.description_order)

    def project(self, features: torch.Tensor) -> torch.Tensor:
        """The rectified projection ``relu(W @ x)`` of a feature batch."""
        if features.ndim != 2:
            raise DimensionMismatchError(
                f"expected a [batch, features] tensor, got shape {tuple(features.shape)}"
            )
        if features.shape[1] != self.in_features:
            raise DimensionMismatchError(
                f"features have width {features.shape[1]}, layer expects {self.in_features}"
            )
        return torch.relu(self.projection(features))

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return _RectifiedSatisfaction.apply(
            self.project(features), self.ontology, self.bases
        )
