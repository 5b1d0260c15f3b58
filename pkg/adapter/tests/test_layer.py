"""Behavior of the differentiable satisfaction layer."""

import warnings

import numpy as np
import pytest
import torch

from sandra import (
    DimensionMismatchError,
    KinkWarning,
    Mode,
    Situation,
    Entity,
    deduce,
    encode_situation,
    jacobian,
    role_vector,
)
from sandra_torch import OntologyLayer, rectified_satisfaction

from torch_helpers import kink_free_features


def identity_layer(onto) -> OntologyLayer:
    layer = OntologyLayer(onto, onto.dim).double()
    with torch.no_grad():
        layer.projection.weight.copy_(torch.eye(onto.dim, dtype=torch.float64))
    return layer


def test_zero_projection_maps_everything_to_zero(mini_fmnist):
    layer = OntologyLayer(mini_fmnist, 7).double()
    with torch.no_grad():
        layer.projection.weight.zero_()
    out = layer(torch.randn(5, 7, dtype=torch.float64))
    assert out.shape == (5, layer.out_features)
    assert torch.equal(out, torch.zeros(5, layer.out_features, dtype=torch.float64))


def test_preimage_of_complete_situation_scores_one(fig, all_bases):
    layer = identity_layer(fig)
    s1 = Situation("s1", (Entity("c", ("Circle",)), Entity("r", ("Red",))))
    v = encode_situation(fig, s1)
    out = layer(torch.from_numpy(v).unsqueeze(0))
    assert layer.descriptions == ("Fig",)
    assert out.item() == 1.0


def test_forward_matches_core_bit_for_bit(ontologies, all_bases):
    rng = np.random.default_rng(3)
    for name, onto in ontologies.items():
        layer = OntologyLayer(onto, 9).double()
        x = torch.from_numpy(rng.standard_normal((6, 9)))
        out = layer(x)
        v = torch.relu(layer.projection(x)).detach().numpy()
        expected = np.stack(
            [deduce(onto, all_bases[name], row, Mode.RELU) for row in v]
        )
        assert out.detach().numpy().tobytes() == expected.tobytes()


def test_batched_forward_equals_looped_rows(mini_fmnist):
    torch.manual_seed(0)
    layer = OntologyLayer(mini_fmnist, 11).double()
    x = torch.randn(8, 11, dtype=torch.float64)

    # the satisfaction stage is row-independent, so batching it changes
    # nothing at the bit level
    v = torch.relu(layer.projection(x)).detach()
    batched = rectified_satisfaction(v, mini_fmnist, layer.bases)
    looped = torch.cat(
        [
            rectified_satisfaction(v[i : i + 1], mini_fmnist, layer.bases)
            for i in range(8)
        ]
    )
    assert torch.equal(batched, looped)

    # the projection is a matmul whose summation order may legitimately
    # differ between batch shapes; the full layer agrees to accumulation
    # error
    full = torch.cat([layer(x[i : i + 1]) for i in range(8)])
    assert torch.allclose(layer(x), full, atol=1e-12, rtol=0.0)


def test_float32_features_come_back_float32(mini_fmnist):
    torch.manual_seed(1)
    layer = OntologyLayer(mini_fmnist, 5)
    x = torch.randn(4, 5, dtype=torch.float32)
    out = layer(x)
    assert out.dtype == torch.float32
    exact = layer.double()(x.double())
    assert torch.allclose(out.double(), exact, atol=1e-6)


def test_wrong_feature_width_is_rejected(mini_fmnist):
    layer = OntologyLayer(mini_fmnist, 5)
    with pytest.raises(DimensionMismatchError):
        layer(torch.zeros(2, 6))
    with pytest.raises(DimensionMismatchError):
        layer(torch.zeros(5))


def test_rectified_satisfaction_checks_vector_width(fig):
    with pytest.raises(DimensionMismatchError):
        rectified_satisfaction(torch.zeros(2, fig.dim + 1), fig)
    with pytest.raises(DimensionMismatchError):
        rectified_satisfaction(torch.zeros(fig.dim), fig)


def test_rectified_satisfaction_matches_core(fig, all_bases):
    rng = np.random.default_rng(5)
    v = np.abs(rng.standard_normal((3, fig.dim)))
    out = rectified_satisfaction(torch.from_numpy(v), fig)
    expected = np.stack([deduce(fig, all_bases["fig"], row, Mode.RELU) for row in v])
    assert out.detach().numpy().tobytes() == expected.tobytes()


def test_zero_upstream_gives_zero_feature_gradient(mini_fmnist):
    torch.manual_seed(2)
    layer = OntologyLayer(mini_fmnist, 6).double()
    x = torch.randn(3, 6, dtype=torch.float64, requires_grad=True)
    layer(x).backward(torch.zeros(3, layer.out_features, dtype=torch.float64))
    assert torch.equal(x.grad, torch.zeros_like(x))


def test_gradient_matches_hand_chain_rule(fig):
    layer = identity_layer(fig)
    v = encode_situation(
        fig, Situation("s", (Entity("c", ("Circle",)),))
    )  # Shape present, Color absent
    x = torch.from_numpy(v).unsqueeze(0).requires_grad_(True)
    layer(x).backward(torch.tensor([[2.0]], dtype=torch.float64))
    # only the strictly positive Shape coefficient contributes: the
    # jacobian row is half the Shape row of the pseudo-inverse, which for
    # this basis is the Shape axis itself
    shape_axis = role_vector(fig, "Shape")
    expected = 2.0 * 0.5 * shape_axis
    # coordinates where the projection output is exactly zero are masked
    # by the rectifier's zero subgradient
    expected = expected * (v > 0)
    assert np.array_equal(x.grad.numpy()[0], expected)


def test_backward_matches_core_jacobian_chain(ontologies, all_bases):
    rng = np.random.default_rng(11)
    for name, onto in ontologies.items():
        torch.manual_seed(4)
        layer = OntologyLayer(onto, 8).double()
        x = torch.from_numpy(rng.standard_normal((4, 8))).requires_grad_(True)
        upstream = torch.from_numpy(rng.standard_normal((4, layer.out_features)))
        layer(x).backward(upstream)

        weight = layer.projection.weight.detach().numpy()
        pre = x.detach().numpy() @ weight.T
        v = np.maximum(pre, 0.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", KinkWarning)
            grad_v = np.stack(
                [
                    upstream[i].numpy() @ jacobian(onto, all_bases[name], row)
                    for i, row in enumerate(v)
                ]
            )
        expected = (grad_v * (pre > 0)) @ weight
        assert np.max(np.abs(x.grad.numpy() - expected)) <= 1e-10


def test_backward_at_kink_is_silent_and_uses_zero_subgradient(fig):
    layer = identity_layer(fig)
    v = encode_situation(fig, Situation("s", (Entity("c", ("Circle",)),)))
    x = torch.from_numpy(v).unsqueeze(0).requires_grad_(True)
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # an escaped KinkWarning would raise
        out = layer(x)
        out.backward(torch.ones(1, 1, dtype=torch.float64))
    # the Color coefficient sits exactly at the kink and contributes nothing
    assert out.item() == 0.5
    assert x.grad.abs().sum().item() == 0.5


def test_torch_gradcheck_at_kink_free_points(mini_fmnist):
    torch.manual_seed(6)
    layer = OntologyLayer(mini_fmnist, 10).double()
    with torch.no_grad():
        layer.projection.weight.abs_().add_(0.05)
    rng = np.random.default_rng(21)
    x = kink_free_features(layer, rng, batch=2).requires_grad_(True)
    assert torch.autograd.gradcheck(layer, (x,), eps=1e-6, atol=1e-4, rtol=1e-4)


def test_layer_exposes_description_columns(mini_fmnist):
    layer = OntologyLayer(mini_fmnist, 3)
    assert layer.out_features == len(mini_fmnist.description_order)
    assert layer.descriptions == tuple(
        d.name for d in mini_fmnist.description_order
    )
    assert layer.in_features == 3


def test_projection_is_the_only_learnable_parameter(mini_fmnist):
    layer = OntologyLayer(mini_fmnist, 4)
    params = dict(layer.named_parameters())
    assert list(params) == ["projection.weight"]
    assert params["projection.weight"].shape == (mini_fmnist.dim, 4)
