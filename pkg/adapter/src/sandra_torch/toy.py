"""Seeded toy training loop exercising the ontology layer end to end.

A fixed random linear map turns situation encodings into noisy feature
vectors; a two-layer perceptron is trained to recover what the features
describe.  The classification head learns the generating description
under cross-entropy, while the ontology layer's graded verdicts are
pulled toward the counting-read satisfaction of the true situation
under binary cross-entropy.  Everything is seeded, runs in float64 on
CPU, and produces a deterministic metrics record.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from sandra import (
    Entity,
    Kind,
    Mode,
    Ontology,
    Situation,
    build_all_bases,
    deduce,
    encode_situation,
    is_subsumed,
    load_ontology,
    symbolic_satisfies,
)
from sandra.fixtures import fixture_path

from .layer import OntologyLayer

__all__ = ["ToyTrainConfig", "ToyDataset", "synthesize_samples", "toy_train", "main"]

# width of the soft-squash tails that map rectified satisfaction values
# onto the open unit interval before the binary cross-entropy
SQUASH_DELTA = 0.05


@dataclass(frozen=True)
class ToyTrainConfig:
    """Knobs of the toy run; every field has a workable default."""

    samples: int = 1000
    epochs: int = 200
    lr: float = 5e-3
    seed: int = 42
    eval_samples: int = 200
    batch_size: int = 64
    hidden: int = 128
    feature_dim: int = 24
    noise: float = 0.03
    drop_prob: float = 0.3
    distractor_prob: float = 0.3
    fixture: str = "mini_fmnist"

    @classmethod
    def from_mapping(cls, data: dict) -> "ToyTrainConfig":
        fields = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(fields))
        if unknown:
            raise ValueError(
                f"unknown config keys: {', '.join(unknown)}"
                f" (expected a subset of: {', '.join(sorted(fields))})"
            )
        return cls(**data)

    def validate(self) -> None:
        if self.samples <= 0 or self.eval_samples <= 0:
            raise ValueError("samples and eval_samples must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.batch_size <= 0 or self.hidden <= 0 or self.feature_dim <= 0:
            raise ValueError("batch_size, hidden and feature_dim must be positive")
        if not 0.0 <= self.drop_prob < 1.0:
            raise ValueError("drop_prob must lie in [0, 1)")
        if not 0.0 <= self.distractor_prob <= 1.0:
            raise ValueError("distractor_prob must lie in [0, 1]")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")


def _resolve_ontology(name: str) -> Ontology:
    """A bundled fixture by name, or any ontology file by path."""
    try:
        return load_ontology(fixture_path(name))
    except FileNotFoundError:
        path = Path(name)
        if path.is_file():
            return load_ontology(path)
        raise


@dataclass(frozen=True)
class ToyDataset:
    features: torch.Tensor  # [n, feature_dim], float64
    targets: torch.Tensor  # [n, descriptions], counting-read satisfaction
    satisfied: torch.Tensor  # [n, descriptions], bool oracle verdicts
    labels: torch.Tensor  # [n], generating description index


def _role_pool(onto: Ontology) -> dict:
    """For each role, the roles classified at or below it, itself included."""
    return {
        r: tuple(x for x in onto.role_order if is_subsumed(onto, x, r))
        for r in onto.role_order
    }


def _satisfying_situation(
    onto: Ontology,
    target,
    rng: np.random.Generator,
    pools: dict,
    drop_prob: float,
    counter: list,
) -> Situation:
    """A situation aimed at ``target``, with top-level components dropped at random.

    Dropping models missing evidence at the level being supervised; a
    component that survives the drop is built in full, so nested
    description components always appear as coherent wholes rather than
    fragments.
    """
    counter[0] += 1
    sid = f"s{counter[0]}"
    entities = []
    nested = []
    for comp in onto.components[target]:
        if drop_prob and rng.random() < drop_prob:
            continue
        if comp.kind is Kind.ROLE:
            role = pools[comp][rng.integers(len(pools[comp]))]
            counter[0] += 1
            entities.append(Entity(f"e{counter[0]}", (role.name,)))
        else:
            nested.append(
                _satisfying_situation(onto, comp, rng, pools, 0.0, counter)
            )
    return Situation(sid, tuple(entities), tuple(nested))


def synthesize_samples(
    onto: Ontology,
    bases,
    n: int,
    rng: np.random.Generator,
    feature_map: np.ndarray,
    cfg: ToyTrainConfig,
) -> ToyDataset:
    """``n`` seeded (features, satisfaction targets, verdicts, label) rows.

    Each row picks a description, builds a situation aimed at it with
    components dropped at ``drop_prob`` (plus an occasional unrelated
    entity), encodes it, and mixes the encoding through ``feature_map``
    with additive Gaussian noise.  Targets are the counting-read
    satisfaction of the clean encoding; verdicts come from the symbolic
    oracle.
    """
    descriptions = onto.description_order
    pools = _role_pool(onto)
    all_roles = onto.role_order
    counter = [0]
    features = np.empty((n, cfg.feature_dim))
    targets = np.empty((n, len(descriptions)))
    satisfied = np.zeros((n, len(descriptions)), dtype=bool)
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        label = int(rng.integers(len(descriptions)))
        situation = _satisfying_situation(
            onto, descriptions[label], rng, pools, cfg.drop_prob, counter
        )
        if cfg.distractor_prob and rng.random() < cfg.distractor_prob:
            role = all_roles[rng.integers(len(all_roles))]
            counter[0] += 1
            extra = Entity(f"e{counter[0]}", (role.name,))
            situation = Situation(
                situation.id, situation.entities + (extra,), situation.situations
            )
        vec = encode_situation(onto, situation)
        features[i] = feature_map @ vec + cfg.noise * rng.standard_normal(
            cfg.feature_dim
        )
        targets[i] = deduce(onto, bases, vec, Mode.HEAVISIDE)
        for j, d in enumerate(descriptions):
            satisfied[i, j] = symbolic_satisfies(onto, situation, d).satisfied
        labels[i] = label
    return ToyDataset(
        features=torch.from_numpy(features),
        targets=torch.from_numpy(targets),
        satisfied=torch.from_numpy(satisfied),
        labels=torch.from_numpy(labels),
    )


class _ToyNet(nn.Module):
    """Two-layer perceptron with a classification head and an ontology head."""

    def __init__(self, onto: Ontology, feature_dim: int, hidden: int):
        super().__init__()
        self.trunk = nn.Sequential(nn.Linear(feature_dim, hidden), nn.ReLU())
        self.classify = nn.Linear(hidden, len(onto.description_order))
        self.satisfy = OntologyLayer(onto, hidden)

    def forward(self, features: torch.Tensor):
        h = self.trunk(features)
        return self.classify(h), self.satisfy(h)


def _soft_unit(p: torch.Tensor, delta: float = SQUASH_DELTA) -> torch.Tensor:
    """Map ``[0, inf)`` onto ``(0, 1)``, leaving ``[delta, 1-delta]`` untouched.

    A hard clamp would zero the gradient wherever the rectified
    satisfaction leaves the unit interval, permanently stranding those
    rows.  The exponential tails used here join the identity with
    matching slope and make the log-loss linear outside the live range,
    so every prediction keeps a restoring gradient.
    """
    low = delta * torch.exp(torch.clamp(p / delta - 1.0, max=0.0))
    high = 1.0 - delta * torch.exp(
        torch.clamp((1.0 - delta - p) / delta, min=-30.0, max=0.0)
    )
    return torch.where(p < delta, low, torch.where(p > 1.0 - delta, high, p))


def _losses(net: _ToyNet, data: ToyDataset) -> tuple[torch.Tensor, torch.Tensor]:
    logits, probs = net(data.features)
    ce = F.cross_entropy(logits, data.labels)
    bce = F.binary_cross_entropy(_soft_unit(probs), data.targets)
    return ce, bce


def _calibrate_thresholds(probs: np.ndarray, satisfied: np.ndarray) -> np.ndarray:
    """Per-description verdict cutoffs fitted on training predictions.

    For each column the cut that classifies the most training rows
    correctly is found by scanning the sorted predictions; among equally
    accurate cuts the midpoint of the widest gap wins, i.e. the
    maximum-margin separator.  A column whose training rows are all one
    verdict falls back to a cut just outside its observed range.
    """
    n, m = probs.shape
    out = np.empty(m)
    for j in range(m):
        order = np.argsort(probs[:, j], kind="stable")
        values = probs[order, j]
        sat = satisfied[order, j]
        # correct rows for a cut placed after position i: unsat rows at or
        # below it plus sat rows above it (cut index 0 = below everything)
        unsat_below = np.concatenate(([0], np.cumsum(~sat)))
        sat_above = np.concatenate((np.cumsum(sat[::-1])[::-1], [0]))
        correct = unsat_below + sat_above
        best = correct.max()
        gaps = np.concatenate(([0.2], np.diff(values), [0.2]))
        gaps[correct < best] = -1.0
        i = int(np.argmax(gaps))
        if i == 0:
            out[j] = values[0] - 0.1
        elif i == n:
            out[j] = values[-1] + 0.1
        else:
            out[j] = (values[i - 1] + values[i]) / 2.0
    return out


def _agreement(net: _ToyNet, data: ToyDataset, thresholds: np.ndarray) -> dict:
    with torch.no_grad():
        _, probs = net(data.features)
    predicted = probs.numpy() >= thresholds
    matches = predicted == data.satisfied.numpy()
    return {
        "samples": int(data.features.shape[0]),
        "sample_agreement": float(matches.all(axis=1).mean()),
        "pair_agreement": float(matches.mean()),
    }


def toy_train(cfg: ToyTrainConfig, progress=None) -> dict:
    """Run the seeded toy experiment and return its metrics record.

    The record holds the config, the per-epoch loss curves measured on
    the full training set at epoch boundaries (index 0 is the untrained
    net, so ``epochs = 0`` leaves exactly the initial loss), and the
    held-out agreement between thresholded layer verdicts and the
    symbolic oracle.  Identical configs produce identical records on
    one machine.  ``progress`` is an optional callable given one line
    per epoch.
    """
    cfg.validate()
    onto = _resolve_ontology(cfg.fixture)
    bases = build_all_bases(onto)
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    feature_map = rng.standard_normal((cfg.feature_dim, onto.dim)) / np.sqrt(onto.dim)
    train = synthesize_samples(onto, bases, cfg.samples, rng, feature_map, cfg)
    held_out = synthesize_samples(onto, bases, cfg.eval_samples, rng, feature_map, cfg)

    net = _ToyNet(onto, cfg.feature_dim, cfg.hidden).double()
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.lr)

    ce_curve, bce_curve, total_curve = [], [], []

    def record(epoch: int) -> None:
        with torch.no_grad():
            ce, bce = _losses(net, train)
        ce_curve.append(float(ce))
        bce_curve.append(float(bce))
        total_curve.append(float(ce) + float(bce))
        if progress is not None:
            progress(
                f"epoch {epoch:3d}  bce {bce_curve[-1]:.6f}  ce {ce_curve[-1]:.6f}"
            )

    record(0)
    n = cfg.samples
    for epoch in range(1, cfg.epochs + 1):
        order = torch.randperm(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch = ToyDataset(
                train.features[idx],
                train.targets[idx],
                train.satisfied[idx],
                train.labels[idx],
            )
            optimizer.zero_grad()
            ce, bce = _losses(net, batch)
            (ce + bce).backward()
            optimizer.step()
        record(epoch)

    with torch.no_grad():
        _, train_probs = net(train.features)
    thresholds = _calibrate_thresholds(
        train_probs.numpy(), train.satisfied.numpy()
    )
    return {
        "fixture": cfg.fixture,
        "config": dataclasses.asdict(cfg),
        "descriptions": [d.name for d in onto.description_order],
        "thresholds": {
            d.name: float(t) for d, t in zip(onto.description_order, thresholds)
        },
        "loss": {"bce": bce_curve, "ce": ce_curve, "total": total_curve},
        "initial_bce": bce_curve[0],
        "final_bce": bce_curve[-1],
        "eval": _agreement(net, held_out, thresholds),
    }


def _build_argparser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toy-train",
        description="Train the seeded toy perceptron and write a metrics record.",
    )
    parser.add_argument("--config", help="JSON file of config overrides")
    parser.add_argument(
        "--out",
        default="toy_metrics.json",
        help="where to write the metrics record (default: %(default)s)",
    )
    parser.add_argument("--samples", type=int, help="training sample count")
    parser.add_argument("--epochs", type=int, help="training epochs")
    parser.add_argument("--lr", type=float, help="learning rate")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--eval-samples", type=int, help="held-out sample count")
    parser.add_argument("--fixture", help="bundled ontology name or file path")
    parser.add_argument(
        "--quiet", action="store_true", help="suppress per-epoch progress"
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_argparser().parse_args(argv)
    overrides = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as err:
            print(f"toy-train: cannot read config: {err}", file=sys.stderr)
            return 1
        except json.JSONDecodeError as err:
            print(f"toy-train: config is not valid JSON: {err}", file=sys.stderr)
            return 1
        if not isinstance(loaded, dict):
            print("toy-train: config must be a JSON object", file=sys.stderr)
            return 1
        overrides.update(loaded)
    for key in ("samples", "epochs", "lr", "seed", "fixture"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.eval_samples is not None:
        overrides["eval_samples"] = args.eval_samples
    try:
        cfg = ToyTrainConfig.from_mapping(overrides)
        progress = None if args.quiet else lambda line: print(line)
        started = time.perf_counter()
        metrics = toy_train(cfg, progress=progress)
        elapsed = time.perf_counter() - started
    except (ValueError, TypeError, FileNotFoundError) as err:
        print(f"toy-train: {err}", file=sys.stderr)
        return 1
    Path(args.out).write_text(
        json.dumps(metrics, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if not args.quiet:
        ev = metrics["eval"]
        print(
            f"done in {elapsed:.1f}s: bce {metrics['initial_bce']:.4f} -> "
            f"{metrics['final_bce']:.4f}, held-out sample agreement "
            f"{ev['sample_agreement']:.3f} ({ev['samples']} samples)"
        )
        print(f"metrics written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
