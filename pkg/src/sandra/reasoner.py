"""Graded satisfaction of descriptions by situation vectors.

A situation vector is projected onto each description's component basis via
the precomputed pseudo-inverse.  The Heaviside reading counts strictly
positive coefficients; the rectified reading sums them and stays
differentiable almost everywhere, with the subgradient at a kink chosen as
zero.  ``symbolic_satisfies`` is an independent, purely set-theoretic oracle
over the same flattened view of a situation that the encoder uses:
a role component is matched by any entity in the tree classified at or
below it, and a description component is matched when it is itself nearly
satisfied.  ``verify_theorems`` cross-checks the two routes and reports any
disagreement instead of hiding it.
"""

from __future__ import annotations

import itertools
import warnings as _warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from . import numerics
from .encoder import Basis, build_all_bases, encode_situation, get_basis
from .errors import KindMismatchError, KinkWarning, UnknownRoleError
from .ontology import ElementId, ElementLike, Kind, Ontology, is_subsumed, resolve
from .parser import Entity, Situation

# strict-positivity threshold for the Heaviside count
EPS_POS = 1e-9
# coefficients this close to zero sit at the rectifier kink
KINK_TOL = 1e-6


class Mode(Enum):
    HEAVISIDE = "heaviside"
    RELU = "relu"


@dataclass(frozen=True)
class SatisfactionReport:
    description: ElementId
    mode: Mode
    coefficients: np.ndarray  # one per component, declaration order
    active_mask: np.ndarray  # coefficients > EPS_POS
    probability: float
    residual_norm: float  # diagnostic only; never gates the probability


def satisfaction(basis: Basis, v: np.ndarray, mode: Mode = Mode.HEAVISIDE) -> SatisfactionReport:
    """Graded satisfaction of one description by the vector ``v``."""
    vec = numerics.as_vector(v, basis.matrix.shape[0])
    x, residual = numerics.solve_coefficients(basis.matrix, vec, basis.pinv)
    active = x > EPS_POS
    k = basis.size
    if mode is Mode.HEAVISIDE:
        probability = float(np.count_nonzero(active)) / k
    else:
        probability = float(np.sum(np.clip(x, 0.0, None))) / k
    x.setflags(write=False)
    active.setflags(write=False)
    return SatisfactionReport(
        description=basis.description,
        mode=mode,
        coefficients=x,
        active_mask=active,
        probability=probability,
        residual_norm=residual,
    )


def deduce(
    onto: Ontology,
    bases: Mapping[ElementId, Basis],
    v: np.ndarray,
    mode: Mode = Mode.HEAVISIDE,
) -> np.ndarray:
    """Satisfaction probability of every description, in index order.

    Repeated calls with the same inputs are bit-identical.
    """
    vec = numerics.as_vector(v, onto.dim)
    out = np.empty(len(onto.description_order))
    for i, d in enumerate(onto.description_order):
        out[i] = satisfaction(get_basis(bases, d), vec, mode).probability
    return out


def jacobian(
    onto: Ontology,
    bases: Mapping[ElementId, Basis],
    v: np.ndarray,
) -> np.ndarray:
    """Derivative of the rectified ``deduce`` with respect to ``v``.

    Row ``d`` averages the pseudo-inverse rows of the strictly positive
    coefficients of ``d``.  Coefficients within ``KINK_TOL`` of zero emit a
    :class:`KinkWarning`; the subgradient contributed there follows the same
    strict-positivity rule, i.e. zero at the kink itself.
    """
    vec = numerics.as_vector(v, onto.dim)
    rows = np.zeros((len(onto.description_order), onto.dim))
    for i, d in enumerate(onto.description_order):
        basis = get_basis(bases, d)
        x = basis.pinv @ vec
        for j, xj in enumerate(x):
            if abs(xj) <= KINK_TOL:
                _warnings.warn(
                    f"coefficient {j} of '{d.name}' is at the rectifier kink"
                    f" (value {xj:.3e})",
                    KinkWarning,
                    stacklevel=2,
                )
        positive = x > 0.0
        if np.any(positive):
            rows[i] = basis.pinv[positive].sum(axis=0) / basis.size
    return rows


def finite_difference_jacobian(
    onto: Ontology,
    bases: Mapping[ElementId, Basis],
    v: np.ndarray,
    h: float = 1e-5,
) -> np.ndarray:
    """Central-difference derivative of the rectified ``deduce``.

    All coordinate perturbations of one description are evaluated in a
    single batch; column ``j`` is the two-point central difference of the
    rectified probability along coordinate ``j``.
    """
    vec = numerics.as_vector(v, onto.dim)
    steps = h * np.eye(onto.dim)
    out = np.zeros((len(onto.description_order), onto.dim))
    for i, d in enumerate(onto.description_order):
        basis = get_basis(bases, d)
        hi = basis.pinv @ (vec[:, None] + steps)
        lo = basis.pinv @ (vec[:, None] - steps)
        p_hi = np.clip(hi, 0.0, None).sum(axis=0) / basis.size
        p_lo = np.clip(lo, 0.0, None).sum(axis=0) / basis.size
        out[i] = (p_hi - p_lo) / (2.0 * h)
    return out


@dataclass(frozen=True)
class GradCheckReport:
    trials: int
    max_rel_error: float
    resamples: int

    @property
    def vacuous(self) -> bool:
        return self.trials == 0


def gradient_check(
    onto: Ontology,
    bases: Optional[Mapping[ElementId, Basis]] = None,
    *,
    trials: int = 100,
    seed: int = 42,
    h: float = 1e-5,
    kink_filter: float = 1e-4,
) -> GradCheckReport:
    """Compare the analytic jacobian against central differences.

    Sample points are redrawn until every coefficient of every description
    clears ``kink_filter``, keeping the finite differences on one linear
    piece.  Zero trials is a vacuous pass.
    """
    if bases is None:
        bases = build_all_bases(onto)
    rng = np.random.default_rng(seed)
    max_rel = 0.0
    resamples = 0
    done = 0
    budget = 200 * max(trials, 1)
    while done < trials:
        if budget <= 0:
            raise RuntimeError("could not sample enough kink-free points")
        budget -= 1
        v = rng.standard_normal(onto.dim)
        near_kink = False
        for d in onto.description_order:
            x = get_basis(bases, d).pinv @ v
            if np.any(np.abs(x) <= kink_filter):
                near_kink = True
                break
        if near_kink:
            resamples += 1
            continue
        analytic = jacobian(onto, bases, v)
        numeric = finite_difference_jacobian(onto, bases, v, h)
        scale = max(1.0, float(np.max(np.abs(analytic))))
        rel = float(np.max(np.abs(analytic - numeric))) / scale
        max_rel = max(max_rel, rel)
        done += 1
    return GradCheckReport(trials=trials, max_rel_error=max_rel, resamples=resamples)


# ---------------------------------------------------------------------------
# symbolic oracle


@dataclass(frozen=True)
class OracleVerdict:
    satisfied: bool
    nearly_satisfied: bool
    matched_components: tuple[ElementId, ...]


def _flat_classes(onto: Ontology, s: Situation) -> frozenset[ElementId]:
    got: set[ElementId] = set()
    for entity in s.all_entities():
        for name in entity.classifications:
            try:
                e = onto._by_name[name]
            except KeyError:
                raise UnknownRoleError(
                    f"entity '{entity.id}' uses undeclared role '{name}'",
                    details={"entity": entity.id, "name": name},
                ) from None
            if e.kind is not Kind.ROLE:
                raise UnknownRoleError(
                    f"entity '{entity.id}' uses '{name}', which is a description,"
                    " not a role",
                    details={"entity": entity.id, "name": name},
                )
            got.add(e)
    return frozenset(got)


def _component_matched(
    onto: Ontology, classes: frozenset[ElementId], comp: ElementId
) -> bool:
    if comp.kind is Kind.ROLE:
        return any(is_subsumed(onto, c, comp) for c in classes)
    return any(
        _component_matched(onto, classes, sub) for sub in onto.components[comp]
    )


def symbolic_satisfies(onto: Ontology, s: Situation, d: ElementLike) -> OracleVerdict:
    """Set-theoretic satisfaction verdict; no vectors involved.

    The situation is read as its flattened multiset of classifications,
    mirroring the encoding.  A role component needs an entity classified at
    or below it; a description component needs to be nearly satisfied
    itself, recursively.
    """
    e = resolve(onto, d)
    if e.kind is not Kind.DESCRIPTION:
        raise KindMismatchError(f"'{e.name}' is a role, expected a description")
    classes = _flat_classes(onto, s)
    matched = tuple(
        c for c in onto.components[e] if _component_matched(onto, classes, c)
    )
    total = len(onto.components[e])
    return OracleVerdict(
        satisfied=len(matched) == total,
        nearly_satisfied=len(matched) > 0,
        matched_components=matched,
    )


def matching_entities(onto: Ontology, s: Situation, comp: ElementLike) -> tuple[str, ...]:
    """Ids of entities anywhere in ``s`` whose classifications match ``comp``."""
    c = resolve(onto, comp)

    def entity_matches(entity: Entity) -> bool:
        classes = frozenset(
            onto._by_name[name]
            for name in entity.classifications
            if name in onto._by_name and onto._by_name[name].kind is Kind.ROLE
        )
        return _component_matched(onto, classes, c)

    return tuple(e.id for e in s.all_entities() if entity_matches(e))


# ---------------------------------------------------------------------------
# theorem verification


@dataclass(frozen=True)
class Counterexample:
    situation: Situation
    description: ElementId
    probability: float
    coefficients: tuple[float, ...]
    active_mask: tuple[bool, ...]
    verdict: OracleVerdict


@dataclass(frozen=True)
class TheoremReport:
    situations: int
    pairs: int
    counterexamples: tuple[Counterexample, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_theorems(
    onto: Ontology,
    situations: Sequence[Situation],
    bases: Optional[Mapping[ElementId, Basis]] = None,
) -> TheoremReport:
    """Check geometric vs symbolic satisfaction on every (situation, description).

    Asserts the three equivalences: probability 1 iff satisfied, positive
    probability iff nearly satisfied, zero probability iff not nearly
    satisfied.  Disagreements come back as counterexamples with full
    coefficients, masks and the oracle verdict.
    """
    if bases is None:
        bases = build_all_bases(onto)
    bad: list[Counterexample] = []
    pairs = 0
    for s in situations:
        v = encode_situation(onto, s)
        for d in onto.description_order:
            pairs += 1
            basis = get_basis(bases, d)
            report = satisfaction(basis, v, Mode.HEAVISIDE)
            active = int(np.count_nonzero(report.active_mask))
            verdict = symbolic_satisfies(onto, s, d)
            agrees = (
                ((active == basis.size) == verdict.satisfied)
                and ((active > 0) == verdict.nearly_satisfied)
                and ((active == 0) == (not verdict.nearly_satisfied))
            )
            if not agrees:
                bad.append(
                    Counterexample(
                        situation=s,
                        description=d,
                        probability=report.probability,
                        coefficients=tuple(float(c) for c in report.coefficients),
                        active_mask=tuple(bool(b) for b in report.active_mask),
                        verdict=verdict,
                    )
                )
    return TheoremReport(
        situations=len(situations), pairs=pairs, counterexamples=tuple(bad)
    )


def enumerate_situations(
    onto: Ontology,
    max_entities: int = 4,
    max_depth: int = 2,
    max_children: int = 2,
) -> Iterator[Situation]:
    """Canonical exhaustive family of situations over an ontology's roles.

    Every node carries a set of single-classification entities (one per
    distinct role); trees have at most ``max_depth`` levels, at most
    ``max_children`` nested situations per node, and at most
    ``max_entities`` entities in total.  Enumeration order is deterministic.
    """
    roles = onto.role_order
    subsets: list[tuple[ElementId, ...]] = []
    for size in range(0, max_entities + 1):
        subsets.extend(itertools.combinations(roles, size))
    nonempty = [s for s in subsets if s]
    counter = itertools.count()

    def make(top: tuple[ElementId, ...], children: tuple[tuple[ElementId, ...], ...]) -> Situation:
        sid = next(counter)
        eid = itertools.count()
        nested = tuple(
            Situation(
                id=f"v{sid}.{k}",
                entities=tuple(
                    Entity(f"e{sid}.{next(eid)}", (r.name,)) for r in child
                ),
            )
            for k, child in enumerate(children)
        )
        return Situation(
            id=f"v{sid}",
            entities=tuple(Entity(f"e{sid}.{next(eid)}", (r.name,)) for r in top),
            situations=nested,
        )

    for top in subsets:
        yield make(top, ())
    if max_depth < 2:
        return
    for top in subsets:
        room = max_entities - len(top)
        if room < 1:
            continue
        for k in range(1, max_children + 1):
            for combo in _bounded_combos(nonempty, k, room):
                yield make(top, combo)


def _bounded_combos(
    pool: Sequence[tuple[ElementId, ...]], k: int, room: int, start: int = 0
) -> Iterator[tuple[tuple[ElementId, ...], ...]]:
    """Index-nondecreasing ``k``-tuples from ``pool`` with total length <= room.

    ``pool`` must be sorted by nondecreasing length; the cutoff then skips
    every infeasible suffix while preserving the order a filtered
    ``combinations_with_replacement`` would produce.
    """
    if k == 0:
        yield ()
        return
    for i in range(start, len(pool)):
        head = pool[i]
        if len(head) > room:
            break
        for tail in _bounded_combos(pool, k - 1, room - len(head), i):
            yield (head,) + tail
