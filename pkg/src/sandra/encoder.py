"""Vector realizations of elements, descriptions, and situations.

Every element of an ontology owns one coordinate (``Ontology.index``).  A
role's vector marks its reflexive-transitive subsumption ancestors; a
description's vector is the sum of its component vectors, recursively.  A
situation's vector is the sum of the vectors of every classification of
every entity in its tree, so nesting is flattened by construction.

Vectors returned by :func:`role_vector`, :func:`describe` and
:func:`element_vector` are cached on the ontology and marked read-only;
copy before mutating.  ``build_all_bases`` pre-populates every cache, which
is the recommended setup before sharing an ontology across threads.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import numerics
from .errors import KindMismatchError, MissingBasisError, RankDeficientError, UnknownRoleError
from .ontology import ElementId, ElementLike, Kind, Ontology, resolve
from .parser import Situation


def role_vector(onto: Ontology, r: ElementLike) -> np.ndarray:
    """Indicator of the subsumption ancestors of role ``r`` (including ``r``)."""
    e = resolve(onto, r)
    if e.kind is not Kind.ROLE:
        raise KindMismatchError(f"'{e.name}' is a description, expected a role")
    return _element_vector(onto, e)


def describe(onto: Ontology, d: ElementLike) -> np.ndarray:
    """Sum of the component vectors of description ``d``, recursively."""
    e = resolve(onto, d)
    if e.kind is not Kind.DESCRIPTION:
        raise KindMismatchError(f"'{e.name}' is a role, expected a description")
    return _element_vector(onto, e)


def element_vector(onto: Ontology, x: ElementLike) -> np.ndarray:
    """Vector of any element: role indicator or recursive description sum."""
    return _element_vector(onto, resolve(onto, x))


def _element_vector(onto: Ontology, e: ElementId) -> np.ndarray:
    cache = onto._vector_cache
    got = cache.get(e)
    if got is not None:
        return got
    if e.kind is Kind.ROLE:
        vec = np.zeros(onto.dim)
        for anc in onto.ancestors[e]:
            vec[onto.index[anc]] = 1.0
    else:
        vec = np.zeros(onto.dim)
        # summed in index order so rebuilds are bit-identical
        for c in sorted(onto.components[e], key=lambda x: onto.index[x]):
            vec += _element_vector(onto, c)
    vec.setflags(write=False)
    cache[e] = vec
    return vec


@dataclass(frozen=True)
class Basis:
    """Per-description column basis with its precomputed pseudo-inverse."""

    description: ElementId
    component_order: tuple[ElementId, ...]
    matrix: np.ndarray  # dim x |d|, columns follow component_order
    pinv: np.ndarray  # |d| x dim
    rank: int

    @property
    def size(self) -> int:
        return len(self.component_order)


def build_basis(onto: Ontology, d: ElementLike) -> Basis:
    """Assemble the basis of ``d``; columns follow declaration order.

    Raises RankDeficientError when the component vectors are linearly
    dependent (the left-inverse identity is enforced to 1e-10).
    """
    e = resolve(onto, d)
    if e.kind is not Kind.DESCRIPTION:
        raise KindMismatchError(f"'{e.name}' is a role, expected a description")
    cached = onto._basis_cache.get(e)
    if cached is not None:
        return cached
    comps = onto.components[e]
    a = np.column_stack([_element_vector(onto, c) for c in comps])
    rank = numerics.rank_of(a)
    if rank < len(comps):
        raise RankDeficientError(
            f"description '{e.name}' has dependent component vectors"
            f" (rank {rank} < {len(comps)})",
            details={"description": e.name, "rank": rank, "components": len(comps)},
        )
    pinv = numerics.pseudo_inverse(a)
    defect = float(np.max(np.abs(pinv @ a - np.eye(len(comps)))))
    if defect > numerics.IDENTITY_TOL:
        raise RankDeficientError(
            f"basis of '{e.name}' is too ill-conditioned for a left inverse"
            f" (defect {defect:.3e})",
            details={"description": e.name, "defect": defect},
        )
    a.setflags(write=False)
    pinv.setflags(write=False)
    basis = Basis(e, comps, a, pinv, rank)
    onto._basis_cache[e] = basis
    return basis


def build_all_bases(onto: Ontology) -> Mapping[ElementId, Basis]:
    """Bases for every description, in index order.

    Memoized element vectors make the total assembly work quadratic in the
    number of descriptions for composition chains.
    """
    return {d: build_basis(onto, d) for d in onto.description_order}


def get_basis(bases: Mapping[ElementId, Basis], d: ElementId) -> Basis:
    try:
        return bases[d]
    except KeyError:
        raise MissingBasisError(
            f"no basis available for description '{d.name}'",
            details={"description": d.name},
        ) from None


def encode_situation(onto: Ontology, s: Situation) -> np.ndarray:
    """Vector of a situation: nesting-flattened sum of classification vectors.

    The sum runs over per-role multiplicities in index order, so the result
    is independent of entity and nesting order, bit for bit.
    """
    counts: Counter[ElementId] = Counter()
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
            counts[e] += 1
    vec = np.zeros(onto.dim)
    for role in sorted(counts, key=lambda x: onto.index[x]):
        vec += counts[role] * _element_vector(onto, role)
    return vec
