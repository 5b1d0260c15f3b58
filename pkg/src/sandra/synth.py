"""Synthetic ontology generators for scaling studies.

Three shapes bracket the cost of building every basis: ``chain`` nests each
description inside the next, ``tree`` composes a balanced binary hierarchy,
and ``dense`` wires a random DAG with edge probability 0.2.  In the dense
shape each description always carries its own fresh role, never picks the
immediately preceding description's role directly, and reaches earlier
descriptions only through the chain link, which keeps component multiplicities
small integers and every basis provably full rank.
"""

from __future__ import annotations

import random
from typing import Sequence

from .ontology import Declaration, DescriptionDecl, Ontology, RoleDecl, build_ontology

SHAPES = ("chain", "tree", "dense")

DENSE_EDGE_PROBABILITY = 0.2


def _rname(i: int, width: int) -> str:
    return f"R{i:0{width}d}"


def _dname(i: int, width: int) -> str:
    return f"D{i:0{width}d}"


def chain_declarations(n: int) -> list[Declaration]:
    """d_i = {d_(i-1), r_i}; worst case for naive recursive assembly."""
    width = len(str(n))
    decls: list[Declaration] = [RoleDecl(_rname(i, width)) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        comps = [_rname(i, width)] if i == 1 else [_dname(i - 1, width), _rname(i, width)]
        decls.append(DescriptionDecl(_dname(i, width), components=tuple(comps)))
    return decls


def tree_declarations(n: int) -> list[Declaration]:
    """Balanced binary composition over heap-indexed descriptions."""
    width = len(str(n))
    decls: list[Declaration] = []
    roles: list[RoleDecl] = []
    descs: list[DescriptionDecl] = []
    for i in range(1, n + 1):
        left, right = 2 * i, 2 * i + 1
        if left > n:
            roles.append(RoleDecl(_rname(i, width)))
            comps: tuple[str, ...] = (_rname(i, width),)
        elif right > n:
            roles.append(RoleDecl(_rname(i, width)))
            comps = (_dname(left, width), _rname(i, width))
        else:
            comps = (_dname(left, width), _dname(right, width))
        descs.append(DescriptionDecl(_dname(i, width), components=comps))
    decls.extend(roles)
    decls.extend(descs)
    return decls


def dense_declarations(n: int, seed: int = 42, p: float = DENSE_EDGE_PROBABILITY) -> list[Declaration]:
    """Random DAG: chain link plus random role picks, each with probability p."""
    rng = random.Random(seed)
    width = len(str(n))
    decls: list[Declaration] = [RoleDecl(_rname(i, width)) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        comps: list[str] = []
        if i > 1 and rng.random() < p:
            comps.append(_dname(i - 1, width))
        for j in range(1, i - 1):  # r_(i-1) stays exclusive to d_(i-1)
            if rng.random() < p:
                comps.append(_rname(j, width))
        comps.append(_rname(i, width))
        decls.append(DescriptionDecl(_dname(i, width), components=tuple(comps)))
    return decls


def synthesize(shape: str, n: int, seed: int = 42) -> Ontology:
    """Build a synthetic ontology of the requested shape and description count."""
    if shape == "chain":
        decls: Sequence[Declaration] = chain_declarations(n)
    elif shape == "tree":
        decls = tree_declarations(n)
    elif shape == "dense":
        decls = dense_declarations(n, seed)
    else:
        raise ValueError(f"unknown shape '{shape}', expected one of {SHAPES}")
    return build_ontology(decls)
