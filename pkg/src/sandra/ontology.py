"""Validated role/description ontologies.

An ontology is a finite set of *roles* and *descriptions*.  Descriptions are
composed of components (roles or other descriptions, acyclically) and both
kinds may declare subsumption parents of the same kind.  Construction
validates everything once; the resulting :class:`Ontology` is immutable and
safe to share between threads.  Per-ontology memo tables are attached here so
vector assembly elsewhere can cache against the owning object; entries are
pure functions of their key, so racing insertions are benign under CPython.
"""

from __future__ import annotations

import enum
import heapq
import warnings as _warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    CompositionCycleError,
    DuplicateComponentsWarning,
    DuplicateNameError,
    EmptyDescriptionError,
    KindMismatchError,
    SourceSpan,
    SubsumptionCycleError,
    UnknownReferenceError,
)


class Kind(enum.Enum):
    ROLE = "role"
    DESCRIPTION = "description"


@dataclass(frozen=True, order=True)
class ElementId:
    """Name plus kind; the name alone is unique within an ontology."""

    name: str
    kind: Kind = field(compare=False)

    def __repr__(self) -> str:
        return f"{self.kind.value}:{self.name}"


@dataclass(frozen=True)
class RoleDecl:
    name: str
    parents: tuple[str, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class DescriptionDecl:
    name: str
    components: tuple[str, ...] = ()
    parents: tuple[str, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False)


Declaration = Union[RoleDecl, DescriptionDecl]

ElementLike = Union[ElementId, str]


@dataclass(frozen=True, eq=False)
class Ontology:
    """Immutable validated ontology.

    ``index`` assigns coordinates by ascending lexicographic name order over
    roles and descriptions together, so the vector-space layout is a pure
    function of the declared names.
    """

    roles: frozenset[ElementId]
    descriptions: frozenset[ElementId]
    components: Mapping[ElementId, tuple[ElementId, ...]]
    parents: Mapping[ElementId, tuple[ElementId, ...]]
    ancestors: Mapping[ElementId, frozenset[ElementId]]
    index: Mapping[ElementId, int]
    elements: tuple[ElementId, ...]
    declarations: tuple[Declaration, ...]
    warnings: tuple[str, ...] = ()
    # memo tables for vector assembly; see module docstring for the
    # concurrency contract
    _vector_cache: dict = field(default_factory=dict, repr=False)
    _basis_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.elements)

    @property
    def description_order(self) -> tuple[ElementId, ...]:
        return tuple(e for e in self.elements if e.kind is Kind.DESCRIPTION)

    @property
    def role_order(self) -> tuple[ElementId, ...]:
        return tuple(e for e in self.elements if e.kind is Kind.ROLE)

    def element(self, name: str) -> ElementId:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownReferenceError(
                f"unknown element '{name}'", details={"name": name}
            ) from None

    @property
    def _by_name(self) -> Mapping[str, ElementId]:
        return self._name_map

    # populated by build_ontology via object.__setattr__
    _name_map: Mapping[str, ElementId] = field(default_factory=dict, repr=False)


def resolve(onto: Ontology, x: ElementLike) -> ElementId:
    """Accept either an ElementId belonging to ``onto`` or a bare name."""
    if isinstance(x, str):
        return onto.element(x)
    if x not in onto.index:
        raise UnknownReferenceError(f"element {x!r} is not part of this ontology")
    return x


def build_ontology(decls: Sequence[Declaration]) -> Ontology:
    """Validate declarations and assemble an :class:`Ontology`.

    Raises DuplicateNameError, UnknownReferenceError, KindMismatchError,
    EmptyDescriptionError, SubsumptionCycleError or CompositionCycleError on
    invalid input.  Descriptions with identical component sets are legal but
    produce a :class:`DuplicateComponentsWarning` and an entry in
    ``Ontology.warnings``.
    """
    by_name: dict[str, ElementId] = {}
    spans: dict[str, Optional[SourceSpan]] = {}
    for d in decls:
        kind = Kind.ROLE if isinstance(d, RoleDecl) else Kind.DESCRIPTION
        if d.name in by_name:
            raise DuplicateNameError(
                f"name '{d.name}' is declared more than once",
                span=d.span,
                details={"name": d.name},
            )
        by_name[d.name] = ElementId(d.name, kind)
        spans[d.name] = d.span

    def look(name: str, *, context: str, span: Optional[SourceSpan]) -> ElementId:
        if name not in by_name:
            raise UnknownReferenceError(
                f"{context} references undeclared name '{name}'",
                span=span,
                details={"name": name},
            )
        return by_name[name]

    parents: dict[ElementId, tuple[ElementId, ...]] = {}
    components: dict[ElementId, tuple[ElementId, ...]] = {}
    for d in decls:
        me = by_name[d.name]
        plist: list[ElementId] = []
        for p in d.parents:
            pid = look(p, context=f"'{d.name}'", span=d.span)
            if pid.kind is not me.kind:
                raise KindMismatchError(
                    f"'{d.name}' ({me.kind.value}) cannot be subsumed by"
                    f" '{p}' ({pid.kind.value}); subsumption stays within one kind",
                    span=d.span,
                    details={"child": d.name, "parent": p},
                )
            if pid not in plist:
                plist.append(pid)
        parents[me] = tuple(plist)
        if isinstance(d, DescriptionDecl):
            if not d.components:
                raise EmptyDescriptionError(
                    f"description '{d.name}' declares no components",
                    span=d.span,
                    details={"name": d.name},
                )
            clist: list[ElementId] = []
            for c in d.components:
                cid = look(c, context=f"description '{d.name}'", span=d.span)
                if cid not in clist:  # set semantics; order kept for reporting
                    clist.append(cid)
            components[me] = tuple(clist)

    _check_acyclic(
        {e: parents[e] for e in parents},
        kind="subsumption",
        spans=spans,
        error=SubsumptionCycleError,
    )
    _check_acyclic(
        {
            e: tuple(c for c in comps if c.kind is Kind.DESCRIPTION)
            for e, comps in components.items()
        },
        kind="composition",
        spans=spans,
        error=CompositionCycleError,
    )

    ancestors: dict[ElementId, frozenset[ElementId]] = {}

    def close(e: ElementId) -> frozenset[ElementId]:
        got = ancestors.get(e)
        if got is None:
            acc = {e}
            for p in parents[e]:
                acc |= close(p)
            got = frozenset(acc)
            ancestors[e] = got
        return got

    for e in by_name.values():
        close(e)

    elements = tuple(sorted(by_name.values(), key=lambda e: e.name))
    index = {e: i for i, e in enumerate(elements)}

    warn_list: list[str] = []
    seen_sets: dict[frozenset[ElementId], ElementId] = {}
    for e in elements:
        if e.kind is not Kind.DESCRIPTION:
            continue
        key = frozenset(components[e])
        if key in seen_sets:
            msg = (
                f"descriptions '{seen_sets[key].name}' and '{e.name}'"
                " have identical component sets"
            )
            warn_list.append(msg)
            _warnings.warn(msg, DuplicateComponentsWarning, stacklevel=2)
        else:
            seen_sets[key] = e

    onto = Ontology(
        roles=frozenset(e for e in elements if e.kind is Kind.ROLE),
        descriptions=frozenset(e for e in elements if e.kind is Kind.DESCRIPTION),
        components=MappingProxyType(components),
        parents=MappingProxyType(parents),
        ancestors=MappingProxyType(ancestors),
        index=MappingProxyType(index),
        elements=elements,
        declarations=tuple(decls),
        warnings=tuple(warn_list),
    )
    object.__setattr__(onto, "_name_map", MappingProxyType(by_name))
    return onto


def _check_acyclic(
    edges: Mapping[ElementId, tuple[ElementId, ...]],
    *,
    kind: str,
    spans: Mapping[str, Optional[SourceSpan]],
    error: type,
) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    state = {e: WHITE for e in edges}
    stack: list[ElementId] = []

    def visit(e: ElementId) -> None:
        state[e] = GREY
        stack.append(e)
        for nxt in edges.get(e, ()):
            if nxt not in state:
                continue
            if state[nxt] == GREY:
                cycle = stack[stack.index(nxt):] + [nxt]
                path = " -> ".join(x.name for x in cycle)
                raise error(
                    f"{kind} cycle: {path}",
                    span=spans.get(nxt.name),
                    details={"cycle": [x.name for x in cycle]},
                )
            if state[nxt] == WHITE:
                visit(nxt)
        stack.pop()
        state[e] = BLACK

    for e in edges:
        if state[e] == WHITE:
            visit(e)


def is_subsumed(onto: Ontology, x: ElementLike, y: ElementLike) -> bool:
    """Reflexive-transitive subsumption test: x is y or descends from y."""
    xe = resolve(onto, x)
    ye = resolve(onto, y)
    return ye in onto.ancestors[xe]


def topological_order(onto: Ontology) -> tuple[ElementId, ...]:
    """Order over all elements where children precede subsumption parents.

    Ties break lexicographically, so the result is deterministic for a given
    ontology.
    """
    remaining = {e: 0 for e in onto.elements}
    for child in onto.elements:
        for p in onto.parents[child]:
            remaining[p] += 1
    ready = [e.name for e, n in remaining.items() if n == 0]
    heapq.heapify(ready)
    out: list[ElementId] = []
    while ready:
        name = heapq.heappop(ready)
        e = onto.element(name)
        out.append(e)
        for p in onto.parents[e]:
            remaining[p] -= 1
            if remaining[p] == 0:
                heapq.heappush(ready, p.name)
    return tuple(out)


def composition_depth(onto: Ontology, d: ElementLike) -> int:
    """Longest chain of nested description components below ``d`` (>= 1)."""
    e = resolve(onto, d)
    if e.kind is not Kind.DESCRIPTION:
        raise KindMismatchError(f"'{e.name}' is a role; only descriptions have components")

    def depth(x: ElementId) -> int:
        nested = [depth(c) for c in onto.components[x] if c.kind is Kind.DESCRIPTION]
        return 1 + max(nested, default=0)

    return depth(e)


def flattened_roles(onto: Ontology, d: ElementLike) -> tuple[ElementId, ...]:
    """Role leaves of the composition tree under ``d``, with repetition,
    in recursive component order."""
    e = resolve(onto, d)
    if e.kind is not Kind.DESCRIPTION:
        raise KindMismatchError(f"'{e.name}' is a role; only descriptions have components")
    out: list[ElementId] = []

    def walk(x: ElementId) -> None:
        for c in onto.components[x]:
            if c.kind is Kind.ROLE:
                out.append(c)
            else:
                walk(c)

    walk(e)
    return tuple(out)
