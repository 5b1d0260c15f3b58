"""Graded description-and-situation reasoning over ontology vector spaces.

An ontology of roles and descriptions induces a real vector space indexed by
element names.  Situations encode as sums of role vectors, descriptions carry
bases of their component vectors, and satisfaction probabilities fall out of
least-squares coefficients in those bases.  The package exposes the encoder,
the graded reasoner with its jacobian, a symbolic oracle with exhaustive
equivalence checking, parsers for the ontology DSL and the JSON forms, and a
CLI (``sandra``).
"""

from __future__ import annotations

from .encoder import (
    Basis,
    build_all_bases,
    build_basis,
    describe,
    element_vector,
    encode_situation,
    get_basis,
    role_vector,
)
from .errors import (
    CompositionCycleError,
    Diagnostic,
    DimensionMismatchError,
    DuplicateComponentsWarning,
    DuplicateEntityIdError,
    DuplicateNameError,
    EmptyDescriptionError,
    KindMismatchError,
    KinkWarning,
    MissingBasisError,
    NonFiniteError,
    ParseError,
    RankDeficientError,
    SandraError,
    SchemaError,
    SourceSpan,
    SubsumptionCycleError,
    UnknownDescriptionError,
    UnknownReferenceError,
    UnknownRoleError,
)
from .ontology import (
    DescriptionDecl,
    ElementId,
    Kind,
    Ontology,
    RoleDecl,
    build_ontology,
    composition_depth,
    flattened_roles,
    is_subsumed,
    resolve,
    topological_order,
)
from .parser import (
    Entity,
    Situation,
    load_declarations,
    load_ontology,
    load_situation,
    parse_ontology_dsl,
    parse_ontology_structured,
    parse_ontology_text,
    parse_situation,
    serialize_ontology_dsl,
    serialize_ontology_structured,
    serialize_situation,
)
from .reasoner import (
    Counterexample,
    GradCheckReport,
    Mode,
    OracleVerdict,
    SatisfactionReport,
    TheoremReport,
    deduce,
    enumerate_situations,
    finite_difference_jacobian,
    gradient_check,
    jacobian,
    matching_entities,
    satisfaction,
    symbolic_satisfies,
    verify_theorems,
)
from .synth import SHAPES, chain_declarations, dense_declarations, synthesize, tree_declarations

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "CompositionCycleError",
    "Counterexample",
    "DescriptionDecl",
    "Diagnostic",
    "DimensionMismatchError",
    "DuplicateComponentsWarning",
    "DuplicateEntityIdError",
    "DuplicateNameError",
    "ElementId",
    "EmptyDescriptionError",
    "Entity",
    "GradCheckReport",
    "Kind",
    "KindMismatchError",
    "KinkWarning",
    "MissingBasisError",
    "Mode",
    "NonFiniteError",
    "Ontology",
    "OracleVerdict",
    "ParseError",
    "RankDeficientError",
    "RoleDecl",
    "SHAPES",
    "SandraError",
    "SatisfactionReport",
    "SchemaError",
    "Situation",
    "SourceSpan",
    "SubsumptionCycleError",
    "TheoremReport",
    "UnknownDescriptionError",
    "UnknownReferenceError",
    "UnknownRoleError",
    "build_all_bases",
    "build_basis",
    "build_ontology",
    "chain_declarations",
    "composition_depth",
    "deduce",
    "dense_declarations",
    "describe",
    "element_vector",
    "encode_situation",
    "enumerate_situations",
    "finite_difference_jacobian",
    "flattened_roles",
    "get_basis",
    "gradient_check",
    "is_subsumed",
    "jacobian",
    "load_declarations",
    "load_ontology",
    "load_situation",
    "matching_entities",
    "parse_ontology_dsl",
    "parse_ontology_structured",
    "parse_ontology_text",
    "parse_situation",
    "resolve",
    "role_vector",
    "satisfaction",
    "serialize_ontology_dsl",
    "serialize_ontology_structured",
    "serialize_situation",
    "symbolic_satisfies",
    "synthesize",
    "topological_order",
    "tree_declarations",
    "verify_theorems",
]
