from __future__ import annotations

import pytest

from sandra import (
    CompositionCycleError,
    DescriptionDecl,
    DuplicateComponentsWarning,
    DuplicateNameError,
    EmptyDescriptionError,
    Kind,
    KindMismatchError,
    RoleDecl,
    SubsumptionCycleError,
    UnknownReferenceError,
    build_ontology,
    composition_depth,
    flattened_roles,
    is_subsumed,
    resolve,
    topological_order,
)


def test_fig_shape(fig):
    assert len(fig.roles) == 4
    assert len(fig.descriptions) == 1
    assert fig.dim == 5
    assert [e.name for e in fig.elements] == ["Circle", "Color", "Fig", "Red", "Shape"]


def test_index_is_sorted_by_name(ontologies):
    for onto in ontologies.values():
        names = [e.name for e in onto.elements]
        assert names == sorted(names)
        assert all(onto.index[e] == i for i, e in enumerate(onto.elements))
        assert onto.dim == len(onto.roles) + len(onto.descriptions)


def test_role_and_description_order_partition_elements(panel):
    merged = sorted(
        panel.role_order + panel.description_order, key=lambda e: panel.index[e]
    )
    assert tuple(merged) == panel.elements


def test_element_lookup(fig):
    shape = fig.element("Shape")
    assert shape.kind is Kind.ROLE
    assert fig.element("Fig").kind is Kind.DESCRIPTION
    with pytest.raises(UnknownReferenceError):
        fig.element("Nope")


def test_resolve_accepts_names_and_ids(fig, panel):
    shape = fig.element("Shape")
    assert resolve(fig, "Shape") is shape
    assert resolve(fig, shape) is shape
    foreign = panel.element("Number")
    with pytest.raises(UnknownReferenceError):
        resolve(fig, foreign)


def test_is_subsumed_reflexive_and_transitive(fig, mini_fmnist):
    assert is_subsumed(fig, "Circle", "Circle")
    assert is_subsumed(fig, "Circle", "Shape")
    assert not is_subsumed(fig, "Shape", "Circle")
    assert not is_subsumed(fig, "Circle", "Color")
    # description-level subsumption
    assert is_subsumed(mini_fmnist, "Coat", "UpperBodyClothes")
    assert not is_subsumed(mini_fmnist, "UpperBodyClothes", "Coat")


def test_multi_level_subsumption_closure():
    onto = build_ontology(
        [
            RoleDecl("A"),
            RoleDecl("B", parents=("A",)),
            RoleDecl("C", parents=("B",)),
        ]
    )
    assert is_subsumed(onto, "C", "A")
    c = onto.element("C")
    assert {e.name for e in onto.ancestors[c]} == {"A", "B", "C"}


def test_duplicate_name_rejected():
    with pytest.raises(DuplicateNameError) as err:
        build_ontology([RoleDecl("A"), RoleDecl("A")])
    assert err.value.code == "DuplicateName"
    assert err.value.details["name"] == "A"


def test_duplicate_name_across_kinds_rejected():
    with pytest.raises(DuplicateNameError):
        build_ontology(
            [RoleDecl("A"), RoleDecl("X"), DescriptionDecl("A", components=("X",))]
        )


def test_unknown_reference_rejected():
    with pytest.raises(UnknownReferenceError):
        build_ontology([RoleDecl("A", parents=("Missing",))])
    with pytest.raises(UnknownReferenceError):
        build_ontology([DescriptionDecl("D", components=("Missing",))])


def test_kind_mismatch_in_parents_rejected():
    decls = [
        RoleDecl("A"),
        DescriptionDecl("D", components=("A",)),
        RoleDecl("B", parents=("D",)),
    ]
    with pytest.raises(KindMismatchError):
        build_ontology(decls)
    decls = [
        RoleDecl("A"),
        DescriptionDecl("D", components=("A",), parents=("A",)),
    ]
    with pytest.raises(KindMismatchError):
        build_ontology(decls)


def test_empty_description_rejected():
    with pytest.raises(EmptyDescriptionError):
        build_ontology([DescriptionDecl("D", components=())])


def test_subsumption_cycle_rejected():
    decls = [
        RoleDecl("A", parents=("B",)),
        RoleDecl("B", parents=("C",)),
        RoleDecl("C", parents=("A",)),
    ]
    with pytest.raises(SubsumptionCycleError) as err:
        build_ontology(decls)
    assert " -> " in err.value.message
    cycle = err.value.details["cycle"]
    assert cycle[0] == cycle[-1]
    assert set(cycle) == {"A", "B", "C"}


def test_composition_cycle_rejected():
    decls = [
        RoleDecl("R"),
        DescriptionDecl("D1", components=("D2", "R")),
        DescriptionDecl("D2", components=("D1",)),
    ]
    with pytest.raises(CompositionCycleError) as err:
        build_ontology(decls)
    assert set(err.value.details["cycle"]) == {"D1", "D2"}


def test_self_cycles_rejected():
    with pytest.raises(SubsumptionCycleError):
        build_ontology([RoleDecl("A", parents=("A",))])
    with pytest.raises(CompositionCycleError):
        build_ontology([DescriptionDecl("D", components=("D",))])


def test_duplicate_component_sets_warn():
    decls = [
        RoleDecl("A"),
        RoleDecl("B"),
        DescriptionDecl("D1", components=("A", "B")),
        DescriptionDecl("D2", components=("B", "A")),
    ]
    with pytest.warns(DuplicateComponentsWarning):
        onto = build_ontology(decls)
    assert len(onto.warnings) == 1
    assert "D1" in onto.warnings[0] and "D2" in onto.warnings[0]


def test_repeated_components_and_parents_deduplicate():
    decls = [
        RoleDecl("A"),
        RoleDecl("B", parents=("A", "A")),
        DescriptionDecl("D", components=("A", "A", "B")),
    ]
    onto = build_ontology(decls)
    d = onto.element("D")
    assert tuple(c.name for c in onto.components[d]) == ("A", "B")
    b = onto.element("B")
    assert tuple(p.name for p in onto.parents[b]) == ("A",)


def test_topological_order_children_before_parents(mini_fmnist):
    order = topological_order(mini_fmnist)
    assert sorted(order, key=lambda e: e.name) == list(mini_fmnist.elements)
    position = {e: i for i, e in enumerate(order)}
    for child in mini_fmnist.elements:
        for parent in mini_fmnist.parents[child]:
            assert position[child] < position[parent]
    assert order == topological_order(mini_fmnist)


def test_composition_depth(fig, panel, mini_iraven):
    assert composition_depth(fig, "Fig") == 1
    assert composition_depth(panel, "Panel") == 2
    assert composition_depth(mini_iraven, "Figure") == 1
    assert composition_depth(mini_iraven, "Panel") == 2
    assert composition_depth(mini_iraven, "Matrix") == 3
    with pytest.raises(KindMismatchError):
        composition_depth(fig, "Shape")


def test_flattened_roles(panel, mini_fmnist):
    assert tuple(r.name for r in flattened_roles(panel, "Panel")) == (
        "Shape",
        "Color",
        "Number",
    )
    assert tuple(r.name for r in flattened_roles(mini_fmnist, "Outfit")) == (
        "FootCover",
        "Closure",
        "TorsoCover",
        "Sleeves",
    )
    with pytest.raises(KindMismatchError):
        flattened_roles(panel, "Shape")


def test_flattened_roles_keep_repetition():
    decls = [
        RoleDecl("A"),
        RoleDecl("B"),
        DescriptionDecl("Inner", components=("A",)),
        DescriptionDecl("Outer", components=("Inner", "A", "B")),
    ]
    onto = build_ontology(decls)
    assert tuple(r.name for r in flattened_roles(onto, "Outer")) == ("A", "A", "B")


def test_iraven144_shape(iraven144):
    assert iraven144.dim == 144
    assert len(iraven144.roles) == 73
    assert len(iraven144.descriptions) == 71
    assert composition_depth(iraven144, "RavenMatrix") == 4


def test_empty_ontology_is_valid():
    onto = build_ontology([])
    assert onto.dim == 0
    assert onto.elements == ()


def test_declarations_round_trip_through_ontology(fig):
    rebuilt = build_ontology(fig.declarations)
    assert rebuilt.elements == fig.elements
    assert rebuilt.index == dict(fig.index)


def test_ontologies_have_no_warnings(ontologies):
    for name, onto in ontologies.items():
        assert onto.warnings == (), name
