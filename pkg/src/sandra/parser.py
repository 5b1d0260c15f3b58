"""Input formats: declaration DSL, structured JSON, and situation files.

The DSL is line-comment (``#``) friendly and whitespace-insensitive::

    role Shape
    role Circle < Shape
    description Fig { Shape, Color }

``<`` introduces subsumption parents.  The structured JSON rendering of the
same content uses ``{"roles": [...], "descriptions": [...]}`` and situation
files use ``{"id": ..., "entities": [...], "situations": [...]}`` with
arbitrary nesting.  All readers raise positioned diagnostics: spans for DSL
text, paths (and line/column for malformed JSON) for structured documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence, Union

from .errors import (
    DuplicateEntityIdError,
    ParseError,
    SchemaError,
    SourceSpan,
)
from .ontology import Declaration, DescriptionDecl, Ontology, RoleDecl, build_ontology

DSL_EXTENSION = ".sandra"

_KEYWORDS = ("role", "description")


# ---------------------------------------------------------------------------
# situations


@dataclass(frozen=True)
class Entity:
    """An individual carrying one or more classification names.

    Classification names are resolved against an ontology only when the
    situation is encoded, so situation files parse independently.
    """

    id: str
    classifications: tuple[str, ...]


@dataclass(frozen=True)
class Situation:
    id: str
    entities: tuple[Entity, ...] = ()
    situations: tuple["Situation", ...] = ()

    def walk(self) -> Iterator["Situation"]:
        yield self
        for s in self.situations:
            yield from s.walk()

    def all_entities(self) -> Iterator[Entity]:
        for s in self.walk():
            yield from s.entities


# ---------------------------------------------------------------------------
# DSL tokenizer


@dataclass(frozen=True)
class _Token:
    kind: str  # "name", "punct", "eof"
    value: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        if self.kind == "name":
            return f"name '{self.value}'"
        return f"'{self.value}'"


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "<,{}":
            toks.append(_Token("punct", ch, SourceSpan(line, col, 1)))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append(_Token("name", word, SourceSpan(line, col, len(word))))
            col += j - i
            i = j
            continue
        raise ParseError(
            f"unexpected character {ch!r}", span=SourceSpan(line, col, 1)
        )
    if toks:
        last = toks[-1].span
        eof_span = SourceSpan(last.line, last.column + last.length, 1)
    else:
        eof_span = SourceSpan(1, 1, 1)
    toks.append(_Token("eof", "", eof_span))
    return toks


class _DslParser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def take(self) -> _Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect_name(self, what: str = "name") -> _Token:
        tok = self.peek()
        if tok.kind != "name" or tok.value in _KEYWORDS:
            raise ParseError(
                f"expected {what}, found {tok.describe()}", span=tok.span
            )
        return self.take()

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != value:
            raise ParseError(
                f"expected '{value}', found {tok.describe()}", span=tok.span
            )
        return self.take()

    def name_list(self, what: str) -> tuple[str, ...]:
        names = [self.expect_name(what).value]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.take()
            names.append(self.expect_name(what).value)
        return tuple(names)

    def parse(self) -> list[Declaration]:
        decls: list[Declaration] = []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return decls
            if tok.kind != "name" or tok.value not in _KEYWORDS:
                raise ParseError(
                    f"expected 'role' or 'description', found {tok.describe()}",
                    span=tok.span,
                )
            self.take()
            name_tok = self.expect_name()
            parents: tuple[str, ...] = ()
            if self.peek().kind == "punct" and self.peek().value == "<":
                self.take()
                parents = self.name_list("parent name")
            if tok.value == "role":
                decls.append(
                    RoleDecl(name_tok.value, parents=parents, span=name_tok.span)
                )
                continue
            self.expect_punct("{")
            components = self.name_list("component name")
            self.expect_punct("}")
            decls.append(
                DescriptionDecl(
                    name_tok.value,
                    components=components,
                    parents=parents,
                    span=name_tok.span,
                )
            )


def parse_ontology_dsl(text: str) -> list[Declaration]:
    """Parse DSL text into declarations, with source spans attached."""
    return _DslParser(text).parse()


def serialize_ontology_dsl(decls: Sequence[Declaration]) -> str:
    """Canonical DSL rendering; parses back to an equal declaration list."""
    lines = []
    for d in decls:
        head = "role" if isinstance(d, RoleDecl) else "description"
        line = f"{head} {d.name}"
        if d.parents:
            line += " < " + ", ".join(d.parents)
        if isinstance(d, DescriptionDecl):
            line += " { " + ", ".join(d.components) + " }"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# structured JSON ontology format


def _load_json(doc: Union[str, bytes]) -> Any:
    try:
        return json.loads(doc)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"invalid JSON: {exc.msg}",
            span=SourceSpan(exc.lineno, exc.colno, 1),
            details={"path": "$"},
        ) from None


def _schema_error(path: str, message: str) -> SchemaError:
    return SchemaError(f"{path}: {message}", details={"path": path})


def _want_object(value: Any, path: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise _schema_error(path, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in allowed:
            raise _schema_error(f"{path}.{key}", "unexpected key")
    return value


def _want_str_list(value: Any, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(x, str) for x in value):
        raise _schema_error(path, "expected a list of strings")
    return tuple(value)


def parse_ontology_structured(doc: Union[str, bytes, dict]) -> list[Declaration]:
    """Parse the JSON rendering of an ontology into declarations."""
    data = _load_json(doc) if isinstance(doc, (str, bytes)) else doc
    root = _want_object(data, "$", {"roles", "descriptions"})
    decls: list[Declaration] = []
    roles = root.get("roles", [])
    if not isinstance(roles, list):
        raise _schema_error("$.roles", "expected a list")
    for i, item in enumerate(roles):
        path = f"$.roles[{i}]"
        obj = _want_object(item, path, {"name", "parents"})
        if "name" not in obj or not isinstance(obj["name"], str):
            raise _schema_error(f"{path}.name", "expected a string name")
        parents = _want_str_list(obj.get("parents", []), f"{path}.parents")
        decls.append(RoleDecl(obj["name"], parents=parents))
    descriptions = root.get("descriptions", [])
    if not isinstance(descriptions, list):
        raise _schema_error("$.descriptions", "expected a list")
    for i, item in enumerate(descriptions):
        path = f"$.descriptions[{i}]"
        obj = _want_object(item, path, {"name", "parents", "components"})
        if "name" not in obj or not isinstance(obj["name"], str):
            raise _schema_error(f"{path}.name", "expected a string name")
        if "components" not in obj:
            raise _schema_error(f"{path}.components", "missing required key")
        components = _want_str_list(obj["components"], f"{path}.components")
        parents = _want_str_list(obj.get("parents", []), f"{path}.parents")
        decls.append(
            DescriptionDecl(obj["name"], components=components, parents=parents)
        )
    return decls


def serialize_ontology_structured(decls: Sequence[Declaration]) -> dict:
    """Structured rendering; role entries first, then descriptions."""
    roles = []
    descriptions = []
    for d in decls:
        entry: dict[str, Any] = {"name": d.name}
        if d.parents:
            entry["parents"] = list(d.parents)
        if isinstance(d, RoleDecl):
            roles.append(entry)
        else:
            entry["components"] = list(d.components)
            descriptions.append(entry)
    return {"roles": roles, "descriptions": descriptions}


# ---------------------------------------------------------------------------
# situation files


def parse_situation(doc: Union[str, bytes, dict]) -> Situation:
    """Parse a situation document; ids must be unique within the file."""
    data = _load_json(doc) if isinstance(doc, (str, bytes)) else doc
    return _parse_situation_node(data, "$", set(), set())


def _parse_situation_node(
    data: Any, path: str, seen_situations: set[str], seen_entities: set[str]
) -> Situation:
    obj = _want_object(data, path, {"id", "entities", "situations"})
    if "id" not in obj or not isinstance(obj["id"], str):
        raise _schema_error(f"{path}.id", "expected a string id")
    if obj["id"] in seen_situations:
        raise SchemaError(
            f"duplicate situation id '{obj['id']}'",
            details={"path": f"{path}.id", "id": obj["id"]},
        )
    seen_situations.add(obj["id"])
    entities: list[Entity] = []
    raw_entities = obj.get("entities", [])
    if not isinstance(raw_entities, list):
        raise _schema_error(f"{path}.entities", "expected a list")
    for i, item in enumerate(raw_entities):
        epath = f"{path}.entities[{i}]"
        eobj = _want_object(item, epath, {"id", "roles"})
        if "id" not in eobj or not isinstance(eobj["id"], str):
            raise _schema_error(f"{epath}.id", "expected a string id")
        if eobj["id"] in seen_entities:
            raise DuplicateEntityIdError(
                f"duplicate entity id '{eobj['id']}'",
                details={"path": f"{epath}.id", "id": eobj["id"]},
            )
        seen_entities.add(eobj["id"])
        roles = _want_str_list(eobj.get("roles", []), f"{epath}.roles")
        if not roles:
            raise _schema_error(f"{epath}.roles", "entity needs at least one role")
        entities.append(Entity(eobj["id"], roles))
    nested: list[Situation] = []
    raw_nested = obj.get("situations", [])
    if not isinstance(raw_nested, list):
        raise _schema_error(f"{path}.situations", "expected a list")
    for i, item in enumerate(raw_nested):
        nested.append(
            _parse_situation_node(
                item, f"{path}.situations[{i}]", seen_situations, seen_entities
            )
        )
    return Situation(obj["id"], tuple(entities), tuple(nested))


def serialize_situation(s: Situation) -> dict:
    return {
        "id": s.id,
        "entities": [
            {"id": e.id, "roles": list(e.classifications)} for e in s.entities
        ],
        "situations": [serialize_situation(n) for n in s.situations],
    }


# ---------------------------------------------------------------------------
# file helpers


def parse_ontology_text(text: str, *, filename: str = "<input>") -> list[Declaration]:
    """Pick the DSL or structured reader from the filename, else sniff."""
    name = filename.lower()
    if name.endswith(DSL_EXTENSION):
        return parse_ontology_dsl(text)
    if name.endswith(".json"):
        return parse_ontology_structured(text)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_ontology_structured(text)
    return parse_ontology_dsl(text)


def load_declarations(path: Union[str, Path]) -> list[Declaration]:
    p = Path(path)
    return parse_ontology_text(p.read_text(encoding="utf-8"), filename=p.name)


def load_ontology(path: Union[str, Path]) -> Ontology:
    """Read and validate an ontology file (DSL or structured JSON)."""
    return build_ontology(load_declarations(path))


def load_situation(path: Union[str, Path]) -> Situation:
    p = Path(path)
    return parse_situation(p.read_text(encoding="utf-8"))
