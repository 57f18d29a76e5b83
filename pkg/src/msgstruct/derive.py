"""Class-diagram derivation from ordered communicative events.

Each event carries the message structure of the information it feeds into
the system. Processing one structure yields a class-diagram view; folding
the views of all events in temporal order yields the full diagram.

Mapping rules (applied to the structurally normalised tree, names kept):

    R1  the initial substructure becomes a defined class named after the
        message structure
    R2  each data field (basic or enumerated domain) becomes an attribute
        of the nearest enclosing class
    R3  each reference field becomes a referenced class plus a reference
        association from the enclosing class, multiplicity one
    R4  each iteration becomes a defined class (named by its inner
        aggregation, else by the iteration itself, else parent + "_item")
        plus a composition from the enclosing class, multiplicity many
    R5  inside specialisation variants, R2/R3 apply with the subclass as
        the enclosing class
    R6  a multi-variant specialisation becomes a generalisation set: the
        enclosing class is the parent and each named variant a subclass;
        a single-variant specialisation expresses optionality instead and
        only marks the contained attributes optional

Errors:

    D001  a multi-variant specialisation has an anonymous variant
    D002  duplicate attribute name within one derived class
    D003  same-name attribute merged with a conflicting domain
    D004  a class is integrated as subclass of two different parents
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import (
    Aggregation,
    Domain,
    Field,
    Formula,
    Iteration,
    MessageStructure,
    ReferenceDomain,
    Specialisation,
    Substructure,
    canonicalize,
    domain_to_text,
    formula_to_text,
)
from .diagnostics import Diagnostic, Severity, SourceSpan
from .parser import ParseError, parse, parse_formula, _domain_from_text

__all__ = [
    "CommunicativeEvent",
    "Attribute",
    "ClassSpec",
    "Association",
    "ClassDiagram",
    "ClassDiagramView",
    "DerivationError",
    "derive_view",
    "integrate",
    "export_diagram",
    "diagram_to_json_obj",
    "diagram_from_json_obj",
    "load_events_manifest",
    "class_name",
]


class DerivationError(Exception):
    """Raised when a structure cannot be mapped to a view; carries the
    diagnostic explaining why."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


@dataclass(frozen=True)
class CommunicativeEvent:
    """A business-process activity feeding new information to the system.

    ``order`` ranks events by temporal precedence; ties break on ``id``.
    """

    id: str
    name: str
    order: int
    structure: MessageStructure

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("event order must be >= 0")


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: Domain | None = None
    acquisition: str | None = None  # 'i' | 'g' | 'd'
    formula: Formula | None = None
    optional: bool = False


@dataclass(frozen=True)
class ClassSpec:
    name: str
    kind: str  # defined | referenced | subclass
    attributes: tuple[Attribute, ...] = ()
    parent: str | None = None


@dataclass(frozen=True)
class Association:
    source: str
    target: str
    kind: str  # composition | reference | generalisation
    multiplicity: str | None = None  # one | many (generalisations carry none)


@dataclass(frozen=True)
class ClassDiagram:
    classes: tuple[ClassSpec, ...] = ()
    associations: tuple[Association, ...] = ()


ClassDiagramView = ClassDiagram


def class_name(raw: str) -> str:
    """Normalise a structure/field name to a class name: UpperCamelCase
    words, all-caps words title-cased ("ORDER" -> "Order",
    "Client address" -> "ClientAddress", "NumberPlate" unchanged)."""
    words = raw.replace("-", " ").split()
    out = []
    for word in words:
        if word.isupper():
            out.append(word.capitalize())
        else:
            out.append(word[0].upper() + word[1:])
    return "".join(out)


# ---------------------------------------------------------------------------
# View derivation
# ---------------------------------------------------------------------------


class _ViewBuilder:
    def __init__(self) -> None:
        self.class_order: list[str] = []
        self.kinds: dict[str, str] = {}
        self.parents: dict[str, str] = {}
        self.attrs: dict[str, list[Attribute]] = {}
        self.associations: list[Association] = []

    def add_class(self, name: str, kind: str, parent: str | None = None) -> str:
        if name not in self.kinds:
            self.class_order.append(name)
            self.kinds[name] = kind
            self.attrs[name] = []
            if parent is not None:
                self.parents[name] = parent
        elif kind != "referenced" and self.kinds[name] == "referenced":
            self.kinds[name] = kind
            if parent is not None:
                self.parents[name] = parent
        return name

    def add_attribute(self, cls: str, attr: Attribute, span: SourceSpan | None) -> None:
        if any(a.name == attr.name for a in self.attrs[cls]):
            raise DerivationError(
                Diagnostic(
                    Severity.ERROR,
                    "D002",
                    f"duplicate attribute {attr.name!r} in class {cls!r}",
                    span,
                )
            )
        self.attrs[cls].append(attr)

    def associate(self, assoc: Association) -> None:
        if assoc not in self.associations:
            self.associations.append(assoc)

    def build(self) -> ClassDiagram:
        classes = tuple(
            ClassSpec(
                name,
                self.kinds[name],
                tuple(self.attrs[name]),
                self.parents.get(name),
            )
            for name in self.class_order
        )
        return ClassDiagram(classes, tuple(self.associations))


def derive_view(event: CommunicativeEvent) -> ClassDiagramView:
    """Map one event's message structure to a class-diagram view."""
    ms = canonicalize(event.structure, keep_names=True)
    builder = _ViewBuilder()
    root_cls = builder.add_class(class_name(ms.name), "defined")
    if isinstance(ms.root, Iteration):
        # A repeating root still owns the whole message: the iteration
        # becomes an item class composed into the root class (R4).
        _derive_into(builder, root_cls, (ms.root,), optional=False)
    else:
        _derive_into(builder, root_cls, ms.root.children, optional=False)
    return builder.build()


def _derive_into(
    builder: _ViewBuilder,
    cls: str,
    members: tuple[Substructure, ...],
    optional: bool,
) -> None:
    for child in members:
        if isinstance(child, Field):
            _derive_field(builder, cls, child, optional)
        elif isinstance(child, Aggregation):
            # Anonymous inline grouping: contents belong to the same class.
            _derive_into(builder, cls, child.children, optional)
        elif isinstance(child, Iteration):
            inner = child.children[0]
            raw = (
                (inner.name if isinstance(inner, Aggregation) else None)
                or child.name
                or f"{cls}_item"
            )
            item_cls = builder.add_class(class_name(raw), "defined")
            builder.associate(Association(cls, item_cls, "composition", "many"))
            _derive_into(builder, item_cls, inner.children, optional=False)
        elif isinstance(child, Specialisation):
            _derive_specialisation(builder, cls, child, optional)


def _derive_field(builder: _ViewBuilder, cls: str, f: Field, optional: bool) -> None:
    domain = f.properties.domain
    if isinstance(domain, ReferenceDomain):
        target = builder.add_class(class_name(domain.target), "referenced")
        builder.associate(Association(cls, target, "reference", "one"))
        return
    acquisition = f.properties.acquisition
    builder.add_attribute(
        cls,
        Attribute(
            name=f.name,
            domain=domain,
            acquisition=acquisition.op if acquisition else None,
            formula=acquisition.formula if acquisition else None,
            optional=optional,
        ),
        f.span,
    )


def _derive_specialisation(
    builder: _ViewBuilder, cls: str, spec: Specialisation, optional: bool
) -> None:
    if len(spec.variants) == 1:
        # One variant means the content is optional, not an alternative.
        variant = spec.variants[0][0]
        _derive_into(builder, cls, _variant_members(variant), optional=True)
        return
    for variant in spec.variants:
        node = variant[0]
        raw = node.name if not isinstance(node, Field) else None
        if raw is None:
            raise DerivationError(
                Diagnostic(
                    Severity.ERROR,
                    "D001",
                    f"variant of a specialisation under class {cls!r} has no name "
                    "to derive a subclass from",
                    node.span or spec.span,
                )
            )
        sub = builder.add_class(class_name(raw), "subclass", parent=cls)
        builder.associate(Association(cls, sub, "generalisation", None))
        _derive_into(builder, sub, _variant_members(node), optional=optional)


def _variant_members(node: Substructure) -> tuple[Substructure, ...]:
    if isinstance(node, Aggregation):
        return node.children
    return (node,)


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------


def integrate(views: list[ClassDiagramView]) -> ClassDiagram:
    """Fold views left to right into one diagram.

    Classes merge by name (a defined or subclass beats a referenced one),
    attribute lists union preserving first-seen order, and associations
    union by (source, target, kind) with the target multiplicity widened
    from one to many on disagreement.
    """
    builder = _ViewBuilder()
    assoc_index: dict[tuple[str, str, str], Association] = {}
    for view in views:
        for cls in view.classes:
            _merge_class(builder, cls)
        for assoc in view.associations:
            key = (assoc.source, assoc.target, assoc.kind)
            seen = assoc_index.get(key)
            if seen is None:
                assoc_index[key] = assoc
            elif seen.multiplicity != assoc.multiplicity:
                assoc_index[key] = Association(
                    assoc.source, assoc.target, assoc.kind, "many"
                )
    builder.associations = list(assoc_index.values())
    return builder.build()


def _merge_class(builder: _ViewBuilder, cls: ClassSpec) -> None:
    if cls.name not in builder.kinds:
        builder.add_class(cls.name, cls.kind, cls.parent)
        for attr in cls.attributes:
            builder.attrs[cls.name].append(attr)
        return
    existing_kind = builder.kinds[cls.name]
    if cls.kind != "referenced":
        if existing_kind == "referenced":
            builder.kinds[cls.name] = cls.kind
            if cls.parent is not None:
                builder.parents[cls.name] = cls.parent
        elif cls.kind == "subclass":
            prior = builder.parents.get(cls.name)
            if prior is not None and cls.parent is not None and prior != cls.parent:
                raise DerivationError(
                    Diagnostic(
                        Severity.ERROR,
                        "D004",
                        f"class {cls.name!r} cannot specialise both {prior!r} "
                        f"and {cls.parent!r}",
                    )
                )
            builder.kinds[cls.name] = "subclass"
            if cls.parent is not None:
                builder.parents[cls.name] = cls.parent
    merged = builder.attrs[cls.name]
    for attr in cls.attributes:
        seen = next((a for a in merged if a.name == attr.name), None)
        if seen is None:
            merged.append(attr)
            continue
        if (
            seen.domain is not None
            and attr.domain is not None
            and seen.domain != attr.domain
        ):
            raise DerivationError(
                Diagnostic(
                    Severity.ERROR,
                    "D003",
                    f"attribute {attr.name!r} of class {cls.name!r} has "
                    f"conflicting domains ({domain_to_text(seen.domain)} vs "
                    f"{domain_to_text(attr.domain)})",
                )
            )
        if seen.domain is None and attr.domain is not None:
            merged[merged.index(seen)] = Attribute(
                seen.name,
                attr.domain,
                seen.acquisition or attr.acquisition,
                seen.formula if seen.formula is not None else attr.formula,
                seen.optional,
            )


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def diagram_to_json_obj(d: ClassDiagram) -> dict:
    classes = []
    for cls in d.classes:
        obj: dict = {"name": cls.name, "kind": cls.kind}
        if cls.parent is not None:
            obj["parent"] = cls.parent
        obj["attributes"] = [_attribute_to_json(a) for a in cls.attributes]
        classes.append(obj)
    associations = []
    for assoc in d.associations:
        aobj: dict = {"from": assoc.source, "to": assoc.target, "kind": assoc.kind}
        if assoc.multiplicity is not None:
            aobj["multiplicity"] = assoc.multiplicity
        associations.append(aobj)
    return {"classes": classes, "associations": associations}


def _attribute_to_json(a: Attribute) -> dict:
    obj: dict = {
        "name": a.name,
        "domain": domain_to_text(a.domain) if a.domain is not None else None,
        "acquisition": a.acquisition,
    }
    if a.formula is not None:
        obj["formula"] = formula_to_text(a.formula)
    if a.optional:
        obj["optional"] = True
    return obj


def diagram_from_json_obj(obj: dict) -> ClassDiagram:
    classes = tuple(
        ClassSpec(
            c["name"],
            c["kind"],
            tuple(
                Attribute(
                    a["name"],
                    _domain_from_text(a["domain"]) if a.get("domain") else None,
                    a.get("acquisition"),
                    parse_formula(a["formula"]) if a.get("formula") else None,
                    bool(a.get("optional", False)),
                )
                for a in c.get("attributes", [])
            ),
            c.get("parent"),
        )
        for c in obj.get("classes", [])
    )
    associations = tuple(
        Association(a["from"], a["to"], a["kind"], a.get("multiplicity"))
        for a in obj.get("associations", [])
    )
    return ClassDiagram(classes, associations)


_PLANTUML_EDGE = {"composition": "*--", "reference": "-->", "generalisation": "<|--"}
_PLANTUML_MULT = {"one": "1", "many": "*"}


def export_diagram(d: ClassDiagram, fmt: str = "json") -> str:
    """Serialise a diagram: ``json`` (schema above) or ``plantuml``."""
    if fmt == "json":
        return json.dumps(diagram_to_json_obj(d), indent=2, ensure_ascii=False) + "\n"
    if fmt != "plantuml":
        raise ValueError(f"unknown diagram format {fmt!r}")
    lines = ["@startuml"]
    for cls in d.classes:
        if not cls.attributes:
            stereo = " <<referenced>>" if cls.kind == "referenced" else ""
            lines.append(f"class {_uml_name(cls.name)}{stereo}")
            continue
        lines.append(f"class {_uml_name(cls.name)} {{")
        for a in cls.attributes:
            lines.append(f"  {_uml_attribute(a)}")
        lines.append("}")
    for assoc in d.associations:
        edge = _PLANTUML_EDGE[assoc.kind]
        if assoc.kind == "generalisation":
            lines.append(f"{_uml_name(assoc.source)} {edge} {_uml_name(assoc.target)}")
        else:
            mult = _PLANTUML_MULT[assoc.multiplicity or "one"]
            lines.append(
                f'{_uml_name(assoc.source)} "1" {edge} "{mult}" {_uml_name(assoc.target)}'
            )
    lines.append("@enduml")
    return "\n".join(lines) + "\n"


def _uml_name(name: str) -> str:
    return name if name.isalnum() else f'"{name}"'


def _uml_attribute(a: Attribute) -> str:
    text = a.name
    if a.domain is not None:
        text += f" : {domain_to_text(a.domain)}"
    if a.acquisition == "g":
        text += " <<generated>>"
    if a.acquisition == "d":
        text += " <<derived>>"
        if a.formula is not None:
            text += f" = {formula_to_text(a.formula)}"
    if a.optional:
        text += " <<optional>>"
    return text


# ---------------------------------------------------------------------------
# Events manifest
# ---------------------------------------------------------------------------


def load_events_manifest(path: str | Path) -> list[CommunicativeEvent]:
    """Read a JSON array of ``{id, name, order, file}`` entries, parse each
    referenced ``.ms`` file (paths resolve relative to the manifest), and
    return the events sorted by (order, id)."""
    manifest_path = Path(path)
    raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError("events manifest must be a JSON array")
    events = []
    for entry in raw:
        try:
            ms_path = manifest_path.parent / entry["file"]
            event_id = str(entry["id"])
            name = str(entry["name"])
            order = int(entry["order"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad manifest entry {entry!r}: {exc}") from None
        try:
            structure = parse(ms_path.read_text(encoding="utf-8-sig"))
        except OSError as exc:
            raise ValueError(f"cannot read {ms_path}: {exc}") from None
        except ParseError as exc:
            raise _ManifestParseError(str(ms_path), exc) from None
        events.append(CommunicativeEvent(event_id, name, order, structure))
    events.sort(key=lambda e: (e.order, e.id))
    return events


class _ManifestParseError(Exception):
    """A referenced structure file failed to parse."""

    def __init__(self, filename: str, cause: ParseError):
        super().__init__(f"{filename}: {cause}")
        self.filename = filename
        self.cause = cause
