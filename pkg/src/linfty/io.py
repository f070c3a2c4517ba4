"""Structure files: a versioned JSON format, validated against a JSON schema,
with canonical serialization (sorted keys, two-space indent, trailing newline).

Scalars are JSON integers or exact ``"p/q"`` strings.  Polynomials are lists of
``{"monomial": [labels], "coeff": scalar}``; vector fields map coordinate
labels to polynomials; endomorphisms map each basis label to its image.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import jsonschema

from .brackets import SkewBrackets, SymBrackets, decalage, decalage_inv
from .errors import InputError
from .fields import CoordinateSystem, Poly, VectorField
from .graded import Element, GradedBasis, LinearMap, format_scalar

SCHEMA_VERSION = 1

_SCALAR = {"oneOf": [{"type": "integer"},
                     {"type": "string", "pattern": r"^\s*-?[0-9]+(\s*/\s*[0-9]+)?\s*$"}]}
_LABEL = {"type": "string", "minLength": 1}
_SPACE = {"type": "array", "items": {
    "type": "object", "required": ["label", "degree"], "additionalProperties": False,
    "properties": {"label": _LABEL, "degree": {"type": "integer"}}}}
_ELEMENT = {"type": "object", "additionalProperties": _SCALAR}
_POLY = {"type": "array", "items": {
    "type": "object", "required": ["monomial", "coeff"], "additionalProperties": False,
    "properties": {"monomial": {"type": "array", "items": _LABEL}, "coeff": _SCALAR}}}
_FIELD = {"type": "object", "additionalProperties": _POLY}
_ENDO = {"type": "object", "additionalProperties": _ELEMENT}


def _entries(value_schema, min_args=0):
    return {"type": "array", "items": {
        "type": "object", "required": ["args", "value"], "additionalProperties": False,
        "properties": {"args": {"type": "array", "items": _LABEL, "minItems": min_args},
                       "value": value_schema}}}


_BRACKETS = {"type": "object", "propertyNames": {"pattern": "^[1-9][0-9]*$"},
             "additionalProperties": _entries(_ELEMENT, 1)}
_SECTION = {"type": "object", "additionalProperties": _POLY}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "space"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "convention": {"enum": ["linfty", "linfty1"]},
        "space": _SPACE,
        "brackets": _BRACKETS,
        "options": {"type": "object", "additionalProperties": False, "properties": {
            "max_arity": {"type": "integer", "minimum": 1},
            "weight_cutoff": {"type": "integer", "minimum": 1}}},
        "field": _FIELD,
        "action": {"type": "object", "required": ["M", "X"], "additionalProperties": False,
                   "properties": {"M": _SPACE, "M_brackets": _BRACKETS, "X": _FIELD,
                                  "Q_M": _FIELD}},
        "gauge_lambda": _FIELD,
        "extension": {"type": "object", "required": ["g"], "additionalProperties": False,
                      "properties": {"g": {"type": "array", "items": _LABEL}}},
        "cocycle": {"type": "object", "required": ["h"], "additionalProperties": False,
                    "properties": {
                        "h": {"type": "object", "required": ["space"],
                              "additionalProperties": False,
                              "properties": {"space": _SPACE, "brackets": _BRACKETS}},
                        "sigma": {"type": "object", "additionalProperties": _ENDO},
                        "psi": _entries(_ELEMENT, 2)}},
        "module": {"type": "object", "required": ["E"], "additionalProperties": False,
                   "properties": {"E": _SPACE, "differential": _ENDO,
                                  "maps": _entries(_ENDO, 1)}},
        "rephom": {"type": "object", "required": ["E"], "additionalProperties": False,
                   "properties": {"E": _SPACE, "omega": _entries(_ENDO, 0)}},
        "algebroid": {"type": "object", "required": ["base", "fiber"],
                      "additionalProperties": False,
                      "properties": {"base": {"type": "array", "items": _LABEL},
                                     "fiber": {"type": "array", "items": _LABEL},
                                     "anchor": {"type": "object", "additionalProperties": _FIELD},
                                     "structure": _entries(_SECTION, 2)}},
        "pair": {"type": "object", "additionalProperties": False, "properties": {
            "sigma": {"type": "object", "additionalProperties": _FIELD},
            "psi": _entries(_SECTION, 2)}},
        "twist": {"type": "object", "additionalProperties": _SECTION},
    },
}


class SchemaError(InputError):
    """Schema violations, each with a JSON-pointer location."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("\n".join(f"{path or '/'}: {msg}" for path, msg in errors))


def _pointer(parts) -> str:
    return "".join(f"/{p}" for p in parts)


def validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.path)), e.message))
    if errors:
        raise SchemaError([(_pointer(e.path), e.message) for e in errors])


# -- scalar / element / polynomial codecs -------------------------------------------------

def scalar_out(q) -> int | str:
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else format_scalar(q)


def element_in(base: GradedBasis, data: dict, path: str) -> Element:
    try:
        return base.element(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def element_out(v: Element) -> dict:
    return {v.base.labels[k]: scalar_out(c) for k, c in sorted(v.coords.items())}


def poly_in(coords: CoordinateSystem, data: list, path: str) -> Poly:
    try:
        return Poly.from_words(coords, [(t["coeff"], t["monomial"]) for t in data])
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def poly_out(p: Poly) -> list:
    labels = p.coords.labels
    return [{"monomial": [labels[i] for i in m], "coeff": scalar_out(c)}
            for m, c in sorted(p.terms.items())]


def field_in(coords: CoordinateSystem, data: dict, path: str) -> VectorField:
    comps = {}
    for label, poly in data.items():
        try:
            i = coords.basis.index(label)
        except InputError as exc:
            raise InputError(f"{path}/{label}: {exc}") from None
        comps[i] = poly_in(coords, poly, f"{path}/{label}")
    return VectorField(coords, comps)


def field_out(F: VectorField) -> dict:
    return {F.coords.labels[i]: poly_out(p) for i, p in sorted(F.comps.items())}


def endo_in(base: GradedBasis, data: dict, path: str) -> LinearMap:
    entries = {}
    for col, img in data.items():
        try:
            c = base.index(col)
        except InputError as exc:
            raise InputError(f"{path}/{col}: {exc}") from None
        for r, q in element_in(base, img, f"{path}/{col}").coords.items():
            entries[(r, c)] = q
    A = LinearMap(base, base, entries)
    try:
        A.degree()
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    return A


def endo_out(A: LinearMap) -> dict:
    cols: dict[int, dict] = {}
    for (r, c), q in sorted(A.entries.items()):
        cols.setdefault(c, {})[A.target.labels[r]] = scalar_out(q)
    return {A.source.labels[c]: img for c, img in sorted(cols.items())}


def space_in(data: list) -> GradedBasis:
    return GradedBasis((item["label"], item["degree"]) for item in data)


def space_out(base: GradedBasis) -> list:
    return [{"label": l, "degree": d} for l, d in base]


def brackets_in(cls, base: GradedBasis, data: dict | None, path: str, max_arity=None):
    tables: dict[int, dict] = {}
    for k, entries in (data or {}).items():
        for n, entry in enumerate(entries):
            where = f"{path}/{k}/{n}"
            args = entry["args"]
            if len(args) != int(k):
                raise InputError(f"{where}: {len(args)} arguments listed under arity {k}")
            value = element_in(base, entry["value"], f"{where}/value")
            try:
                word = tuple(base.index(a) for a in args)
                cls(base, {int(k): {word: value}})
            except InputError as exc:
                raise InputError(f"{where}: {exc}") from None
            slot = tables.setdefault(int(k), {})
            if word in slot:
                raise InputError(f"{where}: duplicate entry for {args}")
            slot[word] = value
    try:
        return cls(base, tables, max_arity)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def brackets_out(S) -> dict:
    out: dict[str, list] = {}
    for k, word, value in S.entries():
        out.setdefault(str(k), []).append({"args": [S.base.labels[i] for i in word],
                                           "value": element_out(value)})
    return out


# -- whole documents ---------------------------------------------------------------------

@dataclass
class StructureFile:
    convention: str
    brackets: Any
    options: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)

    @property
    def base(self) -> GradedBasis:
        return self.brackets.base

    def sym(self) -> SymBrackets:
        return self.brackets if self.convention == "linfty1" else decalage(self.brackets)

    def skew(self) -> SkewBrackets:
        return self.brackets if self.convention == "linfty" else decalage_inv(self.brackets)


def load_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def parse_document(doc) -> StructureFile:
    validate(doc)
    base = space_in(doc["space"])
    convention = doc.get("convention", "linfty1")
    cls = SymBrackets if convention == "linfty1" else SkewBrackets
    options = dict(doc.get("options", {}))
    S = brackets_in(cls, base, doc.get("brackets"), "/brackets", options.get("max_arity"))
    blocks = {k: v for k, v in doc.items()
              if k not in ("schema", "convention", "space", "brackets", "options")}
    return StructureFile(convention, S, options, blocks)


def parse_structure_file(path: str) -> StructureFile:
    return parse_document(load_json(path))


def structure_document(S, convention: str | None = None, options: dict | None = None,
                       blocks: dict | None = None) -> dict:
    if convention is None:
        convention = "linfty1" if isinstance(S, SymBrackets) else "linfty"
    doc: dict[str, Any] = {"schema": SCHEMA_VERSION, "convention": convention,
                           "space": space_out(S.base), "brackets": brackets_out(S)}
    if options:
        doc["options"] = dict(options)
    doc.update(blocks or {})
    return doc


def serialize_structure(sf: StructureFile) -> str:
    return dumps(structure_document(sf.brackets, sf.convention, sf.options,
                                    canonical_blocks(sf)))


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- typed blocks ------------------------------------------------------------------------

def action_in(sf: StructureFile, cutoff=None):
    """(ActionDatum, Q_M or None, M brackets or None) from the ``action`` block."""
    from .actions import ActionDatum, ProductSpace

    blk = sf.blocks.get("action")
    if blk is None:
        raise InputError("file has no 'action' block")
    U = sf.sym()
    M = space_in(blk["M"])
    space = ProductSpace(U.base, M, cutoff)
    X = field_in(space.coords, blk["X"], "/action/X")
    datum = ActionDatum(space, X, U)
    Q_M = field_in(space.M_coords, blk["Q_M"], "/action/Q_M") if "Q_M" in blk else None
    hb = (brackets_in(SymBrackets, M, blk["M_brackets"], "/action/M_brackets")
          if "M_brackets" in blk else None)
    return datum, Q_M, hb


def action_out(datum, Q_M=None, M_brackets=None) -> dict:
    blk = {"M": space_out(datum.space.M), "X": field_out(datum.X)}
    if Q_M is not None:
        blk["Q_M"] = field_out(Q_M)
    if M_brackets is not None:
        blk["M_brackets"] = brackets_out(M_brackets)
    return blk


def cocycle_in(sf: StructureFile):
    from .extensions import NonabelianCocycle

    blk = sf.blocks.get("cocycle")
    if blk is None:
        raise InputError("file has no 'cocycle' block")
    g = sf.skew()
    hbase = space_in(blk["h"]["space"])
    h = brackets_in(SkewBrackets, hbase, blk["h"].get("brackets"), "/cocycle/h/brackets")
    sigma = {x: endo_in(hbase, m, f"/cocycle/sigma/{x}") for x, m in blk.get("sigma", {}).items()}
    for x in sigma:
        g.base.index(x)
    psi = {}
    for n, e in enumerate(blk.get("psi", [])):
        if len(e["args"]) != 2:
            raise InputError(f"/cocycle/psi/{n}: psi takes two arguments")
        psi[tuple(e["args"])] = element_in(hbase, e["value"], f"/cocycle/psi/{n}/value")
    return NonabelianCocycle(g, h, sigma, psi)


def module_in(sf: StructureFile):
    from .modules import DGVectorSpace, ModuleStructure

    blk = sf.blocks.get("module")
    if blk is None:
        raise InputError("file has no 'module' block")
    g = sf.skew()
    E = space_in(blk["E"])
    d = endo_in(E, blk.get("differential", {}), "/module/differential")
    maps = {}
    for n, e in enumerate(blk.get("maps", [])):
        maps[tuple(e["args"])] = endo_in(E, e["value"], f"/module/maps/{n}/value")
    return ModuleStructure(g, E, maps), DGVectorSpace(E, d)


def module_out(mod, dg) -> dict:
    return {"E": space_out(mod.E), "differential": endo_out(dg.d),
            "maps": [{"args": [mod.g.base.labels[i] for i in w], "value": endo_out(A)}
                     for w, A in sorted(mod.maps.items())]}


def rephom_in(sf: StructureFile):
    from .modules import RepUpToHomotopy

    blk = sf.blocks.get("rephom")
    if blk is None:
        raise InputError("file has no 'rephom' block")
    E = space_in(blk["E"])
    omega = {}
    for n, e in enumerate(blk.get("omega", [])):
        omega[tuple(e["args"])] = endo_in(E, e["value"], f"/rephom/omega/{n}/value")
    return RepUpToHomotopy(sf.skew(), E, omega)


def rephom_out(rep) -> dict:
    return {"E": space_out(rep.E),
            "omega": [{"args": [rep.g.base.labels[i] for i in w], "value": endo_out(A)}
                      for w, A in sorted(rep.omega.items())]}


def _section_in(A, data: dict, path: str):
    out = {}
    for label, poly in data.items():
        if label not in A.fiber_labels:
            raise InputError(f"{path}/{label}: unknown fiber label {label!r}")
        out[label] = poly_in(A.coords, poly, f"{path}/{label}")
    return A.section(out)


def _section_out(A, sec) -> dict:
    return {A.fiber_labels[k]: poly_out(p) for k, p in sorted(sec.items())}


def algebroid_in(sf: StructureFile):
    from .algebroids import PolyAlgebroid

    blk = sf.blocks.get("algebroid")
    if blk is None:
        raise InputError("file has no 'algebroid' block")
    A = PolyAlgebroid(blk["base"], blk["fiber"])
    anchor = {}
    for a, F in blk.get("anchor", {}).items():
        if a not in A.fiber_labels:
            raise InputError(f"/algebroid/anchor/{a}: unknown fiber label")
        anchor[a] = field_in(A.coords, F, f"/algebroid/anchor/{a}")
    structure = {}
    for n, e in enumerate(blk.get("structure", [])):
        if len(e["args"]) != 2:
            raise InputError(f"/algebroid/structure/{n}: two arguments expected")
        structure[tuple(e["args"])] = _section_in(A, e["value"], f"/algebroid/structure/{n}/value")
    try:
        return PolyAlgebroid(blk["base"], blk["fiber"], anchor, structure)
    except InputError as exc:
        raise InputError(f"/algebroid: {exc}") from None


def algebroid_out(A) -> dict:
    return {"base": list(A.base_labels), "fiber": list(A.fiber_labels),
            "anchor": {A.fiber_labels[a]: field_out(F) for a, F in sorted(A.anchor.items())},
            "structure": [{"args": [A.fiber_labels[a], A.fiber_labels[b]],
                           "value": _section_out(A, sec)}
                          for (a, b), sec in sorted(A.structure.items())]}


def pair_in(sf: StructureFile, A):
    """The action pair: either an explicit ``pair`` block or a ``twist`` map."""
    from .algebroids import AlgebroidActionPair, twist_by_map

    g = sf.skew()
    if "twist" in sf.blocks:
        phi = {}
        for x, sec in sf.blocks["twist"].items():
            g.base.index(x)
            phi[x] = _section_in(A, sec, f"/twist/{x}")
        return twist_by_map(g, A, phi)
    blk = sf.blocks.get("pair", {})
    sigma = {}
    for x, F in blk.get("sigma", {}).items():
        g.base.index(x)
        sigma[x] = field_in(A.coords, F, f"/pair/sigma/{x}")
    psi = {}
    for n, e in enumerate(blk.get("psi", [])):
        if len(e["args"]) != 2:
            raise InputError(f"/pair/psi/{n}: two arguments expected")
        psi[tuple(e["args"])] = _section_in(A, e["value"], f"/pair/psi/{n}/value")
    return AlgebroidActionPair(g, A, sigma, psi)


def pair_out(pair) -> dict:
    A = pair.A
    return {"sigma": {pair.g.base.labels[x]: field_out(Y) for x, Y in sorted(pair.sigma.items())},
            "psi": [{"args": [pair.g.base.labels[x], pair.g.base.labels[y]],
                     "value": _section_out(A, sec)} for (x, y), sec in sorted(pair.psi.items())]}


def canonical_blocks(sf: StructureFile) -> dict:
    """Re-emit every optional block from its parsed form."""
    out = {}
    b = sf.blocks
    if "field" in b:
        out["field"] = field_out(field_in(CoordinateSystem(sf.base), b["field"], "/field"))
    if "action" in b:
        datum, Q_M, hb = action_in(sf)
        out["action"] = action_out(datum, Q_M, hb)
    if "gauge_lambda" in b:
        datum, _, _ = action_in(sf)
        out["gauge_lambda"] = field_out(field_in(datum.space.coords, b["gauge_lambda"],
                                                 "/gauge_lambda"))
    if "extension" in b:
        out["extension"] = {"g": list(b["extension"]["g"])}
    if "cocycle" in b:
        co = cocycle_in(sf)
        out["cocycle"] = {
            "h": {"space": space_out(co.h.base), "brackets": brackets_out(co.h)},
            "sigma": {co.g.base.labels[x]: endo_out(A) for x, A in sorted(co.sigma.items())},
            "psi": [{"args": [co.g.base.labels[x], co.g.base.labels[y]], "value": element_out(v)}
                    for (x, y), v in sorted(co.psi.items()) if v]}
    if "module" in b:
        out["module"] = module_out(*module_in(sf))
    if "rephom" in b:
        out["rephom"] = rephom_out(rephom_in(sf))
    if "algebroid" in b:
        A = algebroid_in(sf)
        out["algebroid"] = algebroid_out(A)
        if "twist" in b:
            out["twist"] = {x: _section_out(A, _section_in(A, sec, f"/twist/{x}"))
                            for x, sec in b["twist"].items()}
        elif "pair" in b:
            out["pair"] = pair_out(pair_in(sf, A))
    return out
