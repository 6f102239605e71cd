"""Instance files: one JSON document describing a whole computation.

Top-level sections (``group`` and ``complex`` are required)::

    group         {"elements": [...], "table": [[...]]}
                  or {"generators": {"r": [1, 2, 0], ...}}
    family        {"subgroups": {"C2": ["s"]}, "seeds": ["C2"]}
    complex       {"cells": [{"id": "p", "dim": 0, "isotropy": "C2"}],
                   "boundary": {"c": [[coeff, element, face], ...]}}
    coefficients  {"constant": "Z"}
                  or {"values": {"1": "Z", ...},
                      "maps": [{"source": "1", "target": "1", "element": "s",
                                "matrix": [[-1]]}],
                      "fibers": {"labels": {...}, "equivalences": {"1->C2": "..."}}}
    cochains      {"alpha": {"degree": 1, "values": {"c": [1]}}}
    assumptions   ["free text", ...]

Elements are referred to by name or by a ``*``-separated product of names.
Subgroups are referred to by a name from ``family.subgroups``, by ``"G"`` or
``"1"`` (whole and trivial group, unless redefined), or by a list of
generating elements. Abelian groups are written ``"0"``, ``"Z"``, ``"Z^2"``,
``"Z/6"`` or sums such as ``"Z + Z/2"``, or as
``{"gens": k, "relations": [[...], ...]}`` with one relator per inner list.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .bredon import BredonCochain, BredonComplex, NotACoChainComplex
from .coefficients import (
    CoefficientError,
    CoefficientSystem,
    CompatibleFamilyDecl,
    constant_system,
    system_from_data,
)
from .complexes import BoundaryTerm, GCWComplex, OrbitCell, Violation, make_term
from .groups import (
    FiniteGroup,
    InvalidMorphism,
    NotAGroup,
    OrbitMorphism,
    Subgroup,
    SubgroupFamily,
    close_family,
    group_from_permutations,
    group_from_table,
    orbit_morphism,
    subgroup_generated,
)
from .zmodule import PresentedAbelianGroup, int_matrix, zeros


class ParseError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class SemanticError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


SECTIONS = {"group", "family", "complex", "coefficients", "cochains", "assumptions"}


def _expect_object(obj: Any, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ParseError(path, f"unknown keys {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise ParseError(path, f"missing keys {missing}")
    return obj


def _expect_int(x: Any, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(path, f"expected an integer, got {x!r}")
    return x


def _expect_list(x: Any, path: str) -> list:
    if not isinstance(x, list):
        raise ParseError(path, "expected a list")
    return x


def _expect_str(x: Any, path: str) -> str:
    if not isinstance(x, str):
        raise ParseError(path, f"expected a string, got {x!r}")
    return x


_TERM = re.compile(r"^\s*(0|Z(?:\^(\d+))?|Z/(\d+))\s*$")


def parse_abelian_group(node: Any, path: str) -> PresentedAbelianGroup:
    if isinstance(node, str):
        free = 0
        torsion = []
        for part in node.split("+"):
            m = _TERM.match(part)
            if not m:
                raise ParseError(path, f"cannot read abelian group {node!r}")
            token = m.group(1)
            if token == "0":
                continue
            if token.startswith("Z/"):
                order = int(m.group(3))
                if order == 0:
                    free += 1
                elif order > 1:
                    torsion.append(order)
            else:
                free += int(m.group(2)) if m.group(2) else 1
        return PresentedAbelianGroup.from_invariants(free, torsion)
    obj = _expect_object(node, path, {"gens", "relations"}, {"gens"})
    gens = _expect_int(obj["gens"], f"{path}.gens")
    if gens < 0:
        raise ParseError(f"{path}.gens", "must be non-negative")
    relators = _expect_list(obj.get("relations", []), f"{path}.relations")
    rel = zeros(gens, len(relators))
    for j, r in enumerate(relators):
        r = _expect_list(r, f"{path}.relations[{j}]")
        if len(r) != gens:
            raise ParseError(f"{path}.relations[{j}]", f"expected {gens} entries")
        for i, x in enumerate(r):
            rel[i, j] = _expect_int(x, f"{path}.relations[{j}][{i}]")
    return PresentedAbelianGroup(gens, rel)


@dataclass
class Instance:
    data: dict
    digest: str
    group: FiniteGroup
    family: SubgroupFamily
    subgroup_names: dict[Subgroup, str]
    complex: GCWComplex
    system: CoefficientSystem | None
    system_error: str | None
    fibers: CompatibleFamilyDecl | None
    cochains: dict[str, BredonCochain] = field(default_factory=dict)
    assumptions: tuple[str, ...] = ()

    def subgroup_name(self, h: Subgroup) -> str:
        return self.subgroup_names.get(h, h.label())

    def violations(self) -> list[str]:
        out = [str(v) for v in self.complex.validate()]
        if self.system_error:
            out.append(self.system_error)
        elif self.system is not None:
            out.extend(str(d) for d in self.system.validate_functoriality())
        if self.fibers is not None:
            out.extend(f"CompatibleFamilyIncomplete: {m}" for m in self.fibers.missing(self.complex.category))
        return out

    def bredon(self) -> BredonComplex:
        bad = self.violations()
        if bad:
            raise SemanticError(bad)
        if self.system is None:
            raise SemanticError(["no coefficients section"])
        cx = BredonComplex(self.complex, self.system)
        try:
            cx.check_square()
        except NotACoChainComplex as exc:
            raise SemanticError([f"NotACoChainComplex: {exc}"]) from None
        return cx


def digest_of(data: Any) -> str:
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canon.encode()).hexdigest()


def read_document(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(path), f"cannot read file: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return data


def load_instance(path: str | Path) -> Instance:
    return parse_instance(read_document(path))


def parse_instance(data: Any) -> Instance:
    """Parse a decoded instance document.

    Raises :class:`ParseError` for structural and reference problems and
    :class:`~eqobstruct.groups.NotAGroup` for an invalid group table; other
    semantic problems are recorded on the instance for ``violations``.
    """
    top = _expect_object(data, "$", SECTIONS, {"group", "complex"})
    group, element = _parse_group(top["group"], "$.group")
    family, names, subgroup = _parse_family(top.get("family"), "$.family", group, element)
    space = _parse_complex(top["complex"], "$.complex", group, family, element, subgroup)
    assumptions = tuple(
        _expect_str(a, f"$.assumptions[{i}]")
        for i, a in enumerate(_expect_list(top.get("assumptions", []), "$.assumptions"))
    )
    space.assertions = assumptions
    system, system_error, fibers = _parse_coefficients(
        top.get("coefficients"), "$.coefficients", family, element, subgroup
    )
    inst = Instance(
        data=data,
        digest=digest_of(data),
        group=group,
        family=family,
        subgroup_names=names,
        complex=space,
        system=system,
        system_error=system_error,
        fibers=fibers,
        assumptions=assumptions,
    )
    inst.cochains = _parse_cochains(top.get("cochains", {}), "$.cochains", inst)
    return inst


def _parse_group(node: Any, path: str):
    obj = _expect_object(node, path, {"elements", "table", "generators"})
    if "generators" in obj:
        if "elements" in obj or "table" in obj:
            raise ParseError(path, "give either generators or elements and table")
        gens = _expect_object(obj["generators"], f"{path}.generators", set(obj["generators"]) if isinstance(obj["generators"], dict) else set())
        perms = {}
        for name, perm in gens.items():
            if name == "e" or "*" in name:
                raise ParseError(f"{path}.generators", f"invalid generator name {name!r}")
            perm = _expect_list(perm, f"{path}.generators.{name}")
            perms[name] = [_expect_int(x, f"{path}.generators.{name}") for x in perm]
        try:
            group = group_from_permutations(perms)
        except ValueError as exc:
            raise ParseError(f"{path}.generators", str(exc)) from None
    else:
        if "elements" not in obj or "table" not in obj:
            raise ParseError(path, "expected generators, or elements together with table")
        names = [_expect_str(x, f"{path}.elements[{i}]") for i, x in enumerate(_expect_list(obj["elements"], f"{path}.elements"))]
        if len(set(names)) != len(names):
            raise ParseError(f"{path}.elements", "duplicate element names")
        for n in names:
            if "*" in n or not n:
                raise ParseError(f"{path}.elements", f"invalid element name {n!r}")
        index = {n: i for i, n in enumerate(names)}
        rows = _expect_list(obj["table"], f"{path}.table")
        table = []
        for i, row in enumerate(rows):
            row = _expect_list(row, f"{path}.table[{i}]")
            out = []
            for j, x in enumerate(row):
                if isinstance(x, str):
                    if x not in index:
                        raise ParseError(f"{path}.table[{i}][{j}]", f"unknown element {x!r}")
                    out.append(index[x])
                else:
                    out.append(_expect_int(x, f"{path}.table[{i}][{j}]"))
            table.append(out)
        group = group_from_table(table, names)  # NotAGroup propagates as a semantic failure

    lookup = {n: i for i, n in enumerate(group.names)}

    def element(ref: Any, where: str) -> int:
        ref = _expect_str(ref, where)
        out = group.identity
        for part in ref.split("*"):
            part = part.strip()
            if part not in lookup:
                raise ParseError(where, f"unknown element {part!r}")
            out = group.mul[out][lookup[part]]
        return out

    return group, element


def _parse_family(node: Any, path: str, group: FiniteGroup, element):
    obj = _expect_object(node if node is not None else {}, path, {"subgroups", "seeds"})
    declared: dict[str, Subgroup] = {"G": group.whole, "1": group.trivial_subgroup}
    named = _expect_object(obj.get("subgroups", {}), f"{path}.subgroups", set(obj.get("subgroups", {}) or {}))
    for name, gens in sorted(named.items()):
        gens = _expect_list(gens, f"{path}.subgroups.{name}")
        declared[name] = subgroup_generated(group, [element(g, f"{path}.subgroups.{name}") for g in gens])

    def subgroup(ref: Any, where: str) -> Subgroup:
        if isinstance(ref, list):
            return subgroup_generated(group, [element(g, where) for g in ref])
        ref = _expect_str(ref, where)
        if ref not in declared:
            raise ParseError(where, f"unknown subgroup {ref!r}")
        return declared[ref]

    seeds = [subgroup(s, f"{path}.seeds[{i}]") for i, s in enumerate(_expect_list(obj.get("seeds", ["G"]), f"{path}.seeds"))]
    if not seeds:
        raise ParseError(f"{path}.seeds", "at least one seed subgroup is required")
    family = close_family(group, seeds)
    names: dict[Subgroup, str] = {}
    # user names win over the built-in G and 1
    for name, h in sorted(declared.items(), key=lambda kv: (kv[0] in ("G", "1"), kv[0])):
        names.setdefault(h, name)
    return family, names, subgroup


def _parse_complex(node: Any, path: str, group, family, element, subgroup) -> GCWComplex:
    obj = _expect_object(node, path, {"cells", "boundary"}, {"cells"})
    cells: dict[str, OrbitCell] = {}
    for i, c in enumerate(_expect_list(obj["cells"], f"{path}.cells")):
        where = f"{path}.cells[{i}]"
        c = _expect_object(c, where, {"id", "dim", "isotropy"}, {"id", "dim"})
        cid = _expect_str(c["id"], f"{where}.id")
        if cid in cells:
            raise ParseError(f"{where}.id", f"duplicate cell id {cid!r}")
        dim = _expect_int(c["dim"], f"{where}.dim")
        if dim < 0:
            raise ParseError(f"{where}.dim", "dimension must be non-negative")
        iso = subgroup(c.get("isotropy", "1"), f"{where}.isotropy")
        cells[cid] = OrbitCell(cid, dim, iso)
    raw = obj.get("boundary", {})
    bd = _expect_object(raw, f"{path}.boundary", set(raw) if isinstance(raw, dict) else set())
    boundary: dict[str, list[BoundaryTerm]] = {}
    for cid, terms in bd.items():
        where = f"{path}.boundary.{cid}"
        if cid not in cells:
            raise ParseError(where, f"unknown cell {cid!r}")
        out = []
        for k, t in enumerate(_expect_list(terms, where)):
            t = _expect_list(t, f"{where}[{k}]")
            if len(t) != 3:
                raise ParseError(f"{where}[{k}]", "expected [coeff, element, face]")
            coeff = _expect_int(t[0], f"{where}[{k}][0]")
            a = element(t[1], f"{where}[{k}][1]")
            face_id = _expect_str(t[2], f"{where}[{k}][2]")
            if face_id not in cells:
                raise ParseError(f"{where}[{k}][2]", f"unknown face {face_id!r}")
            out.append(make_term(coeff, cells[cid].isotropy, cells[face_id], a))
        boundary[cid] = out
    return GCWComplex(group, family, cells.values(), boundary)


def _parse_coefficients(node: Any, path: str, family: SubgroupFamily, element, subgroup):
    if node is None:
        return None, None, None
    obj = _expect_object(node, path, {"constant", "values", "maps", "fibers"})
    fibers = _parse_fibers(obj.get("fibers"), f"{path}.fibers", family, subgroup)
    if "constant" in obj:
        if "values" in obj or "maps" in obj:
            raise ParseError(path, "give either constant or values and maps")
        return constant_system(family, parse_abelian_group(obj["constant"], f"{path}.constant")), None, fibers
    if "values" not in obj:
        raise ParseError(path, "expected constant or values")
    raw = obj["values"]
    vals = _expect_object(raw, f"{path}.values", set(raw) if isinstance(raw, dict) else set())
    groups: dict[Subgroup, PresentedAbelianGroup] = {}
    for name, g in sorted(vals.items()):
        h = subgroup(name, f"{path}.values.{name}")
        if h not in family:
            raise ParseError(f"{path}.values.{name}", f"subgroup {h.label()} is not in the family")
        if h in groups:
            raise ParseError(f"{path}.values.{name}", f"subgroup {h.label()} given twice")
        groups[h] = parse_abelian_group(g, f"{path}.values.{name}")
    missing = [h.label() for h in family if h not in groups]
    if missing:
        raise ParseError(f"{path}.values", f"no value for family members {missing}")
    mats: dict[OrbitMorphism, Any] = {}
    for i, m in enumerate(_expect_list(obj.get("maps", []), f"{path}.maps")):
        where = f"{path}.maps[{i}]"
        m = _expect_object(m, where, {"source", "target", "element", "matrix"}, {"source", "target", "element", "matrix"})
        h = subgroup(m["source"], f"{where}.source")
        k = subgroup(m["target"], f"{where}.target")
        for x, key in ((h, "source"), (k, "target")):
            if x not in family:
                raise ParseError(f"{where}.{key}", f"subgroup {x.label()} is not in the family")
        try:
            f = orbit_morphism(h, k, element(m["element"], f"{where}.element"))
        except InvalidMorphism as exc:
            raise ParseError(where, str(exc)) from None
        if f in mats:
            raise ParseError(where, f"matrix for {f.describe()} given twice")
        shape = (groups[h].gens, groups[k].gens)
        rows = _expect_list(m["matrix"], f"{where}.matrix")
        try:
            mats[f] = int_matrix([[_expect_int(x, f"{where}.matrix") for x in _expect_list(r, f"{where}.matrix")] for r in rows], shape=shape)
        except ValueError as exc:
            raise ParseError(f"{where}.matrix", str(exc)) from None
    try:
        return system_from_data(family, groups, mats), None, fibers
    except CoefficientError as exc:
        return None, f"{type(exc).__name__}: {exc}", fibers


def _parse_fibers(node: Any, path: str, family, subgroup) -> CompatibleFamilyDecl | None:
    if node is None:
        return None
    obj = _expect_object(node, path, {"labels", "equivalences"}, {"labels"})
    raw = obj["labels"]
    labels = {}
    for name, label in _expect_object(raw, f"{path}.labels", set(raw) if isinstance(raw, dict) else set()).items():
        labels[subgroup(name, f"{path}.labels.{name}")] = _expect_str(label, f"{path}.labels.{name}")
    equivalences = {}
    raw = obj.get("equivalences", {})
    for key, witness in _expect_object(raw, f"{path}.equivalences", set(raw) if isinstance(raw, dict) else set()).items():
        if "->" not in key:
            raise ParseError(f"{path}.equivalences.{key}", "expected a key of the form 'H->K'")
        a, b = (s.strip() for s in key.split("->", 1))
        pair = (subgroup(a, f"{path}.equivalences.{key}"), subgroup(b, f"{path}.equivalences.{key}"))
        equivalences[pair] = _expect_str(witness, f"{path}.equivalences.{key}")
    return CompatibleFamilyDecl(labels, equivalences)


def _parse_cochains(node: Any, path: str, inst: Instance) -> dict[str, BredonCochain]:
    raw = _expect_object(node, path, set(node) if isinstance(node, dict) else set())
    out = {}
    for name, c in sorted(raw.items()):
        where = f"{path}.{name}"
        c = _expect_object(c, where, {"degree", "values"}, {"degree"})
        degree = _expect_int(c["degree"], f"{where}.degree")
        rawv = c.get("values", {})
        values = _expect_object(rawv, f"{where}.values", set(rawv) if isinstance(rawv, dict) else set())
        vec = {}
        for cid, v in values.items():
            cell = inst.complex.cells.get(cid)
            if cell is None:
                raise ParseError(f"{where}.values.{cid}", f"unknown cell {cid!r}")
            if cell.dim != degree:
                raise ParseError(f"{where}.values.{cid}", f"cell {cid!r} has dimension {cell.dim}, not {degree}")
            if isinstance(v, int) and not isinstance(v, bool):
                v = [v]
            v = [_expect_int(x, f"{where}.values.{cid}") for x in _expect_list(v, f"{where}.values.{cid}")]
            if inst.system is not None:
                gens = inst.system.value(cell.isotropy).gens
                if len(v) != gens:
                    raise ParseError(f"{where}.values.{cid}", f"expected {gens} entries, got {len(v)}")
            vec[cid] = tuple(v)
        if inst.system is not None:
            for cell in inst.complex.cells_of_dim(degree):
                vec.setdefault(cell.id, (0,) * inst.system.value(cell.isotropy).gens)
        out[name] = BredonCochain(degree, vec)
    return out


__all__ = ["Instance", "ParseError", "SemanticError", "NotAGroup", "Violation", "load_instance", "parse_instance"]
