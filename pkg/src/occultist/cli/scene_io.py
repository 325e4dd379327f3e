"""Scene documents: JSON with rationals as ``"p/q"`` strings."""

from __future__ import annotations

import json
from fractions import Fraction

from ..bass_serre import (
    BridgeConfinement,
    Confinement,
    EdgeGroupSpec,
    GraphOfGroups,
    OrientedEdge,
    VertexGroupSpec,
    validate_gog,
)
from ..errors import OccultistError, ParseError, SchemaError, ValidationError
from ..gallery import Scene
from ..projgeom import ConePolytope, ProjMap, ProjPoint, make_body
from ..ratlin import RMat, rat_str, to_rat

SCENE_VERSION = 1


def _rat(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise SchemaError(path, f"expected an integer or 'p/q' string, got {x!r}")
    try:
        return to_rat(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(path, f"malformed rational {x!r}") from exc


def _vector(v, path):
    if not isinstance(v, list) or not v:
        raise SchemaError(path, "expected a non-empty list")
    return tuple(_rat(x, f"{path}[{i}]") for i, x in enumerate(v))


def _matrix(m, path):
    if not isinstance(m, list) or not m:
        raise SchemaError(path, "expected a square matrix")
    rows = [_vector(r, f"{path}[{i}]") for i, r in enumerate(m)]
    if any(len(r) != len(rows) for r in rows):
        raise SchemaError(path, "matrix is not square")
    return rows


def _need(d, key, path, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(path, f"missing key {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"{path}.{key}", f"expected {kind.__name__}")
    return v


def doc_to_scene(doc: dict, validate: bool = True) -> Scene:
    """Build a :class:`Scene` from a parsed document."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be an object")
    version = _need(doc, "version", "$", int)
    if version != SCENE_VERSION:
        raise SchemaError("$.version", f"unsupported version {version}")
    dim = _need(doc, "ambient_dim", "$", int)
    bodies = {}
    for name, b in (doc.get("bodies") or {}).items():
        path = f"$.bodies.{name}"
        gens = [_vector(g, f"{path}.generators[{i}]") for i, g in enumerate(_need(b, "generators", path, list))]
        if any(len(g) != dim for g in gens):
            raise SchemaError(path, "generator length differs from ambient_dim")
        try:
            bodies[name] = make_body(gens, dim)
        except OccultistError as exc:
            raise ValidationError(f"{path}: {exc}") from exc
    maps = {}
    for name, m in (doc.get("maps") or {}).items():
        rows = _matrix(m, f"$.maps.{name}")
        if len(rows) != dim:
            raise SchemaError(f"$.maps.{name}", "size differs from ambient_dim")
        try:
            maps[name] = ProjMap(RMat(rows))
        except OccultistError as exc:
            raise ValidationError(f"$.maps.{name}: {exc}") from exc
    points = {name: ProjPoint(_vector(p, f"$.points.{name}")) for name, p in (doc.get("points") or {}).items()}
    scene = Scene(dim, bodies, maps, points, None, dict(doc.get("commands") or {}))
    g = doc.get("graph_of_groups")
    if g is not None:
        scene.gog = _parse_gog(g, scene)
        if validate:
            try:
                validate_gog(scene.gog)
            except OccultistError as exc:
                raise ValidationError(str(exc)) from exc
    return scene


def _ref(table, key, path, what):
    if isinstance(key, str):
        if key not in table:
            raise SchemaError(path, f"unknown {what} {key!r}")
        return table[key]
    raise SchemaError(path, f"expected a {what} name")


def _parse_gog(g, scene: Scene) -> GraphOfGroups:
    bodies, maps = scene.bodies, scene.maps
    vertices = {}
    for name, v in _need(g, "vertices", "$.graph_of_groups", dict).items():
        path = f"$.graph_of_groups.vertices.{name}"
        kind = _need(v, "kind", path, str)
        body = _ref(bodies, _need(v, "body", path), f"{path}.body", "body")
        cc = v.get("cc_body")
        conf = v.get("confinement")
        spec = VertexGroupSpec(
            kind, body,
            elements=[_ref(maps, e, f"{path}.elements", "map") for e in v.get("elements", [])],
            generator=_ref(maps, v["generator"], f"{path}.generator", "map") if v.get("generator") else None,
            generators=[_ref(maps, e, f"{path}.generators", "map") for e in v.get("generators", [])],
            max_length=int(v.get("max_length", 0)),
            window=int(v.get("window", 3)),
            confinement=None if conf is None else Confinement(
                _ref(bodies, conf["u_plus"], f"{path}.confinement.u_plus", "body"),
                _ref(bodies, conf["u_minus"], f"{path}.confinement.u_minus", "body"),
                int(conf["n"])),
            cc_body=None if cc is None else _ref(bodies, cc, f"{path}.cc_body", "body"),
        )
        vertices[name] = spec
    edges = {}
    for i, e in enumerate(_need(g, "edges", "$.graph_of_groups", list)):
        path = f"$.graph_of_groups.edges[{i}]"
        eg = e.get("edge_group") or {"kind": "trivial"}
        egs = EdgeGroupSpec(
            eg.get("kind", "trivial"),
            images=[_ref(maps, m, f"{path}.edge_group.images", "map") for m in eg.get("images", [])],
            image=_ref(maps, eg["image"], f"{path}.edge_group.image", "map") if eg.get("image") else None,
        )
        name = _need(e, "name", path, str)
        edges[name] = OrientedEdge(name, _need(e, "origin", path, str), _need(e, "target", path, str),
                                   _ref(maps, _need(e, "g", path), f"{path}.g", "map"),
                                   _need(e, "reverse", path, str), egs)
    bridge = {}
    for name, b in (g.get("bridges") or {}).items():
        path = f"$.graph_of_groups.bridges.{name}"
        bridge[name] = BridgeConfinement(
            _need(b, "vertex", path, str), _ref(maps, b.get("h"), f"{path}.h", "map"),
            _ref(bodies, b.get("u_plus"), f"{path}.u_plus", "body"),
            _ref(bodies, b.get("u_minus"), f"{path}.u_minus", "body"), int(_need(b, "n", path, int)),
            [_ref(bodies, t, f"{path}.plus_targets", "body") for t in b.get("plus_targets", [])],
            [_ref(bodies, t, f"{path}.minus_targets", "body") for t in b.get("minus_targets", [])])
    base = _need(g, "base_vertex", "$.graph_of_groups", str)
    if base not in vertices:
        raise SchemaError("$.graph_of_groups.base_vertex", f"unknown vertex {base!r}")
    return GraphOfGroups(vertices, edges, base, bridge)


def parse_scene(path, validate: bool = True) -> Scene:
    """Read and validate a scene file.

    Raises
    ------
    ParseError, SchemaError, ValidationError
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return doc_to_scene(doc, validate)


# ------------------------------------------------------------------ serialisation


def _vec_out(v):
    return [rat_str(Fraction(x)) for x in v]


class _Names:
    """Name lookup for maps and bodies, adding generated names on demand."""

    def __init__(self, table, prefix, exact):
        self.table = dict(table)
        self.prefix = prefix
        self.exact = exact

    def name(self, obj, hint):
        for k, v in self.table.items():
            if self.exact(v, obj):
                return k
        key = hint
        i = 1
        while key in self.table:
            key = f"{hint}_{i}"
            i += 1
        self.table[key] = obj
        return key


def _same_body(a: ConePolytope, b: ConePolytope) -> bool:
    return a.generators == b.generators


def scene_to_doc(scene: Scene) -> dict:
    """Canonical document for a scene (inverse of :func:`doc_to_scene`)."""
    maps = _Names(scene.maps, "m", lambda a, b: a == b)
    bodies = _Names(scene.bodies, "b", _same_body)
    gdoc = None
    g = scene.gog
    if g is not None:
        verts = {}
        for name in sorted(g.vertices):
            s = g.vertices[name]
            v = {"kind": s.kind, "body": bodies.name(s.body, f"{name}.body")}
            if s.cc_body is not None:
                v["cc_body"] = bodies.name(s.cc_body, f"{name}.cc_body")
            if s.kind == "finite":
                v["elements"] = [maps.name(m, f"{name}.g{i}") for i, m in enumerate(s.elements) if not m.is_identity()]
            elif s.kind == "cyclic":
                v["generator"] = maps.name(s.generator, f"{name}.h")
                v["window"] = s.window
                if s.confinement is not None:
                    v["confinement"] = {"u_plus": bodies.name(s.confinement.u_plus, f"{name}.U+"),
                                        "u_minus": bodies.name(s.confinement.u_minus, f"{name}.U-"),
                                        "n": s.confinement.n}
            else:
                v["generators"] = [maps.name(m, f"{name}.s{i}") for i, m in enumerate(s.generators)]
                v["max_length"] = s.max_length
            verts[name] = v
        edges = []
        for name in sorted(g.edges):
            e = g.edges[name]
            eg = {"kind": e.edge_group.kind}
            if e.edge_group.kind == "finite":
                eg["images"] = [maps.name(m, f"{name}.d{i}") for i, m in enumerate(e.edge_group.images)]
            elif e.edge_group.kind == "cyclic":
                eg["image"] = maps.name(e.edge_group.image, f"{name}.d")
            edges.append({"name": name, "origin": e.origin, "target": e.target,
                          "g": maps.name(e.g, f"{name}.g"), "reverse": e.reverse, "edge_group": eg})
        bridges = {}
        for name in sorted(g.bridge):
            b = g.bridge[name]
            bridges[name] = {
                "vertex": b.vertex, "h": maps.name(b.h, f"{name}.h"),
                "u_plus": bodies.name(b.u_plus, f"{name}.U+"), "u_minus": bodies.name(b.u_minus, f"{name}.U-"),
                "n": b.n,
                "plus_targets": [bodies.name(t, f"{name}.plus{i}") for i, t in enumerate(b.plus_targets)],
                "minus_targets": [bodies.name(t, f"{name}.minus{i}") for i, t in enumerate(b.minus_targets)],
            }
        gdoc = {"base_vertex": g.base_vertex, "vertices": verts, "edges": edges}
        if bridges:
            gdoc["bridges"] = bridges
    return {
        "version": SCENE_VERSION,
        "ambient_dim": scene.dim,
        "bodies": {k: {"generators": [_vec_out(v) for v in bodies.table[k].generators]}
                   for k in sorted(bodies.table)},
        "maps": {k: [_vec_out(r) for r in maps.table[k].mat.rows] for k in sorted(maps.table)},
        "points": {k: _vec_out(scene.points[k].rep) for k in sorted(scene.points)},
        "graph_of_groups": gdoc,
        "commands": _jsonable(scene.metadata),
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return rat_str(x)
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, float):
        return x
    return str(x)


def dumps_doc(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_doc(scene_to_doc(scene)))
