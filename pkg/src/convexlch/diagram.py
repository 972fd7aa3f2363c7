"""Surface diagrams: parsing, validation, classical invariants.

The diagram file format (UTF-8 text, ``#`` comments, one diagram per file):

    name <display-name>                      (optional)
    genus <g>
    vertex <id> crossing rot=<h0,h1,h2,h3> over=<hi,hj>
    vertex <id> gamma rot=<h0,h1,h2,h3>
    vertex <id> marker rot=<h0,h1>
    edge <id> lambda <tail-dart>,<head-dart>
    edge <id> gamma <tail-dart>,<head-dart> plus_side=<left|right>
    orient lambda <edge ids in circuit order>
    orient gamma <edge ids of one circle in circuit order>
    glue <edge±> <edge±>                     (merge two face traces)
    h1 <edge± edge± ...>                     (one basis cycle per line)
    area <edge±> <p[/q]>                     (area of the face left of edge±)
    label <vertex-id> <name>                 (crossing display name)
    label arc:<edge-id> <name>               (dividing-set chord display name)

Conventions.  Rotations are counterclockwise in the reference orientation
of the surface.  Edge direction is tail -> head as written; for knot edges
this is the knot orientation, for dividing-set ("gamma") edges it is the
Reeb direction along the dividing set.  ``plus_side`` says which side of
the directed gamma edge lies in the positive region.  ``glue`` places
otherwise-disconnected circles: the two named face traces bound a common
region (see ``halfedge``).  A JSON file with the same content as a dict
(keys ``genus``, ``vertices``, ``edges``, ``orient``, ``glues``, ``h1``,
``areas``, ``labels``, ``name``) is accepted when the filename ends in
``.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .halfedge import (
    CombMap,
    DiagramError,
    DirEdge,
    Edge,
    Vertex,
    de_parse,
    de_reverse,
    de_str,
)


@dataclass
class ValidationReport:
    good_projection: bool
    lambda_class_zero: bool
    c1: int
    hypertight: bool
    nullhomotopic_circles: list[int]
    lift_transverse: bool
    notes: list[str] = field(default_factory=list)

    @property
    def c1_zero(self) -> bool:
        return self.c1 == 0

    def to_dict(self) -> dict:
        return {
            "good_projection": self.good_projection,
            "lambda_class_zero": self.lambda_class_zero,
            "c1": self.c1,
            "c1_zero": self.c1_zero,
            "hypertight": self.hypertight,
            "nullhomotopic_circles": self.nullhomotopic_circles,
            "lift_transverse": self.lift_transverse,
            "notes": self.notes,
        }


@dataclass
class ClassicalInvariants:
    tb: int
    rot: int
    writhe: int
    gamma_hits: int
    c1: int
    lambda_class_zero: bool
    hypertight: bool

    def to_dict(self) -> dict:
        return {
            "tb": self.tb,
            "rot": self.rot,
            "writhe": self.writhe,
            "gamma_hits": self.gamma_hits,
            "c1": self.c1,
            "lambda_class_zero": self.lambda_class_zero,
            "hypertight": self.hypertight,
        }


class SurfaceDiagram:
    """A validated knot-and-dividing-set diagram on a closed surface."""

    def __init__(
        self,
        cmap: CombMap,
        genus: int,
        lambda_circuit: list[DirEdge],
        gamma_circles: list[list[DirEdge]],
        h1_basis: list[list[DirEdge]] | None = None,
        areas: dict[str, Fraction] | None = None,
        labels: dict[str, str] | None = None,
        name: str = "",
    ):
        self.cmap = cmap
        self.genus = genus
        self.lambda_circuit = lambda_circuit
        self.gamma_circles = gamma_circles
        self.labels = dict(labels or {})
        self.name = name
        self._check_circuits()
        self._assign_signs()
        self._check_euler()
        if areas:
            for fid, a in areas.items():
                if a <= 0:
                    raise DiagramError(f"area of {fid} must be positive")
                cmap.faces_by_id[fid].area = a
        self.h1_basis = h1_basis if h1_basis is not None else self._default_h1()

    # ------------------------------------------------------------ structure

    @property
    def crossings(self) -> list[str]:
        return sorted(v.id for v in self.cmap.vertices.values() if v.kind == "crossing")

    @property
    def gamma_points(self) -> list[str]:
        return sorted(v.id for v in self.cmap.vertices.values() if v.kind == "gamma")

    def lambda_edges(self) -> list[str]:
        return sorted(e.id for e in self.cmap.edges.values() if e.kind == "lambda")

    def gamma_edges(self) -> list[str]:
        return sorted(e.id for e in self.cmap.edges.values() if e.kind == "gamma")

    def _check_circuits(self) -> None:
        cm = self.cmap
        lam = set(self.lambda_edges())
        listed = [e for e, fwd in self.lambda_circuit]
        if set(listed) != lam or len(listed) != len(lam):
            raise DiagramError("knot circuit must list every lambda edge once")
        if any(not fwd for _, fwd in self.lambda_circuit):
            raise DiagramError("knot circuit edges are traversed tail to head")
        for de, nxt in zip(
            self.lambda_circuit, self.lambda_circuit[1:] + self.lambda_circuit[:1]
        ):
            if cm.end_vertex(de) != cm.start_vertex(nxt):
                raise DiagramError(
                    f"knot circuit breaks between {de[0]} and {nxt[0]}"
                )
        gam = set(self.gamma_edges())
        seen: list[str] = []
        for circ in self.gamma_circles:
            for de, nxt in zip(circ, circ[1:] + circ[:1]):
                if not de[1]:
                    raise DiagramError("gamma circles are traversed tail to head")
                if cm.end_vertex(de) != cm.start_vertex(nxt):
                    raise DiagramError(f"gamma circle breaks at {de[0]}")
            seen += [e for e, _ in circ]
        if sorted(seen) != sorted(gam):
            raise DiagramError("gamma circles must partition the gamma edges")
        # a gamma circle must not pass through a crossing, and each vertex
        # hosts at most one circle
        for circ in self.gamma_circles:
            for de in circ:
                for end in ("start", "end"):
                    v = self.cmap.vertices[
                        cm.dart_vertex[cm.dart_of(de, end)]
                    ]
                    if v.kind == "crossing":
                        raise DiagramError("crossing on dividing set")

    def _assign_signs(self) -> None:
        """Two-color the faces: flip across gamma edges, equal across knot
        edges, anchored by the plus_side labels."""
        cm = self.cmap
        sign: dict[str, int] = {}
        queue: list[tuple[str, int]] = []
        for e in cm.edges.values():
            if e.kind != "gamma":
                continue
            left = cm.left_face((e.id, True))
            right = cm.left_face((e.id, False))
            want_left = 1 if e.plus_side == "left" else -1
            for fid, s in ((left, want_left), (right, -want_left)):
                if sign.get(fid, s) != s:
                    raise DiagramError("inconsistent dividing-set side labels")
                if fid not in sign:
                    sign[fid] = s
                    queue.append((fid, s))
        if not queue and cm.faces:
            raise DiagramError("diagram has no dividing set to orient sides")
        while queue:
            fid, s = queue.pop()
            f = cm.faces_by_id[fid]
            for de in f.dir_edges():
                e = cm.edges[de[0]]
                nb = cm.left_face(de_reverse(de))
                ns = s if e.kind == "lambda" else -s
                if nb in sign:
                    if sign[nb] != ns:
                        raise DiagramError("inconsistent dividing-set side labels")
                else:
                    sign[nb] = ns
                    queue.append((nb, ns))
        missing = [f.id for f in cm.faces if f.id not in sign]
        if missing:
            raise DiagramError(f"faces {missing} not reachable from dividing set")
        for f in cm.faces:
            f.sign = sign[f.id]

    def _check_euler(self) -> None:
        chi = self.cmap.euler_characteristic()
        if chi != 2 - 2 * self.genus:
            raise DiagramError(
                f"non-cellular embedding: Euler characteristic {chi} != "
                f"{2 - 2 * self.genus} for genus {self.genus}"
            )
        if not self.cmap.surface_is_connected():
            raise DiagramError("faces and glues do not assemble a connected surface")

    # ----------------------------------------------------------- chain data

    def boundary_matrix(self) -> tuple[list[str], list[str], list[list[int]]]:
        """Cellular boundary  faces -> edges  over the integers.

        Returns (edge_ids, face_ids, matrix) with matrix[i][j] the signed
        count of edge i in the boundary of face j (counterclockwise
        boundary orientation, all circuits of a face included).
        """
        eids = sorted(self.cmap.edges)
        fids = [f.id for f in self.cmap.faces]
        erow = {e: i for i, e in enumerate(eids)}
        M = [[0] * len(fids) for _ in eids]
        for j, f in enumerate(self.cmap.faces):
            for eid, fwd in f.dir_edges():
                M[erow[eid]][j] += 1 if fwd else -1
        return eids, fids, M

    def cycle_vector(self, cycle: list[DirEdge]) -> list[int]:
        eids = sorted(self.cmap.edges)
        erow = {e: i for i, e in enumerate(eids)}
        v = [0] * len(eids)
        for eid, fwd in cycle:
            v[erow[eid]] += 1 if fwd else -1
        return v

    def _default_h1(self) -> list[list[DirEdge]]:
        """Fallback basis from a spanning tree: each cotree edge closes a
        cycle; keep the ones that are independent in surface homology."""
        cm = self.cmap
        tree: dict[str, tuple[str, bool] | None] = {}
        order = sorted(cm.vertices)
        if not order:
            return []
        for root in order:
            if root in tree:
                continue
            tree[root] = None
            stack = [root]
            while stack:
                u = stack.pop()
                for h in cm.vertices[u].rotation:
                    de = cm.de_out(h)
                    w = cm.end_vertex(de)
                    if w not in tree:
                        tree[w] = (de[0], de[1])
                        stack.append(w)

        def path_to_root(v: str) -> list[DirEdge]:
            out: list[DirEdge] = []
            while tree[v] is not None:
                eid, fwd = tree[v]  # type: ignore[misc]
                out.append((eid, not fwd))
                e = cm.edges[eid]
                v = cm.dart_vertex[e.tail if fwd else e.head]
            return out

        tree_edges = {t[0] for t in tree.values() if t is not None}
        from .intlinalg import solvable_rational

        eids, fids, M = self.boundary_matrix()
        basis: list[list[DirEdge]] = []
        span_cols: list[list[int]] = [list(col) for col in zip(*M)] if fids else []
        for eid in sorted(cm.edges):
            if eid in tree_edges:
                continue
            e = cm.edges[eid]
            u = cm.dart_vertex[e.tail]
            w = cm.dart_vertex[e.head]
            cyc = [(eid, True)] + path_to_root(w) + [
                de_reverse(de) for de in reversed(path_to_root(u))
            ]
            vec = self.cycle_vector(cyc)
            A = [list(row) for row in zip(*span_cols)] if span_cols else [[] for _ in eids]
            if solvable_rational(A, vec):
                continue
            basis.append(cyc)
            span_cols.append(vec)
        return basis

    # ------------------------------------------------------------ verdicts

    def lambda_class_zero(self) -> bool:
        from .intlinalg import solvable_rational

        if not self.lambda_circuit:
            return True
        eids, fids, M = self.boundary_matrix()
        return solvable_rational(M, self.cycle_vector(self.lambda_circuit))

    def _side_region(self, circle: list[DirEdge], side_fwd: bool) -> set[str]:
        cm = self.cmap
        cut = {eid for eid, _ in circle}
        seeds = {
            cm.left_face(de if side_fwd else de_reverse(de)) for de in circle
        }
        region = set(seeds)
        stack = list(seeds)
        while stack:
            fid = stack.pop()
            for de in cm.faces_by_id[fid].dir_edges():
                if de[0] in cut:
                    continue
                nb = cm.left_face(de_reverse(de))
                if nb not in region:
                    region.add(nb)
                    stack.append(nb)
        return region

    def _cut_euler(self, region: set[str], cut: set[str]) -> int:
        """Euler characteristic of the closed face-union, cut open along
        the given edges (cut edges and their fans are duplicated)."""
        cm = self.cmap
        chi_faces = sum(cm.faces_by_id[f].euler for f in region)
        e_count = 0
        for e in cm.edges.values():
            sides = [
                cm.left_face((e.id, True)) in region,
                cm.left_face((e.id, False)) in region,
            ]
            n = sum(sides)
            if n == 0:
                continue
            if n == 2 and e.id not in cut:
                e_count += 1
            else:
                e_count += n  # boundary copies
        v_count = 0
        for v in cm.vertices.values():
            k = len(v.rotation)
            in_r = [cm.sector_face(v.id, i) in region for i in range(k)]
            if not any(in_r):
                continue
            # fans: consecutive sectors joined across glued (non-cut) darts
            joined = []
            for i in range(k):
                h = v.rotation[(i + 1) % k]
                e = cm.edges[cm.dart_edge[h]]
                glued = (
                    in_r[i]
                    and in_r[(i + 1) % k]
                    and e.id not in cut
                )
                joined.append(glued)
            if all(in_r) and all(joined):
                v_count += 1
                continue
            fans = 0
            for i in range(k):
                if in_r[i] and not (joined[i - 1] if i > 0 else joined[k - 1]):
                    fans += 1
            v_count += fans
        return v_count - e_count + chi_faces

    def hypertight(self) -> tuple[bool, list[int]]:
        bad = []
        for idx, circ in enumerate(self.gamma_circles):
            cut = {eid for eid, _ in circ}
            for side_fwd in (True, False):
                region = self._side_region(circ, side_fwd)
                if self._cut_euler(region, cut) == 1:
                    bad.append(idx)
                    break
        return (not bad, bad)

    def validate(self) -> ValidationReport:
        hyper, bad = self.hypertight()
        notes = []
        if not hyper:
            notes.append(
                "dividing circles "
                + ", ".join(str(i) for i in bad)
                + " bound disks; differential may not square to zero"
            )
        lz = self.lambda_class_zero()
        if not lz:
            notes.append("knot is not null-homologous; gradings undefined")
        return ValidationReport(
            good_projection=True,  # structural checks run at parse time
            lambda_class_zero=lz,
            c1=self.c1(),
            hypertight=hyper,
            nullhomotopic_circles=bad,
            lift_transverse=True,  # gamma points enforce transversality
            notes=notes,
        )

    def c1(self) -> int:
        return self.side_euler(+1) - self.side_euler(-1)

    def side_euler(self, sign: int) -> int:
        region = {f.id for f in self.cmap.faces if f.sign == sign}
        return self._cut_euler(region, {e for e in self.gamma_edges()})

    # --------------------------------------------------------- invariants

    def crossing_side(self, vid: str) -> int:
        v = self.cmap.vertices[vid]
        signs = {
            self.cmap.faces_by_id[self.cmap.sector_face(vid, i)].sign
            for i in range(4)
        }
        if len(signs) != 1:
            raise DiagramError(f"crossing {vid} touches both sides")
        return signs.pop()

    def crossing_sign(self, vid: str) -> int:
        """Writhe sign in the local (side-adjusted) orientation."""
        cm = self.cmap
        v = cm.vertices[vid]
        out_over = next(h for h in v.over if cm.dart_is_tail[h])
        under = [h for h in v.rotation if h not in v.over]
        out_under = next(h for h in under if cm.dart_is_tail[h])
        s = 1 if cm.sigma(out_over) == out_under else -1
        return s * self.crossing_side(vid)

    def writhe(self) -> int:
        return sum(self.crossing_sign(v) for v in self.crossings)

    def classical_invariants(self) -> ClassicalInvariants:
        from .grading import GradingContext

        if not self.lambda_class_zero():
            raise DiagramError("knot not null-homologous: invariants undefined")
        w = self.writhe()
        hits = len(self.gamma_points)
        hyper, _ = self.hypertight()
        rot = GradingContext(self).knot_rotation_number() if self.lambda_circuit else 0
        return ClassicalInvariants(
            tb=-hits // 2 + w,
            rot=rot,
            writhe=w,
            gamma_hits=hits,
            c1=self.c1(),
            lambda_class_zero=True,
            hypertight=hyper,
        )

    # ------------------------------------------------------------- display

    def label_of(self, site: str) -> str:
        return self.labels.get(site, site)


# ---------------------------------------------------------------- parsing


def _parse_fraction(tok: str) -> Fraction:
    if "/" in tok:
        p, q = tok.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(int(tok))


def parse_diagram(text: str, filename: str = "<diagram>") -> SurfaceDiagram:
    """Parse the text format (or the JSON mirror when filename ends .json)."""
    if filename.endswith(".json"):
        return _from_json(json.loads(text))

    genus: int | None = None
    name = ""
    vertices: list[Vertex] = []
    edges: list[Edge] = []
    lambda_order: list[str] | None = None
    gamma_orders: list[list[str]] = []
    glues: list[tuple[DirEdge, DirEdge]] = []
    h1: list[list[DirEdge]] = []
    have_h1 = False
    areas_raw: list[tuple[DirEdge, Fraction]] = []
    labels: dict[str, str] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            kw = toks[0]
            if kw == "name":
                name = " ".join(toks[1:])
            elif kw == "genus":
                genus = int(toks[1])
            elif kw == "vertex":
                vid, kind = toks[1], toks[2]
                if kind not in ("crossing", "gamma", "marker"):
                    raise DiagramError(f"unknown vertex kind {kind!r}")
                opts = dict(t.split("=", 1) for t in toks[3:])
                rot = tuple(opts.pop("rot").split(","))
                over = frozenset(opts.pop("over").split(",")) if "over" in opts else frozenset()
                if opts:
                    raise DiagramError(f"unknown vertex options {sorted(opts)}")
                if kind == "crossing" and not over:
                    raise DiagramError("crossing needs over=")
                if kind != "crossing" and over:
                    raise DiagramError("only crossings carry over=")
                vertices.append(Vertex(vid, kind, rot, over))
            elif kw == "edge":
                eid, kind = toks[1], toks[2]
                if kind not in ("lambda", "gamma"):
                    raise DiagramError(f"unknown edge kind {kind!r}")
                tail, head = toks[3].split(",")
                opts = dict(t.split("=", 1) for t in toks[4:])
                plus = opts.pop("plus_side", "")
                if opts:
                    raise DiagramError(f"unknown edge options {sorted(opts)}")
                if kind == "gamma":
                    if plus not in ("left", "right"):
                        raise DiagramError("gamma edge needs plus_side=left|right")
                elif plus:
                    raise DiagramError("plus_side applies to gamma edges only")
                edges.append(Edge(eid, kind, tail, head, plus))
            elif kw == "orient":
                if toks[1] == "lambda":
                    if lambda_order is not None:
                        raise DiagramError("duplicate knot orientation line")
                    lambda_order = toks[2:]
                elif toks[1] == "gamma":
                    gamma_orders.append(toks[2:])
                else:
                    raise DiagramError(f"unknown orient target {toks[1]!r}")
            elif kw == "glue":
                glues.append((de_parse(toks[1]), de_parse(toks[2])))
            elif kw == "h1":
                have_h1 = True
                h1.append([de_parse(t) for t in toks[1:]])
            elif kw == "area":
                areas_raw.append((de_parse(toks[1]), _parse_fraction(toks[2])))
            elif kw == "label":
                labels[toks[1]] = toks[2]
            else:
                raise DiagramError(f"unknown directive {kw!r}")
        except DiagramError as err:
            raise DiagramError(f"{filename}:{lineno}: {err}") from None
        except (IndexError, ValueError, KeyError) as err:
            raise DiagramError(f"{filename}:{lineno}: malformed line ({err})") from None

    if genus is None:
        raise DiagramError(f"{filename}: missing genus")
    return _build(
        genus, name, vertices, edges, lambda_order or [], gamma_orders,
        glues, h1 if have_h1 else None, areas_raw, labels,
    )


def _from_json(doc: dict) -> SurfaceDiagram:
    vertices = [
        Vertex(
            v["id"], v["kind"], tuple(v["rot"]),
            frozenset(v.get("over", [])),
        )
        for v in doc["vertices"]
    ]
    edges = [
        Edge(e["id"], e["kind"], e["tail"], e["head"], e.get("plus_side", ""))
        for e in doc["edges"]
    ]
    orient = doc.get("orient", {})
    glues = [(de_parse(a), de_parse(b)) for a, b in doc.get("glues", [])]
    h1 = doc.get("h1")
    h1_cycles = (
        [[de_parse(t) for t in cyc] for cyc in h1] if h1 is not None else None
    )
    areas_raw = [
        (de_parse(k), _parse_fraction(str(v))) for k, v in doc.get("areas", {}).items()
    ]
    return _build(
        int(doc["genus"]), doc.get("name", ""), vertices, edges,
        orient.get("lambda", []), orient.get("gamma", []),
        glues, h1_cycles, areas_raw, dict(doc.get("labels", {})),
    )


def _build(
    genus, name, vertices, edges, lambda_order, gamma_orders,
    glues, h1, areas_raw, labels,
) -> SurfaceDiagram:
    cmap = CombMap(vertices, edges, glues)
    lam = [(e, True) for e in lambda_order]
    gam = [[(e, True) for e in circ] for circ in gamma_orders]
    areas: dict[str, Fraction] = {}
    for de, val in areas_raw:
        areas[cmap.left_face(de)] = val
    return SurfaceDiagram(
        cmap, genus, lam, gam, h1_basis=h1, areas=areas, labels=labels, name=name
    )


def diagram_to_json(d: SurfaceDiagram) -> dict:
    return {
        "name": d.name,
        "genus": d.genus,
        "vertices": [
            {
                "id": v.id,
                "kind": v.kind,
                "rot": list(v.rotation),
                **({"over": sorted(v.over)} if v.over else {}),
            }
            for v in d.cmap.vertices.values()
        ],
        "edges": [
            {
                "id": e.id,
                "kind": e.kind,
                "tail": e.tail,
                "head": e.head,
                **({"plus_side": e.plus_side} if e.plus_side else {}),
            }
            for e in d.cmap.edges.values()
        ],
        "orient": {
            "lambda": [e for e, _ in d.lambda_circuit],
            "gamma": [[e for e, _ in circ] for circ in d.gamma_circles],
        },
        "glues": [[de_str(a), de_str(b)] for a, b in d.cmap.glues],
        "h1": [[de_str(de) for de in cyc] for cyc in d.h1_basis],
        "areas": {
            de_str(next(iter(f.circuits[0]))): str(f.area)
            for f in d.cmap.faces
            if f.area != 1
        },
        "labels": d.labels,
    }
