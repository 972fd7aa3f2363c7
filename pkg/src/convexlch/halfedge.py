"""Half-edge combinatorial maps for knot-and-dividing-set diagrams.

A diagram is a graph embedded in a closed oriented surface, encoded by a
rotation system: every vertex lists its incident half-edges (darts) in
counterclockwise order with respect to the reference orientation of the
surface.  Faces are traced from the rotation system; a face trace keeps
its interior on the left, so face boundaries run counterclockwise.

Vertices come in three kinds:

* ``crossing``  -- 4-valent double point of the knot projection, with an
  ``over`` pair of opposite darts marking the overstrand;
* ``gamma``     -- 4-valent transverse intersection of the knot with the
  dividing set, knot and dividing-set darts interleaved;
* ``marker``    -- 2-valent subdivision point.  Markers carry no geometry;
  they exist so that circles disjoint from everything else (e.g. dividing
  circles the knot never meets) still have vertices to anchor edges.

A rotation system determines a cellular embedding of each *connected
component* into its own closed surface.  To assemble several components
on one surface, ``glue`` relations merge two face traces into a single
face with several boundary circuits (an annulus-like face).  The Euler
characteristic of a face with k boundary circuits is 2 - k, and the total
must match the declared genus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional


class DiagramError(Exception):
    """Structurally invalid diagram data."""


# A directed edge is (edge_id, forward); forward=True means tail -> head.
DirEdge = tuple[str, bool]


def de_str(de: DirEdge) -> str:
    return de[0] + ("+" if de[1] else "-")


def de_parse(token: str) -> DirEdge:
    if len(token) < 2 or token[-1] not in "+-":
        raise DiagramError(f"bad directed-edge token {token!r}")
    return (token[:-1], token[-1] == "+")


def de_reverse(de: DirEdge) -> DirEdge:
    return (de[0], not de[1])


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str                      # "crossing" | "gamma" | "marker"
    rotation: tuple[str, ...]      # darts, counterclockwise
    over: frozenset[str] = frozenset()   # the two overstrand darts (crossings)


@dataclass(frozen=True)
class Edge:
    id: str
    kind: str                      # "lambda" | "gamma"
    tail: str                      # dart at the tail vertex
    head: str                      # dart at the head vertex
    plus_side: str = ""            # "left" | "right", gamma edges only


@dataclass
class Face:
    """A complementary region, possibly with several boundary circuits."""

    id: str
    circuits: list[tuple[DirEdge, ...]]
    sign: int = 0                  # +1 / -1 once side labels propagate
    area: Fraction = Fraction(1)

    @property
    def euler(self) -> int:
        # genus-zero region with len(circuits) boundary circles
        return 2 - len(self.circuits)

    def dir_edges(self) -> Iterable[DirEdge]:
        for circ in self.circuits:
            yield from circ


class CombMap:
    """Immutable-after-build rotation system with traced faces."""

    def __init__(
        self,
        vertices: list[Vertex],
        edges: list[Edge],
        glues: list[tuple[DirEdge, DirEdge]] | None = None,
    ):
        self.vertices: dict[str, Vertex] = {}
        for v in vertices:
            if v.id in self.vertices:
                raise DiagramError(f"duplicate vertex id {v.id!r}")
            self.vertices[v.id] = v
        self.edges: dict[str, Edge] = {}
        for e in edges:
            if e.id in self.edges:
                raise DiagramError(f"duplicate edge id {e.id!r}")
            self.edges[e.id] = e
        self.glues = list(glues or [])

        # dart tables
        self.dart_vertex: dict[str, str] = {}
        self.dart_pos: dict[str, int] = {}
        for v in self.vertices.values():
            for i, h in enumerate(v.rotation):
                if h in self.dart_vertex:
                    raise DiagramError(f"dart {h!r} appears in two rotations")
                self.dart_vertex[h] = v.id
                self.dart_pos[h] = i
        self.dart_edge: dict[str, str] = {}
        self.dart_is_tail: dict[str, bool] = {}
        for e in self.edges.values():
            for h, is_tail in ((e.tail, True), (e.head, False)):
                if h not in self.dart_vertex:
                    raise DiagramError(f"edge {e.id!r} uses unknown dart {h!r}")
                if h in self.dart_edge:
                    raise DiagramError(f"dart {h!r} used by two edges")
                self.dart_edge[h] = e.id
                self.dart_is_tail[h] = is_tail
        for h in self.dart_vertex:
            if h not in self.dart_edge:
                raise DiagramError(f"dart {h!r} belongs to no edge")

        self._check_valences()
        self.faces: list[Face] = self._trace_faces()
        self.face_of_dir_edge: dict[DirEdge, str] = {}
        for f in self.faces:
            for de in f.dir_edges():
                self.face_of_dir_edge[de] = f.id
        self.faces_by_id: dict[str, Face] = {f.id: f for f in self.faces}

    # ---------------------------------------------------------------- darts

    def _check_valences(self) -> None:
        for v in self.vertices.values():
            want = 2 if v.kind == "marker" else 4
            if len(v.rotation) != want:
                raise DiagramError(f"vertex {v.id!r} ({v.kind}) is not {want}-valent")
            kinds = [self.edges[self.dart_edge[h]].kind for h in v.rotation]
            if v.kind == "crossing":
                if any(k != "lambda" for k in kinds):
                    raise DiagramError(f"crossing {v.id!r} on dividing set")
                if len(v.over) != 2 or not v.over <= set(v.rotation):
                    raise DiagramError(f"crossing {v.id!r} has bad over pair")
                a, b = sorted(v.over, key=self.dart_pos.get)
                if (self.dart_pos[b] - self.dart_pos[a]) % 4 != 2:
                    raise DiagramError(f"crossing {v.id!r}: over darts not opposite")
            elif v.kind == "gamma":
                if sorted(kinds) != ["gamma", "gamma", "lambda", "lambda"]:
                    raise DiagramError(f"gamma point {v.id!r} needs 2+2 darts")
                if kinds[0] == kinds[1]:
                    raise DiagramError(f"gamma point {v.id!r}: darts not interleaved")
                if kinds[1] == kinds[2] or kinds[2] == kinds[3]:
                    raise DiagramError(f"gamma point {v.id!r}: darts not interleaved")
            else:  # marker
                if kinds[0] != kinds[1]:
                    raise DiagramError(f"marker {v.id!r} joins different edge kinds")

    def sigma(self, dart: str, k: int = 1) -> str:
        """Rotation successor (counterclockwise next dart), k steps."""
        v = self.vertices[self.dart_vertex[dart]]
        n = len(v.rotation)
        return v.rotation[(self.dart_pos[dart] + k) % n]

    def dart_of(self, de: DirEdge, end: str) -> str:
        e = self.edges[de[0]]
        if end == "start":
            return e.tail if de[1] else e.head
        return e.head if de[1] else e.tail

    def de_out(self, dart: str) -> DirEdge:
        """The directed edge leaving through the given dart."""
        return (self.dart_edge[dart], self.dart_is_tail[dart])

    def start_vertex(self, de: DirEdge) -> str:
        return self.dart_vertex[self.dart_of(de, "start")]

    def end_vertex(self, de: DirEdge) -> str:
        return self.dart_vertex[self.dart_of(de, "end")]

    def next_in_left_face(self, de: DirEdge) -> DirEdge:
        """Successor of ``de`` along the boundary of the face on its left."""
        arr = self.dart_of(de, "end")
        dep = self.sigma(arr, -1)
        return self.de_out(dep)

    # ---------------------------------------------------------------- faces

    def _trace_faces(self) -> list[Face]:
        todo: set[DirEdge] = set()
        for eid in self.edges:
            todo.add((eid, True))
            todo.add((eid, False))
        circuits: list[tuple[DirEdge, ...]] = []
        while todo:
            start = min(todo, key=de_str)
            circ = []
            de = start
            while True:
                circ.append(de)
                todo.discard(de)
                de = self.next_in_left_face(de)
                if de == start:
                    break
                if de not in todo:
                    raise DiagramError("face tracing does not close up")
            circuits.append(tuple(circ))

        # merge circuits per glue relations (union-find)
        key = {c: min(de_str(de) for de in c) for c in circuits}
        by_de: dict[DirEdge, tuple[DirEdge, ...]] = {}
        for c in circuits:
            for de in c:
                by_de[de] = c
        parent = {c: c for c in circuits}

        def find(c):
            while parent[c] is not c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        for a, b in self.glues:
            if a not in by_de or b not in by_de:
                raise DiagramError(f"glue refers to unknown directed edge")
            ca, cb = find(by_de[a]), find(by_de[b])
            if ca is cb:
                raise DiagramError(
                    f"glue {de_str(a)} {de_str(b)}: circuits already share a face"
                )
            parent[cb] = ca

        groups: dict[tuple[DirEdge, ...], list[tuple[DirEdge, ...]]] = {}
        for c in circuits:
            groups.setdefault(find(c), []).append(c)
        faces = []
        for members in groups.values():
            members.sort(key=lambda c: key[c])
            faces.append(Face(id="", circuits=members))
        faces.sort(key=lambda f: key[f.circuits[0]])
        for i, f in enumerate(faces):
            f.id = f"f{i}"
        return faces

    def left_face(self, de: DirEdge) -> str:
        return self.face_of_dir_edge[de]

    def right_face(self, de: DirEdge) -> str:
        return self.face_of_dir_edge[de_reverse(de)]

    def sector_face(self, vertex_id: str, i: int) -> str:
        """Face filling the sector between rotation[i] and rotation[i+1]."""
        dep = self.vertices[vertex_id].rotation[i]
        return self.left_face(self.de_out(dep))

    def euler_characteristic(self) -> int:
        return (
            len(self.vertices)
            - len(self.edges)
            + sum(f.euler for f in self.faces)
        )

    def components(self) -> list[set[str]]:
        """Connected components of the underlying graph (vertex id sets)."""
        seen: set[str] = set()
        comps = []
        for vid in sorted(self.vertices):
            if vid in seen:
                continue
            comp = {vid}
            stack = [vid]
            while stack:
                u = stack.pop()
                for h in self.vertices[u].rotation:
                    e = self.edges[self.dart_edge[h]]
                    for h2 in (e.tail, e.head):
                        w = self.dart_vertex[h2]
                        if w not in comp:
                            comp.add(w)
                            stack.append(w)
            seen |= comp
            comps.append(comp)
        return comps

    def surface_is_connected(self) -> bool:
        """Whether faces+glues join all graph components into one surface."""
        comps = self.components()
        if len(comps) <= 1:
            return True
        idx = {}
        for i, comp in enumerate(comps):
            for vid in comp:
                idx[vid] = i
        parent = list(range(len(comps)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for f in self.faces:
            reps = {find(idx[self.start_vertex(de)]) for de in f.dir_edges()}
            reps = sorted(reps)
            for r in reps[1:]:
                parent[r] = reps[0]
        return len({find(i) for i in range(len(comps))}) == 1

    # ------------------------------------------------------------ canonical

    def canonical_form(self) -> str:
        """Canonical encoding, equal iff two maps are isomorphic.

        The isomorphism must preserve vertex kinds, rotations (up to cyclic
        shift), over pairs, edge kinds and orientations, plus-side labels,
        and glue relations.  Marker vertices are significant (callers that
        want marker-insensitive comparison should normalize first).
        """
        comps = self.components()
        comp_forms = []
        for comp in comps:
            darts = sorted(
                h for h in self.dart_vertex if self.dart_vertex[h] in comp
            )
            best: Optional[str] = None
            for start in darts:
                form = self._encode_from(start)
                if best is None or form < best:
                    best = form
            comp_forms.append(best or "")
        comp_forms.sort()
        glue_part = self._encode_glues(comp_forms)
        return "|".join(comp_forms) + "#" + glue_part

    def _relabel_from(self, start: str) -> dict[str, int]:
        """BFS dart relabeling: deterministic given the start dart."""
        label: dict[str, int] = {}
        order: list[str] = []

        def visit(h: str) -> None:
            if h not in label:
                label[h] = len(label)
                order.append(h)

        visit(start)
        qi = 0
        while qi < len(order):
            h = order[qi]
            qi += 1
            # neighbors: rotation successor and edge mate
            visit(self.sigma(h))
            e = self.edges[self.dart_edge[h]]
            mate = e.head if self.dart_is_tail[h] else e.tail
            visit(mate)
        return label

    def _encode_from(self, start: str) -> str:
        label = self._relabel_from(start)
        verts = []
        for v in self.vertices.values():
            if v.rotation[0] not in label:
                continue
            rot = [label[h] for h in v.rotation]
            m = rot.index(min(rot))
            rot = rot[m:] + rot[:m]
            over = sorted(label[h] for h in v.over) if v.over else []
            verts.append((rot, v.kind, over))
        verts.sort()
        edges = []
        for e in self.edges.values():
            if e.tail not in label:
                continue
            edges.append((label[e.tail], label[e.head], e.kind, e.plus_side))
        edges.sort()
        return repr((verts, edges))

    def _encode_glues(self, comp_forms: list[str]) -> str:
        if not self.glues:
            return ""
        # encode glue endpoints via canonical labels of their components
        comps = self.components()
        comp_best: dict[int, dict[str, int]] = {}
        comp_rank: dict[str, int] = {}
        for i, comp in enumerate(comps):
            darts = sorted(
                h for h in self.dart_vertex if self.dart_vertex[h] in comp
            )
            best_form, best_label = None, None
            for start in darts:
                form = self._encode_from(start)
                if best_form is None or form < best_form:
                    best_form, best_label = form, self._relabel_from(start)
            comp_best[i] = best_label or {}
            for vid in comp:
                comp_rank[vid] = comp_forms.index(best_form or "")
        out = []
        for a, b in self.glues:
            enc = []
            for de in (a, b):
                e = self.edges[de[0]]
                vid = self.dart_vertex[e.tail]
                ci = next(i for i, c in enumerate(comps) if vid in c)
                lab = comp_best[ci]
                enc.append((comp_rank[vid], lab[e.tail], lab[e.head], de[1]))
            enc.sort()
            out.append(tuple(enc))
        out.sort()
        return repr(out)
