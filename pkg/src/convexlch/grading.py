"""Gradings via capping paths, resolved cycles, and capping chains.

The grading of a chord is an affine function of the rotation number of a
formal capping surface: an integer 2-chain whose boundary is the capping
loop of the chord, corrected by basis cycles of the surface when the loop
is not null-homologous.  The 2-chain is split, level by level and side by
side, into embedded face-union subregions; each subregion contributes its
Euler characteristic plus a quarter for every quadrant beyond two at each
boundary corner.

Orientation convention: subregions in the positive region count with the
reference orientation, subregions in the negative region with the mirror
orientation (a counterclockwise loop in the negative region is negatively
oriented).  Marker vertices are smooth points and never contribute
corners.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diagram import SurfaceDiagram
from .generators import Chord, GenKey, GeneratorSet
from .halfedge import DiagramError, DirEdge, de_reverse
from .intlinalg import solve_integer


@dataclass
class CappingPath:
    generator: GenKey
    knot_part: list[DirEdge]       # path along the knot, end(gen) -> start(gen)
    chord_part: list[DirEdge]      # the chord run itself (words only)

    def loop(self) -> list[DirEdge]:
        return self.knot_part + self.chord_part


@dataclass
class Subregion:
    faces: frozenset[str]
    side: int                      # +1 / -1
    coefficient: int               # +1 / -1 in the formal sum
    euler: int
    corner_quadrants: list[int]    # one entry per corner fan

    @property
    def rotation(self) -> Fraction:
        return Fraction(self.euler) + sum(
            Fraction(m - 2, 4) for m in self.corner_quadrants
        )


@dataclass
class ResolvedCycles:
    cycle: list[int]               # corrected 1-cycle, edge-indexed
    corrections: list[int]         # multiplier per h1 basis element
    edge_ids: list[str]


@dataclass
class CappingSurface:
    chain: dict[str, int]          # face id -> integer coefficient
    subregions: list[Subregion]

    @property
    def rotation(self) -> Fraction:
        return sum((s.coefficient * s.rotation for s in self.subregions), Fraction(0))


class GradingContext:
    def __init__(self, diagram: SurfaceDiagram, gens: GeneratorSet | None = None):
        self.d = diagram
        self.gens = gens
        self._edge_ids = sorted(diagram.cmap.edges)
        self._rot: int | None = None
        self._grade_cache: dict[GenKey, int] = {}

    # ------------------------------------------------------- capping paths

    def _circuit_passages(self, vid: str) -> list[int]:
        """Indices i such that lambda_circuit[i] starts at vid."""
        cm = self.d.cmap
        return [
            i for i, de in enumerate(self.d.lambda_circuit)
            if cm.start_vertex(de) == vid
        ]

    def _segment(self, i0: int, i1: int) -> list[DirEdge]:
        """Circuit edges from position i0 up to (not including) i1 != i0."""
        circ = self.d.lambda_circuit
        n = len(circ)
        if i0 % n == i1 % n:
            raise DiagramError("degenerate circuit segment")
        out = []
        j = i0 % n
        while j != i1 % n:
            out.append(circ[j])
            j = (j + 1) % n
        return out

    def _path_candidates(self, v_from: str, v_to: str) -> list[list[DirEdge]]:
        """Oriented knot paths from v_from to v_to (forward segment, and the
        complementary segment reversed)."""
        if v_from == v_to:
            return [[]]
        starts = self._circuit_passages(v_from)
        ends = self._circuit_passages(v_to)
        cands = []
        for i0 in starts:
            for i1 in ends:
                seg = self._segment(i0, i1)
                cands.append(seg)
        for i0 in ends:
            for i1 in starts:
                seg = self._segment(i0, i1)
                cands.append([de_reverse(de) for de in reversed(seg)])
        return cands

    @staticmethod
    def _pick_path(cands: list[list[DirEdge]]) -> list[DirEdge]:
        return min(cands, key=lambda p: (len(p), tuple(e for e, _ in p)))

    def capping_path(self, gen: GenKey) -> CappingPath:
        cm = self.d.cmap
        if gen[0] == "x":
            vid = gen[1]
            v = cm.vertices[vid]
            passages = self._circuit_passages(vid)
            if len(passages) != 2:
                raise DiagramError(f"crossing {vid} not visited twice by knot")
            over_out = [
                i for i in passages
                if cm.dart_of(self.d.lambda_circuit[i], "start") in v.over
            ]
            if len(over_out) != 1:
                raise DiagramError(f"crossing {vid}: over darts inconsistent")
            i_over = over_out[0]
            i_under = next(i for i in passages if i != i_over)
            fwd = self._segment(i_over, i_under)
            bwd = [
                de_reverse(de)
                for de in reversed(self._segment(i_under, i_over))
            ]
            return CappingPath(gen, self._pick_path([fwd, bwd]), [])
        word = gen[1]
        assert self.gens is not None, "word gradings need a generator set"
        chords = [self.gens.chord_by_id(c) for c in word]
        run: list[DirEdge] = []
        for ch in chords:
            run += [(e, True) for e in ch.edges]
        path = self._pick_path(
            self._path_candidates(chords[-1].end, chords[0].start)
        )
        return CappingPath(gen, path, run)

    # ------------------------------------------------ cycles and surfaces

    def resolve_and_correct(self, path: CappingPath) -> ResolvedCycles:
        vec = self.d.cycle_vector(path.loop())
        chain, ks = self._bounding_solution(vec)
        if chain is None:
            raise DiagramError(
                "capping loop class not spanned by the h1 basis; "
                "supply h1 cycles covering the knot-and-dividing-set classes"
            )
        basis_vecs = [self.d.cycle_vector(c) for c in self.d.h1_basis]
        corrected = list(vec)
        for k, bv in zip(ks, basis_vecs):
            corrected = [a - k * b for a, b in zip(corrected, bv)]
        return ResolvedCycles(corrected, [-k for k in ks], self._edge_ids)

    def _bounding_solution(
        self, cycle_vec: list[int]
    ) -> tuple[dict[str, int] | None, list[int]]:
        d = self.d
        eids, fids, M = d.boundary_matrix()
        basis_vecs = [d.cycle_vector(c) for c in d.h1_basis]
        A = [
            M[i] + [bv[i] for bv in basis_vecs]
            for i in range(len(eids))
        ]
        x, kernel = solve_integer(A, cycle_vec)
        if x is None:
            return None, []
        nf = len(fids)

        def score(v: list[int]):
            return (
                sum(abs(c) for c in v[:nf]),
                sum(abs(c) for c in v[nf:]),
                tuple(-c for c in v),
            )

        # The solution lattice is low-dimensional (the surface class plus
        # any h1 relations).  Coordinate-descend to a small representative,
        # then search a small box for the canonical minimum.
        if kernel:
            if len(kernel) > 3:
                raise DiagramError("unexpectedly large capping solution lattice")
            for _ in range(4):
                for kv in kernel:
                    span = max(abs(c) for c in x) + 1
                    best_t = min(
                        range(-span, span + 1),
                        key=lambda t: score(
                            [a + t * b for a, b in zip(x, kv)]
                        ),
                    )
                    if best_t:
                        x = [a + best_t * b for a, b in zip(x, kv)]
            import itertools

            best = None
            for ts in itertools.product(*([range(-2, 3)] * len(kernel))):
                cand = list(x)
                for t, kv in zip(ts, kernel):
                    if t:
                        cand = [a + t * b for a, b in zip(cand, kv)]
                s = score(cand)
                if best is None or s < best[0]:
                    best = (s, cand)
            x = best[1]
        chain = {fids[i]: x[i] for i in range(nf)}
        ks = x[nf:]
        return chain, ks

    def bounding_chain(self, path: CappingPath) -> CappingSurface:
        vec = self.d.cycle_vector(path.loop())
        chain, _ = self._bounding_solution(vec)
        if chain is None:
            raise DiagramError("capping loop class not spanned by the h1 basis")
        return CappingSurface(chain, self._subregions(chain))

    def _subregions(self, chain: dict[str, int]) -> list[Subregion]:
        d = self.d
        out: list[Subregion] = []
        levels = sorted({v for v in chain.values() if v != 0})
        gamma_ids = set(d.gamma_edges())
        for level in levels:
            sgn = 1 if level > 0 else -1
            grp = {
                f
                for f, v in chain.items()
                if (v >= level if level > 0 else v <= level)
            }
            for comp in self._lambda_components(grp):
                side = d.cmap.faces_by_id[next(iter(comp))].sign
                coeff = sgn * side
                out.append(
                    Subregion(
                        faces=frozenset(comp),
                        side=side,
                        coefficient=coeff,
                        euler=d._cut_euler(comp, gamma_ids),
                        corner_quadrants=self._corners(comp),
                    )
                )
        return out

    def _lambda_components(self, faces: set[str]) -> list[set[str]]:
        d = self.d
        comps = []
        todo = set(faces)
        while todo:
            seed = min(todo)
            side = d.cmap.faces_by_id[seed].sign
            comp = {seed}
            stack = [seed]
            todo.discard(seed)
            while stack:
                fid = stack.pop()
                for de in d.cmap.faces_by_id[fid].dir_edges():
                    if d.cmap.edges[de[0]].kind != "lambda":
                        continue
                    nb = d.cmap.left_face(de_reverse(de))
                    if nb in todo and d.cmap.faces_by_id[nb].sign == side:
                        todo.discard(nb)
                        comp.add(nb)
                        stack.append(nb)
            comps.append(comp)
        return comps

    def _corners(self, region: set[str]) -> list[int]:
        """Quadrant counts of the corner fans of a one-side face union."""
        cm = self.d.cmap
        out: list[int] = []
        for v in cm.vertices.values():
            if v.kind == "marker":
                continue
            k = len(v.rotation)
            in_r = [cm.sector_face(v.id, i) in region for i in range(k)]
            if not any(in_r):
                continue
            joined = []
            for i in range(k):
                h = v.rotation[(i + 1) % k]
                e = cm.edges[cm.dart_edge[h]]
                interior = (
                    e.kind == "lambda"
                    and cm.left_face(cm.de_out(h)) in region
                    and cm.left_face(de_reverse(cm.de_out(h))) in region
                )
                joined.append(in_r[i] and in_r[(i + 1) % k] and interior)
            if all(in_r) and all(joined):
                continue  # interior vertex
            i = 0
            fans = []
            # find fan starts: covered sector whose predecessor link is open
            for i in range(k):
                prev = (i - 1) % k
                if in_r[i] and not joined[prev]:
                    m = 1
                    j = i
                    while joined[j]:
                        j = (j + 1) % k
                        m += 1
                    fans.append(m)
            out.extend(fans)
        return out

    # ----------------------------------------------------------- gradings

    def surface_rotation(self, surf: CappingSurface) -> Fraction:
        return surf.rotation

    def knot_rotation_number(self) -> int:
        if self._rot is not None:
            return self._rot
        if not self.d.lambda_circuit:
            self._rot = 0
            return 0
        path = CappingPath(("rot",), list(self.d.lambda_circuit), [])
        surf = self.bounding_chain(path)
        r = surf.rotation
        if r.denominator != 1:
            raise DiagramError(f"rotation number {r} is not an integer")
        self._rot = int(r)
        return self._rot

    def grade_raw(self, gen: GenKey) -> int:
        """Integer grading before any reduction mod the Maslov number."""
        if gen in self._grade_cache:
            return self._grade_cache[gen]
        path = self.capping_path(gen)
        surf = self.bounding_chain(path)
        r = surf.rotation
        if gen[0] == "x":
            val = 2 * r - Fraction(1, 2)
        else:
            val = 2 * r - 1
        if val.denominator != 1:
            raise DiagramError(
                f"non-integral grading {val} for {gen}; convention error"
            )
        g = int(val)
        self._grade_cache[gen] = g
        return g

    def grade(self, gen: GenKey) -> int:
        """Grading of a generator; hatted words are shifted up by one.

        Values are canonical residues in [0, 2 rot) when rot is nonzero.
        """
        g = self.grade_raw(gen)
        if gen[0] == "w":
            g += 1
        rot = self.knot_rotation_number()
        if rot:
            g %= abs(2 * rot)
        return g
