"""Rigid immersed polygon enumeration.

A rigid polygon on one side of the dividing set has exactly one positive
end and any number of negative ends.  Its boundary is walked from the
positive end in the polygon's own boundary orientation: the disk sits on
the left of the walk in the positive region and on the right in the
negative region (the negative region carries the mirror orientation).

The walk alternates knot-edge runs with events at vertices:

* at a crossing, the walk passes straight through (covering two
  quadrants) or turns across one quadrant, consuming a negative corner;
* a chord-word positive end contributes a single run along the dividing
  set realizing the word, entered and left across one quadrant at the
  word's endpoints (or, for a walk lying entirely on the dividing set,
  closing straight through its base point);
* markers are invisible; gamma points otherwise end the walk, because
  the disk cannot cross the dividing set.

A closed walk is accepted if its face multiplicities, reconstructed from
the walk's jump equations, are nonnegative, single-signed, capped, and
pass the cell-counted disk check (Euler characteristic one).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction

from .diagram import SurfaceDiagram
from .generators import GenKey, GeneratorSet
from .halfedge import DiagramError, DirEdge, de_reverse

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass(frozen=True)
class EnumerationPolicy:
    mult_cap: int
    area_cap: Fraction
    max_steps: int = 0          # 0: derive from the caps

    def doubled(self) -> "EnumerationPolicy":
        return EnumerationPolicy(
            self.mult_cap * 2, self.area_cap * 2,
            self.max_steps * 2 if self.max_steps else 0,
        )


def default_policy(d: SurfaceDiagram) -> EnumerationPolicy:
    nfaces = len(d.cmap.faces)
    total = sum((f.area for f in d.cmap.faces), Fraction(0))
    cap = 4 * nfaces
    return EnumerationPolicy(mult_cap=cap, area_cap=cap * total)


@dataclass(frozen=True)
class RigidPolygon:
    pos: GenKey
    side: int
    negatives: tuple[str, ...]          # crossing ids in boundary order
    walk: tuple[DirEdge, ...]           # full boundary walk incl. the run
    multiplicity: tuple[tuple[str, int], ...]
    area: Fraction

    def mult_dict(self) -> dict[str, int]:
        return dict(self.multiplicity)


def sector_positive(d: SurfaceDiagram, vid: str, sector: int, side: int) -> bool:
    """Whether the given quadrant of a crossing carries a positive end."""
    v = d.cmap.vertices[vid]
    if side > 0:
        return v.rotation[sector % 4] in v.over
    return v.rotation[(sector + 1) % 4] in v.over


class _Walker:
    def __init__(
        self,
        d: SurfaceDiagram,
        gens: GeneratorSet,
        pos: GenKey,
        side: int,
        policy: EnumerationPolicy,
    ):
        self.d = d
        self.gens = gens
        self.pos = pos
        self.side = side
        self.policy = policy
        self.cm = d.cmap
        self.results: list[RigidPolygon] = []
        self.prune_area = True
        if policy.max_steps:
            self.max_steps = policy.max_steps
        else:
            lam = sum(1 for e in self.cm.edges.values() if e.kind == "lambda")
            self.max_steps = 2 * policy.mult_cap * max(lam, 1) + 8
        # closure state, set per start configuration
        self._dep0 = ""
        self._start_v = ""
        self._strict_arr: str | None = None

    # ------------------------------------------------------------ coverage

    def cover(self, dep: str, arr: str) -> list[int] | None:
        """Sector indices swept between a departure and an arrival dart.

        Counterclockwise from the departure dart for disks in the positive
        region, clockwise in the negative region.  None for a degenerate
        zero-quadrant turn.
        """
        cm = self.cm
        v = cm.vertices[cm.dart_vertex[dep]]
        k = len(v.rotation)
        pd = cm.dart_pos[dep]
        pa = cm.dart_pos[arr]
        if self.side > 0:
            q = (pa - pd) % k
            if q == 0:
                return None
            return [(pd + t) % k for t in range(q)]
        q = (pd - pa) % k
        if q == 0:
            return None
        return [(pd - 1 - t) % k for t in range(q)]

    def dep_for_corner(self, arr: str) -> str:
        """Departure dart making a one-quadrant turn at the arrival dart."""
        return self.cm.sigma(arr, -1 if self.side > 0 else 1)

    # ---------------------------------------------------------------- run

    def run_steps(self) -> list[DirEdge]:
        """Chord run in walk order (always spelled in the Reeb direction)."""
        assert self.pos[0] == "w"
        edges: list[str] = []
        for cid in self.pos[1]:
            edges.extend(self.gens.chord_by_id(cid).edges)
        return [(e, True) for e in edges]

    # ---------------------------------------------------------------- dfs

    def search(self) -> list[RigidPolygon]:
        if self.pos[0] == "x":
            vid = self.pos[1]
            if self.d.crossing_side(vid) != self.side:
                return []
            v = self.cm.vertices[vid]
            for sector in range(4):
                if not sector_positive(self.d, vid, sector, self.side):
                    continue
                if self.side > 0:
                    dep = v.rotation[sector]
                    arr = v.rotation[(sector + 1) % 4]
                else:
                    dep = v.rotation[(sector + 1) % 4]
                    arr = v.rotation[sector]
                self._dep0 = dep
                self._start_v = vid
                self._strict_arr = arr
                self._dfs(dep, [], [], {})
        else:
            run = self.run_steps()
            # the disk must sit on its own side of the dividing set
            ps = self.cm.edges[run[0][0]].plus_side
            disk_face = self._disk_face(run[0])
            if self.cm.faces_by_id[disk_face].sign != self.side:
                return []
            counts: dict[DirEdge, int] = {}
            for de in run:
                counts[de] = counts.get(de, 0) + 1
            self._dep0 = self.cm.dart_of(run[0], "start")
            self._start_v = self.cm.dart_vertex[self._dep0]
            self._strict_arr = None
            end_arr = self.cm.dart_of(run[-1], "end")
            end_v = self.cm.dart_vertex[end_arr]
            # pure dividing-set disk: the run closes through its base point
            if end_v == self._start_v:
                cov = self.cover(self._dep0, end_arr)
                if cov is not None and len(cov) == 2:
                    self._close(list(run), [], counts)
            # hand off to the knot across one quadrant
            dep1 = self.dep_for_corner(end_arr)
            if self.cm.edges[self.cm.dart_edge[dep1]].kind == "lambda":
                self._dfs(dep1, list(run), [], counts)
        self.results.sort(key=lambda p: (p.negatives, p.walk))
        return self.results

    def _try_close_at(self, arr: str) -> bool:
        if self.cm.dart_vertex[arr] != self._start_v:
            return False
        if self._strict_arr is not None:
            return arr == self._strict_arr
        cov = self.cover(self._dep0, arr)
        return cov is not None and len(cov) == 1

    def _dfs(
        self,
        dep: str,
        steps: list[DirEdge],
        negs: list[str],
        counts: dict[DirEdge, int],
    ) -> None:
        cm = self.cm
        de = cm.de_out(dep)
        if cm.edges[de[0]].kind != "lambda":
            return
        if cm.faces_by_id[self._disk_face(de)].sign != self.side:
            return
        n = counts.get(de, 0) + 1
        if n > self.policy.mult_cap:
            return
        if len(steps) + 1 > self.max_steps:
            return
        counts[de] = n
        steps.append(de)
        if (not self.prune_area) or (
            self._area_lower_bound(counts) <= self.policy.area_cap
        ):
            arr = cm.dart_of(de, "end")
            v = cm.vertices[cm.dart_vertex[arr]]
            if v.kind == "marker":
                self._dfs(self._other_dart(v, arr), steps, negs, counts)
            else:
                if self._try_close_at(arr):
                    self._close(steps, negs, counts)
                if v.kind == "crossing":
                    # pass straight through
                    self._dfs(cm.sigma(arr, 2), steps, negs, counts)
                    # negative corner
                    dep2 = self.dep_for_corner(arr)
                    cov = self.cover(dep2, arr)
                    if cov is not None and len(cov) == 1:
                        if not sector_positive(self.d, v.id, cov[0], self.side):
                            negs.append(v.id)
                            self._dfs(dep2, steps, negs, counts)
                            negs.pop()
        steps.pop()
        if n == 1:
            del counts[de]
        else:
            counts[de] = n - 1

    @staticmethod
    def _other_dart(v, dart: str) -> str:
        return v.rotation[1] if v.rotation[0] == dart else v.rotation[0]

    def _area_lower_bound(self, counts: dict[DirEdge, int]) -> Fraction:
        lb: dict[str, int] = {}
        for de, n in counts.items():
            fid = self._disk_face(de)
            if n > lb.get(fid, 0):
                lb[fid] = n
        return sum(
            (self.cm.faces_by_id[f].area * n for f, n in lb.items()),
            Fraction(0),
        )

    def _disk_face(self, de: DirEdge) -> str:
        return (
            self.cm.left_face(de)
            if self.side > 0
            else self.cm.left_face(de_reverse(de))
        )

    # ------------------------------------------------------------- close

    def _close(
        self,
        steps: list[DirEdge],
        negs: list[str],
        counts: dict[DirEdge, int],
    ) -> None:
        mult = self._solve_multiplicities(counts)
        if mult is None:
            return
        if not self._disk_check(steps, mult):
            return
        area = sum(
            (self.cm.faces_by_id[f].area * n for f, n in mult.items() if n),
            Fraction(0),
        )
        if area > self.policy.area_cap:
            return
        self.results.append(
            RigidPolygon(
                pos=self.pos,
                side=self.side,
                negatives=tuple(negs),
                walk=tuple(steps),
                multiplicity=tuple(sorted((f, n) for f, n in mult.items() if n)),
                area=area,
            )
        )

    def _solve_multiplicities(
        self, counts: dict[DirEdge, int]
    ) -> dict[str, int] | None:
        """Face multiplicities from the walk's jump equations."""
        cm = self.cm
        jump: dict[str, int] = {}  # edge id -> m(left) - m(right)
        for (eid, fwd), n in counts.items():
            jump[eid] = jump.get(eid, 0) + (n if fwd else -n)
        if self.side < 0:
            jump = {e: -v for e, v in jump.items()}
        val: dict[str, int] = {}
        f0 = self.cm.faces[0].id
        val[f0] = 0
        stack = [f0]
        while stack:
            fid = stack.pop()
            for de in cm.faces_by_id[fid].dir_edges():
                j = jump.get(de[0], 0) * (1 if de[1] else -1)
                nb = cm.left_face(de_reverse(de))
                want = val[fid] - j
                if nb in val:
                    if val[nb] != want:
                        return None  # walk does not bound
                else:
                    val[nb] = want
                    stack.append(nb)
        off_side = [
            v for f, v in val.items()
            if self.cm.faces_by_id[f].sign != self.side
        ]
        if not off_side:
            return None
        base = off_side[0]
        if any(v != base for v in off_side):
            return None
        mult = {f: v - base for f, v in val.items()}
        if any(v < 0 or v > self.policy.mult_cap for v in mult.values()):
            return None
        if any(
            v > 0 and self.cm.faces_by_id[f].sign != self.side
            for f, v in mult.items()
        ):
            return None
        return mult

    def _disk_check(self, steps: list[DirEdge], mult: dict[str, int]) -> bool:
        """Cell-counted Euler characteristic of the covered surface is 1."""
        cm = self.cm
        chi = sum(
            mult[f.id] * f.euler for f in cm.faces if mult.get(f.id)
        )
        t_fwd: dict[str, int] = {}
        t_bwd: dict[str, int] = {}
        for eid, fwd in steps:
            (t_fwd if fwd else t_bwd)[eid] = (t_fwd if fwd else t_bwd).get(eid, 0) + 1
        ends_at: dict[str, int] = {}
        for e in cm.edges.values():
            tf = t_fwd.get(e.id, 0)
            tb = t_bwd.get(e.id, 0)
            ml = mult.get(cm.left_face((e.id, True)), 0)
            mr = mult.get(cm.left_face((e.id, False)), 0)
            # strand counts in the region-on-left orientation
            zf, zb = (tf, tb) if self.side > 0 else (tb, tf)
            i_e = ml - zf
            if i_e != mr - zb or i_e < 0:
                return False
            if tf + tb == 0 and i_e == 0:
                continue
            chi -= i_e + tf + tb
            for dart in (e.tail, e.head):
                vid = cm.dart_vertex[dart]
                ends_at[vid] = ends_at.get(vid, 0) + tf + tb
        q_sum: dict[str, int] = {}
        b_cnt: dict[str, int] = {}
        prev = steps[-1]
        for de in steps:
            arr = cm.dart_of(prev, "end")
            dep = cm.dart_of(de, "start")
            vid = cm.dart_vertex[dep]
            if cm.dart_vertex[arr] != vid:
                return False
            cov = self.cover(dep, arr)
            if cov is None:
                return False
            q_sum[vid] = q_sum.get(vid, 0) + len(cov)
            b_cnt[vid] = b_cnt.get(vid, 0) + 1
            for s in cov:
                if not mult.get(cm.sector_face(vid, s)):
                    return False
            prev = de
        for v in cm.vertices.values():
            k = len(v.rotation)
            S = sum(mult.get(cm.sector_face(v.id, i), 0) for i in range(k))
            q = q_sum.get(v.id, 0)
            b = b_cnt.get(v.id, 0)
            if ends_at.get(v.id, 0) != 2 * b:
                return False
            if (S - q) % k != 0 or S - q < 0:
                return False
            i_v = (S - q) // k
            if i_v == 0 and b == 0:
                continue
            chi += i_v + b
        return chi == 1


def enumerate_polygons(
    d: SurfaceDiagram,
    gens: GeneratorSet,
    pos: GenKey,
    side: int,
    policy: EnumerationPolicy,
) -> list[RigidPolygon]:
    if policy.mult_cap < 1:
        raise DiagramError("multiplicity cap must be at least 1")
    return _Walker(d, gens, pos, side, policy).search()


def enumerate_polygons_unpruned(
    d: SurfaceDiagram,
    gens: GeneratorSet,
    pos: GenKey,
    side: int,
    policy: EnumerationPolicy,
    max_steps: int,
) -> list[RigidPolygon]:
    """Oracle search: depth-first over raw walks with only a length cap.

    Skips the area-based pruning of the main search; used to cross-check
    it on small diagrams.
    """
    loose = EnumerationPolicy(
        mult_cap=policy.mult_cap,
        area_cap=policy.area_cap,
        max_steps=max_steps,
    )
    w = _Walker(d, gens, pos, side, loose)
    w.prune_area = False
    return w.search()
