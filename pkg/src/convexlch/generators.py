"""Generator enumeration: crossings and dividing-set chord words.

A chord is an arc of the dividing set between two consecutive knot
intersection points, traversed in the Reeb direction (the orientation of
its circle).  Chord words are composable sequences of chords; they may
wind around their circle arbitrarily often, so the set of words is
truncated at a maximum length.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import SurfaceDiagram
from .halfedge import DiagramError, DirEdge

# Generator keys used throughout the algebra:
#   ("x", vertex_id)        crossing chord
#   ("w", (chord_id, ...))  hatted chord word
GenKey = tuple


@dataclass(frozen=True)
class Chord:
    id: str                  # "arc:<first edge id>"
    circle: int              # index into diagram.gamma_circles
    edges: tuple[str, ...]   # gamma edges in Reeb order
    start: str               # gamma-point vertex at the source
    end: str                 # gamma-point vertex at the target


@dataclass
class GeneratorSet:
    diagram: SurfaceDiagram
    crossings: list[str]
    chords: list[Chord]
    max_word_len: int
    words: list[tuple[str, ...]]

    def chord_by_id(self, cid: str) -> Chord:
        return self._chord_index[cid]

    def __post_init__(self):
        self._chord_index = {c.id: c for c in self.chords}

    def word_is_composable(self, word: tuple[str, ...]) -> bool:
        cs = [self._chord_index[c] for c in word]
        return all(a.end == b.start for a, b in zip(cs, cs[1:]))

    def word_start(self, word: tuple[str, ...]) -> str:
        return self._chord_index[word[0]].start

    def word_end(self, word: tuple[str, ...]) -> str:
        return self._chord_index[word[-1]].end

    def word_closed(self, word: tuple[str, ...]) -> bool:
        return self.word_start(word) == self.word_end(word)

    def all_generators(self) -> list[GenKey]:
        out: list[GenKey] = [("x", v) for v in self.crossings]
        out += [("w", w) for w in self.words]
        return out

    def gen_name(self, key: GenKey) -> str:
        d = self.diagram
        if key[0] == "x":
            return d.label_of(key[1])
        return "*".join(d.label_of(c) for c in key[1])


def indecomposable_chords(d: SurfaceDiagram) -> list[Chord]:
    chords: list[Chord] = []
    for ci, circ in enumerate(d.gamma_circles):
        cm = d.cmap
        # vertices along the circle, in order, marking gamma points
        stops = [
            i
            for i, de in enumerate(circ)
            if cm.vertices[cm.start_vertex(de)].kind == "gamma"
        ]
        if not stops:
            continue
        n = len(circ)
        for si, i0 in enumerate(stops):
            i1 = stops[(si + 1) % len(stops)]
            idxs = []
            j = i0
            while True:
                idxs.append(j)
                j = (j + 1) % n
                if j == i1:
                    break
                if j == i0:  # single gamma point: full loop
                    break
            edges = tuple(circ[j][0] for j in idxs)
            chords.append(
                Chord(
                    id=f"arc:{edges[0]}",
                    circle=ci,
                    edges=edges,
                    start=cm.start_vertex(circ[i0]),
                    end=cm.start_vertex(circ[i1]),
                )
            )
    return chords


def enumerate_generators(d: SurfaceDiagram, max_word_len: int) -> GeneratorSet:
    if max_word_len < 1:
        raise DiagramError("word-length truncation must be at least 1")
    chords = indecomposable_chords(d)
    order = sorted(c.id for c in chords)
    by_id = {c.id: c for c in chords}
    words: list[tuple[str, ...]] = []

    def grow(prefix: list[str]) -> None:
        if prefix:
            words.append(tuple(prefix))
        if len(prefix) == max_word_len:
            return
        tail = by_id[prefix[-1]].end if prefix else None
        for cid in order:
            if tail is not None and by_id[cid].start != tail:
                continue
            prefix.append(cid)
            grow(prefix)
            prefix.pop()

    grow([])
    words.sort(key=lambda w: (len(w), w))
    return GeneratorSet(
        diagram=d,
        crossings=d.crossings,
        chords=[by_id[c] for c in order],
        max_word_len=max_word_len,
        words=words,
    )


def default_word_len(d: SurfaceDiagram) -> int:
    return 2 * len(indecomposable_chords(d)) + 1
