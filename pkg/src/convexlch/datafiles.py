"""Access to the bundled example diagrams."""

from __future__ import annotations

import importlib.resources as resources

from .diagram import SurfaceDiagram, parse_diagram

BUNDLED = [
    "torus_unknot",
    "s2_unknot",
    "genus2_octagon",
    "trefoil_t2",
    "chekanov_a",
    "chekanov_b",
    "classical_unknot_t2",
    "empty_torus",
]


def data_text(name: str) -> str:
    pkg = resources.files(__package__) / "data" / name
    return pkg.read_text(encoding="utf-8")


def load_bundled(name: str) -> SurfaceDiagram:
    fn = f"{name}.diag"
    return parse_diagram(data_text(fn), fn)
