"""Recursive construction of the diamond graphs G_0, G_1, ...

G_0 is a single edge {s, t}.  G_i replaces every edge (u, v) of G_{i-1} by
the quadrilateral u, a, v, b; the new pair {a, b} is the level-i anti-edge of
(u, v).  The full per-level history is kept because the Poincare certificate
needs the anti-edges of every level, not only the final edge set.

Vertex numbering: s = 0, t = 1, then new vertices in order of creation.  Level
i vertices are created by walking the level i-1 edges in canonical order
(lexicographic on (u, v) with u < v); within a quadrilateral, a is created
before b.  Consequently G_{k-1}'s ids are a prefix of G_k's.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .errors import CapacityError

MAX_LEVEL = 8


@dataclass(frozen=True, order=True)
class LeveledEdge:
    u: int
    v: int
    level: int

    def __post_init__(self) -> None:
        if not self.u < self.v:
            raise ValueError(f"edge must satisfy u < v, got ({self.u}, {self.v})")

    @property
    def length(self) -> float:
        return edge_length(self.level)


@dataclass(frozen=True)
class AntiEdge:
    a: int
    b: int
    level: int
    parent: LeveledEdge


@dataclass(frozen=True)
class DiamondGraph:
    """G_k together with its construction history.

    ``edges_by_level[i]`` holds the 4**i edges of G_i (i = 0..k).
    ``anti_edges_by_level[i]`` holds the 4**(i-1) anti-edges of level i for
    i = 1..k; index 0 is an empty placeholder so indices match levels.
    ``children[i][j]`` is the tuple of indices into ``edges_by_level[i+1]``
    of the four edges that replaced ``edges_by_level[i][j]``, and
    ``parents[i+1][c]`` is the inverse map.
    """

    level: int
    num_vertices: int
    edges_by_level: tuple[tuple[LeveledEdge, ...], ...]
    anti_edges_by_level: tuple[tuple[AntiEdge, ...], ...]
    children: tuple[tuple[tuple[int, int, int, int], ...], ...]
    parents: tuple[tuple[int, ...], ...]

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @property
    def edges(self) -> tuple[LeveledEdge, ...]:
        """E(G_k): the edges of the final level."""
        return self.edges_by_level[self.level]

    @property
    def s(self) -> int:
        return 0

    @property
    def t(self) -> int:
        return 1

    def all_anti_edges(self) -> list[AntiEdge]:
        """Anti-edges of every level, level-major."""
        return [ae for i in range(1, self.level + 1) for ae in self.anti_edges_by_level[i]]

    def to_json(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "num_vertices": self.num_vertices,
            "edges": [
                {"u": e.u, "v": e.v, "level": e.level}
                for level_edges in self.edges_by_level
                for e in level_edges
            ],
            "anti_edges": [
                {"a": ae.a, "b": ae.b, "level": ae.level,
                 "parent_u": ae.parent.u, "parent_v": ae.parent.v}
                for ae in self.all_anti_edges()
            ],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "DiamondGraph":
        """Rebuild from the JSON schema; the payload must match build_diamond's output."""
        g = build_diamond(int(data["level"]))
        if g.to_json() != data:
            raise ValueError("JSON does not describe a canonical diamond graph")
        return g


def num_vertices(k: int) -> int:
    """|V(G_k)| = (2 * 4**k + 4) / 3."""
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    return (2 * 4**k + 4) // 3


def edge_length(i: int) -> float:
    """Length 2**-i of a level-i edge (exact in binary floating point)."""
    if i < 0:
        raise ValueError(f"level must be nonnegative, got {i}")
    return math.ldexp(1.0, -i)


def _canonical(u: int, v: int, level: int) -> LeveledEdge:
    return LeveledEdge(u, v, level) if u < v else LeveledEdge(v, u, level)


def build_diamond(k: int) -> DiamondGraph:
    if not isinstance(k, int) or isinstance(k, bool):
        raise TypeError(f"level must be an int, got {type(k).__name__}")
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    if k > MAX_LEVEL:
        raise CapacityError(f"level {k} exceeds the size guard k <= {MAX_LEVEL}")

    edges_by_level: list[tuple[LeveledEdge, ...]] = [(LeveledEdge(0, 1, 0),)]
    anti_by_level: list[tuple[AntiEdge, ...]] = [()]
    children: list[tuple[tuple[int, int, int, int], ...]] = []
    parents: list[tuple[int, ...]] = [()]
    next_id = 2

    for i in range(1, k + 1):
        new_edges: list[LeveledEdge] = []
        new_anti: list[AntiEdge] = []
        for parent in edges_by_level[i - 1]:
            u, v = parent.u, parent.v
            a, b = next_id, next_id + 1
            next_id += 2
            new_edges.extend([
                _canonical(u, a, i),
                _canonical(a, v, i),
                _canonical(v, b, i),
                _canonical(b, u, i),
            ])
            new_anti.append(AntiEdge(a, b, i, parent))
        # order edges canonically, then record the parent/child links
        order = sorted(range(len(new_edges)), key=lambda j: (new_edges[j].u, new_edges[j].v))
        position = {old: new for new, old in enumerate(order)}
        kids = tuple(
            tuple(sorted(position[4 * j + c] for c in range(4)))
            for j in range(len(edges_by_level[i - 1]))
        )
        par = [0] * len(new_edges)
        for j, group in enumerate(kids):
            for c in group:
                par[c] = j
        edges_by_level.append(tuple(new_edges[j] for j in order))
        anti_by_level.append(tuple(new_anti))
        children.append(kids)  # type: ignore[arg-type]
        parents.append(tuple(par))

    children.append(tuple(() for _ in edges_by_level[k]))  # type: ignore[misc]
    return DiamondGraph(
        level=k,
        num_vertices=next_id,
        edges_by_level=tuple(edges_by_level),
        anti_edges_by_level=tuple(anti_by_level),
        children=tuple(children),
        parents=tuple(parents),
    )


def anti_edges(g: DiamondGraph, i: int) -> tuple[AntiEdge, ...]:
    """A_i, the 4**(i-1) anti-edges created at level i."""
    if not 1 <= i <= g.level:
        raise ValueError(f"anti-edge level must lie in [1, {g.level}], got {i}")
    return g.anti_edges_by_level[i]


def level_for_points(n: int) -> int:
    """Smallest k such that G_k has at least n vertices."""
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    k = 0
    while num_vertices(k) < n:
        k += 1
    return k
