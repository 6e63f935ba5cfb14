"""Architecture graphs: physical qubit connectivity and distances."""

from __future__ import annotations

from collections import deque
from importlib import resources
from pathlib import Path


class ArchGraph:
    """Undirected connected graph over physical qubits 0..num_vertices-1.

    Edges are stored canonically as sorted (u, v) pairs with u < v; the
    canonical edge order doubles as the deterministic action order used by
    the router.
    """

    __slots__ = ("name", "num_vertices", "edges", "neighbors", "_adj", "_dist")

    def __init__(self, num_vertices: int, edges, name: str = "custom"):
        if num_vertices < 2:
            raise ValueError("architecture needs at least 2 vertices")
        canon = set()
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range for {num_vertices} vertices")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            canon.add((u, v) if u < v else (v, u))
        self.name = name
        self.num_vertices = num_vertices
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(canon))
        nbrs: list[list[int]] = [[] for _ in range(num_vertices)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        self.neighbors: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(ns)) for ns in nbrs)
        self._adj = tuple(frozenset(ns) for ns in self.neighbors)
        self._dist: list[list[int]] | None = None
        self._check_connected()

    def _check_connected(self) -> None:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != self.num_vertices:
            missing = sorted(set(range(self.num_vertices)) - seen)
            raise ValueError(f"architecture is not connected; unreachable: {missing}")

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def distances(self) -> list[list[int]]:
        """All-pairs shortest-path lengths, BFS from every vertex (cached)."""
        if self._dist is None:
            n = self.num_vertices
            full = []
            for s in range(n):
                d = [-1] * n
                d[s] = 0
                queue = deque([s])
                while queue:
                    u = queue.popleft()
                    du = d[u]
                    for v in self.neighbors[u]:
                        if d[v] < 0:
                            d[v] = du + 1
                            queue.append(v)
                full.append(d)
            self._dist = full
        return self._dist

    @property
    def diameter(self) -> int:
        return max(max(row) for row in self.distances())

    def shortest_path(self, u: int, v: int) -> list[int]:
        """One shortest u-v path, deterministic (lowest-index BFS ties)."""
        if u == v:
            return [u]
        prev = {u: u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in self.neighbors[x]:
                if y not in prev:
                    prev[y] = x
                    if y == v:
                        path = [v]
                        while path[-1] != u:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    queue.append(y)
        raise ValueError(f"no path between {u} and {v}")  # unreachable: connected

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ArchGraph)
            and self.num_vertices == other.num_vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.num_vertices, self.edges))

    def __repr__(self) -> str:
        return f"ArchGraph({self.name!r}, vertices={self.num_vertices}, edges={len(self.edges)})"


def from_edge_list(num_vertices: int, edges, name: str = "custom") -> ArchGraph:
    return ArchGraph(num_vertices, edges, name=name)


def load_edge_list(path) -> ArchGraph:
    """Read a graph from a text file.

    Format: '#' lines are comments; the first data line is the vertex count;
    every following data line is one 'u v' edge.
    """
    lines = Path(path).read_text().splitlines()
    data = [ln.strip() for ln in lines if ln.strip() and not ln.strip().startswith("#")]
    if not data:
        raise ValueError(f"{path}: empty edge-list file")
    try:
        n = int(data[0])
    except ValueError:
        raise ValueError(f"{path}: first data line must be the vertex count, got {data[0]!r}")
    edges = []
    for ln in data[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return ArchGraph(n, edges, name=Path(path).stem)


def builtin_q20() -> ArchGraph:
    """The bundled 20-qubit architecture: 5x4 grid plus diagonal couplers."""
    ref = resources.files("mctsroute.data").joinpath("q20_tokyo.edges")
    with resources.as_file(ref) as path:
        ag = load_edge_list(path)
    ag.name = "q20"
    return ag


def grid(rows: int, cols: int) -> ArchGraph:
    """Rectangular grid architecture, row-major vertex numbering."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError(f"grid {rows}x{cols} is too small")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return ArchGraph(rows * cols, edges, name=f"grid{rows}x{cols}")


def parse_arch(spec: str) -> ArchGraph:
    """Resolve a CLI architecture name.

    Accepts 'q20', 'grid5x4', 'grid:<rows>x<cols>', or 'file:<path>'.
    """
    if spec == "q20":
        return builtin_q20()
    if spec == "grid5x4":
        return grid(5, 4)
    if spec.startswith("grid:"):
        dims = spec[len("grid:"):]
        try:
            r, c = dims.lower().split("x")
            return grid(int(r), int(c))
        except ValueError:
            raise ValueError(f"bad grid spec {spec!r}, expected grid:<rows>x<cols>")
    if spec.startswith("file:"):
        return load_edge_list(spec[len("file:"):])
    raise ValueError(f"unknown architecture {spec!r}")
