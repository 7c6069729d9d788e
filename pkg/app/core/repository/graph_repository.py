import re
from pathlib import Path

import numpy as np

from app.core.graph import Graph
from app.exceptions import EdgeListParseError, SelfLoopError

HEADER = re.compile(r'#\s*n=(\d+)')


class GraphRepository:
    """
        # Description
        The GraphRepository class reads and writes the line-oriented text
        formats used for graphs and weightings.

        # Formats
        1. Edge list: whitespace separated pairs "u v", one per line.
        2. Weighting: triples "u v w", one per line, same vertex ids.
        Lines starting with '#' and blank lines are ignored in both.

        # Error Handling
        Parsing raises EdgeListParseError with the offending line number,
        or SelfLoopError when a line joins a vertex to itself.
    """

    def __init__(self, root: Path | None = None) -> None:
        self.root = root

    def _path(self, name: str | Path) -> Path:
        return Path(name) if self.root is None else self.root / name

    @staticmethod
    def _rows(text: str, width: int) -> list[tuple[int, list[int], str]]:
        rows = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != width:
                raise EdgeListParseError(line_no, raw)
            try:
                values = [int(part) for part in parts]
            except ValueError:
                raise EdgeListParseError(line_no, raw) from None
            if any(value < 0 for value in values):
                raise EdgeListParseError(line_no, raw)
            rows.append((line_no, values, raw))
        return rows

    def parse_edge_list(self, text: str,
                        vertex_count: int | None = None) -> Graph:
        """
        Method takes edge list text, validates every line and returns the
        simple graph it describes, duplicates collapsed into one edge
        """
        pairs = []
        for line_no, (u, v), raw in self._rows(text, 2):
            if u == v:
                raise SelfLoopError(line_no, raw)
            pairs.append((u, v))
        largest = max((max(pair) for pair in pairs), default=-1)
        header = HEADER.match(text)
        if vertex_count is None and header:
            vertex_count = int(header.group(1))
        count = largest + 1 if vertex_count is None else vertex_count
        return Graph.from_pairs(count, pairs)

    def format_edge_list(self, graph: Graph) -> str:
        header = f'# n={graph.vertex_count} m={graph.edge_count}\n'
        return header + ''.join(f'{u} {v}\n' for u, v in graph.edges)

    def parse_weighting(self, graph: Graph, text: str) -> np.ndarray:
        """
        Method takes weighting text and maps each "u v w" line onto the
        edge id of uv in graph, every edge must be covered exactly once
        """
        weights = np.zeros(graph.edge_count, dtype=np.int64)
        for line_no, (u, v, w), raw in self._rows(text, 3):
            try:
                eid = graph.edge_id(u, v)
            except KeyError:
                raise EdgeListParseError(line_no, raw) from None
            if weights[eid] or w < 1:
                raise EdgeListParseError(line_no, raw)
            weights[eid] = w
        if graph.edge_count and not weights.all():
            missing = int(np.flatnonzero(weights == 0)[0])
            raise EdgeListParseError(0, f'edge {missing} has no weight')
        return weights

    def format_weighting(self, graph: Graph, weights: np.ndarray) -> str:
        return ''.join(f'{u} {v} {int(w)}\n'
                       for (u, v), w in zip(graph.edges, weights))

    def read_graph(self, name: str | Path) -> Graph:
        return self.parse_edge_list(self._path(name).read_text())

    def write_graph(self, name: str | Path, graph: Graph) -> None:
        self._path(name).write_text(self.format_edge_list(graph))

    def read_weighting(self, graph: Graph, name: str | Path) -> np.ndarray:
        return self.parse_weighting(graph, self._path(name).read_text())

    def write_weighting(self, name: str | Path, graph: Graph,
                        weights: np.ndarray) -> None:
        self._path(name).write_text(self.format_weighting(graph, weights))


def load_edge_list(text: str) -> Graph:
    return GraphRepository().parse_edge_list(text)
