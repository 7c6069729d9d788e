import logging

import numpy as np

from app.core.graph import Graph
from app.core.streams import StreamTag, stream
from app.exceptions import RetryExhausted

logger = logging.getLogger(__name__)


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p); each pair is kept independently."""
    if not 0 <= p <= 1:
        raise ValueError(f'p must lie in [0, 1], got {p}')
    rng = stream(seed, StreamTag.GENERATOR, 0)
    tail, head = np.triu_indices(n, k=1)
    keep = rng.random(len(tail)) < p
    return Graph(n, np.column_stack([tail[keep], head[keep]]))


def _has_free_pair(edge_keys: set[int], stub_nodes: np.ndarray,
                   n: int) -> bool:
    # Some pair of leftover stubs can still become a new simple edge
    nodes = np.unique(stub_nodes)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if int(a) * n + int(b) not in edge_keys:
                return True
    return len(nodes) == 0


def _try_pairing(n: int, d: int, rng: np.random.Generator,
                 max_rounds: int) -> np.ndarray | None:
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    edge_keys: set[int] = set()
    for _ in range(max_rounds):
        if len(stubs) == 0:
            keys = np.fromiter(sorted(edge_keys), dtype=np.int64)
            return np.column_stack([keys // n, keys % n])
        rng.shuffle(stubs)
        pairs = np.sort(stubs.reshape(-1, 2), axis=1)
        keys = pairs[:, 0] * n + pairs[:, 1]
        _, first = np.unique(keys, return_index=True)
        fresh = np.zeros(len(keys), dtype=bool)
        fresh[first] = True
        fresh &= pairs[:, 0] != pairs[:, 1]
        if edge_keys:
            known = np.fromiter(edge_keys, dtype=np.int64)
            fresh &= ~np.isin(keys, known)
        edge_keys.update(keys[fresh].tolist())
        stubs = pairs[~fresh].ravel()
        if len(stubs) and not _has_free_pair(edge_keys, stubs, n):
            return None
    return None


def gen_random_regular(n: int, d: int, seed: int,
                       max_attempts: int = 50) -> Graph:
    """
    Random d-regular graph by stub pairing. Stubs that would form a loop
    or a repeated edge are re-paired among themselves; an attempt is
    abandoned when the leftovers cannot form any new edge.
    """
    if (n * d) % 2:
        raise ValueError('n * d must be even')
    if not 0 <= d < n:
        raise ValueError('the 0 <= d < n inequality must be satisfied')
    for attempt in range(max_attempts):
        rng = stream(seed, StreamTag.GENERATOR, 1, attempt)
        edges = _try_pairing(n, d, rng, max_rounds=10 * d + 100)
        if edges is not None:
            return Graph(n, edges)
        logger.debug(f'regular pairing attempt {attempt} failed')
    raise RetryExhausted('generator', [], max_attempts)


def parse_generator_spec(spec: str, seed: int,
                         max_attempts: int = 50) -> Graph:
    """Builds a graph from "gnp:n,p" or "reg:n,d"."""
    kind, _, params = spec.partition(':')
    values = [value.strip() for value in params.split(',')]
    if kind == 'gnp' and len(values) == 2:
        return gen_gnp(int(values[0]), float(values[1]), seed)
    if kind == 'reg' and len(values) == 2:
        return gen_random_regular(int(values[0]), int(values[1]), seed,
                                  max_attempts)
    raise ValueError(f'unknown generator spec {spec!r}')
