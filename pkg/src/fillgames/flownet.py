"""Network primitives: widest paths, integral max flow, path extraction.

All routines are deterministic: adjacency is scanned in ascending key
order, so ties always resolve to the lexicographically least alternative.
Arcs are given as explicit tuples so callers can route residual graphs,
value-labelled graphs, and plain capacity graphs through the same code.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple


def lex_least_path(arcs: Sequence[tuple], source, sink) -> Optional[list]:
    """Lexicographically least simple source-sink path.

    ``arcs`` is a sequence of (key, tail, head); the result is the list of
    keys along the path, or None when the sink is unreachable.
    """
    if source == sink:
        return None
    adj: Dict = {}
    for key, tail, head in arcs:
        adj.setdefault(tail, []).append((key, head))
    for lst in adj.values():
        lst.sort(key=lambda kh: kh[0])

    path: list = []
    visited = {source}

    def walk(node) -> bool:
        for key, head in adj.get(node, ()):
            if head in visited:
                continue
            path.append(key)
            if head == sink:
                return True
            visited.add(head)
            if walk(head):
                return True
            visited.remove(head)
            path.pop()
        return False

    return path if walk(source) else None


def widest_path(arcs: Sequence[tuple], source, sink) -> Optional[tuple]:
    """Maximum-bottleneck simple path over value-labelled arcs.

    ``arcs`` is a sequence of (key, tail, head, value).  Returns
    (key sequence, bottleneck value) for a path maximizing the minimum arc
    value, the path being the lexicographically least one among the
    maximizers; None when the sink is unreachable at any threshold.
    """
    values = sorted({value for _, _, _, value in arcs}, reverse=True)
    for threshold in values:
        sub = [(key, tail, head) for key, tail, head, value in arcs if value >= threshold]
        path = lex_least_path(sub, source, sink)
        if path is not None:
            return path, threshold
    return None


def max_flow_int(
    arcs: Sequence[tuple], caps: Sequence[int], source, sink
) -> Tuple[int, List[int]]:
    """Integral maximum flow (shortest augmenting paths).

    ``arcs`` is a sequence of (tail, head) indexed by arc id; ``caps`` are
    non-negative integers.  Returns (value, per-arc flow).
    """
    flow = [0] * len(arcs)
    # adjacency over residual moves: (node) -> list of (arc_id, forward?, other)
    adj: Dict = {}
    for aid, (tail, head) in enumerate(arcs):
        adj.setdefault(tail, []).append((aid, True, head))
        adj.setdefault(head, []).append((aid, False, tail))
    for lst in adj.values():
        lst.sort(key=lambda t: (t[0], not t[1]))

    total = 0
    while True:
        parent: Dict = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            node = queue.popleft()
            for aid, fwd, other in adj.get(node, ()):
                if other in parent:
                    continue
                residual = caps[aid] - flow[aid] if fwd else flow[aid]
                if residual <= 0:
                    continue
                parent[other] = (node, aid, fwd)
                if other == sink:
                    break
                queue.append(other)
        if sink not in parent:
            return total, flow
        # bottleneck along the BFS path
        delta = None
        node = sink
        while parent[node] is not None:
            prev, aid, fwd = parent[node]
            residual = caps[aid] - flow[aid] if fwd else flow[aid]
            delta = residual if delta is None else min(delta, residual)
            node = prev
        node = sink
        while parent[node] is not None:
            prev, aid, fwd = parent[node]
            flow[aid] += delta if fwd else -delta
            node = prev
        total += delta


def extract_paths(
    arcs: Sequence[tuple], flow: Sequence[int], source, sink, needed: int
) -> List[tuple]:
    """Split an integral flow into ``needed`` unit path slots.

    Repeatedly takes the lexicographically least simple path in the
    positive-flow subgraph, subtracts its bottleneck, and hands the path to
    that many slots.  Leftover flow (including cycles) is discarded.
    Requires flow value >= needed.
    """
    flow = list(flow)
    out: List[tuple] = []
    while len(out) < needed:
        sub = [
            (aid, tail, head)
            for aid, (tail, head) in enumerate(arcs)
            if flow[aid] > 0
        ]
        path = lex_least_path(sub, source, sink)
        if path is None:
            raise ValueError("flow value is smaller than the number of paths requested")
        bottleneck = min(flow[aid] for aid in path)
        for aid in path:
            flow[aid] -= bottleneck
        for _ in range(min(bottleneck, needed - len(out))):
            out.append(tuple(path))
    return out
