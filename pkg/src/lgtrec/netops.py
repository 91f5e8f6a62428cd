"""Time consistency, reachability and transfer distances on LGT networks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from .model import INF, LGTNetwork, PRINCIPAL, SECONDARY, TransferDistances


@dataclass(frozen=True)
class TimeAssignment:
    """Node times: equal across secondary arcs, strictly increasing along principal ones."""

    times: dict  # node id -> int

    def __getitem__(self, node: str) -> int:
        return self.times[node]


@dataclass(frozen=True)
class TimeInconsistency:
    """Certificate: a closed walk mixing at least one principal arc with equalities.

    Steps are (tail, head, kind) with kind "principal" (a strict t increase)
    or "equal" (a secondary arc traversed as an equality, in either direction).
    Following the walk forces t(start) < t(start).
    """

    cycle: tuple[tuple[str, str, str], ...]

    def __str__(self):
        steps = ", ".join("%s %s %s" % (t, "<" if k == PRINCIPAL else "=", h) for t, h, k in self.cycle)
        return "time inconsistency: " + steps


def check_time_consistency(net: LGTNetwork):
    """Return a TimeAssignment when one exists, else a TimeInconsistency.

    Secondary-arc endpoints are merged into equality classes; a valid
    assignment exists exactly when no principal arc stays inside a class and
    the class digraph under principal arcs is acyclic.  Times come from
    longest-path layering over that digraph.
    """
    parent = {n: n for n in net.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tail, head in net.secondary_arcs():
        ra, rb = find(tail), find(head)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    classes: dict[str, list[str]] = {}
    for node in net.nodes:
        classes.setdefault(find(node), []).append(node)

    # principal arc inside one class: immediate contradiction
    for tail, head, kind in net.arcs():
        if kind == PRINCIPAL and find(tail) == find(head):
            walk = [(tail, head, PRINCIPAL)]
            walk.extend(_equality_walk(net, head, tail))
            return TimeInconsistency(tuple(walk))

    # class digraph under principal arcs, with one witness arc per edge
    succ: dict[str, dict[str, tuple[str, str]]] = {c: {} for c in classes}
    indeg = {c: 0 for c in classes}
    for tail, head, kind in net.arcs():
        if kind != PRINCIPAL:
            continue
        a, b = find(tail), find(head)
        if b not in succ[a]:
            succ[a][b] = (tail, head)
            indeg[b] += 1

    order = []
    ready = sorted(c for c in classes if indeg[c] == 0)
    import heapq

    heapq.heapify(ready)
    while ready:
        cls = heapq.heappop(ready)
        order.append(cls)
        for nxt in succ[cls]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, nxt)

    if len(order) != len(classes):
        return TimeInconsistency(tuple(_class_cycle(net, classes, succ, indeg)))

    level = {c: 0 for c in classes}
    for cls in order:
        for nxt in succ[cls]:
            level[nxt] = max(level[nxt], level[cls] + 1)
    return TimeAssignment({n: level[find(n)] for n in net.nodes})


def _equality_walk(net: LGTNetwork, start: str, goal: str):
    """Steps over secondary arcs (either direction) joining two class members."""
    if start == goal:
        return []
    adj: dict[str, list[tuple[str, str, str]]] = {}
    for tail, head in net.secondary_arcs():
        adj.setdefault(tail, []).append((tail, head, "equal"))
        adj.setdefault(head, []).append((head, tail, "equal"))
    back: dict[str, tuple[str, str, str]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        node = queue.popleft()
        for step in adj.get(node, []):
            nxt = step[1]
            if nxt not in seen:
                seen.add(nxt)
                back[nxt] = step
                if nxt == goal:
                    queue.clear()
                    break
                queue.append(nxt)
    walk = []
    node = goal
    while node != start:
        step = back[node]
        walk.append(step)
        node = step[0]
    walk.reverse()
    return walk


def _class_cycle(net, classes, succ, indeg):
    # classes never peeled by Kahn keep a predecessor among themselves, so a
    # backward walk inside that set must close a cycle
    remaining = {c for c in classes if indeg[c] > 0}
    pred: dict[str, list[str]] = {c: [] for c in remaining}
    for cls in remaining:
        for nxt in succ[cls]:
            if nxt in remaining:
                pred[nxt].append(cls)
    seen: dict[str, int] = {}
    node = min(remaining)
    path = []
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = min(pred[node])
    backward = path[seen[node]:]
    forward = [backward[0]] + list(reversed(backward[1:]))
    k = len(forward)
    witness = [succ[forward[i]][forward[(i + 1) % k]] for i in range(k)]
    walk = []
    for i in range(k):
        tail, head = witness[i]
        walk.append((tail, head, PRINCIPAL))
        next_tail = witness[(i + 1) % k][0]
        walk.extend(_equality_walk(net, head, next_tail))
    return walk


def reachable_set(net: LGTNetwork, source: str) -> set[str]:
    """All nodes reachable from source over principal and secondary arcs."""
    seen = {source}
    stack = [source]
    while stack:
        node = stack.pop()
        for head, _ in net.out_arcs(node):
            if head not in seen:
                seen.add(head)
                stack.append(head)
    return seen


def transfer_distances(net: LGTNetwork) -> TransferDistances:
    """All-pairs minimum secondary-arc counts via 0/1-weight BFS per source."""
    finite: dict[str, dict[str, int]] = {}
    for source in net.nodes:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            d = dist[node]
            for head, kind in net.out_arcs(node):
                nd = d + (1 if kind == SECONDARY else 0)
                if nd < dist.get(head, INF):
                    dist[head] = nd
                    if kind == SECONDARY:
                        queue.append(head)
                    else:
                        queue.appendleft(head)
        finite[source] = dist
    return TransferDistances(net.nodes, finite)


def realize_path(net: LGTNetwork, dist: TransferDistances, source: str, target: str) -> tuple[str, ...]:
    """A concrete minimum-secondary-arc path, tie-broken by smallest next id.

    Greedy forward walk: at each node take the smallest-id out-neighbor that
    still lies on some optimal path.
    """
    if dist.get(source, target) == INF:
        raise ValueError("%r is not reachable from %r" % (target, source))
    path = [source]
    node = source
    while node != target:
        remaining = dist.get(node, target)
        for head, kind in net.out_arcs(node):  # sorted by head id
            weight = 1 if kind == SECONDARY else 0
            if weight + dist.get(head, target) == remaining:
                node = head
                break
        else:
            raise AssertionError("distance table inconsistent with arcs")
        path.append(node)
    return tuple(path)
