"""Dinic max-flow on integer capacities.

Capacities are Python ints (callers scale exact rationals to a common
denominator first), so flow values are exact.
"""

from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        # flat edge arrays: to, cap (residual), paired reverse edge is idx ^ 1
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int, rcap: int = 0):
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(rcap)

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.n
        self.level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for eid in self.adj[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    q.append(v)
        return self.level[t] >= 0

    def _dfs(self, s: int, t: int) -> int:
        # iterative blocking-flow with per-node edge pointers
        total = 0
        while True:
            path = []
            u = s
            while u != t:
                advanced = False
                while self.ptr[u] < len(self.adj[u]):
                    eid = self.adj[u][self.ptr[u]]
                    v = self.to[eid]
                    if self.cap[eid] > 0 and self.level[v] == self.level[u] + 1:
                        path.append(eid)
                        u = v
                        advanced = True
                        break
                    self.ptr[u] += 1
                if not advanced:
                    if u == s:
                        return total
                    self.level[u] = -1  # dead end, prune
                    u = self.to[path[-1] ^ 1]
                    path.pop()
                    self.ptr[u] += 1
            bottleneck = min(self.cap[eid] for eid in path)
            for eid in path:
                self.cap[eid] -= bottleneck
                self.cap[eid ^ 1] += bottleneck
            total += bottleneck
            # retreat to the saturated edge closest to the source
            for i, eid in enumerate(path):
                if self.cap[eid] == 0:
                    path = path[:i]
                    break
            u = s if not path else self.to[path[-1]]

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while self._bfs(s, t):
            self.ptr = [0] * self.n
            flow += self._dfs(s, t)
        return flow

    def source_side(self, s: int) -> set[int]:
        """Nodes reachable from s in the residual graph (call after max_flow)."""
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for eid in self.adj[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and v not in seen:
                    seen.add(v)
                    q.append(v)
        return seen
