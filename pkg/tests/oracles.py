"""Reference computations kept independent of the code they check."""

from collections import Counter, defaultdict

import numpy as np


def normal_equations_line(x, y):
    """Slope and intercept by solving the 2x2 normal equations directly."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.array([[len(x), x.sum()], [x.sum(), (x * x).sum()]])
    rhs = np.array([y.sum(), (x * y).sum()])
    intercept, slope = np.linalg.solve(A, rhs)
    return slope, intercept


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class MeshCheck:
    """Edge-level topology of a triangle list, built with plain dicts."""

    def __init__(self, n_vertices, faces):
        self.V = n_vertices
        self.faces = [tuple(int(i) for i in f) for f in faces]
        self.F = len(self.faces)
        self.directed = Counter()
        for a, b, c in self.faces:
            for e in ((a, b), (b, c), (c, a)):
                self.directed[e] += 1
        self.undirected = Counter()
        for (a, b), cnt in self.directed.items():
            self.undirected[frozenset((a, b))] += cnt
        self.E = len(self.undirected)

    @property
    def euler(self):
        return self.V - self.E + self.F

    def boundary_edges(self):
        return [tuple(e) for e, c in self.undirected.items() if c == 1]

    def boundary_loops(self):
        """Connected components of the boundary-edge graph."""
        adj = defaultdict(set)
        for a, b in self.boundary_edges():
            adj[a].add(b)
            adj[b].add(a)
        seen, comps = set(), 0
        for start in adj:
            if start in seen:
                continue
            comps += 1
            stack = [start]
            while stack:
                u = stack.pop()
                if u in seen:
                    continue
                seen.add(u)
                stack.extend(adj[u] - seen)
        return comps

    def consistent_winding(self):
        # no directed edge repeated; every interior edge seen once in each direction
        if any(c > 1 for c in self.directed.values()):
            return False
        for e, c in self.undirected.items():
            if c == 2:
                a, b = tuple(e)
                if not (self.directed[(a, b)] == 1 and self.directed[(b, a)] == 1):
                    return False
            elif c > 2:
                return False
        return True

    def manifold_interior(self):
        return all(c <= 2 for c in self.undirected.values())
