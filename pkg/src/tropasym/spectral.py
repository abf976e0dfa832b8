"""Max-plus spectral data: eigenvalue, critical graph, eigenspace generators.

The tropical eigenvalue of a real square matrix is its maximum cycle mean.
Karp's dynamic program computes it exactly in O(n^3) rational operations; a
brute-force simple-cycle enumeration serves as an independent oracle for
small sizes.  The eigenspace is generated by Kleene-star columns at critical
nodes, one per strongly connected component of the critical graph.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    MAX_PLUS,
    ProjectivePoint,
    TropicalMatrix,
    as_rational,
    in_span,
    kleene_star,
    normalize_projective,
    scale_matrix,
)


def _require_max_plus(A: TropicalMatrix, what: str):
    if A.semiring != MAX_PLUS:
        raise ValueError(f"{what} requires a max-plus matrix, got {A.semiring}")


def max_cycle_mean(A: TropicalMatrix) -> Fraction:
    """Maximum mean weight over all directed cycles (Karp's algorithm).

    D[m][v] is the maximum weight of a walk of exactly m edges from node 0 to
    v (None while unreachable; with all-finite entries only m=0 has Nones).
    The eigenvalue is max_v min_m (D[n][v] - D[m][v]) / (n - m).
    """
    _require_max_plus(A, "max_cycle_mean")
    n = A.n
    D: list[list[Fraction | None]] = [[None] * n for _ in range(n + 1)]
    D[0][0] = Fraction(0)
    for m in range(1, n + 1):
        for v in range(n):
            best = None
            for u in range(n):
                if D[m - 1][u] is None:
                    continue
                cand = D[m - 1][u] + A.entries[u][v]
                if best is None or cand > best:
                    best = cand
            D[m][v] = best
    best_overall = None
    for v in range(n):
        if D[n][v] is None:
            continue
        worst = None
        for m in range(n):
            if D[m][v] is None:
                continue
            ratio = (D[n][v] - D[m][v]) / (n - m)
            if worst is None or ratio < worst:
                worst = ratio
        if worst is not None and (best_overall is None or worst > best_overall):
            best_overall = worst
    assert best_overall is not None
    return best_overall


def cycle_mean_oracle(A: TropicalMatrix) -> Fraction:
    """Independent check: enumerate all simple cycles (n <= 8 only)."""
    _require_max_plus(A, "cycle_mean_oracle")
    n = A.n
    if n > 8:
        raise ValueError("oracle limited to n <= 8")
    best = None
    for r in range(1, n + 1):
        for nodes in itertools.combinations(range(n), r):
            for rest in itertools.permutations(nodes[1:]):
                cyc = (nodes[0],) + rest
                w = sum(A.entries[cyc[i]][cyc[(i + 1) % r]] for i in range(r))
                mean = Fraction(w, r)
                if best is None or mean > best:
                    best = mean
    return best


@dataclass(frozen=True)
class SpectralData:
    """Tropical eigenvalue, critical structure, and eigenspace generators."""

    lam: Fraction
    critical_nodes: frozenset[int]
    critical_edges: frozenset[tuple[int, int]]
    classes: tuple[tuple[int, ...], ...]
    generators: tuple[ProjectivePoint, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda": str(self.lam),
                "classes": [list(c) for c in self.classes],
                "generators": [[str(x) for x in g.coords] for g in self.generators],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SpectralData":
        obj = json.loads(text)
        classes = tuple(tuple(c) for c in obj["classes"])
        nodes = frozenset(i for c in classes for i in c)
        gens = tuple(
            ProjectivePoint(tuple(as_rational(x) for x in g)) for g in obj["generators"]
        )
        return cls(as_rational(obj["lambda"]), nodes, frozenset(), classes, gens)


def _sccs(nodes: Sequence[int], edges: set[tuple[int, int]]) -> list[tuple[int, ...]]:
    adj = {u: set() for u in nodes}
    for u, v in edges:
        adj[u].add(v)

    def reach(start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    fwd = {u: reach(u) for u in nodes}
    left = set(nodes)
    out = []
    for u in sorted(nodes):
        if u not in left:
            continue
        comp = {v for v in left if v in fwd[u] and u in fwd[v]}
        comp.add(u)
        out.append(tuple(sorted(comp)))
        left -= comp
    return out


def spectral_data(A: TropicalMatrix) -> SpectralData:
    """Eigenvalue, critical edges/nodes/classes, and deduplicated generators.

    An edge (i, j) is critical iff it lies on a zero-mean cycle of the
    lambda-normalized matrix, i.e. Abar_ij + S_ji = 0 with S the Kleene star.
    Generators are star columns at one representative node per critical class,
    deduplicated projectively.
    """
    _require_max_plus(A, "spectral_data")
    lam = max_cycle_mean(A)
    n = A.n
    Abar = A.shift(-lam)
    S = kleene_star(Abar)
    edges = {
        (i, j)
        for i in range(n)
        for j in range(n)
        if Abar.entries[i][j] + S.entries[j][i] == 0
    }
    nodes = sorted({u for e in edges for u in e})
    classes = _sccs(nodes, edges)
    gens: list[ProjectivePoint] = []
    for cls in classes:
        g = normalize_projective(S.column(cls[0]))
        if g not in gens:
            gens.append(g)
    return SpectralData(
        lam=lam,
        critical_nodes=frozenset(nodes),
        critical_edges=frozenset(edges),
        classes=tuple(classes),
        generators=tuple(gens),
    )


def verify_eigenvector(A: TropicalMatrix, lam, v: ProjectivePoint) -> bool:
    """Exact check of max_j(A_ij + v_j) = lam + v_i for every row i."""
    _require_max_plus(A, "verify_eigenvector")
    if v.dim != A.n:
        raise ValueError("dimension mismatch")
    lam = as_rational(lam)
    for i in range(A.n):
        if max(A.entries[i][j] + v.coords[j] for j in range(A.n)) != lam + v.coords[i]:
            return False
    return True


def eigenspace_equal(A: TropicalMatrix, B: TropicalMatrix) -> bool:
    """True iff the two eigenspaces coincide (mutual span membership of generators)."""
    if A.n != B.n:
        raise ValueError("dimension mismatch")
    ga = spectral_data(A).generators
    gb = spectral_data(B).generators
    return all(in_span(g, gb) for g in ga) and all(in_span(g, ga) for g in gb)


def hadamard_lemma_check(A: TropicalMatrix, k: int) -> bool:
    """Eigenvalue and generators scale exactly by k under entrywise scaling."""
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    k = int(k)
    Ak = scale_matrix(A, k)
    if max_cycle_mean(Ak) != k * max_cycle_mean(A):
        return False
    scaled = {
        ProjectivePoint(tuple(k * x for x in g.coords))
        for g in spectral_data(A).generators
    }
    return set(spectral_data(Ak).generators) == scaled
