"""Shared test utilities: independent oracles and the random graph corpus.

The oracles here are deliberately written from scratch, with different
algorithms and pivoting strategies than the library, so they can serve as
independent cross-checks:

* ``snf_invariant_factors_naive`` — plain row/column Euclidean reduction
  with first-nonzero pivoting and a final divisibility repair pass.
* ``snf_invariant_factors_minors`` — determinantal-divisor method (gcd of
  all k-by-k minors), exponential but exact; for small matrices only.
* ``hsat_subsets_bruteforce`` — filters all 2^V vertex subsets with the
  hereditary/saturated predicates spelled out from their definitions.
"""

from __future__ import annotations

import math
import random
from itertools import combinations

from leavitt.graphs import Graph


# ---------------------------------------------------------------------------
# oracle A: naive Smith reduction (no transforms, first-nonzero pivoting)
# ---------------------------------------------------------------------------


def _naive_diagonal(rows):
    """Nonzero pivots of a textbook row/column Euclidean diagonalization.

    First-nonzero pivoting, no transform tracking; the result is a diagonal
    of some unimodular diagonalization, not yet in divisibility order.
    """
    m = [list(map(int, r)) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    diag = []
    k = 0
    while k < nr and k < nc:
        loc = None
        for i in range(k, nr):
            for j in range(k, nc):
                if m[i][j]:
                    loc = (i, j)
                    break
            if loc:
                break
        if loc is None:
            break
        i0, j0 = loc
        m[k], m[i0] = m[i0], m[k]
        for row in m:
            row[k], row[j0] = row[j0], row[k]
        while True:
            for i in range(k + 1, nr):
                while m[i][k]:
                    q = m[i][k] // m[k][k]
                    for j in range(k, nc):
                        m[i][j] -= q * m[k][j]
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
            row_clean = True
            for j in range(k + 1, nc):
                while m[k][j]:
                    q = m[k][j] // m[k][k]
                    for i in range(k, nr):
                        m[i][j] -= q * m[i][k]
                    if m[k][j]:
                        for i in range(k, nr):
                            m[i][k], m[i][j] = m[i][j], m[i][k]
                        row_clean = False
            if row_clean and all(m[i][k] == 0 for i in range(k + 1, nr)):
                break
        diag.append(abs(m[k][k]))
        k += 1
    return diag


def snf_invariant_factors_naive(rows):
    """Invariant factors greater than one, sorted, from the naive reduction.

    A repair pass turns the raw diagonal into a divisibility chain using the
    fact that diag(a, b) is unimodularly equivalent to diag(gcd, lcm).
    """
    facs = [d for d in _naive_diagonal(rows) if d]
    guard = 0
    changed = True
    while changed:
        guard += 1
        assert guard < 10_000, "divisibility repair failed to settle"
        changed = False
        for i in range(len(facs)):
            for j in range(i + 1, len(facs)):
                if facs[j] % facs[i]:
                    g = math.gcd(facs[i], facs[j])
                    facs[i], facs[j] = g, facs[i] // g * facs[j]
                    changed = True
    facs.sort()
    for a, b in zip(facs, facs[1:]):
        assert b % a == 0
    return tuple(f for f in facs if f != 1)


def naive_rank(rows):
    """Rank over Q = number of nonzero pivots in the naive reduction."""
    return len(_naive_diagonal(rows))


def cokernel_invariants_naive(rows):
    """(free_rank, torsion) of the cokernel of the column-vector map given by
    ``rows``; the cokernel lives in Z^len(rows)."""
    return len(rows) - naive_rank(rows), snf_invariant_factors_naive(rows)


# ---------------------------------------------------------------------------
# oracle B: determinantal divisors
# ---------------------------------------------------------------------------


def _det_laplace(sub):
    n = len(sub)
    if n == 0:
        return 1
    if n == 1:
        return sub[0][0]
    total = 0
    for j in range(n):
        if sub[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in sub[1:]]
        term = sub[0][j] * _det_laplace(minor)
        total += -term if j % 2 else term
    return total


def snf_invariant_factors_minors(rows):
    """Invariant factors (> 1) via gcds of all k-by-k minors.

    The k-th determinantal divisor D_k is the gcd of all k-by-k minors; the
    k-th invariant factor is D_k / D_{k-1}.  Exponential in the matrix size,
    so keep inputs at 5x5 or smaller.
    """
    m = [list(map(int, r)) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    prev = 1
    facs = []
    for k in range(1, min(nr, nc) + 1):
        g = 0
        for rs in combinations(range(nr), k):
            for cs in combinations(range(nc), k):
                g = math.gcd(g, _det_laplace([[m[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        facs.append(g // prev)
        prev = g
    return tuple(sorted(f for f in facs if f != 1))


# ---------------------------------------------------------------------------
# lattice oracle: brute force over all vertex subsets
# ---------------------------------------------------------------------------


def hsat_subsets_bruteforce(g: Graph):
    """All hereditary and saturated vertex subsets, by checking every subset
    against the definitions directly (closed under edge targets; contains any
    regular vertex all of whose targets it contains)."""
    verts = g.vertices
    found = []
    for r in range(len(verts) + 1):
        for combo in combinations(verts, r):
            s = set(combo)
            hereditary = all(e.dst in s for e in g.edges if e.src in s)
            if not hereditary:
                continue
            saturated = True
            for v in verts:
                outs = g.out_edges(v)
                if outs and v not in s and all(e.dst in s for e in outs):
                    saturated = False
                    break
            if saturated:
                found.append(frozenset(s))
    return found


# ---------------------------------------------------------------------------
# standard graphs
# ---------------------------------------------------------------------------


def rose(n: int) -> Graph:
    """One vertex with n loops."""
    return Graph(["v"], [(f"e{i}", "v", "v") for i in range(n)])


def fan_graph() -> Graph:
    """One source feeding two sinks."""
    return Graph(["v", "w1", "w2"], [("a", "v", "w1"), ("b", "v", "w2")])


def line_graph(n: int) -> Graph:
    """Path v0 -> v1 -> ... -> v(n-1)."""
    verts = [f"v{i}" for i in range(n)]
    edges = [(f"e{i}", f"v{i}", f"v{i + 1}") for i in range(n - 1)]
    return Graph(verts, edges)


# ---------------------------------------------------------------------------
# random corpus
# ---------------------------------------------------------------------------

CORPUS_SEED = 20260819
CORPUS_SIZE = 200


def build_corpus(seed: int = CORPUS_SEED, count: int = CORPUS_SIZE):
    """Seeded corpus of weakly connected multigraphs with 1-4 vertices and at
    most 2 parallel edges per ordered vertex pair.  Weak connectivity comes
    from a random tree skeleton; extra edges (loops allowed) are sprinkled on
    top."""
    rng = random.Random(seed)
    graphs = []
    while len(graphs) < count:
        n = rng.randint(1, 4)
        names = [f"v{i}" for i in range(n)]
        pair_counts = {}
        edges = []

        def add(src, dst):
            key = (src, dst)
            if pair_counts.get(key, 0) >= 2:
                return False
            pair_counts[key] = pair_counts.get(key, 0) + 1
            edges.append((f"e{len(edges)}", src, dst))
            return True

        order = names[:]
        rng.shuffle(order)
        for i in range(1, n):
            u = order[rng.randrange(i)]
            w = order[i]
            if rng.random() < 0.5:
                u, w = w, u
            add(u, w)
        for _ in range(rng.randint(0, n + 2)):
            add(rng.choice(names), rng.choice(names))
        graphs.append(Graph(names, edges))
    return tuple(graphs)


_corpus_cache = None


def corpus():
    """Session-cached corpus with the default seed and size."""
    global _corpus_cache
    if _corpus_cache is None:
        _corpus_cache = build_corpus()
    return _corpus_cache
