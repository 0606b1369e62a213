"""Shift equivalence over the nonnegative integers, bounded but exact.

A lag-ell shift equivalence between square nonnegative matrices A and B is
a pair of nonnegative integer matrices R, S with A R = R B, S A = B S,
R S = A^ell and S R = B^ell.  The search here is complete within explicit
entry and lag bounds and reports Unknown beyond them; the cheap complete
invariants (Bowen-Franks group, determinant of I - A) run first and give
sound obstructions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph
from .intlinalg import FgAbGroup, IntMatrix, cokernel
from .monoid import GradedElement, graded_expand_to_level

__all__ = [
    "DimensionTriple",
    "ShiftEqCertificate",
    "SeResult",
    "bowen_franks",
    "det_invariant",
    "verify_certificate",
    "shift_equivalent_bounded",
    "dimension_triple_equal",
    "triple_of_graded",
]


def _check_shift_matrix(m: IntMatrix, name="matrix"):
    if m.rows != m.cols:
        raise ValueError(f"{name} must be square")
    if not m.is_nonnegative():
        raise ValueError(f"{name} must be nonnegative")


def bowen_franks(m: IntMatrix) -> FgAbGroup:
    """Invariant factors of Z^n / (I - A) Z^n."""
    _check_shift_matrix(m)
    return cokernel(IntMatrix.identity(m.rows) - m).invariants()


def det_invariant(m: IntMatrix) -> int:
    """Exact determinant of I - A, a shift equivalence invariant with sign."""
    _check_shift_matrix(m)
    return (IntMatrix.identity(m.rows) - m).det()


# ---------------------------------------------------------------------------
# dimension triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionTriple:
    """Direct limit of Z^n along A, with positivity and the shift action.

    Elements are pairs (level, vector); (k, x) and (k+1, A x) are the same
    element.  Equality is decided exactly through the stabilized kernel of
    A: a difference dies in the limit iff it dies within n applications.
    """

    matrix: IntMatrix

    def __post_init__(self):
        _check_shift_matrix(self.matrix)

    def _raise_to(self, elem, level):
        k, x = elem
        x = tuple(x)
        if len(x) != self.matrix.rows:
            raise ValueError("vector length mismatch")
        if level < k:
            raise ValueError("cannot lower a representative level")
        return self.matrix.pow(level - k) @ x

    def equal(self, a, b) -> bool:
        m = max(a[0], b[0])
        u = tuple(p - q for p, q in zip(self._raise_to(a, m), self._raise_to(b, m)))
        for _ in range(self.matrix.rows + 1):
            if all(c == 0 for c in u):
                return True
            u = self.matrix @ u
        return False

    def add(self, a, b):
        m = max(a[0], b[0])
        return (m, tuple(p + q for p, q in zip(self._raise_to(a, m), self._raise_to(b, m))))

    def shift(self, a):
        """The canonical automorphism: apply A without moving the level."""
        k, x = a
        return (k, self.matrix @ tuple(x))

    def eventually_positive(self, a, bound=None) -> bool:
        """Does some bounded power of A make the representative nonnegative?"""
        bound = self.matrix.rows if bound is None else bound
        _, x = a
        x = tuple(x)
        for _ in range(bound + 1):
            if all(c >= 0 for c in x):
                return True
            x = self.matrix @ x
        return False


def dimension_triple_equal(m: IntMatrix, a, b) -> bool:
    return DimensionTriple(m).equal(a, b)


def triple_of_graded(g: Graph, elem: GradedElement):
    """Translate a graded monoid element of a sink-free graph into the triple.

    Vertex v at level i corresponds to the basis vector of v at triple level
    -i; expansion matches multiplication by the transposed adjacency matrix.
    """
    if g.sinks:
        raise ValueError("translation requires a sink-free graph")
    if elem.is_zero():
        return (0, tuple(0 for _ in g.vertices))
    level = elem.min_level()
    flat = graded_expand_to_level(g, elem, level)
    at_level = {v: n for v, l, n in flat.coeffs if l == level}
    return (-level, tuple(at_level.get(v, 0) for v in g.vertices))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftEqCertificate:
    lag: int
    r: IntMatrix
    s: IntMatrix


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    failures: tuple[str, ...]


def verify_certificate(a: IntMatrix, b: IntMatrix, cert: ShiftEqCertificate) -> VerifyResult:
    """Check all four intertwining equations plus shapes and positivity."""
    _check_shift_matrix(a, "A")
    _check_shift_matrix(b, "B")
    failures = []
    if cert.lag < 1:
        failures.append("lag must be at least 1")
    if cert.r.shape != (a.rows, b.rows):
        failures.append(f"R shape {cert.r.shape} != ({a.rows}, {b.rows})")
    if cert.s.shape != (b.rows, a.rows):
        failures.append(f"S shape {cert.s.shape} != ({b.rows}, {a.rows})")
    if failures:
        return VerifyResult(False, tuple(failures))
    if not cert.r.is_nonnegative():
        failures.append("R has a negative entry")
    if not cert.s.is_nonnegative():
        failures.append("S has a negative entry")
    if a @ cert.r != cert.r @ b:
        failures.append("A R != R B")
    if cert.s @ a != b @ cert.s:
        failures.append("S A != B S")
    if cert.r @ cert.s != a.pow(cert.lag):
        failures.append("R S != A^lag")
    if cert.s @ cert.r != b.pow(cert.lag):
        failures.append("S R != B^lag")
    return VerifyResult(not failures, tuple(failures))


@dataclass(frozen=True)
class SeResult:
    kind: str  # "certificate" | "obstruction" | "unknown"
    certificate: ShiftEqCertificate | None = None
    obstructions: tuple[str, ...] = ()
    note: str = ""


class _NodeCapHit(Exception):
    pass


def _bounded_solutions(num_vars, constraints, upper, counter, cap):
    """Integer points of [0, upper]^num_vars satisfying linear constraints.

    ``constraints`` is a list of (coeffs, target) with coeffs a dict from
    variable index to coefficient.  Depth-first with interval pruning;
    raises _NodeCapHit when the node budget runs out.
    """
    by_var = [[] for _ in range(num_vars)]
    partial = []
    rem_lo = []
    rem_hi = []
    targets = []
    for ci, (coeffs, target) in enumerate(constraints):
        lo = hi = 0
        for var, c in coeffs.items():
            by_var[var].append((ci, c))
            if c > 0:
                hi += c * upper
            else:
                lo += c * upper
        partial.append(0)
        rem_lo.append(lo)
        rem_hi.append(hi)
        targets.append(target)

    assignment = [0] * num_vars

    def feasible():
        return all(
            partial[ci] + rem_lo[ci] <= targets[ci] <= partial[ci] + rem_hi[ci]
            for ci in range(len(constraints))
        )

    def descend(var):
        counter[0] += 1
        if counter[0] > cap:
            raise _NodeCapHit
        if var == num_vars:
            yield tuple(assignment)
            return
        for value in range(upper + 1):
            assignment[var] = value
            touched = by_var[var]
            for ci, c in touched:
                partial[ci] += c * value
                if c > 0:
                    rem_hi[ci] -= c * upper
                else:
                    rem_lo[ci] -= c * upper
            if feasible():
                yield from descend(var + 1)
            for ci, c in touched:
                partial[ci] -= c * value
                if c > 0:
                    rem_hi[ci] += c * upper
                else:
                    rem_lo[ci] += c * upper
        assignment[var] = 0

    yield from descend(0)


def _intertwiner_constraints(a, b, na, nb):
    """A R = R B as constraints on vec(R), row-major R of shape na x nb."""
    out = []
    for i in range(na):
        for j in range(nb):
            coeffs = {}
            for k in range(na):
                if a[i, k]:
                    coeffs[k * nb + j] = coeffs.get(k * nb + j, 0) + a[i, k]
            for k in range(nb):
                if b[k, j]:
                    coeffs[i * nb + k] = coeffs.get(i * nb + k, 0) - b[k, j]
            coeffs = {v: c for v, c in coeffs.items() if c}
            out.append((coeffs, 0))
    return out


def shift_equivalent_bounded(
    a: IntMatrix,
    b: IntMatrix,
    max_lag: int = 6,
    max_entry: int = 4,
    node_cap: int = 200_000,
) -> SeResult:
    """Search for a shift equivalence within entry and lag bounds.

    Runs the invariant screen first; a mismatch is a sound obstruction.
    Otherwise lags are tried in increasing order and for each lag the
    R candidates in lexicographic order, solving for S under the same entry
    bound.  Exhausting the bounds (or the node budget) yields Unknown.
    """
    _check_shift_matrix(a, "A")
    _check_shift_matrix(b, "B")
    obstructions = []
    bf_a, bf_b = bowen_franks(a), bowen_franks(b)
    if bf_a != bf_b:
        obstructions.append(f"Bowen-Franks groups differ: {bf_a} vs {bf_b}")
    det_a, det_b = det_invariant(a), det_invariant(b)
    if det_a != det_b:
        obstructions.append(f"det(I-A) differs: {det_a} vs {det_b}")
    if obstructions:
        return SeResult(kind="obstruction", obstructions=tuple(obstructions))

    na, nb = a.rows, b.rows
    counter = [0]
    capped = False
    r_candidates = []
    try:
        for flat in _bounded_solutions(
            na * nb, _intertwiner_constraints(a, b, na, nb), max_entry, counter, node_cap
        ):
            r_candidates.append(
                IntMatrix([flat[i * nb:(i + 1) * nb] for i in range(na)], cols=nb)
            )
    except _NodeCapHit:
        capped = True

    for lag in range(1, max_lag + 1):
        a_pow = a.pow(lag)
        b_pow = b.pow(lag)
        for r in r_candidates:
            constraints = []
            # S A = B S on vec(S), S of shape nb x na
            for i in range(nb):
                for j in range(na):
                    coeffs = {}
                    for k in range(nb):
                        if b[i, k]:
                            coeffs[k * na + j] = coeffs.get(k * na + j, 0) - b[i, k]
                    for k in range(na):
                        if a[k, j]:
                            coeffs[i * na + k] = coeffs.get(i * na + k, 0) + a[k, j]
                    coeffs = {v: c for v, c in coeffs.items() if c}
                    constraints.append((coeffs, 0))
            # R S = A^lag
            for i in range(na):
                for j in range(na):
                    coeffs = {}
                    for k in range(nb):
                        if r[i, k]:
                            coeffs[k * na + j] = coeffs.get(k * na + j, 0) + r[i, k]
                    constraints.append((coeffs, a_pow[i, j]))
            # S R = B^lag
            for i in range(nb):
                for j in range(nb):
                    coeffs = {}
                    for k in range(na):
                        if r[k, j]:
                            coeffs[i * na + k] = coeffs.get(i * na + k, 0) + r[k, j]
                    constraints.append((coeffs, b_pow[i, j]))
            try:
                for flat in _bounded_solutions(nb * na, constraints, max_entry, counter, node_cap):
                    s = IntMatrix([flat[i * na:(i + 1) * na] for i in range(nb)], cols=na)
                    cert = ShiftEqCertificate(lag=lag, r=r, s=s)
                    check = verify_certificate(a, b, cert)
                    if check.ok:
                        return SeResult(kind="certificate", certificate=cert)
            except _NodeCapHit:
                capped = True
    note = f"no certificate with lag <= {max_lag}, entries <= {max_entry}"
    if capped:
        note += f"; node budget {node_cap} exhausted, search incomplete"
    return SeResult(kind="unknown", note=note)
