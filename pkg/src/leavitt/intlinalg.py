"""Exact linear algebra over the integers.

Smith normal form with tracked unimodular transforms is the single engine
here; kernels, cokernels, solving, lattice membership and exactness checks
of finitely presented abelian groups are all derived from it.  Everything
runs on Python ints, so there is no overflow and no floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "IntMatrix",
    "SmithData",
    "FgAbGroup",
    "PresentedGroup",
    "GroupMap",
    "CoeffGroup",
    "CoeffCokernel",
    "ExactnessReport",
    "snf",
    "kernel_basis",
    "cokernel",
    "coker_with_coefficients",
    "group_iso",
    "check_well_defined",
    "check_exact",
    "lattice_member",
    "solve_lattice",
    "inverse_unimodular",
    "preimage_lattice",
    "subgroup_equal",
    "map_invariants",
]


class IntMatrix:
    """Immutable integer matrix stored as a tuple of row tuples.

    Zero-dimensional shapes are legal and behave as empty maps, which the
    rest of the package relies on (empty graphs, groups with no generators).

    Parameters
    ----------
    data : iterable of iterables of int
        Row-major entries.  May be empty.
    cols : int, optional
        Required when ``data`` has no rows, to pin down the column count.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, cols=None):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError("cols mismatch")
            cols = width
        else:
            cols = 0 if cols is None else int(cols)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", rows)

    def __setattr__(self, *_):
        raise AttributeError("IntMatrix is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(tuple((0,) * cols for _ in range(rows)), cols=cols)

    @classmethod
    def diagonal(cls, entries, rows=None, cols=None):
        entries = tuple(int(e) for e in entries)
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        return cls(
            tuple(
                tuple(entries[i] if i == j and i < len(entries) else 0 for j in range(cols))
                for i in range(rows)
            ),
            cols=cols,
        )

    @classmethod
    def from_columns(cls, columns, rows=None):
        columns = [tuple(int(x) for x in c) for c in columns]
        if columns:
            rows = len(columns[0])
            return cls(tuple(tuple(c[i] for c in columns) for i in range(rows)), cols=len(columns))
        if rows is None:
            raise ValueError("rows required for an empty column list")
        return cls.zeros(rows, 0)

    # -- access --------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def take_rows(self, indices):
        return IntMatrix(tuple(self.data[i] for i in indices), cols=self.cols)

    def take_columns(self, indices):
        indices = list(indices)
        return IntMatrix(tuple(tuple(r[j] for j in indices) for r in self.data), cols=len(indices))

    def to_lists(self):
        return [list(r) for r in self.data]

    # -- algebra --------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            od = other.data
            return IntMatrix(
                tuple(
                    tuple(sum(a * od[k][j] for k, a in enumerate(row)) for j in range(other.cols))
                    for row in self.data
                ),
                cols=other.cols,
            )
        # vector: tuple/list of length cols
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * vec[k] for k, a in enumerate(row)) for row in self.data)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.data, other.data)),
            cols=self.cols,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return IntMatrix(tuple(tuple(-a for a in r) for r in self.data), cols=self.cols)

    def scale(self, k):
        k = int(k)
        return IntMatrix(tuple(tuple(k * a for a in r) for r in self.data), cols=self.cols)

    def transpose(self):
        return IntMatrix(
            tuple(tuple(self.data[i][j] for i in range(self.rows)) for j in range(self.cols)),
            cols=self.rows,
        )

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix(
            tuple(r1 + r2 for r1, r2 in zip(self.data, other.data)),
            cols=self.cols + other.cols,
        )

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.data + other.data, cols=self.cols)

    def pow(self, k):
        """Exact k-th power of a square matrix, k >= 0."""
        if self.rows != self.cols:
            raise ValueError("pow needs a square matrix")
        if k < 0:
            raise ValueError("negative power")
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self):
        """Determinant by fraction-free (Bareiss) elimination.

        Exact for any integer entries; the empty matrix has determinant 1.
        """
        if self.rows != self.cols:
            raise ValueError("det needs a square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                pivot_row = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if pivot_row is None:
                    return 0
                a[k], a[pivot_row] = a[pivot_row], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    # -- predicates -----------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self):
        return all(a == 0 for r in self.data for a in r)

    def is_nonnegative(self):
        return all(a >= 0 for r in self.data for a in r)

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.cols, self.data))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.data]!r}, cols={self.cols})"


@dataclass(frozen=True)
class SmithData:
    """Factorization d = u @ m @ v with u, v unimodular and d in Smith form.

    ``d`` is diagonal with nonnegative entries forming a divisibility chain;
    zero diagonal entries come last.  The same pivot rule (smallest absolute
    value, then lowest row and column index) makes u and v reproducible, so
    they can be frozen in golden tests.
    """

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self):
        n = min(self.d.rows, self.d.cols)
        return tuple(self.d[i, i] for i in range(n))

    @property
    def rank(self):
        return sum(1 for x in self.diagonal if x != 0)

    def verify(self, m):
        """Recheck the factorization against the original matrix."""
        if self.u @ m @ self.v != self.d:
            return False
        if abs(self.u.det()) != 1 or abs(self.v.det()) != 1:
            return False
        diag = self.diagonal
        for a, b in zip(diag, diag[1:]):
            if a == 0 and b != 0:
                return False
            if a != 0 and b % a != 0:
                return False
        return all(x >= 0 for x in diag)


def _select_pivot(d, t, rows, cols):
    best = None
    for i in range(t, rows):
        di = d[i]
        for j in range(t, cols):
            x = di[j]
            if x != 0:
                key = (abs(x), i, j)
                if best is None or key < best:
                    best = key
    return None if best is None else (best[1], best[2])


@lru_cache(maxsize=65536)
def snf(m: IntMatrix) -> SmithData:
    """Smith normal form with transforms, deterministically pivoted.

    Returns
    -------
    SmithData
        With ``u @ m @ v == d``.  Results are cached; matrices are immutable
        so sharing is safe.
    """
    rows, cols = m.rows, m.cols
    d = [list(r) for r in m.data]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_sub(i, src, q):
        d[i] = [a - q * b for a, b in zip(d[i], d[src])]
        u[i] = [a - q * b for a, b in zip(u[i], u[src])]

    def col_sub(j, src, q):
        for r in d:
            r[j] -= q * r[src]
        for r in v:
            r[j] -= q * r[src]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        piv = _select_pivot(d, t, rows, cols)
        if piv is None:
            break
        if piv[0] != t:
            swap_rows(piv[0], t)
        if piv[1] != t:
            swap_cols(piv[1], t)
        while True:
            restart = False
            for i in range(t + 1, rows):
                if d[i][t] == 0:
                    continue
                q = d[i][t] // d[t][t]
                exact = d[i][t] % d[t][t] == 0
                row_sub(i, t, q)
                if not exact:
                    # remainder is strictly smaller than the pivot: promote it
                    swap_rows(i, t)
                    restart = True
                    break
            if restart:
                continue
            for j in range(t + 1, cols):
                if d[t][j] == 0:
                    continue
                q = d[t][j] // d[t][t]
                exact = d[t][j] % d[t][t] == 0
                col_sub(j, t, q)
                if not exact:
                    swap_cols(j, t)
                    restart = True
                    break
            if restart:
                continue
            p = d[t][t]
            bad = None
            for i in range(t + 1, rows):
                di = d[i]
                for j in range(t + 1, cols):
                    if di[j] % p != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row into row t; the next clearing pass
            # shrinks the pivot toward the gcd
            d[t] = [a + b for a, b in zip(d[t], d[bad])]
            u[t] = [a + b for a, b in zip(u[t], u[bad])]
        if d[t][t] < 0:
            d[t] = [-a for a in d[t]]
            u[t] = [-a for a in u[t]]
        t += 1
    return SmithData(
        u=IntMatrix(u, cols=rows),
        d=IntMatrix(d, cols=cols),
        v=IntMatrix(v, cols=cols),
    )


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel lattice of ``m``, as matrix columns.

    The basis is primitive: it spans ker(m) as a direct summand basis, not
    just up to finite index, because the columns come from a unimodular
    transform.
    """
    sd = snf(m)
    k = sd.rank
    return sd.v.take_columns(range(k, m.cols))


def lattice_member(m: IntMatrix, vec) -> bool:
    """Is ``vec`` an integer combination of the columns of ``m``?"""
    sd = snf(m)
    y = sd.u @ tuple(vec)
    diag = sd.diagonal
    for i, yi in enumerate(y):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if yi != 0:
                return False
        elif yi % di != 0:
            return False
    return True


def solve_lattice(m: IntMatrix, vec):
    """One integer solution x of m @ x = vec, or None if there is none."""
    sd = snf(m)
    y = sd.u @ tuple(vec)
    diag = sd.diagonal
    z = []
    for i in range(m.cols):
        di = diag[i] if i < len(diag) else 0
        yi = y[i] if i < len(y) else 0
        if di == 0:
            if yi != 0:
                return None
            z.append(0)
        else:
            if yi % di != 0:
                return None
            z.append(yi // di)
    for i in range(m.cols, len(y)):
        if y[i] != 0:
            return None
    return sd.v @ tuple(z)


def inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +1 or -1."""
    sd = snf(m)
    if any(x != 1 for x in sd.diagonal) or m.rows != m.cols:
        raise ValueError("matrix is not unimodular")
    # u m v = 1 forces m^-1 = v u
    return sd.v @ sd.u


def preimage_lattice(m: IntMatrix, lat: IntMatrix) -> IntMatrix:
    """Generators of {x : m @ x lies in the column span of lat}.

    Computed as the projection of ker([m | -lat]) onto the first block, so
    the columns generate (not necessarily freely) the preimage lattice.
    """
    if m.rows != lat.rows:
        raise ValueError("row count mismatch")
    stacked = m.hstack(-lat)
    kb = kernel_basis(stacked)
    return kb.take_rows(range(m.cols))


def map_invariants(matrix: IntMatrix, dom_relations: IntMatrix, cod_relations: IntMatrix):
    """Kernel, image and cokernel classes of an induced map of presented groups.

    ``matrix`` acts from Z^dom/span(dom_relations) to Z^cod/span(cod_relations)
    and must be well defined there.  Returns three FgAbGroup values.
    """
    coker = PresentedGroup(matrix.rows, matrix.hstack(cod_relations)).invariants()
    ker_lat = preimage_lattice(matrix, cod_relations)
    image = PresentedGroup(matrix.cols, ker_lat).invariants()
    kernel = PresentedGroup(ker_lat.cols, preimage_lattice(ker_lat, dom_relations)).invariants()
    return kernel, image, coker


def subgroup_equal(gens_a: IntMatrix, gens_b: IntMatrix, modulo: IntMatrix | None = None) -> bool:
    """Do two sets of columns span the same subgroup, modulo a lattice?

    With ``modulo`` given, compares span(a)+span(modulo) with
    span(b)+span(modulo) by mutual membership.
    """
    if modulo is not None:
        ext_a = gens_b.hstack(modulo)
        ext_b = gens_a.hstack(modulo)
    else:
        ext_a = gens_b
        ext_b = gens_a
    for j in range(gens_a.cols):
        if not lattice_member(ext_a, gens_a.column(j)):
            return False
    for j in range(gens_b.cols):
        if not lattice_member(ext_b, gens_b.column(j)):
            return False
    return True


# ---------------------------------------------------------------------------
# finitely generated abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FgAbGroup:
    """Isomorphism class of a finitely generated abelian group.

    ``torsion`` holds the invariant factors: each at least 2, each dividing
    the next.  Construct through :meth:`from_parts` unless the data is
    already canonical.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion not an invariant factor chain")
        if any(t < 2 for t in self.torsion):
            raise ValueError("torsion entries must be >= 2")

    @classmethod
    def from_parts(cls, free_rank, torsion):
        """Canonicalize an arbitrary multiset of cyclic orders.

        Zeros count toward the free rank, ones vanish, the rest is merged
        into an invariant factor chain.
        """
        tors = []
        free = free_rank
        for t in torsion:
            t = abs(int(t))
            if t == 0:
                free += 1
            elif t > 1:
                tors.append(t)
        if not tors:
            return cls(free, ())
        sd = snf(IntMatrix.diagonal(tors))
        chain = tuple(x for x in sd.diagonal if x > 1)
        return cls(free, chain)

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return math.prod(self.torsion) if self.torsion else 1

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, other):
        return FgAbGroup.from_parts(
            self.free_rank + other.free_rank, self.torsion + other.torsion
        )

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " ⊕ ".join(parts) if parts else "0"


@dataclass(frozen=True)
class PresentedGroup:
    """Abelian group given by generators and a relation matrix.

    The group is Z^generators divided by the column span of ``relations``.
    Canonical forms for elements come from the Smith transform, so equality
    of classes is an exact decision.
    """

    generators: int
    relations: IntMatrix
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise ValueError("relation matrix must have one row per generator")
        if self.labels is not None and len(self.labels) != self.generators:
            raise ValueError("label count mismatch")

    @property
    def smith(self) -> SmithData:
        return snf(self.relations)

    def invariants(self) -> FgAbGroup:
        sd = self.smith
        torsion = [x for x in sd.diagonal if x > 1]
        free = self.generators - sd.rank
        return FgAbGroup(free, tuple(torsion))

    def canon(self, vec):
        """Canonical form of the class of ``vec``; equal classes, equal tuples."""
        vec = tuple(vec)
        if len(vec) != self.generators:
            raise ValueError("vector length mismatch")
        sd = self.smith
        y = sd.u @ vec
        diag = sd.diagonal
        out = []
        for i, yi in enumerate(y):
            di = diag[i] if i < len(diag) else 0
            out.append(yi % di if di != 0 else yi)
        return tuple(out)

    def is_zero_class(self, vec):
        return all(x == 0 for x in self.canon(vec))

    def class_equal(self, a, b):
        return self.is_zero_class(tuple(x - y for x, y in zip(a, b, strict=True)))

    def same_presentation(self, other):
        return self.generators == other.generators and self.relations == other.relations


def cokernel(m: IntMatrix, labels=None) -> PresentedGroup:
    """Cokernel of ``m`` acting on column vectors: Z^rows / column span."""
    return PresentedGroup(m.rows, m, labels=tuple(labels) if labels is not None else None)


def group_iso(a, b) -> bool:
    """Isomorphism test for FgAbGroup or PresentedGroup values."""

    def normalize(g):
        if isinstance(g, PresentedGroup):
            return g.invariants()
        if isinstance(g, FgAbGroup):
            return g
        raise TypeError(f"not a group: {g!r}")

    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# group maps and exactness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupMap:
    """Homomorphism between presented groups, given on generators.

    ``matrix`` has shape (codomain.generators, domain.generators) and acts on
    column vectors of generator coordinates.
    """

    domain: PresentedGroup
    codomain: PresentedGroup
    matrix: IntMatrix
    name: str = ""

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.generators, self.domain.generators):
            raise ValueError(
                f"map matrix shape {self.matrix.shape} does not match "
                f"({self.codomain.generators}, {self.domain.generators})"
            )

    def apply(self, vec):
        return self.matrix @ tuple(vec)

    def is_well_defined(self) -> bool:
        for j in range(self.domain.relations.cols):
            image = self.matrix @ self.domain.relations.column(j)
            if not lattice_member(self.codomain.relations, image):
                return False
        return True

    def compose(self, inner: "GroupMap") -> "GroupMap":
        """self after inner."""
        if not self.domain.same_presentation(inner.codomain):
            raise ValueError("maps not composable")
        return GroupMap(
            domain=inner.domain,
            codomain=self.codomain,
            matrix=self.matrix @ inner.matrix,
            name=f"{self.name}∘{inner.name}" if self.name or inner.name else "",
        )

    def kernel_generators(self) -> IntMatrix:
        """Columns generating {x : map(x) = 0 in codomain}, as a lattice in Z^domain."""
        pre = preimage_lattice(self.matrix, self.codomain.relations)
        return pre.hstack(self.domain.relations)


def check_well_defined(gmap: GroupMap) -> bool:
    """Raise ValueError when a relation is not respected; True otherwise."""
    for j in range(gmap.domain.relations.cols):
        image = gmap.matrix @ gmap.domain.relations.column(j)
        if not lattice_member(gmap.codomain.relations, image):
            raise ValueError(
                f"map {gmap.name or '<anonymous>'} does not kill domain relation {j}"
            )
    return True


@dataclass(frozen=True)
class NodeVerdict:
    index: int
    image_in_kernel: bool
    kernel_in_image: bool

    @property
    def exact(self):
        return self.image_in_kernel and self.kernel_in_image


@dataclass(frozen=True)
class ExactnessReport:
    nodes: tuple[NodeVerdict, ...]

    @property
    def exact(self):
        return all(n.exact for n in self.nodes)


def check_exact(maps) -> ExactnessReport:
    """Exactness of a composable sequence at every interior node.

    For consecutive maps f, g the check is im(f) = ker(g) inside f.codomain,
    both inclusions tested by lattice membership modulo the relations.
    """
    maps = list(maps)
    verdicts = []
    for idx in range(len(maps) - 1):
        f, g = maps[idx], maps[idx + 1]
        if not f.codomain.same_presentation(g.domain):
            raise ValueError(f"maps {idx} and {idx + 1} are not composable")
        rel = f.codomain.relations
        image = f.matrix
        kernel = preimage_lattice(g.matrix, g.codomain.relations)
        im_in_ker = True
        for j in range(image.cols):
            if not lattice_member(kernel.hstack(rel), image.column(j)):
                im_in_ker = False
                break
        ker_in_im = True
        for j in range(kernel.cols):
            if not lattice_member(image.hstack(rel), kernel.column(j)):
                ker_in_im = False
                break
        verdicts.append(NodeVerdict(idx, im_in_ker, ker_in_im))
    return ExactnessReport(tuple(verdicts))


# ---------------------------------------------------------------------------
# coefficient groups
# ---------------------------------------------------------------------------


def _prime_power_root(q):
    """Return (p, e) with q = p^e, p prime, or raise ValueError."""
    q = int(q)
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = None
    n = q
    for cand in range(2, n + 1):
        if cand * cand > n:
            p = n if p is None else p
            break
        if n % cand == 0:
            p = cand
            break
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, e


@dataclass(frozen=True)
class CoeffGroup:
    """Coefficient group for unit-level cokernels.

    kind is one of "finite-cyclic" (with ``order``), "fg" (with ``group``),
    "divisible", "symbolic" (with ``symbol`` naming the formal group).
    """

    kind: str
    order: int | None = None
    group: FgAbGroup | None = None
    symbol: str = "G"

    @classmethod
    def finite_cyclic(cls, order):
        order = int(order)
        if order < 1:
            raise ValueError("order must be positive")
        return cls("finite-cyclic", order=order)

    @classmethod
    def units_of_field(cls, q):
        """Multiplicative group of the field with q elements (q a prime power)."""
        _prime_power_root(q)
        return cls.finite_cyclic(q - 1)

    @classmethod
    def reduced_units_of_field(cls, q):
        """Units modulo {1, -1} of the field with q elements."""
        _prime_power_root(q)
        return cls.finite_cyclic((q - 1) // math.gcd(2, q - 1))

    @classmethod
    def divisible(cls):
        return cls("divisible")

    @classmethod
    def symbolic(cls, symbol="G"):
        return cls("symbolic", symbol=symbol)

    @classmethod
    def fg(cls, group: FgAbGroup):
        return cls("fg", group=group)

    def quotient_by(self, d):
        """Isomorphism class of G/dG when it is finitely generated, else None."""
        d = abs(int(d))
        if self.kind == "finite-cyclic":
            return FgAbGroup.from_parts(0, [math.gcd(d, self.order)] if d else [self.order])
        if self.kind == "fg":
            g = self.group
            if d == 0:
                return g
            tors = [math.gcd(d, t) for t in g.torsion] + [d] * g.free_rank
            return FgAbGroup.from_parts(0, tors)
        if self.kind == "divisible":
            return FgAbGroup(0, ()) if d != 0 else None
        return None


@dataclass(frozen=True)
class CoeffCokernel:
    """Cokernel of an integer matrix after applying a coefficient group.

    ``quotient_orders`` lists the invariant factors d with d >= 2 (each
    contributing G/dG) and ``free_rank`` counts plain copies of G.
    """

    coeff: CoeffGroup
    quotient_orders: tuple[int, ...]
    free_rank: int

    def specialize(self) -> FgAbGroup | None:
        """Concrete isomorphism class, when the coefficients allow one."""
        if self.coeff.kind == "finite-cyclic":
            tors = [math.gcd(d, self.coeff.order) for d in self.quotient_orders]
            tors += [self.coeff.order] * self.free_rank
            return FgAbGroup.from_parts(0, tors)
        if self.coeff.kind == "fg":
            out = FgAbGroup(0, ())
            for d in self.quotient_orders:
                out = out.direct_sum(self.coeff.quotient_by(d))
            for _ in range(self.free_rank):
                out = out.direct_sum(self.coeff.group)
            return out
        if self.coeff.kind == "divisible":
            # d != 0 kills a divisible group; only free copies remain
            return FgAbGroup(0, ()) if self.free_rank == 0 else None
        return None

    def symbol(self) -> str:
        name = self.coeff.symbol if self.coeff.kind == "symbolic" else "G"
        if self.coeff.kind in ("finite-cyclic", "fg"):
            spec = self.specialize()
            if spec is not None:
                return str(spec)
        if self.coeff.kind == "divisible":
            if self.free_rank == 0:
                return "0"
            return name if self.free_rank == 1 else f"{name}^{self.free_rank}"
        parts = [f"{name}/{d}{name}" for d in self.quotient_orders]
        if self.free_rank == 1:
            parts.append(name)
        elif self.free_rank > 1:
            parts.append(f"{name}^{self.free_rank}")
        return " ⊕ ".join(parts) if parts else "0"

    def same_class(self, other: "CoeffCokernel") -> bool:
        """Structural equality of the induced groups (exact when specializable)."""
        if self.coeff != other.coeff:
            return False
        mine, theirs = self.specialize(), other.specialize()
        if mine is not None and theirs is not None:
            return mine == theirs
        return (
            self.quotient_orders == other.quotient_orders
            and self.free_rank == other.free_rank
        )

    def is_trivial(self):
        if self.free_rank:
            return False
        spec = self.specialize()
        if spec is not None:
            return spec.is_trivial()
        return not self.quotient_orders


def coker_with_coefficients(m: IntMatrix, coeff: CoeffGroup) -> CoeffCokernel:
    """Cokernel of ``m`` with coefficients: (+) G/d_iG (+) G^(rows - rank)."""
    sd = snf(m)
    orders = tuple(d for d in sd.diagonal if d > 1)
    free = m.rows - sd.rank
    return CoeffCokernel(coeff=coeff, quotient_orders=orders, free_rank=free)
