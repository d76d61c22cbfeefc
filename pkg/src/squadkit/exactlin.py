"""Exact integer linear algebra.

Hermite and Smith normal forms over arbitrary-precision Python integers,
sublattices of torsion-aware ambient groups ``Z/m_1 + ... + Z/m_n``
(modulus 0 meaning a free coordinate), and finitely presented abelian groups
with explicit coset coordinates.

Dense matrices are plain lists of row lists.  Lattice rows are kept sparse
(``{column: value}``) because the commutator layers built elsewhere in the
package have thousands of coordinates with only a handful of nonzero entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Matrix = List[List[int]]
Sparse = Dict[int, int]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``.

    When ``a`` divides ``b`` the answer is ``(|a|, +-1, 0)`` so that pivot
    rows stay untouched during elimination.
    """
    if a and b % a == 0:
        return (a, 1, 0) if a > 0 else (-a, -1, 0)
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def det(m: Matrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _shape(m: Matrix, cols: Optional[int]) -> Tuple[int, int]:
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if rows else 0
    for r in m:
        if len(r) != cols:
            raise ValueError("ragged integer matrix")
    return rows, cols


def hnf(m: Matrix, cols: Optional[int] = None) -> Tuple[Matrix, Matrix]:
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``H == U @ m`` and ``U`` unimodular.  Nonzero rows
    of ``H`` come first, pivots are positive and strictly increase to the
    right, and entries above a pivot lie in ``[0, pivot)``.
    """
    rows, ncols = _shape(m, cols)
    h = [list(r) for r in m]
    u = identity(rows)
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        # gcd-combine every lower row into row r
        for i in range(r + 1, rows):
            if h[i][c] == 0:
                continue
            a, b = h[r][c], h[i][c]
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            hr, hi = h[r], h[i]
            h[r] = [s * x + t * y for x, y in zip(hr, hi)]
            h[i] = [ag * y - bg * x for x, y in zip(hr, hi)]
            ur, ui = u[r], u[i]
            u[r] = [s * x + t * y for x, y in zip(ur, ui)]
            u[i] = [ag * y - bg * x for x, y in zip(ur, ui)]
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        p = h[r][c]
        for i in range(r):
            q = h[i][c] // p
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return h, u


def snf(m: Matrix, cols: Optional[int] = None) -> Tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``(U, D, V)`` with ``U @ m @ V == D``.

    ``D`` is diagonal with nonnegative entries ``d_1 | d_2 | ...`` and ``U``,
    ``V`` are unimodular.
    """
    u, d, v, _ = _snf_full(m, cols, want_u=True)
    return u, d, v


def _snf_full(m: Matrix, cols: Optional[int], want_u: bool):
    rows, ncols = _shape(m, cols)
    a = [list(r) for r in m]
    u = identity(rows) if want_u else None
    v = identity(ncols)
    vinv = identity(ncols)

    def row_op(i, j, s, t, p, q):
        # (row_i, row_j) <- (s*row_i + t*row_j, p*row_i + q*row_j), det = +-1
        ai, aj = a[i], a[j]
        a[i] = [s * x + t * y for x, y in zip(ai, aj)]
        a[j] = [p * x + q * y for x, y in zip(ai, aj)]
        if u is not None:
            ui, uj = u[i], u[j]
            u[i] = [s * x + t * y for x, y in zip(ui, uj)]
            u[j] = [p * x + q * y for x, y in zip(ui, uj)]

    def col_op(i, j, s, t, p, q):
        # (col_i, col_j) <- (s*col_i + t*col_j, p*col_i + q*col_j)
        for row in a:
            x, y = row[i], row[j]
            row[i], row[j] = s * x + t * y, p * x + q * y
        for row in v:
            x, y = row[i], row[j]
            row[i], row[j] = s * x + t * y, p * x + q * y
        # V^{-1} transforms by the inverse 2x2 acting on rows i, j
        dt = s * q - t * p
        ii, ij, ji, jj = q * dt, -p * dt, -t * dt, s * dt
        ri, rj = vinv[i], vinv[j]
        vinv[i] = [ii * x + ij * y for x, y in zip(ri, rj)]
        vinv[j] = [ji * x + jj * y for x, y in zip(ri, rj)]

    k = 0
    while k < min(rows, ncols):
        # choose the smallest nonzero entry in the lower-right block as pivot
        best = None
        for i in range(k, rows):
            for j in range(k, ncols):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != k:
            row_op(k, bi, 0, 1, 1, 0)
        if bj != k:
            col_op(k, bj, 0, 1, 1, 0)
        while True:
            done = True
            for i in range(k + 1, rows):
                if a[i][k]:
                    x, y = a[k][k], a[i][k]
                    g, s, t = xgcd(x, y)
                    row_op(k, i, s, t, -y // g, x // g)
                    done = False
            for j in range(k + 1, ncols):
                if a[k][j]:
                    x, y = a[k][k], a[k][j]
                    g, s, t = xgcd(x, y)
                    col_op(k, j, s, t, -y // g, x // g)
                    done = False
            if not done:
                continue
            # enforce divisibility of the remaining block by the pivot
            p = a[k][k]
            bad = None
            for i in range(k + 1, rows):
                for j in range(k + 1, ncols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(k, bad, 1, 1, 0, 1)
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            if u is not None:
                u[k] = [-x for x in u[k]]
        k += 1
    return u, a, v, vinv


def invariant_factors(m: Matrix, cols: Optional[int] = None) -> List[int]:
    """Diagonal of the Smith form (zeros included, one per min(rows, cols))."""
    _, d, _, _ = _snf_full(m, cols, want_u=False)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


# ---------------------------------------------------------------- sparse rows

def sp_axpy(a: int, x: Sparse, y: Sparse) -> Sparse:
    """Return ``a*x + y`` as a new sparse row."""
    out = dict(y)
    if a:
        for k, v in x.items():
            nv = out.get(k, 0) + a * v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def sp_lin(s: int, x: Sparse, t: int, y: Sparse) -> Sparse:
    out: Sparse = {}
    for k, v in x.items():
        if s * v:
            out[k] = s * v
    for k, v in y.items():
        nv = out.get(k, 0) + t * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def to_sparse(v: Sequence[int]) -> Sparse:
    return {i: x for i, x in enumerate(v) if x}


def to_dense(v: Sparse, n: int) -> List[int]:
    out = [0] * n
    for k, x in v.items():
        out[k] = x
    return out


class Lattice:
    """Subgroup of ``Z/m_1 + ... + Z/m_n`` generated by given rows.

    The generators are reduced on insertion to an echelon basis; torsion is
    handled by adding the rows ``m_i e_i``.  When ``track`` is set, every
    echelon row remembers its expression in the user generators so that
    :meth:`solve` can return witness coefficients.
    """

    def __init__(self, rank: int, moduli: Optional[Sequence[int]] = None,
                 generators: Iterable = (), track: bool = False):
        self.rank = rank
        self.moduli = tuple(moduli) if moduli is not None else (0,) * rank
        if len(self.moduli) != rank:
            raise ValueError("moduli length must equal ambient rank")
        self.track = track
        self._rows: Dict[int, Tuple[Sparse, Sparse]] = {}
        self.ngens = 0
        for i, m in enumerate(self.moduli):
            if m:
                self._insert({i: m}, {})
        for g in generators:
            self.add(g)

    # construction ---------------------------------------------------------
    def _normalize(self, v) -> Sparse:
        if isinstance(v, dict):
            s = {k: x for k, x in v.items() if x}
        else:
            if len(v) != self.rank:
                raise ValueError(f"dimension mismatch: {len(v)} != {self.rank}")
            s = to_sparse(v)
        for k in s:
            if not 0 <= k < self.rank:
                raise ValueError(f"coordinate {k} outside ambient rank {self.rank}")
        return s

    def add(self, v) -> None:
        vec = self._normalize(v)
        expr = {self.ngens: 1} if self.track else {}
        self.ngens += 1
        self._insert(vec, expr)

    def _insert(self, vec: Sparse, expr: Sparse) -> None:
        rows = self._rows
        while vec:
            c = min(vec)
            if c not in rows:
                if vec[c] < 0:
                    vec = {k: -x for k, x in vec.items()}
                    expr = {k: -x for k, x in expr.items()}
                rows[c] = (vec, expr)
                return
            row, rexpr = rows[c]
            a, b = row[c], vec[c]
            if b % a == 0:
                q = b // a
                vec = sp_axpy(-q, row, vec)
                if self.track:
                    expr = sp_axpy(-q, rexpr, expr)
                continue
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            new_row = sp_lin(s, row, t, vec)
            new_vec = sp_lin(-bg, row, ag, vec)
            if self.track:
                new_expr = sp_lin(s, rexpr, t, expr)
                expr = sp_lin(-bg, rexpr, ag, expr)
            else:
                new_expr = {}
            rows[c] = (new_row, new_expr)
            vec = new_vec

    # queries ----------------------------------------------------------------
    def _reduce(self, v) -> Tuple[Sparse, Sparse]:
        vec = self._normalize(v)
        coeffs: Sparse = {}
        rows = self._rows
        while vec:
            c = min(vec)
            if c not in rows:
                return vec, coeffs
            row, rexpr = rows[c]
            q, r = divmod(vec[c], row[c])
            if r:
                return vec, coeffs
            vec = sp_axpy(-q, row, vec)
            if self.track:
                coeffs = sp_axpy(q, rexpr, coeffs)
        return vec, coeffs

    def contains(self, v) -> bool:
        rest, _ = self._reduce(v)
        return not rest

    def solve(self, v) -> Optional[List[int]]:
        """Witness coefficients over the generators, or ``None``."""
        if not self.track:
            raise ValueError("lattice was built without witness tracking")
        rest, coeffs = self._reduce(v)
        if rest:
            return None
        return [coeffs.get(i, 0) for i in range(self.ngens)]

    def pivots(self) -> List[int]:
        return sorted(self._rows)

    def basis(self) -> Matrix:
        """Hermite-reduced basis as dense rows (torsion rows included)."""
        return [to_dense(r, self.rank) for r in self.sparse_basis()]

    def sparse_basis(self) -> List[Sparse]:
        cols = sorted(self._rows)
        red = {c: dict(self._rows[c][0]) for c in cols}
        # left to right: reducing at c only touches columns >= c
        for idx, c in enumerate(cols):
            p = red[c][c]
            for c2 in cols[:idx]:
                q = red[c2].get(c, 0) // p
                if q:
                    red[c2] = sp_axpy(-q, red[c], red[c2])
        return [red[c] for c in cols]

    def reduce_mod(self, v) -> Sparse:
        """Canonical coset representative (entries left of pivots reduced)."""
        vec = self._normalize(v)
        for c in sorted(self._rows):
            x = vec.get(c, 0)
            if x:
                row = self._rows[c][0]
                q = x // row[c]
                if q:
                    vec = sp_axpy(-q, row, vec)
        return vec

    def free_basis(self) -> List[Sparse]:
        """Basis rows excluding the pure torsion rows ``m_i e_i``."""
        out = []
        for r in self.sparse_basis():
            if len(r) == 1:
                (k, x), = r.items()
                if self.moduli[k] and x == self.moduli[k]:
                    continue
            out.append(r)
        return out

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def issubset(self, other: "Lattice") -> bool:
        return all(other.contains(r) for r in self.sparse_basis())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.rank == other.rank and self.moduli == other.moduli
                and self.issubset(other) and other.issubset(self))

    def __hash__(self):
        return hash((self.rank, self.moduli, tuple(tuple(sorted(r.items())) for r in self.sparse_basis())))


def lattice_member(lat: Lattice, v) -> Tuple[bool, Optional[List[int]]]:
    if lat.track:
        w = lat.solve(v)
        return w is not None, w
    return lat.contains(v), None


def left_kernel(rows: Sequence[Sparse], ncols: int) -> List[Sparse]:
    """Basis of ``{k : sum k_i rows_i == 0}`` as sparse vectors over row indices."""
    lat = Lattice(ncols, generators=(), track=True)
    kernel: List[Sparse] = []
    # insert one at a time; an insertion that reduces to zero yields a relation
    for idx, r in enumerate(rows):
        vec = {k: x for k, x in r.items() if x}
        expr = {idx: 1}
        lat.ngens = idx + 1
        rows_ = lat._rows
        while vec:
            c = min(vec)
            if c not in rows_:
                if vec[c] < 0:
                    vec = {k: -x for k, x in vec.items()}
                    expr = {k: -x for k, x in expr.items()}
                rows_[c] = (vec, expr)
                break
            row, rexpr = rows_[c]
            a, b = row[c], vec[c]
            if b % a == 0:
                q = b // a
                vec = sp_axpy(-q, row, vec)
                expr = sp_axpy(-q, rexpr, expr)
                continue
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            rows_[c] = (sp_lin(s, row, t, vec), sp_lin(s, rexpr, t, expr))
            vec = sp_lin(-bg, row, ag, vec)
            expr = sp_lin(-bg, rexpr, ag, expr)
        else:
            if expr:
                kernel.append(expr)
    return kernel


# ------------------------------------------------------- finite abelian groups

@dataclass(frozen=True)
class FpAbelianGroup:
    """``Z^n / <relations>`` with Smith coordinates.

    Unit-pivot relations are eliminated first; the Smith decomposition is
    computed on the remaining block only.  ``invariant_factors`` lists the
    nontrivial cyclic factors, ``0`` standing for a copy of ``Z``.
    """

    generator_count: int
    relation_matrix: Tuple[Tuple[int, ...], ...]
    smith_decomposition: Tuple[Matrix, Matrix, Matrix]
    invariant_factors: Tuple[int, ...]
    _lattice: Lattice = field(repr=False, compare=False)
    _cols: Tuple[int, ...] = field(repr=False, compare=False)
    _v: Matrix = field(repr=False, compare=False)
    _vinv: Matrix = field(repr=False, compare=False)
    _keep: Tuple[int, ...] = field(repr=False, compare=False)
    _diag: Tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_relations(cls, n: int, relations: Iterable, moduli: Optional[Sequence[int]] = None
                       ) -> "FpAbelianGroup":
        lat = Lattice(n, moduli, relations)
        basis = lat.sparse_basis()
        unit = {min(r) for r in basis if r[min(r)] == 1}
        cols = tuple(c for c in range(n) if c not in unit)
        pos = {c: i for i, c in enumerate(cols)}
        block = [[0] * len(cols) for r in basis if min(r) not in unit]
        i = 0
        for r in basis:
            if min(r) in unit:
                continue
            for k, x in r.items():
                block[i][pos[k]] = x
            i += 1
        u, d, v, vinv = _snf_full(block, len(cols), want_u=True)
        diag = [d[i][i] if i < len(d) else 0 for i in range(len(cols))]
        keep = tuple(i for i, x in enumerate(diag) if x != 1)
        factors = tuple(sorted((diag[i] for i in keep), key=lambda x: (x == 0, x)))
        # order generators to match the sorted factor list
        keep = tuple(sorted(keep, key=lambda i: (diag[i] == 0, diag[i], i)))
        rel = tuple(tuple(to_dense(r, n)) for r in basis)
        return cls(n, rel, (u, d, v), factors, lat, cols, v, vinv, keep, tuple(diag))

    @property
    def order(self) -> Optional[int]:
        if any(f == 0 for f in self.invariant_factors):
            return None
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def coordinates(self, v) -> Tuple[int, ...]:
        """Coordinates of the class of ``v`` along the invariant-factor generators."""
        rest = self._lattice.reduce_mod(v)
        # unit-pivot coordinates are expressed through the remaining ones
        vec = [rest.get(c, 0) for c in self._cols]
        w = [sum(vec[k] * self._v[k][j] for k in range(len(vec))) for j in range(len(vec))]
        out = []
        for i in self._keep:
            d = self._diag[i]
            out.append(w[i] % d if d else w[i])
        return tuple(out)

    def generator(self, i: int) -> List[int]:
        """Ambient vector representing the ``i``-th invariant-factor generator."""
        row = self._vinv[self._keep[i]]
        out = [0] * self.generator_count
        for k, c in enumerate(self._cols):
            out[c] = row[k]
        return out

    def generators(self) -> List[List[int]]:
        return [self.generator(i) for i in range(len(self.invariant_factors))]

    def is_zero(self, v) -> bool:
        return self._lattice.contains(v)

    def describe(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join("Z" if f == 0 else f"Z/{f}" for f in self.invariant_factors)

    def __str__(self) -> str:
        return self.describe()


def quotient(ambient_moduli: Sequence[int], generators: Iterable) -> FpAbelianGroup:
    """``(Z/m_1 + ... + Z/m_n) / <generators>``."""
    return FpAbelianGroup.from_relations(len(ambient_moduli), generators, ambient_moduli)
