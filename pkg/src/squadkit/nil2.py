"""Class-2 nilpotent groups in normal form.

Every group here is a central extension ``0 -> Z -> G -> Z^k -> 0`` whose
cocycle ``beta`` is bilinear.  An element is a pair ``(top, cen)`` of sparse
integer vectors and

    (a, c) + (a', c') = (a + a', c + c' + beta(a, a')).

The free nilpotency-class-2 group on an ordered generator set is the case
where the central coordinates are indexed by pairs ``i < j`` (exponent of the
basic commutator ``[g_j, g_i]``) and ``beta(u, v)_{ij} = u_j v_i``.  With the
commutator convention ``[x, y] = -x - y + x + y`` this gives the collection
rule ``b + a = a + b + [b, a]``.

Besides the free group this module provides the abelian constructions used for
degree-one carriers (``hat_square`` realizing a quotient of the tensor square
as exterior square plus ``Z/2`` diagonal) and normal closures as lattices.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exactlin import Lattice, Sparse, sp_axpy, xgcd

Beta = Callable[[Sparse, Sparse], Sparse]


def _clean(d: Mapping[int, int]) -> Sparse:
    return {k: v for k, v in d.items() if v}


class CElem:
    """Element of a class-2 central extension: sparse ``top`` and ``cen``."""

    __slots__ = ("top", "cen")

    def __init__(self, top: Sparse, cen: Sparse):
        self.top = top
        self.cen = cen

    def key(self) -> Tuple:
        return (tuple(sorted(self.top.items())), tuple(sorted(self.cen.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, CElem) and self.top == other.top and self.cen == other.cen

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"CElem({self.top}, {self.cen})"

    def is_zero(self) -> bool:
        return not self.top and not self.cen


class Nil2Law:
    """Arithmetic of a class-2 central extension with free top layer.

    ``central_moduli[i] == 0`` marks a free central coordinate, a positive
    value a cyclic one.
    """

    def __init__(self, top_rank: int, central_moduli: Sequence[int], beta: Beta):
        self.top_rank = top_rank
        self.central_moduli = tuple(central_moduli)
        self.beta = beta

    @property
    def central_rank(self) -> int:
        return len(self.central_moduli)

    def _red(self, c: Mapping[int, int]) -> Sparse:
        out = {}
        mod = self.central_moduli
        for k, v in c.items():
            m = mod[k]
            if m:
                v %= m
            if v:
                out[k] = v
        return out

    def zero(self) -> CElem:
        return CElem({}, {})

    def gen(self, i: int, n: int = 1) -> CElem:
        if not 0 <= i < self.top_rank:
            raise IndexError(f"generator index {i} out of range")
        return CElem({i: n} if n else {}, {})

    def central(self, c: Mapping[int, int]) -> CElem:
        return CElem({}, self._red(c))

    def make(self, top: Mapping[int, int], cen: Mapping[int, int]) -> CElem:
        return CElem(_clean(top), self._red(cen))

    def add(self, x: CElem, y: CElem) -> CElem:
        top = sp_axpy(1, y.top, x.top)
        cen = sp_axpy(1, y.cen, x.cen)
        if x.top and y.top:
            cen = sp_axpy(1, self.beta(x.top, y.top), cen)
        return CElem(top, self._red(cen))

    def sum(self, xs: Iterable[CElem]) -> CElem:
        out = self.zero()
        for x in xs:
            out = self.add(out, x)
        return out

    def neg(self, x: CElem) -> CElem:
        cen = {k: -v for k, v in x.cen.items()}
        if x.top:
            cen = sp_axpy(1, self.beta(x.top, x.top), cen)
        return CElem({k: -v for k, v in x.top.items()}, self._red(cen))

    def sub(self, x: CElem, y: CElem) -> CElem:
        """``x - y`` meaning ``x + (-y)``."""
        return self.add(x, self.neg(y))

    def mul(self, x: CElem, n: int) -> CElem:
        """``n * x`` (the ``n``-fold sum, negative ``n`` allowed)."""
        top = {k: n * v for k, v in x.top.items()} if n else {}
        cen = {k: n * v for k, v in x.cen.items()} if n else {}
        b = n * (n - 1) // 2
        if b and x.top:
            cen = sp_axpy(b, self.beta(x.top, x.top), cen)
        return CElem(top, self._red(cen))

    def comm(self, x: CElem, y: CElem) -> CElem:
        """``[x, y] = -x - y + x + y``; central and bilinear in the tops."""
        if not x.top or not y.top:
            return self.zero()
        c = sp_axpy(-1, self.beta(y.top, x.top), self.beta(x.top, y.top))
        return CElem({}, self._red(c))

    def conj(self, x: CElem, y: CElem) -> CElem:
        """``-y + x + y``."""
        return self.add(x, self.comm(x, y))


# ------------------------------------------------------------ free class 2

class GenSet:
    """Ordered list of distinct generator names."""

    def __init__(self, names: Iterable[str]):
        self.names: Tuple[str, ...] = tuple(names)
        self.index: Dict[str, int] = {}
        for i, n in enumerate(self.names):
            if n in self.index:
                raise ValueError(f"duplicate generator name {n!r}")
            self.index[n] = i

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, GenSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"GenSet({list(self.names)!r})"


def pair_index(n: int) -> Dict[Tuple[int, int], int]:
    """Index of the pair ``(i, j)`` with ``i < j`` among all pairs of ``range(n)``."""
    out = {}
    for j in range(n):
        for i in range(j):
            out[(i, j)] = len(out)
    return out


def pair_list(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for j in range(n) for i in range(j)]


def _pidx(i: int, j: int) -> int:
    # closed form of pair_index: pairs listed by increasing j
    return j * (j - 1) // 2 + i


def free_beta(offset: int = 0) -> Beta:
    """Cocycle of the free class-2 group, written into pair coordinates."""

    def beta(u: Sparse, v: Sparse) -> Sparse:
        out: Sparse = {}
        for j, uj in u.items():
            for i, vi in v.items():
                if i < j:
                    k = offset + _pidx(i, j)
                    out[k] = out.get(k, 0) + uj * vi
        return out

    return beta


class Nil2Group(Nil2Law):
    """Free nilpotency-class-2 group on a :class:`GenSet`."""

    def __init__(self, gens: GenSet | Iterable[str]):
        self.gens = gens if isinstance(gens, GenSet) else GenSet(gens)
        n = len(self.gens)
        super().__init__(n, (0,) * (n * (n - 1) // 2), free_beta())
        self.pairs = pair_list(n)

    def word(self, letters: Iterable[Tuple[str, int]]) -> "Nil2Word":
        """Evaluate a word given as ``(generator, exponent)`` letters."""
        out = self.zero()
        for name, e in letters:
            out = self.add(out, self.gen(self.gens.index[name], e))
        return Nil2Word(self, out)

    def element(self, gen_exponents: Mapping[str, int] = (),
                comm_exponents: Mapping[Tuple[str, str], int] = ()) -> "Nil2Word":
        """Build from exponent maps; commutator keys are ordered pairs ``(g_i, g_j)``, ``i < j``."""
        idx = self.gens.index
        top = {idx[g]: a for g, a in dict(gen_exponents).items() if a}
        cen = {}
        for (gi, gj), c in dict(comm_exponents).items():
            i, j = idx[gi], idx[gj]
            if i >= j:
                raise ValueError("commutator keys must be (g_i, g_j) with i < j")
            cen[_pidx(i, j)] = c
        return Nil2Word(self, self.make(top, cen))

    def identity(self) -> "Nil2Word":
        return Nil2Word(self, self.zero())

    def generator(self, name: str) -> "Nil2Word":
        return Nil2Word(self, self.gen(self.gens.index[name]))


class Nil2Word:
    """Normal form ``prod g_i^{a_i} * prod_{i<j} [g_j, g_i]^{c_ij}``.

    Group operation is written additively, as in the rest of the package.
    """

    __slots__ = ("group", "elem")

    def __init__(self, group: Nil2Group, elem: CElem):
        self.group = group
        self.elem = elem

    def _check(self, other: "Nil2Word") -> None:
        if not isinstance(other, Nil2Word) or other.group.gens != self.group.gens:
            raise ValueError("generator-set mismatch")

    @property
    def gen_exponents(self) -> Dict[str, int]:
        names = self.group.gens.names
        return {names[i]: a for i, a in sorted(self.elem.top.items())}

    @property
    def comm_exponents(self) -> Dict[Tuple[str, str], int]:
        names = self.group.gens.names
        pairs = self.group.pairs
        return {(names[pairs[k][0]], names[pairs[k][1]]): c for k, c in sorted(self.elem.cen.items())}

    def __add__(self, other: "Nil2Word") -> "Nil2Word":
        self._check(other)
        return Nil2Word(self.group, self.group.add(self.elem, other.elem))

    def __neg__(self) -> "Nil2Word":
        return Nil2Word(self.group, self.group.neg(self.elem))

    def __sub__(self, other: "Nil2Word") -> "Nil2Word":
        self._check(other)
        return Nil2Word(self.group, self.group.sub(self.elem, other.elem))

    def __mul__(self, n: int) -> "Nil2Word":
        return Nil2Word(self.group, self.group.mul(self.elem, n))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Nil2Word) and self.group.gens == other.group.gens and self.elem == other.elem

    def __hash__(self) -> int:
        return hash((self.group.gens, self.elem))

    def is_identity(self) -> bool:
        return self.elem.is_zero()

    def __repr__(self) -> str:
        parts = [f"{g}^{a}" for g, a in self.gen_exponents.items()]
        parts += [f"[{gj},{gi}]^{c}" for (gi, gj), c in self.comm_exponents.items()]
        return "Nil2Word(" + (" ".join(parts) or "1") + ")"


def mul(u: Nil2Word, v: Nil2Word) -> Nil2Word:
    return u + v


def inverse(u: Nil2Word) -> Nil2Word:
    return -u


def commutator(u: Nil2Word, v: Nil2Word) -> Nil2Word:
    u._check(v)
    return Nil2Word(u.group, u.group.comm(u.elem, v.elem))


def abelianize(u: Nil2Word) -> List[int]:
    out = [0] * len(u.group.gens)
    for i, a in u.elem.top.items():
        out[i] = a
    return out


# ------------------------------------------------------- quotient of tensor^2

class HatSquareElem:
    """Element of the tensor square modulo ``a(x)b + b(x)a``.

    Stored as exterior coordinates on pairs ``i < j`` plus a ``Z/2``
    coordinate on each diagonal ``e_i (x) e_i``.
    """

    __slots__ = ("wedge_part", "diag_part")

    def __init__(self, wedge_part: Mapping[Tuple[int, int], int] = (), diag_part: Mapping[int, int] = ()):
        self.wedge_part = {k: v for k, v in dict(wedge_part).items() if v}
        self.diag_part = {k: v % 2 for k, v in dict(diag_part).items() if v % 2}

    def __add__(self, other: "HatSquareElem") -> "HatSquareElem":
        w = dict(self.wedge_part)
        for k, v in other.wedge_part.items():
            w[k] = w.get(k, 0) + v
        d = dict(self.diag_part)
        for k, v in other.diag_part.items():
            d[k] = d.get(k, 0) + v
        return HatSquareElem(w, d)

    def __neg__(self) -> "HatSquareElem":
        return HatSquareElem({k: -v for k, v in self.wedge_part.items()}, self.diag_part)

    def __mul__(self, n: int) -> "HatSquareElem":
        return HatSquareElem({k: n * v for k, v in self.wedge_part.items()},
                             {k: n * v for k, v in self.diag_part.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, HatSquareElem) and self.wedge_part == other.wedge_part
                and self.diag_part == other.diag_part)

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.wedge_part.items())), tuple(sorted(self.diag_part.items()))))

    def is_zero(self) -> bool:
        return not self.wedge_part and not self.diag_part

    def __repr__(self) -> str:
        return f"HatSquareElem(wedge={self.wedge_part}, diag={self.diag_part})"


def hat_square(a: Sequence[int] | Mapping[int, int], b: Sequence[int] | Mapping[int, int]) -> HatSquareElem:
    """``a (x^) b`` for integer vectors over a common basis."""
    da = dict(a) if isinstance(a, Mapping) else {i: x for i, x in enumerate(a) if x}
    db = dict(b) if isinstance(b, Mapping) else {i: x for i, x in enumerate(b) if x}
    wedge: Dict[Tuple[int, int], int] = {}
    diag: Dict[int, int] = {}
    for i, x in da.items():
        for j, y in db.items():
            if i < j:
                wedge[(i, j)] = wedge.get((i, j), 0) + x * y
            elif j < i:
                wedge[(j, i)] = wedge.get((j, i), 0) - x * y
            else:
                diag[i] = diag.get(i, 0) + x * y
    return HatSquareElem(wedge, diag)


# ------------------------------------------------------------ normal closure

class NormalSubgroup:
    """Normal closure of a finite set in a class-2 group, decided by lattices.

    The top layer is echelonized while carrying group elements, which gives
    lifts ``h_k`` of an echelon basis of the top lattice.  Elements with zero
    top that appear on the way, together with all ``[h_k, g]`` for top
    generators ``g``, span the central part ``L``.  Then ``x`` is a member
    exactly when ``x - sum q_k h_k`` (with ``top(x) = sum q_k top(h_k)``) has
    central coordinates in ``L``.
    """

    def __init__(self, law: Nil2Law, gens: Iterable[CElem]):
        self.law = law
        self._rows: Dict[int, CElem] = {}
        residues: List[Sparse] = []
        for g in gens:
            r = self._insert(g)
            if r is not None and r.cen:
                residues.append(r.cen)
        self.central = Lattice(law.central_rank, law.central_moduli, residues)
        for h in self._rows.values():
            for g in range(law.top_rank):
                c = law.comm(h, law.gen(g))
                if c.cen:
                    self.central.add(c.cen)

    def _insert(self, x: CElem) -> Optional[CElem]:
        law = self.law
        rows = self._rows
        while x.top:
            c = min(x.top)
            if c not in rows:
                if x.top[c] < 0:
                    x = law.neg(x)
                rows[c] = x
                return None
            h = rows[c]
            a, b = h.top[c], x.top[c]
            if b % a == 0:
                x = law.sub(x, law.mul(h, b // a))
                continue
            g, s, t = xgcd(a, b)
            new_h = law.add(law.mul(h, s), law.mul(x, t))
            x = law.sub(law.mul(x, a // g), law.mul(h, b // g))
            rows[c] = new_h
        return x

    def top_pivots(self) -> List[int]:
        return sorted(self._rows)

    def lifts(self) -> List[CElem]:
        return [self._rows[c] for c in sorted(self._rows)]

    def reduce_top(self, x: CElem) -> Tuple[CElem, Sparse]:
        """Subtract lifts until the top is reduced; returns rest and the coefficients."""
        law = self.law
        coeffs: Sparse = {}
        for c in sorted(self._rows):
            v = x.top.get(c, 0)
            if not v:
                continue
            h = self._rows[c]
            q = v // h.top[c]
            if q:
                x = law.sub(x, law.mul(h, q))
                coeffs[c] = q
        return x, coeffs

    def contains(self, x: CElem) -> bool:
        rest, _ = self.reduce_top(x)
        if rest.top:
            return False
        return self.central.contains(rest.cen)

    def __contains__(self, x: CElem) -> bool:
        return self.contains(x)

    def top_lattice(self) -> Lattice:
        return Lattice(self.law.top_rank, None, [h.top for h in self._rows.values()])

    def generators(self) -> List[CElem]:
        """A generating set of the subgroup (lifts plus central basis)."""
        return self.lifts() + [CElem({}, r) for r in self.central.free_basis()]

    def issubset(self, other: "NormalSubgroup") -> bool:
        return all(other.contains(g) for g in self.generators())

    def same_as(self, other: "NormalSubgroup") -> bool:
        return self.issubset(other) and other.issubset(self)
