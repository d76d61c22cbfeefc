"""Free and presented stable quadratic modules.

A stable quadratic module is a pair of class-2 groups with maps

    C0^ab (x) C0^ab --w--> C1 --d--> C0

such that ``d<c, d'> = [d', c]``, ``<dc1, dd1> = [d1, c1]`` and
``<c, d> + <d, c> = 0``.

The free object on generators ``E0`` (degree 0) and ``E1`` (degree 1) has

    F0 = <E0 u dE1>^nil
    F1 = (hat-square of Z[E0]) x Z[E0 x E1] x <E1>^nil

with ``dE1`` formal degree-0 symbols.  Both carriers are handled as
:class:`~squadkit.nil2.Nil2Law` instances.  F1's central coordinates are laid
out in four blocks:

* ``t``: pairs ``i < j`` of E0, coefficient of ``e_i (x^) e_j``;
* ``diag``: ``e_i (x^) e_i``, each of order two;
* ``m``: pairs ``(e0, e1)``;
* ``w``: pairs ``a < b`` of E1, exponent of ``[e_b, e_a]`` in ``<E1>^nil``.

The boundary sends ``t``, ``m`` and ``w`` bijectively onto the commutator
coordinates of F0 and kills ``diag``.  A presentation adds relators
``R0 ⊂ F0`` and ``R1 ⊂ F1``; the quotient is by the normal closures ``N0`` of
``R0 u dR1`` and ``N1`` of ``R1 u <F0, N0>``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import CheckFailure, InconsistentPresentation, SchemaError
from .exactlin import FpAbelianGroup, Lattice, Sparse, quotient
from .nil2 import (CElem, GenSet, HatSquareElem, Nil2Group, Nil2Law, Nil2Word,
                   NormalSubgroup, _pidx, free_beta, pair_list)


def dname(e1: str) -> str:
    """Name of the formal degree-0 symbol attached to a degree-1 generator."""
    return f"d({e1})"


class FreeSquad:
    """The free stable quadratic module ``F(E0, E1)``."""

    def __init__(self, e0: Iterable[str], e1: Iterable[str]):
        self.E0 = GenSet(e0)
        self.E1 = GenSet(e1)
        n0, n1 = len(self.E0), len(self.E1)
        self.n0, self.n1 = n0, n1
        clash = set(self.E0.names) & {dname(e) for e in self.E1}
        if clash:
            raise SchemaError(f"degree-0 names collide with boundary symbols: {sorted(clash)}")
        self.F0 = Nil2Group(list(self.E0.names) + [dname(e) for e in self.E1.names])
        self.k0 = n0 + n1
        # F1 central block offsets
        self.T = 0
        self.DG = n0 * (n0 - 1) // 2
        self.M = self.DG + n0
        self.W = self.M + n0 * n1
        size = self.W + n1 * (n1 - 1) // 2
        moduli = [0] * size
        for i in range(n0):
            moduli[self.DG + i] = 2
        self.F1 = Nil2Law(n1, moduli, free_beta(self.W))
        # boundary on central coordinates and its inverse
        self._D: Dict[int, int] = {}
        for (i, j) in pair_list(n0):
            self._D[_pidx(i, j)] = _pidx(i, j)
        for i in range(n0):
            for a in range(n1):
                self._D[self.M + i * n1 + a] = _pidx(i, n0 + a)
        for (a, b) in pair_list(n1):
            self._D[self.W + _pidx(a, b)] = _pidx(n0 + a, n0 + b)
        self._Dinv = {v: k for k, v in self._D.items()}

    # -- constructors ---------------------------------------------------------
    def e0(self, name: str, n: int = 1) -> CElem:
        try:
            return self.F0.gen(self.E0.index[name], n)
        except KeyError:
            raise SchemaError(f"unknown degree-0 generator {name!r}") from None

    def de1(self, name: str, n: int = 1) -> CElem:
        """The formal symbol ``d e1`` as a degree-0 element."""
        try:
            return self.F0.gen(self.n0 + self.E1.index[name], n)
        except KeyError:
            raise SchemaError(f"unknown degree-1 generator {name!r}") from None

    def e1(self, name: str, n: int = 1) -> CElem:
        try:
            return self.F1.gen(self.E1.index[name], n)
        except KeyError:
            raise SchemaError(f"unknown degree-1 generator {name!r}") from None

    def is_diag(self, k: int) -> bool:
        return self.DG <= k < self.M

    # -- structure maps ---------------------------------------------------------
    def boundary(self, x: CElem) -> CElem:
        n0 = self.n0
        top = {n0 + a: v for a, v in x.top.items()}
        cen = {}
        D = self._D
        for k, v in x.cen.items():
            t = D.get(k)
            if t is not None:
                cen[t] = v
        return CElem(top, cen)

    def bracket(self, x: CElem, y: CElem) -> CElem:
        """``<x, y>``; bilinear in the abelianizations of ``x`` and ``y``."""
        n0, n1 = self.n0, self.n1
        cen: Dict[int, int] = {}

        def bump(k, v):
            cen[k] = cen.get(k, 0) + v

        for i, xi in x.top.items():
            for j, yj in y.top.items():
                v = xi * yj
                if i < n0 and j < n0:
                    if i < j:
                        bump(self.T + _pidx(i, j), v)
                    elif i > j:
                        bump(self.T + _pidx(j, i), -v)
                    else:
                        bump(self.DG + i, v)
                elif i < n0:
                    bump(self.M + i * n1 + (j - n0), v)
                elif j < n0:
                    bump(self.M + j * n1 + (i - n0), -v)
                else:
                    a, b = i - n0, j - n0
                    if a < b:
                        bump(self.W + _pidx(a, b), v)
                    elif a > b:
                        bump(self.W + _pidx(b, a), -v)
        return self.F1.central(cen)

    def act(self, m: CElem, n: CElem) -> CElem:
        """``m^n = m + <n, dm>``."""
        return self.F1.add(m, self.bracket(n, self.boundary(m)))

    def d_inverse_central(self, c: Mapping[int, int]) -> Sparse:
        """Preimage of a central F0 vector under the boundary (no diagonal part)."""
        return {self._Dinv[k]: v for k, v in c.items() if v}

    # -- views ----------------------------------------------------------------------
    def components(self, x: CElem) -> Tuple[HatSquareElem, Dict[Tuple[str, str], int], Nil2Word]:
        """Split a degree-1 element into its three factors."""
        n0, n1 = self.n0, self.n1
        pairs0 = pair_list(n0)
        wedge, diag, m, wcen = {}, {}, {}, {}
        for k, v in x.cen.items():
            if k < self.DG:
                wedge[pairs0[k]] = v
            elif k < self.M:
                diag[k - self.DG] = v
            elif k < self.W:
                i, a = divmod(k - self.M, n1)
                m[(self.E0.names[i], self.E1.names[a])] = v
            else:
                wcen[k - self.W] = v
        wgroup = Nil2Group(self.E1)
        return HatSquareElem(wedge, diag), m, Nil2Word(wgroup, wgroup.make(x.top, wcen))

    def name0(self, i: int) -> str:
        return self.F0.gens.names[i]

    # -- serialization ------------------------------------------------------------
    def dump0(self, x: CElem) -> dict:
        names = self.F0.gens.names
        pairs = self.F0.pairs
        return {
            "gens": [[names[i], v] for i, v in sorted(x.top.items())],
            "comms": [[names[pairs[k][0]], names[pairs[k][1]], v] for k, v in sorted(x.cen.items())],
        }

    def dump1(self, x: CElem) -> dict:
        hs, m, w = self.components(x)
        e0 = self.E0.names
        return {
            "t": [[e0[i], e0[j], v] for (i, j), v in sorted(hs.wedge_part.items())],
            "diag": [e0[i] for i in sorted(hs.diag_part)],
            "m": [[a, b, v] for (a, b), v in sorted(m.items(), key=lambda kv: (self.E0.index[kv[0][0]], self.E1.index[kv[0][1]]))],
            "w": {"gens": [[g, v] for g, v in w.gen_exponents.items()],
                  "comms": [[gi, gj, v] for (gi, gj), v in w.comm_exponents.items()]},
        }

    def load0(self, data) -> CElem:
        """Parse a degree-0 term: a normal-form dict or a list of ``[name, exponent]`` letters."""
        F0 = self.F0
        idx = F0.gens.index

        def gi(name):
            if name not in idx:
                raise SchemaError(f"unknown degree-0 symbol {name!r}")
            return idx[name]

        if isinstance(data, list):
            out = F0.zero()
            for name, e in data:
                out = F0.add(out, F0.gen(gi(name), int(e)))
            return out
        if not isinstance(data, dict):
            raise SchemaError("degree-0 term must be a list of letters or a dict")
        top = {gi(n): int(v) for n, v in data.get("gens", [])}
        cen = {}
        for a, b, v in data.get("comms", []):
            i, j = gi(a), gi(b)
            if i >= j:
                raise SchemaError(f"commutator key ({a}, {b}) must follow generator order")
            cen[_pidx(i, j)] = int(v)
        return F0.make(top, cen)

    def load1(self, data) -> CElem:
        if not isinstance(data, dict):
            raise SchemaError("degree-1 term must be a dict with keys t, diag, m, w")
        i0, i1 = self.E0.index, self.E1.index

        def g0(n):
            if n not in i0:
                raise SchemaError(f"unknown degree-0 generator {n!r}")
            return i0[n]

        def g1(n):
            if n not in i1:
                raise SchemaError(f"unknown degree-1 generator {n!r}")
            return i1[n]

        cen: Dict[int, int] = {}
        for a, b, v in data.get("t", []):
            i, j = g0(a), g0(b)
            if i == j:
                raise SchemaError("t entries need distinct generators; use diag")
            if i < j:
                cen[self.T + _pidx(i, j)] = cen.get(self.T + _pidx(i, j), 0) + int(v)
            else:
                cen[self.T + _pidx(j, i)] = cen.get(self.T + _pidx(j, i), 0) - int(v)
        for a in data.get("diag", []):
            cen[self.DG + g0(a)] = cen.get(self.DG + g0(a), 0) + 1
        for a, b, v in data.get("m", []):
            k = self.M + g0(a) * self.n1 + g1(b)
            cen[k] = cen.get(k, 0) + int(v)
        w = data.get("w", {})
        if isinstance(w, list):
            wel = self.F1.zero()
            for name, e in w:
                wel = self.F1.add(wel, self.F1.gen(g1(name), int(e)))
        else:
            top = {g1(n): int(v) for n, v in w.get("gens", [])}
            wc = {}
            for a, b, v in w.get("comms", []):
                i, j = g1(a), g1(b)
                if i >= j:
                    raise SchemaError(f"commutator key ({a}, {b}) must follow generator order")
                wc[self.W + _pidx(i, j)] = int(v)
            wel = self.F1.make(top, wc)
        return self.F1.add(wel, self.F1.central(cen))


class _Cache:
    """Per-instance lazily computed values, guarded by one lock."""

    def __init__(self):
        self._lock = threading.RLock()
        self._vals: Dict[str, object] = {}

    def get(self, key: str, fn):
        with self._lock:
            if key not in self._vals:
                self._vals[key] = fn()
            return self._vals[key]


@dataclass
class HomotopyGroup:
    """A homotopy group with explicit coordinates and representatives."""

    group: FpAbelianGroup
    representatives: List[CElem]
    _coords: object = field(repr=False)

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return self.group.invariant_factors

    def coordinates(self, x: CElem) -> Tuple[int, ...]:
        return self._coords(x)

    def is_trivial(self) -> bool:
        return self.group.is_trivial()

    def describe(self) -> str:
        return self.group.describe()

    def __str__(self) -> str:
        return self.describe()

    def spans(self, vectors: Iterable[Sequence[int]]) -> bool:
        """Whether the given coordinate vectors generate the whole group."""
        q = quotient(self.invariant_factors, [list(v) for v in vectors])
        return q.is_trivial()


@dataclass
class KInvariant:
    """``pi0 (x) Z/2 -> pi1``, one row per ``Z/2`` generator of the domain."""

    source_indices: List[int]
    rows: List[Tuple[int, ...]]
    pi0: HomotopyGroup
    pi1: HomotopyGroup

    def is_zero(self) -> bool:
        return all(not any(r) for r in self.rows)

    def is_surjective(self) -> bool:
        return self.pi1.spans(self.rows)

    def matrix(self) -> List[List[int]]:
        return [list(r) for r in self.rows]


class SquadPresentation:
    """Stable quadratic module given by generators and relators."""

    def __init__(self, free: FreeSquad, r0: Sequence[CElem] = (), r1: Sequence[CElem] = (),
                 r0_labels: Optional[Sequence[str]] = None, r1_labels: Optional[Sequence[str]] = None):
        self.free = free
        self.R0 = list(r0)
        self.R1 = list(r1)
        self.r0_labels = list(r0_labels) if r0_labels is not None else [f"r0[{i}]" for i in range(len(self.R0))]
        self.r1_labels = list(r1_labels) if r1_labels is not None else [f"r1[{i}]" for i in range(len(self.R1))]
        self._cache = _Cache()

    @classmethod
    def build(cls, e0: Iterable[str], e1: Iterable[str], r0: Iterable = (), r1: Iterable = ()) -> "SquadPresentation":
        """Build from serialized relator terms (see :meth:`FreeSquad.load0`)."""
        free = FreeSquad(e0, e1)
        return cls(free, [free.load0(t) for t in r0], [free.load1(t) for t in r1])

    # -- relator lattices ------------------------------------------------------------
    @property
    def N0(self) -> NormalSubgroup:
        return self._cache.get("N0", lambda: NormalSubgroup(
            self.free.F0, self.R0 + [self.free.boundary(r) for r in self.R1]))

    @property
    def N0_base(self) -> NormalSubgroup:
        """Normal closure of ``R0`` alone, used to test consistency."""
        return self._cache.get("N0b", lambda: NormalSubgroup(self.free.F0, self.R0))

    @property
    def N1(self) -> NormalSubgroup:
        def make():
            fr = self.free
            gens = list(self.R1)
            for h in self.N0.lifts():
                for g in range(fr.k0):
                    b = fr.bracket(fr.F0.gen(g), h)
                    if b.cen:
                        gens.append(b)
            return NormalSubgroup(fr.F1, gens)
        return self._cache.get("N1", make)

    def inconsistent_relators(self) -> List[str]:
        """Labels of ``r`` in ``R1`` with ``dr`` outside the closure of ``R0``."""
        base = self.N0_base
        return [lab for r, lab in zip(self.R1, self.r1_labels) if not base.contains(self.free.boundary(r))]

    def is_consistent(self) -> bool:
        return not self.inconsistent_relators()

    def require_consistent(self) -> None:
        bad = self.inconsistent_relators()
        if bad:
            raise InconsistentPresentation(f"boundary of {bad[0]} is not a consequence of R0", bad[0])

    # -- word problems -----------------------------------------------------------------
    def eq0(self, x: CElem, y: CElem) -> bool:
        return self.N0.contains(self.free.F0.sub(x, y))

    def eq1(self, x: CElem, y: CElem) -> bool:
        return self.N1.contains(self.free.F1.sub(x, y))

    # -- homotopy groups -----------------------------------------------------------------
    def pi0(self) -> HomotopyGroup:
        def make():
            self.require_consistent()
            fr = self.free
            rels = [h.top for h in self.N0.lifts()]
            rels += [{fr.n0 + a: 1} for a in range(fr.n1)]
            G = FpAbelianGroup.from_relations(fr.k0, rels)
            reps = [fr.F0.make({i: v for i, v in enumerate(g) if v}, {}) for g in G.generators()]
            return HomotopyGroup(G, reps, lambda x: G.coordinates(x.top))
        return self._cache.get("pi0", make)

    def _kernel_data(self):
        """Lattice data describing ``K = d^{-1}(N0)`` inside F1."""
        def make():
            fr = self.free
            F0, F1 = fr.F0, fr.F1
            n0 = fr.n0
            N0 = self.N0
            wrows, xs = [], []
            for c in N0.top_pivots():
                if c < n0:
                    continue
                h = N0._rows[c]
                w = {k - n0: v for k, v in h.top.items()}
                x = F1.make(w, {})
                d = F0.sub(fr.boundary(x), h)
                assert not d.top
                z = fr.d_inverse_central({k: -v for k, v in d.cen.items()})
                xs.append(F1.add(x, F1.central(z)))
                wrows.append(w)
            W = Lattice(fr.n1, None, wrows, track=True)
            zbasis = [fr.d_inverse_central(r) for r in N0.central.free_basis()]
            Z = Lattice(len(F1.central_moduli), None, zbasis, track=True)
            return xs, W, zbasis, Z
        return self._cache.get("K", make)

    def kernel_coordinates(self, y: CElem) -> Optional[List[int]]:
        """Coordinates of ``y`` in ``d^{-1}(N0)``, or ``None`` when ``dy`` is not in ``N0``."""
        fr = self.free
        F1 = fr.F1
        xs, W, zbasis, Z = self._kernel_data()
        k = W.solve(y.top) if y.top else [0] * len(xs)
        if k is None:
            return None
        z = y
        for ks, x in zip(k, xs):
            if ks:
                z = F1.sub(z, F1.mul(x, ks))
        if z.top:
            return None
        nondiag = {i: v for i, v in z.cen.items() if not fr.is_diag(i)}
        c = Z.solve(nondiag) if nondiag else [0] * len(zbasis)
        if c is None:
            return None
        diag = [z.cen.get(fr.DG + i, 0) % 2 for i in range(fr.n0)]
        return list(k) + list(c) + diag

    def pi1(self) -> HomotopyGroup:
        def make():
            self.require_consistent()
            fr = self.free
            F1 = fr.F1
            xs, W, zbasis, Z = self._kernel_data()
            r, b = len(xs), len(zbasis)
            moduli = [0] * (r + b) + [2] * fr.n0
            rels = []
            for g in self.N1.generators():
                v = self.kernel_coordinates(g)
                if v is None:
                    raise InconsistentPresentation("a degree-1 relator has boundary outside N0", g)
                rels.append(v)
            for s in range(r):
                for t in range(s + 1, r):
                    c = F1.comm(xs[s], xs[t])
                    if c.cen:
                        rels.append(self.kernel_coordinates(c))
            G = quotient(moduli, rels)

            def rep(vec):
                out = F1.zero()
                for ks, x in zip(vec[:r], xs):
                    if ks:
                        out = F1.add(out, F1.mul(x, ks))
                cen: Dict[int, int] = {}
                for cb, row in zip(vec[r:r + b], zbasis):
                    if cb:
                        for kk, vv in row.items():
                            cen[kk] = cen.get(kk, 0) + cb * vv
                for i, dv in enumerate(vec[r + b:]):
                    if dv:
                        cen[fr.DG + i] = cen.get(fr.DG + i, 0) + dv
                return F1.add(out, F1.central(cen))

            def coords(x):
                v = self.kernel_coordinates(x)
                if v is None:
                    raise ValueError("element is not a cycle: its boundary is nonzero in C0")
                return G.coordinates(v)

            return HomotopyGroup(G, [rep(g) for g in G.generators()], coords)
        return self._cache.get("pi1", make)

    def k_invariant(self) -> KInvariant:
        def make():
            fr = self.free
            p0, p1 = self.pi0(), self.pi1()
            idx, rows = [], []
            for i, (f, x) in enumerate(zip(p0.invariant_factors, p0.representatives)):
                if f % 2:
                    continue
                val = p1.coordinates(fr.bracket(x, x))
                # well-definedness: shift the representative by relators and boundaries
                shifts = list(self.N0.lifts()) + [fr.de1(e) for e in fr.E1.names]
                for n in shifts:
                    y = fr.F0.add(x, n)
                    if p1.coordinates(fr.bracket(y, y)) != val:
                        raise CheckFailure("k-invariant depends on the representative", n)
                idx.append(i)
                rows.append(val)
            return KInvariant(idx, rows, p0, p1)
        return self._cache.get("k", make)

    # -- serialization ----------------------------------------------------------------
    def to_json(self) -> dict:
        fr = self.free
        return {
            "e0": list(fr.E0.names),
            "e1": list(fr.E1.names),
            "r0": [fr.dump0(r) for r in self.R0],
            "r1": [fr.dump1(r) for r in self.R1],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SquadPresentation":
        if not isinstance(data, dict) or "e0" not in data:
            raise SchemaError("presentation JSON needs keys e0, e1, r0, r1")
        return cls.build(data.get("e0", []), data.get("e1", []), data.get("r0", []), data.get("r1", []))


# ---------------------------------------------------------------- morphisms

class SquadMorphism:
    """Morphism of presentations given by images of the generators.

    The image of the formal symbol ``d e1`` is forced to be ``d f1(e1)``.
    """

    def __init__(self, source: SquadPresentation, target: SquadPresentation,
                 images0: Mapping[str, CElem], images1: Mapping[str, CElem]):
        self.source, self.target = source, target
        sf, tf = source.free, target.free
        missing = [e for e in sf.E0.names if e not in images0] + [e for e in sf.E1.names if e not in images1]
        if missing:
            raise SchemaError(f"morphism misses generator images: {missing[:5]}")
        self.images0 = dict(images0)
        self.images1 = dict(images1)
        self._g0 = [images0[e] for e in sf.E0.names] + [tf.boundary(images1[e]) for e in sf.E1.names]
        self._g1 = [images1[e] for e in sf.E1.names]
        self._pair0: Dict[int, CElem] = {}

    @classmethod
    def identity(cls, P: SquadPresentation) -> "SquadMorphism":
        fr = P.free
        return cls(P, P, {e: fr.e0(e) for e in fr.E0.names}, {e: fr.e1(e) for e in fr.E1.names})

    def f0(self, x: CElem) -> CElem:
        F0t = self.target.free.F0
        out = F0t.zero()
        g0 = self._g0
        for i in sorted(x.top):
            out = F0t.add(out, F0t.mul(g0[i], x.top[i]))
        for k, c in x.cen.items():
            i, j = _pair_of(k)
            # [g_j, g_i]
            out = F0t.add(out, F0t.mul(F0t.comm(g0[j], g0[i]), c))
        return out

    def f1(self, x: CElem) -> CElem:
        sf, tf = self.source.free, self.target.free
        F1t = tf.F1
        out = F1t.zero()
        for a in sorted(x.top):
            out = F1t.add(out, F1t.mul(self._g1[a], x.top[a]))
        g0 = self._g0
        n0, n1 = sf.n0, sf.n1
        cen = F1t.zero()
        for k, c in x.cen.items():
            if k < sf.DG:
                i, j = _pair_of(k)
                v = tf.bracket(g0[i], g0[j])
            elif k < sf.M:
                i = k - sf.DG
                v = tf.bracket(g0[i], g0[i])
            elif k < sf.W:
                i, a = divmod(k - sf.M, n1)
                v = tf.bracket(g0[i], g0[n0 + a])
            else:
                a, b = _pair_of(k - sf.W)
                v = F1t.comm(self._g1[b], self._g1[a])
            cen = F1t.add(cen, F1t.mul(v, c))
        return F1t.add(out, cen)

    def violations(self) -> List[str]:
        """Relators whose images are nonzero in the target, by label."""
        P, Q = self.source, self.target
        bad = []
        for r, lab in zip(P.R0, P.r0_labels):
            if not Q.N0.contains(self.f0(r)):
                bad.append(lab)
        for r, lab in zip(P.R1, P.r1_labels):
            if not Q.N1.contains(self.f1(r)):
                bad.append(lab)
        # compatibility with the structure maps on generators
        sf, tf = P.free, Q.free
        for e in sf.E1.names:
            if not Q.eq0(tf.boundary(self.f1(sf.e1(e))), self.f0(sf.de1(e))):
                bad.append(f"boundary:{e}")
        for i in range(sf.k0):
            for j in range(sf.k0):
                gi, gj = sf.F0.gen(i), sf.F0.gen(j)
                if not Q.eq1(self.f1(sf.bracket(gi, gj)), tf.bracket(self.f0(gi), self.f0(gj))):
                    bad.append(f"bracket:{sf.name0(i)},{sf.name0(j)}")
        return bad

    def check(self) -> bool:
        return not self.violations()

    def require(self) -> None:
        bad = self.violations()
        if bad:
            raise CheckFailure(f"morphism law fails at {bad[0]}", bad[0])

    def compose(self, other: "SquadMorphism") -> "SquadMorphism":
        """``self ∘ other`` (apply ``other`` first)."""
        if other.target is not self.source and other.target.to_json() != self.source.to_json():
            raise SchemaError("morphisms are not composable")
        sf = other.source.free
        return SquadMorphism(other.source, self.target,
                             {e: self.f0(other.f0(sf.e0(e))) for e in sf.E0.names},
                             {e: self.f1(other.f1(sf.e1(e))) for e in sf.E1.names})

    def induced_pi0(self) -> List[List[int]]:
        """Matrix with one row per source generator, in target coordinates."""
        a, b = self.source.pi0(), self.target.pi0()
        return [list(b.coordinates(self.f0(x))) for x in a.representatives]

    def induced_pi1(self) -> List[List[int]]:
        a, b = self.source.pi1(), self.target.pi1()
        return [list(b.coordinates(self.f1(x))) for x in a.representatives]


def compose_morphisms(g: SquadMorphism, f: SquadMorphism) -> SquadMorphism:
    return g.compose(f)


def check_morphism(f: SquadMorphism) -> bool:
    return f.check()


def _pair_of(k: int) -> Tuple[int, int]:
    # inverse of _pidx
    j = int(((8 * k + 1) ** 0.5 + 1) // 2)
    while j * (j - 1) // 2 > k:
        j -= 1
    while (j + 1) * j // 2 <= k:
        j += 1
    return k - j * (j - 1) // 2, j


# ---------------------------------------------------------------- homotopies

class Homotopy:
    """Homotopy ``alpha: f => g`` between morphisms with common source and target.

    ``values`` gives ``alpha`` on degree-0 generators.  Values on the formal
    symbols ``d e1`` default to ``-f1(e1) + g1(e1)``, the only choice that
    satisfies the third law.
    """

    def __init__(self, f: SquadMorphism, g: SquadMorphism, values: Mapping[str, CElem],
                 boundary_values: Optional[Mapping[str, CElem]] = None):
        if f.source is not g.source or f.target is not g.target:
            if f.source.to_json() != g.source.to_json() or f.target.to_json() != g.target.to_json():
                raise SchemaError("homotopy needs parallel morphisms")
        self.f, self.g = f, g
        sf = f.source.free
        F1t = f.target.free.F1
        missing = [e for e in sf.E0.names if e not in values]
        if missing:
            raise SchemaError(f"homotopy misses values on {missing[:5]}")
        self.values = dict(values)
        bv = dict(boundary_values or {})
        self._gen: List[CElem] = [values[e] for e in sf.E0.names]
        for e in sf.E1.names:
            forced = F1t.add(F1t.neg(f.f1(sf.e1(e))), g.f1(sf.e1(e)))
            self._gen.append(bv.get(e, forced))
        self.boundary_values = {e: self._gen[sf.n0 + a] for a, e in enumerate(sf.E1.names)}

    @classmethod
    def zero(cls, f: SquadMorphism) -> "Homotopy":
        F1t = f.target.free.F1
        return cls(f, f, {e: F1t.zero() for e in f.source.free.E0.names})

    def _delta(self, x: CElem) -> CElem:
        F0t = self.f.target.free.F0
        return F0t.add(F0t.neg(self.f.f0(x)), self.g.f0(x))

    def __call__(self, x: CElem) -> CElem:
        """Evaluate on a degree-0 element via the first homotopy law."""
        sf = self.f.source.free
        tf = self.f.target.free
        F0s, F1t = sf.F0, tf.F1
        acc0 = F0s.zero()
        acc1 = F1t.zero()
        for letter in _letters(F0s, x):
            i, s = letter
            gl = F0s.gen(i, s)
            if s > 0:
                a = self._gen[i]
            else:
                g = F0s.gen(i)
                corr = tf.bracket(self.f.f0(gl), self._delta(g))
                a = F1t.neg(F1t.add(self._gen[i], corr))
            corr = tf.bracket(self.f.f0(gl), self._delta(acc0))
            acc1 = F1t.add(F1t.add(acc1, a), corr)
            acc0 = F0s.add(acc0, gl)
        return acc1

    def violations(self) -> List[str]:
        f, g = self.f, self.g
        P, Q = f.source, f.target
        sf, tf = P.free, Q.free
        bad = []
        for i in range(sf.k0):
            x = sf.F0.gen(i)
            if not Q.eq0(g.f0(x), tf.F0.add(f.f0(x), tf.boundary(self(x)))):
                bad.append(f"law2:{sf.name0(i)}")
        for e in sf.E1.names:
            y = sf.e1(e)
            if not Q.eq1(g.f1(y), tf.F1.add(f.f1(y), self(sf.boundary(y)))):
                bad.append(f"law3:{e}")
        for r, lab in zip(P.R0, P.r0_labels):
            if not Q.N1.contains(self(r)):
                bad.append(f"relator:{lab}")
        for r, lab in zip(P.R1, P.r1_labels):
            if not Q.eq1(g.f1(r), tf.F1.add(f.f1(r), self(sf.boundary(r)))):
                bad.append(f"law3:{lab}")
        return bad

    def check(self) -> bool:
        return not self.violations()

    def require(self) -> None:
        bad = self.violations()
        if bad:
            raise CheckFailure(f"homotopy law fails at {bad[0]}", bad[0])


def _letters(law: Nil2Group, x: CElem) -> List[Tuple[int, int]]:
    """A word of unit letters ``(generator, +-1)`` evaluating to ``x``."""
    out: List[Tuple[int, int]] = []
    for i in sorted(x.top):
        a = x.top[i]
        out += [(i, 1 if a > 0 else -1)] * abs(a)
    for k in sorted(x.cen):
        i, j = _pair_of(k)
        c = x.cen[k]
        # [g_j, g_i] = -g_j - g_i + g_j + g_i and its inverse
        word = [(j, -1), (i, -1), (j, 1), (i, 1)] if c > 0 else [(i, -1), (j, -1), (i, 1), (j, 1)]
        out += word * abs(c)
    return out


def check_homotopy(alpha: Homotopy) -> bool:
    return alpha.check()


def compose_vertical(beta: Homotopy, alpha: Homotopy) -> Homotopy:
    """``(beta □ alpha)(x) = alpha(x) + beta(x)`` for ``alpha: f => g``, ``beta: g => h``."""
    F1t = alpha.f.target.free.F1
    sf = alpha.f.source.free
    vals = {e: F1t.add(alpha.values[e], beta.values[e]) for e in sf.E0.names}
    bvals = {e: F1t.add(alpha.boundary_values[e], beta.boundary_values[e]) for e in sf.E1.names}
    return Homotopy(alpha.f, beta.g, vals, bvals)


def whisker_left(h: SquadMorphism, alpha: Homotopy) -> Homotopy:
    """``h alpha: hf => hg``, given by ``h1 ∘ alpha``."""
    sf = alpha.f.source.free
    return Homotopy(h.compose(alpha.f), h.compose(alpha.g),
                    {e: h.f1(v) for e, v in alpha.values.items()},
                    {e: h.f1(v) for e, v in alpha.boundary_values.items()})


def whisker_right(alpha: Homotopy, k: SquadMorphism) -> Homotopy:
    """``alpha k: fk => gk``, given by ``alpha ∘ k0``."""
    sf = k.source.free
    return Homotopy(alpha.f.compose(k), alpha.g.compose(k),
                    {e: alpha(k.f0(sf.e0(e))) for e in sf.E0.names},
                    {e: alpha(k.f0(sf.de1(e))) for e in sf.E1.names})
