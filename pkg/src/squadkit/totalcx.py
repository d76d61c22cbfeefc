"""The nerve of ``wS.C`` in low degrees and its total crossed-complex presentation.

Cells of ``X = Ner wS.C`` are stored as ``(flags, maps)``:

* a *flag* of length ``m`` is ``(objs, cofs)`` with ``objs = (A_1, ..., A_m)``
  and ``cofs = (j_1, ..., j_{m-1})``, ``j_i: A_i >-> A_{i+1}``; quotients
  ``A_k / A_i`` are read off the cofiber table (the choice function);
* a cell of ``X_{m,n}`` is a string of ``n`` levelwise weak equivalences
  between ``n + 1`` flags of length ``m``; ``maps[k]`` is the tuple of
  components ``(w_1, ..., w_m)``.

Only cells with ``m + n <= 3`` are built.  Degree one and two cells give
generators, degree three cells give relators ``d3 x = 0`` in which the
crossed-module actions are rewritten by ``m^n = m + <n, dm>``.  The bracket
on degree one generators comes from the shuffle map composed with the
coproduct.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import CheckFailure, SchemaError
from .nil2 import CElem
from .squad import FreeSquad, SquadPresentation
from .waldcat import FiniteWaldhausenCategory, cname, d_star, wname

Flag = Tuple[Tuple[str, ...], Tuple[str, ...]]
Cell = Tuple[Tuple[Flag, ...], Tuple[Tuple[str, ...], ...]]

POINT: Flag = ((), ())
WINDOW = [(m, n) for m in range(4) for n in range(4) if m + n <= 3]


class TruncatedBisimplicialSet:
    """``Ner wS.C`` restricted to bidegrees ``m + n <= 3``."""

    def __init__(self, C: FiniteWaldhausenCategory, jobs: int = 1):
        self.C = C
        self.jobs = max(1, jobs)
        self._wes = set(C.weak_equivalences)
        self.cells: Dict[Tuple[int, int], List[Cell]] = {}
        self._build()

    # -- flags ------------------------------------------------------------------------
    def _quotient(self, flag: Flag, i: int, k: int) -> Tuple[str, str]:
        """``(A_k / A_i, A_k ->> A_k / A_i)`` for ``1 <= i < k``."""
        objs, cofs = flag
        j = self.C.comp_chain(*reversed(cofs[i - 1:k - 1])) if k - i > 1 else cofs[i - 1]
        t = self.C.triple(j)
        return t.quotient_object, t.quotient_morphism

    def flag_face(self, flag: Flag, i: int) -> Flag:
        objs, cofs = flag
        m = len(objs)
        C = self.C
        if m == 0:
            raise ValueError("no faces of the point")
        if i == 0:
            if m == 1:
                return POINT
            if m == 2:
                return ((self._quotient(flag, 1, 2)[0],), ())
            if m == 3:
                u, _ = C.induced_quotient_cofibration(cofs[0], cofs[1])
                return ((C.src(u), C.dst(u)), (u,))
            raise ValueError("flag outside the window")
        if i == m:
            return objs[:-1], cofs[:-1]
        if i == 1:
            return objs[1:], cofs[1:]
        # 1 < i < m: compose around A_i
        merged = C.comp(cofs[i - 1], cofs[i - 2])
        return objs[:i - 1] + objs[i:], cofs[:i - 2] + (merged,) + cofs[i:]

    def flag_degeneracy(self, flag: Flag, i: int) -> Flag:
        objs, cofs = flag
        C = self.C
        if i == 0:
            if not objs:
                return (C.zero,), ()
            return (C.zero,) + objs, (C.zero_map(C.zero, objs[0]),) + cofs
        a = objs[i - 1]
        return objs[:i] + objs[i - 1:], cofs[:i - 1] + (C.identity[a],) + cofs[i - 1:]

    # -- levelwise maps ---------------------------------------------------------------
    def _induced(self, src: Flag, dst: Flag, ws: Tuple[str, ...], k: int) -> str:
        """The map ``A_k / A_1 -> A'_k / A'_1`` induced by ``w_k``."""
        C = self.C
        qo, qm = self._quotient(src, 1, k)
        qo2, qm2 = self._quotient(dst, 1, k)
        target = C.comp(qm2, ws[k - 1])
        hits = [t for t in C.hom(qo, qo2) if C.comp(t, qm) == target]
        if len(hits) != 1:
            raise SchemaError(f"unresolvable quotient choice for {src} -> {dst}")
        return hits[0]

    def map_face(self, src: Flag, dst: Flag, ws: Tuple[str, ...], i: int) -> Tuple[str, ...]:
        if i == 0:
            return tuple(self._induced(src, dst, ws, k) for k in range(2, len(ws) + 1))
        return ws[:i - 1] + ws[i:]

    def map_degeneracy(self, ws: Tuple[str, ...], i: int) -> Tuple[str, ...]:
        if i == 0:
            return (self.C.identity[self.C.zero],) + ws
        return ws[:i] + ws[i - 1:]

    # -- cells --------------------------------------------------------------------------
    def d_h(self, x: Cell, i: int) -> Cell:
        flags, maps = x
        nf = tuple(self.flag_face(f, i) for f in flags)
        nm = tuple(self.map_face(flags[k], flags[k + 1], w, i) for k, w in enumerate(maps))
        return nf, nm

    def s_h(self, x: Cell, i: int) -> Cell:
        flags, maps = x
        return tuple(self.flag_degeneracy(f, i) for f in flags), tuple(self.map_degeneracy(w, i) for w in maps)

    def d_v(self, x: Cell, j: int) -> Cell:
        flags, maps = x
        n = len(maps)
        if j == 0:
            return flags[1:], maps[1:]
        if j == n:
            return flags[:-1], maps[:-1]
        comp = tuple(self.C.comp(b, a) for a, b in zip(maps[j - 1], maps[j]))
        return flags[:j] + flags[j + 1:], maps[:j - 1] + (comp,) + maps[j + 1:]

    def s_v(self, x: Cell, j: int) -> Cell:
        flags, maps = x
        ident = tuple(self.C.identity[a] for a in flags[j][0])
        return flags[:j + 1] + flags[j:], maps[:j] + (ident,) + maps[j:]

    @staticmethod
    def bidegree(x: Cell) -> Tuple[int, int]:
        flags, maps = x
        return len(flags[0][0]), len(maps)

    def is_degenerate(self, x: Cell) -> bool:
        m, n = self.bidegree(x)
        if any(self.s_h(self.d_h(x, i), i) == x for i in range(m)):
            return True
        return any(self.s_v(self.d_v(x, j), j) == x for j in range(n))

    # -- enumeration --------------------------------------------------------------------
    def _flags(self, m: int) -> List[Flag]:
        C = self.C
        if m == 0:
            return [POINT]
        if m == 1:
            return [((a,), ()) for a in C.objects]
        out = []
        for js in itertools.product(C.cofibrations, repeat=m - 1):
            if all(C.src(js[k + 1]) == C.dst(js[k]) for k in range(m - 2)):
                objs = (C.src(js[0]),) + tuple(C.dst(j) for j in js)
                out.append((objs, js))
        return out

    def _morphisms_from(self, a: Flag, flags_by_shape) -> List[Tuple[Flag, Tuple[str, ...]]]:
        """Levelwise weak equivalences out of ``a`` (commuting squares and quotients)."""
        C = self.C
        objs, cofs = a
        m = len(objs)
        out = []
        for b in flags_by_shape:
            if len(b[0]) != m:
                continue
            choices = [[w for w in C.hom(objs[k], b[0][k]) if w in self._wes] for k in range(m)]
            for ws in itertools.product(*choices):
                if any(C.comp(b[1][k], ws[k]) != C.comp(ws[k + 1], cofs[k]) for k in range(m - 1)):
                    continue
                try:
                    quots = [self._induced(a, b, ws, k) for k in range(2, m + 1)]
                except SchemaError:
                    continue
                if all(q in self._wes for q in quots):
                    out.append((b, ws))
        return out

    def _build(self) -> None:
        for m in range(4):
            self.cells[(m, 0)] = [((f,), ()) for f in self._flags(m)]
        self.cells[(0, 1)] = [((POINT, POINT), ((),))]
        self.cells[(0, 2)] = [((POINT, POINT, POINT), ((), ()))]
        self.cells[(0, 3)] = [((POINT,) * 4, ((), (), ()))]
        for m in (1, 2):
            flags = self._flags(m)
            if self.jobs > 1:
                with ThreadPoolExecutor(max_workers=self.jobs) as ex:
                    outs = list(ex.map(lambda f: self._morphisms_from(f, flags), flags))
            else:
                outs = [self._morphisms_from(f, flags) for f in flags]
            one = [((a, b), (ws,)) for a, out in zip(flags, outs) for b, ws in out]
            self.cells[(m, 1)] = one
        # composable pairs of weak equivalences
        by_src: Dict[Flag, List[Cell]] = {}
        for x in self.cells[(1, 1)]:
            by_src.setdefault(x[0][0], []).append(x)
        two = []
        for x in self.cells[(1, 1)]:
            for y in by_src.get(x[0][1], []):
                two.append(((x[0][0], x[0][1], y[0][1]), (x[1][0], y[1][0])))
        self.cells[(1, 2)] = two

    def size(self, m: int, n: int) -> int:
        return len(self.cells[(m, n)])

    # -- checks -------------------------------------------------------------------------
    def identity_violations(self) -> List[str]:
        """Simplicial identities on every cell of the window."""
        bad = []
        for (m, n), xs in sorted(self.cells.items()):
            for x in xs:
                for i in range(m + 1):
                    for j in range(i + 1, m + 1):
                        if m >= 2 and self.d_h(self.d_h(x, j), i) != self.d_h(self.d_h(x, i), j - 1):
                            bad.append(f"d{i}h d{j}h at {x}")
                    if m >= 1:
                        for j in range(n + 1):
                            if n >= 1 and self.d_h(self.d_v(x, j), i) != self.d_v(self.d_h(x, i), j):
                                bad.append(f"d{i}h d{j}v at {x}")
                for i in range(n + 1):
                    for j in range(i + 1, n + 1):
                        if n >= 2 and self.d_v(self.d_v(x, j), i) != self.d_v(self.d_v(x, i), j - 1):
                            bad.append(f"d{i}v d{j}v at {x}")
                if m + n <= 2:
                    for i in range(m + 1):
                        y = self.s_h(x, i)
                        if self.d_h(y, i) != x or self.d_h(y, i + 1) != x:
                            bad.append(f"d s{i}h at {x}")
                    for j in range(n + 1):
                        y = self.s_v(x, j)
                        if self.d_v(y, j) != x or self.d_v(y, j + 1) != x:
                            bad.append(f"d s{j}v at {x}")
            if (m, n) != (0, 0) and m == 0 and len(xs) != 1:
                bad.append(f"X_0,{n} is not a point")
        return bad


def nerve_wS(C: FiniteWaldhausenCategory, jobs: int = 1) -> TruncatedBisimplicialSet:
    X = TruncatedBisimplicialSet(C, jobs)
    bad = X.identity_violations()
    if bad:
        raise CheckFailure(f"simplicial identity fails: {bad[0]}", bad[0])
    return X


# ---------------------------------------------------------------- crossed module presentation

@dataclass
class Term:
    """``sign * gen^act`` (``act`` a degree-one word) or ``<left, right>``."""
    sign: int
    gen: Optional[str] = None
    act: Tuple[Tuple[int, str], ...] = ()
    bracket: Optional[Tuple[Tuple[Tuple[int, str], ...], Tuple[Tuple[int, str], ...]]] = None


@dataclass
class CrossedModulePresentation:
    """Degree-one and degree-two generators, boundaries as words, relators as term lists.

    Words are tuples of ``(sign, degree-one generator)``.  A generator equal to
    ``None`` in a word stands for the basepoint and is dropped.
    """
    gens1: List[str]
    gens2: List[str]
    boundary: Dict[str, Tuple[Tuple[int, str], ...]]
    relators: List[Tuple[str, str, List[Term]]] = field(default_factory=list)   # (family, label, terms)
    boundary_family: Dict[str, str] = field(default_factory=dict)


def _cell_gen(X: TruncatedBisimplicialSet, x: Cell) -> Optional[str]:
    """Dictionary from low cells to generator names; ``None`` for the basepoint."""
    m, n = X.bidegree(x)
    flags, maps = x
    if (m, n) == (1, 0):
        a = flags[0][0][0]
        return None if a == X.C.zero else a
    if (m, n) == (1, 1):
        return wname(maps[0][0])
    if (m, n) == (2, 0):
        return cname(flags[0][1][0])
    raise ValueError(f"no generator in bidegree {(m, n)}")


def total_presentation(X: TruncatedBisimplicialSet) -> CrossedModulePresentation:
    """Generators, boundaries and degree-three relators of the total crossed complex (after psi)."""
    g = lambda x: _cell_gen(X, x)

    def word(*terms):
        return tuple((s, name) for s, name in terms if name is not None)

    gens1 = [g(x) for x in X.cells[(1, 0)] if not X.is_degenerate(x)]
    gens2, boundary, fam = [], {}, {}
    for x in X.cells[(1, 1)]:
        e = g(x)
        gens2.append(e)
        boundary[e] = word((-1, g(X.d_v(x, 0))), (1, g(X.d_v(x, 1))))
        fam[e] = "d x11"
    for x in X.cells[(2, 0)]:
        e = g(x)
        gens2.append(e)
        boundary[e] = word((-1, g(X.d_h(x, 1))), (1, g(X.d_h(x, 0))), (1, g(X.d_h(x, 2))))
        fam[e] = "d x20"
    P = CrossedModulePresentation(gens1, gens2, boundary, boundary_family=fam)
    for x in X.cells[(1, 1)] + X.cells[(2, 0)]:
        if X.is_degenerate(x):
            famname = "degenerate x11" if X.bidegree(x) == (1, 1) else "degenerate x20"
            P.relators.append((famname, g(x), [Term(1, g(x))]))
    for x in X.cells[(1, 2)]:
        terms = [Term(-1, g(X.d_v(x, 2))), Term(-1, g(X.d_v(x, 0))), Term(1, g(X.d_v(x, 1)))]
        P.relators.append(("d x12", " ; ".join(x[1][k][0] for k in range(2)), terms))
    for x in X.cells[(2, 1)]:
        act = word((1, g(X.d_h(X.d_v(x, 1), 2))))
        terms = [Term(1, g(X.d_h(x, 2))), Term(1, g(X.d_h(x, 0)), act),
                 Term(-1, g(X.d_v(x, 1))), Term(-1, g(X.d_h(x, 1))), Term(1, g(X.d_v(x, 0)))]
        P.relators.append(("d x21", f"{x[0][0][1][0]} => {x[0][1][1][0]} via {','.join(x[1][0])}", terms))
    for x in X.cells[(3, 0)]:
        d2 = X.d_h(x, 2)
        act = word((1, g(X.d_h(d2, 2))))
        terms = [Term(1, g(d2)), Term(1, g(X.d_h(x, 0)), act), Term(-1, g(X.d_h(x, 3))), Term(-1, g(X.d_h(x, 1)))]
        P.relators.append(("d x30", " then ".join(x[0][0][1]), terms))
    C = X.C
    seen = set()
    for a in C.e0_names():
        for b in C.e0_names():
            if frozenset((a, b)) in seen or C.coproduct(a, b) is None:
                continue
            seen.add(frozenset((a, b)))
            br = Term(1, bracket=(((1, a),), ((1, b),)))
            P.relators.append(("shuffle", f"{a} v {b}", [br] + [Term(-s, e) for s, e in shuffle_terms(X, a, b)]))
    return P


def _wedge_flag(C: FiniteWaldhausenCategory, f: Flag, h: Flag) -> Flag:
    objs = []
    for a, b in zip(f[0], h[0]):
        cp = C.coproduct(a, b)
        if cp is None:
            raise SchemaError(f"missing coproduct {a} v {b}")
        objs.append(cp)
    cofs = []
    for k, (j1, j2) in enumerate(zip(f[1], h[1])):
        s, t = objs[k], objs[k + 1]
        want1, want2 = C.comp(t.i1, j1), C.comp(t.i2, j2)
        hits = [u for u in C.hom(s.obj, t.obj) if C.comp(u, s.i1) == want1 and C.comp(u, s.i2) == want2]
        if len(hits) != 1:
            raise SchemaError(f"coproduct of {j1} and {j2} not determined")
        cofs.append(hits[0])
    return tuple(cp.obj for cp in objs), tuple(cofs)


def shuffle_terms(X: TruncatedBisimplicialSet, a: str, b: str) -> List[Tuple[int, str]]:
    """``-(s0 A v s1 B) + (s1 A v s0 B)`` as signed degree-two generators."""
    C = X.C
    fa, fb = ((a,), ()), ((b,), ())
    left = _wedge_flag(C, X.flag_degeneracy(fa, 0), X.flag_degeneracy(fb, 1))
    right = _wedge_flag(C, X.flag_degeneracy(fa, 1), X.flag_degeneracy(fb, 0))
    return [(-1, cname(left[1][0])), (1, cname(right[1][0]))]


def shuffle_bracket(X: TruncatedBisimplicialSet, fr: FreeSquad, a: str, b: str) -> CElem:
    """The shuffle bracket ``<[a], [b]>`` as an element of the degree-two free group."""
    if a == X.C.zero or b == X.C.zero:
        return fr.F1.zero()
    out = fr.F1.zero()
    for s, e in shuffle_terms(X, a, b):
        x = fr.e1(e)
        out = fr.F1.add(out, x if s > 0 else fr.F1.neg(x))
    return out


# ---------------------------------------------------------------- reflection and comparison

def phi_reflect(P: CrossedModulePresentation, fr: Optional[FreeSquad] = None) -> SquadPresentation:
    """Rewrite actions through the bracket and pass to the free stable quadratic module."""
    if fr is None:
        fr = FreeSquad(P.gens1, P.gens2)
    F0, F1 = fr.F0, fr.F1

    def w0(ws):
        out = F0.zero()
        for s, e in ws:
            out = F0.add(out, fr.e0(e) if s > 0 else F0.neg(fr.e0(e)))
        return out

    r0, l0 = [], []
    for e in P.gens2:
        r0.append(F0.sub(fr.de1(e), w0(P.boundary[e])))
        l0.append(f"{P.boundary_family[e]}: {e}")
    r1, l1 = [], []
    for famname, label, terms in P.relators:
        out = F1.zero()
        for t in terms:
            if t.bracket is not None:
                v = fr.bracket(w0(t.bracket[0]), w0(t.bracket[1]))
            else:
                v = fr.e1(t.gen)
                if t.act:
                    # m^n = m + <n, dm>, with dm the boundary word of m
                    v = F1.add(v, fr.bracket(w0(t.act), w0(P.boundary[t.gen])))
            out = F1.add(out, v if t.sign > 0 else F1.neg(v))
        r1.append(out)
        l1.append(f"{famname}: {label}")
    Q = SquadPresentation(fr, r0, r1, l0, l1)
    bad = [e for e in fr.E0.names for f in fr.E0.names
           if fr.boundary(fr.bracket(fr.e0(e), fr.e0(f))) != F0.comm(fr.e0(f), fr.e0(e))]
    if bad:
        raise CheckFailure(f"bracket law fails at {bad[0]}", bad[0])
    return Q


# which nerve family reproduces which D+ relation family
FAMILY_OF_RELATION = {
    "1": "d x11", "2": "d x20", "3": "degenerate x10", "4": "degenerate x11",
    "5": "degenerate x20", "6": "d x12", "7": "d x21", "8": "d x30", "9": "shuffle",
}


@dataclass
class IdentifyReport:
    category: str
    generators_match: bool
    n0_equal: bool
    n1_equal: bool
    provenance: List[dict]
    first_mismatch: Optional[str] = None
    cell_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.generators_match and self.n0_equal and self.n1_equal and all(
            r["traced"] for r in self.provenance)

    def to_json(self) -> dict:
        return {"category": self.category, "ok": self.ok, "generators_match": self.generators_match,
                "N0_equal": self.n0_equal, "N1_equal": self.n1_equal, "first_mismatch": self.first_mismatch,
                "cell_counts": self.cell_counts, "provenance": self.provenance}

    def to_text(self) -> str:
        lines = [f"category: {self.category}",
                 f"generators match: {self.generators_match}",
                 f"N0 equal: {self.n0_equal}",
                 f"N1 equal: {self.n1_equal}",
                 "cells: " + ", ".join(f"X{k}={v}" for k, v in self.cell_counts.items()),
                 "relation  nerve family      D+ count  nerve count  traced"]
        for r in self.provenance:
            lines.append(f"({r['relation']})       {r['family']:<16}{r['dstar_count']:>8}  {r['nerve_count']:>11}  "
                         f"{'yes' if r['traced'] else 'NO'}")
        if self.first_mismatch:
            lines.append(f"first mismatch: {self.first_mismatch}")
        return "\n".join(lines)


def identify(C: FiniteWaldhausenCategory, jobs: int = 1) -> IdentifyReport:
    """Build both presentations on the same generators and compare the relation subgroups."""
    D = d_star(C, jobs)
    X = nerve_wS(C, jobs)
    T = total_presentation(X)
    fr = D.free
    counts = {f"{m}{n}": X.size(m, n) for m, n in WINDOW}
    gm = set(T.gens1) == set(fr.E0.names) and set(T.gens2) == set(fr.E1.names)
    if not gm:
        return IdentifyReport(C.name, False, False, False, [], "generator dictionary mismatch", counts)
    Q = phi_reflect(T, fr)
    Q.require_consistent()
    first = None
    for lab, r in zip(Q.r0_labels, Q.R0):
        if not D.N0.contains(r):
            first = first or f"nerve relator {lab} not in D+ N0"
    for lab, r in zip(D.r0_labels, D.R0):
        if not Q.N0.contains(r):
            first = first or f"D+ relator {lab} not in nerve N0"
    n0 = D.N0.same_as(Q.N0)
    for lab, r in zip(Q.r1_labels, Q.R1):
        if not D.N1.contains(r):
            first = first or f"nerve relator {lab} not in D+ N1"
    for lab, r in zip(D.r1_labels, D.R1):
        if not Q.N1.contains(r):
            first = first or f"D+ relator {lab} not in nerve N1"
    n1 = D.N1.same_as(Q.N1)
    # provenance: each D+ family is generated by the matching nerve family
    prov = []
    by_family: Dict[str, List[CElem]] = {}
    for lab, r in zip(Q.r1_labels, Q.R1):
        by_family.setdefault(lab.split(":")[0], []).append(r)
    for lab, r in zip(Q.r0_labels, Q.R0):
        by_family.setdefault(lab.split(":")[0], []).append(r)
    for rel in sorted(FAMILY_OF_RELATION):
        famname = FAMILY_OF_RELATION[rel]
        mine = [r for r in D.relators if r.relation == rel]
        theirs = by_family.get(famname, [])
        if rel == "3":
            # [*] = 0 is absorbed by the generator dictionary on both sides
            traced = C.zero not in fr.E0.names and any(X.is_degenerate(x) for x in X.cells[(1, 0)])
            prov.append({"relation": rel, "family": famname, "dstar_count": 0, "nerve_count": 1,
                         "traced": traced})
            continue
        traced = True
        if mine:
            if rel in ("1", "2"):
                law = D.free.F0
                from .nil2 import NormalSubgroup
                N = NormalSubgroup(law, theirs)
            else:
                N = _n1_closure(Q, theirs)
            traced = all(N.contains(r.elem) for r in mine)
        prov.append({"relation": rel, "family": famname, "dstar_count": len(mine),
                     "nerve_count": len(theirs), "traced": traced})
    return IdentifyReport(C.name, True, n0, n1, prov, first, counts)


def _n1_closure(Q: SquadPresentation, rels: Sequence[CElem]):
    """Normal closure in degree two of ``rels`` together with the relators forced by ``N0``."""
    sub = SquadPresentation(Q.free, Q.R0, list(rels), Q.r0_labels, [f"r{i}" for i in range(len(rels))])
    return sub.N1
