"""Square groups, the tensor with ``Z_nil[E]``, and biexact pairings.

A square group is ``M_e <-H,P-> M_ee`` with ``H`` quadratic, ``P`` a
homomorphism, cross effect ``(x|y)_H = H(x+y) - H(y) - H(x)`` and

    (P(a)|x)_H = 0,  (x|P(a))_H = 0,  P(x|y)_H = [x, y],  PHP = 2P.

``M_ee`` is always free abelian here, stored as sparse dicts over hashable
keys.  Concrete square groups:

* :class:`ZnilSG` -- ``Z_nil[E]``: free class-2 group with ``H(e) = 0`` and
  ``(x|y)_H = y (x) x``;
* :class:`C0SG` / :class:`C1SG` -- the two square groups carried by a 0-free
  presented stable quadratic module;
* :class:`TensorWithZnil` -- ``M (.) Z_nil[E]`` in normal form: an ``E``-family
  of elements of ``M_e`` plus a central part in ``M_ee (x) wedge^2 Z[E]``.

Normal form of the tensor.  ``(x, k)`` stands for ``sum_e x_e (.) e`` (in the
order of ``E``) plus the central ``sum_{f<e} k_{fe} (x-bar) (f (x) e)``.
Reordering uses ``[u (.) e, v (.) f] = (u|v)_H (x-bar) (f (x) e)``, so

    (x, k) + (x', k') = (x + x', k + k' + c(x, x')),
    c(x, x')_{fe} = (x_e | x'_f)_H   for f < e.

Symbols ``a (x-bar) (e (x) e)`` are ``P(a) (.) e`` and lie in the family part;
``a (x-bar) (e (x) f)`` with ``e > f`` equals ``T(a) (x-bar) (f (x) e)``.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import CheckFailure, SchemaError
from .nil2 import CElem, Nil2Group, _pidx
from .squad import SquadMorphism, SquadPresentation, _letters, _pair_of
from .waldcat import ExactFunctorData, FiniteWaldhausenCategory, d_star, d_star_functor

EE = Dict[Hashable, int]


def ee_add(*vs: Mapping) -> EE:
    out: EE = {}
    for v in vs:
        for k, x in v.items():
            y = out.get(k, 0) + x
            if y:
                out[k] = y
            else:
                out.pop(k, None)
    return out


def ee_scale(n: int, v: Mapping) -> EE:
    return {k: n * x for k, x in v.items() if n * x}


def ee_neg(v: Mapping) -> EE:
    return ee_scale(-1, v)


def ee_sub(a: Mapping, b: Mapping) -> EE:
    return ee_add(a, ee_neg(b))


def outer(u: Mapping[int, int], v: Mapping[int, int]) -> EE:
    """``u (x) v`` for sparse vectors over a basis."""
    out: EE = {}
    for i, x in u.items():
        for j, y in v.items():
            out[(i, j)] = out.get((i, j), 0) + x * y
    return {k: x for k, x in out.items() if x}


# ---------------------------------------------------------------- interface

class SquareGroup:
    """Interface.  Subclasses implement the ``e`` group, ``H`` and ``P``."""

    name = "square group"

    def e_zero(self): raise NotImplementedError
    def e_add(self, x, y): raise NotImplementedError
    def e_neg(self, x): raise NotImplementedError
    def e_eq(self, x, y) -> bool: raise NotImplementedError
    def H(self, x) -> EE: raise NotImplementedError
    def P(self, a: Mapping) -> object: raise NotImplementedError
    def e_generators(self) -> List: raise NotImplementedError
    def ee_generators(self) -> List[EE]: raise NotImplementedError

    def ee_eq(self, a: Mapping, b: Mapping) -> bool:
        return not ee_sub(a, b)

    def e_sub(self, x, y):
        return self.e_add(x, self.e_neg(y))

    def e_comm(self, x, y):
        """``[x, y] = -x - y + x + y``."""
        return self.e_add(self.e_add(self.e_neg(x), self.e_neg(y)), self.e_add(x, y))

    def e_mul(self, x, n: int):
        out = self.e_zero()
        step = x if n >= 0 else self.e_neg(x)
        for _ in range(abs(n)):
            out = self.e_add(out, step)
        return out

    def cross(self, x, y) -> EE:
        return ee_sub(ee_sub(self.H(self.e_add(x, y)), self.H(y)), self.H(x))

    def T(self, a: Mapping) -> EE:
        return ee_sub(self.H(self.P(a)), a)

    def Delta(self, x) -> EE:
        h = self.H(x)
        return ee_add(ee_sub(self.cross(x, x), h), self.T(h))


def square_group_violations(M: SquareGroup, xs: Optional[Sequence] = None,
                            aa: Optional[Sequence[EE]] = None) -> List[str]:
    """Check the square-group laws on the given (or generating) elements."""
    xs = list(M.e_generators() if xs is None else xs)
    aa = list(M.ee_generators() if aa is None else aa)
    bad = []
    for i, a in enumerate(aa):
        pa = M.P(a)
        for j, x in enumerate(xs):
            if M.cross(pa, x):
                bad.append(f"(P(a{i})|x{j})_H != 0")
            if M.cross(x, pa):
                bad.append(f"(x{j}|P(a{i}))_H != 0")
        if not M.e_eq(M.P(M.H(pa)), M.e_add(pa, pa)):
            bad.append(f"PHP(a{i}) != 2P(a{i})")
        if not M.ee_eq(M.T(M.T(a)), a):
            bad.append(f"T^2(a{i}) != a{i}")
    for i, x in enumerate(xs):
        for j, y in enumerate(xs):
            if not M.e_eq(M.P(M.cross(x, y)), M.e_comm(x, y)):
                bad.append(f"P(x{i}|x{j})_H != [x{i},x{j}]")
            dxy = M.Delta(M.e_add(x, y))
            if not M.ee_eq(dxy, ee_add(M.Delta(x), M.Delta(y))):
                bad.append(f"Delta not additive at (x{i}, x{j})")
            for k, z in enumerate(xs):
                if not M.ee_eq(M.cross(x, M.e_add(y, z)), ee_add(M.cross(x, y), M.cross(x, z))):
                    bad.append(f"cross effect not bilinear at ({i},{j},{k})")
    return bad


# ---------------------------------------------------------------- Z_nil[E]

def h_znil(x: CElem) -> EE:
    """``H`` of ``Z_nil[E]`` on a free class-2 normal form.

    ``H(sum a_i e_i + sum c_ij [e_j, e_i]) = sum C(a_i, 2) e_i(x)e_i
    + sum_{i<j} a_i a_j e_j(x)e_i + sum c_ij (e_i(x)e_j - e_j(x)e_i)``.
    """
    out: EE = {}
    items = sorted(x.top.items())
    for i, a in items:
        c = a * (a - 1) // 2
        if c:
            out[(i, i)] = out.get((i, i), 0) + c
    for s, (i, a) in enumerate(items):
        for j, b in items[s + 1:]:
            out[(j, i)] = out.get((j, i), 0) + a * b
    for k, c in x.cen.items():
        i, j = _pair_of(k)
        out[(i, j)] = out.get((i, j), 0) + c
        out[(j, i)] = out.get((j, i), 0) - c
    return {k: v for k, v in out.items() if v}


def p_znil(law: Nil2Group, a: Mapping) -> CElem:
    """``P(u (x) v) = [v, u]``."""
    cen: Dict[int, int] = {}
    for (i, j), v in a.items():
        if i < j:       # [e_j, e_i]
            cen[_pidx(i, j)] = cen.get(_pidx(i, j), 0) + v
        elif i > j:     # [e_j, e_i] = -[e_i, e_j]
            cen[_pidx(j, i)] = cen.get(_pidx(j, i), 0) - v
    return law.central(cen)


class ZnilSG(SquareGroup):
    """``Z_nil[E]``."""

    def __init__(self, names: Iterable[str]):
        self.group = Nil2Group(list(names))
        self.n = len(self.group.gens)
        self.name = f"Z_nil[{','.join(self.group.gens.names)}]"

    def e_zero(self): return self.group.zero()
    def e_add(self, x, y): return self.group.add(x, y)
    def e_neg(self, x): return self.group.neg(x)
    def e_eq(self, x, y): return x == y
    def e_comm(self, x, y): return self.group.comm(x, y)
    def H(self, x): return h_znil(x)
    def P(self, a): return p_znil(self.group, a)

    def e_generators(self):
        return [self.group.gen(i) for i in range(self.n)]

    def ee_generators(self):
        return [{(i, j): 1} for i in range(self.n) for j in range(self.n)]


class ZeroFree:
    """Substitution ``d e1 -> word in E0`` witnessing that a presentation is 0-free."""

    def __init__(self, P: SquadPresentation):
        fr = P.free
        F0 = fr.F0
        n0 = fr.n0
        words: Dict[int, CElem] = {}
        for r, lab in zip(P.R0, P.r0_labels):
            dcoords = {k: v for k, v in r.top.items() if k >= n0}
            if len(dcoords) != 1 or abs(next(iter(dcoords.values()))) != 1:
                raise SchemaError(f"non-0-free input: relator {lab} does not define a single boundary symbol")
            (k, v), = dcoords.items()
            rr = r if v == 1 else F0.neg(r)
            # rr = d(e) - word  (up to the order of the two factors)
            word = F0.add(F0.neg(rr), F0.gen(k))
            alt = F0.add(F0.gen(k), F0.neg(rr))
            for w in (word, alt):
                if all(i < n0 for i in w.top) and all(_pair_of(c)[1] < n0 for c in w.cen):
                    break
            else:
                raise SchemaError(f"non-0-free input: relator {lab} mixes boundary symbols")
            if k in words:
                raise SchemaError(f"non-0-free input: two relators define {fr.name0(k)}")
            words[k] = w
        missing = [fr.name0(n0 + a) for a in range(fr.n1) if n0 + a not in words]
        if missing:
            raise SchemaError(f"non-0-free input: no defining relator for {missing[0]}")
        P.require_consistent()
        self.P = P
        self.images = [F0.gen(i) for i in range(n0)] + [words[n0 + a] for a in range(fr.n1)]
        self.znil = ZnilSG(fr.E0.names)

    def sigma(self, x: CElem) -> CElem:
        """Image of ``x`` in ``<E0>^nil`` (as an element of the ``Z_nil`` group)."""
        g = self.znil.group
        out = g.zero()
        for i in sorted(x.top):
            out = g.add(out, g.mul(self.images[i], x.top[i]))
        for k, c in x.cen.items():
            i, j = _pair_of(k)
            out = g.add(out, g.mul(g.comm(self.images[j], self.images[i]), c))
        return CElem(dict(out.top), dict(out.cen))


class C0SG(SquareGroup):
    """``C0`` with ``H(e) = 0``, ``(x|y)_H = y (x) x`` and ``P = <d, d>``."""

    def __init__(self, zf: ZeroFree):
        self.zf = zf
        self.fr = zf.P.free
        self.name = "C0^sg"

    def e_zero(self): return self.fr.F0.zero()
    def e_add(self, x, y): return self.fr.F0.add(x, y)
    def e_neg(self, x): return self.fr.F0.neg(x)
    def e_eq(self, x, y): return self.zf.sigma(x) == self.zf.sigma(y)
    def e_comm(self, x, y): return self.fr.F0.comm(x, y)
    def H(self, x): return h_znil(self.zf.sigma(x))

    def P(self, a):
        # <d,d>(u (x) v) = d<u, v> = [v, u]; computed inside F0 on E0 coordinates
        return p_znil(self.fr.F0, a)

    def e_generators(self):
        return [self.fr.F0.gen(i) for i in range(self.fr.k0)]

    def ee_generators(self):
        n = self.fr.n0
        return [{(i, j): 1} for i in range(n) for j in range(n)]


class C1SG(SquareGroup):
    """``C1`` with ``H d`` and ``P = omega``."""

    def __init__(self, zf: ZeroFree):
        self.zf = zf
        self.Pres = zf.P
        self.fr = zf.P.free
        self.name = "C1^sg"

    def e_zero(self): return self.fr.F1.zero()
    def e_add(self, x, y): return self.fr.F1.add(x, y)
    def e_neg(self, x): return self.fr.F1.neg(x)
    def e_eq(self, x, y): return self.Pres.eq1(x, y)
    def e_comm(self, x, y): return self.fr.F1.comm(x, y)
    def H(self, x): return h_znil(self.zf.sigma(self.fr.boundary(x)))

    def P(self, a):
        fr = self.fr
        out = fr.F1.zero()
        for (i, j), v in a.items():
            out = fr.F1.add(out, fr.F1.mul(fr.bracket(fr.F0.gen(i), fr.F0.gen(j)), v))
        return out

    def e_generators(self):
        return [self.fr.F1.gen(a) for a in range(self.fr.n1)] + [
            self.P({(i, j): 1}) for i in range(self.fr.n0) for j in range(self.fr.n0)]

    def ee_generators(self):
        n = self.fr.n0
        return [{(i, j): 1} for i in range(n) for j in range(n)]


class QuadraticPairModule:
    """``d: C1^sg -> C0^sg`` with shared ``ee`` part."""

    def __init__(self, P: SquadPresentation):
        self.zf = ZeroFree(P)
        self.M1 = C1SG(self.zf)
        self.M0 = C0SG(self.zf)
        self.P = P

    def violations(self) -> List[str]:
        bad = [f"C0: {v}" for v in square_group_violations(self.M0)]
        bad += [f"C1: {v}" for v in square_group_violations(self.M1)]
        fr = self.P.free
        for x in self.M1.e_generators():
            if not self.M0.ee_eq(self.M0.H(fr.boundary(x)), self.M1.H(x)):
                bad.append("H0 d != H1")
        for a in self.M1.ee_generators():
            if not self.M0.e_eq(fr.boundary(self.M1.P(a)), self.M0.P(a)):
                bad.append(f"d P1 != P0 at {a}")
        return bad


def sg_from_squad(P: SquadPresentation) -> QuadraticPairModule:
    q = QuadraticPairModule(P)
    bad = q.violations()
    if bad:
        raise CheckFailure(f"square group law fails: {bad[0]}", bad[0])
    return q


# ---------------------------------------------------------------- M (.) Z_nil[E]

class TElem:
    __slots__ = ("family", "central")

    def __init__(self, family: Dict[int, object], central: Dict[Tuple[int, int], EE]):
        self.family = family
        self.central = central

    def __repr__(self):
        return f"TElem({self.family}, {self.central})"


class TensorWithZnil(SquareGroup):
    """``M (.) Z_nil[E]`` in the normal form described in the module docstring."""

    def __init__(self, M: SquareGroup, names: Iterable[str]):
        self.M = M
        self.E = list(names)
        self.n = len(self.E)
        self.name = f"{M.name} (.) Z_nil[{','.join(self.E)}]"

    def _fam(self, x: TElem, e: int):
        return x.family.get(e, self.M.e_zero())

    def _clean(self, fam, cen) -> TElem:
        return TElem(fam, {k: v for k, v in cen.items() if v})

    def e_zero(self) -> TElem:
        return TElem({}, {})

    def gen(self, x, e: int) -> TElem:
        """``x (.) e``, the image of ``x`` under the ``e``-th comparison map."""
        return TElem({e: x}, {})

    def bar(self, a: Mapping, e: int, f: int) -> TElem:
        """``a (x-bar) (e (x) f)``."""
        if e == f:
            return TElem({e: self.M.P(a)}, {})
        if e < f:
            return self._clean({}, {(e, f): dict(a)})
        return self._clean({}, {(f, e): self.M.T(a)})

    def e_add(self, x: TElem, y: TElem) -> TElem:
        M = self.M
        fam = dict(x.family)
        for e, v in y.family.items():
            fam[e] = M.e_add(fam[e], v) if e in fam else v
        cen = {k: dict(v) for k, v in x.central.items()}
        for k, v in y.central.items():
            cen[k] = ee_add(cen.get(k, {}), v)
        for e, xe in x.family.items():
            for f, yf in y.family.items():
                if f < e:
                    cen[(f, e)] = ee_add(cen.get((f, e), {}), M.cross(xe, yf))
        return self._clean(fam, cen)

    def e_neg(self, x: TElem) -> TElem:
        M = self.M
        fam = {e: M.e_neg(v) for e, v in x.family.items()}
        cen = {k: ee_neg(v) for k, v in x.central.items()}
        # -x = (-x_fam, -k + c(x_fam, x_fam)) since the cocycle is bilinear
        for e, xe in x.family.items():
            for f, xf in x.family.items():
                if f < e:
                    cen[(f, e)] = ee_add(cen.get((f, e), {}), M.cross(xe, xf))
        return self._clean(fam, cen)

    def e_eq(self, x: TElem, y: TElem) -> bool:
        M = self.M
        for e in set(x.family) | set(y.family):
            if not M.e_eq(self._fam(x, e), self._fam(y, e)):
                return False
        for k in set(x.central) | set(y.central):
            if not M.ee_eq(x.central.get(k, {}), y.central.get(k, {})):
                return False
        return True

    def H(self, x: TElem) -> EE:
        """``sum_e H(x_e)(e(x)e) + sum_{e<e'} (x_e|x_e')(e'(x)e) + H`` of the central part."""
        M = self.M
        out: EE = {}

        def put(a, e, f):
            for k, v in a.items():
                kk = (k, e, f)
                out[kk] = out.get(kk, 0) + v

        fam = sorted(x.family.items())
        for e, xe in fam:
            put(M.H(xe), e, e)
        for s, (e, xe) in enumerate(fam):
            for e2, xe2 in fam[s + 1:]:
                put(M.cross(xe, xe2), e2, e)
        for (f, e), a in x.central.items():
            put(a, f, e)
            put(M.T(a), e, f)
        return {k: v for k, v in out.items() if v}

    def P(self, a: Mapping) -> TElem:
        out = self.e_zero()
        groups: Dict[Tuple[int, int], EE] = {}
        for (k, e, f), v in a.items():
            g = groups.setdefault((e, f), {})
            g[k] = g.get(k, 0) + v
        for (e, f), m in sorted(groups.items()):
            out = self.e_add(out, self.bar(m, e, f))
        return out

    def e_generators(self) -> List[TElem]:
        out = [self.gen(x, e) for e in range(self.n) for x in self.M.e_generators()]
        for e in range(self.n):
            for f in range(e + 1, self.n):
                for a in self.M.ee_generators():
                    out.append(self.bar(a, e, f))
        return out

    def ee_generators(self) -> List[EE]:
        out = []
        for a in self.M.ee_generators():
            for e in range(self.n):
                for f in range(self.n):
                    out.append({(k, e, f): v for k, v in a.items()})
        return out


# ---------------------------------------------------------------- pairings

class BiexactFunctorData:
    """Object and morphism pairing ``C x D -> E``."""

    def __init__(self, C: FiniteWaldhausenCategory, D: FiniteWaldhausenCategory,
                 E: FiniteWaldhausenCategory, objects: Mapping[Tuple[str, str], str],
                 morphisms: Mapping[Tuple[str, str], str]):
        self.C, self.D, self.E = C, D, E
        self.obj = dict(objects)
        self.mor = dict(morphisms)

    @classmethod
    def from_json(cls, data: dict, C, D, E) -> "BiexactFunctorData":
        try:
            obj = {(a, b): ab for a, b, ab in data["objects"]}
            mor = {(f, g): fg for f, g, fg in data["morphisms"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"pairing JSON malformed: {exc!r}") from None
        return cls(C, D, E, obj, mor)

    def left_slot(self, a: str) -> ExactFunctorData:
        """``a ^ -: D -> E``."""
        ida = self.C.identity[a]
        return ExactFunctorData(self.D, self.E, {b: self.obj[(a, b)] for b in self.D.objects},
                                {g: self.mor[(ida, g)] for g in self.D.morphisms})

    def right_slot(self, b: str) -> ExactFunctorData:
        """``- ^ b: C -> E``."""
        idb = self.D.identity[b]
        return ExactFunctorData(self.C, self.E, {a: self.obj[(a, b)] for a in self.C.objects},
                                {f: self.mor[(f, idb)] for f in self.C.morphisms})

    def violations(self) -> List[str]:
        C, D, E = self.C, self.D, self.E
        v = []
        for a in C.objects:
            for b in D.objects:
                if (a, b) not in self.obj or self.obj[(a, b)] not in E.objects:
                    v.append(f"pairing undefined on objects ({a}, {b})")
        for f in C.morphisms:
            for g in D.morphisms:
                if (f, g) not in self.mor or self.mor[(f, g)] not in E.morphisms:
                    v.append(f"pairing undefined on morphisms ({f}, {g})")
        if v:
            return v
        for a in C.objects:
            if self.obj[(a, D.zero)] != E.zero:
                v.append(f"{a} ^ * is not *")
        for b in D.objects:
            if self.obj[(C.zero, b)] != E.zero:
                v.append(f"* ^ {b} is not *")
        for (g1, f1), gf1 in C.compose_table.items():
            for (g2, f2), gf2 in D.compose_table.items():
                lhs = E.compose_table.get((self.mor[(g1, g2)], self.mor[(f1, f2)]))
                if lhs != self.mor[(gf1, gf2)]:
                    v.append(f"pairing not functorial at ({g1} o {f1}, {g2} o {f2})")
                    break
        for a in C.objects:
            v += [f"{a} ^ -: {x}" for x in self.left_slot(a).violations()]
        for b in D.objects:
            v += [f"- ^ {b}: {x}" for x in self.right_slot(b).violations()]
        return v


class Pairing:
    """The morphisms ``phi^00``, ``phi^01``, ``phi^10`` of a biexact functor."""

    def __init__(self, wedge: BiexactFunctorData):
        bad = wedge.violations()
        if bad:
            raise CheckFailure(f"not a biexact functor: {bad[0]}", bad[0])
        self.w = wedge
        self.PC, self.PD, self.PE = d_star(wedge.C), d_star(wedge.D), d_star(wedge.E)
        self.zC, self.zD, self.zE = ZeroFree(self.PC), ZeroFree(self.PD), ZeroFree(self.PE)
        self.EC = list(self.PC.free.E0.names)
        self.ED = list(self.PD.free.E0.names)
        self._left: Dict[str, SquadMorphism] = {}
        self._right: Dict[str, SquadMorphism] = {}

    # slot morphisms ---------------------------------------------------------------
    def left(self, a: str) -> SquadMorphism:
        if a not in self._left:
            self._left[a] = d_star_functor(self.w.left_slot(a))
        return self._left[a]

    def right(self, b: str) -> SquadMorphism:
        if b not in self._right:
            self._right[b] = d_star_functor(self.w.right_slot(b))
        return self._right[b]

    # ee part ---------------------------------------------------------------------------
    def phi_ee(self, u: Mapping[Tuple[int, int], int], v: Mapping[Tuple[int, int], int]) -> EE:
        """``A (x) A' (x) C (x) C' -> [A^C] (x) [A'^C']`` on ``Z[E_C]^2 (x) Z[E_D]^2``."""
        Eidx = self.PE.free.E0.index
        zero = self.w.E.zero
        out: EE = {}
        for (i, j), x in u.items():
            for (k, l), y in v.items():
                p = self.w.obj[(self.EC[i], self.ED[k])]
                q = self.w.obj[(self.EC[j], self.ED[l])]
                if p == zero or q == zero:
                    continue
                key = (Eidx[p], Eidx[q])
                out[key] = out.get(key, 0) + x * y
        return {k: x for k, x in out.items() if x}

    def omega_E(self, a: Mapping) -> CElem:
        fr = self.PE.free
        out = fr.F1.zero()
        for (i, j), v in a.items():
            out = fr.F1.add(out, fr.F1.mul(fr.bracket(fr.F0.gen(i), fr.F0.gen(j)), v))
        return out

    def pcomm_E(self, a: Mapping) -> CElem:
        return p_znil(self.PE.free.F0, a)

    # formal evaluation ------------------------------------------------------------------
    def phi00(self, x: CElem, z: CElem) -> CElem:
        """``phi^00(x (.) z)`` for ``x`` in ``D0 C`` and ``z`` in ``D0 D``."""
        F0 = self.PE.free.F0
        xs, zs = self.zC.sigma(x), self.zD.sigma(z)
        out = F0.zero()
        for i, s in _letters(self.zC.znil.group, xs):
            inner = self.right_zero_fold(i, zs)
            out = F0.add(out, inner if s > 0 else F0.neg(inner))
        return out

    def right_zero_fold(self, i: int, zs: CElem) -> CElem:
        """``phi^00([A_i] (.) z)``; additive in ``z`` since ``H([A_i]) = 0``."""
        F0 = self.PE.free.F0
        out = F0.zero()
        a = self.EC[i]
        for k, s in _letters(self.zD.znil.group, zs):
            g = self.right(self.ED[k]).f0(self.PC.free.e0(a))
            out = F0.add(out, g if s > 0 else F0.neg(g))
        return out

    def phi01(self, x: CElem, y: CElem) -> CElem:
        """``phi^01(x (.) y)``: left linear in ``x``, ``[A] (.) y -> D+(A ^ -)(y)``."""
        F1 = self.PE.free.F1
        xs = self.zC.sigma(x)
        out = F1.zero()
        for i, s in _letters(self.zC.znil.group, xs):
            g = self.left(self.EC[i]).f1(y)
            out = F1.add(out, g if s > 0 else F1.neg(g))
        return out

    def phi10(self, y: CElem, z: CElem) -> CElem:
        """``phi^10(y (.) z)`` using ``y (.) (p + l) = y(.)p + y(.)l + H(y) (x-bar) (p (x) l)``."""
        F1 = self.PE.free.F1
        zs = self.zD.sigma(z)
        hy = h_znil(self.zC.sigma(self.PC.free.boundary(y)))
        out = F1.zero()
        acc: Dict[int, int] = {}
        for k, s in _letters(self.zD.znil.group, zs):
            g = self.right(self.ED[k]).f1(y)
            if s > 0:
                term = g
            else:
                # y (.) (-e) = -(y (.) e) + H(y) (x-bar) (e (x) e)
                term = F1.add(F1.neg(g), self.omega_E(self.phi_ee(hy, {(k, k): 1})))
            corr = self.omega_E(self.phi_ee(hy, outer(acc, {k: s})))
            out = F1.add(F1.add(out, term), corr)
            acc[k] = acc.get(k, 0) + s
        return out

    # normal-form evaluation via the tensor with Z_nil ------------------------------------
    def tensor10(self) -> TensorWithZnil:
        return TensorWithZnil(C1SG(self.zC), self.ED)

    def tensor00(self) -> TensorWithZnil:
        return TensorWithZnil(self.zC.znil, self.ED)

    def tensor01(self) -> TensorWithZnil:
        """``Z_nil[E_C] (.) D1 D``, stored through the symmetry as ``D1 D (.) Z_nil[E_C]``."""
        return TensorWithZnil(C1SG(self.zD), self.EC)

    def phi00_nf(self, t: TElem) -> CElem:
        F0 = self.PE.free.F0
        out = F0.zero()
        zg = self.zC.znil.group
        for k in sorted(t.family):
            x = t.family[k]
            img = self.right(self.ED[k]).f0(CElem(dict(x.top), dict(x.cen)))
            out = F0.add(out, img)
        for (f, e), a in t.central.items():
            out = F0.add(out, self.pcomm_E(self.phi_ee(a, {(f, e): 1})))
        return out

    def phi10_nf(self, t: TElem) -> CElem:
        F1 = self.PE.free.F1
        out = F1.zero()
        for k in sorted(t.family):
            out = F1.add(out, self.right(self.ED[k]).f1(t.family[k]))
        for (f, e), a in t.central.items():
            out = F1.add(out, self.omega_E(self.phi_ee(a, {(f, e): 1})))
        return out

    def phi01_nf(self, t: TElem) -> CElem:
        F1 = self.PE.free.F1
        out = F1.zero()
        for k in sorted(t.family):
            out = F1.add(out, self.left(self.EC[k]).f1(t.family[k]))
        for (f, e), b in t.central.items():
            out = F1.add(out, self.omega_E(self.phi_ee({(f, e): 1}, b)))
        return out

    def phi_ee_10(self, key_vals: Mapping) -> EE:
        """ee part on ``M_ee (x) Z[E_D]^2`` keys ``((i, j), e, f)``."""
        out: EE = {}
        for (m, e, f), v in key_vals.items():
            out = ee_add(out, ee_scale(v, self.phi_ee({m: 1}, {(e, f): 1})))
        return out

    def phi_ee_01(self, key_vals: Mapping) -> EE:
        out: EE = {}
        for (m, e, f), v in key_vals.items():
            out = ee_add(out, ee_scale(v, self.phi_ee({(e, f): 1}, {m: 1})))
        return out

    # verification -------------------------------------------------------------------
    def verify(self) -> List[str]:
        """All morphism and cell identities on generators; returns failures."""
        bad: List[str] = []
        PC, PD, PE = self.PC, self.PD, self.PE
        frC, frD, frE = PC.free, PD.free, PE.free
        sgE1 = C1SG(self.zE)
        sgE0 = C0SG(self.zE)
        # square-group morphism laws
        for label, T, phi, phee, tgt in (
                ("phi00", self.tensor00(), self.phi00_nf, self.phi_ee_10, sgE0),
                ("phi10", self.tensor10(), self.phi10_nf, self.phi_ee_10, sgE1),
                ("phi01", self.tensor01(), self.phi01_nf, self.phi_ee_01, sgE1)):
            for a in T.ee_generators():
                if not tgt.e_eq(phi(T.P(a)), tgt.P(phee(a))):
                    bad.append(f"{label}: P not preserved at {a}")
            gens = T.e_generators()
            for x in gens:
                if not tgt.ee_eq(tgt.H(phi(x)), phee(T.H(x))):
                    bad.append(f"{label}: H not preserved")
            for x in gens[:12]:
                for y in gens[:12]:
                    if not tgt.e_eq(phi(T.e_add(x, y)), tgt.e_add(phi(x), phi(y))):
                        bad.append(f"{label}: not additive")
        # lower cells
        for a in self.EC:
            xa = frC.e0(a)
            for e in frD.E1.names:
                y = frD.e1(e)
                if not PE.eq0(frE.boundary(self.phi01(xa, y)), self.phi00(xa, frD.boundary(y))):
                    bad.append(f"lower-left cell fails at ([{a}], {e})")
        for e in frC.E1.names:
            y = frC.e1(e)
            for b in self.ED:
                zb = frD.e0(b)
                if not PE.eq0(frE.boundary(self.phi10(y, zb)), self.phi00(frC.boundary(y), zb)):
                    bad.append(f"lower-right cell fails at ({e}, [{b}])")
        # upper cell
        for ec in frC.E1.names:
            for ed in frD.E1.names:
                lhs = self.phi01(frC.boundary(frC.e1(ec)), frD.e1(ed))
                rhs = self.phi10(frC.e1(ec), frD.boundary(frD.e1(ed)))
                if not PE.eq1(lhs, rhs):
                    bad.append(f"upper cell fails at ({ec}, {ed})")
        return bad

    # K-theory products ---------------------------------------------------------------
    def k_products(self) -> Dict[str, Dict[Tuple[int, int], Tuple[int, ...]]]:
        """Products on invariant-factor generators, checked for representative independence."""
        PC, PD, PE = self.PC, self.PD, self.PE
        k0C, k0D, k0E = PC.pi0(), PD.pi0(), PE.pi0()
        k1C, k1D, k1E = PC.pi1(), PD.pi1(), PE.pi1()
        shiftsC0 = PC.N0.lifts() + [PC.free.de1(e) for e in PC.free.E1.names]
        shiftsD0 = PD.N0.lifts() + [PD.free.de1(e) for e in PD.free.E1.names]
        shiftsC1 = PC.N1.generators()
        shiftsD1 = PD.N1.generators()
        out: Dict[str, Dict[Tuple[int, int], Tuple[int, ...]]] = {"00": {}, "01": {}, "10": {}}

        def check(val, alts, label):
            for alt in alts:
                if alt != val:
                    raise CheckFailure(f"product {label} depends on the representative", label)

        F0C, F0D, F1C, F1D = PC.free.F0, PD.free.F0, PC.free.F1, PD.free.F1
        for i, x in enumerate(k0C.representatives):
            for j, z in enumerate(k0D.representatives):
                val = k0E.coordinates(self.phi00(x, z))
                alts = [k0E.coordinates(self.phi00(F0C.add(x, s), z)) for s in shiftsC0]
                alts += [k0E.coordinates(self.phi00(x, F0D.add(z, s))) for s in shiftsD0]
                check(val, alts, f"K0xK0 ({i},{j})")
                out["00"][(i, j)] = val
            for j, y in enumerate(k1D.representatives):
                val = k1E.coordinates(self.phi01(x, y))
                alts = [k1E.coordinates(self.phi01(F0C.add(x, s), y)) for s in shiftsC0]
                alts += [k1E.coordinates(self.phi01(x, F1D.add(y, s))) for s in shiftsD1]
                check(val, alts, f"K0xK1 ({i},{j})")
                out["01"][(i, j)] = val
        for i, y in enumerate(k1C.representatives):
            for j, z in enumerate(k0D.representatives):
                val = k1E.coordinates(self.phi10(y, z))
                alts = [k1E.coordinates(self.phi10(F1C.add(y, s), z)) for s in shiftsC1]
                alts += [k1E.coordinates(self.phi10(y, F0D.add(z, s))) for s in shiftsD0]
                check(val, alts, f"K1xK0 ({i},{j})")
                out["10"][(i, j)] = val
        return out
