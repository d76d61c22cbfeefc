"""Finite Waldhausen categories and their stable quadratic module D+.

A category is stored as explicit tables: objects with a distinguished zero,
morphisms with source and target, identities, the full composition table,
cofibrations, weak equivalences, chosen coproducts and chosen cofibers.

Generator names of the presentation:

* ``A`` for every object ``A`` other than the zero object;
* ``w:<id>`` for the weak equivalence ``<id>``;
* ``c:<id>`` for the cofiber sequence on the cofibration ``<id>`` with its
  chosen quotient.

The relators realize the nine defining relations.  The two boundary
relations identify the formal symbols ``d(w:...)`` and ``d(c:...)`` with the
prescribed words, the zero object is simply not a generator, and the rest are
degree-one relators labelled by the relation they come from.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import CheckFailure, SchemaError
from .nil2 import CElem
from .squad import (FreeSquad, Homotopy, HomotopyGroup, KInvariant, SquadMorphism,
                    SquadPresentation)


@dataclass(frozen=True)
class Coproduct:
    left: str
    right: str
    obj: str
    i1: str
    i2: str
    p1: str
    p2: str

    def swapped(self) -> "Coproduct":
        return Coproduct(self.right, self.left, self.obj, self.i2, self.i1, self.p2, self.p1)


@dataclass(frozen=True)
class CofiberTriple:
    """A cofibration ``A >-> B`` with its chosen quotient ``B ->> B/A``."""

    cofibration: str
    sub: str
    total: str
    quotient_object: str
    quotient_morphism: str


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": self.violations, "notes": self.notes}


class FiniteWaldhausenCategory:
    """Table-driven finite category with Waldhausen structure."""

    def __init__(self, objects: Sequence[str], zero: str, morphisms: Mapping[str, Tuple[str, str]],
                 identity: Mapping[str, str], compose: Mapping[Tuple[str, str], str],
                 cofibrations: Iterable[str], weak_equivalences: Iterable[str],
                 coproducts: Iterable[Coproduct], cofibers: Mapping[str, Tuple[str, str]],
                 name: str = ""):
        self.name = name
        self.objects = list(objects)
        self.zero = zero
        self.morphisms = dict(morphisms)
        self.identity = dict(identity)
        self.compose_table = dict(compose)
        self.cofibrations = list(dict.fromkeys(cofibrations))
        self.weak_equivalences = list(dict.fromkeys(weak_equivalences))
        self._coproducts: Dict[Tuple[str, str], Coproduct] = {}
        self.coproduct_list: List[Coproduct] = []
        for c in coproducts:
            self.coproduct_list.append(c)
            self._coproducts[(c.left, c.right)] = c
            self._coproducts.setdefault((c.right, c.left), c.swapped())
        self.cofibers = dict(cofibers)
        self._check_names()
        self._hom: Dict[Tuple[str, str], List[str]] = {}
        for m, (s, t) in self.morphisms.items():
            self._hom.setdefault((s, t), []).append(m)
        self._presentation: Optional[SquadPresentation] = None

    def _check_names(self) -> None:
        obs = set(self.objects)
        if self.zero not in obs:
            raise SchemaError(f"zero object {self.zero!r} is not an object")
        if len(obs) != len(self.objects):
            raise SchemaError("duplicate object names")
        for m, (s, t) in self.morphisms.items():
            if s not in obs or t not in obs:
                raise SchemaError(f"morphism {m!r} has unknown endpoints")
        for a, m in self.identity.items():
            if a not in obs or m not in self.morphisms:
                raise SchemaError(f"bad identity entry for {a!r}")
        for (g, f), gf in self.compose_table.items():
            for x in (g, f, gf):
                if x not in self.morphisms:
                    raise SchemaError(f"composition mentions unknown morphism {x!r}")
        for m in list(self.cofibrations) + list(self.weak_equivalences) + list(self.cofibers):
            if m not in self.morphisms:
                raise SchemaError(f"unknown morphism {m!r} in cofibration/weak-equivalence data")
        for j, (q, qm) in self.cofibers.items():
            if q not in obs or qm not in self.morphisms:
                raise SchemaError(f"bad cofiber entry for {j!r}")
        for c in self.coproduct_list:
            for o in (c.left, c.right, c.obj):
                if o not in obs:
                    raise SchemaError(f"coproduct mentions unknown object {o!r}")
            for m in (c.i1, c.i2, c.p1, c.p2):
                if m not in self.morphisms:
                    raise SchemaError(f"coproduct mentions unknown morphism {m!r}")

    # -- table access ------------------------------------------------------------
    def src(self, m: str) -> str:
        return self.morphisms[m][0]

    def dst(self, m: str) -> str:
        return self.morphisms[m][1]

    def hom(self, a: str, b: str) -> List[str]:
        return self._hom.get((a, b), [])

    def comp(self, g: str, f: str) -> str:
        """``g ∘ f``."""
        try:
            return self.compose_table[(g, f)]
        except KeyError:
            raise SchemaError(f"composition {g} ∘ {f} missing from the table") from None

    def comp_chain(self, *ms: str) -> str:
        out = ms[-1]
        for m in reversed(ms[:-1]):
            out = self.comp(m, out)
        return out

    def zero_map(self, a: str, b: str) -> str:
        """The composite ``a -> * -> b``."""
        z = self.zero
        return self.comp(self.hom(z, b)[0], self.hom(a, z)[0])

    def coproduct(self, a: str, b: str) -> Optional[Coproduct]:
        if (a, b) in self._coproducts:
            return self._coproducts[(a, b)]
        z = self.zero
        if b == z:
            return Coproduct(a, b, a, self.identity[a], self.hom(z, a)[0], self.identity[a], self.hom(a, z)[0])
        if a == z:
            return Coproduct(a, b, b, self.hom(z, b)[0], self.identity[b], self.hom(b, z)[0], self.identity[b])
        return None

    def triple(self, j: str) -> CofiberTriple:
        if j not in self.cofibers:
            raise SchemaError(f"cofibration {j!r} has no chosen cofiber")
        q, qm = self.cofibers[j]
        return CofiberTriple(j, self.src(j), self.dst(j), q, qm)

    def is_iso(self, m: str) -> bool:
        s, t = self.morphisms[m]
        return any(self.compose_table.get((n, m)) == self.identity[s]
                   and self.compose_table.get((m, n)) == self.identity[t] for n in self.hom(t, s))

    # -- validation ------------------------------------------------------------------
    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        v = rep.violations
        obs = self.objects
        for a in obs:
            if a not in self.identity:
                v.append(f"object {a} has no identity")
        if v:
            return rep
        for a in obs:
            ida = self.identity[a]
            if self.morphisms[ida] != (a, a):
                v.append(f"identity of {a} has wrong endpoints")
        # composition: totality, endpoints, units, associativity
        ms = list(self.morphisms)
        for f in ms:
            s, t = self.morphisms[f]
            for g in ms:
                if self.src(g) != t:
                    continue
                gf = self.compose_table.get((g, f))
                if gf is None:
                    v.append(f"missing composite {g} ∘ {f}")
                elif self.morphisms[gf] != (s, self.dst(g)):
                    v.append(f"composite {g} ∘ {f} has wrong endpoints")
            if self.compose_table.get((self.identity[t], f)) != f or self.compose_table.get((f, self.identity[s])) != f:
                v.append(f"identity laws fail for {f}")
        if v:
            return rep
        for f in ms:
            for g in ms:
                if self.src(g) != self.dst(f):
                    continue
                gf = self.compose_table[(g, f)]
                for h in ms:
                    if self.src(h) != self.dst(g):
                        continue
                    if self.compose_table[(h, gf)] != self.compose_table[(self.compose_table[(h, g)], f)]:
                        v.append(f"composition not associative at ({h}, {g}, {f})")
        if v:
            return rep
        z = self.zero
        for a in obs:
            if len(self.hom(a, z)) != 1 or len(self.hom(z, a)) != 1:
                v.append(f"{z} is not a zero object for {a}")
        if v:
            return rep
        cof, we = set(self.cofibrations), set(self.weak_equivalences)
        for a in obs:
            if self.identity[a] not in cof:
                v.append(f"identity of {a} is not a cofibration")
            if self.identity[a] not in we:
                v.append(f"identity of {a} is not a weak equivalence")
            if self.hom(z, a)[0] not in cof:
                v.append(f"{z} >-> {a} is not a cofibration")
        for m in ms:
            if self.is_iso(m) and (m not in cof or m not in we):
                v.append(f"isomorphism {m} must be a cofibration and a weak equivalence")
        for cls, label in ((cof, "cofibrations"), (we, "weak equivalences")):
            for f in cls:
                for g in cls:
                    if self.src(g) == self.dst(f) and self.compose_table[(g, f)] not in cls:
                        v.append(f"{label} not closed under composition: {g} ∘ {f}")
        # chosen cofibers
        for j in self.cofibrations:
            if j not in self.cofibers:
                v.append(f"cofibration {j} has no cofiber entry")
                continue
            q, qm = self.cofibers[j]
            if self.morphisms[qm] != (self.dst(j), q):
                v.append(f"quotient morphism of {j} has wrong endpoints")
                continue
            if self.compose_table[(qm, j)] != self.zero_map(self.src(j), q):
                v.append(f"quotient of {j} does not kill the subobject")
        for j in self.cofibers:
            if j not in cof:
                v.append(f"cofiber entry for non-cofibration {j}")
        for a in obs:
            ida = self.identity[a]
            if ida in self.cofibers and self.cofibers[ida][0] != z:
                v.append(f"chosen cofiber of 1_{a} must be {z}")
            za = self.hom(z, a)[0]
            if za in self.cofibers and self.cofibers[za] != (a, ida):
                v.append(f"chosen cofiber of {z} >-> {a} must be (A, 1_A)")
        if v:
            return rep
        # coproducts
        for c in self.coproduct_list:
            a, b, x = c.left, c.right, c.obj
            want = {c.i1: (a, x), c.i2: (b, x), c.p1: (x, a), c.p2: (x, b)}
            if any(self.morphisms[m] != st for m, st in want.items()):
                v.append(f"coproduct {a} v {b} has structure maps with wrong endpoints")
                continue
            if self.comp(c.p1, c.i1) != self.identity[a] or self.comp(c.p2, c.i2) != self.identity[b]:
                v.append(f"coproduct {a} v {b}: p_k i_k is not the identity")
            if self.comp(c.p1, c.i2) != self.zero_map(b, a) or self.comp(c.p2, c.i1) != self.zero_map(a, b):
                v.append(f"coproduct {a} v {b}: cross composites do not factor through {z}")
            if z in (a, b):
                other = b if a == z else a
                if x != other:
                    v.append(f"coproduct with {z} must be the object itself")
                continue
            # universal property against every test object
            for t in obs:
                for f in self.hom(a, t):
                    for g in self.hom(b, t):
                        sols = [h for h in self.hom(x, t) if self.comp(h, c.i1) == f and self.comp(h, c.i2) == g]
                        if len(sols) != 1:
                            v.append(f"coproduct {a} v {b} fails the universal property at ({f}, {g})")
                            break
            for m, want_q in ((c.i1, (b, c.p2)), (c.i2, (a, c.p1))):
                if m not in cof:
                    v.append(f"coproduct inclusion {m} is not a cofibration")
                elif self.cofibers.get(m) != want_q:
                    v.append(f"chosen cofiber of coproduct inclusion {m} must be {want_q}")
        if v:
            return rep
        # coherent quotient choice for composable cofibrations
        for j in self.cofibrations:
            for k in self.cofibrations:
                if self.src(k) != self.dst(j):
                    continue
                try:
                    self.induced_quotient_cofibration(j, k)
                except CheckFailure as exc:
                    v.append(str(exc))
        rep.notes.append("pushout and gluing axioms not fully verified: pushouts are not part of the table data")
        return rep

    def require_valid(self) -> None:
        rep = self.validate()
        if not rep.ok:
            raise CheckFailure(f"invalid category: {rep.violations[0]}", rep.violations[0])

    def induced_quotient_cofibration(self, j: str, k: str) -> Tuple[str, str]:
        """For ``A >-j-> B >-k-> C`` return ``(u, kj)`` with ``u: B/A >-> C/A`` induced.

        The chosen cofiber of ``u`` must be ``C/B`` with the induced map.
        """
        kj = self.comp(k, j)
        tj, tk, tkj = self.triple(j), self.triple(k), self.triple(kj)
        us = [u for u in self.hom(tj.quotient_object, tkj.quotient_object)
              if self.comp(u, tj.quotient_morphism) == self.comp(tkj.quotient_morphism, k)]
        if len(us) != 1:
            raise CheckFailure(f"no unique induced map B/A -> C/A for ({j}, {k})", (j, k))
        u = us[0]
        if u not in self.cofibers:
            raise CheckFailure(f"induced map {u} for ({j}, {k}) is not a cofibration with chosen cofiber", (j, k))
        q, qm = self.cofibers[u]
        if q != tk.quotient_object or self.comp(qm, tkj.quotient_morphism) != tk.quotient_morphism:
            raise CheckFailure(f"chosen cofiber of {u} is not coherent with {k} (choice function mismatch)", (j, k))
        return u, kj

    # -- JSON --------------------------------------------------------------------------
    @classmethod
    def from_json(cls, data: dict, name: str = "") -> "FiniteWaldhausenCategory":
        try:
            objects = list(data["objects"])
            zero = data["zero"]
            morphisms = {m["id"]: (m["src"], m["dst"]) for m in data["morphisms"]}
            identity = dict(data["identity"])
            compose = {}
            for g, f, gf in data["compose"]:
                compose[(g, f)] = gf
            cofs = list(data["cofibrations"])
            wes = list(data["weakEquivalences"])
            coprods = [Coproduct(c["pair"][0], c["pair"][1], c["object"], c["i1"], c["i2"], c["p1"], c["p2"])
                       for c in data.get("coproducts", [])]
            cofibers = {c["cofibration"]: (c["quotientObject"], c["quotientMorphism"]) for c in data["cofibers"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"category JSON malformed: {exc!r}") from None
        return cls(objects, zero, morphisms, identity, compose, cofs, wes, coprods, cofibers, name=name)

    @classmethod
    def load(cls, path: str) -> "FiniteWaldhausenCategory":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read category file {path}: {exc}") from None
        return cls.from_json(data, name=path)

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "zero": self.zero,
            "morphisms": [{"id": m, "src": s, "dst": t} for m, (s, t) in self.morphisms.items()],
            "identity": dict(self.identity),
            "compose": [[g, f, gf] for (g, f), gf in self.compose_table.items()],
            "cofibrations": list(self.cofibrations),
            "weakEquivalences": list(self.weak_equivalences),
            "coproducts": [{"pair": [c.left, c.right], "object": c.obj, "i1": c.i1, "i2": c.i2,
                            "p1": c.p1, "p2": c.p2} for c in self.coproduct_list],
            "cofibers": [{"cofibration": j, "quotientObject": q, "quotientMorphism": qm}
                         for j, (q, qm) in self.cofibers.items()],
        }

    # -- D+ generators ---------------------------------------------------------------
    def e0_names(self) -> List[str]:
        return [a for a in self.objects if a != self.zero]

    def e1_names(self) -> List[str]:
        return [wname(w) for w in self.weak_equivalences] + [cname(j) for j in self.cofibrations]


def wname(m: str) -> str:
    return f"w:{m}"


def cname(j: str) -> str:
    return f"c:{j}"


# ---------------------------------------------------------------------- D+

class _Words:
    """Helpers writing generator symbols into a free module."""

    def __init__(self, C: FiniteWaldhausenCategory, fr: FreeSquad):
        self.C, self.fr = C, fr
        self.F0, self.F1 = fr.F0, fr.F1

    def ob(self, a: str) -> CElem:
        return self.F0.zero() if a == self.C.zero else self.fr.e0(a)

    def w(self, m: str) -> CElem:
        return self.fr.e1(wname(m))

    def c(self, j: str) -> CElem:
        return self.fr.e1(cname(j))

    def s0(self, *terms: Tuple[int, CElem]) -> CElem:
        out = self.F0.zero()
        for sgn, x in terms:
            out = self.F0.add(out, x if sgn > 0 else self.F0.neg(x))
        return out

    def s1(self, *terms: Tuple[int, CElem]) -> CElem:
        out = self.F1.zero()
        for sgn, x in terms:
            out = self.F1.add(out, x if sgn > 0 else self.F1.neg(x))
        return out

    def br(self, x: CElem, y: CElem) -> CElem:
        return self.fr.bracket(x, y)


@dataclass
class Relator:
    degree: int
    relation: str          # "1" .. "9"
    label: str
    elem: CElem
    key: Tuple = ()


def relation7_instances(C: FiniteWaldhausenCategory, jobs: int = 1) -> List[Tuple[str, str, str, str, str]]:
    """All ``(j, j', a, b, c)`` forming a levelwise weak equivalence of cofiber sequences."""
    we = C.weak_equivalences
    wes = set(we)
    cofs = list(C.cofibrations)

    def for_source(j: str):
        out = []
        tj = C.triple(j)
        for jp in cofs:
            tp = C.triple(jp)
            for a in C.hom(tj.sub, tp.sub):
                if a not in wes:
                    continue
                for b in C.hom(tj.total, tp.total):
                    if b not in wes or C.comp(jp, a) != C.comp(b, j):
                        continue
                    for c in C.hom(tj.quotient_object, tp.quotient_object):
                        if c in wes and C.comp(tp.quotient_morphism, b) == C.comp(c, tj.quotient_morphism):
                            out.append((j, jp, a, b, c))
        return out

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(for_source, cofs))
    else:
        parts = [for_source(j) for j in cofs]
    return sorted(set(itertools.chain.from_iterable(parts)))


def d_star_relators(C: FiniteWaldhausenCategory, fr: FreeSquad, jobs: int = 1) -> List[Relator]:
    """Relators of D+C over the free module ``fr``, in a canonical order."""
    W = _Words(C, fr)
    ob, s0, s1, br = W.ob, W.s0, W.s1, W.br
    out: List[Relator] = []
    # (1), (2): formal boundary symbols
    for m in C.weak_equivalences:
        a, ap = C.src(m), C.dst(m)
        word = s0((-1, ob(ap)), (1, ob(a)))
        out.append(Relator(0, "1", f"(1) {m}", fr.F0.sub(fr.de1(wname(m)), word)))
    for j in C.cofibrations:
        t = C.triple(j)
        word = s0((-1, ob(t.total)), (1, ob(t.quotient_object)), (1, ob(t.sub)))
        out.append(Relator(0, "2", f"(2) {j}", fr.F0.sub(fr.de1(cname(j)), word)))
    # (4)
    for a in C.objects:
        out.append(Relator(1, "4", f"(4) 1_{a}", W.w(C.identity[a])))
    # (5)
    for a in C.objects:
        ida, za = C.identity[a], C.hom(C.zero, a)[0]
        out.append(Relator(1, "5", f"(5) {a} >-> {a} ->> *", W.c(ida)))
        if za != ida:
            out.append(Relator(1, "5", f"(5) * >-> {a} ->> {a}", W.c(za)))
    # (6)
    wes = C.weak_equivalences
    for f in wes:
        for g in wes:
            if C.src(g) != C.dst(f):
                continue
            gf = C.comp(g, f)
            out.append(Relator(1, "6", f"(6) {g} o {f}", s1((-1, W.w(gf)), (1, W.w(g)), (1, W.w(f)))))
    # (7)
    for (j, jp, a, b, c) in relation7_instances(C, jobs):
        tj, tp = C.triple(j), C.triple(jp)
        lhs = s1((1, W.w(a)), (1, W.w(c)),
                 (1, br(ob(tj.sub), s0((-1, ob(tp.quotient_object)), (1, ob(tj.quotient_object))))))
        rhs = s1((-1, W.c(jp)), (1, W.w(b)), (1, W.c(j)))
        out.append(Relator(1, "7", f"(7) {j} => {jp} via {a},{b},{c}", fr.F1.sub(lhs, rhs)))
    # (8)
    for j in C.cofibrations:
        for k in C.cofibrations:
            if C.src(k) != C.dst(j):
                continue
            u, kj = C.induced_quotient_cofibration(j, k)
            tj, tk, tkj = C.triple(j), C.triple(k), C.triple(kj)
            lhs = s1((1, W.c(k)), (1, W.c(j)))
            rhs = s1((1, W.c(kj)), (1, W.c(u)),
                     (1, br(ob(tj.sub), s0((-1, ob(tkj.quotient_object)), (1, ob(tk.quotient_object)),
                                           (1, ob(tj.quotient_object))))))
            out.append(Relator(1, "8", f"(8) {j} then {k}", fr.F1.sub(lhs, rhs)))
    # (9)
    seen = set()
    for cp in C.coproduct_list:
        a, b = cp.left, cp.right
        if C.zero in (a, b) or frozenset((a, b)) in seen:
            continue
        seen.add(frozenset((a, b)))
        rhs = s1((-1, W.c(cp.i2)), (1, W.c(cp.i1)))
        out.append(Relator(1, "9", f"(9) {a} v {b}", fr.F1.sub(br(ob(a), ob(b)), rhs)))
    return out


def d_star(C: FiniteWaldhausenCategory, jobs: int = 1, validate: bool = True) -> SquadPresentation:
    """The presentation of D+C; the consistency of every relator boundary is checked."""
    if C._presentation is not None:
        return C._presentation
    if validate:
        C.require_valid()
    fr = FreeSquad(C.e0_names(), C.e1_names())
    rels = d_star_relators(C, fr, jobs)
    r0 = [r for r in rels if r.degree == 0]
    r1 = [r for r in rels if r.degree == 1]
    P = SquadPresentation(fr, [r.elem for r in r0], [r.elem for r in r1],
                          [r.label for r in r0], [r.label for r in r1])
    P.relators = rels  # provenance
    P.require_consistent()
    C._presentation = P
    return P


def k0(C: FiniteWaldhausenCategory) -> HomotopyGroup:
    return d_star(C).pi0()


def k1(C: FiniteWaldhausenCategory) -> HomotopyGroup:
    return d_star(C).pi1()


def hopf(C: FiniteWaldhausenCategory) -> KInvariant:
    """Action of the Hopf map, i.e. the k-invariant of D+C."""
    return d_star(C).k_invariant()


def swap_map(C: FiniteWaldhausenCategory, a: str) -> str:
    """The automorphism of ``A v A`` exchanging the two factors."""
    cp = C.coproduct(a, a)
    if cp is None:
        raise SchemaError(f"{a} v {a} is not in the coproduct table")
    x = cp.obj
    sols = [t for t in C.hom(x, x) if C.comp(t, cp.i1) == cp.i2 and C.comp(t, cp.i2) == cp.i1]
    if len(sols) != 1:
        raise SchemaError(f"exchange map of {a} v {a} not found in the morphism table")
    return sols[0]


def negative_identity(C: FiniteWaldhausenCategory, a: str) -> Optional[str]:
    """``-1_A`` via the biproduct ``A v A``, when the category is additive enough.

    ``n = -1_A`` is characterized by ``nabla (1 (+) n) diag = 0`` where ``diag``
    and ``nabla`` are the diagonal and codiagonal of ``A v A``.
    """
    cp = C.coproduct(a, a)
    if cp is None:
        return None
    x, ida = cp.obj, C.identity[a]
    diag = [d for d in C.hom(a, x) if C.comp(cp.p1, d) == ida and C.comp(cp.p2, d) == ida]
    nabla = [n for n in C.hom(x, a) if C.comp(n, cp.i1) == ida and C.comp(n, cp.i2) == ida]
    if len(diag) != 1 or len(nabla) != 1:
        return None
    zero = C.zero_map(a, a)
    for n in C.hom(a, a):
        blocks = [m for m in C.hom(x, x)
                  if C.comp_chain(cp.p1, m, cp.i1) == ida and C.comp_chain(cp.p2, m, cp.i2) == n
                  and C.comp_chain(cp.p1, m, cp.i2) == zero and C.comp_chain(cp.p2, m, cp.i1) == zero]
        if blocks and C.comp_chain(nabla[0], blocks[0], diag[0]) == zero:
            return n
    return None


def check_tau(C: FiniteWaldhausenCategory, a: str, additive: bool = False) -> Dict[str, bool]:
    """``[tau_{A,A}] = <[A],[A]>`` in D+C, and ``<[A],[A]> = [-1_A]`` if ``additive``."""
    P = d_star(C)
    fr = P.free
    W = _Words(C, fr)
    if a == C.zero:
        tau = C.identity[a]
    else:
        tau = swap_map(C, a)
    if tau not in C.weak_equivalences:
        raise SchemaError(f"exchange map {tau} is not a weak equivalence")
    br = fr.bracket(W.ob(a), W.ob(a))
    out = {"tau": P.eq1(W.w(tau), br)}
    if additive:
        n = negative_identity(C, a) if a != C.zero else C.identity[a]
        if n is None:
            raise SchemaError(f"-1_{a} cannot be derived from the coproduct data")
        if n not in C.weak_equivalences:
            raise SchemaError(f"-1_{a} is not a weak equivalence")
        out["minus_one"] = P.eq1(br, W.w(n))
    return out


# ------------------------------------------------------- functors and 2-cells

class ExactFunctorData:
    """Object and morphism maps between two finite Waldhausen categories."""

    def __init__(self, source: FiniteWaldhausenCategory, target: FiniteWaldhausenCategory,
                 objects: Mapping[str, str], morphisms: Mapping[str, str]):
        self.source, self.target = source, target
        self.obj = dict(objects)
        self.mor = dict(morphisms)

    @classmethod
    def from_json(cls, data: dict, source, target) -> "ExactFunctorData":
        try:
            return cls(source, target, data["objects"], data["morphisms"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"functor JSON malformed: {exc!r}") from None

    @classmethod
    def identity(cls, C: FiniteWaldhausenCategory) -> "ExactFunctorData":
        return cls(C, C, {a: a for a in C.objects}, {m: m for m in C.morphisms})

    def compose(self, other: "ExactFunctorData") -> "ExactFunctorData":
        """``self ∘ other``."""
        return ExactFunctorData(other.source, self.target,
                                {a: self.obj[b] for a, b in other.obj.items()},
                                {m: self.mor[n] for m, n in other.mor.items()})

    def violations(self) -> List[str]:
        C, D = self.source, self.target
        v = []
        for a in C.objects:
            if self.obj.get(a) not in D.objects:
                v.append(f"object {a} has no valid image")
        for m in C.morphisms:
            if self.mor.get(m) not in D.morphisms:
                v.append(f"morphism {m} has no valid image")
        if v:
            return v
        if self.obj[C.zero] != D.zero:
            v.append("zero object not preserved")
        for m, (s, t) in C.morphisms.items():
            if D.morphisms[self.mor[m]] != (self.obj[s], self.obj[t]):
                v.append(f"image of {m} has wrong endpoints")
        for a in C.objects:
            if self.mor[C.identity[a]] != D.identity[self.obj[a]]:
                v.append(f"identity of {a} not preserved")
        for (g, f), gf in C.compose_table.items():
            if D.compose_table.get((self.mor[g], self.mor[f])) != self.mor[gf]:
                v.append(f"composition {g} ∘ {f} not preserved")
        dc, dw = set(D.cofibrations), set(D.weak_equivalences)
        for j in C.cofibrations:
            fj = self.mor[j]
            if fj not in dc:
                v.append(f"cofibration {j} not preserved")
                continue
            q, qm = C.cofibers[j]
            if D.cofibers.get(fj) != (self.obj[q], self.mor[qm]):
                v.append(f"chosen cofiber of {j} not preserved")
        for w in C.weak_equivalences:
            if self.mor[w] not in dw:
                v.append(f"weak equivalence {w} not preserved")
        return v

    def check(self) -> bool:
        return not self.violations()


def d_star_functor(F: ExactFunctorData) -> SquadMorphism:
    bad = F.violations()
    if bad:
        raise CheckFailure(f"not an exact functor: {bad[0]}", bad[0])
    P, Q = d_star(F.source), d_star(F.target)
    W = _Words(F.target, Q.free)
    im0 = {a: W.ob(F.obj[a]) for a in F.source.e0_names()}
    im1 = {}
    for m in F.source.weak_equivalences:
        im1[wname(m)] = W.w(F.mor[m])
    for j in F.source.cofibrations:
        im1[cname(j)] = W.c(F.mor[j])
    f = SquadMorphism(P, Q, im0, im1)
    f.require()
    return f


class NaturalWeakEquivalence:
    """Components ``eps(A): F(A) -> G(A)``, each a weak equivalence."""

    def __init__(self, F: ExactFunctorData, G: ExactFunctorData, components: Mapping[str, str]):
        self.F, self.G = F, G
        self.components = dict(components)

    @classmethod
    def from_json(cls, data: dict, F, G) -> "NaturalWeakEquivalence":
        try:
            return cls(F, G, data["components"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"transformation JSON malformed: {exc!r}") from None

    @classmethod
    def identity(cls, F: ExactFunctorData) -> "NaturalWeakEquivalence":
        D = F.target
        return cls(F, F, {a: D.identity[F.obj[a]] for a in F.source.objects})

    def vertical(self, other: "NaturalWeakEquivalence") -> "NaturalWeakEquivalence":
        """``other □ self`` for ``self: F => G`` and ``other: G => H``."""
        D = self.F.target
        return NaturalWeakEquivalence(self.F, other.G, {a: D.comp(other.components[a], self.components[a])
                                                        for a in self.F.source.objects})

    def whisker_left(self, H: ExactFunctorData) -> "NaturalWeakEquivalence":
        return NaturalWeakEquivalence(H.compose(self.F), H.compose(self.G),
                                      {a: H.mor[m] for a, m in self.components.items()})

    def whisker_right(self, K: ExactFunctorData) -> "NaturalWeakEquivalence":
        return NaturalWeakEquivalence(self.F.compose(K), self.G.compose(K),
                                      {b: self.components[K.obj[b]] for b in K.source.objects})

    def violations(self) -> List[str]:
        C, D = self.F.source, self.F.target
        v = []
        dw = set(D.weak_equivalences)
        for a in C.objects:
            e = self.components.get(a)
            if e is None or e not in D.morphisms:
                v.append(f"missing component at {a}")
                continue
            if D.morphisms[e] != (self.F.obj[a], self.G.obj[a]):
                v.append(f"component at {a} has wrong endpoints")
            if e not in dw:
                v.append(f"component at {a} is not a weak equivalence")
        if v:
            return v
        for m, (s, t) in C.morphisms.items():
            if D.comp(self.G.mor[m], self.components[s]) != D.comp(self.components[t], self.F.mor[m]):
                v.append(f"naturality fails at {m}")
        return v


def d_star_homotopy(eps: NaturalWeakEquivalence) -> Homotopy:
    bad = eps.violations()
    if bad:
        raise CheckFailure(f"not a natural weak equivalence: {bad[0]}", bad[0])
    f, g = d_star_functor(eps.F), d_star_functor(eps.G)
    Q = f.target
    W = _Words(eps.F.target, Q.free)
    vals = {a: Q.free.F1.neg(W.w(eps.components[a])) for a in eps.F.source.e0_names()}
    h = Homotopy(f, g, vals)
    h.require()
    return h
