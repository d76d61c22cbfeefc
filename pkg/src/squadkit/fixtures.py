"""Small skeletal Waldhausen categories used as fixtures.

* :func:`pointed_sets` -- pointed sets ``S0, ..., S{N-1}`` (``Sk`` has ``k``
  points besides the basepoint), all pointed maps, cofibrations the
  injections, weak equivalences the bijections, wedge sums as coproducts
  where they fit.
* :func:`fp_vector_spaces` -- ``F_p^0, ..., F_p^n`` with all linear maps,
  cofibrations the injections, weak equivalences the isomorphisms.
* :func:`trivial` -- the category with only the zero object.

Cofibers are chosen canonically: for pointed sets the surviving points keep
their order; for vector spaces the quotient reads the non-pivot coordinates
after reduction by the reduced row echelon basis of the image.

Running ``python -m squadkit.fixtures DIR`` writes the JSON fixture corpus.
"""

from __future__ import annotations

import itertools
import json
import os
import sys
from typing import Dict, List, Sequence, Tuple

from .waldcat import Coproduct, FiniteWaldhausenCategory


# ------------------------------------------------------------ pointed sets

def _pmap_id(a: int, b: int, f: Sequence[int]) -> str:
    return f"S{a}>S{b}:" + "".join(str(x) for x in f)


def pointed_sets(N: int) -> FiniteWaldhausenCategory:
    """Pointed sets with at most ``N - 1`` non-base points."""
    if N < 1 or N > 10:
        raise ValueError("N must be between 1 and 10")
    sizes = range(N)
    objects = [f"S{k}" for k in sizes]
    maps: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {}
    morphisms = {}
    for a in sizes:
        for b in sizes:
            fs = list(itertools.product(range(b + 1), repeat=a))
            maps[(a, b)] = fs
            for f in fs:
                morphisms[_pmap_id(a, b, f)] = (f"S{a}", f"S{b}")
    identity = {f"S{a}": _pmap_id(a, a, tuple(range(1, a + 1))) for a in sizes}
    compose = {}
    for a in sizes:
        for b in sizes:
            for c in sizes:
                for f in maps[(a, b)]:
                    for g in maps[(b, c)]:
                        gf = tuple(0 if x == 0 else g[x - 1] for x in f)
                        compose[(_pmap_id(b, c, g), _pmap_id(a, b, f))] = _pmap_id(a, c, gf)
    cofs, wes, cofibers = [], [], {}
    for (a, b), fs in maps.items():
        for f in fs:
            nz = [x for x in f if x]
            if len(nz) == a and len(set(nz)) == a:
                j = _pmap_id(a, b, f)
                cofs.append(j)
                if a == b:
                    wes.append(j)
                surv = [x for x in range(1, b + 1) if x not in set(f)]
                q = tuple(surv.index(x) + 1 if x in surv else 0 for x in range(1, b + 1))
                cofibers[j] = (f"S{b - a}", _pmap_id(b, b - a, q))
    coprods = []
    for a in range(1, N):
        for b in range(a, N):
            if a + b >= N:
                continue
            s = a + b
            i1 = tuple(range(1, a + 1))
            i2 = tuple(range(a + 1, s + 1))
            p1 = tuple(x if x <= a else 0 for x in range(1, s + 1))
            p2 = tuple(x - a if x > a else 0 for x in range(1, s + 1))
            coprods.append(Coproduct(f"S{a}", f"S{b}", f"S{s}", _pmap_id(a, s, i1), _pmap_id(b, s, i2),
                                     _pmap_id(s, a, p1), _pmap_id(s, b, p2)))
    return FiniteWaldhausenCategory(objects, "S0", morphisms, identity, compose, cofs, wes,
                                    coprods, cofibers, name=f"pointed_sets_{N}")


def pointed_map(a: int, b: int, f: Sequence[int]) -> str:
    """Morphism id of the pointed map ``Sa -> Sb`` sending point ``i`` to ``f[i-1]``."""
    return _pmap_id(a, b, f)


# ------------------------------------------------------------ vector spaces

Mat = Tuple[Tuple[int, ...], ...]


def _vmap_id(a: int, b: int, m: Mat) -> str:
    return f"V{a}>V{b}:" + ",".join("".join(str(x) for x in row) for row in m)


def _rank(m: Sequence[Sequence[int]], p: int) -> int:
    return len(_rref([list(r) for r in m], p)[0])


def _rref(rows: List[List[int]], p: int) -> Tuple[List[List[int]], List[int]]:
    rows = [r[:] for r in rows]
    piv, out = [], []
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        sel = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                t = rows[i][c]
                rows[i] = [(x - t * y) % p for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    return rows[:r], piv


def fp_vector_spaces(p: int, n: int) -> FiniteWaldhausenCategory:
    """``F_p`` vector spaces of dimension at most ``n``."""
    dims = range(n + 1)
    objects = [f"V{d}" for d in dims]
    mats: Dict[Tuple[int, int], List[Mat]] = {}
    morphisms = {}
    for a in dims:
        for b in dims:
            ms = []
            for entries in itertools.product(range(p), repeat=a * b):
                ms.append(tuple(tuple(entries[i * a:(i + 1) * a]) for i in range(b)))
            if a == 0:
                ms = [tuple(() for _ in range(b))]
            mats[(a, b)] = ms
            for m in ms:
                morphisms[_vmap_id(a, b, m)] = (f"V{a}", f"V{b}")

    def ident(d):
        return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))

    identity = {f"V{d}": _vmap_id(d, d, ident(d)) for d in dims}
    compose = {}
    for a in dims:
        for b in dims:
            for c in dims:
                for f in mats[(a, b)]:
                    for g in mats[(b, c)]:
                        if b == 0:
                            gf = tuple(tuple(0 for _ in range(a)) for _ in range(c))
                        else:
                            gf = tuple(tuple(sum(g[i][k] * f[k][j] for k in range(b)) % p for j in range(a))
                                       for i in range(c))
                        compose[(_vmap_id(b, c, g), _vmap_id(a, b, f))] = _vmap_id(a, c, gf)
    cofs, wes, cofibers = [], [], {}
    for (a, b), ms in mats.items():
        for m in ms:
            cols = [[m[i][j] for i in range(b)] for j in range(a)]  # image spanned by columns
            if a and _rank(cols, p) < a:
                continue
            j = _vmap_id(a, b, m)
            cofs.append(j)
            if a == b:
                wes.append(j)
            basis, piv = _rref(cols, p) if a else ([], [])
            free = [c for c in range(b) if c not in piv]
            q = []
            for c in free:
                row = [0] * b
                row[c] = 1
                for u, pc in zip(basis, piv):
                    row[pc] = (-u[c]) % p
                q.append(tuple(row))
            cofibers[j] = (f"V{b - a}", _vmap_id(b, b - a, tuple(q) if q else tuple()))
    coprods = []
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            s = a + b
            if s > n:
                continue
            i1 = tuple(tuple(int(i == j) for j in range(a)) for i in range(s))
            i2 = tuple(tuple(int(i == a + j) for j in range(b)) for i in range(s))
            p1 = tuple(tuple(int(j == i) for j in range(s)) for i in range(a))
            p2 = tuple(tuple(int(j == a + i) for j in range(s)) for i in range(b))
            coprods.append(Coproduct(f"V{a}", f"V{b}", f"V{s}", _vmap_id(a, s, i1), _vmap_id(b, s, i2),
                                     _vmap_id(s, a, p1), _vmap_id(s, b, p2)))
    return FiniteWaldhausenCategory(objects, "V0", morphisms, identity, compose, cofs, wes,
                                    coprods, cofibers, name=f"f{p}_vector_spaces_{n}")


def linear_map(a: int, b: int, rows: Sequence[Sequence[int]]) -> str:
    """Morphism id of the ``b x a`` matrix ``rows`` as a map ``V{a} -> V{b}``."""
    if a == 0:
        rows = [()] * b
    return _vmap_id(a, b, tuple(tuple(r) for r in rows))


def trivial() -> FiniteWaldhausenCategory:
    return FiniteWaldhausenCategory(["*"], "*", {"1": ("*", "*")}, {"*": "1"}, {("1", "1"): "1"},
                                    ["1"], ["1"], [], {"1": ("*", "1")}, name="trivial")


# ------------------------------------------------------------ functors, pairings

def inclusion_functor_json(M: int, N: int) -> dict:
    """Inclusion of pointed sets of size below ``M`` into those below ``N``."""
    C = pointed_sets(M)
    return {"objects": {a: a for a in C.objects}, "morphisms": {m: m for m in C.morphisms}}


def identity_functor_json(C: FiniteWaldhausenCategory) -> dict:
    return {"objects": {a: a for a in C.objects}, "morphisms": {m: m for m in C.morphisms}}


def zero_functor_json(C: FiniteWaldhausenCategory, D: FiniteWaldhausenCategory) -> dict:
    z = D.zero
    return {"objects": {a: z for a in C.objects}, "morphisms": {m: D.identity[z] for m in C.morphisms}}


def scalar_transformation_json(p: int, n: int, s: int) -> dict:
    """Multiplication by the scalar ``s`` as a self-transformation of the identity functor."""
    comps = {}
    for d in range(n + 1):
        comps[f"V{d}"] = linear_map(d, d, [[s % p if i == j else 0 for j in range(d)] for i in range(d)])
    return {"components": comps}


def smash_pairing_json(NC: int, ND: int, NE: int) -> dict:
    """Smash product ``Sa ^ Sb = S(ab)`` with lexicographically ordered points."""
    obj, mor = [], []
    for a in range(NC):
        for b in range(ND):
            if a * b >= NE:
                raise ValueError("smash product leaves the target truncation")
            obj.append([f"S{a}", f"S{b}", f"S{a * b}"])
    for a, a2 in itertools.product(range(NC), repeat=2):
        for f in itertools.product(range(a2 + 1), repeat=a):
            for b, b2 in itertools.product(range(ND), repeat=2):
                for g in itertools.product(range(b2 + 1), repeat=b):
                    img = []
                    for i in range(1, a + 1):
                        for j in range(1, b + 1):
                            x, y = f[i - 1], g[j - 1]
                            img.append(0 if x == 0 or y == 0 else (x - 1) * b2 + y)
                    mor.append([_pmap_id(a, a2, f), _pmap_id(b, b2, g), _pmap_id(a * b, a2 * b2, img)])
    return {"objects": obj, "morphisms": mor}


def write_corpus(outdir: str) -> List[str]:
    os.makedirs(outdir, exist_ok=True)
    files = {
        "trivial.json": trivial().to_json(),
        "finsets2.json": pointed_sets(2).to_json(),
        "finsets3.json": pointed_sets(3).to_json(),
        "f2vect2.json": fp_vector_spaces(2, 2).to_json(),
        "f3vect1.json": fp_vector_spaces(3, 1).to_json(),
        "smash_3_2_3.json": smash_pairing_json(3, 2, 3),
        "incl_2_3.json": inclusion_functor_json(2, 3),
        "id_f3vect1.json": identity_functor_json(fp_vector_spaces(3, 1)),
        "minus_one_f3vect1.json": scalar_transformation_json(3, 1, -1),
        "one_generator.json": {"e0": ["g"], "e1": [], "r0": [], "r1": []},
    }
    written = []
    for name, data in files.items():
        path = os.path.join(outdir, name)
        with open(path, "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=False)
            fh.write("\n")
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_corpus(sys.argv[1] if len(sys.argv) > 1 else "fixtures"):
        print(p)
