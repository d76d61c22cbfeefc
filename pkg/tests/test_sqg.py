import copy

import pytest

from oracles import size_of
from squadkit.errors import CheckFailure, SchemaError
from squadkit.fixtures import fp_vector_spaces, pointed_sets, smash_pairing_json
from squadkit.squad import FreeSquad, SquadPresentation
from squadkit.sqg import (BiexactFunctorData, C1SG, Pairing, TensorWithZnil, ZeroFree, ZnilSG,
                          ee_add, ee_scale, h_znil, sg_from_squad, square_group_violations)
from squadkit.waldcat import d_star

_cats = {}


def ps(n):
    if n not in _cats:
        _cats[n] = pointed_sets(n)
    return _cats[n]


_pairings = {}


def smash(a, b, c):
    if (a, b, c) not in _pairings:
        js = smash_pairing_json(a, b, c)
        _pairings[(a, b, c)] = Pairing(BiexactFunctorData.from_json(js, ps(a), ps(b), ps(c)))
    return _pairings[(a, b, c)]


def word0(rng, F0, n, length=4):
    out = F0.zero()
    for _ in range(rng.randint(0, length)):
        out = F0.add(out, F0.gen(rng.randrange(n), rng.choice((1, -1))))
    return out


def word1(rng, fr, length=3):
    out = fr.F1.zero()
    for _ in range(rng.randint(0, length)):
        if fr.n1 and rng.random() < 0.6:
            x = fr.F1.gen(rng.randrange(fr.n1), rng.choice((1, -1)))
        else:
            x = fr.bracket(word0(rng, fr.F0, fr.n0, 2), word0(rng, fr.F0, fr.n0, 2))
        out = fr.F1.add(out, x)
    return out


def rand_ee(rng, gens, k=2):
    out = {}
    for _ in range(rng.randint(0, k)):
        out = ee_add(out, ee_scale(rng.choice((1, -1, 2)), rng.choice(gens)))
    return out


def rand_elem(rng, M, length=3):
    gens = M.e_generators()
    out = M.e_zero()
    for _ in range(rng.randint(0, length)):
        g = rng.choice(gens)
        out = M.e_add(out, g if rng.random() < 0.5 else M.e_neg(g))
    return out


def law_suite(rng, M, rounds):
    aas = M.ee_generators()
    for _ in range(rounds):
        xs = [rand_elem(rng, M) for _ in range(3)]
        aa = [rand_ee(rng, aas) for _ in range(2)]
        bad = square_group_violations(M, xs, aa)
        assert not bad, bad


# ---------------------------------------------------------------- square groups

def test_znil_laws(rng):
    law_suite(rng, ZnilSG(["a", "b", "c"]), 1000)


def test_znil_cross_effect_is_reversed_tensor():
    M = ZnilSG(["a", "b"])
    a, b = M.e_generators()
    assert M.cross(a, b) == {(1, 0): 1}
    assert M.H(a) == {} and M.H(M.e_add(a, a)) == {(0, 0): 1}
    assert M.P({(0, 1): 1}) == M.e_comm(b, a)


def presentations():
    one = SquadPresentation(FreeSquad(["g"], []))
    free = SquadPresentation(FreeSquad(["a", "b"], []))
    return {"one": one, "free": free, "ps3": d_star(ps(3)), "f3v1": d_star(fp_vector_spaces(3, 1))}


@pytest.mark.parametrize("name", ["one", "free", "ps3", "f3v1"])
def test_sg_from_squad_generators(name):
    q = sg_from_squad(presentations()[name])
    assert q.violations() == []


def test_sg_from_squad_random_laws(rng):
    """Laws on 10^3 random triples spread over the two square groups of several presentations."""
    Ps = presentations()
    count = 0
    for name in ("one", "free", "ps3", "f3v1"):
        q = sg_from_squad(Ps[name])
        law_suite(rng, q.M0, 150)
        law_suite(rng, q.M1, 100)
        count += 250
        fr = q.P.free
        for _ in range(100):
            y = word1(rng, fr)
            assert q.M0.ee_eq(q.M0.H(fr.boundary(y)), q.M1.H(y))
            a = rand_ee(rng, q.M1.ee_generators())
            assert q.M0.e_eq(fr.boundary(q.M1.P(a)), q.M0.P(a))
    assert count >= 1000


def test_non_zero_free_input_raises():
    bad = SquadPresentation.build(["a"], ["u"], r0=[[["a", 2]]])
    with pytest.raises(SchemaError, match="non-0-free"):
        ZeroFree(bad)
    missing = SquadPresentation.build(["a"], ["u"])
    with pytest.raises(SchemaError, match="non-0-free"):
        ZeroFree(missing)


# ---------------------------------------------------------------- M (.) Z_nil[E]

def test_tensor_laws_znil(rng):
    law_suite(rng, TensorWithZnil(ZnilSG(["a", "b"]), ["e", "f", "g"]), 1000)


def test_tensor_laws_c1(rng):
    zf = ZeroFree(d_star(ps(3)))
    law_suite(rng, TensorWithZnil(C1SG(zf), ["e", "f"]), 150)


def test_tensor_twist_and_bar(rng):
    M = ZnilSG(["a", "b"])
    T = TensorWithZnil(M, ["e", "f", "g"])
    gens = M.ee_generators()
    for _ in range(300):
        a = rand_ee(rng, gens)
        e, f = rng.randrange(3), rng.randrange(3)
        lifted = {(k, e, f): v for k, v in a.items()}
        # T on the tensor is T of M on the first factor and the swap on the second
        assert T.ee_eq(T.T(lifted), {(k, f, e): v for k, v in M.T(a).items()})
        b = T.bar(a, e, f)
        if e != f:
            assert T.e_eq(b, T.bar(M.T(a), f, e))
            # H(a (x-bar) (e (x) f)) = a (x) (e (x) f) + T(a) (x) (f (x) e)
            expect = ee_add(lifted, {(k, f, e): v for k, v in M.T(a).items()})
            assert T.ee_eq(T.H(b), expect)
        x = rand_elem(rng, T)
        assert T.e_eq(T.e_add(x, b), T.e_add(b, x))


def test_comparison_maps_are_homomorphisms(rng):
    M = ZnilSG(["a", "b"])
    T = TensorWithZnil(M, ["e", "f"])
    for _ in range(300):
        x, y = rand_elem(rng, M), rand_elem(rng, M)
        e = rng.randrange(2)
        assert T.e_eq(T.gen(M.e_add(x, y), e), T.e_add(T.gen(x, e), T.gen(y, e)))
        assert T.ee_eq(T.H(T.gen(x, e)), {(k, e, e): v for k, v in M.H(x).items()})
        a = rand_ee(rng, M.ee_generators())
        assert T.e_eq(T.P({(k, e, e): v for k, v in a.items()}), T.gen(M.P(a), e))


def test_unit_case(rng):
    M = ZnilSG(["a", "b", "c"])
    T = TensorWithZnil(M, ["u"])
    for _ in range(300):
        x, y = rand_elem(rng, M), rand_elem(rng, M)
        s = T.e_add(T.gen(x, 0), T.gen(y, 0))
        assert not s.central and s.family.get(0, M.e_zero()) == M.e_add(x, y)
        assert T.H(T.gen(x, 0)) == {(k, 0, 0): v for k, v in M.H(x).items()}


# ---------------------------------------------------------------- pairings

@pytest.mark.parametrize("shape", [(3, 2, 3), (2, 3, 3)])
def test_smash_pairing_cells(shape):
    assert smash(*shape).verify() == []


def size0(fr, x):
    tot = 0
    for i, v in x.top.items():
        name = fr.name0(i)
        if not name.startswith("d("):
            tot += v * size_of(name)
    return tot


@pytest.mark.parametrize("shape", [(3, 2, 3), (2, 3, 3)])
def test_k0_product_is_multiplication(rng, shape):
    pr = smash(*shape)
    fC, fD, fE = pr.PC.free, pr.PD.free, pr.PE.free
    for _ in range(300):
        x = word0(rng, fC.F0, fC.n0)
        z = word0(rng, fD.F0, fD.n0)
        assert size0(fE, pr.phi00(x, z)) == size0(fC, x) * size0(fD, z)
    prods = pr.k_products()
    sC = size0(fC, pr.PC.pi0().representatives[0])
    sD = size0(fD, pr.PD.pi0().representatives[0])
    sE = size0(fE, pr.PE.pi0().representatives[0])
    assert prods["00"] == {(0, 0): (sC * sD * sE,)}


def _bar_lin(T, a, p, l):
    out = T.e_zero()
    for i, pi in p.items():
        for j, lj in l.items():
            if pi * lj:
                out = T.e_add(out, T.bar(ee_scale(pi * lj, a), i, j))
    return out


def _split_tensor(rng, T, y, hy, letters):
    """``y (.) word`` built by random binary splitting; independent of the left fold."""
    if len(letters) == 1:
        k, s = letters[0]
        g = T.gen(y, k)
        return g if s > 0 else T.e_add(T.e_neg(g), T.bar(hy, k, k))
    m = rng.randint(1, len(letters) - 1)
    p, l = letters[:m], letters[m:]
    pv, lv = {}, {}
    for k, s in p:
        pv[k] = pv.get(k, 0) + s
    for k, s in l:
        lv[k] = lv.get(k, 0) + s
    return T.e_add(T.e_add(_split_tensor(rng, T, y, hy, p), _split_tensor(rng, T, y, hy, l)),
                   _bar_lin(T, hy, pv, lv))


def _letters_word(rng, fr, n):
    letters = [(rng.randrange(n), rng.choice((1, -1))) for _ in range(rng.randint(1, 5))]
    z = fr.F0.zero()
    for k, s in letters:
        z = fr.F0.add(z, fr.F0.gen(k, s))
    return letters, z


@pytest.mark.parametrize("shape", [(3, 2, 3), (2, 3, 3)])
def test_fold_matches_normal_form(rng, shape):
    pr = smash(*shape)
    fC, fD = pr.PC.free, pr.PD.free
    T10, T00, T01 = pr.tensor10(), pr.tensor00(), pr.tensor01()
    for _ in range(300):
        y = word1(rng, fC)
        letters, z = _letters_word(rng, fD, fD.n0)
        hy = h_znil(pr.zC.sigma(fC.boundary(y)))
        assert pr.PE.eq1(pr.phi10(y, z), pr.phi10_nf(_split_tensor(rng, T10, y, hy, letters)))

        xl, x = _letters_word(rng, fC, fC.n0)
        xs = pr.zC.sigma(x)
        assert pr.PE.eq0(pr.phi00(x, z), pr.phi00_nf(_split_tensor(rng, T00, xs, h_znil(xs), letters)))

        # the Z_nil factor sits on the left, where the symbol is linear
        yd = word1(rng, fD)
        t = T01.e_zero()
        for k, s in xl:
            g = T01.gen(yd, k)
            t = T01.e_add(t, g if s > 0 else T01.e_neg(g))
        assert pr.PE.eq1(pr.phi01(x, yd), pr.phi01_nf(t))


def zero_pairing_json(C, D, E):
    z = E.identity[E.zero]
    return {"objects": [[a, b, E.zero] for a in C.objects for b in D.objects],
            "morphisms": [[f, g, z] for f in C.morphisms for g in D.morphisms]}


def test_pairing_into_zero():
    C, E = ps(2), ps(3)
    pr = Pairing(BiexactFunctorData.from_json(zero_pairing_json(C, C, E), C, C, E))
    assert pr.verify() == []
    prods = pr.k_products()
    assert all(set(v) == {0} for tab in prods.values() for v in tab.values())
    x = pr.PC.free.e0("S1")
    assert pr.phi00(x, x).is_zero()


def test_non_biexact_rejected():
    js = copy.deepcopy(smash_pairing_json(3, 2, 3))
    for row in js["objects"]:
        if row[0] == "S1" and row[1] == "S0":
            row[2] = "S1"
    with pytest.raises((CheckFailure, SchemaError)):
        Pairing(BiexactFunctorData.from_json(js, ps(3), ps(2), ps(3)))
