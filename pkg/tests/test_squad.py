import pytest

from squadkit.errors import InconsistentPresentation, SchemaError
from squadkit.squad import (FreeSquad, Homotopy, SquadMorphism, SquadPresentation, compose_vertical,
                            whisker_left, whisker_right)


def free_pres(n0, n1, tag="x"):
    return SquadPresentation(FreeSquad([f"{tag}{i}" for i in range(n0)], [f"{tag}e{a}" for a in range(n1)]))


def rand0(rng, fr, length=4):
    F0 = fr.F0
    out = F0.zero()
    for _ in range(rng.randint(0, length)):
        out = F0.add(out, F0.gen(rng.randrange(fr.k0), rng.choice((1, -1))))
    return out


def rand1(rng, fr, length=3):
    F1 = fr.F1
    out = F1.zero()
    for _ in range(rng.randint(0, length)):
        if fr.n1 and rng.random() < 0.6:
            x = F1.gen(rng.randrange(fr.n1), rng.choice((1, -1)))
        else:
            x = fr.bracket(rand0(rng, fr, 2), rand0(rng, fr, 2))
        out = F1.add(out, x)
    return out


# ---------------------------------------------------------------- laws of the free module

def test_stable_quadratic_module_laws(rng):
    for _ in range(1000):
        fr = FreeSquad([f"g{i}" for i in range(rng.randint(1, 3))], [f"e{a}" for a in range(rng.randint(0, 3))])
        F0, F1 = fr.F0, fr.F1
        x, y = rand0(rng, fr), rand0(rng, fr)
        c, d = rand1(rng, fr), rand1(rng, fr)
        # d<x, y> = [y, x]
        assert fr.boundary(fr.bracket(x, y)) == F0.comm(y, x)
        # <dc, dd> = [d, c]
        assert fr.bracket(fr.boundary(c), fr.boundary(d)) == F1.comm(d, c)
        # <x, y> + <y, x> = 0
        assert F1.add(fr.bracket(x, y), fr.bracket(y, x)).is_zero()
        # boundary is a homomorphism
        assert fr.boundary(F1.add(c, d)) == F0.add(fr.boundary(c), fr.boundary(d))
        # action m^n = m + <n, dm>
        assert fr.act(c, x) == F1.add(c, fr.bracket(x, fr.boundary(c)))


def test_centrality_assertions(rng):
    for _ in range(1000):
        fr = FreeSquad([f"g{i}" for i in range(rng.randint(1, 3))], [f"e{a}" for a in range(rng.randint(1, 3))])
        F0, F1 = fr.F0, fr.F1
        x, y, z = rand0(rng, fr), rand0(rng, fr), rand0(rng, fr)
        a, b, c = rand1(rng, fr), rand1(rng, fr), rand1(rng, fr)
        assert F0.comm(x, F0.comm(y, z)).is_zero()
        assert F1.comm(a, F1.comm(b, c)).is_zero()
        assert F1.comm(a, fr.bracket(y, z)).is_zero()
        # <y, y> lies in ker d, hence is central
        kd = fr.bracket(y, y)
        assert fr.boundary(kd).is_zero()
        assert F1.comm(a, kd).is_zero()


def test_dump_load_roundtrip(rng):
    for _ in range(200):
        fr = FreeSquad(["g", "h"], ["e", "f"])
        x, c = rand0(rng, fr), rand1(rng, fr)
        assert fr.load0(fr.dump0(x)) == x
        assert fr.load1(fr.dump1(c)) == c


# ---------------------------------------------------------------- homotopy groups

def one_generator():
    return free_pres(1, 0, "g")


def test_one_generator_example():
    P = one_generator()
    assert P.pi0().describe() == "Z"
    pi1 = P.pi1()
    assert pi1.describe() == "Z/2"
    fr = P.free
    gg = fr.bracket(fr.e0("g0"), fr.e0("g0"))
    assert pi1.coordinates(gg) == (1,)
    assert P.eq1(fr.F1.mul(gg, 2), fr.F1.zero())
    assert not P.eq1(gg, fr.F1.zero())
    k = P.k_invariant()
    assert k.is_surjective() and not k.is_zero()


def test_killing_the_generator():
    # a, u with du = a: everything is contractible
    P = SquadPresentation.build(["a"], ["u"], r0=[[["d(u)", 1], ["a", -1]]])
    assert P.pi0().is_trivial() and P.pi1().is_trivial()


def test_empty_presentation():
    P = free_pres(0, 0)
    assert P.pi0().is_trivial() and P.pi1().is_trivial()


def test_inconsistent_presentation_rejected():
    # r1 has boundary a, which is not a consequence of r0
    P = SquadPresentation.build(["a"], ["u"], r1=[{"w": {"gens": [["u", 1]], "comms": []}}])
    assert not P.is_consistent()
    with pytest.raises(InconsistentPresentation):
        P.pi0()


def test_json_roundtrip():
    P = SquadPresentation.build(["a", "b"], ["u"], r0=[[["d(u)", 1], ["a", -1], ["b", 1]]])
    Q = SquadPresentation.from_json(P.to_json())
    assert Q.to_json() == P.to_json()
    assert Q.pi0().describe() == P.pi0().describe()


def test_bad_json_is_schema_error():
    with pytest.raises(SchemaError):
        SquadPresentation.from_json({"e0": ["a"], "e1": [], "r0": [[["zz", 1]]], "r1": []})


# ---------------------------------------------------------------- morphisms

def test_times_two_map():
    P = one_generator()
    fr = P.free
    f = SquadMorphism(P, P, {"g0": fr.F0.mul(fr.e0("g0"), 2)}, {})
    assert f.check()
    assert f.induced_pi0() == [[2]]
    assert f.induced_pi1() == [[0]]


def random_morphism(rng, P, Q):
    sf, tf = P.free, Q.free
    return SquadMorphism(P, Q, {e: rand0(rng, tf, 3) for e in sf.E0.names},
                         {e: rand1(rng, tf, 2) for e in sf.E1.names})


def random_homotopy(rng, f):
    """A random homotopy out of ``f`` with free target; ``g`` is forced by the laws."""
    P, Q = f.source, f.target
    sf, tf = P.free, Q.free
    vals = {e: rand1(rng, tf, 2) for e in sf.E0.names}
    bvals = {e: rand1(rng, tf, 2) for e in sf.E1.names}
    g = SquadMorphism(P, Q,
                      {e: tf.F0.add(f.f0(sf.e0(e)), tf.boundary(vals[e])) for e in sf.E0.names},
                      {e: tf.F1.add(f.f1(sf.e1(e)), bvals[e]) for e in sf.E1.names})
    return Homotopy(f, g, vals, bvals)


def test_morphism_composition_laws(rng):
    for _ in range(300):
        P, Q, R = free_pres(rng.randint(1, 2), rng.randint(0, 2), "p"), free_pres(2, 1, "q"), free_pres(2, 1, "r")
        f, g = random_morphism(rng, P, Q), random_morphism(rng, Q, R)
        gf = g.compose(f)
        assert f.check() and g.check() and gf.check()
        x, c = rand0(rng, P.free), rand1(rng, P.free)
        assert gf.f0(x) == g.f0(f.f0(x))
        assert gf.f1(c) == g.f1(f.f1(c))
        assert f.f1(P.free.bracket(x, x)) == Q.free.bracket(f.f0(x), f.f0(x))


def test_homotopy_laws(rng):
    for _ in range(1000):
        P, Q = free_pres(rng.randint(1, 2), rng.randint(0, 2), "p"), free_pres(rng.randint(1, 2), 1, "q")
        f = random_morphism(rng, P, Q)
        alpha = random_homotopy(rng, f)
        assert alpha.check()
        x, y = rand0(rng, P.free), rand0(rng, P.free)
        F1, F0 = Q.free.F1, Q.free.F0
        # first law on arbitrary elements
        lhs = alpha(P.free.F0.add(x, y))
        delta = F0.add(F0.neg(f.f0(x)), alpha.g.f0(x))
        rhs = F1.add(F1.add(alpha(x), alpha(y)), Q.free.bracket(f.f0(y), delta))
        assert lhs == rhs
        # second law on arbitrary elements
        assert alpha.g.f0(x) == F0.add(f.f0(x), Q.free.boundary(alpha(x)))


def test_two_category_identities(rng):
    for _ in range(1000):
        P, Q = free_pres(rng.randint(1, 2), rng.randint(0, 1), "p"), free_pres(2, 1, "q")
        f = random_morphism(rng, P, Q)
        alpha = random_homotopy(rng, f)
        beta = random_homotopy(rng, alpha.g)
        ba = compose_vertical(beta, alpha)
        assert ba.check()
        x = rand0(rng, P.free)
        assert ba(x) == Q.free.F1.add(alpha(x), beta(x))
        assert Homotopy.zero(f).check()
        assert Homotopy.zero(f)(x).is_zero()
        if rng.random() < 0.25:
            R = free_pres(1, 1, "r")
            h = random_morphism(rng, Q, R)
            K = free_pres(1, 1, "k")
            k = random_morphism(rng, K, P)
            hl = whisker_left(h, alpha)
            wr = whisker_right(alpha, k)
            assert hl.check() and wr.check()
            assert hl(x) == h.f1(alpha(x))
            z = rand0(rng, K.free)
            assert wr(z) == alpha(k.f0(z))
