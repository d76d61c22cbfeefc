from hypothesis import given, seed, strategies as st

from oracles import SEED, collect
from squadkit.nil2 import (CElem, Nil2Group, NormalSubgroup, abelianize, commutator, hat_square,
                           inverse, mul)

NAMES = ["a", "b", "c"]
G3 = Nil2Group(NAMES)

letters = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=6)


def elem_of(word):
    return G3.word([(NAMES[i], s) for i, s in word]).elem


def oracle_elem(word):
    exps, comm = collect(word, 3)
    return G3.element({NAMES[i]: e for i, e in enumerate(exps)},
                      {(NAMES[i], NAMES[j]): c for (i, j), c in comm.items()}).elem


def test_collection_oracle_many_words(rng):
    for _ in range(10_000):
        n = rng.randint(1, 3)
        word = [(rng.randrange(n), rng.choice((1, -1))) for _ in range(rng.randint(0, 6))]
        assert elem_of(word) == oracle_elem(word)


def test_basic_identities():
    a, b = G3.generator("a"), G3.generator("b")
    # b + a = a + b + [b, a]
    assert (b + a) == G3.element({"a": 1, "b": 1}, {("a", "b"): 1})
    assert commutator(a, b) == G3.element({}, {("a", "b"): -1})
    assert mul(a, inverse(a)).is_identity()
    assert abelianize(a + b + a) == [2, 1, 0]


@seed(SEED)
@given(letters, letters, letters)
def test_group_axioms(u, v, w):
    x, y, z = elem_of(u), elem_of(v), elem_of(w)
    assert G3.add(G3.add(x, y), z) == G3.add(x, G3.add(y, z))
    assert G3.add(x, G3.neg(x)).is_zero()
    assert G3.add(G3.zero(), x) == x
    c = G3.comm(x, y)
    # class two: commutators are central and bilinear
    assert G3.add(c, z) == G3.add(z, c)
    assert G3.comm(G3.add(x, z), y) == G3.add(G3.comm(x, y), G3.comm(z, y))
    assert G3.comm(x, y) == G3.neg(G3.comm(y, x))


@seed(SEED)
@given(letters, st.integers(-4, 4))
def test_multiples(u, n):
    x = elem_of(u)
    out = G3.zero()
    step = x if n >= 0 else G3.neg(x)
    for _ in range(abs(n)):
        out = G3.add(out, step)
    assert G3.mul(x, n) == out


def test_hat_square():
    assert hat_square([1, 1], [1, 1]) == hat_square([1, 0], [1, 0]) + hat_square([0, 1], [0, 1])
    assert (hat_square([1, 0], [0, 1]) + hat_square([0, 1], [1, 0])).is_zero()


def test_normal_closure_contains_conjugates(rng):
    for _ in range(200):
        gens = [elem_of([(rng.randrange(3), rng.choice((1, -1))) for _ in range(rng.randint(1, 4))])
                for _ in range(rng.randint(1, 2))]
        N = NormalSubgroup(G3, gens)
        for g in gens:
            assert N.contains(g)
            h = elem_of([(rng.randrange(3), rng.choice((1, -1))) for _ in range(4)])
            assert N.contains(G3.conj(g, h))
            assert N.contains(G3.comm(g, h))
        # an element whose abelianization is outside the span of the generators is not in N
        top = N.top_lattice()
        probe = G3.gen(rng.randrange(3))
        if not top.contains([probe.top.get(i, 0) for i in range(3)]):
            assert not N.contains(probe)


def test_normal_closure_of_commutator_is_central():
    N = NormalSubgroup(G3, [G3.comm(G3.gen(0), G3.gen(1))])
    assert N.contains(G3.mul(G3.comm(G3.gen(1), G3.gen(0)), 3))
    assert not N.contains(G3.comm(G3.gen(0), G3.gen(2)))
    assert not N.contains(G3.gen(0))


def test_normal_closure_of_generator():
    # <<a>> contains every [a, x]
    N = NormalSubgroup(G3, [G3.gen(0)])
    assert N.contains(G3.comm(G3.gen(0), G3.gen(2)))
    assert N.contains(G3.comm(G3.gen(1), G3.gen(0)))
    assert not N.contains(G3.comm(G3.gen(1), G3.gen(2)))
    M = NormalSubgroup(G3, [G3.gen(0), G3.comm(G3.gen(1), G3.gen(2))])
    assert N.issubset(M) and not M.issubset(N)
    assert M.same_as(NormalSubgroup(G3, M.generators()))


def test_celem_hash_and_eq():
    assert CElem({0: 1}, {}) == CElem({0: 1}, {})
    assert len({CElem({0: 1}, {}), CElem({0: 1}, {})}) == 1
