import random

from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_instance, sample_points
from miqpa.constants import r_const, s_bar
from miqpa.lattice import LatticeBasis
from miqpa.lp import Polyhedron, width_along
from miqpa.instance import MiqpInstance
from miqpa.presolve import presolve_full_dim
from miqpa.rational import Matrix, norm_sq, unit, vadd, vscale, vsub
from miqpa.spherical import Aligned, AlignedPair, Flat, SphericalForm, aligned_or_flat, is_aligned, to_spherical_form


def spherical_cases(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng, n=rng.randint(2, 4))
        J = presolve_full_dim(inst).instance
        if J.n == 0 or J.H.is_zero():
            continue
        out.append((rng, J, to_spherical_form(J)))
    return out


def test_spherical_form_invariants():
    for rng, J, sf in spherical_cases(51, 12):
        assert sf.r_d == r_const(sf.d)
        assert all(abs(sf.D[i]) >= abs(sf.D[i + 1]) for i in range(sf.d - 1))
        assert sf.inner_certified() and sf.outer_certified()
        for x in sample_points(rng, J, 10):
            y, z = sf.from_x(x)
            assert sf.objective(y, z) == J.objective(x)
            assert sf.to_x(y, z) == x
            assert sf.lattice.contains_coset(y)


def test_diagonal_square_example():
    inst = MiqpInstance.build([[1, 0], [0, -1]], [0, 0], [], [], 0, [(0, 1), (0, 1)])
    sf = to_spherical_form(inst)
    assert sf.d == 2 and sf.k == 2 and sf.p == 0
    rng = random.Random(52)
    for _ in range(10):
        x = (mpq(rng.randint(0, 9), 9), mpq(rng.randint(0, 9), 9))
        assert sf.objective(*sf.from_x(x)) == inst.objective(x)


def test_integer_example():
    inst = MiqpInstance.build([[1, 0], [0, 0]], [0, 0], [], [], 1, [(-2, 2), (-1, 3)])
    sf = to_spherical_form(inst)
    assert 1 <= sf.d <= 2 and sf.p == 1
    assert sf.inner_certified() and sf.outer_certified()


def toy_form(B, a=(0,)):
    d = len(a)
    return SphericalForm(D=(1,) + (0,) * (d - 1), c=(0,) * d, l=(), lattice=LatticeBasis(Matrix(B)), a=a,
                         r_d=r_const(d))


def test_aligned_when_no_integers():
    for _, _, sf in spherical_cases(53, 10):
        if sf.p:
            continue
        res = aligned_or_flat(sf)
        e = vscale(mpq(3, 4), unit(sf.d, 0))
        assert res == Aligned(AlignedPair(vadd(sf.a, e), vsub(sf.a, e)))


def test_fine_lattice_is_aligned():
    sf = toy_form([[mpq(1, 100)]])
    res = aligned_or_flat(sf)
    assert isinstance(res, Aligned) and is_aligned(res.pair, sf)


def test_coarse_lattice_is_flat():
    sf = toy_form([[1000]])
    # no point of 2 * 1000 Z within 1/4 of +-3/4
    assert all(abs(2000 * t - c) > mpq(1, 4) for t in range(-2, 3) for c in (mpq(3, 4), mpq(-3, 4)))
    res = aligned_or_flat(sf)
    assert isinstance(res, Flat)
    assert (res.v[0] * 1000).denominator == 1
    # any polytope between B(0,1) and B(0,r_1) is flat along v
    P = Polyhedron.box([-sf.r_d], [sf.r_d])
    assert width_along(P, res.v) <= sf.r_d * s_bar(1)


def gap_on_three_points(D, c, l, yp, zp, ym, zm):
    def f(y, z):
        return sum(di * yi * yi for di, yi in zip(D, y)) + sum(a * b for a, b in zip(c, y)) + sum(
            a * b for a, b in zip(l, z))
    ymid = vscale(mpq(1, 2), vadd(yp, ym))
    zmid = vscale(mpq(1, 2), vadd(zp, zm))
    vals = [f(yp, zp), f(ym, zm), f(ymid, zmid)]
    return max(vals) - min(vals)


def test_aligned_gap_bound_on_real_pairs():
    seen = 0
    for rng, J, sf in spherical_cases(54, 60):
        res = aligned_or_flat(sf)
        if not isinstance(res, Aligned):
            continue
        assert is_aligned(res.pair, sf)
        nz = len(sf.l)
        zp = tuple(mpq(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(nz))
        zm = tuple(mpq(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(nz))
        gap = gap_on_three_points(sf.D, sf.c, sf.l, res.pair.y_plus, zp, res.pair.y_minus, zm)
        assert gap >= mpq(3, 16) * abs(sf.D[0])
        seen += 1
    assert seen >= 10


small = st.fractions(min_value=-8, max_value=8, max_denominator=8)


@st.composite
def constructed_pair(draw):
    d = draw(st.integers(1, 4))
    D = sorted((draw(small) for _ in range(d)), key=lambda v: -abs(v))
    c = [draw(small) for _ in range(d)]
    ym = [draw(small) for _ in range(d)]
    lateral = [draw(st.fractions(min_value=-1, max_value=1, max_denominator=8)) for _ in range(d - 1)]
    scale = mpq(1)
    while sum(t * t for t in lateral) * scale * scale > mpq(1, 4):
        scale = scale / 2
    step = draw(st.fractions(min_value=1, max_value=3, max_denominator=8))
    yp = [ym[0] + step] + [ym[i + 1] + lateral[i] * scale for i in range(d - 1)]
    nz = draw(st.integers(0, 2))
    l = [draw(small) for _ in range(nz)]
    zp = [draw(small) for _ in range(nz)]
    zm = [draw(small) for _ in range(nz)]
    return [tuple(mpq(v) for v in t) for t in (D, c, l, yp, zp, ym, zm)]


@settings(max_examples=100, deadline=None)
@given(constructed_pair())
def test_aligned_gap_bound_constructed(case):
    D, c, l, yp, zp, ym, zm = case
    assert yp[0] - ym[0] >= 1 and norm_sq(vsub(yp[1:], ym[1:])) <= mpq(1, 4)
    assert gap_on_three_points(D, c, l, yp, zp, ym, zm) >= mpq(3, 16) * abs(D[0])
