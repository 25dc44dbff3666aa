"""Region calculus: exact disk identities, cover semantics, soundness."""

import math

import numpy as np
import pytest

from srgkit import InputError
from srgkit import region as rg

from oracles import ball_samples

RNG = np.random.default_rng


# -- exact disk algebra -------------------------------------------------------


def test_disk_sum_exact():
    a, b = rg.disk(1.0, 0.5), rg.disk(-2.0, 1.5)
    s = rg.disk_sum(a, b)
    assert s.upper == ((-1.0, 2.0),)


def test_disk_scale_shift_exact():
    d = rg.disk_between(-2.0, -1.0)
    assert d.scaled(2.0).upper == ((-3.0, 1.0),)
    assert d.scaled(-1.0).upper == ((1.5, 0.5),)
    assert d.shifted(1.0).upper == ((-0.5, 0.5),)


def test_disk_inversion_identity():
    # D[mu, lambda]^{-1} = D[1/lambda, 1/mu] for 0 < mu <= lambda
    for mu, lam in [(1.0, 2.0), (0.25, 4.0), (3.0, 3.0)]:
        inv = rg.disk_between(mu, lam).inverted()
        (c, r), = inv.upper
        assert c == pytest.approx((1 / mu + 1 / lam) / 2)
        assert r == pytest.approx((1 / mu - 1 / lam) / 2)
    # negative-axis disk mirrors
    inv = rg.disk_between(-2.0, -1.0).inverted()
    (c, r), = inv.upper
    assert (c - r, c + r) == pytest.approx((-1.0, -0.5))


def test_disk_inversion_zero_inside():
    inv = rg.disk_between(-0.5, 0.5).inverted()
    assert inv.upper == ()
    assert inv.contains_infinity
    (c, r), = inv.lower
    assert (c, r) == pytest.approx((0.0, 2.0))
    assert inv.contains(3.0) and not inv.contains(1.0)


def test_disk_inversion_scale_zero_rejected():
    with pytest.raises(InputError):
        rg.disk(1.0, 1.0).scaled(0.0)


def test_empty_region_is_first_class():
    e = rg.DiskAlgebraRegion.empty()
    assert e.is_empty()
    assert e.to_cover(0.1).is_empty


# -- to_cover -----------------------------------------------------------------


def test_to_cover_unit_disk():
    cov = rg.disk(0.0, 1.0).to_cover(0.01)
    eps = cov.epsilon
    assert np.all(np.abs(cov.points) <= 1 + eps + 1e-12)
    zs = ball_samples(rg.CoverRegion(np.array([0j]), 1.0), 2000, RNG(0))
    assert np.all(cov.covers(zs, slack=1e-12))


def test_to_cover_degenerate_point():
    cov = rg.disk(1.0, 0.0).to_cover(0.01)
    assert cov.points.tolist() == [1.0 + 0.0j]
    assert cov.epsilon == 0.0


def test_to_cover_annulus_membership_spotcheck():
    # cover of D[1,2] \ D_0.2(1.5) agrees with exact membership at random points
    reg = rg.DiskAlgebraRegion(((1.5, 0.5),), ((1.5, 0.2),))
    cov = reg.to_cover(0.01)
    rng = RNG(1)
    zs = rng.uniform(0.8, 2.2, 1000) + 1j * rng.uniform(-0.7, 0.7, 1000)
    inside = reg.contains(zs)
    covered = cov.covers(zs, slack=1e-12)
    # every true member is covered; points far outside are not
    assert np.all(covered[inside])
    far = ~cov.covers(zs, slack=2 * cov.epsilon)
    assert not np.any(inside[far])


def test_to_cover_requires_positive_resolution():
    with pytest.raises(InputError):
        rg.to_cover(rg.disk(0, 1), -1.0)


# -- pointwise maps -----------------------------------------------------------


def test_scale_real_examples():
    cov = rg.disk(0, 1).to_cover(0.02)
    doubled = rg.scale_real(cov, 2.0)
    assert rg.rmin(doubled) == pytest.approx(2.0, abs=4 * cov.epsilon)

    seg = rg.disk_between(1, 2).to_cover(0.02)
    neg = rg.scale_real(seg, -1.0)
    assert neg.points.real.max() <= -1 + 3 * cov.epsilon
    assert neg.points.real.min() >= -2 - 3 * cov.epsilon

    pts = rg.CoverRegion.from_points([3 + 4j], 0.1)
    half = rg.scale_real(pts, 0.5)
    assert half.epsilon == pytest.approx(0.05)
    assert np.any(np.isclose(half.points, 1.5 + 2j))


def test_scale_real_zero_rejected():
    with pytest.raises(InputError):
        rg.scale_real(rg.CoverRegion.single(1.0), 0.0)


def test_shift_real_examples():
    cov = rg.disk(0, 1).to_cover(0.02)
    sh = rg.shift_real(cov, 1.0)
    assert abs(np.mean(sh.points.real) - 1.0) < 0.05
    assert sh.epsilon == cov.epsilon
    same = rg.shift_real(cov, 0.0)
    assert np.array_equal(same.points, cov.points)


def test_mobius_inverse_disk():
    cov = rg.disk_between(1, 2).to_cover(0.005)
    inv = rg.mobius_inverse(cov)
    # image is D[1/2, 1]: endpoints map 1 -> 1, 2 -> 0.5
    assert inv.minmod >= 0.5 - 2 * inv.epsilon
    assert rg.rmin(inv) <= 1.0 + 3 * inv.epsilon
    rng = RNG(11)
    zs = 0.75 + 0.25 * np.sqrt(rng.uniform(0, 1, 4000)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 4000))
    assert np.all(inv.covers(zs, slack=1e-9))


def test_mobius_inverse_unit_modulus_fixed():
    z = np.exp(1j * np.pi / 4)
    cov = rg.CoverRegion.from_points([z], 0.0)
    inv = rg.mobius_inverse(cov)
    assert np.allclose(np.sort_complex(inv.points), np.sort_complex(np.array([np.conj(z), z])))


def test_mobius_involution_superset():
    rng = RNG(2)
    pts = rng.uniform(0.5, 2, 60) * np.exp(1j * rng.uniform(-np.pi, np.pi, 60))
    cov = rg.CoverRegion.from_points(pts, 0.01)
    twice = rg.mobius_inverse(rg.mobius_inverse(cov))
    assert np.all(twice.covers(cov.points, slack=1e-9))


def test_mobius_inverse_near_zero_gives_infinity():
    cov = rg.CoverRegion.from_points([0.0, 1.0], 0.05)
    inv = rg.mobius_inverse(cov)
    assert inv.contains_infinity


# -- sums and products --------------------------------------------------------


def test_minkowski_sum_disks():
    a = rg.disk(1.0, 0.5).to_cover(0.05)
    b = rg.disk(-3.0, 1.0).to_cover(0.05)
    s = rg.minkowski_sum(a, b)
    assert s.epsilon == pytest.approx(a.epsilon + b.epsilon)
    target = rg.disk(-2.0, 1.5)
    assert np.all(target.contains(s.points, tol=s.epsilon + 1e-12))
    # sampled true sums are covered
    rng = RNG(3)
    zs = ball_samples(a, 4000, rng) + ball_samples(b, 4000, rng)
    assert np.all(s.covers(zs, slack=1e-12))


def test_minkowski_sum_rasterized_path_is_sound():
    # large clouds switch to the grid evaluation: fatter but still a cover
    a = rg.disk(1.0, 0.5).to_cover(0.02)
    b = rg.disk(-3.0, 1.0).to_cover(0.02)
    assert a.points.size * b.points.size > 4_000_000
    s = rg.minkowski_sum(a, b)
    rng = RNG(30)
    zs = ball_samples(a, 6000, rng) + ball_samples(b, 6000, rng)
    assert np.all(s.covers(zs, slack=1e-12))
    assert np.all(rg.disk(-2.0, 1.5).contains(s.points, tol=0.2))


def test_minkowski_sum_with_zero_is_identity():
    a = rg.disk_between(0, 1).to_cover(0.05)
    s = rg.minkowski_sum(a, rg.CoverRegion.zero())
    assert np.array_equal(np.sort_complex(s.points), np.sort_complex(a.points))


def test_minkowski_sum_segments():
    a = rg.disk_between(0, 1).to_cover(0.05)
    b = rg.disk_between(-2, -1).to_cover(0.05)
    s = rg.minkowski_sum(a, b)
    assert rg.disk_between(-2, 0).contains(s.points, tol=s.epsilon + 1e-12).all()


def test_minkowski_product_identity_and_unit_disk():
    a = rg.disk(0, 1).to_cover(0.06)
    one = rg.CoverRegion.single(1.0)
    p = rg.minkowski_product(a, one)
    assert np.array_equal(np.sort_complex(p.points), np.sort_complex(a.points))
    sq = rg.minkowski_product(a, a)
    assert rg.rmin(sq) <= 1.0 + 3 * sq.epsilon


def test_minkowski_product_real_scaling():
    seg = rg.disk_between(1, 3).to_cover(0.02)
    two = rg.CoverRegion.single(2.0)
    p = rg.minkowski_product(two, seg)
    assert rg.disk_between(2, 6).contains(p.points, tol=p.epsilon + 1e-9).all()


def test_minkowski_product_empty():
    a = rg.disk(0, 1).to_cover(0.1)
    assert rg.minkowski_product(a, rg.CoverRegion.empty()).is_empty


def test_infinity_propagation():
    a = rg.CoverRegion(np.array([1.0 + 0j]), 0.0, contains_infinity=True)
    b = rg.CoverRegion.single(2.0)
    assert rg.minkowski_sum(a, b).contains_infinity
    assert rg.minkowski_product(a, b).contains_infinity
    assert rg.mobius_inverse(a).covers(0.0)


# -- completions --------------------------------------------------------------


def test_chord_completion_circle_fills_disk():
    th = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    circle = rg.CoverRegion.from_points(np.exp(1j * th), 0.02)
    filled = rg.chord_completion(circle)
    rng = RNG(4)
    zs = np.sqrt(rng.uniform(0, 1, 3000)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 3000))
    assert np.all(filled.covers(zs, slack=0.03))
    assert rg.has_chord_property(filled, tol=2 * filled.epsilon)


def test_chord_completion_real_axis_unchanged():
    seg = rg.CoverRegion.from_points(np.linspace(-1, 2, 50), 0.01)
    comp = rg.chord_completion(seg)
    assert np.all(np.abs(comp.points.imag) <= 0.02 + 1e-12)


def test_chord_completion_disk_unchanged():
    cov = rg.disk_between(1, 2).to_cover(0.02)
    comp = rg.chord_completion(cov)
    target = rg.disk_between(1, 2)
    assert np.all(target.contains(comp.points, tol=comp.epsilon + cov.epsilon + 1e-12))


def test_arc_completion_right_left():
    pts = rg.CoverRegion.from_points([1j], 0.0)
    right = rg.arc_completion(pts, "right", spacing=0.01)
    left = rg.arc_completion(pts, "left", spacing=0.01)
    th = np.linspace(-np.pi / 2, np.pi / 2, 100)
    assert np.all(right.covers(np.exp(1j * th), slack=0.02))
    th_l = np.pi - th
    assert np.all(left.covers(np.exp(1j * th_l), slack=0.02))
    # right arcs of the right half circle stay on |z|=1, Re >= 0
    assert np.all(np.abs(np.abs(right.points) - 1.0) <= 0.02)
    assert right.points.real.min() >= -0.02


def test_arc_completion_positive_axis_unchanged():
    seg = rg.CoverRegion.from_points(np.linspace(0.5, 2.0, 40), 0.01)
    comp = rg.arc_completion(seg, "right")
    assert np.all(np.abs(comp.points.imag) <= 0.03)


# -- improved completions -----------------------------------------------------


def test_improved_sum_on_disks_matches_plain():
    a = rg.disk(1.0, 0.5).to_cover(0.03)
    b = rg.disk(-1.0, 0.25).to_cover(0.03)
    imp = rg.improved_sum(a, b)
    target = rg.disk(0.0, 0.75)
    assert np.all(target.contains(imp.points, tol=imp.epsilon + 0.05))
    rng = RNG(5)
    zs = ball_samples(a, 5000, rng) + ball_samples(b, 5000, rng)
    assert np.all(imp.covers(zs, slack=1e-12))


def test_improved_sum_trims_to_endpoints():
    a = rg.CoverRegion.from_points([1 + 1j, 1 - 1j], 0.01)
    b = rg.CoverRegion.single(5.0)
    imp = rg.improved_sum(a, b)
    assert np.all(imp.covers(np.array([6 + 1j, 6 - 1j])))
    # the chord interior of a+b is trimmed away by the intersection
    assert not imp.covers(6.0 + 0.0j, slack=0.5)


def test_improved_sum_empty():
    assert rg.improved_sum(rg.CoverRegion.empty(), rg.CoverRegion.single(1.0)).is_empty


def test_improved_product_identity_like():
    a = rg.disk_between(1, 2).to_cover(0.02)
    one = rg.CoverRegion.single(1.0)
    imp = rg.improved_product(a, one)
    target = rg.disk_between(1, 2)
    # ball-overlap filtering may keep points up to a few epsilon outside
    assert np.all(target.contains(imp.points, tol=imp.epsilon + 10 * a.epsilon))
    assert np.all(imp.covers(a.points, slack=1e-9))


def test_improved_product_disks():
    a = rg.disk_between(1, 2).to_cover(0.02)
    imp = rg.improved_product(a, a)
    target = rg.disk_between(1, 4)
    assert np.all(target.contains(imp.points, tol=imp.epsilon + 0.1))
    rng = RNG(6)
    zs = ball_samples(a, 5000, rng) * ball_samples(a, 5000, rng)
    assert np.all(imp.covers(zs, slack=1e-12))


def test_improved_product_real_segments():
    seg = rg.CoverRegion.from_points(np.linspace(1, 2, 60), 0.0)
    imp = rg.improved_product(seg, seg)
    assert np.all(np.abs(imp.points.imag) <= imp.epsilon + 0.06)
    assert imp.points.real.min() >= 1 - 0.05
    assert imp.points.real.max() <= 4 + 0.05


def test_improved_results_inside_plain_bounds():
    # improved sum within the chord-completed plain sum; improved product
    # within each arc-completed factor
    a = rg.CoverRegion.from_points([0.5 + 0.8j, 1.2 - 0.1j], 0.02)
    b = rg.CoverRegion.from_points([1.0 + 0.3j, -0.4 + 0.6j], 0.02)
    imp = rg.improved_sum(a, b)
    plain = rg.minkowski_sum(rg.chord_completion(a), rg.chord_completion(b))
    assert np.all(plain.covers(imp.points, slack=imp.epsilon + 1e-9))

    ip = rg.improved_product(a, b)
    for fa, fb in [("right", None), (None, "right"), ("left", None), (None, "left")]:
        aa = rg.arc_completion(a, fa) if fa else a
        bb = rg.arc_completion(b, fb) if fb else b
        factor = rg.minkowski_product(aa, bb)
        assert np.all(factor.covers(ip.points, slack=ip.epsilon + 1e-9))


# -- scalars ------------------------------------------------------------------


def test_rmin_examples():
    assert rg.rmin(rg.disk_between(-2, -1)) == pytest.approx(2.0)
    assert rg.rmin(rg.CoverRegion.zero()) == 0.0
    assert rg.rmin(rg.disk(3, 1)) == pytest.approx(4.0)
    cov = rg.disk(3, 1).to_cover(0.01)
    assert rg.rmin(cov) == pytest.approx(4.0, abs=3 * cov.epsilon)
    assert math.isinf(rg.rmin(rg.CoverRegion(np.array([0j]), 0.0, contains_infinity=True)))


def test_rmin_monotone_under_inclusion():
    small = rg.disk(0.5, 0.25).to_cover(0.02)
    big = rg.disk(0.5, 1.0).to_cover(0.02)
    assert rg.rmin(small) <= rg.rmin(big) + 1e-12


def test_dist_examples():
    a = rg.disk(5, 1).to_cover(0.01)
    b = rg.disk(0, 1).to_cover(0.01)
    assert rg.dist(a, b) == pytest.approx(3.0, abs=5 * (a.epsilon + b.epsilon))
    c = rg.disk(0.5, 1).to_cover(0.02)
    assert rg.dist(b, c) == 0.0
    inv = rg.disk_between(-1.0, -0.5).to_cover(0.005)
    ball = rg.disk(0.0, 0.3).to_cover(0.005)
    assert rg.dist(inv, ball) == pytest.approx(0.2, abs=5 * (inv.epsilon + ball.epsilon))


def test_dist_rounds_down():
    a = rg.disk(5, 1).to_cover(0.02)
    b = rg.disk(0, 1).to_cover(0.02)
    assert rg.dist(a, b) <= 3.0


def test_dist_infinity_convention():
    a = rg.CoverRegion(np.array([1.0 + 0j]), 0.0, contains_infinity=True)
    assert rg.dist(a, a) == 0.0


# -- predicates ----------------------------------------------------------------


def test_has_chord_property_cases():
    cov = rg.disk_between(1, 2).to_cover(0.02)
    assert rg.has_chord_property(cov, tol=2 * cov.epsilon)
    th = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    circle = rg.CoverRegion.from_points(np.exp(1j * th), 0.01)
    assert not rg.has_chord_property(circle, tol=0.05)


def test_has_arc_property_cases():
    th = np.linspace(-np.pi / 2, np.pi / 2, 181)
    right_half = rg.CoverRegion.from_points(np.exp(1j * th), 0.01)
    assert rg.has_arc_property(right_half, "right", tol=0.05)
    assert not rg.has_arc_property(right_half, "left", tol=0.05)


def test_property_tolerance_must_cover_eps():
    cov = rg.disk(0, 1).to_cover(0.1)
    with pytest.raises(InputError):
        rg.has_chord_property(cov, tol=cov.epsilon / 2)


# -- symmetry and serialization --------------------------------------------------


def test_conjugate_symmetry_preserved_through_ops():
    rng = RNG(7)
    pts = rng.uniform(0.3, 1.5, 40) * np.exp(1j * rng.uniform(-np.pi, np.pi, 40))
    a = rg.CoverRegion.from_points(pts, 0.02)
    b = rg.disk(1.0, 0.4).to_cover(0.05)
    assert a.is_conjugate_symmetric()
    for out in [
        rg.scale_real(a, -1.5),
        rg.shift_real(a, 0.7),
        rg.mobius_inverse(a),
        rg.minkowski_sum(a, b),
        rg.minkowski_product(a, b),
        rg.chord_completion(a),
        rg.arc_completion(a, "right"),
        rg.improved_sum(a, b),
        rg.improved_product(a, b),
    ]:
        assert out.is_conjugate_symmetric(tol=max(out.epsilon, 1e-9))


def test_json_roundtrip():
    reg = rg.DiskAlgebraRegion(((1.0, 2.0), (0.0, 3.0)), ((0.5, 0.2),), True)
    back = rg.region_from_json(rg.region_to_json(reg))
    assert back.upper == reg.upper and back.lower == reg.lower
    assert back.contains_infinity

    cov = rg.disk(0, 1).to_cover(0.1)
    back = rg.region_from_json(rg.region_to_json(cov))
    assert np.array_equal(back.points, cov.points)
    assert back.epsilon == cov.epsilon


def test_unknown_region_kind_rejected():
    with pytest.raises(InputError):
        rg.region_from_json({"kind": "blob"})
