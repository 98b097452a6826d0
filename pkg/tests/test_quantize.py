"""Momentum quantization against the closed forms of the worked examples."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polybilliard.errors import (
    ConstraintViolation,
    NotDoublyRational,
    NotPeriodicSkeleton,
    OutOfRange,
)
from polybilliard.exactgeom import FloatFrame
from polybilliard.lattice import period_lattice
from polybilliard.quantize import (
    CLASSICAL_APERIODIC,
    CLASSICAL_PERIODIC,
    QUANTUM,
    momentum_aperiodic,
    momentum_periodic,
    periodic_skeleton_check,
    quantum_momentum,
    spectrum,
    spectrum_csv,
    wavelength_report,
)
from polybilliard.shapes import isosceles_pi5, l_shape, parallelogram_pi3, square
from polybilliard.unfold import Period, build_epp, period_basis


def lattice_of(polygon, pair_choice=None):
    epp = build_epp(polygon)
    basis = period_basis(epp)
    return period_lattice(polygon.frame, basis, pair_choice=pair_choice)


def parallelogram_frames(a: Fraction):
    """The pi/3 parallelogram's side periods and their 90-degree rotations."""
    poly = parallelogram_pi3(a)
    f = poly.frame
    s = f.scalar(a)
    d1 = s * (f.unit(0) + f.unit(1))
    d2 = s * (f.unit(0) + f.unit(-1))
    v = d1 - d2
    u = d1 + d2
    return poly, f, d1, d2, v, u


def side_lattice(a: Fraction):
    poly, f, d1, d2, _, _ = parallelogram_frames(a)
    inv = f.scalar(1 / a)
    basis = [Period(d1), Period(d2), Period(inv * d1), Period(inv * d2)]
    return f, d1, d2, period_lattice(f, basis, pair_choice=(0, 1))


def rotated_lattice(a: Fraction):
    poly, f, d1, d2, v, u = parallelogram_frames(a)
    inv = f.scalar(1 / a)
    basis = [Period(v), Period(u), Period(inv * v), Period(inv * u)]
    return f, v, u, period_lattice(f, basis, pair_choice=(0, 1))


def test_square_unit_momentum():
    lat = lattice_of(square())
    q = momentum_aperiodic(lat, 1, 1)
    assert q.vector == pytest.approx(complex(math.pi, math.pi), abs=1e-12)
    assert q.energy == pytest.approx(math.pi**2, rel=1e-12)
    assert q.kind == CLASSICAL_APERIODIC


def test_square_axis_momentum_is_periodic_kind():
    lat = lattice_of(square())
    q = momentum_aperiodic(lat, 1, 0)
    z1 = lat.frame.to_complex(lat.d1)
    # parallel to the m-period itself: a periodic skeleton
    assert abs((q.vector.conjugate() * z1).imag) < 1e-12
    assert (q.vector.conjugate() * z1).real == pytest.approx(2 * math.pi, rel=1e-12)
    assert q.kind == CLASSICAL_PERIODIC


def test_momentum_projections_match_labels():
    f, d1, d2, lat = side_lattice(Fraction(2, 3))
    for m, n in [(1, 1), (2, -1), (-3, 2), (0, 1)]:
        if m == 0 and n == 0:
            continue
        q = momentum_aperiodic(lat, m, n)
        z1, z2 = f.to_complex(d1), f.to_complex(d2)
        p = q.vector
        assert (p.conjugate() * z1).real == pytest.approx(
            2 * math.pi * m * lat.c1, abs=1e-9
        )
        assert (p.conjugate() * z2).real == pytest.approx(
            2 * math.pi * n * lat.c2, abs=1e-9
        )


def test_zero_labels_rejected():
    lat = lattice_of(square())
    with pytest.raises(OutOfRange):
        momentum_aperiodic(lat, 0, 0)


def test_irrational_lattice_rejected():
    lat = lattice_of(isosceles_pi5())
    with pytest.raises(NotDoublyRational):
        momentum_aperiodic(lat, 1, 0)
    with pytest.raises(NotDoublyRational):
        spectrum(lat, 10.0)


def test_parallelogram_momentum_closed_form():
    # p_mn = (4*pi*p^2 / 9q) * [(2m-n) D1 + (2n-m) D2] for side lengths q/p
    a = Fraction(2, 3)
    f, d1, d2, lat = side_lattice(a)
    assert (lat.c1, lat.c2) == (2, 2)
    z1, z2 = f.to_complex(d1), f.to_complex(d2)
    scale = 4 * math.pi * 3**2 / (9 * 2)
    for m, n in [(1, 1), (1, 0), (2, -1), (-1, 3)]:
        q = momentum_aperiodic(lat, m, n)
        expect = scale * ((2 * m - n) * z1 + (2 * n - m) * z2)
        assert q.vector == pytest.approx(expect, abs=1e-9)
        e_expect = (8 / 9) * math.pi**2 * 3**2 * (m * m + n * n - m * n)
        assert q.energy == pytest.approx(e_expect, rel=1e-12)


def test_rotated_pair_momentum_closed_form():
    # Over (D1-D2, D1+D2) the solution is (2*pi*p^2 / 9q) * [3m*v + n*u].
    a = Fraction(2, 3)
    f, v, u, lat = rotated_lattice(a)
    assert (lat.c1, lat.c2) == (2, 2)
    zv, zu = f.to_complex(v), f.to_complex(u)
    scale = 2 * math.pi * 3**2 / (9 * 2)
    for m, n in [(1, 1), (0, 2), (2, -1)]:
        q = momentum_aperiodic(lat, m, n)
        assert q.vector == pytest.approx(scale * (3 * m * zv + n * zu), abs=1e-9)
        e_expect = (2 / 9) * math.pi**2 * 3**2 * (3 * m * m + n * n)
        assert q.energy == pytest.approx(e_expect, rel=1e-12)


def test_rotated_labels_remap_onto_side_pair():
    # (m, n) -> (m - n, m + n) sends the rotated-pair solution onto the
    # side-pair one, vector for vector.
    a = Fraction(2, 3)
    _, _, _, side = side_lattice(a)
    _, _, _, rot = rotated_lattice(a)
    for m in range(-3, 4):
        for n in range(-3, 4):
            if m == 0 and n == 0:
                continue
            qs = momentum_aperiodic(side, m, n)
            qr = momentum_aperiodic(rot, m - n, m + n)
            assert qr.vector == pytest.approx(qs.vector, abs=1e-9)
    window = [
        (m, n) for m in range(-8, 9) for n in range(-8, 9) if (m, n) != (0, 0)
    ]
    side_set = sorted(momentum_aperiodic(side, m, n).energy for m, n in window)
    rot_set = sorted(
        momentum_aperiodic(rot, m - n, m + n).energy for m, n in window
    )
    assert side_set == pytest.approx(rot_set, rel=1e-12)


def test_skeleton_check_side_pair_is_generic():
    # C2*(D2.D1) = (1/2) * C1*|D2|^2: no integer k, so no periodic skeleton.
    _, _, _, lat = side_lattice(Fraction(2, 3))
    assert periodic_skeleton_check(lat) is None


def test_skeleton_check_rotated_pair():
    _, _, _, lat = rotated_lattice(Fraction(2, 3))
    data = periodic_skeleton_check(lat)
    assert data is not None and data.k == 0
    assert data.alpha == pytest.approx(math.pi / 2, abs=1e-12)
    flipped = periodic_skeleton_check(lat, (1, 0))
    assert flipped is not None and flipped.k == 0
    assert flipped.direction_index == 0


def test_skeleton_check_irrational_ratio():
    f = FloatFrame(8)
    d1 = complex(1.0, 0.0)
    d2 = complex(math.sqrt(2) / 2, 1.0)
    basis = [Period(d1), Period(d2), Period(1.5 * d1), Period(2.0 * d2)]
    lat = period_lattice(f, basis, pair_choice=(0, 1))
    assert lat.doubly_rational
    assert periodic_skeleton_check(lat) is None


def test_periodic_momentum_direction():
    # Along v = D1 - D2 the momentum is (2*pi*n*p^2 / 3q) * v.
    a = Fraction(2, 3)
    f, v, u, lat = rotated_lattice(a)
    data = periodic_skeleton_check(lat, (1, 0))
    zv = f.to_complex(v)
    for n in (1, -2, 3):
        q = momentum_periodic(lat, data, n)
        expect = (2 * math.pi * n * 3**2 / (3 * 2)) * zv
        assert q.vector == pytest.approx(expect, abs=1e-9)
        assert q.kind == CLASSICAL_PERIODIC
        assert q.m == data.k * n
    with pytest.raises(OutOfRange):
        momentum_periodic(lat, data, 0)
    with pytest.raises(NotPeriodicSkeleton):
        momentum_periodic(lat, None, 1)


def test_periodic_momentum_square_vertical():
    lat = lattice_of(square())
    # direction role = basis[1], the vertical period (0, 2)
    data = periodic_skeleton_check(lat, (0, 1))
    assert data is not None and data.k == 0
    q = momentum_periodic(lat, data, 1)
    assert q.vector == pytest.approx(complex(0.0, math.pi), abs=1e-12)


def test_periodic_momentum_channel_route():
    # A channel period (3/2) * v quantizes with effective count
    # C_l = n_l * p_l and lands on exactly the same momentum.
    a = Fraction(2, 3)
    f, v, u, lat = rotated_lattice(a)
    data = periodic_skeleton_check(lat, (1, 0))
    direct = momentum_periodic(lat, data, 2)
    channel = momentum_periodic(lat, data, 2, along=lat.basis[2])
    assert channel.vector == pytest.approx(direct.vector, abs=1e-12)
    with pytest.raises(NotPeriodicSkeleton):
        momentum_periodic(lat, data, 1, along=lat.basis[1])


def test_quantum_momentum_transverse_value():
    a = Fraction(2, 3)
    f, v, u, lat = rotated_lattice(a)
    data = periodic_skeleton_check(lat, (1, 0))
    base = momentum_periodic(lat, data, 4)
    q = quantum_momentum(lat, data, 1, 4)
    t = abs(q.vector - base.vector)
    expect_t = 2 * math.pi * data.c1 / (abs(data.d1) * math.sin(data.alpha))
    assert t == pytest.approx(expect_t, rel=1e-12)
    assert q.kind == QUANTUM
    assert abs((q.vector.conjugate() * base.vector).imag) > 0.0


def test_quantum_energy_closed_form():
    # E = (2/9) pi^2 p^2 (m^2 + 3 n^2) over the skeleton along D1 - D2,
    # which is the transverse-quantized companion of the rotated-pair grid.
    a = Fraction(2, 3)
    _, _, _, lat = rotated_lattice(a)
    data = periodic_skeleton_check(lat, (1, 0))
    for m, n in [(1, 4), (2, 6), (0, 3)]:
        q = quantum_momentum(lat, data, m, n)
        expect = (2 / 9) * math.pi**2 * 3**2 * (m * m + 3 * n * n)
        assert q.energy == pytest.approx(expect, rel=1e-12)


def test_quantum_flag_threshold():
    a = Fraction(2, 3)
    _, _, _, lat = rotated_lattice(a)
    data = periodic_skeleton_check(lat, (1, 0))
    with pytest.warns(ConstraintViolation):
        tight = quantum_momentum(lat, data, 1, 1)
    assert tight.flag == "eq21c-ratio"
    loose = quantum_momentum(lat, data, 1, 3)
    assert loose.flag is None
    relaxed = quantum_momentum(lat, data, 1, 1, max_ratio=0.7)
    assert relaxed.flag is None


def test_quantum_m_zero_reduces_to_periodic():
    a = Fraction(2, 3)
    _, _, _, lat = rotated_lattice(a)
    data = periodic_skeleton_check(lat, (1, 0))
    base = momentum_periodic(lat, data, 2)
    q = quantum_momentum(lat, data, 0, 2)
    assert q.vector == pytest.approx(base.vector, abs=1e-12)
    with pytest.raises(OutOfRange):
        quantum_momentum(lat, data, 0, 2, has_aperiodic_bundle=False)
    with pytest.raises(OutOfRange):
        quantum_momentum(lat, data, -1, 2)


@pytest.mark.filterwarnings("ignore::polybilliard.errors.ConstraintViolation")
def test_k_zero_quantum_equals_nonaxial_grid():
    # For a k = 0 skeleton the transverse-quantized energies coincide with
    # the closed-form grid over labels with both entries nonzero.
    for make in (lambda: lattice_of(square()), lambda: rotated_lattice(Fraction(2, 3))[3]):
        lat = make()
        data = periodic_skeleton_check(lat)
        assert data is not None and data.k == 0
        e_max = 40.0 * lat.genus
        grid = {
            round(momentum_aperiodic(lat, m, n).energy, 6)
            for m in range(-12, 13)
            for n in range(-12, 13)
            if m and n
            and momentum_aperiodic(lat, m, n).energy <= e_max
        }
        quant = set()
        m = 1
        while True:
            q1 = quantum_momentum(lat, data, m, 1)
            if 0.5 * abs(q1.vector - momentum_periodic(lat, data, 1).vector) ** 2 > e_max:
                break
            n = 1
            while True:
                q = quantum_momentum(lat, data, m, n)
                if q.energy > e_max:
                    break
                quant.add(round(q.energy, 6))
                n += 1
            m += 1
        assert quant == grid


def test_spectrum_square_levels_and_degeneracy():
    lat = lattice_of(square())
    levels = spectrum(lat, 3.0 * math.pi**2)
    assert [s.energy for s in levels] == sorted(s.energy for s in levels)
    base = 0.5 * math.pi**2
    assert levels[0].energy == pytest.approx(base, rel=1e-12)
    assert levels[0].degeneracy == 4
    assert levels[0].kind == CLASSICAL_PERIODIC
    assert levels[1].energy == pytest.approx(2 * base, rel=1e-12)
    assert levels[1].degeneracy == 4
    assert levels[1].kind == CLASSICAL_APERIODIC
    by_e = {round(s.energy / base): s for s in levels}
    assert by_e[5].degeneracy == 8
    assert all(s.energy <= 3.0 * math.pi**2 * (1 + 1e-9) for s in levels)


def test_spectrum_kind_filter():
    lat = lattice_of(square())
    only_ap = spectrum(lat, 3.0 * math.pi**2, kinds=(CLASSICAL_APERIODIC,))
    assert all(s.kind == CLASSICAL_APERIODIC for s in only_ap)
    assert only_ap[0].energy == pytest.approx(math.pi**2, rel=1e-12)


def test_spectrum_quantum_kind():
    _, _, _, lat = rotated_lattice(Fraction(2, 3))
    e_max = 900.0
    levels = spectrum(lat, e_max, kinds=(QUANTUM,))
    assert levels, "quantum family should be populated for the k = 0 skeleton"
    assert all(s.kind == QUANTUM for s in levels)
    expect = sorted(
        (2 / 9) * math.pi**2 * 9 * (3 * m * m + n * n)
        for m in range(1, 10)
        for n in range(1, 10)
        if (2 / 9) * math.pi**2 * 9 * (3 * m * m + n * n) <= e_max
    )
    got = sorted(s.energy for s in levels for _ in range(s.degeneracy))
    assert got == pytest.approx(expect, rel=1e-12)


def test_spectrum_pair_choice_invariant():
    poly = parallelogram_pi3(Fraction(2, 3))
    epp = build_epp(poly)
    basis = period_basis(epp)
    e_max = 500.0
    reference = None
    for pair in (None, (1, 2), (2, 3)):
        lat = period_lattice(poly.frame, basis, pair_choice=pair)
        flat = [
            e
            for s in spectrum(lat, e_max)
            for e in [s.energy] * s.degeneracy
        ]
        if reference is None:
            reference = flat
        else:
            assert flat == pytest.approx(reference, rel=1e-9)


def test_spectrum_broken_rectangle_closed_form():
    # E = pi^2 (m^2 C_x^2 / x1^2 + n^2 C_y^2 / y1^2) / 2 over the side
    # periods (2 x1, 0), (0, 2 y1) of the x2 = 3/2 broken rectangle.
    poly = l_shape(1, 1, Fraction(3, 2), 2)
    f = poly.frame
    basis = [
        Period(f.from_xy(2, 0)),
        Period(f.from_xy(0, 2)),
        Period(f.from_xy(3, 0)),
        Period(f.from_xy(0, 4)),
    ]
    lat = period_lattice(f, basis, pair_choice=(0, 1))
    assert (lat.c1, lat.c2) == (2, 1)
    q = momentum_aperiodic(lat, 1, 1)
    assert q.vector == pytest.approx(complex(2 * math.pi, math.pi), abs=1e-12)
    e_max = 200.0
    got = [
        e for s in spectrum(lat, e_max) for e in [s.energy] * s.degeneracy
    ]
    expect = sorted(
        0.5 * math.pi**2 * (m * m * 4 + n * n)
        for m in range(-10, 11)
        for n in range(-14, 15)
        if (m, n) != (0, 0) and 0.5 * math.pi**2 * (m * m * 4 + n * n) <= e_max
    )
    assert got == pytest.approx(expect, rel=1e-12)


def test_spectrum_same_lattice_from_unfolding_basis():
    # The homology basis of the same broken rectangle generates the same
    # plane lattice, so the spectrum cannot depend on which basis was used.
    poly = l_shape(1, 1, Fraction(3, 2), 2)
    f = poly.frame
    paper = [
        Period(f.from_xy(2, 0)),
        Period(f.from_xy(0, 2)),
        Period(f.from_xy(3, 0)),
        Period(f.from_xy(0, 4)),
    ]
    lat_paper = period_lattice(f, paper, pair_choice=(0, 1))
    lat_hom = lattice_of(poly)
    e_max = 120.0
    a = [e for s in spectrum(lat_paper, e_max) for e in [s.energy] * s.degeneracy]
    b = [e for s in spectrum(lat_hom, e_max) for e in [s.energy] * s.degeneracy]
    assert a == pytest.approx(b, rel=1e-9)


def test_spectrum_entry_wavelengths():
    a = Fraction(2, 3)
    f, d1, d2, lat = side_lattice(a)
    levels = spectrum(lat, 100.0)
    first = levels[0]
    assert first.lam == pytest.approx(2 * math.pi / math.sqrt(2 * first.energy))
    m, n = first.labels
    z1 = abs(f.to_complex(d1))
    if m:
        assert first.lam_pair[0] == pytest.approx(z1 / (abs(m) * lat.c1))
    else:
        assert math.isinf(first.lam_pair[0])


def test_wavelength_square():
    lat = lattice_of(square())
    q = momentum_aperiodic(lat, 1, 1)
    report = wavelength_report(lat, q)
    assert len(report) == 2
    for entry in report:
        assert entry.ok
        assert entry.count == pytest.approx(1.0, abs=1e-12)
        assert entry.wavelength == pytest.approx(2.0, abs=1e-12)
        assert entry.law_count == 1


def test_wavelength_parallelogram_counts():
    a = Fraction(2, 3)
    f, d1, d2, lat = side_lattice(a)
    q = momentum_aperiodic(lat, 1, 1)
    report = wavelength_report(lat, q)
    assert [e.law_count for e in report] == [2, 2, 3, 3]
    for entry in report:
        assert entry.ok
        assert entry.count == pytest.approx(entry.law_count, abs=1e-9)


def test_wavelength_violation():
    lat = lattice_of(square())
    report = wavelength_report(lat, complex(1.234, 0.777))
    assert any(not e.ok for e in report)
    assert all(e.law_count is None for e in report)


def test_spectrum_csv_format():
    lat = lattice_of(square())
    text = spectrum_csv(spectrum(lat, 2.0 * math.pi**2))
    lines = text.strip().split("\n")
    assert lines[0] == "level_index,m,n,kind,energy,degeneracy,flag"
    assert lines[1].startswith("0,")
    assert "classical-periodic" in lines[1]
    assert lines[1].split(",")[5] == "4"
    assert text.endswith("\n")


@settings(max_examples=15, deadline=None)
@given(
    num=st.integers(min_value=1, max_value=9),
    den=st.integers(min_value=1, max_value=4),
    m=st.integers(min_value=-3, max_value=3),
    n=st.integers(min_value=-3, max_value=3),
)
def test_quantized_momenta_fit_every_period(num, den, m, n):
    if m == 0 and n == 0:
        return
    a = Fraction(num, den)
    f = FloatFrame(6)
    d1 = complex(1.0, 0.25)
    d2 = complex(0.125, 1.0)
    basis = [
        Period(d1),
        Period(d2),
        Period(d1 / float(a)),
        Period(d2 / float(a)),
    ]
    lat = period_lattice(f, basis, pair_choice=(0, 1))
    q = momentum_aperiodic(lat, m, n)
    assert all(entry.ok for entry in wavelength_report(lat, q))
