"""Momentum and energy quantization on a doubly-rational period lattice.

Periodicity of a plane wave across the whole unfolded pattern forces its
momentum to satisfy p.D in 2*pi*Z for every period D, which reduces to two
integer labels (m, n) over the lattice generators D1/C1 and D2/C2.  This
module builds those quantized momenta (aperiodic skeletons, periodic
skeletons parallel to a period, and the transverse-quantized "quantum"
momenta of all-channel skeletons), assembles energy spectra with degeneracy
counts, and reports per-period wavelength bookkeeping.

Units: hbar = 1 and mass = 1, so E = |p|^2 / 2 throughout.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .errors import (
    ConstraintViolation,
    NotDoublyRational,
    NotPeriodicSkeleton,
    OutOfRange,
)
from .lattice import PeriodLattice, detect_drpb, real_relations, reduce_period
from .unfold import Period

__all__ = [
    "QuantizedMomentum",
    "PeriodicSkeletonData",
    "SpectrumEntry",
    "WavelengthEntry",
    "momentum_aperiodic",
    "periodic_skeleton_check",
    "momentum_periodic",
    "quantum_momentum",
    "spectrum",
    "wavelength_report",
    "spectrum_csv",
]

_REL_TOL = 1e-9

CLASSICAL_APERIODIC = "classical-aperiodic"
CLASSICAL_PERIODIC = "classical-periodic"
QUANTUM = "quantum"


@dataclass(frozen=True, eq=False)
class QuantizedMomentum:
    """A momentum allowed by the lattice periodicity, as a plane vector.

    For classical kinds the labels fix the projections exactly:
    p.D1 = 2*pi*m*C1 and p.D2 = 2*pi*n*C2.  For the quantum kind the vector
    combines the along-skeleton momentum with the transverse sqrt(2*E_0m)
    component, and `flag` records a violated smallness constraint.
    """

    m: int
    n: int
    vector: complex
    kind: str
    flag: str | None = None

    @property
    def energy(self) -> float:
        return 0.5 * abs(self.vector) ** 2

    @property
    def xy(self) -> tuple[float, float]:
        return (self.vector.real, self.vector.imag)


@dataclass(frozen=True, eq=False)
class PeriodicSkeletonData:
    """Evidence that momenta parallel to the direction period quantize.

    Present when C2*(D2.D1) = k*C1*|D2|^2 for an integer k; the skeleton runs
    along the pair's second period (`direction_index` into the lattice basis)
    and `alpha` is the angle between the pair periods.
    """

    k: int
    alpha: float
    direction_index: int
    pair_indexes: tuple[int, int]
    c1: int
    c2: int
    d1: complex
    d2: complex


@dataclass(frozen=True, eq=False)
class SpectrumEntry:
    """One energy level: representative labels, kind, and degeneracy.

    `lam` is the free wavelength 2*pi/|p|; `lam_pair` holds the wavelengths
    along the two pair periods (D_i measured in them is the integer |label|*C_i),
    None for quantum entries where the transverse label is not a projection
    count.
    """

    labels: tuple[int, int]
    energy: float
    kind: str
    degeneracy: int
    lam: float
    lam_pair: tuple[float, float] | None
    flag: str | None = None


@dataclass(frozen=True, eq=False)
class WavelengthEntry:
    """Wavelength bookkeeping of one basis period against a momentum."""

    period: Period
    wavelength: float
    count: float
    law_count: int | None
    ok: bool


def _pair_floats(lattice: PeriodLattice) -> tuple[complex, complex]:
    f = lattice.frame
    return f.to_complex(lattice.d1), f.to_complex(lattice.d2)


def _dual_steps(lattice: PeriodLattice) -> tuple[complex, complex]:
    """Vectors P1, P2 with p_mn = m*P1 + n*P2 (the closed-form solution)."""
    z1, z2 = _pair_floats(lattice)
    c1, c2 = lattice.c1, lattice.c2
    s = (z1.conjugate() * z2).imag
    dot = (z1.conjugate() * z2).real
    p1 = 2 * math.pi * c1 * (abs(z2) ** 2 * z1 - dot * z2) / s**2
    p2 = 2 * math.pi * c2 * (abs(z1) ** 2 * z2 - dot * z1) / s**2
    return p1, p2


def _classify_classical(lattice: PeriodLattice, p: complex) -> str:
    """Parallel to any basis period means the skeleton is periodic."""
    ap = abs(p)
    f = lattice.frame
    for per in lattice.basis:
        z = f.to_complex(per.vector)
        if abs((p.conjugate() * z).imag) <= _REL_TOL * ap * abs(z):
            return CLASSICAL_PERIODIC
    return CLASSICAL_APERIODIC


def momentum_aperiodic(lattice: PeriodLattice, m: int, n: int) -> QuantizedMomentum:
    """The unique momentum with p.D1 = 2*pi*m*C1 and p.D2 = 2*pi*n*C2.

    Raises NotDoublyRational on lattices without rational relations and
    OutOfRange at the excluded origin m = n = 0.  The returned kind records
    whether the momentum happens to be parallel to a basis period (a periodic
    skeleton) or not.
    """
    if abs(m) + abs(n) == 0:
        raise OutOfRange("momentum labels m = n = 0 carry no motion")
    p1, p2 = _dual_steps(lattice)  # raises NotDoublyRational via lattice.c1
    p = m * p1 + n * p2
    return QuantizedMomentum(m=m, n=n, vector=p, kind=_classify_classical(lattice, p))


def periodic_skeleton_check(
    lattice: PeriodLattice, pair_choice: tuple[int, int] | None = None
) -> PeriodicSkeletonData | None:
    """Decide whether momenta parallel to the pair's second period quantize.

    Returns the integer k with C2*(D2.D1) = k*C1*|D2|^2, the pair angle, and
    the direction period index — or None when no integer k exists (the pair
    is generic and admits only aperiodic skeletons).  The C_i are recomputed
    when `pair_choice` differs from the lattice's own reference pair.
    """
    rat = lattice.rational
    if rat is None:
        raise NotDoublyRational("periodic skeletons need rational period relations")
    f = lattice.frame
    if pair_choice is None or pair_choice == lattice.relations.pair_indexes:
        i, j = lattice.relations.pair_indexes
        c1, c2 = rat.c1, rat.c2
    else:
        i, j = pair_choice
        sub = detect_drpb(real_relations(f, lattice.basis, (i, j)))
        if sub is None:  # pragma: no cover - rationality is pair-intrinsic
            raise NotDoublyRational("pair relations are not rational")
        c1, c2 = sub.c1, sub.c2
    d1 = lattice.basis[i].vector
    d2 = lattice.basis[j].vector
    ratio = f.real_ratio(c2 * f.dot(d2, d1), c1 * f.dot(d2, d2))
    r = f.rational_value(ratio)
    if r is None or r.denominator != 1:
        return None
    z1, z2 = f.to_complex(d1), f.to_complex(d2)
    cosang = (z1.conjugate() * z2).real / (abs(z1) * abs(z2))
    alpha = math.acos(max(-1.0, min(1.0, cosang)))
    return PeriodicSkeletonData(
        k=int(r),
        alpha=alpha,
        direction_index=j,
        pair_indexes=(i, j),
        c1=c1,
        c2=c2,
        d1=z1,
        d2=z2,
    )


def momentum_periodic(
    lattice: PeriodLattice,
    data: PeriodicSkeletonData | None,
    n: int,
    along: Period | None = None,
) -> QuantizedMomentum:
    """Momentum of the skeleton parallel to the direction period: all of its
    wavelength fits C2*n times into D2.

    With `along`, the same momentum is computed from a channel period
    collinear with the direction (D_l = (p_l/q_l)*D2, effective count
    C_l = n_l*p_l with n_l = C2/q_l); the two routes agree identically.
    Raises NotPeriodicSkeleton without check data and OutOfRange for n = 0.
    """
    if data is None:
        raise NotPeriodicSkeleton("no integer k: this pair has no periodic skeleton")
    if n == 0:
        raise OutOfRange("periodic skeleton label n must be nonzero")
    if along is None:
        p = (2 * math.pi * n * data.c2 / abs(data.d2) ** 2) * data.d2
    else:
        f = lattice.frame
        v = along.vector
        d2 = lattice.basis[data.direction_index].vector
        scale = abs(f.to_complex(v)) * abs(data.d2)
        if not f.is_zero(f.cross(v, d2), scale=scale):
            raise NotPeriodicSkeleton("channel period is not parallel to the direction")
        ratio = f.rational_value(f.real_ratio(f.dot(v, d2), f.dot(d2, d2)))
        if ratio is None or data.c2 % ratio.denominator != 0:
            raise NotPeriodicSkeleton("channel period is not commensurate with D2")
        n_l = data.c2 // ratio.denominator
        c_l = n_l * abs(ratio.numerator)
        zl = f.to_complex(v)
        p = (2 * math.pi * n * c_l / abs(zl) ** 2) * zl
        if ratio < 0:
            p = -p
    return QuantizedMomentum(
        m=data.k * n, n=n, vector=p, kind=CLASSICAL_PERIODIC
    )


def quantum_momentum(
    lattice: PeriodLattice,
    data: PeriodicSkeletonData | None,
    m: int,
    n: int,
    max_ratio: float = 0.2,
    has_aperiodic_bundle: bool = True,
) -> QuantizedMomentum:
    """Pseudo-momentum of a periodic skeleton with m transverse wavelengths.

    In the skeleton-local frame the components are (+-sqrt(2*E_0m), p_per)
    with sqrt(2*E_0m)*D1*sin(alpha) = 2*pi*m*C1; the returned vector is the
    + branch rotated to global coordinates.  m = 0 degenerates to the plain
    periodic momentum and is only meaningful when the skeleton contains an
    aperiodic bundle (all-channel skeletons start at m = 1).  When the
    transverse part is not small (ratio above `max_ratio`) the momentum is
    flagged and a ConstraintViolation warning is emitted — the construction
    stays exact, the flag marks a formally violated asymptotic ordering.
    """
    if data is None:
        raise NotPeriodicSkeleton("no integer k: this pair has no periodic skeleton")
    if m < 0:
        raise OutOfRange("transverse label m must be >= 0")
    if m == 0 and not has_aperiodic_bundle:
        raise OutOfRange("an all-channel skeleton has no m = 0 state")
    base = momentum_periodic(lattice, data, n)
    sin_a = math.sin(data.alpha)
    t = 2 * math.pi * m * data.c1 / (abs(data.d1) * sin_a)
    direction = data.d2 / abs(data.d2)
    transverse = 1j * direction  # local x-axis, perpendicular to the rays
    vector = t * transverse + base.vector
    flag = None
    ratio = t / abs(base.vector)
    if ratio > max_ratio:
        flag = "eq21c-ratio"
        warnings.warn(
            ConstraintViolation(
                f"transverse/longitudinal momentum ratio {ratio:.3g} exceeds {max_ratio}"
            ),
            stacklevel=2,
        )
    return QuantizedMomentum(m=m, n=n, vector=vector, kind=QUANTUM, flag=flag)


def _lambda_pair(lattice: PeriodLattice, m: int, n: int) -> tuple[float, float]:
    z1, z2 = _pair_floats(lattice)
    l1 = abs(z1) / (abs(m) * lattice.c1) if m else math.inf
    l2 = abs(z2) / (abs(n) * lattice.c2) if n else math.inf
    return (l1, l2)


def spectrum(
    lattice: PeriodLattice,
    e_max: float,
    kinds: tuple[str, ...] = (CLASSICAL_APERIODIC, CLASSICAL_PERIODIC),
    max_ratio: float = 0.2,
) -> list[SpectrumEntry]:
    """All energy levels up to e_max from the requested momentum families.

    Classical entries enumerate every label pair |m|+|n| > 0 of the closed
    form; the quantum family (opt-in via kinds) adds the transverse-quantized
    levels m, n >= 1 of the skeleton along the lattice's own pair when that
    skeleton exists.  Levels of equal kind within 1e-9 relative merge into one
    entry with a degeneracy count and the lexicographically smallest labels.
    """
    if e_max <= 0:
        raise OutOfRange("e_max must be positive")
    raw: list[tuple[float, str, tuple[int, int], tuple[float, float] | None, str | None]] = []

    want_classical = CLASSICAL_APERIODIC in kinds or CLASSICAL_PERIODIC in kinds
    if want_classical:
        p1, p2 = _dual_steps(lattice)
        g11, g22 = abs(p1) ** 2, abs(p2) ** 2
        g12 = (p1.conjugate() * p2).real
        tr, det = g11 + g22, g11 * g22 - g12 * g12
        lam_min = (tr - math.sqrt(max(tr * tr - 4 * det, 0.0))) / 2
        reach = int(math.sqrt(2 * e_max / lam_min)) + 1
        cutoff = e_max * (1 + _REL_TOL)
        for m in range(-reach, reach + 1):
            for n in range(-reach, reach + 1):
                if m == 0 and n == 0:
                    continue
                p = m * p1 + n * p2
                e = 0.5 * abs(p) ** 2
                if e > cutoff:
                    continue
                kind = _classify_classical(lattice, p)
                if kind in kinds:
                    raw.append((e, kind, (m, n), _lambda_pair(lattice, m, n), None))

    if QUANTUM in kinds:
        data = periodic_skeleton_check(lattice)
        if data is not None:
            m = 1
            while True:
                sin_a = math.sin(data.alpha)
                t = 2 * math.pi * m * data.c1 / (abs(data.d1) * sin_a)
                e0 = 0.5 * t * t
                if e0 > e_max:
                    break
                n = 1
                while True:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", ConstraintViolation)
                        q = quantum_momentum(
                            lattice, data, m, n, max_ratio=max_ratio
                        )
                    if q.energy > e_max * (1 + _REL_TOL):
                        break
                    raw.append((q.energy, QUANTUM, (m, n), None, q.flag))
                    n += 1
                if n == 1:
                    break
                m += 1

    raw.sort(key=lambda r: (r[0], r[1], r[2]))
    entries: list[SpectrumEntry] = []
    for e, kind, labels, lam_pair, flag in raw:
        prev = entries[-1] if entries else None
        if (
            prev is not None
            and prev.kind == kind
            and abs(e - prev.energy) <= _REL_TOL * max(1.0, abs(prev.energy))
        ):
            entries[-1] = SpectrumEntry(
                labels=min(prev.labels, labels),
                energy=prev.energy,
                kind=kind,
                degeneracy=prev.degeneracy + 1,
                lam=prev.lam,
                lam_pair=prev.lam_pair if prev.labels <= labels else lam_pair,
                flag=prev.flag or flag,
            )
            continue
        entries.append(
            SpectrumEntry(
                labels=labels,
                energy=e,
                kind=kind,
                degeneracy=1,
                lam=2 * math.pi / math.sqrt(2 * e),
                lam_pair=lam_pair,
                flag=flag,
            )
        )
    entries.sort(key=lambda s: (s.energy, s.kind, s.labels))
    return entries


def wavelength_report(lattice: PeriodLattice, momentum) -> list[WavelengthEntry]:
    """Measure every basis period in wavelengths of the given momentum.

    A properly quantized momentum fits an integer number of wavelengths into
    each period; the integer also follows from the labels through the
    generator coordinates (count = |r1*m + r2*n|), reported as `law_count`.
    Non-integer counts mark the entry as a violation rather than raising.
    """
    if isinstance(momentum, QuantizedMomentum):
        p = momentum.vector
        labels = (momentum.m, momentum.n)
        with_law = momentum.kind != QUANTUM
    else:
        p = complex(momentum[0], momentum[1]) if not isinstance(momentum, complex) else momentum
        labels = None
        with_law = False
    f = lattice.frame
    out = []
    for per in lattice.basis:
        z = f.to_complex(per.vector)
        proj = abs((p.conjugate() * z).real)
        count = proj / (2 * math.pi)
        wavelength = math.inf if count < _REL_TOL else abs(z) / count
        law = None
        if with_law and lattice.rational is not None:
            r1, r2 = reduce_period(per, lattice.rational)
            law = abs(r1 * labels[0] + r2 * labels[1])
        ok = abs(count - round(count)) <= _REL_TOL * max(1.0, count) and (
            law is None or round(count) == law
        )
        out.append(
            WavelengthEntry(
                period=per, wavelength=wavelength, count=count, law_count=law, ok=ok
            )
        )
    return out


def spectrum_csv(entries: list[SpectrumEntry]) -> str:
    """Deterministic CSV dump: level_index,m,n,kind,energy,degeneracy,flag."""
    lines = ["level_index,m,n,kind,energy,degeneracy,flag"]
    for idx, s in enumerate(entries):
        lines.append(
            f"{idx},{s.labels[0]},{s.labels[1]},{s.kind},"
            f"{s.energy:.12g},{s.degeneracy},{s.flag or ''}"
        )
    return "\n".join(lines) + "\n"
