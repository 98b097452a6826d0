"""Plane-wave eigenfunctions assembled over an unfolded pattern.

A quantized momentum turns every image of the base polygon into one plane
wave: the image's isometry rotates (or reflects) the momentum and its
translation contributes a constant phase.  Choosing signs for the images that
are consistent across every edge identification yields a coherent sum which
satisfies Dirichlet conditions on the edges whose sign pairs are opposite and
Neumann conditions where they agree.  The sum solves the Helmholtz equation
exactly — all component momenta share one norm — so verification amounts to
boundary residuals and bookkeeping, not PDE solving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCombination,
    MomentumMismatch,
    SymmetryNotAutomorphism,
    UnquantizedMomentum,
)
from .exactgeom import Polygon
from .quantize import QuantizedMomentum
from .unfold import EPP

__all__ = [
    "SignPrescription",
    "PlaneWaveTerm",
    "SWF",
    "RealSWF",
    "BoundaryReport",
    "HelmholtzReport",
    "enumerate_prescriptions",
    "compile_swf",
    "real_combinations",
    "evaluate",
    "verify_boundary",
    "verify_helmholtz",
    "symmetry_probe",
    "l2_norm",
    "grid_csv",
    "grid_pgm",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"

_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SignPrescription:
    """Signs for the pattern images, consistent across every edge class.

    eta[k-1] is the sign of image k (image 1 fixed to +1); bc[s] is the
    boundary condition the prescription induces on base-polygon edge s:
    opposite signs across all copies of the edge give Dirichlet, equal signs
    give Neumann.
    """

    eta: tuple[int, ...]
    bc: tuple[str, ...]

    @property
    def label(self) -> str:
        kinds = set(self.bc)
        if kinds == {DIRICHLET}:
            return DIRICHLET
        if kinds == {NEUMANN}:
            return NEUMANN
        return "mixed"


@dataclass(frozen=True, eq=False)
class PlaneWaveTerm:
    eta: int
    alpha: float
    p: complex


@dataclass(frozen=True, eq=False)
class SWF:
    """One sign branch of the coherent image sum.

    value(z) = amplitude * sum_k eta_k exp(branch * i * (alpha_k + p_k . z)).
    The two branches compiled together are complex conjugates of each other.
    """

    terms: tuple[PlaneWaveTerm, ...]
    energy: float
    branch: int
    polygon: Polygon = field(repr=False)
    amplitude: float = 1.0


@dataclass(frozen=True, eq=False)
class RealSWF:
    """A real combination of the two branches: cos-mode is their mean,
    sin-mode their difference over 2i."""

    terms: tuple[PlaneWaveTerm, ...]
    energy: float
    mode: str  # "cos" | "sin"
    polygon: Polygon = field(repr=False)
    amplitude: float = 1.0
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class BoundaryReport:
    entries: tuple[tuple[int, str, float], ...]  # (side, bc, residual)
    max_residual: float
    tol: float
    passed: bool


@dataclass(frozen=True, eq=False)
class HelmholtzReport:
    norm_spread: float
    max_residual: float
    bound: float
    passed: bool


class _Parity:
    """Union-find tracking relative signs: parity 1 joins mean opposite signs."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n

    def find(self, x: int) -> tuple[int, int]:
        if self.parent[x] == x:
            return x, 0
        root, par = self.find(self.parent[x])
        self.parent[x] = root
        self.parity[x] ^= par
        return root, self.parity[x]

    def union(self, x: int, y: int, rel: int) -> bool:
        rx, px = self.find(x)
        ry, py = self.find(y)
        if rx == ry:
            return (px ^ py) == rel
        self.parent[rx] = ry
        self.parity[rx] = px ^ py ^ rel
        return True


def enumerate_prescriptions(epp: EPP) -> list[SignPrescription]:
    """All consistent sign prescriptions of the pattern, image 1 positive.

    Each base edge independently demands either equal or opposite signs
    across all C copies; the choices that survive parity propagation over the
    full gluing are returned, all-Dirichlet first and all-Neumann last.
    """
    n = epp.polygon.n
    count = len(epp.images)
    found: list[SignPrescription] = []
    for mask in range(2**n):
        # bit set -> opposite signs on that edge class (Dirichlet)
        uf = _Parity(count + 1)
        ok = True
        for e in epp.edges:
            rel = 1 if mask >> e.side & 1 else 0
            if not uf.union(e.a, e.b, rel):
                ok = False
                break
        if not ok:
            continue
        _, base = uf.find(1)
        eta = []
        for k in range(1, count + 1):
            _, par = uf.find(k)
            eta.append(1 if par == base else -1)
        bc = tuple(DIRICHLET if mask >> s & 1 else NEUMANN for s in range(n))
        found.append(SignPrescription(eta=tuple(eta), bc=bc))
    found.sort(key=lambda pr: (pr.bc.count(NEUMANN), pr.bc))
    return found


def _momentum_vector(momentum) -> complex:
    if isinstance(momentum, QuantizedMomentum):
        return momentum.vector
    if isinstance(momentum, complex):
        return momentum
    return complex(momentum[0], momentum[1])


def compile_swf(
    epp: EPP, prescription: SignPrescription, momentum
) -> tuple[SWF, SWF]:
    """Build the two sign branches of the image sum for one momentum.

    Every image contributes the plane wave with the rotated/reflected
    momentum p_k and the constant phase p . t_k from its translation part.
    The momentum must fit the pattern: an integer number of its wavelengths
    along every period, otherwise the sum is not single-valued and
    UnquantizedMomentum is raised.
    """
    p = _momentum_vector(momentum)
    f = epp.polygon.frame
    for e in epp.edge_pairs:
        t = f.to_complex(e.period.vector)
        turns = ((p.conjugate() * t).real) / (2 * math.pi)
        if abs(turns - round(turns)) > _REL_TOL * max(1.0, abs(turns)):
            raise UnquantizedMomentum(
                f"momentum fits {turns:.6g} wavelengths (not an integer) "
                f"into the period {t:.6g}"
            )
    terms = []
    for img, eta in zip(epp.images, prescription.eta):
        iso = img.iso
        omega = complex(
            math.cos(math.pi * iso.rotation / f.N),
            math.sin(math.pi * iso.rotation / f.N),
        )
        t = f.to_complex(iso.translation)
        pk = p.conjugate() * omega if iso.reflecting else p * omega.conjugate()
        alpha = (p.conjugate() * t).real
        terms.append(PlaneWaveTerm(eta=eta, alpha=alpha, p=pk))
    terms = tuple(terms)
    energy = 0.5 * abs(p) ** 2
    return (
        SWF(terms=terms, energy=energy, branch=+1, polygon=epp.polygon),
        SWF(terms=terms, energy=energy, branch=-1, polygon=epp.polygon),
    )


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points)
    if pts.dtype.kind != "c":
        if pts.ndim >= 2 and pts.shape[-1] == 2:
            pts = pts[..., 0] + 1j * pts[..., 1]
        else:
            pts = pts.astype(complex)
    return pts


def evaluate(swf, points):
    """Values of the wave function at the given points (complex or (x, y))."""
    pts = _as_points(points)
    x, y = pts.real, pts.imag
    total = np.zeros(pts.shape, dtype=complex if isinstance(swf, SWF) else float)
    for term in swf.terms:
        phase = term.alpha + term.p.real * x + term.p.imag * y
        if isinstance(swf, SWF):
            total = total + term.eta * np.exp(1j * swf.branch * phase)
        elif swf.mode == "cos":
            total = total + term.eta * np.cos(phase)
        else:
            total = total + term.eta * np.sin(phase)
    return swf.amplitude * total


def _gradient(swf, points) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient (dPsi/dx, dPsi/dy) of the plane-wave sum."""
    pts = _as_points(points)
    x, y = pts.real, pts.imag
    cplx = isinstance(swf, SWF)
    gx = np.zeros(pts.shape, dtype=complex if cplx else float)
    gy = np.zeros_like(gx)
    for term in swf.terms:
        phase = term.alpha + term.p.real * x + term.p.imag * y
        if cplx:
            d = term.eta * 1j * swf.branch * np.exp(1j * swf.branch * phase)
        elif swf.mode == "cos":
            d = -term.eta * np.sin(phase)
        else:
            d = term.eta * np.cos(phase)
        gx = gx + term.p.real * d
        gy = gy + term.p.imag * d
    return swf.amplitude * gx, swf.amplitude * gy


def _interior_points(polygon: Polygon, count: int, seed: int) -> np.ndarray:
    verts = polygon.vertices_float()
    xs = [v.real for v in verts]
    ys = [v.imag for v in verts]
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        z = complex(
            rng.uniform(min(xs), max(xs)), rng.uniform(min(ys), max(ys))
        )
        if _contains(verts, z):
            out.append(z)
    return np.array(out)


def _contains(verts: list[complex], z: complex) -> bool:
    inside = False
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (a.imag > z.imag) != (b.imag > z.imag):
            xcross = a.real + (z.imag - a.imag) * (b.real - a.real) / (
                b.imag - a.imag
            )
            if z.real < xcross:
                inside = not inside
    return inside


def real_combinations(swf_pair: tuple[SWF, SWF]) -> tuple[RealSWF, RealSWF]:
    """The two real functions: branch mean (cos-mode) and difference over 2i
    (sin-mode).

    When the branches are already proportional one of the combinations
    vanishes identically; that one is returned with its degenerate flag set.
    If both vanish (the whole image sum is zero for this momentum) there is
    nothing to keep and DegenerateCombination is raised.
    """
    plus, minus = swf_pair
    if plus.branch != +1 or minus.branch != -1 or plus.terms is not minus.terms:
        raise ValueError("expected the ± pair produced by compile_swf")
    cos_f = RealSWF(
        terms=plus.terms, energy=plus.energy, mode="cos", polygon=plus.polygon
    )
    sin_f = RealSWF(
        terms=plus.terms, energy=plus.energy, mode="sin", polygon=plus.polygon
    )
    probe = _interior_points(plus.polygon, 64, seed=12345)
    vc = np.max(np.abs(evaluate(cos_f, probe)))
    vs = np.max(np.abs(evaluate(sin_f, probe)))
    scale = 2 * len(plus.terms)
    if vc <= 1e-10 * scale and vs <= 1e-10 * scale:
        raise DegenerateCombination(
            "both real combinations vanish identically for this momentum"
        )
    if vc <= 1e-10 * max(vs, 1e-30):
        cos_f = RealSWF(
            terms=cos_f.terms,
            energy=cos_f.energy,
            mode="cos",
            polygon=cos_f.polygon,
            degenerate=True,
        )
    elif vs <= 1e-10 * max(vc, 1e-30):
        sin_f = RealSWF(
            terms=sin_f.terms,
            energy=sin_f.energy,
            mode="sin",
            polygon=sin_f.polygon,
            degenerate=True,
        )
    return cos_f, sin_f


def verify_boundary(
    swf,
    polygon: Polygon,
    prescription: SignPrescription,
    samples_per_edge: int = 1000,
    tol: float = 1e-9,
) -> BoundaryReport:
    """Residuals on every edge: |Psi| where Dirichlet is induced, |dPsi/dn|
    where Neumann is (normal derivative taken analytically)."""
    verts = polygon.vertices_float()
    n = polygon.n
    ts = (np.arange(samples_per_edge) + 0.5) / samples_per_edge
    entries = []
    worst = 0.0
    for s in range(n):
        a, b = verts[s], verts[(s + 1) % n]
        pts = a + ts * (b - a)
        if prescription.bc[s] == DIRICHLET:
            res = float(np.max(np.abs(evaluate(swf, pts))))
        else:
            d = (b - a) / abs(b - a)
            normal = complex(d.imag, -d.real)  # outward for ccw order
            gx, gy = _gradient(swf, pts)
            res = float(np.max(np.abs(gx * normal.real + gy * normal.imag)))
        entries.append((s, prescription.bc[s], res))
        worst = max(worst, res)
    return BoundaryReport(
        entries=tuple(entries), max_residual=worst, tol=tol, passed=worst < tol
    )


def verify_helmholtz(swf, samples: int = 100, seed: int = 2) -> HelmholtzReport:
    """Check the wave really solves the Helmholtz equation at its energy.

    All term momenta must share one norm (raises MomentumMismatch) — that
    already implies the equation holds exactly; a finite-difference Laplacian
    at random interior points guards the implementation itself.
    """
    norms = [abs(t.p) for t in swf.terms]
    ref = norms[0]
    spread = max(abs(nm - ref) for nm in norms) / max(ref, 1e-30)
    if spread > 1e-12:
        raise MomentumMismatch(
            f"plane-wave norms differ by {spread:.3g} relative; "
            "the sum is not a fixed-energy solution"
        )
    e = swf.energy
    h = 1e-4 * 2 * math.pi / math.sqrt(2 * e)
    pts = _interior_points(swf.polygon, samples, seed=seed)
    # keep the whole stencil inside the polygon
    verts = swf.polygon.vertices_float()
    keep = [
        z
        for z in pts
        if all(
            _contains(verts, z + off)
            for off in (h, -h, 1j * h, -1j * h)
        )
    ]
    pts = np.array(keep) if keep else pts[:1]
    center = evaluate(swf, pts)
    lap = (
        evaluate(swf, pts + h)
        + evaluate(swf, pts - h)
        + evaluate(swf, pts + 1j * h)
        + evaluate(swf, pts - 1j * h)
        - 4 * center
    ) / h**2
    residual = float(np.max(np.abs(lap + 2 * e * center)))
    bound = 1e-6 * e * float(max(np.max(np.abs(center)), 1e-30))
    return HelmholtzReport(
        norm_spread=spread,
        max_residual=residual,
        bound=bound,
        passed=residual < bound,
    )


def symmetry_probe(swf, symmetry, samples: int = 200, tol: float = 1e-9) -> str:
    """Classify the wave as even, odd, or neither under a reflection map.

    `symmetry` is a map z -> z' (complex to complex) that must send the
    polygon onto itself; vertex images are checked against the vertex set
    first and SymmetryNotAutomorphism is raised on mismatch.
    """
    verts = swf.polygon.vertices_float()
    scale = max(abs(v) for v in verts) or 1.0
    for v in verts:
        w = symmetry(v)
        if min(abs(w - u) for u in verts) > 1e-9 * max(1.0, scale):
            raise SymmetryNotAutomorphism(
                f"vertex {v:.6g} maps to {w:.6g}, not a polygon vertex"
            )
    pts = _interior_points(swf.polygon, samples, seed=7)
    mapped = np.array([symmetry(z) for z in pts])
    v0 = evaluate(swf, pts)
    v1 = evaluate(swf, mapped)
    amp = float(np.max(np.abs(v0)))
    if amp <= 1e-30:
        return "even"
    if float(np.max(np.abs(v1 - v0))) <= tol * amp:
        return "even"
    if float(np.max(np.abs(v1 + v0))) <= tol * amp:
        return "odd"
    return "none"


def _triangulate(verts: list[complex]) -> list[tuple[complex, complex, complex]]:
    """Ear clipping; fine for the small, simple polygons used here."""
    left = list(verts)
    area2 = sum(
        (left[i].real * left[(i + 1) % len(left)].imag)
        - (left[(i + 1) % len(left)].real * left[i].imag)
        for i in range(len(left))
    )
    if area2 < 0:
        left.reverse()
    tris = []
    guard = 0
    while len(left) > 3 and guard < 10000:
        guard += 1
        n = len(left)
        for i in range(n):
            a, b, c = left[(i - 1) % n], left[i], left[(i + 1) % n]
            cross = (b - a).real * (c - b).imag - (b - a).imag * (c - b).real
            if cross <= 1e-15:
                continue
            ear = True
            for z in left:
                if z in (a, b, c):
                    continue
                # barycentric containment test
                d0, d1, d2 = b - a, c - a, z - a
                den = d0.real * d1.imag - d0.imag * d1.real
                u = (d2.real * d1.imag - d2.imag * d1.real) / den
                w = (d0.real * d2.imag - d0.imag * d2.real) / den
                if u > -1e-12 and w > -1e-12 and u + w < 1 + 1e-12:
                    ear = False
                    break
            if ear:
                tris.append((a, b, c))
                del left[i]
                break
        else:  # pragma: no cover - non-simple polygon
            break
    tris.append(tuple(left))
    return tris


def l2_norm(swf) -> float:
    """L2 norm over the polygon by Gauss-Legendre quadrature on a
    triangulation (16 points per triangle). Intended for plotting scales."""
    nodes, weights = np.polynomial.legendre.leggauss(4)
    nodes = 0.5 * (nodes + 1)
    weights = 0.5 * weights
    total = 0.0
    for a, b, c in _triangulate(swf.polygon.vertices_float()):
        area2 = abs(
            (b - a).real * (c - a).imag - (b - a).imag * (c - a).real
        )
        for iu, u in enumerate(nodes):
            for iv, v in enumerate(nodes):
                # collapsed-square map of the unit triangle
                z = a + u * (b - a) + v * (1 - u) * (c - a)
                w = weights[iu] * weights[iv] * (1 - u) * area2
                total += w * float(np.abs(evaluate(swf, np.array([z])))[0]) ** 2
    return math.sqrt(total)


def grid_csv(swf, width: int, height: int) -> str:
    """CSV dump x,y,re,im,abs2 on the bounding grid (outside rows included,
    zeroed)."""
    verts = swf.polygon.vertices_float()
    xs = [v.real for v in verts]
    ys = [v.imag for v in verts]
    gx = np.linspace(min(xs), max(xs), width)
    gy = np.linspace(min(ys), max(ys), height)
    lines = ["x,y,re,im,abs2"]
    for y in gy:
        row_pts = gx + 1j * y
        inside = np.array([_contains(verts, z) for z in row_pts])
        vals = np.where(inside, evaluate(swf, row_pts), 0.0)
        for x, v in zip(gx, vals):
            c = complex(v)
            lines.append(
                f"{x:.12g},{y:.12g},{c.real:.12g},{c.imag:.12g},"
                f"{abs(c) ** 2:.12g}"
            )
    return "\n".join(lines) + "\n"


def grid_pgm(swf, width: int, height: int) -> bytes:
    """8-bit PGM of |Psi|^2 on the bounding grid, outside pixels zeroed."""
    verts = swf.polygon.vertices_float()
    xs = [v.real for v in verts]
    ys = [v.imag for v in verts]
    gx = np.linspace(min(xs), max(xs), width)
    gy = np.linspace(min(ys), max(ys), height)
    img = np.zeros((height, width))
    for row, y in enumerate(gy):
        row_pts = gx + 1j * y
        inside = np.array([_contains(verts, z) for z in row_pts])
        vals = np.abs(np.where(inside, evaluate(swf, row_pts), 0.0)) ** 2
        img[height - 1 - row] = vals  # top row first in the file
    peak = img.max() or 1.0
    data = np.clip(img / peak * 255, 0, 255).astype(np.uint8)
    header = f"P5 {width} {height} 255\n".encode()
    return header + data.tobytes()
