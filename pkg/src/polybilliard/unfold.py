"""Unfolding a rational polygon: image orbits, periods, genus, channels.

Reflecting a polygon in its own sides, and the copies in theirs, tiles a
branched periodic figure.  Because every angle is (p/q)*pi, the linear parts
of the unfolding isometries form the dihedral group of order 2C (C = lcm of
the q's), so a breadth-first unfolding that accepts one image per orientation
terminates with exactly 2C images — the elementary pattern.  Every further
reflection lands on an accepted image up to a pure translation; those
translations are the simple periods, and the pattern's edges glue in pairs.

Gluing the 2C images along their edge pairs produces a closed orientable
surface whose genus the angle data fixes (`genus`).  `period_basis` computes
2g independent cycles on that surface and returns their translation vectors;
`find_pocs` classifies which simple periods admit an unobstructed channel of
parallel periodic orbits.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from math import lcm

from .errors import NonIntegerGenus, OrbitExplosion, RankMismatch
from .exactgeom import Polygon
from .ratlinalg import TrackingEchelon, hnf_rows

__all__ = [
    "Isometry",
    "PolygonImage",
    "Period",
    "EdgePair",
    "EPP",
    "reflect_image",
    "unfold_vertex",
    "build_epp",
    "genus",
    "period_basis",
    "find_pocs",
    "channel_exists",
]

_TOL = 1e-9


def _fmt_vec(f, v) -> str:
    z = f.to_complex(v)
    re, im = z.real, z.imag
    if f.exact:  # snap float dust off exactly-zero components
        if f.re(v).is_zero():
            re = 0.0
        if f.im(v).is_zero():
            im = 0.0
    return f"({re:.12g},{im:.12g})"


@dataclass(frozen=True)
class Isometry:
    """Planar isometry z -> unit(rotation) * (conj z if reflecting else z) + translation.

    `rotation` is a direction index mod 2N: the linear part rotates by
    rotation*pi/N (after the optional conjugation).  Composition is exact.
    """

    reflecting: bool
    rotation: int
    translation: object  # frame vector

    @classmethod
    def identity(cls, frame) -> "Isometry":
        return cls(False, 0, frame.zero())

    def apply(self, frame, z):
        w = frame.conj(z) if self.reflecting else z
        return frame.rotate(w, self.rotation) + self.translation

    def compose(self, other: "Isometry", frame) -> "Isometry":
        """self after other."""
        sign = -1 if self.reflecting else 1
        return Isometry(
            self.reflecting ^ other.reflecting,
            (self.rotation + sign * other.rotation) % (2 * frame.N),
            self.apply(frame, other.translation),
        )

    def transport(self, j: int, frame) -> int:
        """Direction index of the image of a vector with direction index j."""
        if self.reflecting:
            return (self.rotation - j) % (2 * frame.N)
        return (self.rotation + j) % (2 * frame.N)


@dataclass(frozen=True, eq=False)
class PolygonImage:
    """One copy of the polygon in the unfolding; index is 1-based, 0 = transient."""

    index: int
    iso: Isometry
    polygon: Polygon = field(repr=False)

    @property
    def parity(self) -> int:
        """0 for even (orientation-preserving), 1 for odd; equals the reflecting flag."""
        return 1 if self.iso.reflecting else 0

    def vertices(self) -> list:
        f = self.polygon.frame
        return [self.iso.apply(f, v) for v in self.polygon.verts]

    def vertices_float(self) -> list[complex]:
        f = self.polygon.frame
        return [f.to_complex(self.iso.apply(f, v)) for v in self.polygon.verts]

    def side_direction(self, s: int) -> int:
        return self.iso.transport(self.polygon.dirs[s], self.polygon.frame)


@dataclass(frozen=True, eq=False)
class Period:
    """A translation leaving the unfolded figure invariant.

    kind: "simple-internal" (a single edge-pair translation whose channel is
    unobstructed), "structural" (single pair, channel blocked by a branch
    point), "compound" (integer chain of pair translations), or None when a
    large pattern was built without channel classification.
    """

    vector: object
    kind: str | None = None


@dataclass(frozen=True, eq=False)
class EdgePair:
    """Gluing of side `side` of image a to side `side` of image b.

    Crossing from a to b continues the trajectory in the copy of the pattern
    offset by +translation; interior gluings have translation zero.  Boundary
    pairs are tagged with their simple period (canonical sign).
    """

    a: int
    b: int
    side: int
    translation: object
    period: Period | None


@dataclass(frozen=True, eq=False)
class EPP:
    """Elementary polygon pattern: 2C images plus the full edge gluing."""

    polygon: Polygon
    images: list[PolygonImage]
    edges: list[EdgePair]  # discovery order, interior and boundary mixed
    C: int

    def image(self, k: int) -> PolygonImage:
        return self.images[k - 1]

    @property
    def edge_pairs(self) -> list[EdgePair]:
        """Boundary pairs (nonzero translation), each tagged with its simple period."""
        return [e for e in self.edges if e.period is not None]

    @property
    def interior_edges(self) -> list[EdgePair]:
        return [e for e in self.edges if e.period is None]

    @cached_property
    def gluing(self) -> dict:
        """(image, side) -> (neighbor image, crossing translation)."""
        table = {}
        for e in self.edges:
            table[(e.a, e.side)] = (e.b, e.translation)
            table[(e.b, e.side)] = (e.a, -e.translation)
        return table

    @cached_property
    def _verts_float(self) -> list[list[complex]]:
        return [img.vertices_float() for img in self.images]

    def dump(self) -> str:
        f = self.polygon.frame
        lines = [f"EPP C={self.C} images={len(self.images)} exact={f.exact}"]
        for img in self.images:
            lines.append(
                f"image {img.index}: rot={img.iso.rotation} refl={img.parity} "
                f"t={_fmt_vec(f, img.iso.translation)}"
                + (f" t_exact={img.iso.translation!r}" if f.exact else "")
            )
        for e in self.edges:
            kind = e.period.kind if e.period is not None else "interior"
            lines.append(
                f"pair side {e.side}: {e.a} <-> {e.b} "
                f"T={_fmt_vec(f, e.translation)} [{kind}]"
            )
        return "\n".join(lines)


def _side_reflection(image: PolygonImage, s: int) -> Isometry:
    """Reflection of the plane across the line containing side s of the image."""
    poly = image.polygon
    f = poly.frame
    d = image.side_direction(s)
    p0 = image.iso.apply(f, poly.verts[s])
    r = (2 * d) % (2 * f.N)
    return Isometry(True, r, p0 - f.rotate(f.conj(p0), r))


def reflect_image(image: PolygonImage, edge_id: int) -> PolygonImage:
    """One unfolding step: the mirror copy of the image across its own edge."""
    poly = image.polygon
    if not 0 <= edge_id < poly.n:
        raise ValueError(f"edge {edge_id} out of range for an {poly.n}-gon")
    refl = _side_reflection(image, edge_id)
    return PolygonImage(0, refl.compose(image.iso, poly.frame), poly)


def unfold_vertex(polygon: Polygon, vertex_index: int) -> list[PolygonImage]:
    """Complete fan of images around one vertex: exactly 2q copies.

    The angle (p/q)*pi at the vertex means alternating reflections in the two
    adjacent sides generate a dihedral group of order 2q; the fan lists one
    image per group element, starting from the identity.
    """
    n = polygon.n
    i = vertex_index % n
    q = polygon.angles[(i - 1) % n].q  # angle at vertex i ends side i-1
    out = [PolygonImage(1, Isometry.identity(polygon.frame), polygon)]
    sides = [i, (i - 1) % n]
    for t in range(2 * q - 1):
        nxt = reflect_image(out[-1], sides[t % 2])
        out.append(PolygonImage(t + 2, nxt.iso, polygon))
    closing = reflect_image(out[-1], sides[(2 * q - 1) % 2]).iso
    scale = polygon.perimeter_float()
    if (
        closing.reflecting
        or closing.rotation != 0
        or not polygon.frame.is_zero(closing.translation, scale)
    ):
        raise RuntimeError("vertex fan failed to close: angle bookkeeping bug")
    return out


def genus(polygon: Polygon) -> int:
    """Genus of the closed surface obtained by gluing the pattern's edge pairs."""
    c = lcm(*(a.q for a in polygon.angles))
    g = 1 + Fraction(c, 2) * sum(Fraction(a.p - 1, a.q) for a in polygon.angles)
    if g.denominator != 1:
        raise NonIntegerGenus(f"genus formula gave {g} for {polygon!r}")
    return int(g)


def _half_plane(frame, v):
    """v or -v, whichever has re > 0 (tie: im > 0)."""
    z = frame.to_complex(v)
    scale = max(1.0, abs(z))
    re = z.real
    if frame.exact and frame.re(v).is_zero():
        re = 0.0
    elif not frame.exact and abs(re) <= _TOL * scale:
        re = 0.0
    if re > 0:
        return v
    if re < 0:
        return -v
    return v if z.imag > 0 else -v


def build_epp(polygon: Polygon, classify: bool | None = None) -> EPP:
    """Breadth-first unfolding accepting one image per orientation.

    The linear parts of unfolding isometries live in the dihedral group of
    order 2C, and two images are faithful copies of each other exactly when
    their orientations agree, so orientation-dedup yields the 2C-image
    elementary pattern deterministically.  `classify` controls whether each
    boundary pair's simple period is channel-classified (the test traces
    sample orbits; defaults to on for patterns of at most 200 images).
    """
    f = polygon.frame
    n = polygon.n
    cap = 16 * f.N
    scale = polygon.perimeter_float()
    images = [PolygonImage(1, Isometry.identity(f), polygon)]
    by_orient: dict[tuple[bool, int], int] = {(False, 0): 1}
    glued: set[tuple[int, int]] = set()
    edges: list[EdgePair] = []
    queue: deque[tuple[int, int]] = deque((1, s) for s in range(n))
    while queue:
        k, s = queue.popleft()
        if (k, s) in glued:
            continue
        img = images[k - 1]
        cand = _side_reflection(img, s).compose(img.iso, f)
        other = by_orient.get((cand.reflecting, cand.rotation))
        if other is None:
            if len(images) >= cap:
                raise OrbitExplosion(
                    f"more than {cap} images; the orientation dedup must be broken"
                )
            k2 = len(images) + 1
            images.append(PolygonImage(k2, cand, polygon))
            by_orient[(cand.reflecting, cand.rotation)] = k2
            edges.append(EdgePair(k, k2, s, f.zero(), None))
            glued.add((k, s))
            glued.add((k2, s))
            queue.extend((k2, s2) for s2 in range(n))
        else:
            if (other, s) in glued:
                raise RuntimeError("edge pairing inconsistency: slot glued twice")
            t = cand.translation - images[other - 1].iso.translation
            if f.is_zero(t, scale):
                edges.append(EdgePair(k, other, s, f.zero(), None))
            else:
                edges.append(EdgePair(k, other, s, t, Period(_half_plane(f, t), None)))
            glued.add((k, s))
            glued.add((other, s))
    if len(images) != 2 * f.N:
        raise RuntimeError(
            f"unfolding closed with {len(images)} images, expected {2 * f.N}"
        )
    if len(edges) != n * f.N or len(glued) != 2 * n * f.N:
        raise RuntimeError("edge pairing incomplete after BFS closure")
    epp = EPP(polygon, images, edges, f.N)
    if classify is None:
        classify = len(images) <= 200
    if classify:
        kinds: dict[int, str] = {}
        for cid, e in enumerate(edges):
            if e.period is None:
                continue
            kind = "simple-internal" if channel_exists(epp, e.period.vector) else "structural"
            kinds[cid] = kind
        edges = [
            replace(e, period=Period(e.period.vector, kinds[cid]))
            if e.period is not None
            else e
            for cid, e in enumerate(edges)
        ]
        epp = EPP(polygon, images, edges, f.N)
    return epp


# ---------------------------------------------------------------------------
# Homology of the glued surface
# ---------------------------------------------------------------------------


def _edge_lookup(epp: EPP) -> dict:
    """(image, side) -> (edge class id, crossing sign)."""
    table = {}
    for cid, e in enumerate(epp.edges):
        table[(e.a, e.side)] = (cid, 1)
        table[(e.b, e.side)] = (cid, -1)
    return table


def _corner_loops(epp: EPP, lookup: dict):
    """One chain per vertex class: the cycle of faces around the glued vertex.

    Going around a vertex of the surface crosses the two adjacent sides
    alternately, 2q times in total, and its developed image closes up, so the
    accumulated translation must vanish — both facts are asserted.
    """
    poly = epp.polygon
    f = poly.frame
    n = poly.n
    scale = poly.perimeter_float()
    loops = []
    seen: set[tuple[int, int]] = set()
    for k in range(1, len(epp.images) + 1):
        for i in range(n):
            if (k, i) in seen:
                continue
            chain: dict[int, int] = defaultdict(int)
            hol = f.zero()
            cur, toggle, steps = k, 0, 0
            while True:
                seen.add((cur, i))
                s = i if toggle == 0 else (i - 1) % n
                cid, sgn = lookup[(cur, s)]
                e = epp.edges[cid]
                chain[cid] += sgn
                hol = hol + (e.translation if sgn > 0 else -e.translation)
                cur = e.b if sgn > 0 else e.a
                toggle ^= 1
                steps += 1
                if cur == k and toggle == 0:
                    break
                if steps > 2 * len(epp.images):
                    raise RankMismatch("vertex walk failed to close")
            q = poly.angles[(i - 1) % n].q
            if steps != 2 * q:
                raise RankMismatch(
                    f"vertex class at corner ({k},{i}) has {steps} corners, expected {2 * q}"
                )
            if not f.is_zero(hol, scale):
                raise RankMismatch("vertex loop has nonzero holonomy")
            loops.append(dict(chain))
    return loops


def _interior_tree(epp: EPP):
    """Spanning tree of the zero-translation adjacency; image -> (parent, class id)."""
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for cid, e in enumerate(epp.edges):
        if e.period is None:
            adj[e.a].append((e.b, cid))
            adj[e.b].append((e.a, cid))
    parent: dict[int, tuple[int, int] | None] = {1: None}
    queue = deque([1])
    while queue:
        k = queue.popleft()
        for k2, cid in adj[k]:
            if k2 not in parent:
                parent[k2] = (k, cid)
                queue.append(k2)
    if len(parent) != len(epp.images):
        raise RankMismatch("pattern interior is not connected")
    return parent


def _chain_to_root(k: int, parent, epp: EPP) -> dict[int, int]:
    chain: dict[int, int] = defaultdict(int)
    while parent[k] is not None:
        pk, cid = parent[k]
        e = epp.edges[cid]
        chain[cid] += 1 if e.a == k else -1
        k = pk
    return chain


def _merge(a: dict[int, int], b: dict[int, int], sign: int) -> dict[int, int]:
    out = dict(a)
    for cid, c in b.items():
        out[cid] = out.get(cid, 0) + sign * c
    return {cid: c for cid, c in out.items() if c}


def period_basis(epp: EPP, verify: bool | None = None) -> list[Period]:
    """2g independent periods of the unfolded figure.

    Cycles on the glued surface are chains over the edge classes; quotienting
    by the vertex loops (which bound) leaves a rank-2g homology in which the
    boundary-pair crossing cycles and their chains live.  The basis is chosen
    greedily among crossing cycles by ascending period length, completed by
    chained (compound) cycles, and then Hermite-refined so that every cycle of
    the pattern — in particular every simple period — is an exact integer
    combination of the returned classes.

    Note the returned *vectors* need not be integer-independent in the plane:
    whenever period ratios are rational the plane vectors satisfy integer
    relations, and the independence statement lives on the surface cycles.
    """
    poly = epp.polygon
    f = poly.frame
    g = genus(poly)
    edges = epp.edges
    ecount = len(edges)
    lookup = _edge_lookup(epp)
    loops = _corner_loops(epp, lookup)
    nverts = len(loops)
    if nverts - ecount + len(epp.images) != 2 - 2 * g:
        raise RankMismatch(
            f"Euler characteristic {nverts - ecount + len(epp.images)} != {2 - 2 * g}"
        )

    def dense(chain: dict[int, int]) -> list[Fraction]:
        return [Fraction(chain.get(cid, 0)) for cid in range(ecount)]

    ech = TrackingEchelon(ecount)
    for chain in loops:
        ech.insert(dense(chain))
    n_faces = ech.rank
    if n_faces != nverts - 1:
        raise RankMismatch(f"vertex loops have rank {n_faces}, expected {nverts - 1}")

    parent = _interior_tree(epp)
    to_root = {k: _chain_to_root(k, parent, epp) for k in range(1, len(epp.images) + 1)}
    tree_classes = {cid for p in parent.values() if p is not None for cid in [p[1]]}

    candidates = []  # (sort key, chain, holonomy vector, boundary class id or None)
    for cid, e in enumerate(edges):
        if e.period is None:
            continue
        chain = _merge({cid: 1}, _merge(to_root[e.b], to_root[e.a], -1), 1)
        norm = abs(f.to_complex(e.translation))
        candidates.append(((0, round(norm, 12), cid), chain, e.translation, cid))
    for cid, e in enumerate(edges):
        if e.period is not None or cid in tree_classes:
            continue
        chain = _merge({cid: 1}, _merge(to_root[e.b], to_root[e.a], -1), 1)
        candidates.append(((1, 0.0, cid), chain, f.zero(), cid))
    candidates.sort(key=lambda c: c[0])

    accepted = []  # (chain, holonomy, boundary class id or None)
    coords = []  # homology coordinates of every candidate over the accepted cycles
    for _key, chain, hol, cid in candidates:
        ok, info = ech.insert(dense(chain))
        if ok:
            coords.append(
                [Fraction(1 if j == len(accepted) else 0) for j in range(2 * g)]
            )
            accepted.append((chain, hol, cid))
        else:
            # drop the vertex-loop components; keep the cycle components
            cvec = [info[n_faces + j] if n_faces + j < len(info) else Fraction(0)
                    for j in range(2 * g)]
            coords.append(cvec)
    if len(accepted) != 2 * g:
        raise RankMismatch(
            f"found {len(accepted)} independent cycles, genus demands {2 * g}"
        )

    # Hermite refinement: the accepted cycles span the homology over Q but may
    # generate a proper sublattice over Z; refine on all candidates' coordinates.
    den = 1
    for cvec in coords:
        for x in cvec:
            den = lcm(den, x.denominator)
    hermite = hnf_rows([[int(x * den) for x in cvec] for cvec in coords])
    if len(hermite) != 2 * g:
        raise RankMismatch("period lattice rank disagrees with the genus")
    basis_coords = [[Fraction(h, den) for h in row] for row in hermite]

    def holonomy_of(cvec) -> object:
        vec = f.zero()
        for c, (_chain, hol, _cid) in zip(cvec, accepted):
            if c:
                vec = vec + hol * c
        return vec

    out_coords = [list(row) for row in basis_coords]
    vectors = [holonomy_of(c) for c in out_coords]
    scale = poly.perimeter_float()
    nonzero = next(
        (j for j, v in enumerate(vectors) if not f.is_zero(v, scale)), None
    )
    if nonzero is None:
        raise RankMismatch("all basis periods have zero translation")
    for j, v in enumerate(vectors):
        if f.is_zero(v, scale):
            out_coords[j] = [
                a + b for a, b in zip(out_coords[j], out_coords[nonzero])
            ]
            vectors[j] = holonomy_of(out_coords[j])

    if verify is None:
        verify = len(epp.images) <= 200
    if verify:
        _verify_integer_spans(coords, basis_coords)

    periods = []
    for vec in vectors:
        v = _half_plane(f, vec)
        kind = "compound"
        for e in epp.edge_pairs:
            if f.is_zero(v - _half_plane(f, e.translation), scale):
                kind = e.period.kind
                if kind is None:
                    kind = (
                        "simple-internal"
                        if channel_exists(epp, v)
                        else "structural"
                    )
                break
        z = f.to_complex(v)
        periods.append((round(abs(z), 12), math.atan2(z.imag, z.real), Period(v, kind)))
    periods.sort(key=lambda t: (t[0], t[1]))
    return [p for _n, _a, p in periods]


def _verify_integer_spans(coords, basis_coords) -> None:
    """Every candidate cycle must be an integer combination of the basis."""
    rows = [list(r) for r in basis_coords]
    pivots = []
    for r in rows:
        pivots.append(next(j for j, x in enumerate(r) if x))
    for cvec in coords:
        v = list(cvec)
        for r, piv in zip(rows, pivots):
            c = v[piv] / r[piv]
            if c:
                if c.denominator != 1:
                    raise RankMismatch(
                        "a pattern cycle is not an integer combination of the basis"
                    )
                v = [a - c * b for a, b in zip(v, r)]
        if any(v):
            raise RankMismatch("a pattern cycle escapes the period basis")


# ---------------------------------------------------------------------------
# Periodic-orbit channels
# ---------------------------------------------------------------------------


def _trace_closes(epp: EPP, face0: int, z0: complex, target, max_steps: int = 100000) -> bool:
    """March a straight line of length |target| from z0 and test closure.

    Crossing a glued side moves the march to the partner face and shifts the
    local frame by the pair translation; the orbit is periodic exactly when
    it returns to the starting face at the starting point with accumulated
    offset equal to `target` (compared exactly).
    """
    f = epp.polygon.frame
    scale = epp.polygon.perimeter_float()
    tol = _TOL * max(1.0, scale)
    tgt = f.to_complex(target)
    total = abs(tgt)
    u = tgt / total
    cur, face = z0, face0
    offset = f.zero()
    remaining = total
    for _ in range(max_steps):
        verts = epp._verts_float[face - 1]
        n = len(verts)
        best_s, best_side, best_r = None, None, None
        for t in range(n):
            a, b = verts[t], verts[(t + 1) % n]
            d = b - a
            denom = (u.conjugate() * d).imag
            if abs(denom) < 1e-13:
                continue
            w = a - cur
            s_hit = (w.conjugate() * d).imag / denom
            r_hit = (w.conjugate() * u).imag / denom
            if s_hit <= tol or r_hit < -_TOL or r_hit > 1 + _TOL:
                continue
            if best_s is None or s_hit < best_s:
                best_s, best_side, best_r = s_hit, t, r_hit
        if best_s is None:
            return False
        if remaining <= best_s - tol:
            return False  # endpoint strictly inside a face: cannot match z0 on its edge
        edge_len = abs(verts[(best_side + 1) % len(verts)] - verts[best_side])
        if min(best_r, 1 - best_r) * edge_len < tol:
            return False  # corner hit: sample invalid
        nxt, t_cross = epp.gluing[(face, best_side)]
        cur = cur + best_s * u - f.to_complex(t_cross)
        offset = offset + t_cross
        face = nxt
        remaining -= best_s
        if abs(remaining) <= tol:
            if face != face0:
                return False
            if not f.is_zero(offset - target, scale):
                return False
            return abs(cur - z0) <= 1e-6 * max(1.0, scale)
    return False


def channel_exists(epp: EPP, vector, samples: int = 33) -> bool:
    """Does some straight orbit close up under translation by `vector`?

    A closing orbit must cross a boundary edge, so sampling points along all
    boundary edges and marching in both directions finds any channel wider
    than the sampling pitch.  The test is a sampled sufficient check: True is
    a proof (up to float tracing), False means no channel was found.
    """
    f = epp.polygon.frame
    tgt = f.to_complex(vector)
    for e in epp.edges:
        if e.period is None:
            continue
        for face in (e.a, e.b):
            verts = epp._verts_float[face - 1]
            a, b = verts[e.side], verts[(e.side + 1) % len(verts)]
            ccw = not epp.image(face).iso.reflecting
            d = (b - a) / abs(b - a)
            for j in range(1, samples):
                z = a + (b - a) * (j / samples)
                for sign in (1, -1):
                    u = sign * tgt / abs(tgt)
                    inward = (d.conjugate() * u).imag
                    if not ccw:
                        inward = -inward
                    if inward < 1e-9:
                        continue
                    if _trace_closes(epp, face, z, vector if sign > 0 else -vector):
                        return True
    return False


def find_pocs(epp: EPP, basis: list[Period] | None = None):
    """Simple periods admitting a periodic-orbit channel, with their directions.

    Returns (direction, Period) pairs, direction in [0, pi); one entry per
    distinct simple period up to sign, ordered by period length.  The basis
    argument is accepted for interface symmetry with period_basis and is not
    consulted: channels are a property of the pattern's edge pairs alone.
    """
    f = epp.polygon.frame
    scale = epp.polygon.perimeter_float()
    entries = []
    seen: list = []
    for e in sorted(
        epp.edge_pairs,
        key=lambda e: round(abs(f.to_complex(e.translation)), 12),
    ):
        v = _half_plane(f, e.translation)
        if any(f.is_zero(v - w, scale) for w in seen):
            continue
        seen.append(v)
        if channel_exists(epp, v):
            z = f.to_complex(v)
            direction = math.atan2(z.imag, z.real) % math.pi
            entries.append((direction, Period(v, "simple-internal")))
    return entries
