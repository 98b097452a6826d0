"""Terminal front end: analyze, unfold, quantize, swf, verify, rationalize.

One binary, subcommand style.  Every command is deterministic — the same
invocation produces byte-identical output — and the exit codes form a small
stable contract scripts can rely on:

  0  success
  2  input error (unreadable file, bad JSON, closure failure, bad flags)
  3  the billiard is not doubly rational and no --rationalize cap was given
  4  sign-prescription id out of range
  5  verification failure (spectra out of tolerance, boundary/Helmholtz check)

The only environment influence is ``POLYBILLIARD_THREADS``, which caps the
BLAS thread pools; everything else comes in through flags.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BilliardError,
    ConvergenceFailure,
    MomentumMismatch,
    NotDoublyRational,
    OutOfRange,
    TooCoarse,
)
from .exactgeom import load_polygon
from .lattice import PeriodLattice, period_lattice, rationalize_relations
from .oracle import (
    compare_spectra,
    fd_eigenvalues,
    perturbation_study,
    rasterize,
    report_csv,
    study_csv,
)
from .quantize import (
    CLASSICAL_APERIODIC,
    CLASSICAL_PERIODIC,
    QUANTUM,
    momentum_aperiodic,
    spectrum,
    spectrum_csv,
)
from .swf import (
    DIRICHLET,
    NEUMANN,
    compile_swf,
    enumerate_prescriptions,
    grid_csv,
    grid_pgm,
    verify_boundary,
    verify_helmholtz,
)
from .unfold import build_epp, period_basis

__all__ = ["RunConfig", "run", "main"]

_KIND_NAMES = {
    "aperiodic": CLASSICAL_APERIODIC,
    "periodic": CLASSICAL_PERIODIC,
    "quantum": QUANTUM,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, resolved from flags."""

    command: str
    polygon_path: str | None = None
    out: str | None = None
    e_max: float = 50.0
    kinds: tuple[str, ...] = (CLASSICAL_APERIODIC, CLASSICAL_PERIODIC)
    max_ratio: float = 0.2
    max_denominator: int | None = None
    prescription: int = 1
    labels: tuple[int, int] = (1, 1)
    grid: tuple[int, int] = (160, 120)
    edge_samples: int = 1000
    swf_tol: float = 1e-9
    spacing: float = 1.0 / 64
    count: int = 40
    rel_tol: float = 0.02
    bc: str = DIRICHLET
    against: str | None = None
    study: tuple[float, ...] | None = None
    study_count: int = 10
    value: str | None = None


# --------------------------------------------------------------------------
# flag parsing helpers


def _fraction_flag(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _labels_flag(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("labels must look like M,N")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"labels must be integers: {text!r}")


def _grid_flag(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("grid must look like WIDTHxHEIGHT")
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be integers: {text!r}")
    if w < 2 or h < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2x2 samples")
    return (w, h)


def _kinds_flag(text: str) -> tuple[str, ...]:
    out = []
    for raw in text.split(","):
        name = raw.strip().lower()
        if name not in _KIND_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown kind {name!r} (choose from {', '.join(sorted(_KIND_NAMES))})"
            )
        out.append(_KIND_NAMES[name])
    return tuple(out)


def _study_flag(text: str) -> tuple[float, ...]:
    return tuple(float(_fraction_flag(part)) for part in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polybilliard",
        description="rational polygon billiards: unfolding, spectra, wave functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="genus, periods, relation table, DRPB verdict")
    p.add_argument("polygon", help="polygon JSON file")

    p = sub.add_parser("unfold", help="dump the elementary pattern and period basis")
    p.add_argument("polygon")
    p.add_argument("--out", help="write the dump to a file instead of stdout")

    p = sub.add_parser("quantize", help="semiclassical spectrum as CSV")
    p.add_argument("polygon")
    p.add_argument("--e-max", type=float, default=50.0, help="energy cutoff (default 50)")
    p.add_argument(
        "--kinds",
        type=_kinds_flag,
        default=(CLASSICAL_APERIODIC, CLASSICAL_PERIODIC),
        help="comma list of aperiodic, periodic, quantum (default the classical two)",
    )
    p.add_argument(
        "--max-ratio",
        type=float,
        default=0.2,
        help="slow-variation bound for the quantum family (default 0.2)",
    )
    p.add_argument(
        "--rationalize",
        type=int,
        metavar="Q",
        help="approximate irrational relations with denominators up to Q",
    )
    p.add_argument("--out", help="write the CSV to a file instead of stdout")

    p = sub.add_parser("swf", help="sample one semiclassical wave on a grid")
    p.add_argument("polygon")
    p.add_argument(
        "--prescription",
        type=int,
        default=1,
        help="sign prescription id, 1-based in enumeration order (default 1)",
    )
    p.add_argument(
        "--labels",
        type=_labels_flag,
        default=(1, 1),
        metavar="M,N",
        help="momentum labels (default 1,1)",
    )
    p.add_argument(
        "--grid",
        type=_grid_flag,
        default=(160, 120),
        metavar="WxH",
        help="sampling grid over the bounding box (default 160x120)",
    )
    p.add_argument(
        "--out-prefix",
        default="swf",
        help="write PREFIX.csv and PREFIX.pgm (default swf)",
    )
    p.add_argument(
        "--edge-samples",
        type=int,
        default=1000,
        help="boundary-residual samples per edge (default 1000)",
    )
    p.add_argument(
        "--tol",
        type=float,
        default=1e-9,
        help="boundary residual tolerance (default 1e-9)",
    )

    p = sub.add_parser(
        "verify", help="finite-difference spectrum against the closed form"
    )
    p.add_argument("polygon")
    p.add_argument(
        "--spacing",
        type=_fraction_flag,
        default=Fraction(1, 64),
        help="grid spacing, a fraction like 1/64 (default 1/64)",
    )
    p.add_argument(
        "--count", type=int, default=40, help="numerical levels to compute (default 40)"
    )
    p.add_argument(
        "--e-max", type=float, default=40.0, help="closed-form cutoff (default 40)"
    )
    p.add_argument(
        "--rel-tol",
        type=_fraction_flag,
        default=Fraction(1, 50),
        help="match tolerance, decimal or fraction (default 0.02)",
    )
    p.add_argument(
        "--bc",
        choices=[DIRICHLET, NEUMANN],
        default=DIRICHLET,
        help="wall condition for both spectra (default dirichlet)",
    )
    p.add_argument(
        "--against",
        metavar="OTHER.json",
        help="compare closed forms of two billiards instead of running the "
        "finite-difference solver (the spectral-incompleteness experiment)",
    )
    p.add_argument(
        "--study",
        type=_study_flag,
        metavar="E1,E2,...",
        help="also run the deformation study at these strictly decreasing sizes",
    )
    p.add_argument(
        "--study-count",
        type=int,
        default=10,
        help="levels tracked by the deformation study (default 10)",
    )
    p.add_argument("--out", help="write the match CSV to a file instead of stdout")

    p = sub.add_parser("rationalize", help="best fraction under a denominator cap")
    p.add_argument("value", help="a decimal or fraction, e.g. 1.41421356237 or 99/70")
    p.add_argument(
        "--max-denominator",
        type=int,
        default=100,
        metavar="Q",
        help="denominator cap (default 100)",
    )

    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = {"command": ns.command}
    if hasattr(ns, "polygon"):
        fields["polygon_path"] = ns.polygon
    for src, dst in [
        ("out", "out"),
        ("e_max", "e_max"),
        ("kinds", "kinds"),
        ("max_ratio", "max_ratio"),
        ("rationalize", "max_denominator"),
        ("max_denominator", "max_denominator"),
        ("prescription", "prescription"),
        ("labels", "labels"),
        ("grid", "grid"),
        ("out_prefix", "out"),
        ("edge_samples", "edge_samples"),
        ("tol", "swf_tol"),
        ("count", "count"),
        ("bc", "bc"),
        ("against", "against"),
        ("study", "study"),
        ("study_count", "study_count"),
        ("value", "value"),
    ]:
        if hasattr(ns, src) and getattr(ns, src) is not None:
            fields[dst] = getattr(ns, src)
    if hasattr(ns, "spacing"):
        fields["spacing"] = float(ns.spacing)
    if hasattr(ns, "rel_tol"):
        fields["rel_tol"] = float(ns.rel_tol)
    return RunConfig(**fields)


# --------------------------------------------------------------------------
# shared plumbing


def _load_lattice(path: str) -> tuple:
    polygon = load_polygon(path)
    epp = build_epp(polygon)
    basis = period_basis(epp)
    lat = period_lattice(polygon.frame, basis)
    return polygon, epp, basis, lat


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _drpb_phrase(lat: PeriodLattice) -> str:
    return "yes" if lat.doubly_rational else "no (irrational relations)"


# --------------------------------------------------------------------------
# subcommands


def cmd_analyze(config: RunConfig) -> int:
    _, epp, basis, lat = _load_lattice(config.polygon_path)
    print(
        f"g={lat.genus}, images={len(epp.images)}, "
        f"periods={len(basis)}, DRPB={_drpb_phrase(lat)}"
    )
    print(lat.report())
    return 0


def cmd_unfold(config: RunConfig) -> int:
    polygon = load_polygon(config.polygon_path)
    epp = build_epp(polygon)
    basis = period_basis(epp)
    f = polygon.frame
    lines = [epp.dump(), "period basis:"]
    for idx, per in enumerate(basis):
        z = f.to_complex(per.vector)
        kind = f" {per.kind}" if per.kind else ""
        lines.append(f"  P{idx + 1}: ({z.real:.12g}, {z.imag:.12g}){kind}")
    _emit("\n".join(lines) + "\n", config.out)
    return 0


def cmd_quantize(config: RunConfig) -> int:
    _, _, _, lat = _load_lattice(config.polygon_path)
    if not lat.doubly_rational:
        if config.max_denominator is None:
            print(
                "period relations are irrational; re-run with --rationalize Q "
                "to quantize the nearest doubly-rational billiard",
                file=sys.stderr,
            )
            return 3
        rational = rationalize_relations(lat.relations, config.max_denominator)
        lat = PeriodLattice(basis=lat.basis, relations=lat.relations, rational=rational)
        print(
            f"approximate: relations rationalized with denominator cap "
            f"Q={config.max_denominator}; the spectrum below belongs to the "
            f"substituted billiard",
            file=sys.stderr,
        )
    entries = spectrum(lat, config.e_max, kinds=config.kinds, max_ratio=config.max_ratio)
    flagged = sum(1 for e in entries if e.flag)
    if flagged:
        print(
            f"{flagged} level(s) violate the slow-variation bound "
            f"(see the flag column)",
            file=sys.stderr,
        )
    _emit(spectrum_csv(entries), config.out)
    return 0


def cmd_swf(config: RunConfig) -> int:
    polygon, epp, basis, lat = _load_lattice(config.polygon_path)
    prescriptions = enumerate_prescriptions(epp)
    pid = config.prescription
    if not 1 <= pid <= len(prescriptions):
        print(
            f"prescription id {pid} out of range: this pattern has "
            f"{len(prescriptions)} (ids 1..{len(prescriptions)})",
            file=sys.stderr,
        )
        return 4
    pres = prescriptions[pid - 1]
    m, n = config.labels
    momentum = momentum_aperiodic(lat, m, n)
    psi = compile_swf(epp, pres, momentum)[0]

    width, height = config.grid
    csv_path = f"{config.out}.csv" if config.out else "swf.csv"
    pgm_path = f"{config.out}.pgm" if config.out else "swf.pgm"
    with open(csv_path, "w") as fh:
        fh.write(grid_csv(psi, width, height))
    with open(pgm_path, "wb") as fh:
        fh.write(grid_pgm(psi, width, height))

    print(f"prescription {pid}/{len(prescriptions)} [{pres.label}], labels ({m},{n})")
    print(f"energy: {psi.energy:.12g}")
    print(f"wrote {csv_path} and {pgm_path} ({width}x{height} grid)")
    boundary = verify_boundary(
        psi, polygon, pres, samples_per_edge=config.edge_samples, tol=config.swf_tol
    )
    for side, bc, res in boundary.entries:
        print(f"side {side} [{bc}]: residual {res:.3e}")
    verdict = "PASS" if boundary.passed else "FAIL"
    print(
        f"boundary max residual {boundary.max_residual:.3e} "
        f"(tol {boundary.tol:g}) {verdict}"
    )
    helm = verify_helmholtz(psi)
    verdict = "PASS" if helm.passed else "FAIL"
    print(
        f"helmholtz: norm spread {helm.norm_spread:.3e}, "
        f"fd residual {helm.max_residual:.3e} < {helm.bound:.3e} {verdict}"
    )
    return 0 if boundary.passed and helm.passed else 5


def _axis_product_levels(lat: PeriodLattice, e_max: float, bc: str) -> list[float]:
    """Energies of the product modes of an axis-aligned billiard.

    Labels run over ordered pairs: both >= 1 under Dirichlet walls (a zero
    label kills the sine factor), both >= 0 except (0,0) under Neumann.  The
    pair momenta must be axis-aligned for product modes to exist at all.
    """
    from .quantize import _dual_steps  # closed-form pair momenta

    p1, p2 = _dual_steps(lat)
    for p in (p1, p2):
        if min(abs(p.real), abs(p.imag)) > 1e-9 * abs(p):
            raise OutOfRange(
                "verify needs an axis-aligned billiard: the closed-form "
                "product spectrum is undefined for skewed period pairs"
            )
    lo = 1 if bc == DIRICHLET else 0
    a, b = 0.5 * abs(p1) ** 2, 0.5 * abs(p2) ** 2
    levels = []
    m = lo
    while a * m * m <= e_max or m == 0:
        n = lo
        while True:
            e = a * m * m + b * n * n
            if e > e_max:
                break
            if e > 0:
                levels.append(e)
            n += 1
        m += 1
    return sorted(levels)


def cmd_verify(config: RunConfig) -> int:
    polygon, _, _, lat = _load_lattice(config.polygon_path)
    if not lat.doubly_rational:
        print(
            "period relations are irrational; there is no closed-form "
            "spectrum to verify against",
            file=sys.stderr,
        )
        return 3
    sem = _axis_product_levels(lat, config.e_max, config.bc)
    if config.against is not None:
        _, _, _, other = _load_lattice(config.against)
        numerical = _axis_product_levels(other, config.e_max, config.bc)
    else:
        domain = rasterize(polygon, config.spacing, bc_map=config.bc)
        numerical = fd_eigenvalues(domain, config.count)
    ceiling = float(numerical[-1]) / (1 + config.rel_tol)
    sem = [e for e in sem if e <= ceiling]
    if not sem:
        raise OutOfRange(
            "no closed-form level below the numerical reach; raise --count "
            "or --e-max"
        )
    report = compare_spectra(sem, numerical, config.rel_tol)
    _emit(report_csv(report), config.out)
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"spectrum match: {len(report.pairs)} levels, "
        f"max_rel_err={report.max_rel_err:.3e}, "
        f"mean_rel_err={report.mean_rel_err:.3e}, "
        f"unmatched={report.unmatched_fraction:.3f}, "
        f"tol={report.rel_tol:g} {verdict}"
    )
    ok = report.passed

    if config.study is not None:
        study = perturbation_study(
            polygon, config.study, count=config.study_count, h=config.spacing
        )
        sys.stdout.write(study_csv(study))
        bounds_ok = all(row.bounds.passed for row in study.rows)
        print(f"deformation bounds: {'PASS' if bounds_ok else 'FAIL'}")
        print(
            f"eta strictly decreasing with epsilon: "
            f"{'yes' if study.monotone else 'no'}"
        )
        ok = ok and bounds_ok and study.monotone

    return 0 if ok else 5


def cmd_rationalize(config: RunConfig) -> int:
    text = config.value.strip()
    try:
        x = Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}")
    cap = config.max_denominator if config.max_denominator is not None else 100
    best = rationalize_relations(x, cap)
    err = abs(float(x) - best.numerator / best.denominator)
    print(f"{best.numerator}/{best.denominator}")
    print(
        f"input {float(x):.15g}, error {err:.6g}, denominator cap {cap}",
        file=sys.stderr,
    )
    return 0


_DISPATCH = {
    "analyze": cmd_analyze,
    "unfold": cmd_unfold,
    "quantize": cmd_quantize,
    "swf": cmd_swf,
    "verify": cmd_verify,
    "rationalize": cmd_rationalize,
}


# --------------------------------------------------------------------------
# entry points


def _apply_thread_env() -> None:
    raw = os.environ.get("POLYBILLIARD_THREADS")
    if not raw:
        return
    try:
        threads = max(1, int(raw))
    except ValueError:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(threads))


def run(argv: list[str] | None = None) -> int:
    """Parse argv, dispatch, and map failures onto the exit-code contract."""
    _apply_thread_env()
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    config = _config_from_args(ns)
    try:
        return _DISPATCH[config.command](config)
    except NotDoublyRational as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (TooCoarse, ConvergenceFailure, MomentumMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (ValueError, OSError, BilliardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
