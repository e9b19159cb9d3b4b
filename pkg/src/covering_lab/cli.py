"""Command-line harness: ``covering-lab <command> [options]``.

Exit status is 0 when every requested verification passes, 1 when an
inequality fails, and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .builders import build_space, parse_space_spec
from .constants import ConstantsReport, ExtendedConstant, constants_report
from .covering import (BallFamily, FamilyError, bounded_outcome, full_select, make_lacunary,
                       report_for, sparse_select, verify_covering_bounds)
from .io import SpaceFileError, read_space, write_kv, write_space, write_tsv
from .maximal import empirical_weak_norm, theoretical_bounds, weak_type_profile
from .space import MetricError, Space, exact_number
from .sweep import DEFAULT_BUDGET, HEADER, sweep

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def load_space(source: str) -> Space:
    path = Path(source)
    if source.startswith("file:"):
        path = Path(source[5:])
    elif not (path.suffix == ".json" or path.exists()):
        try:
            return build_space(parse_space_spec(source))
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad space spec {source!r}: {exc}") from None
    return read_space(path)


def parse_window(text: str | None):
    if not text:
        return None
    lo, sep, hi = text.partition(":")
    if not sep:
        raise InputError(f"window must be lo:hi, got {text!r}")
    return (exact_number(lo or 0), None if hi in ("", "inf") else exact_number(hi))


def parse_center(space: Space, token: str) -> int:
    token = token.strip()
    if token.startswith("#"):
        return int(token[1:])
    coords = [exact_number(c) for c in token.split(";")]
    try:
        return space.index_of(tuple(coords))
    except KeyError:
        raise InputError(f"no point with coordinates {token!r}") from None


def parse_balls(space: Space, text: str) -> list[tuple[int, Fraction]]:
    """``c:r,c:r,...`` with centres as coordinates (``;``-separated) or ``#index``."""
    balls = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        center, sep, radius = item.rpartition(":")
        if not sep:
            raise InputError(f"ball must be centre:radius, got {item!r}")
        balls.append((parse_center(space, center), exact_number(radius)))
    return balls


def _family(space: Space, args) -> BallFamily:
    balls = parse_balls(space, args.balls)
    t = exact_number(args.t)
    if args.mode == "sparse":
        if args.T is None:
            raise InputError("sparse mode needs --T")
        T = exact_number(args.T)
        radii = sorted({s for _, s in balls})
        rset = make_lacunary(radii[0], T, radii[0], radii[-1]) if radii else None
        missing = [s for s in radii if rset is not None and s not in rset]
        if missing:
            raise InputError(f"radii {missing} do not lie on a {T}-lacunary sequence from {radii[0]}")
        return BallFamily(tuple(balls), t, "sparse", radii_set=rset)
    if args.mode == "bounded":
        if args.T is None or args.r is None:
            raise InputError("bounded mode needs --r and --T")
        return BallFamily(tuple(balls), t, "bounded", r=args.r, T=args.T)
    return BallFamily(tuple(balls), t, "combined")


def _outcome(space, family):
    if family.mode == "sparse":
        return sparse_select(space, family)
    if family.mode == "bounded":
        return bounded_outcome(space, family)
    return full_select(space, family)


def _emit(args, name: str, text: str) -> None:
    sys.stdout.write(text)
    if getattr(args, "out_dir", None):
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def cmd_build(args) -> int:
    space = load_space(args.space)
    if args.out:
        write_space(space, args.out)
    info = {"points": space.n, "exact": int(space.exact), "total_measure": space.total_measure(),
            "distinct_distances": len(space.levels) - 1 if space.levels else 0}
    _emit(args, "report.kv", write_kv(info))
    return EXIT_OK


def cmd_constants(args) -> int:
    space = load_space(args.space)
    report = constants_report(space, args.t, args.T, parse_window(args.window))
    pairs = report.as_dict()
    pairs.update({f"bound_{k}": v for k, v in theoretical_bounds(report, args.d).as_dict().items()})
    _emit(args, "report.kv", write_kv(pairs))
    return EXIT_OK


def _outcome_pairs(space, family, outcome) -> dict:
    pairs = {
        "mode": family.mode,
        "t": family.t,
        "accepted": " ".join(map(str, outcome.accepted)),
        "mu_U": space.measure_of_scaled(space.scaled_measure(outcome.u_set.mask)),
        "mu_V": space.measure_of_scaled(space.scaled_measure(outcome.v_set.mask)),
        "max_density": outcome.max_density(),
        "density": " ".join(map(str, outcome.density)),
    }
    for j, (i, d) in enumerate(zip(outcome.accepted, outcome.disjointifications)):
        pairs[f"D_{i}"] = " ".join(map(str, d.indices()))
    return pairs


def _verify_pairs(ver) -> tuple[dict, bool]:
    pairs = {}
    for c in ver.checks:
        pairs[f"check_{c.name}"] = c.line()
    pairs["verdict"] = "pass" if ver.passed else "fail"
    return pairs, ver.passed


def cmd_select(args) -> int:
    space = load_space(args.space)
    family = _family(space, args)
    outcome = _outcome(space, family)
    pairs = _outcome_pairs(space, family, outcome)
    ok = True
    if args.verify:
        report = report_for(space, family)
        ver = verify_covering_bounds(space, outcome, report, family.mode)
        more, ok = _verify_pairs(ver)
        pairs.update(more)
    _emit(args, "report.kv", write_kv(pairs))
    return EXIT_OK if ok else EXIT_FAIL


_DECLARABLE = ("c_mu", "k_micro", "k_strong", "k_blossom", "k_blossom_bounded", "k2")


def _declared(report: ConstantsReport, declarations) -> tuple[ConstantsReport, list[str]]:
    """Replace computed constants by declared ones; flag declarations below the truth."""
    fields = dict(report.__dict__)
    problems = []
    for item in declarations or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _DECLARABLE:
            raise InputError(f"--declare expects one of {_DECLARABLE} as key=value, got {item!r}")
        v = float("inf") if value.strip() == "inf" else exact_number(value)
        computed = fields[key]
        if computed.finite and v < computed.value or (not computed.finite and v != float("inf")):
            problems.append(f"declared {key}={v} is below the computed {computed}")
        fields[key] = ExtendedConstant(v, None)
    return ConstantsReport(**fields), problems


def cmd_verify(args) -> int:
    space = load_space(args.space)
    family = _family(space, args)
    outcome = _outcome(space, family)
    report, problems = _declared(report_for(space, family), args.declare)
    ver = verify_covering_bounds(space, outcome, report, family.mode)
    pairs, ok = _verify_pairs(ver)
    for i, p in enumerate(problems):
        pairs[f"declaration_{i}"] = p
    for c in ver.failures():
        pairs[f"failed_{c.name}"] = f"lhs={c.lhs} rhs={c.rhs}"
    if problems:
        ok = False
        pairs["verdict"] = "fail"
    _emit(args, "report.kv", write_kv(pairs))
    for p in problems:
        print(f"inequality declared >= computed failed: {p}", file=sys.stderr)
    for c in ver.failures():
        print(f"inequality {c.name} failed: {c.lhs} > {c.rhs}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_maximal(args) -> int:
    space = load_space(args.space)
    radii = [exact_number(r) for r in args.radii.split(",")] if args.radii else None
    if args.f:
        f = [exact_number(v) for v in args.f.split(",")]
        prof = weak_type_profile(space, f, radii)
    else:
        _, f = empirical_weak_norm(space, args.probe, radii, count=args.count, seed=args.seed)
        prof = weak_type_profile(space, f, radii)
    pairs = {"supremum": prof.supremum, "argmax_level": prof.argmax, "l1_norm": prof.norm,
             "witness_f": " ".join(map(str, f))}
    _emit(args, "report.kv", write_kv(pairs))
    if args.out_dir:
        write_tsv(("level", "measure", "ratio"), prof.levels, Path(args.out_dir) / "levels.tsv")
    return EXIT_OK


def cmd_sweep(args) -> int:
    dims = [int(d) for d in args.dims.split(",") if d.strip()] if args.dims else []
    res = sweep(dims, args.hw, seed=args.seed, families=args.families,
                family_size=args.family_size, budget=args.budget)
    text = write_tsv(HEADER, [r.cells() for r in res.rows])
    _emit(args, "sweep.tsv", text)
    return EXIT_OK if res.consistent else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="covering-lab",
                                description="Covering constants and ball selection on finite spaces.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, space=True):
        if space:
            sp.add_argument("--space", required=True,
                            help="builtin spec (grid:d=2,hw=3 | three-point-delta | lshape:pitch=1/12 "
                                 "| ngon:n=8) or a space file")
        sp.add_argument("--out-dir", help="also write report files here")

    sp = sub.add_parser("build", help="build or read a space and summarize it")
    common(sp)
    sp.add_argument("--out", help="write the space file here")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("constants", help="regularity constants and bound formulas")
    common(sp)
    sp.add_argument("--t", required=True)
    sp.add_argument("--T")
    sp.add_argument("--window", help="lo:hi radius window (r in (lo, hi])")
    sp.add_argument("--d", type=int, help="dimension for the Lebesgue reference bound")
    sp.set_defaults(func=cmd_constants)

    for name, func, helptext in (("select", cmd_select, "run the selection algorithm"),
                                 ("verify", cmd_verify, "verify covering bounds, optionally "
                                                        "with declared constants")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--mode", choices=("sparse", "bounded", "combined"), default="combined")
        sp.add_argument("--t", required=True)
        sp.add_argument("--T")
        sp.add_argument("--r", help="lower radius (bounded mode)")
        sp.add_argument("--balls", required=True,
                        help="centre:radius list; centres as coordinates (';' between components) "
                             "or #index")
        if name == "select":
            sp.add_argument("--verify", action="store_true")
        else:
            sp.add_argument("--declare", action="append", metavar="KEY=VALUE")
        sp.set_defaults(func=func)

    sp = sub.add_parser("maximal", help="maximal function and weak-type profile")
    common(sp)
    sp.add_argument("--f", help="comma-separated function values (default: probe search)")
    sp.add_argument("--probe", choices=("delta_scan", "random"), default="delta_scan")
    sp.add_argument("--radii", help="comma-separated radii for the restricted operator")
    sp.add_argument("--count", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_maximal)

    sp = sub.add_parser("sweep", help="dimension sweep on lattice grids")
    common(sp, space=False)
    sp.add_argument("--dims", default="1,2,3")
    sp.add_argument("--hw", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--families", type=int, default=20)
    sp.add_argument("--family-size", type=int, default=12)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_sweep)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SpaceFileError, MetricError, FamilyError, ValueError, KeyError,
            ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
