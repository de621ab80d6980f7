"""``lorentz-mterm`` command line.

Exit codes: 0 success or pass, 1 slope outside the acceptance band, 2 usage or
configuration error.  Output files go to ``--out-dir``, else
``$LORENTZ_MTERM_OUT``, else the config's ``out_dir``, else the working
directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config, parse_real, preset_names
from .formats import FormatError, read_input, write_spectrum_csv, write_table_csv
from .lorentz_norms import LorentzExponents, mixed_lebesgue, mixed_lorentz
from .classes import BesovParams, block_norm_profile
from .mterm import (
    Regime,
    SchemeKind,
    SchemeSpec,
    Unsupported,
    approximation_error,
    budget_plan,
    build_approximant,
    regime_of,
    truncation_level,
)
from .spectral import GridFunction, analyze, grid_sizes_for, synthesize
from .testfns import (
    SeededSampler,
    dirichlet_cubic,
    dirichlet_extremal,
    f3,
    g1,
    lacunary_random,
    rudin_shapiro_product,
)
from . import verify

ENV_OUT = "LORENTZ_MTERM_OUT"
TOOL = "lorentz-mterm"


class UsageError(Exception):
    pass


def _out_dir(args, cfg_raw: dict | None = None) -> Path:
    if getattr(args, "out_dir", None):
        path = Path(args.out_dir)
    elif os.environ.get(ENV_OUT):
        path = Path(os.environ[ENV_OUT])
    elif cfg_raw and cfg_raw.get("out_dir"):
        path = Path(cfg_raw["out_dir"])
    else:
        path = Path(".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _dump_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _envelope(command: str, **body) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command, **body}


def _floats(text: str) -> list[float]:
    try:
        return [parse_real(v) for v in text.split(",")]
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------------ norm


def cmd_norm(args) -> int:
    try:
        obj = read_input(args.input)
    except (OSError, FormatError, ValueError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    if isinstance(obj, GridFunction):
        grid, source = obj, "grid"
    else:
        grid = synthesize(obj, grid_sizes_for(obj.max_freq, args.oversample))
        source = "spectrum"
    m = grid.dims
    p = _floats(args.p)
    theta = _floats(args.theta) if args.theta else p
    p = p * m if len(p) == 1 else p
    theta = theta * m if len(theta) == 1 else theta
    try:
        e = LorentzExponents(tuple(p), tuple(theta))
        value = mixed_lorentz(grid, e)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = _envelope(
        "norm",
        input=str(args.input),
        input_kind=source,
        p=list(e.p),
        theta=list(e.theta),
        grid={"sizes": list(grid.sizes), "oversample": args.oversample if source == "spectrum" else None},
        value=value,
    )
    if e.is_lebesgue():
        payload["lebesgue_quadrature"] = mixed_lebesgue(grid, e.p)
    print(repr(value))
    _dump_json(_out_dir(args) / "norm.json", payload)
    return 0


# ------------------------------------------------------------------ experiment config


def _experiment(args) -> ExperimentConfig:
    try:
        raw = load_config(args.config, args.preset)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    raw.setdefault("class", {})
    raw.setdefault("target", {})
    if args.r is not None:
        raw["class"]["r"] = args.r
    if args.tau is not None:
        raw["class"]["tau"] = args.tau
    if args.p is not None:
        raw["class"]["p"] = _floats(args.p)
        raw["class"].pop("theta", None)
    if args.q is not None:
        raw["target"]["q"] = _floats(args.q)
        raw["target"].pop("theta", None)
    if args.scheme is not None:
        raw["scheme"] = args.scheme
    if args.family is not None:
        raw["family"] = {**(raw.get("family") or {}), "name": args.family}
    for key in ("seed", "oversample", "band"):
        if getattr(args, key, None) is not None:
            raw[key] = getattr(args, key)
    if getattr(args, "M", None) is not None:
        raw["M"] = args.M
    if getattr(args, "log2_M", None) is not None:
        raw["log2_M"] = list(args.log2_M)
        raw.pop("Ms", None)
    try:
        return ExperimentConfig.from_mapping(raw)
    except Unsupported as exc:
        raise UsageError(f"unsupported parameters: {exc}") from None
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _family(cfg: ExperimentConfig):
    fam = cfg.family
    return verify.make_family(
        fam["name"], cfg.source, cfg.target,
        seed=cfg.seed, L=int(fam.get("L", 12)), shape=fam.get("shape", "peaked"),
        oversample=max(4.0, cfg.oversample),
    )


# ------------------------------------------------------------------ approx


def cmd_approx(args) -> int:
    cfg = _experiment(args)
    M = cfg.M if cfg.M is not None else (cfg.Ms[0] if cfg.Ms else None)
    if M is None:
        raise UsageError("approx needs M (config key M or --M)")
    if args.input:
        try:
            S = read_input(args.input)
        except (OSError, FormatError, ValueError) as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from None
        if isinstance(S, GridFunction):
            S = analyze(S)
        if S.dims != cfg.dims:
            raise UsageError(f"input has dimension {S.dims}, config {cfg.dims}")
    else:
        S = _family(cfg)(M)
    try:
        A = build_approximant(S, SchemeSpec(cfg.scheme, cfg.source, cfg.target, M))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    err = approximation_error(S, A, cfg.target, cfg.oversample)
    cert = verify.dual_certificate(S, A.support, cfg.target.dual(), cfg.oversample)
    R = S.without(A.support)
    grid = list(grid_sizes_for(R.max_freq, cfg.oversample)) if len(R) else []
    out = _out_dir(args, cfg.raw)
    meta = {"tool": TOOL, "version": __version__, "seed": cfg.seed, "M": M}
    write_spectrum_csv(out / "approximant.csv", A.coefficients, meta)
    _dump_json(out / "plan.json", _envelope("approx", config=cfg.resolved(), plan=A.plan_json()))
    _dump_json(
        out / "report.json",
        _envelope(
            "approx", config=cfg.resolved(), input=str(args.input) if args.input else None,
            M=M, support_size=int(len(A.support)), input_size=len(S), error=err,
            certificate=cert, grid={"sizes": grid, "oversample": cfg.oversample},
        ),
    )
    print(f"error {err!r}")
    return 0


# ------------------------------------------------------------------ rates


def _dry_run(cfg: ExperimentConfig) -> int:
    print(f"scheme {cfg.scheme.value}")
    # only regime-2 budgets read the input's block norms
    needs_profile = cfg.scheme is SchemeKind.BLOCK_BUDGET and regime_of(
        cfg.source.base.p, cfg.target.p, cfg.source.r
    ) is Regime.REGIME_2
    family = _family(cfg) if needs_profile else None
    for M in cfg.Ms:
        if cfg.scheme is SchemeKind.TRUNCATION:
            print(f"M={M} truncation n={truncation_level(M, cfg.dims)}")
        elif cfg.scheme is SchemeKind.GREEDY:
            print(f"M={M} greedy")
        else:
            profile = None
            if family is not None:
                profile = block_norm_profile(family(M), cfg.source.base, max(4.0, cfg.oversample))
            try:
                plan = budget_plan(M, cfg.source, cfg.target, profile)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            budgets = " ".join(f"N_{s}={v}" for s, v in sorted(plan.budgets.items()))
            print(f"M={M} n={plan.n} alpha={plan.alpha!r} {budgets}".rstrip())
    return 0


def cmd_rates(args) -> int:
    cfg = _experiment(args)
    if len(cfg.Ms) < 4:
        raise UsageError("rates needs at least four values of M (log2_M or Ms)")
    if args.dry_run:
        return _dry_run(cfg)
    threads = args.threads or os.cpu_count() or 1
    try:
        res = verify.rate_experiment(
            _family(cfg), cfg.scheme, cfg.source, cfg.target, cfg.Ms,
            oversample=cfg.oversample, certificates=cfg.certificates, threads=threads,
        )
    except verify.DegenerateFit as exc:
        print(f"degenerate fit: {exc}", file=sys.stderr)
        return 1
    expected = res.predicted_slope if args.expect_slope is None else args.expect_slope
    if args.expect_slope is None:
        passed = res.within_band(cfg.band, cfg.compensated_band)
    else:
        passed = abs(res.slope - expected) <= cfg.band * abs(expected)

    out = _out_dir(args, cfg.raw)
    stem = args.name
    payload = _envelope(
        "rates", config=cfg.resolved(), seed=cfg.seed, result=res.to_json(),
        expected_slope=expected, passed=passed,
    )
    _dump_json(out / f"{stem}.json", payload)
    header = {"tool": TOOL, "version": __version__, "seed": cfg.seed,
              "oversample": cfg.oversample, "regime": res.regime}
    write_table_csv(
        out / f"{stem}.csv",
        ["M", "error", "support", "certificate", "grid"],
        [[pt.M, pt.error, pt.support, pt.certificate, "x".join(map(str, pt.grid))] for pt in res.points],
        header,
    )
    if args.plot_data:
        lines = [f"# {k}: {v}" for k, v in header.items()] + ["# M error"]
        lines += [f"{pt.M} {pt.error!r}" for pt in res.points]
        (out / f"{stem}.dat").write_text("\n".join(lines) + "\n")
    from .plotting import rate_figure

    rate_figure(res, out / f"{stem}.png", title=f"{res.regime}, {cfg.scheme.value}")

    print(f"regime {res.regime}")
    print(f"slope {res.slope:.6f} predicted {expected:.6f} r2 {res.r_squared:.6f}")
    if res.compensated_slope is not None:
        print(f"compensated slope {res.compensated_slope:.6f}")
    print("PASS" if passed else "FAIL")
    return 0 if passed else 1


# ------------------------------------------------------------------ check


def cmd_check(args) -> int:
    kwargs = {"trials": args.trials} if args.trials else {}
    report = verify.SUITES[args.suite](args.seed, **kwargs)
    out = _out_dir(args)
    _dump_json(out / f"check-{args.suite}.json", _envelope("check", **report))
    summary = report.get("report") or next(iter(report["reports"].values()))
    print(f"{args.suite} trials {summary['trials']} max_ratio {summary['max_ratio']!r}")
    return 0


# ------------------------------------------------------------------ testfn


def cmd_testfn(args) -> int:
    m = args.m
    name = args.name

    def params() -> BesovParams:
        p = args.p if args.p is not None else 1.5
        return BesovParams(LorentzExponents.uniform(p, p, m), args.r, parse_real(args.tau))

    try:
        if name == "dirichlet":
            S = dirichlet_cubic(args.n, m)
        elif name == "g1":
            S = g1(args.n, m)
        elif name == "f3":
            S = f3(args.n, m, args.p if args.p is not None else 1.5, args.r)
        elif name == "rudin-shapiro":
            S = rudin_shapiro_product(args.n, m, args.r)
        elif name == "lacunary":
            S = lacunary_random(params(), args.L, SeededSampler(args.seed), shape=args.shape)
        else:
            if args.M is None or args.q is None:
                raise UsageError("dirichlet-extremal needs --M and --q")
            S = dirichlet_extremal(args.M, params(), LorentzExponents.uniform(args.q, args.q, m))
    except (ValueError, Unsupported) as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out) if args.out else _out_dir(args) / f"testfn-{name}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    header = {"tool": TOOL, "version": __version__, "generator": name, "m": m, "n": args.n,
              "r": args.r, "p": args.p, "tau": args.tau, "L": args.L, "shape": args.shape,
              "M": args.M, "q": args.q, "seed": args.seed}
    write_spectrum_csv(out, S, header)
    print(f"{name}: {len(S)} coefficients -> {out}")
    return 0


# ------------------------------------------------------------------ parser


def _experiment_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="YAML experiment config")
    src.add_argument("--preset", choices=preset_names(), help="built-in config")
    p.add_argument("--p", help="source exponents, comma separated (theta follows p)")
    p.add_argument("--q", help="target exponents, comma separated (theta follows q)")
    p.add_argument("--r", type=float)
    p.add_argument("--tau")
    p.add_argument("--scheme", choices=[k.value for k in SchemeKind])
    p.add_argument("--family", choices=["lacunary", "dirichlet", "rudin-shapiro", "f3"])
    p.add_argument("--seed", type=int)
    p.add_argument("--oversample", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Mixed Lorentz norms and M-term approximation rates.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help=f"output directory (overrides ${ENV_OUT})")
    common.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="mixed Lorentz norm of a grid or spectrum file")
    p.add_argument("input")
    p.add_argument("--p", required=True)
    p.add_argument("--theta")
    p.add_argument("--oversample", type=float, default=8.0)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("approx", parents=[common], help="build one approximant")
    _experiment_flags(p)
    p.add_argument("--M", type=int)
    p.add_argument("--input", help="spectrum or grid file instead of the configured family")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("rates", parents=[common], help="rate sweep with a log-log fit")
    _experiment_flags(p)
    p.add_argument("--log2-M", dest="log2_M", type=int, nargs=2, metavar=("MIN", "MAX"))
    p.add_argument("--band", type=float, help="relative slope tolerance")
    p.add_argument("--expect-slope", type=float, help="check against this slope instead of the prediction")
    p.add_argument("--dry-run", action="store_true", help="print the plans only")
    p.add_argument("--plot-data", action="store_true", help="also write two-column M/error data")
    p.add_argument("--name", default="rates", help="output file stem")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("check", parents=[common], help="inequality checker suites")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("testfn", parents=[common], help="write a test function as spectrum CSV")
    p.add_argument("name", choices=["dirichlet", "g1", "f3", "rudin-shapiro", "lacunary", "dirichlet-extremal"])
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--tau", default="inf")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--shape", choices=["peaked", "flat"], default="peaked")
    p.add_argument("--M", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_testfn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
