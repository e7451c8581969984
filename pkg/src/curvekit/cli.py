"""Command-line front end: generate data, fit curves, run experiments.

    curvekit generate --regime falling --bonds 60 --seed 7 -o day.json
    curvekit fit day.json --estimator nn
    curvekit experiment perturb day.json --bond B060 --bumps 0.03,0.05,0.10
    curvekit experiment drop day.json --counts 1,5,10 --mc 10
    curvekit experiment stability day1.json day2.json ... --estimators nn
    curvekit experiment loo day.json --mc 10
    curvekit experiment hyperscan day.json --lr 1e-7,1e-8 --epochs 200,1000

Exit codes: 0 success, 2 argument error, 3 I/O error, 4 computational failure.
Every command is deterministic given its flags; timestamps appear only in the
report provenance field.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import CurveKitError, ParseError, ValidationError
from .evaluation import (
    Estimator,
    EvaluationReport,
    TenorGrid,
    drop_bonds_experiment,
    loo_experiment,
    perturb_price_experiment,
    rmse_ytm,
    stability_experiment,
    write_report,
)
from .kernelridge import KernelParams, KrCurve, fit_kr
from .market import ScenarioSpec, generate_scenario, load_snapshot, save_snapshot, sort_bonds
from .neural import NnCurve, TrainConfig, nn_to_dict, train
from .nss import NssCurve, NssFitConfig, fit_nss, nss_objective
from .pricing import bootstrap

ESTIMATOR_NAMES = ("bootstrap", "nss", "kr", "nn")

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_IO = 3
EXIT_COMPUTE = 4


@dataclass(frozen=True)
class FitConfig:
    """One selected estimator plus its sub-configuration and grid."""

    estimator: str
    nss: NssFitConfig = field(default_factory=NssFitConfig)
    kr_lambda: float = 1e-2
    kr_kernel: KernelParams = field(default_factory=KernelParams)
    nn: TrainConfig = field(default_factory=TrainConfig)
    grid: TenorGrid = field(default_factory=TenorGrid)

    def __post_init__(self):
        if self.estimator not in ESTIMATOR_NAMES:
            raise ValidationError(f"estimator must be one of {ESTIMATOR_NAMES}, got {self.estimator!r}")
        if not (self.kr_lambda > 0):
            raise ValidationError(f"kr lambda must be > 0, got {self.kr_lambda}")


def build_estimator(config: FitConfig) -> Estimator:
    """Wrap the configured estimator as a snapshot -> curve callable."""
    name = config.estimator
    if name == "bootstrap":
        return Estimator(name, lambda snap: bootstrap(snap))
    if name == "nss":
        return Estimator(name, lambda snap: NssCurve(fit_nss(snap, config.nss)))
    if name == "kr":
        return Estimator(name, lambda snap: KrCurve(fit_kr(snap, config.kr_lambda, config.kr_kernel)))
    return Estimator(name, lambda snap: NnCurve(train(snap, config.nn)))


def _model_dict(config: FitConfig, curve, snapshot) -> dict:
    if config.estimator == "bootstrap":
        return {
            "estimator": "bootstrap",
            "knot_times": list(curve.knot_times),
            "knot_yields": list(curve.knot_yields),
            "diagnostics": list(curve.diagnostics),
        }
    if config.estimator == "nss":
        p = curve.params
        return {
            "estimator": "nss",
            "params": {
                "beta0": p.beta0, "beta1": p.beta1, "beta2": p.beta2, "beta3": p.beta3,
                "lambda1": p.lambda1, "lambda2": p.lambda2,
            },
            # curve-level fit quality; the parameters themselves may not be unique
            "objective": nss_objective(snapshot, p),
        }
    if config.estimator == "kr":
        m = curve.model
        return {
            "estimator": "kr",
            "lambda": m.lam,
            "kernel": {"a": m.kernel_params.a, "b": m.kernel_params.b},
            "anchor_times": list(m.anchor_times),
            "alphas": list(m.alphas),
            "objective": m.objective,
            "price_error": m.price_error,
        }
    return {"estimator": "nn", **nn_to_dict(curve.params, config.nn)}


# ---------------------------------------------------------------------------
# Flag parsing helpers
# ---------------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _pair(text: str) -> tuple[float, float]:
    parts = _float_list(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX, got {text!r}")
    return (parts[0], parts[1])


def _fit_config_from_args(args, estimator: str) -> FitConfig:
    return FitConfig(
        estimator=estimator,
        nss=NssFitConfig(starts=args.nss_starts, max_iter=args.nss_max_iter, seed=args.seed),
        kr_lambda=args.kr_lambda,
        kr_kernel=KernelParams(a=args.kr_a, b=args.kr_b),
        nn=TrainConfig(
            learning_rate=args.nn_lr,
            epochs=args.nn_epochs,
            gamma1=args.nn_gamma1,
            gamma2=args.nn_gamma2,
            seed=args.seed,
            init_scale=args.nn_init_scale,
            hidden_count=args.nn_hidden,
            regularizer=args.nn_regularizer,
        ),
    )


def _add_estimator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nss-starts", type=int, default=8, help="NSS simplex starts (default 8)")
    parser.add_argument("--nss-max-iter", type=int, default=4000, help="NSS iteration cap per start")
    parser.add_argument("--kr-lambda", type=float, default=1e-2, help="KR smoothness penalty (default 1e-2)")
    parser.add_argument("--kr-a", type=float, default=1.0, help="KR first-derivative weight")
    parser.add_argument("--kr-b", type=float, default=1.0, help="KR second-derivative weight")
    parser.add_argument("--nn-lr", type=float, default=1e-8, help="NN learning rate (default 1e-8)")
    parser.add_argument("--nn-epochs", type=int, default=1000, help="NN training epochs (default 1000)")
    parser.add_argument("--nn-gamma1", type=float, default=1e3, help="NN smoothness weight (default 1e3)")
    parser.add_argument("--nn-gamma2", type=float, default=1e4, help="NN trend weight (default 1e4)")
    parser.add_argument("--nn-hidden", type=int, default=3, help="NN hidden units (default 3)")
    parser.add_argument("--nn-init-scale", type=float, default=0.1, help="NN init scale")
    parser.add_argument("--nn-regularizer", choices=("per_bond", "per_epoch"), default="per_bond",
                        help="apply penalties every bond step or once per epoch")


def _provenance(args, extra: dict | None = None) -> dict:
    prov = {
        "seed": getattr(args, "seed", None),
        "argv": [a for a in (args._argv or [])],
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        prov.update(extra)
    return prov


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    try:
        spec = ScenarioSpec(
            regime=args.regime,
            n_bonds=args.bonds,
            maturity_range=args.maturity_range,
            coupon_range=args.coupon_range,
            spread_over_benchmark=args.spread,
            price_noise_sd=args.noise,
            seed=args.seed,
            base_rate=args.base_rate,
        )
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    snapshot = generate_scenario(spec, date=args.date)
    try:
        save_snapshot(snapshot, args.output, format=args.format)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    bench = snapshot.benchmark
    print(f"wrote {args.output}: {len(snapshot.bonds)} bonds, date {snapshot.date}")
    print(
        f"benchmark: {bench.rates[0]:.4%} at {bench.tenors[0]:.3f}Y "
        f"to {bench.rates[-1]:.4%} at {bench.tenors[-1]:.0f}Y ({args.regime})"
    )
    return EXIT_OK


def _load_for_command(path: str):
    try:
        return load_snapshot(path), EXIT_OK
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except (ParseError, ValidationError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO


def cmd_fit(args) -> int:
    try:
        config = _fit_config_from_args(args, args.estimator)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    snapshot, code = _load_for_command(args.snapshot)
    if snapshot is None:
        return code
    estimator = build_estimator(config)
    try:
        curve = estimator.fit(snapshot)
    except CurveKitError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    stem = Path(args.snapshot).stem
    model_path = args.output or f"{stem}.{config.estimator}.model.json"
    samples_path = args.samples or f"{stem}.{config.estimator}.samples.csv"
    grid = config.grid.tenors
    dense = np.arange(0.1, 30.0 + 1e-9, 0.1)
    tenors = sorted({round(float(t), 10) for t in list(grid) + list(dense)})
    try:
        with open(model_path, "w") as fh:
            json.dump(_model_dict(config, curve, snapshot), fh, indent=2)
            fh.write("\n")
        with open(samples_path, "w") as fh:
            fh.write("tenor,yield,benchmark_yield\n")
            for t in tenors:
                fh.write(f"{t!r},{curve.yield_at(t)!r},{snapshot.benchmark.yield_at(t)!r}\n")
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    score = rmse_ytm(curve, snapshot)
    print(f"fit {config.estimator} on {args.snapshot}: RMSE_ytm = {score:.6e}")
    print(f"wrote {model_path} and {samples_path}")
    return EXIT_OK


def _parse_estimators(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if n not in ESTIMATOR_NAMES:
            raise ValidationError(f"unknown estimator {n!r}; choose from {ESTIMATOR_NAMES}")
    if not names:
        raise ValidationError("at least one estimator required")
    return names


def _report_path(prefix: str, experiment: str, estimator: str, fmt: str) -> str:
    return f"{prefix}.{experiment}.{estimator}.{fmt}"


def _finish_reports(args, reports: list[tuple[EvaluationReport, str]], n_failed: int) -> int:
    try:
        for report, path in reports:
            write_report(report, path, format=args.format)
            print(f"wrote {path}")
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    if n_failed:
        print(f"warning: {n_failed} fit(s) failed; counts recorded in the reports", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_experiment_perturb(args) -> int:
    snapshot, code = _load_for_command(args.snapshot)
    if snapshot is None:
        return code
    try:
        names = _parse_estimators(args.estimators)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    bond_id = args.bond or sort_bonds(snapshot.bonds)[-1].id
    reports = []
    n_failed = 0
    for name in names:
        estimator = build_estimator(_fit_config_from_args(args, name))
        try:
            rows = perturb_price_experiment(snapshot, estimator, bond_id, args.bumps)
        except KeyError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ARGS
        except CurveKitError as exc:
            print(f"error: base fit failed for {name}: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        metrics = {}
        for row in rows:
            tag = f"bump={row.bump:g}"
            metrics[f"rmse_curve[{tag}]"] = row.rmse_curve
            metrics[f"mad[{tag}]"] = row.mad
            if row.error:
                n_failed += 1
        report = EvaluationReport(
            estimator=name,
            experiment="perturb",
            metrics=metrics,
            provenance=_provenance(args, {"bond": bond_id, "bumps": list(args.bumps)}),
            details=[row.__dict__ for row in rows],
        )
        reports.append((report, _report_path(args.output, "perturb", name, args.format)))
        shown = ", ".join(
            f"bump {row.bump:g}: rmse {row.rmse_curve * 1e4:.2f} bp / mad {row.mad * 1e4:.2f} bp"
            for row in rows if row.error is None
        )
        print(f"perturb {name} (bond {bond_id}): {shown}")
    return _finish_reports(args, reports, n_failed)


def cmd_experiment_drop(args) -> int:
    snapshot, code = _load_for_command(args.snapshot)
    if snapshot is None:
        return code
    try:
        names = _parse_estimators(args.estimators)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    reports = []
    n_failed = 0
    for name in names:
        estimator = build_estimator(_fit_config_from_args(args, name))
        try:
            rows = drop_bonds_experiment(snapshot, estimator, args.counts, args.mc, seed=args.seed)
        except ValidationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ARGS
        except CurveKitError as exc:
            print(f"error: base fit failed for {name}: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        metrics = {}
        for row in rows:
            tag = f"drop={row.count}"
            metrics[f"rmse_curve[{tag}]"] = row.rmse_curve
            metrics[f"mad[{tag}]"] = row.mad
            n_failed += row.n_failed
        report = EvaluationReport(
            estimator=name,
            experiment="drop",
            metrics=metrics,
            provenance=_provenance(args, {"counts": list(args.counts), "mc": args.mc}),
            details=[
                {
                    "count": row.count,
                    "n_failed": row.n_failed,
                    "replications": [rep.__dict__ for rep in row.replications],
                }
                for row in rows
            ],
        )
        reports.append((report, _report_path(args.output, "drop", name, args.format)))
        shown = ", ".join(
            f"drop {row.count}: rmse {row.rmse_curve * 1e4:.2f} bp / mad {row.mad * 1e4:.2f} bp"
            for row in rows if row.rmse_curve is not None
        )
        print(f"drop {name} ({args.mc} MC): {shown}")
    return _finish_reports(args, reports, n_failed)


def cmd_experiment_stability(args) -> int:
    snapshots = []
    for path in args.snapshots:
        snap, code = _load_for_command(path)
        if snap is None:
            return code
        snapshots.append(snap)
    try:
        names = _parse_estimators(args.estimators)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    reports = []
    n_failed = 0
    for name in names:
        estimator = build_estimator(_fit_config_from_args(args, name))
        try:
            result = stability_experiment(snapshots, estimator, threshold=args.threshold)
        except ValidationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ARGS
        n_failed += len(result.skipped)
        per_bucket = {
            bucket: {
                "hit_rate": result.hit_rate[bucket],
                "rmse_mean": (
                    float(np.mean([d[bucket] for d in result.day_rmse if d[bucket] is not None]))
                    if any(d[bucket] is not None for d in result.day_rmse) else None
                ),
            }
            for bucket in result.hit_rate
        }
        report = EvaluationReport(
            estimator=name,
            experiment="stability",
            metrics={"hit_rate": result.hit_rate["Full"]},
            per_bucket=per_bucket,
            provenance=_provenance(args, {"threshold": args.threshold, "days": len(snapshots)}),
            details=[
                {"day_rmse": list(result.day_rmse)},
                {"fixed_tenor_series": list(result.fixed_tenor_series)},
                {"skipped": list(result.skipped)},
            ],
        )
        reports.append((report, _report_path(args.output, "stability", name, args.format)))
        rates = ", ".join(
            f"{bucket}: {result.hit_rate[bucket]:.0%}" for bucket in result.hit_rate
            if result.hit_rate[bucket] is not None
        )
        print(f"stability {name} over {len(snapshots)} days, hit rate @ {args.threshold * 1e4:.0f} bp: {rates}")
    return _finish_reports(args, reports, n_failed)


def cmd_experiment_loo(args) -> int:
    snapshot, code = _load_for_command(args.snapshot)
    if snapshot is None:
        return code
    try:
        names = _parse_estimators(args.estimators)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    reports = []
    n_failed = 0
    for name in names:
        estimator = build_estimator(_fit_config_from_args(args, name))
        try:
            result = loo_experiment(snapshot, estimator, args.mc, bucket_filter=args.bucket, seed=args.seed)
        except ValidationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ARGS
        n_failed += result.n_failed
        report = EvaluationReport(
            estimator=name,
            experiment="loo",
            metrics={"rmse_ytm_loo": result.per_bucket["Full"]},
            per_bucket={
                bucket: {"rmse_ytm_loo": result.per_bucket[bucket], "count": result.counts[bucket]}
                for bucket in result.per_bucket
            },
            provenance=_provenance(args, {"mc": args.mc, "bucket_filter": args.bucket}),
            details=[rep.__dict__ for rep in result.replications],
        )
        reports.append((report, _report_path(args.output, "loo", name, args.format)))
        cells = ", ".join(
            f"{bucket}: {result.per_bucket[bucket]:.6f}" if result.per_bucket[bucket] is not None
            else f"{bucket}: n/a"
            for bucket in result.per_bucket
        )
        print(f"loo {name} ({args.mc} MC): {cells}")
    return _finish_reports(args, reports, n_failed)


def cmd_experiment_hyperscan(args) -> int:
    snapshot, code = _load_for_command(args.snapshot)
    if snapshot is None:
        return code
    rows = []
    n_failed = 0
    for g1 in args.gamma1:
        for g2 in args.gamma2:
            for epochs in args.epochs:
                for lr in args.lr:
                    config = TrainConfig(
                        learning_rate=lr, epochs=epochs, gamma1=g1, gamma2=g2,
                        seed=args.seed, hidden_count=args.nn_hidden,
                        init_scale=args.nn_init_scale, regularizer=args.nn_regularizer,
                    )
                    try:
                        params = train(snapshot, config)
                        score = rmse_ytm(NnCurve(params), snapshot)
                        err = None
                    except CurveKitError as exc:
                        score, err = None, str(exc)
                        n_failed += 1
                    rows.append(
                        {"lr": lr, "epochs": epochs, "gamma1": g1, "gamma2": g2,
                         "rmse_ytm": score, "error": err}
                    )
    metrics = {
        f"rmse_ytm[lr={r['lr']:g},epochs={r['epochs']},g1={r['gamma1']:g},g2={r['gamma2']:g}]": r["rmse_ytm"]
        for r in rows
    }
    report = EvaluationReport(
        estimator="nn",
        experiment="hyperscan",
        metrics=metrics,
        provenance=_provenance(args, {
            "lr": list(args.lr), "epochs": list(args.epochs),
            "gamma1": list(args.gamma1), "gamma2": list(args.gamma2),
        }),
        details=rows,
    )
    path = _report_path(args.output, "hyperscan", "nn", args.format)

    # Pivot per (gamma1, gamma2): epochs down, learning rates across.
    for g1 in args.gamma1:
        for g2 in args.gamma2:
            print(f"RMSE_ytm grid (gamma1={g1:g}, gamma2={g2:g}):")
            header = "  epochs \\ lr " + "".join(f"{lr:>12g}" for lr in args.lr)
            print(header)
            for epochs in args.epochs:
                cells = []
                for lr in args.lr:
                    match = next(
                        r for r in rows
                        if r["lr"] == lr and r["epochs"] == epochs
                        and r["gamma1"] == g1 and r["gamma2"] == g2
                    )
                    cells.append(f"{match['rmse_ytm']:>12.6f}" if match["rmse_ytm"] is not None else f"{'fail':>12}")
                print(f"  {epochs:>11} " + "".join(cells))
    return _finish_reports(args, [(report, path)], n_failed)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic market snapshot")
    gen.add_argument("--regime", choices=("flat", "rising", "falling"), required=True)
    gen.add_argument("--bonds", type=int, default=60)
    gen.add_argument("--maturity-range", type=_pair, default=(0.1, 15.0), metavar="MIN,MAX")
    gen.add_argument("--coupon-range", type=_pair, default=(0.01, 0.05), metavar="MIN,MAX")
    gen.add_argument("--spread", type=float, default=0.004, help="bond spread over benchmark")
    gen.add_argument("--noise", type=float, default=0.0, help="multiplicative price noise sd")
    gen.add_argument("--base-rate", type=float, default=0.03)
    gen.add_argument("--date", default=None, help="snapshot date label")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--format", choices=("json", "csv"), default="json")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_generate)

    fit = sub.add_parser("fit", help="fit one estimator and write model + curve samples")
    fit.add_argument("snapshot")
    fit.add_argument("--estimator", choices=ESTIMATOR_NAMES, required=True)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("-o", "--output", default=None, help="model JSON path")
    fit.add_argument("--samples", default=None, help="curve sample CSV path")
    _add_estimator_flags(fit)
    fit.set_defaults(func=cmd_fit)

    exp = sub.add_parser("experiment", help="run an evaluation protocol")
    exp_sub = exp.add_subparsers(dest="experiment", required=True)

    def common(p, with_estimators=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("-o", "--output", default="report", help="report path prefix")
        if with_estimators:
            p.add_argument("--estimators", default="bootstrap,nss,kr,nn")
        _add_estimator_flags(p)

    pert = exp_sub.add_parser("perturb", help="bump one bond's price and refit")
    pert.add_argument("snapshot")
    pert.add_argument("--bond", default=None, help="bond id (default: longest maturity)")
    pert.add_argument("--bumps", type=_float_list, default=[0.03, 0.05, 0.10])
    common(pert)
    pert.set_defaults(func=cmd_experiment_perturb)

    drop = exp_sub.add_parser("drop", help="randomly drop bonds, Monte Carlo averaged")
    drop.add_argument("snapshot")
    drop.add_argument("--counts", type=_int_list, default=[1, 5, 10])
    drop.add_argument("--mc", type=int, default=10)
    common(drop)
    drop.set_defaults(func=cmd_experiment_drop)

    stab = exp_sub.add_parser("stability", help="day-over-day curve stability")
    stab.add_argument("snapshots", nargs="+", help="date-ordered snapshot files")
    stab.add_argument("--threshold", type=float, default=0.0010, help="hit-rate threshold (decimal)")
    common(stab)
    stab.set_defaults(func=cmd_experiment_stability)

    loo = exp_sub.add_parser("loo", help="leave-one-out yield accuracy by bucket")
    loo.add_argument("snapshot")
    loo.add_argument("--mc", type=int, default=10)
    loo.add_argument("--bucket", choices=("<2Y", "2Y-10Y", ">10Y"), default=None)
    common(loo)
    loo.set_defaults(func=cmd_experiment_loo)

    scan = exp_sub.add_parser("hyperscan", help="sweep NN hyperparameters, tabulate RMSE_ytm")
    scan.add_argument("snapshot")
    scan.add_argument("--lr", type=_float_list, default=[1e-7, 1e-8, 1e-9])
    scan.add_argument("--epochs", type=_int_list, default=[200, 500, 1000])
    scan.add_argument("--gamma1", type=_float_list, default=[1e3])
    scan.add_argument("--gamma2", type=_float_list, default=[1e4])
    common(scan, with_estimators=False)
    scan.set_defaults(func=cmd_experiment_hyperscan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGS if exc.code not in (0, None) else EXIT_OK
    args._argv = list(argv) if argv is not None else list(sys.argv[1:])
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CurveKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
