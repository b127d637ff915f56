"""Command-line interface: synthesize data, fit, compare methods and run the
consistency experiments, with machine-readable JSON/CSV outputs.

Exit codes: 0 success, 2 bad arguments or invalid config, 3 malformed input
CSV, 4 infeasible fit (n < k or q >= min(p, n)), 5 failed identification
condition.  Data CSVs are headerless and comma-separated; labels in all
outputs are 1-based.  Every command is deterministic given ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .consistency import (ConsistencyConfig, IdentificationConditionError,
                          SllnCheckConfig, run_consistency, run_slln_check)
from .fkm import FkmConfig, fkm_fit
from .kmeans import KMeansConfig, _kmeans_best
from .metrics import adjusted_rand_index
from .model import DataMatrix, LossSpec, Membership
from .rkm import RkmConfig, rkm_fit
from .rng import derive_seed
from .synthdata import (DEFAULT_NOISE_SD, DiscretePopulation, MixturePopulation,
                        generate_paper_scenario, paper_scenario_population)
from .tandem import tandem_fit

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_BAD_CSV = 3
EXIT_INFEASIBLE = 4
EXIT_IDENTIFICATION = 5

_METHOD_STREAMS = {"fkm": 0, "rkm": 1, "tandem": 2, "kmeans": 3}


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: int, message: str) -> _CliError:
    return _CliError(code, message)


def _load_csv(path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except FileNotFoundError:
        raise _fail(EXIT_BAD_ARGS, f"input file not found: {path}")
    except (ValueError, OSError) as exc:
        raise _fail(EXIT_BAD_CSV, f"malformed CSV {path}: {exc}")
    if data.size == 0:
        raise _fail(EXIT_BAD_CSV, f"malformed CSV {path}: no data")
    if not np.all(np.isfinite(data)):
        raise _fail(EXIT_BAD_CSV, f"malformed CSV {path}: non-finite entries")
    return data


def _write_json(path: str, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv_rows(path: str, header: list[str], rows: list[list]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _check_feasible(n: int, p: int, k: int, q: int) -> None:
    if n < k:
        raise _fail(EXIT_INFEASIBLE, f"infeasible fit: n={n} < k={k}")
    if q >= p:
        raise _fail(EXIT_INFEASIBLE, f"infeasible fit: q={q} >= p={p}")
    if q >= n:
        raise _fail(EXIT_INFEASIBLE, f"infeasible fit: q={q} >= n={n}")


def _matrix_list(arr: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in arr]


def _run_method(method: str, X: DataMatrix, k: int, q: int, seed: int,
                restarts: int, max_iter: int, tol: float, center: bool):
    """Fit one method; returns (loss, iterations, loading|None, centroids, labels)."""
    if method == "fkm":
        res = fkm_fit(X, FkmConfig(k=k, q=q, max_iter=max_iter, tol=tol,
                                   restarts=restarts, seed=seed,
                                   center_columns=center))
    elif method == "rkm":
        res = rkm_fit(X, RkmConfig(k=k, q=q, max_iter=max_iter, tol=tol,
                                   restarts=restarts, seed=seed,
                                   center_columns=center))
    elif method == "tandem":
        res = tandem_fit(X, k, q, KMeansConfig(k=k, max_iter=max_iter, tol=tol,
                                               restarts=restarts, seed=seed))
    elif method == "kmeans":
        centers, labels0, loss, iterations = _kmeans_best(
            X.values, KMeansConfig(k=k, max_iter=max_iter, tol=tol,
                                   restarts=restarts, seed=seed))
        return loss, iterations, None, centers, labels0 + 1
    else:  # pragma: no cover - argparse restricts choices
        raise _fail(EXIT_BAD_ARGS, f"unknown method {method}")
    return (res.loss, res.iterations, res.loading.values,
            res.centroids.values, res.labels.labels)


def _cmd_fit(args) -> int:
    data = _load_csv(args.input)
    n, p = data.shape
    _check_feasible(n, p, args.k, args.q)
    X = DataMatrix(data)
    loss, iterations, loading, centroids, labels = _run_method(
        args.method, X, args.k, args.q, args.seed, args.restarts,
        args.max_iter, args.tol, not args.no_center)
    payload = {
        "method": args.method,
        "k": args.k,
        "q": args.q,
        "seed": args.seed,
        "loss": loss,
        "iterations": iterations,
        "loading": None if loading is None else _matrix_list(loading),
        "centroids": _matrix_list(centroids),
        "labels": [int(v) for v in labels],
    }
    _write_json(args.output, payload)
    if args.figures:
        from . import plots
        centered = data - data.mean(axis=0)
        if loading is not None:
            scores = centered @ loading
        else:
            _, _, vt = np.linalg.svd(centered, full_matrices=False)
            scores = centered @ vt[: min(2, p)].T
        plots.save_subspace_scatter(
            Path(args.figures) / f"{args.method}_subspace.png",
            scores[:, :2], labels,
            title=f"{args.method} clustering in its fitted subspace")
    return EXIT_OK


def _cmd_synth(args) -> int:
    data, truth = generate_paper_scenario(
        n=args.n, k=args.k, separation=args.separation,
        noise_dims=args.noise_dims, seed=args.seed, noise_sd=args.noise_sd)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(args.output, data.values, delimiter=",", fmt="%.17g")
    Path(args.truth).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(args.truth, truth.labels, fmt="%d")
    return EXIT_OK


def _cmd_compare(args) -> int:
    data = _load_csv(args.input)
    truth_raw = _load_csv(args.truth).ravel()
    n, p = data.shape
    if truth_raw.size != n:
        raise _fail(EXIT_BAD_CSV,
                    f"truth has {truth_raw.size} labels for {n} objects")
    _check_feasible(n, p, args.k, args.q)
    X = DataMatrix(data)
    truth = Membership(truth_raw.astype(np.int64))
    methods = {}
    fig_inputs = {}
    for method, stream in _METHOD_STREAMS.items():
        seed = derive_seed(args.seed, stream)
        start = time.perf_counter()
        loss, iterations, loading, _, labels = _run_method(
            method, X, args.k, args.q, seed, args.restarts,
            args.max_iter, args.tol, True)
        elapsed = time.perf_counter() - start
        methods[method] = {
            "loss": loss,
            "ari": adjusted_rand_index(Membership(labels), truth),
            "wall_time_s": elapsed,
            "iterations": iterations,
        }
        fig_inputs[method] = {"loading": loading, "labels": labels}
    payload = {"k": args.k, "q": args.q, "seed": args.seed, "n": n, "p": p,
               "methods": methods}
    _write_json(args.output, payload)
    if args.figures:
        from . import plots
        plots.save_compare_figures(args.figures, data, fig_inputs,
                                   truth=truth.labels)
    return EXIT_OK


def _population_from_config(spec: dict):
    kind = spec.get("kind")
    if kind == "mixture":
        return MixturePopulation(
            weights=np.asarray(spec["weights"], dtype=float),
            means=np.asarray(spec["means"], dtype=float),
            noise_sd=float(spec["noise_sd"]),
            informative_dims=int(spec["informative_dims"]),
            within_sd=float(spec.get("within_sd", 1.0)))
    if kind == "discrete":
        return DiscretePopulation(atoms=np.asarray(spec["atoms"], dtype=float),
                                  probs=np.asarray(spec["probs"], dtype=float))
    if kind == "scenario":
        return paper_scenario_population(
            k=int(spec.get("k", 3)),
            separation=float(spec.get("separation", 6.0)),
            noise_dims=int(spec.get("noise_dims", 10)),
            noise_sd=float(spec.get("noise_sd", DEFAULT_NOISE_SD)),
            within_sd=float(spec.get("within_sd", 1.0)))
    raise KeyError(f"unknown population kind {kind!r}")


def _cmd_consistency(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise _fail(EXIT_BAD_ARGS, f"config file not found: {args.config}")
    except json.JSONDecodeError as exc:
        raise _fail(EXIT_BAD_ARGS, f"invalid config JSON: {exc}")
    try:
        kind = raw["kind"]
        population = _population_from_config(raw["population"])
        if kind == "theorem1":
            fit_raw = raw.get("fit", {})
            fit_cfg = FkmConfig(
                k=int(raw["k"]), q=int(raw["q"]),
                max_iter=int(fit_raw.get("max_iter", 500)),
                tol=float(fit_raw.get("tol", 1e-10)),
                restarts=int(fit_raw.get("restarts", 50)),
                center_columns=bool(fit_raw.get("center_columns", False)))
            cfg = ConsistencyConfig(
                population=population, k=int(raw["k"]), q=int(raw["q"]),
                sample_sizes=tuple(int(v) for v in raw["sample_sizes"]),
                replications=int(raw["replications"]),
                reference_n=int(raw.get("reference_n", 100_000)),
                fit=fit_cfg, seed=int(raw.get("seed", 0)))
        elif kind == "slln":
            if not isinstance(population, DiscretePopulation):
                raise ValueError("slln checks require a discrete population")
            cfg = SllnCheckConfig(
                grid_size=int(raw["grid_size"]),
                ball_radius=float(raw["ball_radius"]),
                sample_sizes=tuple(int(v) for v in raw["sample_sizes"]),
                k=int(raw["k"]), q=int(raw["q"]), seed=int(raw.get("seed", 0)))
            spec = LossSpec(float(raw.get("loss_exponent", 2.0)))
        else:
            raise ValueError(f"unknown config kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise _fail(EXIT_BAD_ARGS, f"invalid config: {exc}")

    if kind == "theorem1":
        try:
            report = run_consistency(cfg)
        except IdentificationConditionError as exc:
            raise _fail(EXIT_IDENTIFICATION, str(exc))
        payload = report.to_dict()
        csv_header = ["sample_size", "loss_mean", "loss_sd",
                      "distance_mean", "distance_sd", "ari_mean"]
        csv_rows = [[r.sample_size, r.loss_mean, r.loss_sd,
                     r.distance_mean, r.distance_sd, r.ari_mean]
                    for r in report.rows]
    else:
        table = run_slln_check(population, cfg, spec)
        payload = {"kind": "slln", "k": cfg.k, "q": cfg.q, "seed": cfg.seed,
                   "grid_size": cfg.grid_size, "ball_radius": cfg.ball_radius,
                   "rows": [{"sample_size": n, "sup_gap": gap}
                            for n, gap in table]}
        csv_header = ["sample_size", "sup_gap"]
        csv_rows = [[n, gap] for n, gap in table]

    _write_json(args.output, payload)
    if args.csv:
        _write_csv_rows(args.csv, csv_header, csv_rows)
    if args.figures:
        from . import plots
        if kind == "theorem1":
            plots.save_consistency_figure(args.figures, report)
        else:
            plots.save_slln_figure(args.figures, table)
    return EXIT_OK


def _nonneg_int(value: str) -> int:
    out = int(value)
    if out < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return out


def _positive_int(value: str) -> int:
    out = int(value)
    if out < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return out


def _positive_float(value: str) -> float:
    out = float(value)
    if not out > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fkmeans",
        description="Subspace clustering (factorial/reduced k-means) toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one method to a CSV data matrix")
    fit.add_argument("--method", required=True,
                     choices=["fkm", "rkm", "tandem", "kmeans"])
    fit.add_argument("--input", required=True, help="headerless CSV, rows = objects")
    fit.add_argument("--k", type=_positive_int, required=True)
    fit.add_argument("--q", type=_positive_int, required=True)
    fit.add_argument("--restarts", type=_positive_int, default=50)
    fit.add_argument("--seed", type=_nonneg_int, default=0)
    fit.add_argument("--max-iter", type=_positive_int, default=500)
    fit.add_argument("--tol", type=_positive_float, default=1e-10)
    fit.add_argument("--no-center", action="store_true",
                     help="skip column centering (fkm/rkm only)")
    fit.add_argument("--output", required=True, help="result JSON path")
    fit.add_argument("--figures", default=None,
                     help="directory for a subspace scatter PNG")
    fit.set_defaults(handler=_cmd_fit)

    synth = sub.add_parser("synth", help="generate the benchmark scenario CSV")
    synth.add_argument("--n", type=_positive_int, required=True)
    synth.add_argument("--k", type=_positive_int, default=3)
    synth.add_argument("--separation", type=float, default=6.0)
    synth.add_argument("--noise-dims", type=_nonneg_int, default=10)
    synth.add_argument("--noise-sd", type=_positive_float, default=DEFAULT_NOISE_SD)
    synth.add_argument("--seed", type=_nonneg_int, default=0)
    synth.add_argument("--output", required=True, help="data CSV path")
    synth.add_argument("--truth", required=True, help="one-column truth CSV path")
    synth.set_defaults(handler=_cmd_synth)

    comp = sub.add_parser("compare",
                          help="run fkm, rkm, tandem and kmeans on the same data")
    comp.add_argument("--input", required=True)
    comp.add_argument("--truth", required=True)
    comp.add_argument("--k", type=_positive_int, required=True)
    comp.add_argument("--q", type=_positive_int, required=True)
    comp.add_argument("--seed", type=_nonneg_int, default=0)
    comp.add_argument("--restarts", type=_positive_int, default=50)
    comp.add_argument("--max-iter", type=_positive_int, default=500)
    comp.add_argument("--tol", type=_positive_float, default=1e-10)
    comp.add_argument("--output", required=True, help="report JSON path")
    comp.add_argument("--figures", default=None,
                      help="directory for per-method subspace scatter PNGs")
    comp.set_defaults(handler=_cmd_compare)

    cons = sub.add_parser("consistency",
                          help="run a theorem1 or slln experiment from a config")
    cons.add_argument("--config", required=True, help="JSON config path")
    cons.add_argument("--output", required=True, help="report JSON path")
    cons.add_argument("--csv", default=None, help="also write the table as CSV")
    cons.add_argument("--figures", default=None,
                      help="directory for trend/decay PNGs")
    cons.set_defaults(handler=_cmd_consistency)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
