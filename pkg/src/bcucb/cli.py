"""Command-line harness: run experiment sweeps, certify smoothness
constants, and evaluate regret bounds.

Subcommands
    run      --config FILE | --preset NAME [--seeds N] [--horizon T]
             [--policies a,b] [--oracle greedy|exact] [--out DIR]
    certify  --family F [--k K] [--c C] [--resolution R] [--full-grid]
    bound    --config FILE | --preset NAME --mode thm1|cor1 [--horizon T]

Exit codes: 0 success, 2 configuration error, 3 capacity-guard breach.
The worker count for episode execution is read from BCUCB_WORKERS.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from ._kernel import HAVE_SPEEDUPS, build_plan, resolve_kernel
from .environments import (ProblemInstance, compute_gaps, instance_from_dict,
                           load_instance)
from .errors import BanditError, CapacityError, ConfigError
from .oracles import ORACLE_FACTORS
from .policies import POLICY_KINDS
from .presets import get_preset
from .rewards import RewardFamily
from .simulator import (aggregate, approximation_regret, derive_seed,
                        regret_bound, run_episode)
from .smoothness import closed_form_smoothness, estimate_smoothness

CONFIG_SCHEMA = "bcucb-config/1"
MANIFEST_SCHEMA = "bcucb-manifest/1"
SUMMARY_SCHEMA = "bcucb-summary/1"
CSV_COLUMNS = ("policy", "seed", "t", "cumulative_regret")


@dataclass
class ExperimentConfig:
    """Fully resolved experiment description (instance inlined)."""

    instance: ProblemInstance
    instance_label: str
    policies: tuple
    oracle: str
    horizon: int
    seed_labels: tuple      # integers shown in the CSV
    seed_values: tuple      # generator seeds, aligned with seed_labels
    alpha: float
    beta: float

    def canonical_dict(self) -> dict:
        return {
            "schema": CONFIG_SCHEMA,
            "instance": self.instance.to_dict(),
            "instance_label": self.instance_label,
            "policies": list(self.policies),
            "oracle": self.oracle,
            "horizon": self.horizon,
            "seed_labels": list(self.seed_labels),
            "seed_values": list(self.seed_values),
            "alpha": self.alpha,
            "beta": self.beta,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _resolve_seeds(spec) -> tuple[tuple, tuple]:
    """Returns (labels, generator seeds) from a seed spec.

    A list is used verbatim; {"master": m, "count": n} derives seed i
    from (m, i) so growing the count never perturbs earlier episodes.
    """
    if isinstance(spec, list):
        labels = tuple(int(s) for s in spec)
        return labels, labels
    if isinstance(spec, dict) and set(spec) <= {"master", "count"}:
        master = int(spec.get("master", 0))
        count = int(spec.get("count", 0))
        if count < 1:
            raise ConfigError("seed count must be >= 1")
        labels = tuple(range(count))
        values = tuple(derive_seed(master, i) for i in labels)
        return labels, values
    raise ConfigError("seeds must be a list or {master, count}")


def _build_config(doc: dict) -> ExperimentConfig:
    if doc.get("schema", CONFIG_SCHEMA) != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported config schema {doc.get('schema')!r}")
    source = doc.get("instance")
    if isinstance(source, dict) and "preset" in source:
        preset = get_preset(source["preset"])
        instance = preset.instance()
        label = source["preset"]
        oracle = doc.get("oracle", preset.oracle)
        policies = tuple(doc.get("policies", preset.policies))
    elif isinstance(source, dict) and "file" in source:
        instance = load_instance(source["file"])
        label = os.path.basename(str(source["file"]))
        oracle = doc.get("oracle", "exact" if not instance.is_budget else "greedy")
        policies = tuple(doc.get("policies", ("bc-ucb", "cucb")))
    elif isinstance(source, dict):
        instance = instance_from_dict(source)
        label = "inline"
        oracle = doc.get("oracle", "exact" if not instance.is_budget else "greedy")
        policies = tuple(doc.get("policies", ("bc-ucb", "cucb")))
    else:
        raise ConfigError("config needs an instance (preset, file or inline)")

    for p in policies:
        if p not in POLICY_KINDS:
            raise ConfigError(f"unknown policy {p!r}")
    if not policies:
        raise ConfigError("at least one policy is required")
    if oracle not in ORACLE_FACTORS:
        raise ConfigError(f"unknown oracle {oracle!r}")

    horizon = int(doc.get("horizon", 1000))
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    labels, values = _resolve_seeds(doc.get("seeds", {"master": 0, "count": 5}))

    default_alpha, default_beta = ORACLE_FACTORS[oracle]
    alpha = float(doc["alpha"]) if doc.get("alpha") is not None else default_alpha
    beta = float(doc["beta"]) if doc.get("beta") is not None else default_beta
    if not 0.0 < alpha <= 1.0 or not 0.0 < beta <= 1.0:
        raise ConfigError("alpha and beta must lie in (0, 1]")

    return ExperimentConfig(instance=instance, instance_label=label,
                            policies=policies, oracle=oracle, horizon=horizon,
                            seed_labels=labels, seed_values=values,
                            alpha=alpha, beta=beta)


def _episode_job(args):
    instance_doc, policy, oracle, horizon, seed = args
    instance = instance_from_dict(instance_doc)
    return run_episode(instance, policy, oracle, horizon, seed)


def _run_episodes(config: ExperimentConfig):
    jobs = [(policy, label, value)
            for policy in config.policies
            for label, value in zip(config.seed_labels, config.seed_values)]
    workers = int(os.environ.get("BCUCB_WORKERS", "1"))
    if workers > 1:
        doc = config.instance.to_dict()
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            trajs = list(pool.map(
                _episode_job,
                [(doc, p, config.oracle, config.horizon, v) for p, _, v in jobs]))
    else:
        trajs = [run_episode(config.instance, p, config.oracle,
                             config.horizon, v) for p, _, v in jobs]
    out = []
    for (policy, label, _), traj in zip(jobs, trajs):
        curve = approximation_regret(traj, config.instance,
                                     config.alpha, config.beta)
        out.append((policy, label, curve))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_outputs(config: ExperimentConfig, results, out_dir: str) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    chash = config.config_hash()

    csv_path = os.path.join(out_dir, "regret.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write(f"# config_hash={chash}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for policy, label, curve in results:
            for t in range(config.horizon):
                fh.write(f"{policy},{label},{t + 1},{_fmt(curve.values[t])}\n")

    gaps = compute_gaps(config.instance, config.alpha, config.beta)
    smoothness = closed_form_smoothness(config.instance.family,
                                        config.instance.batch_size)
    bounds = {}
    if config.horizon >= 2:
        bounds = {
            "thm1": regret_bound(config.instance, gaps, smoothness,
                                 config.horizon, "thm1"),
            "cor1": regret_bound(config.instance, gaps, smoothness,
                                 config.horizon, "cor1"),
        }
    plan = build_plan(config.instance, config.policies[0], config.oracle)
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "config_hash": chash,
        "config": config.canonical_dict(),
        "gap_table": gaps.to_dict(),
        "smoothness": {"gamma_inf": smoothness.gamma_inf,
                       "gamma_g": smoothness.gamma_g,
                       "source": "closed-form"},
        "bounds": bounds,
        "kernel": resolve_kernel(plan),
        "compiled_kernel_available": HAVE_SPEEDUPS,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    summary = {"schema": SUMMARY_SCHEMA, "config_hash": chash, "policies": {}}
    for policy in config.policies:
        curves = [c for p, _, c in results if p == policy]
        agg = aggregate(curves)
        finals = [c.final for c in curves]
        summary["policies"][policy] = {
            "n_seeds": len(curves),
            "final_regret_mean": float(np.mean(finals)),
            "final_regret_std": float(np.std(finals)),
            "final_regret_quantiles": agg.final_quantiles,
        }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _cmd_run(args) -> int:
    if args.config:
        with open(args.config) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    elif args.preset:
        doc = {"instance": {"preset": args.preset}}
    else:
        raise ConfigError("run needs --config or --preset")
    if args.seeds is not None:
        master = doc.get("seeds", {}).get("master", 0) \
            if isinstance(doc.get("seeds"), dict) else 0
        doc["seeds"] = {"master": master, "count": args.seeds}
    if args.horizon is not None:
        doc["horizon"] = args.horizon
    if args.policies is not None:
        doc["policies"] = [p.strip() for p in args.policies.split(",") if p.strip()]
    if args.oracle is not None:
        doc["oracle"] = args.oracle

    config = _build_config(doc)
    results = _run_episodes(config)
    summary = _write_outputs(config, results, args.out)
    for policy, stats in summary["policies"].items():
        print(f"{policy}: mean final regret "
              f"{stats['final_regret_mean']:.6g} over {stats['n_seeds']} seeds")
    print(f"outputs written to {args.out}")
    return 0


def _cmd_certify(args) -> int:
    weights = np.ones(1)
    family = RewardFamily(kind=args.family, c=args.c, weights=weights)
    points = "full" if args.full_grid else "structured"
    est = estimate_smoothness(family, args.k, resolution=args.resolution,
                              points=points)
    closed = closed_form_smoothness(family, args.k)
    tol = 1e-3 * (args.resolution / 0.01)
    print(f"family={args.family} k={args.k} resolution={args.resolution} "
          f"points={points}")
    print(f"  gamma_inf: estimate {est.gamma_inf:.6f}   closed form "
          f"{closed.gamma_inf:.6f}")
    print(f"  gamma_g:   estimate {est.gamma_g:.6f}   closed form "
          f"{closed.gamma_g:.6f}")
    ok = (est.gamma_inf <= closed.gamma_inf + tol
          and est.gamma_g <= closed.gamma_g + tol)
    print("  certified: estimates stay below the closed forms"
          if ok else "  WARNING: an estimate exceeds its closed form")
    return 0 if ok else 1


def _cmd_bound(args) -> int:
    if args.config:
        with open(args.config) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    elif args.preset:
        doc = {"instance": {"preset": args.preset}}
    else:
        raise ConfigError("bound needs --config or --preset")
    if args.horizon is not None:
        doc["horizon"] = args.horizon
    config = _build_config(doc)
    if config.horizon < 2:
        raise ConfigError("bound evaluation needs horizon >= 2")
    gaps = compute_gaps(config.instance, config.alpha, config.beta)
    smoothness = closed_form_smoothness(config.instance.family,
                                        config.instance.batch_size)
    value = regret_bound(config.instance, gaps, smoothness,
                         config.horizon, args.mode)
    print(f"{args.mode} bound at T={config.horizon}: {value:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcucb",
        description="combinatorial semi-bandit experiments with "
                    "variance-adaptive confidence indices")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment sweep")
    p_run.add_argument("--config", help="JSON experiment config")
    p_run.add_argument("--preset", help="named built-in instance")
    p_run.add_argument("--seeds", type=int, help="number of seeds")
    p_run.add_argument("--horizon", type=int, help="rounds per episode")
    p_run.add_argument("--policies", help="comma-separated policy list")
    p_run.add_argument("--oracle", choices=("greedy", "exact"))
    p_run.add_argument("--out", default="bcucb_out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_cert = sub.add_parser("certify", help="certify smoothness constants")
    p_cert.add_argument("--family", required=True,
                        choices=("pmc", "linear", "logistic"))
    p_cert.add_argument("--k", type=int, default=4, help="batch size")
    p_cert.add_argument("--c", type=float, default=1.0,
                        help="logistic scale constant")
    p_cert.add_argument("--resolution", type=float, default=0.01)
    p_cert.add_argument("--full-grid", action="store_true",
                        help="use the full cartesian grid (small k only)")
    p_cert.set_defaults(func=_cmd_certify)

    p_bound = sub.add_parser("bound", help="evaluate a regret bound")
    p_bound.add_argument("--config", help="JSON experiment config")
    p_bound.add_argument("--preset", help="named built-in instance")
    p_bound.add_argument("--mode", required=True, choices=("thm1", "cor1"))
    p_bound.add_argument("--horizon", type=int)
    p_bound.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (BanditError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
