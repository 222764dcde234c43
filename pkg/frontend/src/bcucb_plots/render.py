"""Render regret-curve figures from bcucb run outputs.

Reads the experiment CSV (columns policy, seed, t, cumulative_regret,
preceded by a ``# config_hash=...`` comment line) and the JSON manifest,
and draws one mean line with a +/- one-standard-deviation band per
policy, with the gap-dependent regret bound at the horizon overlaid as a
dashed reference line.

Usage: bcucb-render <csv> <manifest> <out.png> [--log-x]
"""
from __future__ import annotations

import argparse
import json
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = ["policy", "seed", "t", "cumulative_regret"]


class SchemaError(ValueError):
    """The input files do not match the documented output schema."""


def load_curves(csv_path):
    """Per-policy regret curves: {policy: array of shape (n_seeds, T)}.

    Returns (curves, config_hash); the hash comes from the leading
    comment line and is None when absent.
    """
    series = {}
    config_hash = None
    with open(csv_path) as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                if line.startswith("# config_hash="):
                    config_hash = line.split("=", 1)[1]
                continue
            if header is None:
                header = line.split(",")
                if header != EXPECTED_COLUMNS:
                    raise SchemaError(
                        f"unexpected CSV columns {header}; "
                        f"need {EXPECTED_COLUMNS}")
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise SchemaError(f"malformed CSV row: {line!r}")
            policy, seed, t, value = parts
            try:
                key = (policy, int(seed))
                point = (int(t), float(value))
            except ValueError as exc:
                raise SchemaError(f"malformed CSV row: {line!r}") from exc
            series.setdefault(key, []).append(point)
    if header is None or not series:
        raise SchemaError("CSV contains no data rows")

    horizons = {len(points) for points in series.values()}
    if len(horizons) != 1:
        raise SchemaError("seed curves have inconsistent lengths")
    horizon = horizons.pop()

    curves = {}
    for (policy, _), points in sorted(series.items()):
        points.sort()
        if [t for t, _ in points] != list(range(1, horizon + 1)):
            raise SchemaError(f"policy {policy!r} is missing rounds")
        curves.setdefault(policy, []).append([v for _, v in points])
    arrays = {policy: np.asarray(rows) for policy, rows in curves.items()}
    return arrays, config_hash


def load_manifest(manifest_path) -> dict:
    with open(manifest_path) as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"manifest is not valid JSON: {exc}") from exc
    if "bounds" not in manifest:
        raise SchemaError("manifest carries no bound values")
    return manifest


def render(csv_path, manifest_path, out_path, log_x: bool = False) -> None:
    """Draw the figure; raises SchemaError (writing nothing) on bad input."""
    curves, csv_hash = load_curves(csv_path)
    manifest = load_manifest(manifest_path)
    manifest_hash = manifest.get("config_hash")
    if csv_hash and manifest_hash and csv_hash != manifest_hash:
        raise SchemaError(
            f"CSV config hash {csv_hash} does not match the manifest "
            f"({manifest_hash}); the files come from different runs")

    fig, ax = plt.subplots(figsize=(8, 5))
    for policy, rows in sorted(curves.items()):
        t = np.arange(1, rows.shape[1] + 1)
        mean = rows.mean(axis=0)
        std = rows.std(axis=0)
        line, = ax.plot(t, mean, label=f"{policy} ({rows.shape[0]} seeds)")
        ax.fill_between(t, mean - std, mean + std,
                        color=line.get_color(), alpha=0.2, linewidth=0)

    bound = manifest["bounds"].get("thm1")
    if bound is not None:
        ax.axhline(bound, linestyle="--", color="gray",
                   label=f"regret bound at T ({bound:.3g})")

    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel("round t")
    ax.set_ylabel("cumulative regret")
    hash_tag = manifest.get("config_hash", "")[:8]
    ax.set_title(f"mean regret with std bands [{hash_tag}]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120, metadata={"Software": "bcucb-plots"})
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bcucb-render",
        description="render regret curves from bcucb run outputs")
    parser.add_argument("csv", help="regret.csv from a run")
    parser.add_argument("manifest", help="manifest.json from the same run")
    parser.add_argument("out", help="output image path (png)")
    parser.add_argument("--log-x", action="store_true",
                        help="logarithmic round axis")
    args = parser.parse_args(argv)
    try:
        render(args.csv, args.manifest, args.out, log_x=args.log_x)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"figure written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
