#!/usr/bin/env python3
# Copyright 2026 The BMac Peer Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Renders throughput and latency plots from validator output.

Inputs are summary CSVs (from the validator or the acceptance binary) and
results JSONL files. Plots are written as PNG files; nothing is displayed.
"""

import argparse
import csv
import json
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_csv_rows(paths):
    rows = []
    for path in paths:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                rows.append(row)
    return rows


def read_results(path):
    results = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                results.append(json.loads(line))
    return results


def plot_throughput(rows, out_dir):
    labels = [r["label"] for r in rows]
    tps = [float(r["throughput_tps"]) for r in rows]
    p50 = [float(r["latency_p50_ms"]) for r in rows]
    p99 = [float(r["latency_p99_ms"]) for r in rows]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(max(8, 1.2 * len(rows) + 4), 4.5))
    x = range(len(rows))
    ax1.bar(x, tps, color="tab:blue")
    ax1.set_xticks(list(x), labels, rotation=45, ha="right")
    ax1.set_ylabel("throughput (tx/s)")
    ax1.set_title("Throughput")

    width = 0.4
    ax2.bar([i - width / 2 for i in x], p50, width, label="p50")
    ax2.bar([i + width / 2 for i in x], p99, width, label="p99")
    ax2.set_xticks(list(x), labels, rotation=45, ha="right")
    ax2.set_ylabel("latency (ms)")
    ax2.set_title("Block latency")
    ax2.legend()

    fig.tight_layout()
    path = os.path.join(out_dir, "throughput.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_results(results, name, out_dir):
    blocks = [r["block"] for r in results]
    stats = [r["stats"] for r in results]
    latency_ms = [s["latency_us"] / 1000.0 for s in stats]

    fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))

    axes[0].plot(blocks, latency_ms, ".", markersize=3)
    axes[0].set_xlabel("block")
    axes[0].set_ylabel("latency (ms)")
    axes[0].set_title("Latency per block")

    ordered = sorted(latency_ms)
    n = len(ordered)
    axes[1].plot(ordered, [(i + 1) / n for i in range(n)])
    axes[1].set_xlabel("latency (ms)")
    axes[1].set_ylabel("fraction of blocks")
    axes[1].set_title("Latency CDF")

    stages = ["block_verify_us", "tx_verify_us", "vscc_us", "mvcc_us"]
    bottom = [0.0] * len(results)
    for stage in stages:
        values = [s[stage] / 1000.0 for s in stats]
        axes[2].bar(blocks, values, bottom=bottom, width=1.0, label=stage[:-3])
        bottom = [b + v for b, v in zip(bottom, values)]
    axes[2].set_xlabel("block")
    axes[2].set_ylabel("stage time, summed over txs (ms)")
    axes[2].set_title("Stage time per block")
    axes[2].legend()

    fig.tight_layout()
    path = os.path.join(out_dir, f"{name}_latency.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--csv", nargs="*", default=[], help="summary CSV files")
    parser.add_argument("--results", nargs="*", default=[], help="results JSONL files")
    parser.add_argument("--out-dir", default="plots", help="directory for PNG output")
    args = parser.parse_args(argv)

    if not args.csv and not args.results:
        parser.error("give at least one --csv or --results file")
    os.makedirs(args.out_dir, exist_ok=True)

    written = []
    rows = read_csv_rows(args.csv)
    if rows:
        written.append(plot_throughput(rows, args.out_dir))
    for path in args.results:
        results = read_results(path)
        if not results:
            print(f"{path}: no results", file=sys.stderr)
            continue
        name = os.path.splitext(os.path.basename(path))[0]
        written.append(plot_results(results, name, args.out_dir))

    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
