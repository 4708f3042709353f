#!/usr/bin/env python3
"""Render the CSV tables written by `ctsim` as SVG plots.

Usage: plot_figures.py <csv-dir> [--out <plot-dir>]
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def load(path):
    return pd.read_csv(path, comment="#")


def series(df, prefix):
    return [c for c in df.columns if c.startswith(prefix)]


def plot_fig1(df, ax):
    ax.semilogy(df["N"], df["ent_bound_2N (Gamma)"], "o-", label="entangled, 2N qubits")
    ax.semilogy(df["N"], df["ct_error_N (Gamma)"], "s-", label="coherence trapping, N probes")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\Delta^2\omega\,T$ ($\Gamma$)")


def plot_fig2a(df, ax):
    for col in series(df, "ct_"):
        ax.semilogy(df["gamma_t"], df[col], label=col.split(" (")[0])
    ax.semilogy(df["gamma_t"], df["ent_bound (rad^2/s)"], "k--", label="entangled bound")
    ax.set_xlabel(r"$\Gamma \bar t$")
    ax.set_ylabel(r"min$_\omega$ $\Delta^2\omega\,T$ (rad$^2$/s)")


def plot_fig2b(df, ax):
    for col in series(df, "ct_"):
        ax.semilogy(df["nu (Hz)"], df[col], ".-", label=col.split(" (")[0])
    ax.set_xlabel(r"$\omega/2\pi$ (Hz)")
    ax.set_ylabel(r"$\Delta^2\omega\,T$ (rad$^2$/s)")


def plot_evolve(df, ax):
    ax.plot(df["gamma_t"], df["coherence_abs"], label="|f| simulated")
    ref = (df["single_excitation_re"] ** 2 + df["single_excitation_im"] ** 2) ** 0.5
    ax.plot(df["gamma_t"], ref, "--", label="|f| single excitation")
    ax.set_xlabel(r"$\Gamma t$")
    ax.set_ylabel("probe coherence")


def plot_bound(df, ax):
    ax.loglog(df["gamma_t"], df["bound (rad^2/s)"])
    ax.set_xlabel(r"$\Gamma t$")
    ax.set_ylabel(r"$\Delta^2\omega\,T$ (rad$^2$/s)")


PLOTTERS = {
    "fig1": plot_fig1,
    "fig2a": plot_fig2a,
    "fig2b": plot_fig2b,
    "evolve": plot_evolve,
    "bound": plot_bound,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_dir", type=Path)
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args()
    out = args.out or args.csv_dir
    out.mkdir(parents=True, exist_ok=True)
    found = False
    for name, plot in PLOTTERS.items():
        path = args.csv_dir / f"{name}.csv"
        if not path.exists():
            continue
        found = True
        fig, ax = plt.subplots(figsize=(6, 4))
        plot(load(path), ax)
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
        fig.tight_layout()
        fig.savefig(out / f"{name}.svg")
        plt.close(fig)
        print(f"wrote {out / f'{name}.svg'}")
    if not found:
        raise SystemExit(f"no ctsim CSV files in {args.csv_dir}")


if __name__ == "__main__":
    main()
