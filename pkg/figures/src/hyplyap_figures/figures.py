"""The four figure kinds and their strict CSV readers."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaMismatch(Exception):
    """The input CSV does not carry the columns the figure kind needs."""


#: columns each figure kind consumes; anything else is ignored with a warning
REQUIRED = {
    "mu-scatter": ("mu1", "mu2", "gap", "stderr_sum"),
    "line-scan": ("mu1", "sum_positive", "stderr_sum", "reference"),
    "n2-heatmap": ("r", "x", "lambda_1", "zone"),
    "weight2-surface": ("x", "y", "x_plus_y", "delta", "stderr_1"),
}

KINDS = tuple(REQUIRED)


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    output_path: str
    sigma: float = 3.0     # good/bad threshold multiplier


def read_table(path: str, kind: str) -> dict[str, np.ndarray]:
    """Load the required columns, warning about unknown ones."""
    if kind not in REQUIRED:
        raise SchemaMismatch(f"unknown figure kind {kind!r}; expected one of {KINDS}")
    required = REQUIRED[kind]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaMismatch(
                f"{path}: missing column(s) {', '.join(missing)} for kind {kind!r}"
            )
        known = {col for cols in REQUIRED.values() for col in cols} | {
            "experiment", "seed", "digits", "runtime_s", "C", "d",
            "mu1_target", "mu2_target", "flag_good", "line_3mu2_minus_mu1_minus_1",
            "alpha_1", "alpha_2", "beta_1", "beta_2", "sum_positive", "stderr_sum",
            "reference", "gap", "delta",
        } | {f"lambda_{i}" for i in range(1, 5)} \
          | {f"stderr_{i}" for i in range(1, 5)} \
          | {f"deg_par_{i}" for i in range(1, 5)}
        unknown = [c for c in header if c not in known]
        if unknown:
            warnings.warn(f"{path}: ignoring unknown column(s) {', '.join(unknown)}")
        rows = list(reader)
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    out = {}
    for col in required:
        try:
            out[col] = np.array([float(row[col]) for row in rows])
        except ValueError as exc:
            raise SchemaMismatch(f"{path}: column {col!r} is not numeric") from exc
    return out


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.5), dpi=150)
    ax.set_title(title)
    return fig, ax


def _save(fig, path: str) -> None:
    fig.savefig(path, format="png", metadata={"Software": "make-figures"})
    plt.close(fig)


def _mu_scatter(table, spec: FigureSpec) -> None:
    good = np.abs(table["gap"]) <= spec.sigma * table["stderr_sum"]
    fig, ax = _new_axes("sum of positive exponents vs the degree bound")
    ax.scatter(table["mu1"][good], table["mu2"][good], s=28, c="tab:blue",
               label=f"equality within {spec.sigma:g} sigma")
    ax.scatter(table["mu1"][~good], table["mu2"][~good], s=28, c="tab:red",
               marker="s", label="strict excess")
    line = np.linspace(0.0, 0.5, 64)
    ax.plot(line, (line + 1.0) / 3.0, lw=0.8, c="gray", label="3 mu2 = mu1 + 1")
    ax.set_xlim(0.0, 0.55)
    ax.set_ylim(0.0, 0.55)
    ax.set_xlabel("mu1")
    ax.set_ylabel("mu2")
    ax.legend(loc="lower right", fontsize=8)
    _save(fig, spec.output_path)


def _line_scan(table, spec: FigureSpec) -> None:
    order = np.argsort(table["mu1"], kind="stable")
    mu1 = table["mu1"][order]
    total = table["sum_positive"][order]
    err = table["stderr_sum"][order]
    bound = table["reference"][order]
    fig, ax = _new_axes("exponent sum along a line of rotation numbers")
    ax.errorbar(mu1, total, yerr=spec.sigma * err, fmt="o-", ms=3, lw=0.9,
                c="tab:blue", label="sum of positive exponents")
    ax.plot(mu1, bound, "--", c="tab:orange", label="2 (mu1 + mu2)")
    ax.set_xlabel("mu1")
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    _save(fig, spec.output_path)


def _n2_heatmap(table, spec: FigureSpec) -> None:
    r_ticks = np.unique(table["r"])
    x_ticks = np.unique(table["x"])
    grid = np.full((x_ticks.size, r_ticks.size), np.nan)
    zones = np.zeros_like(grid)
    for r, x, lam, zone in zip(table["r"], table["x"], table["lambda_1"], table["zone"]):
        i = int(np.searchsorted(x_ticks, x))
        j = int(np.searchsorted(r_ticks, r))
        grid[i, j] = lam
        zones[i, j] = zone
    fig, ax = _new_axes("top exponent over the rank-2 parameter plane")
    extent = (r_ticks.min(), r_ticks.max(), x_ticks.min(), x_ticks.max())
    image = ax.imshow(grid, origin="lower", extent=extent, aspect="auto",
                      cmap="viridis", vmin=0.0)
    fig.colorbar(image, ax=ax, label="lambda_1")
    if r_ticks.size > 1 and x_ticks.size > 1 and np.unique(zones).size > 1:
        # chamber boundaries from the zone ids
        ax.contour(r_ticks, x_ticks, zones, colors="white", linewidths=0.7,
                   levels=np.arange(0.5, 6.0, 1.0))
    ax.set_xlabel("r")
    ax.set_ylabel("x")
    _save(fig, spec.output_path)


def _weight2_surface(table, spec: FigureSpec) -> None:
    fig, (left, right) = plt.subplots(1, 2, figsize=(9.0, 4.0), dpi=150)
    scatter = left.scatter(table["x"], table["y"], c=table["delta"], cmap="coolwarm", s=60)
    fig.colorbar(scatter, ax=left, label="deviation")
    left.set_xlabel("x")
    left.set_ylabel("y")
    left.set_title("deviation over the gap plane")
    order = np.argsort(table["x_plus_y"], kind="stable")
    right.errorbar(table["x_plus_y"][order], table["delta"][order],
                   yerr=spec.sigma * table["stderr_1"][order],
                   fmt="o", ms=3, c="tab:blue")
    right.axhline(0.0, lw=0.8, c="gray")
    right.set_xlabel("x + y")
    right.set_ylabel("deviation")
    right.set_title("collapse onto the anti-diagonal")
    fig.tight_layout()
    _save(fig, spec.output_path)


_RENDERERS = {
    "mu-scatter": _mu_scatter,
    "line-scan": _line_scan,
    "n2-heatmap": _n2_heatmap,
    "weight2-surface": _weight2_surface,
}


def make_figures(spec: FigureSpec) -> str:
    """Render one figure; returns the output path."""
    table = read_table(spec.input_csv, spec.kind)
    _RENDERERS[spec.kind](table, spec)
    return spec.output_path
