"""The six figure panels rendered from heatrev CSV output.

Trajectory panels (fig1a energy, fig1b apparent temperature) take the five
correlation curves plus the independent-dissipation reference and a
five-row scan CSV that carries the steady-state offsets; curves are
colour-keyed by their re_alpha value (most negative to most positive:
purple, blue, green, orange, red) with a dotted asymptote line per curve
and a dot-dashed black reference. Scan panels (fig2a/fig2b maximal
reversal, fig3a/fig3b entropy and energy change) plot one or two scan CSVs
against omega*beta_B.

All inputs are validated before any figure is created, so a failed render
never leaves an output file behind.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import CsvFormatError, Table, read_table, table_kind

PANEL_IDS = ("fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b")

# Colour order for the correlation curves, most negative re_alpha first.
SERIES_COLORS = ("purple", "tab:blue", "green", "orange", "red")
REFERENCE_STYLE = {"color": "black", "linestyle": "-."}
ASYMPTOTE_STYLE = {"linestyle": ":", "linewidth": 1.1}
BATH_LINE_STYLE = {"color": "grey", "linestyle": ":", "linewidth": 1.1}

FIGSIZE = (7.0, 4.5)
DPI = 144

TRAJECTORY_SERIES = 5


@dataclass(frozen=True)
class PanelSpec:
    """One panel: its id, input CSV paths, and the output image path."""

    panel_id: str
    csv_paths: tuple[str, ...]
    out_path: str


@dataclass(frozen=True)
class SeriesInfo:
    re_alpha: float
    asymptote: float | None


@dataclass(frozen=True)
class RenderResult:
    panel_id: str
    out_path: str
    series: tuple[SeriesInfo, ...]
    width_px: int
    height_px: int


def _split_inputs(spec: PanelSpec) -> tuple[list[Table], list[Table]]:
    trajectories, scans = [], []
    for path in spec.csv_paths:
        table = read_table(path)
        (trajectories if table_kind(table) == "trajectory" else scans).append(table)
    return trajectories, scans


def _trajectory_inputs(spec: PanelSpec):
    """Validate the fig1 input bundle: five curves + reference + scan rows."""
    trajectories, scans = _split_inputs(spec)
    if len(scans) != 1:
        raise CsvFormatError(
            f"{spec.panel_id}: expected exactly one scan CSV with the steady offsets, "
            f"got {len(scans)}"
        )
    scan = scans[0]
    if len(scan) != TRAJECTORY_SERIES:
        raise CsvFormatError(
            f"{spec.panel_id}: the scan CSV must hold {TRAJECTORY_SERIES} rows "
            f"(one per correlation curve), got {len(scan)}"
        )
    if len(trajectories) != TRAJECTORY_SERIES + 1:
        raise CsvFormatError(
            f"{spec.panel_id}: expected {TRAJECTORY_SERIES} correlation trajectories "
            f"plus the independent-dissipation reference (in that order), got "
            f"{len(trajectories)}"
        )
    curves = trajectories[:TRAJECTORY_SERIES]
    reference = trajectories[-1]
    alphas = scan.column("re_alpha")
    deltas = scan.column("delta_E_over_omega")
    beta_b = scan.column("beta_B_omega")
    if np.ptp(beta_b) > 1e-12:
        raise CsvFormatError(f"{spec.panel_id}: scan rows disagree on beta_B")
    order = np.argsort(alphas)
    series = []
    for rank, idx in enumerate(order):
        curve = curves[idx]
        e0 = curve.column("E_over_omega")[0]
        series.append(
            {
                "table": curve,
                "re_alpha": float(alphas[idx]),
                "asymptote": float(e0 + deltas[idx]),
                "color": SERIES_COLORS[rank],
            }
        )
    return series, reference, float(beta_b[0])


def _finish(fig, spec: PanelSpec, series_info) -> RenderResult:
    fig.savefig(spec.out_path, dpi=DPI)
    width = int(round(fig.get_figwidth() * DPI))
    height = int(round(fig.get_figheight() * DPI))
    plt.close(fig)
    return RenderResult(
        panel_id=spec.panel_id,
        out_path=spec.out_path,
        series=tuple(series_info),
        width_px=width,
        height_px=height,
    )


def _render_trajectory_panel(spec: PanelSpec) -> RenderResult:
    series, reference, beta_b = _trajectory_inputs(spec)
    energy_panel = spec.panel_id == "fig1a"
    fig, ax = plt.subplots(figsize=FIGSIZE)
    info = []
    for s in series:
        t = s["table"].column("t")
        if energy_panel:
            y = s["table"].column("E_over_omega")
            ax.axhline(s["asymptote"], color=s["color"], **ASYMPTOTE_STYLE)
        else:
            y = 1.0 / s["table"].column("beta_app_omega")
        ax.plot(t, y, color=s["color"], label=f"re_alpha = {s['re_alpha']:+.6g}")
        info.append(SeriesInfo(re_alpha=s["re_alpha"], asymptote=s["asymptote"]))
    t_ref = reference.column("t")
    if energy_panel:
        ax.plot(t_ref, reference.column("E_over_omega"),
                label="independent dissipation", **REFERENCE_STYLE)
        ax.set_ylabel("E / omega")
    else:
        ax.plot(t_ref, 1.0 / reference.column("beta_app_omega"),
                label="independent dissipation", **REFERENCE_STYLE)
        ax.axhline(1.0 / beta_b, label="bath temperature", **BATH_LINE_STYLE)
        ax.set_ylabel("apparent temperature / omega")
    ax.set_xlabel("t G(+omega)")
    ax.legend(fontsize=8)
    return _finish(fig, spec, info)


def _scan_tables(spec: PanelSpec, expected: int) -> list[Table]:
    trajectories, scans = _split_inputs(spec)
    if trajectories or len(scans) != expected:
        raise CsvFormatError(
            f"{spec.panel_id}: expected exactly {expected} scan CSV(s), got "
            f"{len(scans)} scan and {len(trajectories)} trajectory file(s)"
        )
    return scans


def _thermal_energy(beta_omega: np.ndarray) -> np.ndarray:
    x = np.exp(-beta_omega)
    return 2.0 * x / (1.0 + x)


def _render_scan_panel(spec: PanelSpec) -> RenderResult:
    single = spec.panel_id in ("fig2a", "fig2b")
    scans = _scan_tables(spec, 1 if single else 2)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    info = []
    colors = ("purple", "red")
    for scan, color in zip(scans, colors):
        beta_b = scan.column("beta_B_omega")
        if spec.panel_id == "fig2a":
            y = scan.column("delta_E_over_omega")
            label = "max reversal dE"
        elif spec.panel_id == "fig2b":
            y = scan.column("delta_E_over_omega") / _thermal_energy(scan.column("beta_S_omega"))
            label = "max reversal dE / E0"
        elif spec.panel_id == "fig3a":
            y = scan.column("delta_S")
            label = f"re_alpha sign {np.sign(scan.column('re_alpha')[0]):+.0f}"
        else:  # fig3b
            y = scan.column("delta_E_over_omega")
            label = f"re_alpha sign {np.sign(scan.column('re_alpha')[0]):+.0f}"
        ax.plot(beta_b, y, color=color, label=label)
        info.append(SeriesInfo(re_alpha=float(scan.column("re_alpha")[0]), asymptote=None))
    if spec.panel_id in ("fig3a", "fig3b"):
        ax.axhline(0.0, color="grey", linewidth=0.8)
    ax.set_xlabel("omega beta_B")
    ax.set_ylabel(
        {
            "fig2a": "dE / omega",
            "fig2b": "dE / E0",
            "fig3a": "dS",
            "fig3b": "dE / omega",
        }[spec.panel_id]
    )
    ax.legend(fontsize=8)
    return _finish(fig, spec, info)


def render_panel(spec: PanelSpec) -> RenderResult:
    """Render one panel; all validation happens before the figure exists."""
    if spec.panel_id not in PANEL_IDS:
        raise ValueError(f"unknown panel {spec.panel_id!r}; known: {', '.join(PANEL_IDS)}")
    if not spec.csv_paths:
        raise CsvFormatError("no input CSVs given")
    if spec.panel_id in ("fig1a", "fig1b"):
        return _render_trajectory_panel(spec)
    return _render_scan_panel(spec)
