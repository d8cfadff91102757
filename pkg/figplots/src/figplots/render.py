"""Command line: figplots render <panel-id> --csv <paths...> --out <file>."""

from __future__ import annotations

import argparse
import sys

from .csvio import CsvFormatError
from .panels import PANEL_IDS, PanelSpec, render_panel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render figure panels from heatrev trajectory/scan CSVs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render one panel to an image file")
    render.add_argument("panel_id", choices=PANEL_IDS)
    render.add_argument(
        "--csv", nargs="+", required=True,
        help=(
            "input CSVs; for fig1a/fig1b: the correlation trajectories in scan-row "
            "order, then the independent reference, then the steady-offset scan CSV "
            "(order of trajectory files matters; scan files are recognized by header)"
        ),
    )
    render.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PanelSpec(panel_id=args.panel_id, csv_paths=tuple(args.csv), out_path=args.out)
    try:
        result = render_panel(spec)
    except (CsvFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({result.width_px}x{result.height_px} px, "
          f"{len(result.series)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
