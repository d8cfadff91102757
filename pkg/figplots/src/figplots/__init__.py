"""Figure panels for heatrev CSV output."""

from .csvio import CsvFormatError, Table, read_table, table_kind
from .panels import PANEL_IDS, PanelSpec, RenderResult, SeriesInfo, render_panel

__version__ = "0.1.0"
