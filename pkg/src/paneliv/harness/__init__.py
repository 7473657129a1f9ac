from .config import DataPaths, RunConfig, parse_run_config, read_run_config
from .presets import PRESETS, data_paths_for_dir, preset_ids, replicate_preset
from .render import (
    ColumnResult,
    RenderedRow,
    RenderedTable,
    TableLayout,
    format_coefficient_cell,
    format_statistic,
    parse_coefficient_cell,
    render_table,
    stack_sections,
)
from .runner import SpecOutcome, execute_config, load_panel_bundle, render_outcomes, run_config

__all__ = [
    "PRESETS",
    "ColumnResult",
    "DataPaths",
    "RenderedRow",
    "RenderedTable",
    "RunConfig",
    "SpecOutcome",
    "TableLayout",
    "data_paths_for_dir",
    "execute_config",
    "format_coefficient_cell",
    "format_statistic",
    "load_panel_bundle",
    "parse_coefficient_cell",
    "parse_run_config",
    "preset_ids",
    "read_run_config",
    "render_outcomes",
    "render_table",
    "replicate_preset",
    "run_config",
    "stack_sections",
]
