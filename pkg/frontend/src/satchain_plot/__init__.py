"""Static figures from satchain CSV artifacts.

This package never recomputes physics: it is a pure CSV-to-figure transform
over the documented artifact schemas (sweep.csv, chain_sim.csv,
mc_histogram.csv).
"""

__version__ = "0.1.0"

from .csvio import CsvTable, NoRowsError, SchemaError, read_table
from .figures import KINDS, PlotSpec, build_figure, render
