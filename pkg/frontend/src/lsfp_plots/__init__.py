"""Paper-style figures from LSFP simulation result CSVs.

Consumes only the CSV files written by the simulator's sweep command; no
import of the simulator itself.
"""

from lsfp_plots.data import read_result_csv
from lsfp_plots.figures import cdf_series, plot_cdf, plot_sum_se, sum_se_series

__all__ = [
    "read_result_csv",
    "sum_se_series",
    "cdf_series",
    "plot_sum_se",
    "plot_cdf",
]
