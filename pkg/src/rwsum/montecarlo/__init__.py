from .estimators import (McEstimate, ruin_prob_mc, stopped_tail_mc, tail_prob_conditional,
                         tail_prob_crude)
from .oracle import convolution_oracle
from .table import (RatioConfig, RatioRow, RatioTable, breiman_table, f3_scan, oracle_lhs,
                    ratio_table, ruin_table, stopped_table, sum_rhs)

__all__ = [
    "McEstimate", "ruin_prob_mc", "stopped_tail_mc", "tail_prob_conditional", "tail_prob_crude",
    "convolution_oracle", "RatioConfig", "RatioRow", "RatioTable", "breiman_table", "f3_scan",
    "oracle_lhs", "ratio_table", "ruin_table", "stopped_table", "sum_rhs",
]
