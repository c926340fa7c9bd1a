from .base import TailModel
from .diagnostics import ClassReport, class_diagnostics, potter_constants
from .insensitivity import (InsensitivityFn, insensitivity_function, uniform_deviation,
                           widen_insensitivity)
from .zoo import (Degenerate, Exponential, IntegratedOscillatingTail, InversePowerLog,
                  LogPerturbedPareto, OscillatingTail, ParetoWeight, Scaled, SumModel,
                  SymmetricPareto, TwoPieceWeight, TwoSidedPareto, UtaiMarginal)
from .window import (WeightWindow, capped_window, log_window, log_window_f2,
                     log_window_f2_inv, log_window_h, power_fn, weight_window)

__all__ = [
    "TailModel", "ClassReport", "class_diagnostics", "potter_constants", "InsensitivityFn",
    "insensitivity_function", "uniform_deviation", "widen_insensitivity", "Degenerate", "Exponential", "IntegratedOscillatingTail", "InversePowerLog",
    "LogPerturbedPareto", "OscillatingTail", "ParetoWeight", "Scaled", "SumModel",
    "SymmetricPareto", "TwoPieceWeight", "TwoSidedPareto", "UtaiMarginal",
    "WeightWindow", "capped_window", "log_window", "log_window_f2", "log_window_f2_inv",
    "log_window_h", "power_fn", "weight_window",
]
