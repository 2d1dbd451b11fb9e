from src.analysis.bound import BoundDiagnostics, bound_rhs, make_diagnostics
from src.analysis.stats import EvalCurve, TTestResult, aulc, iqm, paired_ttest_onesided, quartiles
from src.analysis.visits import VisitRecorder, log_visits

__all__ = [
    "BoundDiagnostics",
    "EvalCurve",
    "TTestResult",
    "VisitRecorder",
    "aulc",
    "bound_rhs",
    "iqm",
    "log_visits",
    "make_diagnostics",
    "paired_ttest_onesided",
    "quartiles",
]
