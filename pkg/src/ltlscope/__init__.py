"""Runtime verification of LTL under partial observability.

Synthesises three-valued and six-valued LTL monitors, and drives the
budget-aware active/reactive monitors that break indistinguishability
classes to sharpen their verdicts.
"""

from .automata.moore import Verdict
from .formula import Formula, SLit, parse_formula
from .monitor import MonitorInstance, synthesize_imperfect, synthesize_standard
from .rational import (ActiveSession, RationalConfig, ReactiveSession,
                       active_monitor, reactive_monitor)
from .visibility import EqClass, VisibilitySpec, derive_classes, parse_classes

__version__ = "0.1.0"

__all__ = [
    "ActiveSession", "EqClass", "Formula", "MonitorInstance", "RationalConfig",
    "ReactiveSession", "SLit", "Verdict", "VisibilitySpec", "active_monitor",
    "derive_classes", "parse_classes", "parse_formula", "reactive_monitor",
    "synthesize_imperfect", "synthesize_standard", "__version__",
]
