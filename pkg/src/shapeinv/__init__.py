"""Shape-invariant ladder spectra for minimal-length quantum mechanics.

The algebra (``ladder``, ``shape``) works with exact rationals; ``oracle``
checks every spectrum against an independent finite-difference solve.
"""

from .ladder import (ABAR_A, A_ABAR, FULL_LINE, HALF_LINE, Channels, Domain, GeneralProfile,
                     GeneralShape, IncompatibleShape, LadderPair, LinearP, LinearPlusInverse,
                     QuadraticP, SecondOrderOperator, SinhSq, Tanh, Zero, apply_ladder, compose,
                     evaluate, gauge_factor)
from .shape import (UNBOUNDED, NotShapeInvariant, OneDim, Radial, ShapeRule, Sinh,
                    SpectrumTable, bound_state_count, closed_form_spectrum, derive_shape_rule,
                    spectrum_by_iteration)

__all__ = [
    "ABAR_A", "A_ABAR", "FULL_LINE", "HALF_LINE", "Channels", "Domain", "GeneralProfile",
    "GeneralShape", "IncompatibleShape", "LadderPair", "LinearP", "LinearPlusInverse",
    "QuadraticP", "SecondOrderOperator", "SinhSq", "Tanh", "Zero", "apply_ladder", "compose",
    "evaluate", "gauge_factor", "UNBOUNDED", "NotShapeInvariant", "OneDim", "Radial",
    "ShapeRule", "Sinh", "SpectrumTable", "bound_state_count", "closed_form_spectrum",
    "derive_shape_rule", "spectrum_by_iteration",
]
