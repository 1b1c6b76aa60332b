"""Verification library for the Virasoro central extensions of Diff+(S^1).

The package evaluates Bott-Thurston group cocycles, chases the coboundary
identities of the bisimplicial double complex on Gamma^p x F x R^q at the
level of explicit differential forms, fiber-integrates the result, and
measures central charges of the extensions so obtained.  The distinguished
(Whitney-additive) lift of the first Pontryagin class transgresses to the
extension with central charge -12.
"""

from .chernweil import (
    P1_COEFFICIENT,
    DifferentialLift,
    InvPoly2,
    distinguished_lift,
    restrict_to_gl1,
    restrict_to_so,
    solve_whitney,
    transgression_scale,
    whitney_defect,
)
from .cocycle import (
    GroupCocycle,
    VirasoroElement,
    bott_original_R,
    bott_thurston_R,
    bott_thurston_T,
    coboundary_cocycle,
    cocycle_defect,
    custom_cocycle,
    unnormalized_cocycle,
    virasoro_cocycle,
    virasoro_inv,
    virasoro_mul,
)
from .diffeo import (
    CircleDiffeo,
    FourierLift,
    WittField,
    compose,
    evaluate,
    flow,
    identity,
    invert,
    mobius,
    project,
    random_diffeo,
    random_field,
    rotation,
    witt_generator,
)
from .simplicial import (
    BisimplicialPoint,
    LemmaCochains,
    LevelOneForm,
    Tangent,
    coboundary,
    face_map,
    fiber_integrate,
    pushforward,
    transgress,
    verify_main_lemma,
)
from .witt import (
    DiagonalCocycle,
    ModeElement,
    NumericCocycle,
    central_charge,
    extract_lie_cocycle,
    jacobi_defect,
    sl2_class_check,
    standard_cocycle,
    virasoro_bracket,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
