"""polypow: N-th powers of polynomial matrices and friends in linear time.

The package computes, over a word-size prime field:

* the N-th term of a C-finite sequence of polynomials,
* bivariate modular powers Q(x,y)**N mod P(x,y),
* the N-th power of a polynomial matrix,

each in O(N) field operations, by deriving a differential equation of
N-independent size for the result's coefficient sequence and unrolling the
induced recurrence.  Binary-powering baselines are included as oracles and
benchmark opponents.
"""

from .errors import (
    FieldDivisionError,
    ParameterCollision,
    ParseError,
    PolypowError,
    PreconditionError,
    ReconstructionError,
    SingularUnroll,
    TelescoperNotFound,
    VerificationError,
)
from .ff import DEFAULT_PRIME, Fp, default_field
from .upoly import Poly

__all__ = [
    "DEFAULT_PRIME",
    "Fp",
    "Poly",
    "default_field",
    "RatFun",
    "BiPoly",
    "BiRat",
    "PolyMatrix",
    "DiffOp",
    "Rec",
    "CFiniteSpec",
    "seq_term_ct",
    "genfunc",
    "telescoper_at",
    "telescoper_symbolic",
    "polmatpow",
    "bivmodpow",
    "y_pow_mod",
    "binpow_matrix",
    "modpow_baseline",
    "PolypowError",
    "PreconditionError",
    "FieldDivisionError",
    "ParseError",
    "ParameterCollision",
    "TelescoperNotFound",
    "ReconstructionError",
    "SingularUnroll",
    "VerificationError",
]

__version__ = "0.1.0"


def __getattr__(name):
    # late imports keep the base import light while exposing the full API
    if name in ("RatFun",):
        from .ratfun import RatFun

        return RatFun
    if name in ("BiPoly", "BiRat", "PolyMatrix"):
        from . import ypoly

        return getattr(ypoly, name)
    if name in ("DiffOp", "telescoper_at", "telescoper_symbolic"):
        from . import telescope

        return getattr(telescope, name)
    if name in ("Rec", "CFiniteSpec"):
        from . import holo

        return getattr(holo, name)
    if name in ("seq_term_ct", "genfunc"):
        from . import seqterm

        return getattr(seqterm, name)
    if name in ("polmatpow", "bivmodpow", "y_pow_mod", "binpow_matrix", "modpow_baseline"):
        from . import power

        return getattr(power, name)
    raise AttributeError(f"module 'polypow' has no attribute {name!r}")
