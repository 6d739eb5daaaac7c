"""Exact fixed-point realizability for torus-equivariant unitary bordism."""

from .errors import (
    BordismError,
    ParseError,
    PrecisionError,
    PreconditionError,
    ResourceError,
    TruncationError,
)
from .mu import MuElement
from .series import PowerSeries
from .lazard import (
    RingContext,
    cp_class,
    exp_series,
    fgl_add,
    formal_inverse,
    is_integral,
    log_series,
    make_context,
    n_series,
)
from .borel import (
    BorelSeries,
    LocalizedBorel,
    Weight,
    cp_pushforward,
    euler_class,
    loc_divide,
    try_integralize,
)
from .fixedring import FixedDatum, FixedMonomial, antipode, in_cone
from .geometry import (
    DisjointUnion,
    ManifoldExpr,
    Point,
    Product,
    Proj,
    catalog,
    phi_omega,
    underlying_class,
)
from .realizability import Verdict, augmentation_check, localize, realizable

__version__ = "0.1.0"
