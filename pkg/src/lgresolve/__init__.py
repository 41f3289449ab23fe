"""Certificate-producing symbolic verifier for a Lagrangian blow-up tower.

Subpackages:

* :mod:`lgresolve.poly`, :mod:`lgresolve.parse`, :mod:`lgresolve.matrix`
  -- exact polynomial arithmetic;
* :mod:`lgresolve.groebner` -- Groebner bases, membership witnesses,
  localization and unit certificates, all under explicit budgets;
* :mod:`lgresolve.schubert` -- the isotropic-subset combinatorics;
* :mod:`lgresolve.chart` -- chart presentations, blow-up replay, group
  actions and covering checks;
* :mod:`lgresolve.certify` -- smoothness / normal-crossings /
  semistability certificates over exclusion cover pieces;
* :mod:`lgresolve.pluecker` -- minor tables, factorization identities and
  the nonvanishing deduction replay;
* :mod:`lgresolve.cli` -- the ``resolve`` command line.
"""

from .poly import Polynomial, VarRegistry
from .parse import ParseError, format_poly, parse_poly
from .matrix import PolyMatrix
from .groebner import (
    Budget,
    BudgetExceeded,
    LocalizedPresentation,
    UnitCertificate,
    contains,
    eliminate,
    groebner,
    is_unit,
    nonvanishing,
    saturate,
)
from .chart import (
    ChartPresentation,
    check_step,
    covering_check,
    load_centers,
    load_elements,
    load_tower,
    pullback_check,
    replay_step,
)
from .certify import (
    PieceContext,
    nc_intersection,
    semistable,
    smooth_center,
    unit_minor,
)
from .pluecker import (
    LocalModelStep,
    load_steps,
    m_table,
    verify_cofactor_identities,
    verify_factorization,
    verify_nonvanishing,
)

__all__ = [
    "ChartPresentation",
    "check_step",
    "covering_check",
    "load_centers",
    "load_elements",
    "load_tower",
    "pullback_check",
    "replay_step",
    "PieceContext",
    "nc_intersection",
    "semistable",
    "smooth_center",
    "unit_minor",
    "LocalModelStep",
    "load_steps",
    "m_table",
    "verify_cofactor_identities",
    "verify_factorization",
    "verify_nonvanishing",
    "Polynomial",
    "VarRegistry",
    "ParseError",
    "format_poly",
    "parse_poly",
    "PolyMatrix",
    "Budget",
    "BudgetExceeded",
    "LocalizedPresentation",
    "UnitCertificate",
    "contains",
    "eliminate",
    "groebner",
    "is_unit",
    "nonvanishing",
    "saturate",
]
