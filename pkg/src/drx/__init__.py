"""Exact intersection numbers of DR-cycles with psi-class monomials.

Three mathematically independent engines (generating functions, boundary
splitting, semi-infinite wedge) compute the same rational numbers and are
cross-validated bit-exactly; fractions.Fraction is the universal scalar.
"""

from fractions import Fraction as Rational

from .errors import (ConventionMismatch, DegenerateLabels, DimensionError,
                     DrxError, EnergyBudgetExceeded, NonDivisible,
                     NonZeroTotalEnergy, ResidualPole, SingularSystem,
                     ZeroConstantTerm)
from .series import (LinearForm, TruncSeries, coefficient,
                     divide_exact_by_linear_form, invert_unit_series, mul,
                     series_S, series_zeta)
from .epsilon import EpsPoly
from .genfun import (DrProblem, ForgottenProblem, completed_cycle_number,
                     dr_psi_monomial, dr_psi_monomial_eps, dr_psi_power,
                     dr_psi_power_forgotten, evaluate, interpolate_polynomial)
from .splitting import (Convention, SplitTerm, dr_intersect,
                        enumerate_split_terms, move_psi_identity_check)
from .wedge import (EOp, FockState, apply_E, character, collapse_nested_commutator,
                    connected_vev, identity_resolution_check,
                    single_psi_via_wedge, thm2_via_commutators, vev)
from .identities import (EvidenceInstance, evidence_check, evidence_lhs,
                         paper_fixture_suite)

__version__ = "0.1.0"
