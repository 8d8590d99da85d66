"""ioequil: equilibrium, sustainability, taxation and aggregation analysis
for input-output economies."""

from .aggregation import (
    AggregatedTable,
    AggregationMap,
    aggregate,
    aggregated_value_added_check,
    relative_prices,
    scaling_identity_check,
)
from .balance import (
    ClearingOutcome,
    SupportPartition,
    balanced_eigenvector,
    clearing_equilibrium,
    inequality_solution,
    supply_demand_factor,
    support_partition,
)
from .core import (
    ConeMembership,
    ConeStatus,
    SolutionFamily,
    Technology,
    cone_membership,
    is_indecomposable,
    is_productive,
    leontief_solve,
    positive_solution_family,
    spectral_radius,
)
from .equilibrium import (
    AlphaPoint,
    EquilibriumState,
    alpha_objective,
    assemble_equilibrium,
    excess_supply,
    min_excess_qp,
    min_ratios,
    no_equilibrium_certificate,
    prices_from_consumption,
    prices_on_support,
    solution_from_alpha,
)
from .real_economy import (
    IOTable,
    RealEconomyReport,
    analyze,
    dumps_table,
    load_table,
    loads_table,
)
from .sustainability import SustainabilityVerdict, check_sustainable, clearing_residual
from .taxation import (
    TaxBoundsReport,
    TaxFamily,
    ValueAddedTaxSystem,
    fit_scale,
    real_tax_vector,
    tax_bounds,
    tax_family,
    taxed_clearing_residual,
    value_added_tax,
)

__version__ = "0.1.0"

__all__ = [
    "AggregatedTable",
    "AggregationMap",
    "AlphaPoint",
    "ClearingOutcome",
    "ConeMembership",
    "ConeStatus",
    "EquilibriumState",
    "IOTable",
    "RealEconomyReport",
    "SolutionFamily",
    "SupportPartition",
    "SustainabilityVerdict",
    "TaxBoundsReport",
    "TaxFamily",
    "Technology",
    "ValueAddedTaxSystem",
    "aggregate",
    "aggregated_value_added_check",
    "alpha_objective",
    "analyze",
    "assemble_equilibrium",
    "balanced_eigenvector",
    "check_sustainable",
    "clearing_equilibrium",
    "clearing_residual",
    "cone_membership",
    "dumps_table",
    "excess_supply",
    "fit_scale",
    "inequality_solution",
    "is_indecomposable",
    "is_productive",
    "leontief_solve",
    "load_table",
    "loads_table",
    "min_excess_qp",
    "min_ratios",
    "no_equilibrium_certificate",
    "positive_solution_family",
    "prices_from_consumption",
    "prices_on_support",
    "real_tax_vector",
    "relative_prices",
    "scaling_identity_check",
    "solution_from_alpha",
    "spectral_radius",
    "supply_demand_factor",
    "support_partition",
    "tax_bounds",
    "tax_family",
    "taxed_clearing_residual",
    "value_added_tax",
]
