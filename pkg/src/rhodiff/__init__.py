"""Risk-difference inference for combined unilateral and bilateral binary data.

Likelihood-ratio, Wald and score tests of the difference between two group
response probabilities under a constant within-subject correlation, plus
Monte Carlo machinery for type-I-error, power and sample-size studies.
"""

from .fit import (
    FitError,
    FitOptions,
    FitResult,
    SingularInformationError,
    fit_constrained,
    fit_unconstrained,
    schur_var_delta,
)
from .inference import (
    TestReport,
    TestResult,
    chisq1_critical,
    chisq1_pvalue,
    lr_test,
    run_all_tests,
    score_test,
    wald_test,
)
from .model import (
    CellProbs,
    DeltaParams,
    GroupParams,
    ModelDomainError,
    cell_probs,
    fisher_information,
    loglik_diff,
    loglik_groups,
    rho_lower_bound,
    score_diff,
)
from .simulate import (
    ExactTie,
    SimConfig,
    SimSummary,
    SweepRanges,
    TestRate,
    estimate_power,
    estimate_tie,
    exact_tie_small,
    min_sample_size,
    random_config_sweep,
    sample_dataset,
)
from .tables import FrequencyTable, TableError

__version__ = "0.1.0"

__all__ = [
    "CellProbs",
    "DeltaParams",
    "ExactTie",
    "FitError",
    "FitOptions",
    "FitResult",
    "FrequencyTable",
    "GroupParams",
    "ModelDomainError",
    "SimConfig",
    "SimSummary",
    "SingularInformationError",
    "SweepRanges",
    "TableError",
    "TestRate",
    "TestReport",
    "TestResult",
    "cell_probs",
    "chisq1_critical",
    "chisq1_pvalue",
    "estimate_power",
    "estimate_tie",
    "exact_tie_small",
    "fisher_information",
    "fit_constrained",
    "fit_unconstrained",
    "loglik_diff",
    "loglik_groups",
    "lr_test",
    "min_sample_size",
    "random_config_sweep",
    "rho_lower_bound",
    "run_all_tests",
    "sample_dataset",
    "schur_var_delta",
    "score_diff",
    "score_test",
    "wald_test",
    "__version__",
]
