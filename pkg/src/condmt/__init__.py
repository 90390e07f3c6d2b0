"""Conditional global tests for multiple hypothesis testing with
conservative p-values: select the p-values at or below a threshold tau,
rescale them by 1/tau, and apply any global test or multiplicity
procedure; validity is preserved whenever the individual null p-values
are uniformly conservative, and power can improve dramatically when many
of them are.
"""

from .adaptive_tau import (
    AdaptiveConfig,
    MaskedView,
    TauSession,
    advance,
    auto_select_tau,
    finalize,
    open_session,
    session_view,
    stop,
)
from .conditional import (
    SelectionSet,
    conditional_bonferroni_rejections,
    conditional_higher_criticism,
    conditional_multiplicity,
    conditional_test,
    power_ratio,
    select,
)
from .distributions import (
    binom_cdf,
    binom_sf_geq,
    chisq_sf,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
)
from .global_tests import (
    METHODS,
    CombinedResult,
    PValueVector,
    bonferroni,
    fisher,
    hc_plus,
    higher_criticism,
    run_test,
    sidak,
    simes,
    truncated_product,
)
from .pvalue_models import (
    NullCdf,
    check_uniform_conservative,
    heteroscedastic_null_cdf,
    heteroscedastic_p,
    one_sided_p,
    practical_importance_p,
    shifted_normal_null_cdf,
)
from .qualint import (
    QualIntResult,
    StudyRecord,
    gail_simon_lrt,
    ibga,
    qualitative_interaction_test,
    split_pvalues,
)
from .scan_test import ScanConfig, calibrate_alpha_scan, martingale_check, scan_statistic, scan_test
from .sim_harness import (
    MethodSpec,
    PowerTable,
    ScenarioConfig,
    equicorr_fwer_experiment,
    generate_statistics,
    preset_mu,
    run_power_study,
    run_qualint_power_study,
    run_rejection_count_study,
)

__version__ = "0.1.0"
