"""Counterfactual explanations for linear SVM models.

Python bindings over the C++ core: dataset/schema handling, SVM training,
the counterfactual explanation variants, percentile-shift cost functions,
and the mixed-integer solver they run on.
"""

from svmcf._core import (  # noqa: F401
    ClassPrototypes,
    ConfigError,
    Counterfactual,
    CovarianceModel,
    DataError,
    Dataset,
    EmpiricalDistribution,
    FeatureChange,
    FeatureSchema,
    InfeasibleError,
    LinearSVM,
    MixedIntegerProgram,
    ModelError,
    SolveError,
    SolveResult,
    SolveStatus,
    SolverStats,
    StabilityReport,
    Variant,
    brute_force_mip,
    categorical_changes,
    class_prototype,
    cost_f1,
    cost_f2,
    cost_f3,
    decision_value,
    explain,
    explain_correlated,
    explain_plausible,
    explain_sparse,
    explain_sparse_correlated,
    fit_prototypes,
    linear_attribution,
    load_dataset,
    load_dataset_text,
    load_model,
    nearest_support_vector,
    post_hoc_correlation,
    predict,
    save_model,
    solve_mip,
    solve_relaxation,
    stability_radius,
    support_vectors,
    train_svm,
    training_accuracy,
    verify_stability,
    __version__,
)
