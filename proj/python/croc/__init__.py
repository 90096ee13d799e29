"""Risk-prediction toolkit for case-control genotype data.

Likelihood-ratio ROC scoring with greedy forward selection over common
variants (FROC) and multistage collapsing of rare variants into
pseudo-common indicators (CROC), plus a cohort simulator.
"""

from croc._core import (
    Cohort,
    CvPoint,
    DataError,
    FitConfig,
    IndividualRecord,
    LocusMismatchError,
    LocusRef,
    LrEntry,
    LrTable,
    ParseError,
    PredictionModel,
    PseudoVariant,
    RocCurve,
    SimSpec,
    SimulationError,
    UsageError,
    VariantClass,
    VariantMeta,
    __version__,
    auc,
    auc_oracle,
    classify_variants,
    cross_validate_path,
    drop_common_variants,
    estimate_lr_table,
    evaluate_model,
    fit_croc,
    fit_froc,
    forward_select,
    load_cohort,
    load_model,
    load_sim_spec,
    multistage_collapse,
    roc_points,
    run_cli,
    save_cohort,
    save_model,
    save_sim_spec,
    score_individuals,
    select_variants,
    simulate_cohort,
    simulate_replicates,
    write_roc_tsv,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
