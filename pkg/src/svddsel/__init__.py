"""One-class anomaly detection with a minimum-enclosing-ball classifier and
automatic Gaussian kernel bandwidth selection."""

from .dataset import (
    BoundingBox,
    Dataset,
    LabeledDataset,
    bounding_box,
    gen_gaussian_mixture,
    gen_uniform,
    load_csv,
    load_multiclass_csv,
    make_one_class_task,
    save_csv,
)
from .kernel import GramMatrix, cross_kernel, gauss_kernel, gram_matrix
from .risk import (
    RiskKind,
    risk_empirical,
    risk_kernel,
    risk_polarization,
    risk_smote,
    risk_sv,
    validation_error,
)
from .sampling import (
    AnomalySampler,
    SmoteConfig,
    default_anomaly_sampler,
    mc_anomaly_acceptance,
    smote_oversample,
    smote_sample,
)
from .select import (
    GammaGrid,
    PlateauSpec,
    RiskCurve,
    SelectionRule,
    default_plateau_spec,
    find_plateau,
    select_gamma,
    sweep_risk_curve,
    sweep_validation_error,
)
from .svdd import (
    SolverError,
    SvddConfig,
    SvddModel,
    decision_value,
    decision_values,
    fit,
    load_model,
    model_stats,
    predict,
    predict_many,
    save_model,
)
from .bench import (
    BenchmarkReport,
    DolanMoreCurve,
    MethodSpec,
    QualityTable,
    dolan_more_curves,
    quality_from_error,
    run_benchmark,
)

__version__ = "0.1.0"
