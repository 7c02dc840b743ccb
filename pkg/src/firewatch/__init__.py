"""Fire-outbreak detection pipeline.

Capture framed sensor telemetry (temperature, smoke, flame), persist
labeled datasets, train an RBF-kernel support vector machine on the dual
problem, and evaluate with confusion-matrix metrics and ROC analysis.
"""

from .dataset import (
    DEFAULT_LABEL_RULE,
    DEFAULT_RANGES,
    FEATURE_NAMES,
    AndrewsCurve,
    Dataset,
    GeneratorParams,
    LabeledSample,
    LabelRule,
    SplitSpec,
    andrews_curves,
    correlation_matrix,
    dataset_from_rows,
    default_label_rule,
    generate_synthetic,
    lag_plot_data,
    load_dataset,
    load_sample_dataset,
    sample_dataset_path,
    save_dataset,
    split,
)
from .errors import (
    ArityError,
    ConfigError,
    FirewatchError,
    FrameError,
    InvalidInputError,
    NumericError,
    ParseError,
    SchemaError,
    TrainingError,
    TransportError,
)
from .ingest import (
    DeviceSimulator,
    IngestionSummary,
    ReceptorConfig,
    SimulatorScenario,
    poll_once,
    run_receptor,
)
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    RocCurve,
    confusion,
    metrics,
    render_metrics,
    roc,
    roc_to_json,
)
from .svm import (
    DEFAULT_GAMMA,
    FeatureScaler,
    KernelConfig,
    SvmModel,
    TrainConfig,
    decision_value,
    decision_values,
    dual_objective,
    kernel_matrix,
    load_model,
    predict,
    predict_many,
    rbf_kernel,
    save_model,
    train,
)
from .wire import SensorReading, format_reading, parse_reading

__version__ = "0.1.0"
