//! MNIST ingestion and an instrumented 784-800-10 ReLU network trained by SGD.

pub mod idx;
pub mod model;
pub mod report;
pub mod train;

pub use idx::{load_mnist_idx, parse_idx_images, parse_idx_labels, MnistDataset, MnistPaths, Split};
pub use model::{softmax_cross_entropy, xavier_init, Batch, FnnModel, ForwardCache, MNIST_CLASSES, MNIST_HIDDEN, MNIST_INPUT};
pub use train::{
    angle_profile_snapshot, instrument, instrument_with_angles, run_training, sample_gradient_statistics, sgd_epoch,
    EpochMetrics, FnnOracle, MetricsRecord, TrainConfig, TrainOutcome, METRICS_HEADER,
};
pub use report::{correlation_report, read_metrics_csv, CorrelationReport, MIN_REPORT_ROWS};
