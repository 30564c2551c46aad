//! Protocol metrics: message variance, baselines, purity, topographic
//! similarity, disentanglement, cluster variance and accuracy.

pub mod accuracy;
pub mod baseline;
pub mod disentanglement;
pub mod purity;
pub mod topsim;
pub mod variance;

pub use accuracy::{discrimination_accuracy, discrimination_accuracy_exact, AccuracyReceiver, AccuracyReport};
pub use baseline::{random_baseline, random_baseline_exhaustive, BaselineReport};
pub use disentanglement::{disentanglement, DisentanglementKind};
pub use purity::{purity, PurityMode};
pub use topsim::{spearman, topsim};
pub use variance::{cluster_variance, message_variance};
