//! Loss evaluators, receivers, and synchronized agents for the five games.

pub mod eval;
pub mod loss;
pub mod receiver;
pub mod sync;

pub use eval::{
    eval_classification, eval_discrimination, eval_discrimination_with, eval_game, eval_global,
    eval_reconstruction, eval_supervised, EXACT_TERM_LIMIT,
};
pub use loss::{Evaluation, Loss, LossReport};
pub use receiver::{
    DenseDiscriminationTable, DiscriminationReceiver, GlobalReceiver, Receiver,
    ReconstructionReceiver,
};
pub use sync::{
    candidate_unaware_equivalence, message_losses, synchronized_receiver, synchronized_sender,
    CandidateUnawareReport,
};
