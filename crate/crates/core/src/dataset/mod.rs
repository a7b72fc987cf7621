//! Loading, validating, discretizing, splitting, and synthesizing labeled
//! records.

mod discretize;
mod fcm;
mod ned;
mod record;
mod split;
mod synthetic;

pub use discretize::{discretize, Discretizer, Item, Transaction, TransactionDb, VariableModel};
pub use fcm::{
    fit_fcm, fit_fcm_traced, FcmModel, FcmTrace, DEFAULT_FUZZIFIER, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use ned::{fit_ned, NedModel};
pub use record::{load_csv, write_csv, RawRecord, CSV_HEADER, NUM_VARIABLES, VARIABLE_NAMES};
pub use split::stratified_split;
pub use synthetic::generate_synthetic;
