//! Rating-stream ingestion: format parsers, graph construction and binary
//! snapshots.

mod build;
mod parse;
mod snapshot;

pub use build::build_graph;
pub use parse::{
    parse_generic_csv, parse_konect, parse_movielens, ColumnMap, ParseMode, ParseOptions,
    ParseOutcome, RatingEvent,
};
pub use snapshot::{load_snapshot, save_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
