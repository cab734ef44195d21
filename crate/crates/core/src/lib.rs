pub mod bench;
pub mod cli;
pub mod curves;
pub mod error;
pub mod geocode;
pub mod metrics;
