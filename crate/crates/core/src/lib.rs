pub mod analytics;
pub mod assemble;
pub mod bank;
pub mod cli;
pub mod export;
pub mod jqz;
pub mod model;
pub mod stats;
