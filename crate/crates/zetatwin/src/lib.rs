//! Files, certificates and the command line on top of `zetatwin-core`.

pub mod cert_json;
pub mod cli;
pub mod units_file;
