//! File formats: FCIDUMP integrals, run configuration, result records and the repository layout.

pub mod config;
pub mod fcidump;
pub mod manifest;
pub mod records;

pub use fcidump::{fcidump_to_string, parse_fcidump, parse_fcidump_str, write_fcidump};
pub use manifest::{parse_manifest_str, read_manifest, Geometry};
pub use config::{parse_config_str, read_config, FirstQuantConfig, RunConfig};
pub use records::{
    first_quant_records, read_repository, reference_records, scan_records, write_repository, Category, FirstQuantRecord, Payload, ResultRecord, VqeRecord,
    SCHEMA_VERSION,
};
