//! Acceptance checks for `mcvd-core`; see `tests/acceptance.rs`.
