//! Configuration ingestion and report emission (placeholder).
