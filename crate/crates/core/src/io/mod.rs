//! Serialized forms of curves and traces: JSON documents, CSV tables and
//! SVG plots.

mod csv;
mod document;
mod svg;

pub use csv::{write_diffusion_csv, write_knots_csv, write_oracle_csv, write_points_csv};
pub use document::{CurveDocument, DiffusionDocument, KnotRecord, Metadata, SCHEMA_VERSION};
pub use svg::render_svg;
