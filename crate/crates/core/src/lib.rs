//! Persistence barcodes of point clouds through Vietoris-Rips filtrations,
//! and a persistent-entropy test that labels each barcode interval as a
//! topological feature or as noise.
//!
//! The pipeline is
//! [`pointcloud`] → [`filtration`] → [`persistence`] → [`entropy`], with
//! [`pipeline`] wiring the stages together for the command-line tool.

pub mod entropy;
pub mod error;
pub mod filtration;
pub mod persistence;
pub mod pipeline;
pub mod pointcloud;
pub mod union_find;
pub mod z2;

pub use entropy::{
    classify, lengths_from_barcode, max_entropy_substitution, persistent_entropy, render_report,
    tail_entropy, EntropyReport, LengthList, ReportFormat, ReportRow,
};
pub use error::{Error, ErrorClass, Result};
pub use filtration::{build_rips, FilteredComplex, RipsOptions, Simplex, Threshold};
pub use persistence::{
    apply_essential_cap, betti_numbers_at, compute_barcode, Barcode, BarcodeMeta, Interval,
};
pub use pointcloud::{
    diameter, distance_matrix, load_points, sample_circle, sample_torus, sample_torus_stratified, DistanceMatrix, TorusSampling,
    PointCloud, PointFormat,
};
