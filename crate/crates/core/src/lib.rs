//! Hilbert metrics on convex bodies, certified Kobayashi distance bounds on
//! convex and tube domains, and Gromov hyperbolicity estimates.

pub mod convex;
pub mod error;
pub mod hilbert;
pub mod hyperbolicity;
pub mod kobayashi;
pub mod net;
pub mod rescaling;
pub mod tube;

pub use convex::{
    apply_affine, detect_boundary_segment, local_hausdorff, AffineMap, ConvexBody, Point,
    PointedBody,
};
pub use error::{Error, Result};
pub use hilbert::{geodesic_point, gromov_product, hilbert_distance, HilbertSpaceView};
pub use hyperbolicity::{delta_scaling_profile, four_point_alpha, Budget, HyperbolicityReport, MetricSample};
pub use kobayashi::{kobayashi_interval, model_distance, ComplexConvexDomain, DistInterval, ModelDomain};
pub use num_complex::Complex64;
pub use rescaling::{blowup_sequence, john_normalize, orbit_limit, BlowupSpec, Normalization};
pub use tube::{cube_tube_exact, hypothesis_dashboard, TubeDomain};
