//! Local Taylor-series collocation for advection–diffusion and Burgers
//! equations on rectangular domains.
//!
//! Time is discretised by Chebyshev–Gauss–Lobatto collocation over the
//! whole interval, which turns the parabolic equation into a coupled system
//! of steady problems, one per collocation time. In space each element
//! carries a truncated Taylor expansion about its centre whose higher
//! coefficients follow from the equation itself; neighbouring expansions
//! are tied together by value and derivative matching on interface points,
//! and the resulting overdetermined system is solved in the least-squares
//! sense.
//!
//! ```no_run
//! use localtaylor_core::{problems, solve, SampleOptions, SolveConfig};
//!
//! let config = SolveConfig::new(problems::problem1(), 2, 10, 15, 14, 0.5);
//! let solution = solve(&config).unwrap();
//! let report = solution.report(&SampleOptions::default());
//! println!("{} {:.3e}", report.dof.label(), report.e_inf);
//! ```

pub mod assembly;
pub mod cheb_time;
mod error;
pub mod lstsq;
pub mod mesh;
pub mod pde;
pub mod problems;
pub mod simplex;
pub mod solver;
pub mod taylor2d;
pub mod taylor3d;

pub use assembly::{
    build_system_2d, build_system_3d, expected_rows, picard_burgers_2d, AssemblyOptions, Condition, GlobalSystem,
    PicardOptions, PicardOutcome, RowRecord, RowSource,
};
pub use cheb_time::{collocation_points, differentiation_matrix, reduce_with_initial, TimeDiscretization, TimeOperator};
pub use error::{Axis, Error, Result};
pub use lstsq::{solve_least_squares, LeastSquaresSolution};
pub use mesh::{continuity_points, BoundaryMode, Face, Mesh, SchemeParams};
pub use pde::PdeCoefficients;
pub use problems::{error_report, Dof, ErrorReport, ErrorSample, ProblemSpec, SampleOptions, SpaceTimeField, TimeSlice};
pub use simplex::Derivative;
pub use solver::{solve, Solution, SolveConfig, SystemStats, Tables};
pub use taylor2d::{
    complete_table_2d, evaluate_2d, source_transforms_2d, Element2D, TransformTable2D, UnknownLayout2D,
};
pub use taylor3d::{
    complete_table_3d, evaluate_3d, source_transforms_3d, Element3D, TransformTable3D, UnknownLayout3D,
};
