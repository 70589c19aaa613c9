//! Constructions and checks around the codegree Turán problem for complete
//! r-graphs: partial Steiner packings, their blowups, exact independence
//! numbers, random subsampling, closed-form bounds and small-n oracles.

pub mod blowup;
pub mod bounds;
pub mod experiment;
pub mod hypercore;
pub mod indep;
pub mod io;
pub mod sampling;
pub mod seed;
pub mod steiner;

/// Exact rationals; arithmetic that would overflow is reported as an error.
pub type Rational = num_rational::Ratio<i128>;

pub use blowup::{build_blowup, check_blowup_identities, plan_construction, witness_from_construction, BlowupSpec, TauWitness};
pub use bounds::{classical_bounds, fit_scaling, refined_c_values, t_ell_oracle, theorem1_envelope, BoundsReport, ConstantsLedger};
pub use hypercore::{binomial, Hypergraph, HypergraphError, Vertex, VertexSet};
pub use indep::{alpha_exact, alpha_exhaustive, alpha_greedy, is_independent, AlphaMethod, AlphaResult, AlphaStatus};
pub use io::{read_document, read_hypergraph, write_hypergraph, Document, ParseError};
pub use sampling::{subsample, SubsampleParams};
pub use steiner::{generate_steiner, steiner_quality, verify_steiner, SteinerSystem};
