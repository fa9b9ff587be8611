//! Exact enumeration of lozenge tilings of hexagons with a triad of bowtie
//! holes, together with the product formulas those counts satisfy.

pub mod counting;
pub mod error;
pub mod formulas;
pub mod lattice;
pub mod regions;
pub mod verify;

pub use counting::{count_tilings, count_tilings_oracle, has_tiling, kuo_check, CountConfig, KuoCheck};
pub use error::{Error, Result};
pub use formulas::{
    couples_closed_form, couples_geometric, family_formula, hyperfactorial, macmahon_p, main_ratio_rhs, p_prime,
    triad_weight, CoupleSet, Squeezed,
};
pub use lattice::{
    balanced, dual_graph, remove_forced, render_svg, side_distance, HexFrame, LatticePoint, Lozenge, Orientation,
    Region, SideLabel, UnitTriangle,
};
pub use num_bigint::BigUint;
pub use num_rational::BigRational;
pub use regions::{
    build_family, build_hexagon, build_triad_hexagon, Bowtie, BowtieSpec, Depths, Direction, FamilySpec, Move, Triad,
    TriadHexagon,
};
pub use verify::{
    bundled_plans, run_sweep, ResourceCaps, SweepPlan, SweepRun, SweepSummary, Verdict, VerificationReport,
};
