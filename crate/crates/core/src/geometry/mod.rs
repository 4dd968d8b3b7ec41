//! Whitney cubes, parametrized curves, distances, moduli of continuity and
//! Dini-smoothness verdicts.

mod curve;
mod modulus;
mod whitney;

pub use curve::{CurveDomain, ParametrizedCurve};
pub use modulus::{
    dini_verdict, distance_to_curve, dyadic_modulus_samples, dyadic_modulus_samples_with, modulus_of_continuity,
    modulus_of_continuity_with, modulus_sweep, modulus_sweep_with, tangent_continuity_check,
};
pub use whitney::{
    cube_containing, whitney_annulus, whitney_decompose, write_cubes_csv, AnnularSector, HalfPlane, WhitneyCube,
    MAX_GENERATION,
};
