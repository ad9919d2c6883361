//! Debye–Hückel screening of the loop gas: the screened potential of one
//! slab or two coupled slabs at fixed in-plane wavenumber, sum rules, the
//! factorized large-separation form, leading Ursell pieces and bonds.

mod bonds;
mod density;
mod factorize;
mod geometry;
mod green;
mod multipole;
mod nystrom;
mod sumrule;
mod ursell;

pub use bonds::{build_f_bond, build_fr_bond, f_bond, fr_bond, BondTable, EXPONENT_CLAMP};
pub use density::{
    build_cells, sub_seed, Cell, ChiSampling, DensityProfile, ProfileFn, ScreeningField, SlabComposition,
    SpeciesDensity,
};
pub use factorize::{factorized_phi_ab, traversing_factor, traversing_series, CoupledOperator, CoupledSolution, Side};
pub use geometry::{HierarchyFlags, LengthScales, PanelGrid, SlabGeometry};
pub use green::LayeredMedium;
pub use multipole::{bulk_disc_limit, disc_integral, multipole_integrability_check, MultipoleReport, Shift};
pub use nystrom::{KernelMatrix, SlabOperator, SourceSolution};
pub use sumrule::{
    bulk_phi, bulk_sum_rule, check_perfect_screening, face_bracket, induced_charge, induced_charge_of, induced_charge_weights,
    probe_charge, KSequence, SumRuleReport,
};
pub use ursell::{coupled_face_h, coupled_face_phi, leading_ursell, plate_leading, PlateLeading, UrsellLeading};
