//! Concentration-dependent power-law stress and its structural properties.

mod index;
mod properties;
mod stress;

pub use index::{ExponentProfile, ExponentSlope, PowerLawIndex};
pub use properties::{
    check_properties, check_properties_in, monotonicity_product, random_symmetric, PropertyReport,
    SamplingRange, Witness,
};
pub use stress::{operator_norm, quadratic_form, ConcentrationSensitivity, StressModel};
