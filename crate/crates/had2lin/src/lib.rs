pub mod affine;
pub mod boolfn;
mod gf2;

pub type Rational = num_rational::BigRational;
pub mod flow;
pub mod gadget;
pub mod scalar;
pub mod simplex;
pub mod soundness;
