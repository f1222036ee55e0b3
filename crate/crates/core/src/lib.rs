pub mod clock_shift;
pub mod matrix;
pub mod params;
pub mod weyl;
