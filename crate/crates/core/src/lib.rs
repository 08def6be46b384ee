pub mod attacks;
pub mod bfv;
pub mod encoders;
pub mod lab;
pub mod psi;
pub mod ring;
