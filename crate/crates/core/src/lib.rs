pub mod error;
pub mod geom;
pub mod img;
pub mod regions;
