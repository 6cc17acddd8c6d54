pub mod bounds;
pub mod cli;
pub mod exterior_algebra;
pub mod numerics;
pub mod planar_verifier;
pub mod poly;
pub mod poly_forms;
pub mod star_domain;
