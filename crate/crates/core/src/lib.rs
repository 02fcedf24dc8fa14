pub mod abelian;
pub mod characterize;
pub mod families;
pub mod graphcore;
pub mod labeling;
pub mod solver;
pub mod workbench;
