pub mod cli;
pub mod euler_lagrange;
pub mod expr;
pub mod forms;
pub mod jet;
pub mod noether;
pub mod symmetry;
pub mod verify;
