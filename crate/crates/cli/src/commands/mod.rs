pub mod avgcheck;
pub mod bounds;
pub mod gridworld;
pub mod simulate;
pub mod sweep;
