pub mod asymptotics;
pub mod check;
pub mod cli;
pub mod field;
pub mod numerics;
pub mod spectrum;
