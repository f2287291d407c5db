pub mod analytic;
pub mod model;
pub mod numerics;
pub mod simulator;
