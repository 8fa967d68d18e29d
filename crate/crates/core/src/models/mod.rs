pub mod baseline;
pub mod bter;
pub mod egbter;
pub mod gbter;
