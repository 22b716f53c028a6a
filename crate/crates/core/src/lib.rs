pub mod field;
pub mod poly;
pub mod curve;
pub mod structure;
pub mod fm;
pub mod census;
