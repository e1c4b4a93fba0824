pub mod arith;
pub mod exact;
pub mod field;
pub mod harness;
pub mod ideals;
pub mod kloosterman;
pub mod moments;
pub mod optimize;
pub mod petersson;
pub mod special;
