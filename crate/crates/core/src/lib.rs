pub mod dynamics3;
pub mod dynamics4;
pub mod effects;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod oracle;
pub mod states;
pub mod verify;
