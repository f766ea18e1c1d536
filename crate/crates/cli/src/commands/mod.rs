pub mod effective;
pub mod ensemble;
pub mod scaling;
pub mod spectrum;
pub mod validate;
