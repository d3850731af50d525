pub mod cache;
pub mod optimize;
pub mod prob;
pub mod reproduce;
pub mod state;
