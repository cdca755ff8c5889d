#![no_std]

#[cfg(any(feature = "std", test))]
extern crate std;

extern crate alloc;

pub mod analysis;
pub mod detect;
pub mod error;
pub mod fading;
pub mod linalg;
pub mod link;
pub mod modem;
pub mod numerics;
pub mod rng;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
