//! Classical bounds, quantum values and optimality certificates for
//! contextuality and nonlocality games.
//!
//! | module       | contents                                                    |
//! |--------------|-------------------------------------------------------------|
//! | [`numkit`]   | dense complex linear algebra, Hermitian eigen-solves        |
//! | [`scenario`] | measurement scenarios, correlation tables, joint-distribution feasibility |
//! | [`classical`]| noncontextual / local / preparation-noncontextual bounds    |
//! | [`quantum`]  | explicit quantum realizations and SOS certificates          |
//! | [`povm`]     | noisy spin observables and joint measurability              |
//! | [`signet`]   | frustration in signed and implication networks              |
//! | [`games`]    | seeded Monte Carlo play of the prediction games             |

pub mod classical;
pub mod error;
pub mod games;
pub mod numkit;
pub mod povm;
pub mod quantum;
pub mod scenario;
pub mod signet;

pub use error::{Error, Result};
