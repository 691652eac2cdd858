//! Decoding of concatenated `[[n, 1]]` stabilizer codes on memoryless Pauli
//! channels.
//!
//! Two decoders are provided:
//!
//! - [`blockwise`]: the layer-by-layer hard decoder, which corrects every
//!   block independently with a fixed maximum-likelihood lookup table and
//!   passes only its hard decision upward;
//! - [`bp`]: exact maximum-likelihood decoding by upward sum-product message
//!   passing on the concatenation tree. Each block combines the posteriors of
//!   its children with its own syndrome into a posterior over its logical
//!   class, which becomes the effective channel seen by the next layer.
//!
//! [`montecarlo`] runs seeded, paired Monte Carlo comparisons of the two on a
//! depolarizing channel, and [`oracle`] holds brute-force enumerations used to
//! check the decoders on small instances.
//!
//! All computation happens at the Pauli-frame level: errors are phaseless
//! Pauli operators ([`pauli`]) and codes are described by their generators,
//! logical representatives and pure errors ([`code`]).

pub mod blockwise;
pub mod bp;
pub mod code;
pub mod concat;
pub mod error;
pub mod format;
pub mod montecarlo;
pub mod oracle;
pub mod pauli;

pub use code::{LogicalClass, LogicalDistribution, StabilizerCode, Syndrome};
pub use concat::{ConcatenatedCode, SyndromeSet};
pub use error::{Error, Result};
pub use pauli::{Pauli, PauliOperator};
