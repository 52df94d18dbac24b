//! Coalescent point processes of samples from critical birth-death populations.
//!
//! A sample genealogy is represented by its coalescent point process: the
//! sequence of node depths `H*_1..H*_{n-1}` between consecutive sampled
//! individuals, optionally preceded by the time of origin `H*_0 = T_or`.
//! This crate provides
//!
//! * exact samplers and density evaluators for the genealogy under a fixed,
//!   infinite, or power-law-prior time of origin ([`sampler`]),
//! * an independent population-level rejection sampler used as a ground-truth
//!   oracle ([`forward`]),
//! * Poissonian mutation placement on the genealogy and closed-form expected
//!   site frequency spectra ([`mutation`]),
//! * simulation of the large-sample limit objects (Poisson and Cox point
//!   measures, inverse-gamma origin times) together with the statistical
//!   machinery that checks the limit theorems at desk scale ([`asymptotics`]),
//! * a one-shot verification suite wiring all of the above together
//!   ([`verify`]).
//!
//! All sampling is driven by explicitly seeded, splittable random streams
//! ([`rng`]); replicate loops run on a rayon pool when the default `parallel`
//! feature is enabled and fall back to sequential iteration otherwise, with
//! bit-identical results either way.

pub mod asymptotics;
pub mod forward;
pub mod model;
pub mod mutation;
pub mod numeric;
pub mod quad;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use model::{ExtendedReal, Genealogy, ModelParams, OriginCondition, SiteFrequencySpectrum};
