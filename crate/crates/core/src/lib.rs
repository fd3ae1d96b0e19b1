pub mod catalog;
pub mod exact;
pub mod fusion;
pub mod generator;
pub mod graph;
pub mod numeric;
pub mod scheme;
pub mod spectra;
pub mod srg;
