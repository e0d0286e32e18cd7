//! Shared fixtures for the benchmarks.

use hyperell_core::characters::PrimeCharacters;
use hyperell_core::ensemble::Ensemble;
use hyperell_core::{Fq, IrreducibleTable};

/// Ensemble `H_n` over `F_q` with prime characters up to `deg`.
pub fn fixture(q: u64, n: usize, deg: usize) -> (Fq, Ensemble, PrimeCharacters) {
    let fq = Fq::new(q).expect("odd prime");
    let table = IrreducibleTable::build(fq, deg.max(1));
    let pc = PrimeCharacters::new(&table, deg.max(1)).expect("table covers deg");
    (fq, Ensemble::new(fq, n).expect("n >= 1"), pc)
}
