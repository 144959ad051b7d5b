//! Dephasing of a two-qubit GHZ state against a single thermal mode.

use dephase::channel::apply_map;
use dephase::{BathSpec, CouplingSpec, DensityMatrix, SystemSpec};

fn main() -> dephase::Result<()> {
    let spec = SystemSpec::new(
        2,
        CouplingSpec::linear(vec![vec![0.4, -0.25]])?, // one mode, two qubits
        BathSpec::thermal(vec![1.3], 0.8)?,            // ω = 1.3, T = 0.8
    )?;
    let rho = apply_map(&spec, &DensityMatrix::ghz(2)?, 2.5)?;
    println!("|rho_03|(2.5) = {:.6}", rho.matrix()[(0, 3)].norm());
    Ok(())
}
