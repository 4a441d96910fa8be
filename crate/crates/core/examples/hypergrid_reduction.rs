//! Lifts cube functions to the grid `[m]^n` and compares distances.

use monolab::func::BitTableFunction;
use monolab::hypergrid::{grid_table_distance, phi_even, phi_odd, GridTable, OddGadget};
use monolab::oracle::exact_distance;

fn main() -> monolab::Result<()> {
    let gadget = OddGadget::new(5, 2)?;
    println!("gadget m=5 k=2: {:?}", gadget.check());
    for (name, f) in [
        ("parity", BitTableFunction::parity(2)?),
        ("anti-dictator", BitTableFunction::anti_dictator(2, 0)?),
    ] {
        let cube = exact_distance(&f)?.distance;
        let even = grid_table_distance(&GridTable::from_function(&phi_even(&f, 4)?)?)?.distance;
        let odd_lift = phi_odd(&f, 3)?;
        let odd = grid_table_distance(&GridTable::from_function(&odd_lift)?)?.distance;
        println!(
            "{name:<14} cube {cube:>5}  [4]^2 {even:>5}  [3]^{} {odd:>5}",
            f.n() * odd_lift.gadget().k()
        );
    }
    Ok(())
}
