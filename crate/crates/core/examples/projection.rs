//! Euclidean projection onto {P_s ≥ 0, Λ ⪰ 0, P_s + Tr Λ ≤ P} and the
//! water level behind it.

use backscatter_secrecy::linalg::{CMat, C64};
use backscatter_secrecy::solver::{project_feasible, waterfill_level};

fn main() -> backscatter_secrecy::Result<()> {
    let c = |re, im| C64::new(re, im);
    // Indefinite target with a negative carrier power.
    let target = CMat::from_row_slice(2, 2, &[c(0.9, 0.0), c(0.4, -0.3), c(0.4, 0.3), c(-0.2, 0.0)]);
    let x = project_feasible(1.0, -0.1, &target)?;
    println!("P_s = {:.6}", x.p_cw);
    println!("Λ =\n{:.6}", x.an_cov);
    println!("budget used: {:.6}", x.p_cw + x.an_power());

    let values = [1.5, 0.7, 0.2, -0.4];
    for budget in [0.5, 1.0, 3.0] {
        println!("level for budget {budget}: {:.6}", waterfill_level(&values, budget));
    }
    Ok(())
}
