//! General AN design on one realization: the outer trace of the
//! projected-gradient solver and the final power split.

use backscatter_secrecy::model::{Instance, SystemParams};
use backscatter_secrecy::montecarlo::{generate_channels, GeometryParams};
use backscatter_secrecy::schemes::solve_general;
use backscatter_secrecy::solver::SolverConfig;

fn main() -> backscatter_secrecy::Result<()> {
    let params = SystemParams::default();
    let channels = generate_channels(&params, &GeometryParams::default(), 3, 0);
    let inst = Instance::new(channels, params.clone())?;
    let out = solve_general(&inst, &SolverConfig::default())?;
    let rep = &out.report;

    println!("best start: {}", out.warm_start);
    println!("{:>5} {:>7} {:>12}", "outer", "inner", "C_s (bps/Hz)");
    for it in &rep.iterates {
        println!("{:>5} {:>7} {:>12.6}", it.outer, it.inner_iterations, it.secrecy_rate);
    }
    println!("termination: {:?}", rep.termination);
    println!(
        "P_s = {:.3e} W, Tr(AN) = {:.3e} W of {:.3e} W",
        rep.solution.p_cw,
        rep.solution.an_power(),
        params.total_power
    );
    Ok(())
}
