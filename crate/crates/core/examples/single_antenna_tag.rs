//! Single-antenna tag: the global optimum against the nullspace variant over
//! a handful of realizations.

use backscatter_secrecy::model::{Instance, SystemParams};
use backscatter_secrecy::montecarlo::{generate_channels, GeometryParams};
use backscatter_secrecy::single_tag::{solve_single, solve_single_nullspace, SingleTagInstance};

fn main() -> backscatter_secrecy::Result<()> {
    let params = SystemParams {
        l_tag: 1,
        beta: 0.0,
        ..SystemParams::default()
    };
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "trial", "optimal", "nullspace", "t*", "P_s/P");
    for trial in 0..8 {
        let channels = generate_channels(&params, &GeometryParams::default(), 11, trial);
        let st = SingleTagInstance::from_instance(&Instance::new(channels, params.clone())?)?;
        let best = solve_single(&st, 2001)?;
        let null = solve_single_nullspace(&st)?;
        println!(
            "{trial:>5} {:>10.6} {:>10.6} {:>10.2e} {:>10.4}",
            best.secrecy_rate,
            null.secrecy_rate,
            best.t_star,
            best.solution.p_cw / params.total_power
        );
    }
    Ok(())
}
