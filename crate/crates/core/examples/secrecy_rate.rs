//! Rates of one random channel realization for a few hand-picked operating
//! points: all power on the carrier, and an even split with isotropic AN.

use backscatter_secrecy::linalg::CMat;
use backscatter_secrecy::model::{Instance, Solution, SystemParams};
use backscatter_secrecy::montecarlo::{generate_channels, GeometryParams};

fn main() -> backscatter_secrecy::Result<()> {
    let params = SystemParams::default();
    let channels = generate_channels(&params, &GeometryParams::default(), 1, 0);
    let inst = Instance::new(channels, params.clone())?;
    let m = inst.m();
    let p = params.total_power;

    let points = [
        ("carrier only", Solution::no_an(p, m)),
        (
            "half AN, isotropic",
            Solution {
                p_cw: p / 2.0,
                an_cov: CMat::identity(m, m).scale(p / (2.0 * m as f64)),
            },
        ),
    ];
    println!("{:<20} {:>10} {:>10} {:>10}", "operating point", "C_r", "C_e", "C_s");
    for (name, s) in &points {
        let r = inst.rates(s)?;
        println!("{name:<20} {:>10.4} {:>10.4} {:>10.4}", r.reader, r.eve, r.secrecy());
    }
    Ok(())
}
