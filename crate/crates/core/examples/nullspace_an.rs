//! The two nullspace designs on one realization: NBS-AN keeps its rate while
//! the backscatter factor α varies, NSI-AN while the self-interference
//! factor β varies.

use backscatter_secrecy::model::{Instance, SystemParams};
use backscatter_secrecy::montecarlo::{generate_channels, GeometryParams};
use backscatter_secrecy::nullspace::{solve_srm_nullspace, NullspaceKind};
use backscatter_secrecy::solver::SolverConfig;

fn main() -> backscatter_secrecy::Result<()> {
    let base = SystemParams::default();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let channels = generate_channels(&base, &GeometryParams::default(), seed, 0);
    let inst = Instance::new(channels, base.clone())?;
    let cfg = SolverConfig::default();
    let rate = |params: SystemParams, kind| -> backscatter_secrecy::Result<f64> {
        Ok(solve_srm_nullspace(&inst.with_params(params)?, kind, &cfg)?.report.secrecy_rate())
    };

    println!("beta = {}:", base.beta);
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let nbs = rate(SystemParams { alpha, ..base.clone() }, NullspaceKind::NoBackscatter)?;
        let nsi = rate(SystemParams { alpha, ..base.clone() }, NullspaceKind::NoSelfInterference)?;
        println!("  alpha {alpha:.2}: nbs_an {nbs:.6}  nsi_an {nsi:.6}");
    }
    println!("alpha = {}:", base.alpha);
    for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let nbs = rate(SystemParams { beta, ..base.clone() }, NullspaceKind::NoBackscatter)?;
        let nsi = rate(SystemParams { beta, ..base.clone() }, NullspaceKind::NoSelfInterference)?;
        println!("  beta  {beta:.2}: nbs_an {nbs:.6}  nsi_an {nsi:.6}");
    }
    Ok(())
}
