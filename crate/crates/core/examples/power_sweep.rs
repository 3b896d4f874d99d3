//! Mean secrecy rate of every multi-antenna scheme against the total power,
//! written as CSV to standard output.

use backscatter_secrecy::montecarlo::{run_sweep, SweepSpec, SweepVariable};

fn main() -> backscatter_secrecy::Result<()> {
    let spec = SweepSpec {
        swept: SweepVariable::TotalPowerDbm,
        values: vec![0.0, 5.0, 10.0, 15.0, 20.0],
        trials: 50,
        seed: 2024,
        ..SweepSpec::default()
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result = run_sweep(&spec, threads)?;
    result.write_csv(std::io::stdout().lock())?;
    eprintln!("config hash {}", result.config_hash);
    Ok(())
}
