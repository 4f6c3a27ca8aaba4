//! Driving a scan from a TOML configuration without the binary: validate,
//! compute on the current thread pool, inspect the table.

use thinfilm_spdc::cli::compute;
use thinfilm_spdc::config::{validate, RunConfig};

const CONFIG: &str = r#"
[stack]
thickness_m = 5.0e-9

[scan]
type = "theta-map"
phi_s_deg = 0.0
axes.theta_s_deg = { start = 10.0, stop = 80.0, count = 8 }
axes.theta_i_deg = { start = 10.0, stop = 80.0, count = 8 }
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = validate(&RunConfig::parse(CONFIG)?, None)?;
    let outcome = compute(&cfg)?;
    println!("{}", outcome.grid.header.join(", "));
    let top = outcome.grid.column("rate").unwrap().into_iter().fold(0.0, f64::max);
    for row in outcome.grid.rows.iter().filter(|r| r[0] == r[1]) {
        println!("theta_s = theta_i = {:4.1} deg: {:.3}", row[0], row[2] / top);
    }
    println!("summary: {}", outcome.summary);
    Ok(())
}
