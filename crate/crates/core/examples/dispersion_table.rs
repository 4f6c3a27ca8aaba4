//! A user-supplied permittivity table, looked up between and beyond its rows,
//! and a stack that evaluates each photon at its own wavelength.

use thinfilm_spdc::config::{validate, RunConfig, ScanType};
use thinfilm_spdc::optics::material::DispersionTable;

const TABLE: &str = "\
# wavelength_m  eps_re  eps_im
4.0e-7   2.20
8.0e-7   2.12
1.6e-6   2.08
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = DispersionTable::parse(TABLE)?;
    for lambda in [3.0e-7, 5.0e-7, 1.0e-6, 2.0e-6] {
        let l = table.eval(lambda);
        println!(
            "{:6.0} nm: eps = {:.4}{}",
            lambda * 1e9,
            l.medium.epsilon.re,
            if l.extrapolated { " (extrapolated)" } else { "" }
        );
    }

    let dir = std::env::temp_dir().join("thinfilm-spdc-dispersion-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("glass.txt");
    std::fs::write(&path, TABLE)?;
    let text = format!(
        "[materials]\nglass = {:?}\n[stack]\nsubstrate = \"glass\"\ndispersion = \"table\"\n[source]\nratio = 1.5\n",
        path.to_string_lossy()
    );
    let cfg = validate(&RunConfig::parse(&text)?, Some(ScanType::Rate))?;
    let (stack, extrapolated) = cfg.stack_for_ratio(1.5)?;
    println!("substrate signal eps = {:.4}", stack.medium3.signal.epsilon.re);
    println!("substrate idler  eps = {:.4}", stack.medium3.idler.epsilon.re);
    println!("extrapolated layers: {extrapolated:?}");
    Ok(())
}
