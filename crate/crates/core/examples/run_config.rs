// Layered configuration: defaults, then a key=value file, then flag
// overrides, and the header every output file starts with.

use pointcurv::config::RunConfig;
use pointcurv::Result;

const FILE: &str = "\
# benchmark settings
gamma = 0.95
kernel = epan
surfaces = torus:2:1,sphere:1
noise = 0,0.1
seeds = 1,2,3
";

pub fn run_example() -> Result<RunConfig> {
    let mut config = RunConfig::default();
    config.merge_str(FILE)?;
    // A flag given on the command line wins over the file.
    config.set("gamma", "0.97")?;
    config.validate()?;
    print!("{}", config.header("benchmark"));
    let reparsed = RunConfig::from_str_config(&config.to_config_string())?;
    assert_eq!(reparsed, config);
    Ok(config)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(drop)
}
