//! Programmatic sweep through the same runner the command line uses.

use cobosim::cli::{run, Format, Param, RunConfig, Scenario};

pub fn main() {
    let config = RunConfig {
        scenario: Some(Scenario::BunchNonlocal),
        d: Some(Param::Text("2..4".into())),
        spectrum: Some(Param::Text("random:3:2".into())),
        format: Some(Format::Csv),
        ..Default::default()
    };
    let report = run(config).unwrap();
    print!("{}", report.render().unwrap());
    println!("failed checks: {}", report.failures());
}
