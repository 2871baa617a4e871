#![no_main]

use dde_lab::{parse, Command};
use libfuzzer_sys::fuzz_target;

// One argument per line; parsing and parameter resolution must never panic.
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let argv = std::iter::once("dde-lab").chain(text.lines());
    let Ok(cli) = parse(argv) else { return };
    match &cli.command {
        Command::Scalar(a) => {
            let _ = a.problem.problem();
            let _ = a.config().steps();
        }
        Command::Convergence(a) => {
            let _ = a.problem.problem();
        }
        Command::GrowthFit(a) => {
            let _ = a.problem.problem();
        }
        Command::Pde(a) => {
            let _ = a.problem().validate();
            let _ = a.config();
        }
        _ => {}
    }
});
