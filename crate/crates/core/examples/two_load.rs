use hybrid_lfc::{output::format_summary, run_simulation, Scenario};

fn main() {
    let result = run_simulation(&Scenario::default()).expect("simulation");
    print!("{}", format_summary(&result.summary));
}
