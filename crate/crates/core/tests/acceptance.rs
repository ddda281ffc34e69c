use std::process::ExitCode;
use std::time::{Duration, Instant};

use spin7lab::cli::{self, RunConfig, Section};

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Duration,
    run: fn(&RunConfig) -> spin7lab::Result<Section>,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, title: "eigenstructure of *(.^Phi0)", budget: Duration::from_secs(1), run: cli::eigenstructure },
    Criterion { id: 2, title: "model forms equal Phi0", budget: Duration::from_secs(1), run: cli::model_forms },
    Criterion { id: 3, title: "pullback instanton", budget: Duration::from_secs(10), run: cli::pullback },
    Criterion { id: 4, title: "deformation complex", budget: Duration::from_secs(120), run: cli::deformation },
    Criterion { id: 5, title: "pregluing error rate", budget: Duration::from_secs(300), run: cli::error_rate },
    Criterion { id: 6, title: "Weitzenboeck identity", budget: Duration::from_secs(120), run: cli::weitzenboeck },
    Criterion { id: 7, title: "fixed point", budget: Duration::from_secs(300), run: cli::fixed_point },
    Criterion { id: 8, title: "index arithmetic", budget: Duration::from_secs(1), run: cli::index_arithmetic },
    Criterion { id: 9, title: "norm properties", budget: Duration::from_secs(60), run: cli::norm_properties },
];

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let mut failures = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let result = (c.run)(&cfg);
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let (pass, detail) = match &result {
            Ok(s) => {
                let detail: Vec<String> = s
                    .checks
                    .iter()
                    .map(|k| format!("{}{}={:.4e} ({})", if k.pass { "" } else { "!" }, k.name, k.value, k.describe_bound()))
                    .collect();
                (s.pass(), detail.join("; "))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let ok = pass && in_time;
        failures += usize::from(!ok);
        println!(
            "criterion {} {:<30} {}  {:.2?}/{:?}{}  {}",
            c.id,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            c.budget,
            if in_time { "" } else { " over budget" },
            detail
        );
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
