//! Runs every acceptance criterion at its pinned tolerance and prints one
//! line per criterion. Exits non-zero if any criterion fails.

use torsion_core::suite::run_all;
use torsion_core::Exec;

fn main() {
    let exec = if Exec::parallel_available() { Exec::Parallel } else { Exec::Sequential };
    let outcomes = run_all(exec, 42);
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{status}] {}: {} ({:.2}s of {:.0}s)",
            o.id, o.title, o.summary, o.elapsed_s, o.budget_s
        );
        if !o.passed {
            failed += 1;
            for c in o.report.failures().take(5) {
                println!("    {}: {} {}", c.name, c.residual.map(|r| format!("{r:.3e}")).unwrap_or_default(), c.detail);
            }
        }
        for (k, v) in &o.report.fitted {
            println!("    fitted {k} = {v:.6e}");
        }
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
