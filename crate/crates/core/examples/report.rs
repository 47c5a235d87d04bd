//! Runs the dlp and maximal suites programmatically, writes the report files
//! and prints one curve as CSV.

use layerpot::cli::{emit_plot_data, run_suite, summary_text, write_outputs, RunConfig, Suite};

fn main() -> layerpot::Result<()> {
    let out = std::env::temp_dir().join("layerpot-example-report");
    for suite in [Suite::Dlp, Suite::Maximal] {
        let cfg = RunConfig { boundary: "ellipse:a=2,b=1".into(), suite, level: 2, out: out.join(suite.name()), ..Default::default() };
        let report = run_suite(&cfg)?;
        write_outputs(&report, &cfg.out)?;
        print!("{}", summary_text(&report));
        println!();
    }
    print!("{}", emit_plot_data(&out.join("maximal").join("report.json"), "maximal/curve")?);
    Ok(())
}
