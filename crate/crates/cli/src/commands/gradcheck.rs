use anyhow::Result;
use gatetrain_core::gradcheck::{check_gradients, random_cases};

use crate::args::GradcheckArgs;
use crate::output::{fmt_f64, fmt_list, write_table};
use crate::runner::ensure_dir;
use crate::NumericFailure;

pub fn run(a: &GradcheckArgs) -> Result<()> {
    let cases = random_cases(a.seed, a.nets, a.max_params)?;
    let mut rows = Vec::new();
    let mut failures = 0;
    for (k, case) in cases.iter().enumerate() {
        let report = check_gradients(&case.mlp, &case.input, case.label, a.step)?;
        let pass = report.passes(a.tolerance);
        failures += usize::from(!pass);
        let worst = report.worst.map_or_else(String::new, |p| match p.input {
            Some(i) => format!("layer{}.w[{},{}]", p.layer, p.output, i),
            None => format!("layer{}.b[{}]", p.layer, p.output),
        });
        println!(
            "net {k:2} {:>12}: {:3} params, max rel error {:.3e} ({worst}) {}",
            fmt_list(case.mlp.layer_sizes()),
            report.n_params,
            report.max_rel_error,
            if pass { "ok" } else { "FAIL" }
        );
        rows.push(vec![
            k.to_string(),
            fmt_list(case.mlp.layer_sizes()),
            report.n_params.to_string(),
            fmt_f64(report.max_rel_error),
            worst,
            u8::from(pass).to_string(),
        ]);
    }
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        write_table(
            &out.join("gradcheck.csv"),
            &["net", "layer_sizes", "n_params", "max_rel_error", "worst_param", "pass"],
            &rows,
        )?;
    }
    if failures > 0 {
        return Err(NumericFailure(format!(
            "{failures} of {} networks exceed relative error {:e}",
            cases.len(),
            a.tolerance
        ))
        .into());
    }
    println!("all {} networks within relative error {:e}", cases.len(), a.tolerance);
    Ok(())
}
