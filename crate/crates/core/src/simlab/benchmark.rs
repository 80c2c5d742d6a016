use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use super::design::{generate_replication, SimDesign};
use super::methods::{fit_methods, Tuning};
use crate::error::{Error, Result};
use crate::model::{l1_loss, l2_loss, MethodTag};

/// The five methods in the order they are reported.
pub const BENCHMARK_METHODS: [MethodTag; 5] = [
    MethodTag::Ssls,
    MethodTag::AdaptiveElasticNet,
    MethodTag::Lasso,
    MethodTag::AdaptiveLasso,
    MethodTag::ElasticNet,
];

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
}

impl Summary {
    /// Summarizes in the given order so identical inputs give identical bits.
    pub fn of(values: &[f64]) -> Summary {
        let k = values.len();
        if k == 0 {
            return Summary {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        let se = if k > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, se }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub design: SimDesign,
    pub method: MethodTag,
    pub l1: Summary,
    pub l2: Summary,
    /// Fraction of replications with `Ŝ = S`.
    pub accuracy: Summary,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub replications: usize,
    pub methods: Vec<MethodTag>,
    pub rows: Vec<BenchmarkRow>,
    /// First error message of each failed replication, as `(design, rep, message)`.
    pub failures: Vec<(usize, usize, String)>,
}

struct RepOutcome {
    losses: Vec<(f64, f64, bool)>,
}

/// Runs `replications` draws of every design and fits every method on each.
///
/// Replication `r` of a design uses random stream `r` under the design seed,
/// so results are independent of scheduling and thread count.
pub fn run_benchmark(
    designs: &[SimDesign],
    methods: &[MethodTag],
    tuning: &Tuning,
    replications: usize,
) -> Result<BenchmarkReport> {
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    if methods.is_empty() {
        return Err(Error::invalid("at least one method is required"));
    }
    tuning.validate()?;
    for d in designs {
        d.validate()?;
    }
    let jobs: Vec<(usize, usize)> = (0..designs.len())
        .flat_map(|d| (0..replications).map(move |r| (d, r)))
        .collect();
    let outcomes: Vec<std::result::Result<RepOutcome, String>> = jobs
        .par_iter()
        .map(|&(d, r)| run_one(&designs[d], r, methods, tuning).map_err(|e| e.to_string()))
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (d, design) in designs.iter().enumerate() {
        let block = &outcomes[d * replications..(d + 1) * replications];
        for (r, o) in block.iter().enumerate() {
            if let Err(msg) = o {
                failures.push((d, r, msg.clone()));
            }
        }
        let ok: Vec<&RepOutcome> = block.iter().filter_map(|o| o.as_ref().ok()).collect();
        for (m, &method) in methods.iter().enumerate() {
            let l1: Vec<f64> = ok.iter().map(|o| o.losses[m].0).collect();
            let l2: Vec<f64> = ok.iter().map(|o| o.losses[m].1).collect();
            let hit: Vec<f64> = ok.iter().map(|o| if o.losses[m].2 { 1.0 } else { 0.0 }).collect();
            rows.push(BenchmarkRow {
                design: design.clone(),
                method,
                l1: Summary::of(&l1),
                l2: Summary::of(&l2),
                accuracy: Summary::of(&hit),
                completed: ok.len(),
                failed: replications - ok.len(),
            });
        }
    }
    Ok(BenchmarkReport {
        replications,
        methods: methods.to_vec(),
        rows,
        failures,
    })
}

fn run_one(design: &SimDesign, rep: usize, methods: &[MethodTag], tuning: &Tuning) -> Result<RepOutcome> {
    let (ds, beta) = generate_replication(design, rep as u64)?;
    let truth = beta.support();
    let fits = fit_methods(&ds, design.sigma, tuning, methods)?;
    let losses = fits
        .fits
        .iter()
        .map(|(_, b)| Ok((l1_loss(b, &beta)?, l2_loss(b, &beta)?, b.support() == truth)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RepOutcome { losses })
}

impl BenchmarkReport {
    pub fn row(&self, design: usize, method: MethodTag) -> Option<&BenchmarkRow> {
        let m = self.methods.iter().position(|&x| x == method)?;
        self.rows.get(design * self.methods.len() + m)
    }

    pub fn design_count(&self) -> usize {
        self.rows.len() / self.methods.len()
    }

    /// One line per design × method × metric.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["design", "method", "metric", "mean", "se", "completed", "failed"])?;
        for row in &self.rows {
            for (metric, s) in [("l1", row.l1), ("l2", row.l2), ("selection_accuracy", row.accuracy)] {
                w.write_record([
                    row.design.label(),
                    row.method.as_str().to_string(),
                    metric.to_string(),
                    s.mean.to_string(),
                    s.se.to_string(),
                    row.completed.to_string(),
                    row.failed.to_string(),
                ])?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Loss table grouped by design, low-dimensional designs labelled first.
    pub fn to_text_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<16} {:<34} {:>9} {:>9} {:>9}", "", "Model", "l1 loss", "l2 loss", "accuracy");
        let rule = "-".repeat(81);
        let mut last: Option<&SimDesign> = None;
        for row in &self.rows {
            if last != Some(&row.design) {
                let d = &row.design;
                let group = if d.p < d.n { "Low dimension" } else { "High dimension" };
                let _ = writeln!(s, "{rule}");
                let _ = writeln!(s, "{:<16} {:<34}", group, d.label());
                let _ = writeln!(s, "{rule}");
                last = Some(d);
            }
            let _ = writeln!(
                s,
                "{:<16} {:<34} {:>9.4} {:>9.4} {:>9.2}",
                "",
                row.method.display_name(),
                row.l1.mean,
                row.l2.mean,
                row.accuracy.mean
            );
        }
        let _ = writeln!(s, "{rule}");
        let _ = writeln!(s, "{} replications per design", self.replications);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::Covariance;

    #[test]
    fn summary_of_constant_has_zero_se() {
        let s = Summary::of(&[2.0, 2.0, 2.0]);
        assert_eq!(s, Summary { mean: 2.0, se: 0.0 });
        assert_eq!(Summary::of(&[5.0]).se, 0.0);
    }

    #[test]
    fn noiseless_single_replication() {
        let d = SimDesign::with_leading(100, 10, &[9.0, 6.0], 0.0, Covariance::Identity, 1).unwrap();
        let rep = run_benchmark(&[d], &[MethodTag::Ssls], &Tuning::default(), 1).unwrap();
        let row = rep.row(0, MethodTag::Ssls).unwrap();
        assert!(row.l2.mean <= 1e-8);
        assert_eq!(row.accuracy.mean, 1.0);
    }

    #[test]
    fn layout_and_determinism() {
        let designs = vec![
            SimDesign::with_leading(40, 8, &[9.0, 6.0], 2.0, Covariance::Identity, 5).unwrap(),
            SimDesign::with_leading(40, 60, &[9.0, 6.0], 2.0, Covariance::Ar1(0.5), 6).unwrap(),
        ];
        let a = run_benchmark(&designs, &BENCHMARK_METHODS, &Tuning::default(), 3).unwrap();
        let b = run_benchmark(&designs, &BENCHMARK_METHODS, &Tuning::default(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 10);
        assert_eq!(a.design_count(), 2);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 30);
        let table = a.to_text_table();
        assert!(table.contains("Low dimension") && table.contains("High dimension"));
    }
}
