//! Command layer behind the `primelab` binary: run configuration, the
//! table/figure sweep commands, the appendix verification suite, and CSV or
//! JSON rendering of the resulting reports.

use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::counting;
use crate::error::{Error, Result};
use crate::hardylittlewood::{euler_product, HlConstants, ProductKind};
use crate::primes::PrimeTable;
use crate::spectra::{
    self, ent_spectrum, purity, purity_formula_model, random_partition_survey, spectrum_of,
};
use crate::statebuilder::{rho_exact, rho_model, rho_odd, EllMode, Flavor, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything a command needs beyond its own sweep bounds. `max_n` is a hard
/// ceiling (default 24): runs above it, or block sizes m > 13, need
/// `opt_in_large` because the dense eigensolves grow fast.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub max_n: u32,
    pub opt_in_large: bool,
    pub prime_cutoff: u64,
    pub seed: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: std::env::var_os("PRIMELAB_CACHE_DIR").map(PathBuf::from),
            max_n: 24,
            opt_in_large: false,
            prime_cutoff: 1_000_000,
            seed: 0,
            output_format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn check_n(&self, n: u32) -> Result<()> {
        if n > 30 {
            return Err(Error::Range(format!("n = {n} exceeds the hard limit 30")));
        }
        if n > self.max_n && !self.opt_in_large {
            return Err(Error::Range(format!(
                "n = {n} exceeds the ceiling {} (pass --allow-large to override)",
                self.max_n
            )));
        }
        if n / 2 > 13 && !self.opt_in_large {
            return Err(Error::Range(format!(
                "block size m = {} needs --allow-large",
                n / 2
            )));
        }
        Ok(())
    }

    fn table(&self, n: u32) -> Result<PrimeTable> {
        match &self.cache_dir {
            Some(dir) => PrimeTable::load_or_build(n, dir),
            None => PrimeTable::build(n),
        }
    }

    fn hl(&self) -> Result<HlConstants> {
        HlConstants::new(self.prime_cutoff)
    }
}

/// One check of the appendix verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    fn check(name: &str, computed: f64, expected: f64, tolerance: f64) -> Verdict {
        Verdict {
            name: name.to_string(),
            computed,
            expected,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }
}

/// Machine-readable command result. `columns`/`rows` carry the tabular
/// payload; `verdicts` is non-empty only for verification commands.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub verdicts: Vec<Verdict>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Render per the configured output format. CSV shows verdicts as rows
    /// of a trailing `name,computed,expected,tolerance,pass` block.
    pub fn render(&self) -> String {
        match self.config.output_format {
            OutputFormat::Json => serde_json::to_string_pretty(self).unwrap(),
            OutputFormat::Csv => {
                let mut out = String::new();
                if !self.columns.is_empty() {
                    out.push_str(&self.columns.join(","));
                    out.push('\n');
                    for row in &self.rows {
                        let cells: Vec<String> = row.iter().map(csv_cell).collect();
                        out.push_str(&cells.join(","));
                        out.push('\n');
                    }
                }
                if !self.verdicts.is_empty() {
                    out.push_str("name,computed,expected,tolerance,pass\n");
                    for v in &self.verdicts {
                        out.push_str(&format!(
                            "{},{:.10e},{:.10e},{:.1e},{}\n",
                            v.name, v.computed, v.expected, v.tolerance, v.pass
                        ));
                    }
                }
                out
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Table II-style display rounding: four decimals.
fn d4(x: f64) -> Value {
    Value::String(format!("{x:.4}"))
}

fn even_range(n_min: u32, n_max: u32, config: &RunConfig) -> Result<Vec<u32>> {
    if n_min < 4 || n_min > n_max {
        return Err(Error::Range(format!("bad n range {n_min}..{n_max}")));
    }
    config.check_n(n_max)?;
    Ok((n_min..=n_max).filter(|n| n % 2 == 0).collect())
}

fn report(command: &str, config: &RunConfig, columns: &[&str], start: Instant) -> Report {
    Report {
        command: command.to_string(),
        config: config.clone(),
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
        verdicts: Vec::new(),
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// `table2`: (n, S_prime, S_twin) for even n in range, natural partition.
pub fn cmd_table2(config: &RunConfig, n_min: u32, n_max: u32) -> Result<Report> {
    let start = Instant::now();
    let ns = even_range(n_min, n_max, config)?;
    let table = config.table(n_max)?;
    let hl = config.hl()?;
    let rows: Vec<Vec<Value>> = ns
        .par_iter()
        .map(|&n| {
            let sp = spectra::natural_partition_entropy(
                &table, &hl, n, n / 2, Series::Prime, Flavor::Full,
            )?;
            let st = spectra::natural_partition_entropy(
                &table, &hl, n, n / 2, Series::Twin, Flavor::Full,
            )?;
            Ok(vec![json!(n), d4(sp), d4(st)])
        })
        .collect::<Result<_>>()?;
    let mut rep = report("table2", config, &["n", "s_prime", "s_twin"], start);
    rep.rows = rows;
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}

/// `fig1`: exact vs model purity of the prime state and their difference.
pub fn cmd_fig1(config: &RunConfig, n_min: u32, n_max: u32) -> Result<Report> {
    let start = Instant::now();
    let ns = even_range(n_min, n_max, config)?;
    let table = config.table(n_max)?;
    let hl = config.hl()?;
    let rows: Vec<Vec<Value>> = ns
        .par_iter()
        .map(|&n| {
            let exact = purity(&rho_exact(&table, n, n / 2)?);
            let model = purity_formula_model(&hl, n, n / 2, EllMode::ExactLiRatio)?;
            Ok(vec![json!(n), json!(exact), json!(model), json!(model - exact)])
        })
        .collect::<Result<_>>()?;
    let mut rep = report("fig1", config, &["n", "purity_exact", "purity_model", "difference"], start);
    rep.rows = rows;
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}

/// `fig2`: exact vs model von Neumann entropy of the prime state.
pub fn cmd_fig2(config: &RunConfig, n_min: u32, n_max: u32) -> Result<Report> {
    let start = Instant::now();
    let ns = even_range(n_min, n_max, config)?;
    let table = config.table(n_max)?;
    let hl = config.hl()?;
    let rows: Vec<Vec<Value>> = ns
        .par_iter()
        .map(|&n| {
            let exact = spectra::natural_partition_entropy(
                &table, &hl, n, n / 2, Series::Prime, Flavor::Full,
            )?;
            let model = spectra::natural_partition_entropy(
                &table, &hl, n, n / 2, Series::Prime, Flavor::Model,
            )?;
            Ok(vec![json!(n), json!(exact), json!(model)])
        })
        .collect::<Result<_>>()?;
    let mut rep = report("fig2", config, &["n", "s_exact", "s_model"], start);
    rep.rows = rows;
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}

/// `fig3`: entropy histogram data over random balanced bipartitions at
/// n = n_max; the natural partition is appended and flagged.
pub fn cmd_fig3(
    config: &RunConfig,
    n: u32,
    series: Series,
    samples: usize,
) -> Result<Report> {
    let start = Instant::now();
    config.check_n(n)?;
    let table = config.table(n)?;
    let survey = random_partition_survey(&table, n, series, samples, config.seed)?;
    let mut rep = report("fig3", config, &["sample_index", "mask_hex", "entropy_bits", "is_natural"], start);
    let max_sample = survey
        .samples
        .iter()
        .map(|s| s.entropy)
        .fold(f64::MIN, f64::max);
    for s in &survey.samples {
        rep.rows.push(vec![
            json!(s.index),
            json!(format!("{:#x}", s.mask_bits)),
            json!(s.entropy),
            json!(false),
        ]);
    }
    rep.rows.push(vec![
        json!(survey.samples.len()),
        json!(format!("{:#x}", survey.natural_mask_bits)),
        json!(survey.natural_entropy),
        json!(true),
    ]);
    rep.verdicts.push(Verdict {
        name: "natural_partition_is_max".into(),
        computed: survey.natural_entropy,
        expected: max_sample,
        tolerance: 0.0,
        pass: survey.natural_entropy >= max_sample,
    });
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}

/// `fig4`: entanglement spectrum (entanglement energies with multiplicity)
/// at n = n_max, for the requested flavor next to the model's.
pub fn cmd_fig4(config: &RunConfig, n: u32, flavor: Flavor) -> Result<Report> {
    let start = Instant::now();
    config.check_n(n)?;
    let m = n / 2;
    let hl = config.hl()?;
    let rho = match flavor {
        Flavor::Full | Flavor::Truncated => rho_exact(&config.table(n)?, n, m)?,
        Flavor::Odd => rho_odd(&config.table(n)?, n, m)?,
        Flavor::Model => rho_model(&hl, n, m, EllMode::ExactLiRatio)?,
        Flavor::Toy => return Err(Error::Domain("toy flavor has no figure".into())),
    };
    let levels = ent_spectrum(&spectrum_of(&rho)?, 1e-6);
    let model = rho_model(&hl, n, m, EllMode::ExactLiRatio)?;
    let model_levels = ent_spectrum(&spectrum_of(&model)?, 1e-6);
    let mut rep = report(
        "fig4",
        config,
        &["level", "eps", "multiplicity", "eps_model", "multiplicity_model"],
        start,
    );
    for i in 0..levels.len().max(model_levels.len()) {
        rep.rows.push(vec![
            json!(i),
            levels.get(i).map_or(Value::Null, |l| json!(l.eps)),
            levels.get(i).map_or(Value::Null, |l| json!(l.multiplicity)),
            model_levels.get(i).map_or(Value::Null, |l| json!(l.eps)),
            model_levels.get(i).map_or(Value::Null, |l| json!(l.multiplicity)),
        ]);
    }
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}

/// `fig5`: the rescaled model eigenvalue coefficients gamma_i (2i)^2 / 2^m
/// (gamma_0 / 2^m for the top level) against m, which tend to 1.
pub fn cmd_fig5(config: &RunConfig, n_min: u32, n_max: u32) -> Result<Report> {
    let start = Instant::now();
    config.check_n(n_max)?;
    let m_lo = (n_min / 2).max(6);
    let m_hi = n_max / 2;
    if m_lo > m_hi {
        return Err(Error::Range(format!("fig5 needs n_max >= {}", 2 * m_lo)));
    }
    let hl = config.hl()?;
    let mut rep = report(
        "fig5",
        config,
        &["m", "i0", "i1", "i2", "i3", "i4", "i5"],
        start,
    );
    let rows: Vec<Vec<Value>> = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let rho = rho_model(&hl, 2 * m, m, EllMode::LimitOneOverNLog2)?;
            let ell_n = crate::statebuilder::ell(2 * m, EllMode::LimitOneOverNLog2)?;
            let evals = spectrum_of(&rho)?.eigenvalues;
            let two_m = 2f64.powi(m as i32);
            let mut row = vec![json!(m)];
            for i in 0..6usize {
                // Level i of the tower carries 2i eigenvalues; level 0 is
                // the single top one. Average over each (near-degenerate)
                // block of the descending spectrum.
                let (offset, mult) = if i == 0 { (0, 1) } else { (1 + i * (i - 1), 2 * i) };
                let v = evals.get(offset..offset + mult).map(|block| {
                    let lambda = block.iter().sum::<f64>() / mult as f64;
                    let gamma = (lambda * two_m / 2.0 - 1.0) / ell_n;
                    if i == 0 {
                        gamma / two_m
                    } else {
                        gamma * (2 * i) as f64 * (2 * i) as f64 / two_m
                    }
                });
                row.push(v.map_or(Value::Null, |x| json!(x)));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rep.rows = rows;
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}

/// `appendix-verify`: every asymptotic sum law and constant of the
/// appendices, each as a named pass/fail verdict.
pub fn cmd_appendix_verify(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let hl = config.hl()?;
    let mut v = Vec::new();

    // Singular-series constants from certified Euler products.
    let c2 = euler_product(ProductKind::TwinConstant, config.prime_cutoff)?;
    v.push(Verdict::check("twin_constant", c2.value, 1.3203236316, 1e-6));
    let limit = euler_product(ProductKind::TwoAlphaSqOverAlpha2, config.prime_cutoff)?;
    v.push(Verdict::check("purity_limit_constant", limit.value, 4.60192, 1e-4));
    v.push(Verdict::check(
        "alpha_sq_over_alpha2",
        hl.alpha_sq_over_alpha2(),
        limit.value / 2.0,
        1e-9,
    ));

    // Table IV: alpha(m)/alpha as exact rationals, first rows.
    let expect = [(2u64, 1.0), (6, 2.0), (10, 4.0 / 3.0), (14, 6.0 / 5.0), (30, 8.0 / 3.0)];
    for (m, want) in expect {
        let got = hl.alpha_m(m);
        v.push(Verdict::check(&format!("table_iv_alpha_ratio_m{m}"), got / hl.alpha(), want, 1e-12));
    }
    // Divisor-sum identity alpha(m)/alpha = sum_{d|m} beta(d), checked as
    // exact rationals.
    let mismatches = (2..2001u64)
        .step_by(2)
        .filter(|&m| {
            crate::hardylittlewood::alpha_m_direct(m)
                != crate::hardylittlewood::alpha_m_divisor_sum(m)
        })
        .count();
    v.push(Verdict::check("alpha_m_divisor_sum_identity", mismatches as f64, 0.0, 0.0));

    // Appendix sum laws at their quoted scales.
    v.push(Verdict::check("sum_c_over_k_minus_half_log", hl.sum_c(4000).ratio, 1.0, 0.01));
    let s2 = hl.sum_c2(2000);
    v.push(Verdict::check("sum_c2_component_sq", s2.ratio_component_sq, 1.0, 0.05));
    v.push(Verdict::check("sum_c2_component_m_sq", s2.ratio_component_m_sq, 1.0, 0.05));
    v.push(Verdict::check("sum_c2_double", s2.ratio_double, 1.0, 0.05));

    let d_max = 100_001;
    v.push(Verdict::check(
        "sum_beta_over_d",
        crate::hardylittlewood::sum_beta_over_d(d_max),
        2.0 / hl.alpha(),
        1e-4,
    ));
    let mean = crate::hardylittlewood::mean_d_beta(d_max);
    v.push(Verdict::check("mean_d_beta", mean * hl.alpha(), 1.0, 0.02));
    v.push(Verdict::check(
        "double_beta_over_lcm",
        crate::hardylittlewood::double_beta_over_lcm(3000),
        2.0 * hl.alpha_sq_over_alpha2() / (hl.alpha() * hl.alpha()),
        2e-3,
    ));

    // Pair-correlation asymptotics of pi_2 at the sieve scale.
    let table = config.table(20)?;
    for k in [2u64, 4, 6] {
        let x = 1u64 << 20;
        let exact = counting::pi2(&table, k, x - k)? as f64;
        let pred = hl.c(k) * counting::li2(x as f64)?;
        v.push(Verdict::check(&format!("pi2_li2_ratio_k{k}"), exact / pred, 1.0, 0.05));
    }

    let mut rep = report("appendix-verify", config, &[], start);
    rep.verdicts = v;
    rep.elapsed_ms = start.elapsed().as_millis();
    Ok(rep)
}
