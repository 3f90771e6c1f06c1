use std::fs;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use mifkit_core::cayley::{is_generating, spectral_gap};
use mifkit_core::escape::{default_config, fx_curve, phi_witness, EscapeConfig};
use mifkit_core::freeprod::MixedWord;
use mifkit_core::groups::{family, free_pair};
use mifkit_core::heights::{find_escape_prime, height_poly, mod_p_threshold, HeightConstants};
use mifkit_core::modp::{count_zeros, dkl_bound, sample_hom, Specialization};
use mifkit_core::primes::primes_in;
use mifkit_core::ring::{parse_poly, GroupSpec, RingCtx};
use mifkit_core::selftest::{heights_suite, nonvanishing_suite, run_all, Budget, PropertyResult};
use mifkit_core::ssa::{run_ssa, SsaConfig};
use mifkit_core::walk::decay_curve;

use crate::output::{flag, opt, sha256_hex, ClosureCache, CsvRow, RunManifest, Sink};
use crate::{CliError, Common};

const QUICK_MAX_PRIME: u64 = 13;

/// Shared setup: thread pool, group, input hashes, clock.
struct Run {
    name: &'static str,
    common: Common,
    config: Value,
    inputs: Vec<(String, String)>,
    start: Instant,
}

impl Run {
    fn new(name: &'static str, common: &Common, config: &impl Serialize) -> Result<Self, CliError> {
        if let Some(n) = common.threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be positive".into()));
            }
            // a second build in the same process (tests) keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        let config = serde_json::to_value(config).map_err(mifkit_core::Error::from)?;
        Ok(Run { name, common: common.clone(), config, inputs: Vec::new(), start: Instant::now() })
    }

    fn group(&mut self, fallback: fn() -> GroupSpec) -> Result<GroupSpec, CliError> {
        let Some(path) = &self.common.group else {
            return Ok(fallback());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
        self.inputs.push((path.display().to_string(), sha256_hex(text.as_bytes())));
        GroupSpec::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    fn sink(&self) -> Sink {
        Sink { path: self.common.out.clone() }
    }

    fn finish(self, sink: &Sink, summary: Value) -> Result<(), CliError> {
        sink.finish(&RunManifest {
            subcommand: self.name.into(),
            config: self.config,
            seed: self.common.seed,
            version: env!("CARGO_PKG_VERSION"),
            inputs: self.inputs,
            summary,
            wall_seconds: self.start.elapsed().as_secs_f64(),
        })
    }
}

/// `lo:hi` (inclusive) or a comma-separated list.
fn parse_list(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse {text:?} as lo:hi or a comma-separated list"));
    if let Some((lo, hi)) = text.split_once(':') {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn parse_primes(text: &str, quick: bool) -> Result<Vec<u64>, CliError> {
    let mut primes = match text.split_once(':') {
        Some(_) => {
            let range = parse_list(text)?;
            primes_in(range[0], *range.last().unwrap())
        }
        None => parse_list(text)?,
    };
    if quick {
        primes.retain(|&p| p <= QUICK_MAX_PRIME);
    }
    if primes.is_empty() {
        return Err(CliError::Usage(format!("no primes in {text:?}")));
    }
    Ok(primes)
}

fn parse_word(text: &str, spec: &GroupSpec) -> Result<MixedWord, CliError> {
    Ok(MixedWord::parse(text, spec)?)
}

struct PropertyRow<'a>(&'a PropertyResult);

impl CsvRow for PropertyRow<'_> {
    const HEADER: &'static [&'static str] = &["property", "samples", "violations", "max_slack"];
    fn fields(&self) -> Vec<String> {
        let r = self.0;
        vec![r.property.clone(), r.samples.to_string(), r.violations.to_string(), r.max_slack.to_string()]
    }
}

fn property_table(run: Run, results: &[PropertyResult], summary: Value) -> Result<(), CliError> {
    let sink = run.sink();
    let rows: Vec<PropertyRow> = results.iter().map(PropertyRow).collect();
    sink.write_csv(&rows)?;
    run.finish(&sink, summary)?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.property.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("properties failed: {}", failed.join(", "))))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct HeightsArgs {
    /// Run the height and nonvanishing property suites.
    #[arg(long)]
    selftest: bool,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Polynomial whose height and escape prime are printed.
    #[arg(long)]
    poly: Option<String>,
    /// Localized base N.
    #[arg(long = "base", default_value_t = 2)]
    base: u64,
    /// Number of variables x1..xt.
    #[arg(long, default_value_t = 0)]
    t: usize,
    #[command(flatten)]
    common: Common,
}

pub fn heights(a: HeightsArgs) -> Result<(), CliError> {
    let run = Run::new("heights", &a.common, &a)?;
    if a.selftest {
        let samples = if a.common.quick { a.samples.min(1_000) } else { a.samples };
        let mut results = heights_suite(samples, a.common.seed);
        results.extend(nonvanishing_suite((samples / 10).max(1), a.common.seed));
        return property_table(run, &results, Value::Null);
    }
    let text = a.poly.as_deref().ok_or_else(|| CliError::Usage("need --selftest or --poly".into()))?;
    let ctx = RingCtx::with_vars(a.base, a.t)?;
    let r = parse_poly(text, &ctx)?;
    let consts = HeightConstants::for_ctx(&ctx);
    let h = height_poly(&r);
    let start = (h.ceil() as u64).max(ctx.n());
    let out = json!({
        "poly": r.to_string_with(ctx.vars()),
        "N": ctx.n(),
        "t": ctx.t(),
        "height": h,
        "c_r": consts.c_r,
        "mod_p_threshold": mod_p_threshold(&r, &consts)?,
        "escape_prime": find_escape_prime(&r, start, &consts)?,
    });
    let sink = run.sink();
    sink.write_json(&out)?;
    run.finish(&sink, Value::Null)
}

#[derive(Args, Debug, Serialize)]
pub struct ZerosArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long = "base", default_value_t = 2)]
    base: u64,
    #[command(flatten)]
    common: Common,
}

pub fn zeros(a: ZerosArgs) -> Result<(), CliError> {
    let run = Run::new("zeros", &a.common, &a)?;
    let ctx = RingCtx::with_vars(a.base, a.t)?;
    let r = parse_poly(&a.poly, &ctx)?;
    let count = count_zeros(&r, a.p)?;
    let bound = dkl_bound(&r, a.p);
    let out = json!({
        "poly": r.to_string_with(ctx.vars()),
        "p": a.p,
        "t": a.t,
        "degree": r.degree(),
        "count": count,
        "bound": bound,
        "within_bound": count as f64 <= bound,
    });
    let sink = run.sink();
    sink.write_json(&out)?;
    run.finish(&sink, Value::Null)
}

#[derive(Args, Debug, Serialize)]
pub struct GapArgs {
    #[arg(long, default_value = "5:31")]
    primes: String,
    /// Largest closure to build.
    #[arg(long, default_value_t = 200_000)]
    cap: usize,
    #[command(flatten)]
    common: Common,
}

struct GapRow {
    p: u64,
    order: usize,
    generating: bool,
    lambda2_abs: f64,
    gap: f64,
    method: &'static str,
    seconds: f64,
}

impl CsvRow for GapRow {
    const HEADER: &'static [&'static str] =
        &["p", "group_order", "generating", "lambda2_abs", "gap", "method", "seconds"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.order.to_string(),
            flag(self.generating),
            self.lambda2_abs.to_string(),
            self.gap.to_string(),
            self.method.into(),
            format!("{:.3}", self.seconds),
        ]
    }
}

pub fn gap(a: GapArgs) -> Result<(), CliError> {
    let mut run = Run::new("gap", &a.common, &a)?;
    let spec = run.group(free_pair)?;
    let primes = parse_primes(&a.primes, a.common.quick)?;
    let cache = ClosureCache::from_env(&spec);
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for p in primes {
        let start = Instant::now();
        let phi = if spec.ctx().t() == 0 {
            Specialization::new(p, vec![], &spec)?
        } else {
            sample_hom(p, &spec, a.common.seed)?
        };
        let table = cache.closure(&spec, &phi, a.cap)?;
        let report = spectral_gap(&table.graph())?;
        rows.push(GapRow {
            p,
            order: table.order(),
            generating: is_generating(&table),
            lambda2_abs: report.lambda2_abs,
            gap: report.gap,
            method: report.method.as_str(),
            seconds: start.elapsed().as_secs_f64(),
        });
        points.push(json!({"p": p, "point": phi.point, "residual": report.residual}));
    }
    let sink = run.sink();
    sink.write_csv(&rows)?;
    run.finish(&sink, json!({ "specializations": points }))
}

#[derive(Args, Debug, Serialize)]
pub struct DecayArgs {
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 1)]
    kmin: usize,
    #[arg(long, default_value_t = 24)]
    kmax: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Laziness: probability of a step staying put.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[command(flatten)]
    common: Common,
}

pub fn decay(a: DecayArgs) -> Result<(), CliError> {
    let mut run = Run::new("decay", &a.common, &a)?;
    let spec = run.group(free_pair)?;
    let w = parse_word(&a.word, &spec)?;
    if a.kmin > a.kmax {
        return Err(CliError::Usage("--kmin exceeds --kmax".into()));
    }
    let ks: Vec<usize> = (a.kmin..=a.kmax).collect();
    let trials = if a.common.quick { a.trials.min(1_000) } else { a.trials };
    let curve = decay_curve(&spec, &w, &ks, trials, a.common.seed, a.beta)?;
    let rows: Vec<_> = curve.rows.iter().map(DecayCsv).collect();
    let sink = run.sink();
    sink.write_csv(&rows)?;
    run.finish(&sink, json!({ "fit": curve.fit, "prime": curve.prime, "exact_checks": curve.exact_checks }))
}

struct DecayCsv<'a>(&'a mifkit_core::walk::DecayRow);

impl CsvRow for DecayCsv<'_> {
    const HEADER: &'static [&'static str] = &["k", "hits", "trials", "p_hat", "lo95", "hi95"];
    fn fields(&self) -> Vec<String> {
        let r = self.0;
        vec![
            r.k.to_string(),
            r.hits.to_string(),
            r.trials.to_string(),
            r.p_hat.to_string(),
            r.lo95.to_string(),
            r.hi95.to_string(),
        ]
    }
}

/// Flags that override the measured escape constants.
#[derive(Args, Debug, Clone, Serialize)]
pub struct EscapeTuning {
    /// Walk-length multiplier; calibrated when absent.
    #[arg(long)]
    c0: Option<f64>,
    /// Prime-window multiplier D; measured when absent.
    #[arg(long)]
    d_mult: Option<f64>,
}

fn escape_config(spec: &GroupSpec, tuning: &EscapeTuning, seed: u64) -> Result<(EscapeConfig, Value), CliError> {
    if let (Some(c0), Some(d)) = (tuning.c0, tuning.d_mult) {
        let cfg = EscapeConfig::new(c0, d, seed);
        cfg.validate()?;
        return Ok((cfg, json!({ "c0": c0, "d_mult": d, "measured": false })));
    }
    let (mut cfg, consts, cal) = default_config(spec, seed)?;
    if let Some(c0) = tuning.c0 {
        cfg.c0 = c0;
    }
    if let Some(d) = tuning.d_mult {
        cfg.d_mult = d;
    }
    cfg.validate()?;
    Ok((cfg.clone(), json!({ "c0": cfg.c0, "d_mult": cfg.d_mult, "constants": consts, "calibration": cal })))
}

#[derive(Args, Debug, Serialize)]
pub struct EscapeArgs {
    #[arg(long)]
    word: String,
    #[command(flatten)]
    tuning: EscapeTuning,
    #[command(flatten)]
    common: Common,
}

pub fn escape(a: EscapeArgs) -> Result<(), CliError> {
    let mut run = Run::new("escape", &a.common, &a)?;
    let spec = run.group(free_pair)?;
    let w = parse_word(&a.word, &spec)?;
    let (cfg, constants) = escape_config(&spec, &a.tuning, a.common.seed)?;
    let wit = mifkit_core::escape::escape(&spec, &w, &cfg)?;
    if !wit.verify(&spec, &w)? {
        return Err(mifkit_core::Error::Consistency("witness failed verification".into()).into());
    }
    let sink = run.sink();
    sink.write_json(&wit.to_json(&spec, &w))?;
    run.finish(&sink, constants)
}

struct FxCsv {
    n: usize,
    max_witness_len: usize,
    oracle_fx: Option<usize>,
    fitted_c: Option<f64>,
}

impl CsvRow for FxCsv {
    const HEADER: &'static [&'static str] = &["n", "max_witness_len", "oracle_fx_where_known", "fitted_C"];
    fn fields(&self) -> Vec<String> {
        vec![self.n.to_string(), self.max_witness_len.to_string(), opt(self.oracle_fx), opt(self.fitted_c)]
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FxArgs {
    /// Word lengths, as lo:hi or a list.
    #[arg(long, default_value = "1:8")]
    ns: String,
    #[arg(long, default_value_t = 10)]
    words_per_n: usize,
    /// Radius cap for the ball oracle.
    #[arg(long, default_value_t = 4)]
    oracle_cap: usize,
    #[command(flatten)]
    tuning: EscapeTuning,
    #[command(flatten)]
    common: Common,
}

pub fn fx(a: FxArgs) -> Result<(), CliError> {
    let mut run = Run::new("fx", &a.common, &a)?;
    let spec = run.group(free_pair)?;
    let ns: Vec<usize> = parse_list(&a.ns)?.into_iter().map(|n| n as usize).collect();
    let words = if a.common.quick { a.words_per_n.min(3) } else { a.words_per_n };
    let (cfg, constants) = escape_config(&spec, &a.tuning, a.common.seed)?;
    let curve = fx_curve(&spec, &ns, words, a.oracle_cap, &cfg)?;
    if curve.invalid_witnesses > 0 || curve.rows.iter().any(|r| r.oracle_violations > 0) {
        return Err(mifkit_core::Error::Consistency("witness shorter than the oracle value or invalid".into()).into());
    }
    let rows: Vec<FxCsv> = curve
        .rows
        .iter()
        .map(|r| FxCsv { n: r.n, max_witness_len: r.max_witness_len, oracle_fx: r.oracle_fx_where_known, fitted_c: curve.fitted_c })
        .collect();
    let sink = run.sink();
    sink.write_csv(&rows)?;
    run.finish(&sink, json!({ "rows": curve.rows, "escape": constants }))
}

#[derive(Args, Debug, Serialize)]
pub struct PhiArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[command(flatten)]
    tuning: EscapeTuning,
    #[command(flatten)]
    common: Common,
}

pub fn phi(a: PhiArgs) -> Result<(), CliError> {
    let mut run = Run::new("phi", &a.common, &a)?;
    let spec = run.group(free_pair)?;
    let (cfg, constants) = escape_config(&spec, &a.tuning, a.common.seed)?;
    let (wit, report) = phi_witness(&spec, a.n, &cfg)?;
    let row = FxCsv { n: a.n, max_witness_len: wit.length, oracle_fx: None, fitted_c: None };
    let gamma = wit.gamma.word().map(|l| spec.word_to_string(l));
    let sink = run.sink();
    sink.write_csv(&[row])?;
    run.finish(&sink, json!({ "report": report, "gamma_word": gamma, "k_used": wit.k_used, "escape": constants }))
}

#[derive(Args, Debug, Serialize)]
pub struct SsaArgs {
    #[arg(long, default_value = "5:31")]
    primes: String,
    /// Ball radius m = ceil(alpha ln p).
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Expander threshold on the gap; half the median gap at the smallest prime when absent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Closures up to this size use the dense eigensolver.
    #[arg(long, default_value_t = 1_000)]
    dense_limit: usize,
    #[command(flatten)]
    common: Common,
}

struct SsaCsv<'a>(&'a mifkit_core::ssa::SsaRow);

impl CsvRow for SsaCsv<'_> {
    const HEADER: &'static [&'static str] =
        &["p", "point", "localizer_nonzero", "generating", "order", "gap", "injective_on_ball", "m"];
    fn fields(&self) -> Vec<String> {
        let r = self.0;
        let point: Vec<String> = r.point.iter().map(u64::to_string).collect();
        vec![
            r.p.to_string(),
            point.join(";"),
            flag(r.localizer_nonzero),
            opt(r.generating.map(flag)),
            opt(r.order),
            opt(r.gap),
            opt(r.injective_on_ball.map(flag)),
            r.m.to_string(),
        ]
    }
}

pub fn ssa(a: SsaArgs) -> Result<(), CliError> {
    let mut run = Run::new("ssa", &a.common, &a)?;
    let spec = run.group(family)?;
    let mut cfg = SsaConfig::new(parse_primes(&a.primes, a.common.quick)?);
    cfg.alpha = a.alpha;
    cfg.eta = a.eta;
    cfg.epsilon = a.epsilon;
    cfg.dense_limit = a.dense_limit;
    cfg.seed = a.common.seed;
    let report = run_ssa(&spec, &cfg)?;
    let rows: Vec<SsaCsv> = report.rows.iter().map(SsaCsv).collect();
    let sink = run.sink();
    sink.write_csv(&rows)?;
    run.finish(
        &sink,
        json!({
            "primes": report.primes,
            "epsilon": report.epsilon,
            "fitted_c": report.fitted_c,
            "ball_sizes": report.ball_sizes,
        }),
    )
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    #[command(flatten)]
    common: Common,
}

pub fn selftest(a: SelftestArgs) -> Result<(), CliError> {
    let run = Run::new("selftest", &a.common, &a)?;
    let budget = if a.common.quick { Budget::QUICK } else { Budget::FULL };
    let (results, measured_c) = run_all(budget, a.common.seed)?;
    property_table(run, &results, json!({ "measured_c": measured_c }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("3:6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_list("1, 8,2").unwrap(), vec![1, 8, 2]);
        assert!(parse_list("6:3").is_err());
        assert!(parse_list("a").is_err());
        assert_eq!(parse_primes("5:31", false).unwrap().len(), 9);
        assert_eq!(parse_primes("5:31", true).unwrap(), vec![5, 7, 11, 13]);
        assert!(parse_primes("14:16", false).is_err());
    }
}
