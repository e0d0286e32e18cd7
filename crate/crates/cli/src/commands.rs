//! Dispatch from a [`RunConfig`] to the core modules.

use hyperell_core::cache::Cache;
use hyperell_core::characters::{compare_symbol_routes, PrimeCharacters, SymbolKernel};
use hyperell_core::ensemble::{
    empirical_moment, ensemble_size, nonsquare_cancellation_check, square_orthogonality_check,
    tail_distribution, truncation_experiment, truncation_length, Ensemble, LRoute, MomentValue,
};
use hyperell_core::lfunctions::{
    class_number_odd, class_number_regulator_even, completed_l, completed_l_symmetric, l_coefficients,
    l_coefficients_direct, max_rh_deviation, verify_functional_equation, LData,
};
use hyperell_core::random_model::{
    c2_report, c3, c_star, e_gamma, model_moment_exact, resonator_constant, sample_model,
    tau_beta_n, resonance_tail_target, zeta_a2, ModelParams, C2_REFERENCE_BAND,
};
use hyperell_core::resonator::{
    euler_e_products, local_factor_r_identity, local_factor_s_euler_form, local_factor_s_identity,
    resonator_prime_coeff, run_resonance, LocalFactors, RIdentity, ResonanceConfig,
};
use hyperell_core::{pi_q_exact, BigInt, BigRational, Error, Fq, IrreducibleTable};

use crate::config::{Command, RunConfig, SCAN_CAP};
use crate::report::{Report, Table, Value};

/// Why a run did not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Scan above the cap without --force; carries the estimate.
    Refused(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Outcome of a run: the report and whether every verification passed.
pub struct Outcome {
    pub report: Report,
    pub verified: bool,
    pub notices: Vec<String>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    fq: Fq,
    cache: Cache,
}

impl Ctx<'_> {
    fn table(&mut self, max_deg: usize) -> Run<IrreducibleTable> {
        Ok(self.cache.table(self.fq, max_deg.max(1))?)
    }

    fn characters(&mut self, max_deg: usize) -> Run<PrimeCharacters> {
        let t = self.table(max_deg)?;
        Ok(PrimeCharacters::new(&t, max_deg)?)
    }

    fn ensemble(&self, n: usize) -> Run<Ensemble> {
        Ok(Ensemble::new(self.fq, n)?)
    }

    /// Full L-data for H_n via the cache, completed by the functional equation.
    fn l_data(&mut self, ens: &Ensemble) -> Run<Vec<LData>> {
        let route = LRoute::Symmetric;
        let pc = self.characters(route.prime_degree(ens.degree()))?;
        Ok(self.cache.l_data(ens, &pc, route)?)
    }

    fn l_values(&mut self, ens: &Ensemble) -> Run<Vec<BigRational>> {
        Ok(self.l_data(ens)?.into_iter().map(|l| l.value_at_one).collect())
    }
}

/// Refuses scans of more than [`SCAN_CAP`] polynomials unless forced.
fn guard(cfg: &RunConfig, n: usize) -> Run<()> {
    let size = ensemble_size(cfg.q, n);
    if size > SCAN_CAP && !cfg.force {
        return Err(Failure::Refused(format!(
            "|H_{n}| = {size} for q = {} exceeds the cap of {SCAN_CAP}; estimated cost ~{:.2e} \
             character evaluations. Pass --force to run anyway.",
            cfg.q,
            cfg.cost_estimate(size)
        )));
    }
    Ok(())
}

pub fn execute(cfg: &RunConfig) -> Run<Outcome> {
    let mut ctx = Ctx {
        cfg,
        fq: cfg.fq(),
        cache: Cache::new(cfg.cache_dir.clone()),
    };
    if cfg.command.scans_ensemble() && !(cfg.command == Command::Lfun && cfg.d.is_some()) {
        guard(cfg, cfg.n)?;
    }
    let mut report = Report::new(cfg.command.name(), cfg.q, cfg.n);
    report.config = cfg.echo();
    let mut verified = true;
    match cfg.command {
        Command::Enumerate => enumerate(&mut ctx, &mut report)?,
        Command::Lfun => lfun(&mut ctx, &mut report)?,
        Command::Dist => dist(&mut ctx, &mut report)?,
        Command::Moments => moments(&mut ctx, &mut report)?,
        Command::Orthogonality => orthogonality(&mut ctx, &mut report)?,
        Command::Truncation => truncation(&mut ctx, &mut report)?,
        Command::Resonate => resonate(&mut ctx, &mut report)?,
        Command::Constants => constants(&mut ctx, &mut report)?,
        Command::Verify => verified = verify(&mut ctx, &mut report)?,
    }
    Ok(Outcome {
        report,
        verified,
        notices: ctx.cache.notices().to_vec(),
    })
}

fn enumerate(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let n = ctx.cfg.n;
    let ens = ctx.ensemble(n)?;
    let mut summary = Table::new("summary", &["q", "n", "size", "expected_size", "irreducible"]);
    summary.push(vec![
        ctx.cfg.q.into(),
        n.into(),
        ens.len().into(),
        ensemble_size(ctx.cfg.q, n).into(),
        pi_q_exact(ctx.cfg.q, n).into(),
    ]);
    let mut members = Table::new("members", &["index", "d"]);
    for (i, d) in ens.members().iter().enumerate() {
        members.push(vec![i.into(), d.to_string().into()]);
    }
    report.tables = vec![summary, members];
    Ok(())
}

fn class_invariant(l: &LData) -> Run<(&'static str, BigInt)> {
    Ok(if l.d.deg() % 2 == 1 {
        ("h", class_number_odd(l)?)
    } else {
        ("hR", class_number_regulator_even(l)?)
    })
}

fn lfun(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let data = match &ctx.cfg.d {
        Some(d) => {
            let pc = ctx.characters(LRoute::Full.prime_degree(d.deg()).max(1))?;
            vec![completed_l(&pc, d)?]
        }
        None => {
            let ens = ctx.ensemble(ctx.cfg.n)?;
            ctx.l_data(&ens)?
        }
    };
    let mut t = Table::new(
        "lfun",
        &["d", "deg", "lambda", "genus", "coeffs", "l1", "invariant_kind", "invariant", "fe_holds", "rh_max_dev"],
    );
    for l in &data {
        let coeffs = l.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        let (kind, inv) = if ctx.fq.is_squarefree(&l.d)? {
            let (k, v) = class_invariant(l)?;
            (Value::from(k), Value::BigInt(v.to_string()))
        } else {
            (Value::Null, Value::Null)
        };
        t.push(vec![
            l.d.to_string().into(),
            l.d.deg().into(),
            l.lambda.into(),
            l.genus.into(),
            coeffs.into(),
            Value::rational(&l.value_at_one),
            kind,
            inv,
            verify_functional_equation(l).into(),
            max_rh_deviation(l)?.into(),
        ]);
    }
    report.tables = vec![t];
    Ok(())
}

fn model_params(cfg: &RunConfig, fq: Fq, y: usize) -> Run<ModelParams> {
    Ok(ModelParams::new(fq, y, cfg.seed, cfg.mc_samples)?)
}

fn dist(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let cfg = ctx.cfg;
    let ens = ctx.ensemble(cfg.n)?;
    let values = ctx.l_values(&ens)?;
    let y = cfg.y[0];
    let params = model_params(cfg, ctx.fq, y)?;
    let records = tail_distribution(&values, &cfg.tau_grid, Some(&params))?;
    let samples = if cfg.mc_samples > 0 { sample_model(&params) } else { Vec::new() };
    let mut t = Table::new(
        "tail",
        &["tau", "threshold", "count", "phi", "model_chernoff", "model_mc"],
    );
    for r in &records {
        let mc = (!samples.is_empty()).then(|| {
            let thr = e_gamma() * r.tau;
            samples.iter().filter(|&&x| x >= thr).count() as f64 / samples.len() as f64
        });
        t.push(vec![
            r.tau.into(),
            Value::rational(&r.threshold),
            r.count.into(),
            Value::rational(&r.phi),
            Value::opt_float(r.model_tail),
            Value::opt_float(mc),
        ]);
    }
    let mut s = Table::new("summary", &["size", "y", "min_l1", "mean_l1", "max_l1"]);
    let total = values.iter().fold(BigRational::from_integer(0.into()), |a, b| a + b);
    let mean = total / BigInt::from(values.len());
    let min = values.iter().min().expect("nonempty ensemble");
    let max = values.iter().max().expect("nonempty ensemble");
    s.push(vec![
        ens.len().into(),
        y.into(),
        Value::rational(min),
        Value::rational(&mean),
        Value::rational(max),
    ]);
    report.tables = vec![s, t];
    Ok(())
}

fn moments(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let cfg = ctx.cfg;
    let ens = ctx.ensemble(cfg.n)?;
    let mut t = Table::new(
        "moments",
        &["k", "y", "empirical", "model", "model_exact", "ratio", "mc_moment", "mc_stderr"],
    );
    for &y in &cfg.y {
        let pc = ctx.characters(y)?;
        let profile = ens.sign_profile(&pc, y)?;
        let params = model_params(cfg, ctx.fq, y)?;
        let samples = if cfg.mc_samples > 0 { sample_model(&params) } else { Vec::new() };
        for &k in &cfg.k_list {
            let rec = empirical_moment(&profile, y, k, ctx.fq)?;
            let empirical = match &rec.empirical {
                MomentValue::Exact(r) => Value::rational(r),
                MomentValue::Real(x) => Value::Float(*x),
            };
            let exact = (k.fract() == 0.0 && k <= 64.0).then(|| model_moment_exact(&params, k as u32));
            let (mc, se) = if samples.is_empty() {
                (None, None)
            } else {
                let vals: Vec<f64> = samples.iter().map(|x| x.powf(k)).collect();
                let m = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / m;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
                (Some(mean), Some((var / m).sqrt()))
            };
            t.push(vec![
                k.into(),
                y.into(),
                empirical,
                rec.model.into(),
                exact.as_ref().map_or(Value::Null, Value::rational),
                rec.ratio.into(),
                Value::opt_float(mc),
                Value::opt_float(se),
            ]);
        }
    }
    report.tables = vec![t];
    Ok(())
}

fn orthogonality(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let cfg = ctx.cfg;
    let ens = ctx.ensemble(cfg.n)?;
    let mut sq = Table::new(
        "square",
        &["f", "observed", "predicted", "abs_err", "scaled_err"],
    );
    for r in square_orthogonality_check(&ens, &cfg.f_list)? {
        sq.push(vec![
            r.f.to_string().into(),
            Value::rational(&r.observed),
            Value::rational(&r.predicted),
            r.abs_err.into(),
            r.scaled_err.into(),
        ]);
    }
    let mut ns = Table::new("nonsquare", &["ell", "sum", "abs_sum", "normalized"]);
    for r in nonsquare_cancellation_check(&ens, &cfg.ell_list)? {
        ns.push(vec![r.ell.to_string().into(), r.sum.into(), r.abs_sum.into(), r.normalized.into()]);
    }
    report.tables = vec![sq, ns];
    Ok(())
}

fn truncation(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let cfg = ctx.cfg;
    let q = ctx.fq.q();
    let ens = ctx.ensemble(cfg.n)?;
    let default_len = truncation_length(q, cfg.n, cfg.f_param)?;
    let lengths: Vec<usize> = if cfg.n_trunc.is_empty() {
        (1..=default_len).collect()
    } else {
        cfg.n_trunc.clone()
    };
    let values = ctx.l_values(&ens)?;
    let pc = ctx.characters(lengths.iter().copied().max().unwrap_or(1))?;
    let mut t = Table::new(
        "truncation",
        &["f_param", "n_trunc", "threshold", "exceed", "exceed_fraction", "budget", "within_budget"],
    );
    for r in truncation_experiment(&ens, &pc, &values, cfg.f_param, &lengths)? {
        t.push(vec![
            r.f_param.into(),
            r.n_trunc.into(),
            r.threshold.into(),
            r.exceed.into(),
            Value::rational(&r.exceed_fraction),
            r.budget.into(),
            r.within_budget().into(),
        ]);
    }
    let mut s = Table::new("summary", &["f_param", "default_n_trunc"]);
    s.push(vec![cfg.f_param.into(), default_len.into()]);
    report.tables = vec![s, t];
    Ok(())
}

const RESONATOR_COLUMNS: [&str; 21] = [
    "c",
    "n_trunc",
    "m",
    "s1",
    "s2",
    "ratio",
    "argmax_d",
    "max_l_short",
    "min_l_short",
    "mean_l_short",
    "sandwich_holds",
    "ratio_ge_mean",
    "s1_n_smooth",
    "n_smooth_le_m_smooth",
    "log_rd_bound",
    "max_log_rd",
    "rd_bound_holds",
    "full_ratio",
    "full_mean",
    "theory_bound",
    "warnings",
];

fn resonate(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let cfg = ctx.cfg;
    let q = ctx.fq.q();
    let ens = ctx.ensemble(cfg.n)?;
    let full = ctx.l_values(&ens)?;
    let full_mean = full.iter().fold(BigRational::from_integer(0.into()), |a, b| a + b) / BigInt::from(full.len());
    let cs: Vec<f64> = if !cfg.c_sweep.is_empty() {
        cfg.c_sweep.clone()
    } else {
        vec![cfg.c.unwrap_or(ResonanceConfig::default_for(q).c)]
    };
    let mut t = Table::new("resonator", &RESONATOR_COLUMNS);
    for c in cs {
        let rc = ResonanceConfig {
            c,
            n_override: cfg.n_trunc.first().copied(),
            m_override: cfg.m,
        };
        let pc = ctx.characters(rc.prime_degree(q, cfg.n)?)?;
        let run = run_resonance(&ens, &pc, &rc, Some(&full))?;
        t.push(vec![
            run.c.into(),
            run.n_trunc.into(),
            run.m.into(),
            Value::rational(&run.s1),
            Value::rational(&run.s2),
            Value::rational(&run.ratio),
            run.argmax_d.to_string().into(),
            Value::rational(&run.max_l_short),
            Value::rational(&run.min_l_short),
            Value::rational(&run.mean_l_short),
            run.sandwich_holds.into(),
            run.ratio_ge_mean.into(),
            Value::rational(&run.s1_n_smooth),
            Value::opt_bool(run.n_smooth_le_m_smooth),
            run.log_rd_bound.into(),
            run.max_log_rd.into(),
            run.rd_bound_holds.into(),
            run.full_ratio.as_ref().map_or(Value::Null, Value::rational),
            Value::rational(&full_mean),
            Value::opt_float(run.theory_bound),
            run.warnings.join("; ").into(),
        ]);
    }
    report.tables = vec![t];
    Ok(())
}

fn constants(ctx: &mut Ctx, report: &mut Report) -> Run<()> {
    let cfg = ctx.cfg;
    let q = ctx.fq.q();
    let c2 = c2_report(q);
    let mut t2 = Table::new(
        "c2",
        &["q", "computed", "reference", "band_low", "band_high", "discrepancy"],
    );
    t2.push(vec![
        q.into(),
        c2.computed.into(),
        Value::opt_float(c2.reference),
        C2_REFERENCE_BAND.0.into(),
        C2_REFERENCE_BAND.1.into(),
        Value::opt_bool(c2.discrepancy),
    ]);
    let mut alt = Table::new("c2_alternatives", &["reading", "value", "in_band"]);
    for (name, v) in &c2.alternatives {
        let in_band = (C2_REFERENCE_BAND.0..=C2_REFERENCE_BAND.1).contains(v);
        alt.push(vec![(*name).into(), (*v).into(), in_band.into()]);
    }
    let mut model = Table::new(
        "model",
        &["q", "n", "zeta_a2", "c3", "c_star", "default_c", "beta", "refine", "resonator_c"],
    );
    model.push(vec![
        q.into(),
        cfg.n.into(),
        zeta_a2(q).into(),
        c3().into(),
        c_star(q).into(),
        ResonanceConfig::default_for(q).c.into(),
        cfg.beta.into(),
        cfg.refine.into(),
        resonator_constant(q, cfg.n, cfg.beta, cfg.refine).into(),
    ]);
    let mut tb = Table::new("tau_beta", &["n", "beta", "tau", "useful", "tail_target", "note"]);
    match tau_beta_n(q, cfg.n, cfg.beta) {
        Ok(v) => tb.push(vec![
            cfg.n.into(),
            cfg.beta.into(),
            v.value.into(),
            v.useful.into(),
            resonance_tail_target(q, cfg.beta).into(),
            "".into(),
        ]),
        Err(e) => tb.push(vec![
            cfg.n.into(),
            cfg.beta.into(),
            Value::Null,
            Value::Null,
            resonance_tail_target(q, cfg.beta).into(),
            e.to_string().into(),
        ]),
    }
    let lengths: Vec<usize> = if cfg.n_trunc.is_empty() {
        (1..=6).collect()
    } else {
        cfg.n_trunc.clone()
    };
    let mut ep = Table::new(
        "e_products",
        &["n_trunc", "e", "e1", "e2", "ln_e", "ln_e_asymptotic", "asymptotic_ratio", "ln_e_discrete", "discrete_ratio"],
    );
    for len in lengths {
        let e = euler_e_products(q, len)?;
        ep.push(vec![
            len.into(),
            e.e.into(),
            e.e1.into(),
            e.e2.into(),
            e.ln_e.into(),
            e.ln_e_asymptotic.into(),
            e.asymptotic_ratio().into(),
            e.ln_e_discrete.into(),
            (e.ln_e / e.ln_e_discrete).into(),
        ]);
    }
    report.tables = vec![t2, alt, model, tb, ep];
    Ok(())
}

/// Tally for one verification check.
struct Check {
    name: &'static str,
    n: Option<usize>,
    cases: u64,
    failures: u64,
    detail: String,
}

impl Check {
    fn new(name: &'static str, n: Option<usize>) -> Self {
        Self {
            name,
            n,
            cases: 0,
            failures: 0,
            detail: String::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.detail.is_empty() {
                self.detail = what();
            }
        }
    }
}

/// Largest degree for the direct (character sum) route inside verify.
const VERIFY_DIRECT_MAX: usize = 4;
/// Largest `q^(2 deg D)` for the `c_n = 0` scan inside verify.
const VERIFY_ORTHO_BUDGET: u64 = 50_000_000;

fn verify(ctx: &mut Ctx, report: &mut Report) -> Run<bool> {
    let cfg = ctx.cfg;
    let fq = ctx.fq;
    let q = fq.q();
    let mut checks = Vec::new();
    let kernel = SymbolKernel::new(fq);
    for m in 1..=cfg.n {
        guard(cfg, m)?;
        let ens = ctx.ensemble(m)?;
        let pc_full = ctx.characters(LRoute::Full.prime_degree(m).max(1))?;
        let full: Vec<LData> = ens.l_data(&pc_full, LRoute::Full)?;
        let cached = ctx.l_data(&ens)?;

        let mut artin = Check::new("artin_integrality", Some(m));
        let mut fe = Check::new("functional_equation", Some(m));
        let mut rh = Check::new("riemann_hypothesis", Some(m));
        let mut sym = Check::new("symmetric_vs_full", Some(m));
        for (l, c) in full.iter().zip(&cached) {
            let inv = class_invariant(l);
            artin.record(inv.is_ok(), || format!("D={}: {:?}", l.d, inv.err()));
            fe.record(verify_functional_equation(l), || format!("D={}", l.d));
            let dev = max_rh_deviation(l)?;
            rh.record(dev <= cfg.tol, || format!("D={} deviation {dev:e}", l.d));
            let s = completed_l_symmetric(&pc_full, &l.d)?;
            sym.record(&s == l && c == l, || format!("D={}", l.d));
        }
        checks.extend([artin, fe, rh, sym]);

        let mut ortho = Check::new("character_sum_vanishes", Some(m));
        let cost = (q as u64).saturating_pow(2 * m as u32);
        if cost <= VERIFY_ORTHO_BUDGET {
            for d in ens.members() {
                for k in [m, m + 1] {
                    if k > m && cost.saturating_mul(q as u64) > VERIFY_ORTHO_BUDGET {
                        continue;
                    }
                    let s = kernel.char_sum_over_mn(d, k)?;
                    ortho.record(s == 0, || format!("D={d} n={k} sum={s}"));
                }
            }
        } else {
            ortho.detail = format!("skipped: q^(2n) = {cost} above {VERIFY_ORTHO_BUDGET}");
        }
        checks.push(ortho);

        if m <= VERIFY_DIRECT_MAX {
            let mut ev = Check::new("euler_vs_direct", Some(m));
            for d in ens.members() {
                let ok = l_coefficients(&pc_full, d)? == l_coefficients_direct(fq, d)?;
                ev.record(ok, || format!("D={d}"));
            }
            checks.push(ev);
        }

        // the truncation degree involves log log n
        if m < 2 {
            continue;
        }
        let mut sw = Check::new("resonator_sandwich", Some(m));
        let rc = ResonanceConfig::default_for(q);
        let pc = ctx.characters(rc.prime_degree(q, m)?)?;
        let run = run_resonance(&ens, &pc, &rc, None)?;
        sw.record(run.sandwich_holds, || format!("N={} M={}", run.n_trunc, run.m));
        sw.record(run.rd_bound_holds, || format!("log R_D bound, N={}", run.n_trunc));
        checks.push(sw);
    }

    let max_deg = cfg.n.min(3);
    let table = ctx.table(max_deg)?;
    let cmp = compare_symbol_routes(&table, max_deg)?;
    checks.push(Check {
        name: "symbol_oracle",
        n: Some(max_deg),
        cases: cmp.pairs,
        failures: cmp.mismatches,
        detail: cmp
            .first_mismatch
            .map(|(f, d)| format!("f={f} D={d}"))
            .unwrap_or_default(),
    });

    let mut id = Check::new("local_identities", None);
    let mut rs: Vec<BigRational> = (0..6).map(|k| BigRational::new(k.into(), 7.into())).collect();
    for n_trunc in 2..=4usize {
        for deg in 1..n_trunc {
            rs.push(resonator_prime_coeff(fq, deg, n_trunc));
        }
    }
    for deg in 1..=2u32 {
        let p_norm = (q as u64).pow(deg);
        for r in &rs {
            let lf = LocalFactors::new(p_norm, r.clone())?;
            let (lhs, rhs) = local_factor_s_identity(&lf);
            id.record(lhs == rhs && local_factor_s_euler_form(&lf) == lhs, || {
                format!("S identity |P|={p_norm} r={r}")
            });
            if r < &BigRational::new(3.into(), 4.into()) {
                let ri = local_factor_r_identity(&lf, 200);
                id.record(ri.holds && RIdentity::euler_form(&lf) == ri.closed_form, || {
                    format!("R identity |P|={p_norm} r={r}")
                });
            }
        }
    }
    checks.push(id);

    let mut t = Table::new("checks", &["check", "n", "cases", "failures", "status", "detail"]);
    let (mut cases, mut failures) = (0u64, 0u64);
    for c in &checks {
        cases += c.cases;
        failures += c.failures;
        t.push(vec![
            c.name.into(),
            c.n.map_or(Value::Null, Value::from),
            c.cases.into(),
            c.failures.into(),
            if c.failures == 0 { "PASS" } else { "FAIL" }.into(),
            c.detail.clone().into(),
        ]);
    }
    let mut s = Table::new("summary", &["checks", "cases", "failures", "status"]);
    s.push(vec![
        checks.len().into(),
        cases.into(),
        failures.into(),
        if failures == 0 { "PASS" } else { "FAIL" }.into(),
    ]);
    report.tables = vec![s, t];
    Ok(failures == 0)
}
