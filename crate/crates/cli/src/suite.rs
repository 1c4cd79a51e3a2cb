use crate::cache::DiskCache;
use crate::config::SuiteConfig;
use crate::report::{Bound, CheckRecord, Environment, PlotTable, Status, VerificationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;
use turnpoint::grushin::{gap_statistic, plancherel_report, quasi_triangle_ratio, volume, GrushinModel, PlancherelOptions, PlancherelQuery, Point, Spectra};
use turnpoint::olver::{build_frame, certify_approximation, FrameConfig, NormalizedPotential};
use turnpoint::potentials::{check_membership, make_potential, rescale, Family, GridSpec, Potential, PotentialSpec};
use turnpoint::schrodinger::{diagnostics, eigen_key, solve_cached, solve_eigen, EigenStore, Eigenpair};
use turnpoint::semiclassical::{bs_report, k0, BS_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Membership,
    Spectra,
    Diagnostics,
    BohrSommerfeld,
    Olver,
    Grushin,
    Geometry,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Membership, Stage::Spectra, Stage::Diagnostics, Stage::BohrSommerfeld, Stage::Olver, Stage::Grushin, Stage::Geometry];
}

pub struct RunOptions {
    pub stages: Vec<Stage>,
    pub jobs: usize,
    pub seed: u64,
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    cache: Arc<DiskCache>,
    seed: u64,
    potentials: Vec<Potential>,
    /// (potential index, ξ) → eigenpairs n = 1..=n_max in order.
    spectra: BTreeMap<(usize, u64), Vec<Eigenpair>>,
    checks: Vec<CheckRecord>,
    plots: BTreeMap<String, PlotTable>,
}

impl Ctx<'_> {
    fn push(&mut self, id: String, measured: f64, bound: Bound, pass_fail: bool, t: Instant, note: String) {
        let status = if !pass_fail {
            Status::ReportOnly
        } else if bound.contains(measured) {
            Status::Pass
        } else {
            Status::Fail
        };
        let measured = measured.is_finite().then_some(measured);
        self.checks.push(CheckRecord { check_id: id, status, measured, bound_or_band: bound, runtime_s: t.elapsed().as_secs_f64(), note });
    }

    fn plot(&mut self, name: &str, columns: &[&str], series: String, values: Vec<f64>) {
        if values.iter().any(|v| !v.is_finite()) {
            return;
        }
        let t = self.plots.entry(name.to_string()).or_insert_with(|| PlotTable { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] });
        t.rows.push((series, values));
    }
}

fn is_oscillator(v: &Potential) -> bool {
    let s = v.spec();
    s.family == Family::Power && s.sigma == 1.0
}

fn ladder_energy(v: &Potential, xi: f64, n: usize) -> Option<f64> {
    is_oscillator(v).then(|| (xi * v.multiplier()).sqrt() * (2 * n - 1) as f64)
}

/// Runs the requested stages in dependency order. A hard failure stops the
/// run and is recorded in `halted`; the checks gathered so far are kept.
pub fn run_suite(cfg: &SuiteConfig, opts: &RunOptions) -> anyhow::Result<VerificationReport> {
    cfg.validate()?;
    let cache_dir = cfg.cache_dir.clone().unwrap_or_else(|| cfg.output_dir.join("cache"));
    let cache = Arc::new(DiskCache::open(&cache_dir)?);
    let echo = serde_json::to_value(cfg)?;
    let hash: String = Sha256::digest(echo.to_string().as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let environment = Environment {
        version: env!("CARGO_PKG_VERSION").to_string(),
        os: std::env::consts::OS.to_string(),
        arch: std::env::consts::ARCH.to_string(),
        jobs: opts.jobs,
        seed: opts.seed,
        config_hash: hash,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build()?;
    let mut ctx = Ctx { cfg, cache, seed: opts.seed, potentials: vec![], spectra: BTreeMap::new(), checks: vec![], plots: BTreeMap::new() };
    let mut stages = opts.stages.clone();
    stages.sort();
    stages.dedup();
    let halted = pool.install(|| {
        for stage in &stages {
            let r = match stage {
                Stage::Membership => membership(&mut ctx),
                Stage::Spectra => spectra(&mut ctx),
                Stage::Diagnostics => diagnostics_stage(&mut ctx),
                Stage::BohrSommerfeld => bohr_sommerfeld(&mut ctx),
                Stage::Olver => olver(&mut ctx),
                Stage::Grushin => grushin(&mut ctx),
                Stage::Geometry => geometry(&mut ctx),
            };
            if let Err(e) = r {
                return Some(format!("{stage:?}: {e}"));
            }
        }
        None
    });
    Ok(VerificationReport { environment, config: echo, checks: ctx.checks, plots: ctx.plots, halted })
}

fn membership(ctx: &mut Ctx) -> anyhow::Result<()> {
    let mut failed = vec![];
    for spec in &ctx.cfg.potentials {
        let t = Instant::now();
        let v = make_potential(spec.clone())?;
        let r = check_membership(&v, v.d(), &GridSpec::default());
        let id = format!("membership/{}", v.label());
        if !r.is_member {
            failed.push(format!("{}: {}", v.label(), r.reason.clone().unwrap_or_default()));
        }
        ctx.push(id, if r.is_member { 1.0 } else { 0.0 }, Bound::at_least(1.0), true, t, r.reason.unwrap_or_default());
        ctx.push(format!("membership/{}/kappa", v.label()), r.kappa_estimate, Bound::default(), false, t, String::new());
        ctx.potentials.push(v);
    }
    anyhow::ensure!(failed.is_empty(), "uncertified potentials: {}", failed.join("; "));
    Ok(())
}

fn ensure_potentials(ctx: &mut Ctx) -> anyhow::Result<()> {
    if ctx.potentials.is_empty() {
        membership(ctx)?;
    }
    Ok(())
}

fn spectra(ctx: &mut Ctx) -> anyhow::Result<()> {
    ensure_potentials(ctx)?;
    let cfg = ctx.cfg;
    for (i, v) in ctx.potentials.clone().iter().enumerate() {
        for &xi in &cfg.xi_grid {
            let t = Instant::now();
            let store: &dyn EigenStore = ctx.cache.as_ref();
            let solved: Vec<_> = (1..=cfg.n_max).into_par_iter().map(|n| solve_cached(Some(store), v, xi, n, &cfg.solver)).collect();
            let errors: Vec<String> = solved.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
            let id = format!("spectra/{}/xi={xi}/solves", v.label());
            ctx.push(id, errors.len() as f64, Bound::at_most(0.0), true, t, errors.first().cloned().unwrap_or_default());
            anyhow::ensure!(errors.is_empty(), "{} at xi = {xi}: {}", v.label(), errors[0]);
            let pairs: Vec<Eigenpair> = solved.into_iter().map(Result::unwrap).collect();
            if pairs.iter().any(|p| ladder_energy(v, xi, p.n).is_some()) {
                let worst = pairs
                    .iter()
                    .map(|p| {
                        let e = ladder_energy(v, xi, p.n).unwrap();
                        (p.energy - e).abs() / e
                    })
                    .fold(0.0, f64::max);
                ctx.push(format!("spectra/{}/xi={xi}/oscillator", v.label()), worst, Bound::at_most(cfg.tolerances.oscillator_rel), true, t, String::new());
            }
            ctx.spectra.insert((i, xi.to_bits()), pairs);
        }
    }
    cache_spot_check(ctx)
}

/// Re-solves three random cached keys and compares energies.
fn cache_spot_check(ctx: &mut Ctx) -> anyhow::Result<()> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let keys: Vec<(usize, f64, usize)> = (0..3)
        .map(|_| (rng.gen_range(0..ctx.potentials.len()), ctx.cfg.xi_grid[rng.gen_range(0..ctx.cfg.xi_grid.len())], rng.gen_range(1..=ctx.cfg.n_max)))
        .collect();
    let mut worst = 0.0f64;
    for (i, xi, n) in keys {
        let v = &ctx.potentials[i];
        let cached = ctx.cache.load(&eigen_key(v, xi, n, &ctx.cfg.solver)).ok_or_else(|| anyhow::anyhow!("cache miss for {} n = {n}", v.label()))?;
        let fresh = solve_eigen(v, xi, n, &ctx.cfg.solver)?;
        worst = worst.max((cached.energy - fresh.energy).abs() / fresh.energy);
    }
    ctx.push("cache/spot-check".into(), worst, Bound::at_most(ctx.cfg.tolerances.cache_rel), true, t, String::new());
    Ok(())
}

fn ensure_spectra(ctx: &mut Ctx) -> anyhow::Result<()> {
    if ctx.spectra.is_empty() {
        spectra(ctx)?;
    }
    Ok(())
}

fn diagnostics_stage(ctx: &mut Ctx) -> anyhow::Result<()> {
    ensure_spectra(ctx)?;
    let tol = ctx.cfg.tolerances.clone();
    let entries: Vec<((usize, u64), Vec<Eigenpair>)> = ctx.spectra.iter().map(|(k, v)| (*k, v.clone())).collect();
    for ((i, xib), pairs) in entries {
        let v = ctx.potentials[i].clone();
        let xi = f64::from_bits(xib);
        let t = Instant::now();
        let reports = pairs.par_iter().map(|p| diagnostics(p, &v, xi)).collect::<Result<Vec<_>, _>>()?;
        let tag = format!("{}/xi={xi}", v.label());
        let bad_zeros = reports.iter().zip(&pairs).filter(|(r, p)| r.zero_count != p.n - 1 || r.zeros_outside_classical != 0).count();
        ctx.push(format!("diagnostics/{tag}/zero-count"), bad_zeros as f64, Bound::at_most(0.0), true, t, String::new());
        let fh = reports.iter().map(|r| r.fh_residual).fold(0.0, f64::max);
        ctx.push(format!("diagnostics/{tag}/feynman-hellmann"), fh, Bound::at_most(tol.feynman_hellmann), true, t, String::new());
        let vmin = reports.iter().map(|r| r.virial_ratio).fold(f64::INFINITY, f64::min);
        let vmax = reports.iter().map(|r| r.virial_ratio).fold(0.0, f64::max);
        ctx.push(format!("diagnostics/{tag}/virial-max"), vmax, Bound::at_most(1.0), true, t, String::new());
        ctx.push(format!("diagnostics/{tag}/virial-min"), vmin, Bound::at_least(f64::MIN_POSITIVE), true, t, String::new());
        if is_oscillator(&v) {
            let dev = reports.iter().map(|r| (r.virial_ratio - 0.5).abs()).fold(0.0, f64::max);
            ctx.push(format!("diagnostics/{tag}/virial-oscillator"), dev, Bound::at_most(tol.virial_oscillator), true, t, String::new());
        }
        let sup = |f: fn(&turnpoint::schrodinger::DiagnosticsReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
        ctx.push(format!("diagnostics/{tag}/transition-bound"), sup(|r| r.transition_bound_const), Bound::default(), false, t, String::new());
        ctx.push(format!("diagnostics/{tag}/uniform-bound"), sup(|r| r.uniform_bound_const), Bound::default(), false, t, String::new());
        let lb = reports.iter().map(|r| r.lb_product).fold(f64::INFINITY, f64::min);
        ctx.push(format!("diagnostics/{tag}/lower-bound"), lb, Bound::default(), false, t, String::new());

        let t = Instant::now();
        let levels = [1, ctx.cfg.n_max];
        let mut worst = 0.0f64;
        for s in [0.5, 2.0] {
            let vt = rescale(&v, s)?;
            for &n in &levels {
                let a = solve_eigen(&vt, xi, n, &ctx.cfg.solver)?.energy;
                worst = worst.max((a - s * s * pairs[n - 1].energy).abs() / a);
            }
        }
        ctx.push(format!("diagnostics/{tag}/covariance"), worst, Bound::at_most(tol.covariance_rel), true, t, String::new());
    }
    Ok(())
}

fn bohr_sommerfeld(ctx: &mut Ctx) -> anyhow::Result<()> {
    ensure_spectra(ctx)?;
    let entries: Vec<((usize, u64), Vec<f64>)> = ctx.spectra.iter().map(|(k, v)| (*k, v.iter().map(|p| p.energy).collect())).collect();
    for ((i, xib), energies) in entries {
        let t = Instant::now();
        let v = ctx.potentials[i].clone();
        let xi = f64::from_bits(xib);
        let eigen: Vec<(usize, f64)> = energies.iter().enumerate().map(|(k, e)| (k + 1, *e)).collect();
        let r = bs_report(&v, xi, &eigen)?;
        for rec in &r.records {
            ctx.plot("bs_error", &["xi", "n", "energy", "count", "error"], v.label().to_string(), vec![xi, rec.n as f64, rec.energy, rec.count, rec.error]);
        }
        ctx.push(format!("bohr-sommerfeld/{}/xi={xi}", v.label()), r.max_error, Bound::at_most(BS_BOUND), true, t, String::new());
    }
    Ok(())
}

fn olver(ctx: &mut Ctx) -> anyhow::Result<()> {
    ensure_potentials(ctx)?;
    let tol = ctx.cfg.tolerances.clone();
    for v in ctx.potentials.clone() {
        let t = Instant::now();
        let u = NormalizedPotential::new(v.clone())?;
        let r = certify_approximation(&u, &ctx.cfg.olver_alphas, 16000)?;
        for p in &r.pairs {
            ctx.plot("olver_alpha", &["alpha", "sup_rel_err"], v.label().to_string(), vec![p.alpha, p.sup_rel_err]);
        }
        for (k, q) in r.error_ratios.iter().enumerate() {
            let (a, b) = (ctx.cfg.olver_alphas[k], ctx.cfg.olver_alphas[k + 1]);
            let band = if b == 2.0 * a { Bound::band(tol.olver_ratio_band.0, tol.olver_ratio_band.1) } else { Bound::default() };
            let graded = band != Bound::default();
            ctx.push(format!("olver/{}/ratio-{a}-{b}", v.label()), *q, band, graded, t, String::new());
        }
        ctx.push(format!("olver/{}/virial-min", v.label()), r.virial_min, Bound::default(), false, t, String::new());

        let t = Instant::now();
        let fine = build_frame(&u, &FrameConfig::default())?;
        let d = FrameConfig::default();
        let coarse = build_frame(&u, &FrameConfig { points_left: d.points_left / 2, points_right: d.points_right / 2, j_panels: d.j_panels / 2, ..d })?;
        let change = (fine.j_value - coarse.j_value).abs() / fine.j_value;
        ctx.push(format!("olver/{}/j-value", v.label()), fine.j_value, Bound::at_least(0.0), true, t, String::new());
        ctx.push(format!("olver/{}/j-halving", v.label()), change, Bound::at_most(tol.j_halving), true, t, String::new());
    }
    Ok(())
}

fn model(ctx: &Ctx) -> anyhow::Result<Option<GrushinModel>> {
    let Some(m) = &ctx.cfg.model else { return Ok(None) };
    let spec = if m.epsilon == 0.0 { PotentialSpec::power(m.sigma) } else { PotentialSpec::log_perturbed(m.sigma, m.epsilon) };
    let v = make_potential(spec)?;
    Ok(Some(GrushinModel::new(m.d1, m.d2, m.sigma, vec![v; m.d1])?))
}

fn grushin(ctx: &mut Ctx) -> anyhow::Result<()> {
    let Some(m) = model(ctx)? else { return Ok(()) };
    let cfg = ctx.cfg;
    let spectra = Spectra::new(&m, cfg.solver.clone()).with_store(ctx.cache.clone());
    let k = k0();
    let t = Instant::now();
    if cfg.n_max > k {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x9a9);
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..64)
            .map(|_| {
                let a: Vec<usize> = (0..m.d1).map(|_| rng.gen_range(1..=cfg.n_max - k)).collect();
                let b: Vec<usize> = a.iter().map(|x| x + k + rng.gen_range(0..=cfg.n_max - k - x)).collect();
                (a, b)
            })
            .collect();
        let gaps = cfg.lambda_grid.iter().map(|&l| gap_statistic(&m, &spectra, l, &pairs).map(|r| r.min_gap)).collect::<Result<Vec<_>, _>>()?;
        let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = gaps.iter().cloned().fold(0.0, f64::max);
        for (l, g) in cfg.lambda_grid.iter().zip(&gaps) {
            ctx.plot("gap_lambda", &["lambda", "min_gap"], "gap".into(), vec![*l, *g]);
        }
        ctx.push("grushin/gap/min".into(), min, Bound::at_least(f64::MIN_POSITIVE), true, t, String::new());
        ctx.push("grushin/gap/spread".into(), (max - min) / min, Bound::default(), false, t, String::new());
    }
    for &gamma in &cfg.gamma_grid {
        let t = Instant::now();
        let queries: Vec<PlancherelQuery> = cfg
            .lambda_grid
            .iter()
            .flat_map(|&lambda| {
                let r = lambda.powf(-0.5);
                [0.0, r, -r].into_iter().map(move |x| PlancherelQuery { lambda, x: vec![x; m.d1], gamma })
            })
            .collect();
        let r = plancherel_report(&m, &spectra, &queries, &PlancherelOptions::default())?;
        for p in &r.points {
            ctx.plot("density_lambda", &["gamma", "lambda", "x0", "value", "uncertainty"], format!("gamma={gamma}"), vec![gamma, p.lambda, p.x[0], p.value, p.uncertainty]);
        }
        ctx.push(format!("grushin/plancherel/gamma={gamma}/sup"), r.sup_value, Bound::at_least(0.0), true, t, format!("n_max {}", r.n_max));
    }
    Ok(())
}

fn geometry(ctx: &mut Ctx) -> anyhow::Result<()> {
    let Some(m) = model(ctx)? else { return Ok(()) };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x6e0);
    let point = |rng: &mut ChaCha8Rng| Point {
        x: (0..m.d1).map(|_| rng.gen_range(-10.0..10.0)).collect(),
        y: (0..m.d2).map(|_| rng.gen_range(-10.0..10.0)).collect(),
    };
    let t = Instant::now();
    let cap = 2f64.powf(m.q());
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let z = point(&mut rng);
        let r = 10f64.powf(rng.gen_range(-4.0..4.0));
        worst = worst.max(volume(&m, &z, 2.0 * r) / volume(&m, &z, r) / cap);
    }
    ctx.push("geometry/doubling".into(), worst, Bound::at_most(1.0 + 1e-12), true, t, String::new());
    let t = Instant::now();
    let mut c = 0.0f64;
    for _ in 0..1000 {
        let (a, b, d) = (point(&mut rng), point(&mut rng), point(&mut rng));
        c = c.max(quasi_triangle_ratio(&m, &a, &b, &d));
    }
    ctx.push("geometry/quasi-triangle".into(), c, Bound::default(), false, t, String::new());
    Ok(())
}
