use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use lmoments::arith::SatakeSpec;
use lmoments::deviations::{
    fubini_check, joint_tail_ratio, large_deviation_profile, selberg_clt_test, Region, TailGrid,
};
use lmoments::harper::{build_schedule, chandee_audit, classify_sets, asymptotic_schedule, HarperSchedule, PolyBank};
use lmoments::lfunc::{
    hurwitz_from_characters, hurwitz_zeta, parse_selector, CriticalLineGrid, GridOptions, GridSpec, LFunctionId,
    DEFAULT_LOG_PRECISION,
};
use lmoments::moments::moment::{
    default_step, joint_moment_from_grids, moment_curve, scaling_fit, twisted_cross_fits, twisted_hurwitz_curve,
    MomentRecord, MomentSpec, Window,
};
use lmoments::moments::windowed::windowed_integrals_with_step;
use lmoments::verify::{sample_points, Suite};
use serde::Serialize;

use crate::cache::{GridCache, CACHE_VERSION};
use crate::config::ConfigFile;
use crate::manifest::Recorder;
use crate::{
    known_keys, ChandeeArgs, Cli, CliError, Command, DistArgs, DistCommand, EvalArgs, HarperCommand, HurwitzArgs,
    HurwitzCommand, MomentArgs, ScheduleArgs, VerifyArgs, WindowedArgs,
};

type Res<T> = Result<T, CliError>;

struct Ctx {
    cfg: ConfigFile,
    cache: GridCache,
    rec: Recorder,
    timings: bool,
}

impl Ctx {
    fn grid(&mut self, id: &LFunctionId, spec: GridSpec, precision: f64) -> Res<CriticalLineGrid> {
        let opts = GridOptions { precision, ..GridOptions::default() };
        Ok(self.cache.get(id, spec, opts)?)
    }

    /// Write the primary output to `--out` (plus a manifest) or to stdout.
    fn emit(&mut self, out: Option<PathBuf>, bytes: &[u8]) -> Res<()> {
        let out = self.cfg.pick("out", out)?;
        self.rec.manifest.cache = self.cache.stats;
        match out {
            Some(path) => {
                self.rec.write(&path, bytes)?;
                self.rec.write_manifest(&path)?;
            }
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(bytes)?;
                so.flush()?;
            }
        }
        Ok(())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialise") + "\n"
}

/// 17 significant digits, enough to round-trip an f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn selector(s: &str) -> Res<Vec<(LFunctionId, f64)>> {
    parse_selector(s).map_err(|e| usage(format!("--lfunc '{s}': {e}")))
}

fn positive_list(name: &str, v: Vec<f64>) -> Res<Vec<f64>> {
    if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(usage(format!("--{name} needs positive finite values")));
    }
    Ok(v)
}

pub fn dispatch(cli: Cli) -> Res<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p, &known_keys())?,
        None => ConfigFile::default(),
    };
    let threads = cfg.pick("threads", cli.threads)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("cannot size the worker pool: {e}")))?;
    }
    let cache_dir = cfg.pick("cache-dir", cli.cache_dir.clone())?;
    let timings = cli.timings || cfg.or("timings", None, false)?;
    let name = command_name(&cli.command);
    let mut rec = Recorder::new(&name);
    for (k, v) in &cfg.values {
        rec.set(k, v);
    }
    if let Some(n) = threads {
        rec.set("threads", n);
    }
    let mut ctx = Ctx { cfg, cache: GridCache::new(cache_dir, CACHE_VERSION), rec, timings };
    match cli.command {
        Command::Eval(a) => eval(&mut ctx, a),
        Command::Moment(a) => moment(&mut ctx, a, false),
        Command::Fit(a) => moment(&mut ctx, a, true),
        Command::Windowed(a) => windowed(&mut ctx, a),
        Command::Chandee(a) => chandee(&mut ctx, a),
        Command::Harper(HarperCommand::Schedule(a)) => harper(&mut ctx, a, false),
        Command::Harper(HarperCommand::Classify(a)) => harper(&mut ctx, a, true),
        Command::Verify(a) => verify(&mut ctx, a),
        Command::Dist(d) => dist(&mut ctx, d),
        Command::Hurwitz(HurwitzCommand::Identity(a)) => hurwitz_identity(&mut ctx, a),
        Command::Hurwitz(HurwitzCommand::Twisted(a)) => hurwitz_twisted(&mut ctx, a),
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Eval(_) => "eval".into(),
        Command::Moment(_) => "moment".into(),
        Command::Fit(_) => "fit".into(),
        Command::Windowed(_) => "windowed".into(),
        Command::Chandee(_) => "chandee".into(),
        Command::Harper(HarperCommand::Schedule(_)) => "harper schedule".into(),
        Command::Harper(HarperCommand::Classify(_)) => "harper classify".into(),
        Command::Verify(_) => "verify".into(),
        Command::Dist(d) => format!(
            "dist {}",
            match d {
                DistCommand::Phi(_) => "phi",
                DistCommand::Clt(_) => "clt",
                DistCommand::Joint(_) => "joint",
                DistCommand::Ldp(_) => "ldp",
                DistCommand::Fubini(_) => "fubini",
            }
        ),
        Command::Hurwitz(HurwitzCommand::Identity(_)) => "hurwitz identity".into(),
        Command::Hurwitz(HurwitzCommand::Twisted(_)) => "hurwitz twisted".into(),
    }
}

fn eval(ctx: &mut Ctx, a: EvalArgs) -> Res<()> {
    let sel: String = ctx.cfg.need("lfunc", a.lfunc)?;
    let factors = selector(&sel)?;
    let [(id, _)] = factors.as_slice() else {
        return Err(usage("eval takes a single L-function"));
    };
    let t0: f64 = ctx.cfg.need("t0", a.t0)?;
    let t1: f64 = ctx.cfg.need("t1", a.t1)?;
    let step = ctx.cfg.or("step", a.step, default_step(t1.max(10.0)))?;
    let precision = ctx.cfg.or("precision", a.precision, DEFAULT_LOG_PRECISION)?;
    let spec = GridSpec::new(t0, t1, step).map_err(|e| usage(e.to_string()))?;
    for (k, v) in [("lfunc", sel.clone()), ("t0", num(t0)), ("t1", num(t1)), ("step", num(step)), ("precision", num(precision))] {
        ctx.rec.set(k, v);
    }
    ctx.rec.stage("evaluate");
    let g = ctx.grid(id, spec, precision)?;
    ctx.rec.stage("write");
    let mut clamped = vec![false; g.len()];
    for &i in &g.clamped {
        clamped[i] = true;
    }
    let mut s = String::with_capacity(48 * g.len());
    s.push_str("t,log_abs,clamped\n");
    for (j, v) in g.values.iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", num(g.t(j)), num(*v), u8::from(clamped[j])));
    }
    ctx.emit(a.out, s.as_bytes())
}

fn ids_and_k(ctx: &Ctx, lfunc: Option<String>, k: Option<String>) -> Res<(String, Vec<LFunctionId>, Vec<f64>)> {
    let sel: String = ctx.cfg.need("lfunc", lfunc)?;
    let factors = selector(&sel)?;
    let ids: Vec<LFunctionId> = factors.iter().map(|f| f.0.clone()).collect();
    let k = match ctx.cfg.list::<f64>("k", k)? {
        Some(k) if k.len() != ids.len() => {
            return Err(usage(format!("--k has {} entries for {} L-functions", k.len(), ids.len())))
        }
        Some(k) => k,
        None => factors.iter().map(|f| f.1).collect(),
    };
    Ok((sel, ids, k))
}

fn heights(ctx: &Ctx, t: Option<String>) -> Res<Vec<f64>> {
    let ts = ctx.cfg.list::<f64>("t", t)?.ok_or_else(|| usage("missing required --t"))?;
    positive_list("t", ts)
}

fn moment(ctx: &mut Ctx, a: MomentArgs, fit: bool) -> Res<()> {
    let (sel, ids, k) = ids_and_k(ctx, a.lfunc, a.k)?;
    let ts = heights(ctx, a.t)?;
    let t_max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = ctx.cfg.or("step", a.step, default_step(t_max))?;
    let precision = ctx.cfg.or("precision", a.precision, DEFAULT_LOG_PRECISION)?;
    let window = match ctx.cfg.or("window", a.window, "sharp".to_string())?.as_str() {
        "sharp" => Window::Sharp,
        "gaussian" => Window::Gaussian,
        w => return Err(usage(format!("--window must be sharp or gaussian, got '{w}'"))),
    };
    if fit && window != Window::Sharp {
        return Err(usage("fit uses the sharp window"));
    }
    let specs = ts
        .iter()
        .map(|&t| MomentSpec::with_step(ids.clone(), k.clone(), t, step, window))
        .collect::<lmoments::Result<Vec<_>>>()
        .map_err(|e| usage(e.to_string()))?;
    ctx.rec.set("lfunc", &sel);
    ctx.rec.set("k", k.iter().map(|x| num(*x)).collect::<Vec<_>>().join(","));
    ctx.rec.set("t", ts.iter().map(|x| num(*x)).collect::<Vec<_>>().join(","));
    ctx.rec.set("step", num(step));

    let mut records = Vec::with_capacity(ts.len());
    match window {
        Window::Sharp => {
            ctx.rec.stage("grids");
            let gspec = GridSpec::new(1.0, t_max, step)?;
            let grids = ids.iter().map(|id| ctx.grid(id, gspec, precision)).collect::<Res<Vec<_>>>()?;
            let refs: Vec<&CriticalLineGrid> = grids.iter().collect();
            ctx.rec.stage("integrate");
            for (spec, &t) in specs.iter().zip(&ts) {
                let t0 = Instant::now();
                let r = moment_curve(&refs, &k, &[t])?.remove(0);
                if let Some(w) = &r.warning {
                    log::warn!("T = {t}: {w}");
                }
                let ms = ctx.timings.then(|| t0.elapsed().as_millis() as u64);
                records.push(MomentRecord::new(spec, t, &r, ms));
            }
        }
        Window::Gaussian => {
            for spec in &specs {
                let t0 = Instant::now();
                ctx.rec.stage(&format!("T={}", spec.t));
                let (lo, hi) = spec.range();
                let gspec = GridSpec::new(lo, hi, step)?;
                let grids = ids.iter().map(|id| ctx.grid(id, gspec, precision)).collect::<Res<Vec<_>>>()?;
                let refs: Vec<&CriticalLineGrid> = grids.iter().collect();
                let r = joint_moment_from_grids(&refs, &k, spec.t, Window::Gaussian)?;
                let ms = ctx.timings.then(|| t0.elapsed().as_millis() as u64);
                records.push(MomentRecord::new(spec, spec.t, &r, ms));
            }
        }
    }
    let body = if fit {
        #[derive(Serialize)]
        struct FitOutput {
            fit: lmoments::moments::moment::FitResult,
            expected_exponent: f64,
            points: Vec<MomentRecord>,
        }
        let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.value)).collect();
        let f = scaling_fit(&pts).map_err(|e| match e {
            lmoments::Error::Fit(m) => usage(m),
            e => e.into(),
        })?;
        json_line(&FitOutput { fit: f, expected_exponent: specs[0].expected_exponent(), points: records })
    } else {
        records.iter().map(json_line).collect()
    };
    ctx.emit(a.out, body.as_bytes())
}

fn single_height(ctx: &Ctx, t: Option<String>) -> Res<f64> {
    match heights(ctx, t)?.as_slice() {
        [t] => Ok(*t),
        _ => Err(usage("--t takes a single height here")),
    }
}

fn windowed(ctx: &mut Ctx, a: WindowedArgs) -> Res<()> {
    let sel: String = ctx.cfg.need("lfunc", a.lfunc)?;
    let id: LFunctionId = sel.parse().map_err(|e| usage(format!("--lfunc '{sel}': {e}")))?;
    let sigma: f64 = ctx.cfg.need("sigma", a.sigma)?;
    let t = single_height(ctx, a.t)?;
    let n: usize = ctx.cfg.need("n", a.n)?;
    let step = ctx.cfg.or("step", a.step, 0.02)?;
    ctx.rec.stage("integrate");
    let r = windowed_integrals_with_step(&id, sigma, t, n, step)?;
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        r: lmoments::moments::WindowedIntegrals,
        triangle_holds: bool,
    }
    let triangle_holds = r.triangle_holds();
    ctx.emit(a.out, json_line(&Out { r, triangle_holds }).as_bytes())
}

fn chandee(ctx: &mut Ctx, a: ChandeeArgs) -> Res<()> {
    let sel: String = ctx.cfg.need("lfunc", a.lfunc)?;
    let id: LFunctionId = sel.parse().map_err(|e| usage(format!("--lfunc '{sel}': {e}")))?;
    let t = single_height(ctx, a.t)?;
    let x = ctx.cfg.or("x", a.x, t.powf(0.1))?;
    let step = ctx.cfg.or("step", a.step, 0.02)?;
    ctx.rec.stage("grid");
    let g = ctx.grid(&id, GridSpec::new(t, 2.0 * t, step)?, DEFAULT_LOG_PRECISION)?;
    ctx.rec.stage("audit");
    let r = chandee_audit(&g, x)?;
    ctx.emit(a.out, json_line(&r).as_bytes())
}

fn schedule_inputs(ctx: &Ctx, a: &ScheduleArgs) -> Res<(f64, Vec<f64>, Vec<SatakeSpec<f64>>)> {
    let sel: String = ctx.cfg.need("lfunc", a.lfunc.clone())?;
    let id: LFunctionId = sel.parse().map_err(|e| usage(format!("--lfunc '{sel}': {e}")))?;
    let sk = id.satake().map_err(|e| usage(e.to_string()))?;
    let specs: Vec<SatakeSpec<f64>> = sk.iter().map(|p| p.0.clone()).collect();
    let k = match ctx.cfg.list::<f64>("k", a.k.clone())? {
        Some(k) if k.len() != specs.len() => return Err(usage("--k length does not match --lfunc")),
        Some(k) => k,
        None => sk.iter().map(|p| p.1).collect(),
    };
    Ok((single_height(ctx, a.t.clone())?, k, specs))
}

fn harper(ctx: &mut Ctx, a: ScheduleArgs, classify: bool) -> Res<()> {
    let (t, k, specs) = schedule_inputs(ctx, &a)?;
    let asymptotic = a.asymptotic || ctx.cfg.or("asymptotic", None, false)?;
    let beta = ctx.cfg.or("beta", a.beta, lmoments::harper::DEFAULT_BETA)?;
    let eps = ctx.cfg.or("epsilon", a.epsilon, lmoments::harper::DEFAULT_EPSILON)?;
    ctx.rec.stage("schedule");
    let s: HarperSchedule = if asymptotic { asymptotic_schedule(t, &k, &specs)? } else { build_schedule(t, &k, &specs, beta, eps)? };
    if !classify {
        return ctx.emit(a.out, s.to_key_value().as_bytes());
    }
    let step = ctx.cfg.or("step", a.step, 0.02)?;
    ctx.rec.stage("bank");
    let bank = PolyBank::new(s.clone(), &k, &specs)?;
    ctx.rec.stage("classify");
    let c = classify_sets(&s, &bank, &GridSpec::new(t, 2.0 * t, step)?)?;
    #[derive(Serialize)]
    struct Out<'a> {
        schedule: &'a HarperSchedule,
        samples: usize,
        good_fraction: f64,
        measures: &'a [lmoments::harper::classify::MeasureEstimate],
    }
    let out = Out { schedule: &s, samples: c.labels.len(), good_fraction: c.good_fraction(), measures: &c.measures };
    ctx.emit(a.out, json_line(&out).as_bytes())
}

fn verify(ctx: &mut Ctx, a: VerifyArgs) -> Res<()> {
    let name: String = ctx.cfg.need("suite", a.suite)?;
    let suite: Suite = name.parse().map_err(|e: lmoments::Error| usage(e.to_string()))?;
    let seed = ctx.cfg.or("seed", a.seed, 0)?;
    ctx.rec.manifest.seed = Some(seed);
    ctx.rec.set("suite", suite.name());
    ctx.rec.stage("suite");
    let r = suite.run(seed)?;
    let text = serde_json::to_string_pretty(&r).expect("reports serialise") + "\n";
    ctx.emit(a.out, text.as_bytes())?;
    if r.pass {
        Ok(())
    } else {
        Err(CliError::SuiteFailed(r.suite))
    }
}

fn tail_grid(ctx: &mut Ctx, a: &DistArgs, default_region: Region) -> Res<(TailGrid, Vec<CriticalLineGrid>)> {
    let sel: String = ctx.cfg.need("lfunc", a.lfunc.clone())?;
    let ids: Vec<LFunctionId> = selector(&sel)?.into_iter().map(|f| f.0).collect();
    let t = single_height(ctx, a.t.clone())?;
    let region = match ctx.cfg.pick::<String>("region", a.region.clone())?.as_deref() {
        None => default_region,
        Some("full") => Region::Full,
        Some("dyadic") => Region::Dyadic,
        Some(r) => return Err(usage(format!("--region must be full or dyadic, got '{r}'"))),
    };
    let step = ctx.cfg.or("step", a.step, default_step(t))?;
    let v_step = ctx.cfg.or("v-step", a.v_step, 0.01)?;
    let (lo, hi) = region.range(t);
    ctx.rec.stage("grids");
    let spec = GridSpec::new(lo, hi, step)?;
    let grids = ids.iter().map(|id| ctx.grid(id, spec, DEFAULT_LOG_PRECISION)).collect::<Res<Vec<_>>>()?;
    let refs: Vec<&CriticalLineGrid> = grids.iter().collect();
    let tg = TailGrid::from_grids(&refs, t, v_step)?;
    ctx.rec.stage("statistics");
    Ok((tg, grids))
}

fn dist(ctx: &mut Ctx, d: DistCommand) -> Res<()> {
    match d {
        DistCommand::Phi(a) => {
            let (tg, _) = tail_grid(ctx, &a, Region::Full)?;
            // Several threshold vectors may be separated by ';'.
            let spec: String = ctx.cfg.need("v", a.v.clone())?;
            let rows = spec
                .split(';')
                .map(|row| {
                    row.split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("--v: cannot parse '{x}'"))))
                        .collect::<Res<Vec<f64>>>()
                })
                .collect::<Res<Vec<_>>>()?;
            let mut buf = Vec::new();
            tg.write_csv(&mut buf, &rows)?;
            ctx.emit(a.out, &buf)
        }
        DistCommand::Clt(a) => {
            let (_, grids) = tail_grid(ctx, &a, Region::Dyadic)?;
            if grids.len() != 1 {
                return Err(usage("clt takes a single L-function"));
            }
            let t = single_height(ctx, a.t.clone())?;
            let r = selberg_clt_test(&grids[0], t)?;
            ctx.emit(a.out, json_line(&r).as_bytes())
        }
        DistCommand::Joint(a) => {
            let (tg, _) = tail_grid(ctx, &a, Region::Full)?;
            let v = ctx.cfg.list::<f64>("v", a.v.clone())?.ok_or_else(|| usage("missing required --v"))?;
            #[derive(Serialize)]
            struct Out {
                t: f64,
                v: Vec<f64>,
                log_ratio: f64,
            }
            let log_ratio = joint_tail_ratio(&tg, &v)?;
            ctx.emit(a.out, json_line(&Out { t: tg.t, v, log_ratio }).as_bytes())
        }
        DistCommand::Ldp(a) => {
            let (tg, _) = tail_grid(ctx, &a, Region::Full)?;
            let c = ctx.cfg.list::<f64>("c", a.c.clone())?.ok_or_else(|| usage("missing required --c"))?;
            let r = large_deviation_profile(&tg, &c)?;
            ctx.emit(a.out, json_line(&r).as_bytes())
        }
        DistCommand::Fubini(a) => {
            let (tg, _) = tail_grid(ctx, &a, Region::Full)?;
            let k = ctx.cfg.list::<f64>("k", a.k.clone())?.ok_or_else(|| usage("missing required --k"))?;
            let r = fubini_check(&tg, &k)?;
            ctx.emit(a.out, json_line(&r).as_bytes())
        }
    }
}

fn hurwitz_identity(ctx: &mut Ctx, a: HurwitzArgs) -> Res<()> {
    let q: u64 = ctx.cfg.need("q", a.q)?;
    let seed = ctx.cfg.or("seed", a.seed, 0)?;
    let count = ctx.cfg.or("count", a.count, 100)?;
    let residues: Vec<u64> = match ctx.cfg.pick("a", a.a)? {
        Some(r) => vec![r],
        None => (1..=q).filter(|&r| lmoments::arith::primes::gcd(r, q) == 1).collect(),
    };
    ctx.rec.manifest.seed = Some(seed);
    #[derive(Serialize)]
    struct Row {
        a: u64,
        q: u64,
        max_residual: f64,
    }
    ctx.rec.stage("identity");
    let pts = sample_points(seed, count);
    let mut rows = Vec::new();
    for r in residues {
        let mut worst: f64 = 0.0;
        for &s in &pts {
            let direct = hurwitz_zeta(s, r, q, 1e-13).map_err(|e| usage(e.to_string()))?;
            let split = hurwitz_from_characters(s, r, q, 1e-13)?;
            worst = worst.max((split - direct).norm() / direct.norm().max(1.0));
        }
        rows.push(Row { a: r, q, max_residual: worst });
    }
    let body: String = rows.iter().map(json_line).collect();
    ctx.emit(a.out, body.as_bytes())
}

fn hurwitz_twisted(ctx: &mut Ctx, a: HurwitzArgs) -> Res<()> {
    let r: u64 = ctx.cfg.need("a", a.a)?;
    let q: u64 = ctx.cfg.need("q", a.q)?;
    let k: f64 = ctx.cfg.need("k", a.k.clone())?.parse().map_err(|_| usage("--k takes one number here"))?;
    let ts = heights(ctx, a.t.clone())?;
    let t_max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = ctx.cfg.or("step", a.step, default_step(t_max))?;
    ctx.rec.stage("curve");
    let curve = twisted_hurwitz_curve(r, q, k, &ts, step)?;
    #[derive(Serialize)]
    struct Out {
        curve: Vec<lmoments::moments::moment::TwistedMoment>,
        cross_fits: Option<Vec<lmoments::moments::moment::CrossTermFit>>,
    }
    let cross_fits = if ts.len() >= 3 { Some(twisted_cross_fits(&curve)?) } else { None };
    ctx.emit(a.out, json_line(&Out { curve, cross_fits }).as_bytes())
}
