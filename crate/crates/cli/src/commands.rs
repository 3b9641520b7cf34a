use cantor_core::extractors::{check_independence, pushforward_is_fair, seqset_machine, slln_trace};
use cantor_core::machine::{preimage_search, pushforward_bounds};
use cantor_core::martingale::{capital_trace, divergence_witness, doob_report, ConditionalApprox, Divergence, Martingale};
use cantor_core::measure::{check_additivity, lebesgue_density_trace, AdditivityViolation};
use cantor_core::rational::{rat, to_f64, Frac, Rat};
use cantor_core::syntax::{ParseError, Tokens};
use cantor_core::transport::{
    avoidance_certificate, check_avoidance_empirical, generate_samples, make_instance, trace_point,
    verify_pushforward, TransportError,
};
use cantor_core::{BinWord, ClosedSetApprox, PointOracle, TransportPlan};
use num_traits::One;

use crate::report::{Report, Row};

/// Bits of each coordinate used when tracing seeded samples.
const SAMPLE_PRECISION: usize = 32;
/// Thresholds of the avoidance table.
const CERT_THRESHOLDS: [(i64, i64); 3] = [(1, 2), (1, 4), (1, 64)];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Failed(_) | CliError::Output { .. } => 1,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// Reads expressions from the positional arguments joined into one stream,
/// so `VN BERNOULLI 1/3 0` and `"VN" "BERNOULLI 1/3" "0"` parse alike.
pub struct Args(Tokens);

impl Args {
    pub fn new(parts: &[String]) -> Self {
        Args(Tokens::new(&parts.join(" ")))
    }

    pub fn get<T>(&mut self, f: impl FnOnce(&mut Tokens) -> Result<T, ParseError>) -> Result<T, CliError> {
        Ok(f(&mut self.0)?)
    }

    pub fn done(self) -> Result<(), CliError> {
        Ok(self.0.finish()?)
    }
}

pub fn one<T>(src: &str, f: impl FnOnce(&mut Tokens) -> Result<T, ParseError>) -> Result<T, CliError> {
    let mut t = Tokens::new(src);
    let v = f(&mut t)?;
    t.finish()?;
    Ok(v)
}

fn write_out(path: Option<&str>, text: impl FnOnce() -> String) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, text()).map_err(|e| CliError::Output { path: p.to_string(), message: e.to_string() })?;
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

pub fn additivity(args: &[String], depth: usize, out: Option<&str>) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let mu = a.get(Tokens::measure)?;
    a.done()?;
    let checked = check_additivity(&mu, depth);
    let mut r = Report::new();
    r.row(
        Row::new()
            .field("measure", mu.label())
            .field("depth", depth)
            .field("nodes", checked.nodes_checked)
            .field("violations", checked.violations.len()),
    );
    r.section(
        checked
            .violations
            .iter()
            .map(|v| match v {
                AdditivityViolation::NotAdditive { node, value, children } => Row::tagged("VIOLATION")
                    .field("node", node)
                    .field("kind", "not-additive")
                    .field("value", Frac(value))
                    .field("children", Frac(children)),
                AdditivityViolation::Negative { node, value } => Row::tagged("VIOLATION")
                    .field("node", node)
                    .field("kind", "negative")
                    .field("value", Frac(value))
                    .field("children", "-"),
            })
            .collect(),
    );
    write_out(out, || {
        let mut text = String::new();
        for node in BinWord::all_up_to(depth.saturating_sub(1)) {
            let value = mu.eval(&node);
            let children = mu.eval(&node.child(false)) + mu.eval(&node.child(true));
            let row = Row::new()
                .field("node", &node)
                .field("value", Frac(&value))
                .field("children", Frac(&children))
                .field("ok", value == children);
            text.push_str(&format!("{row}\n"));
        }
        text
    })?;
    if !checked.passed() {
        r.fail();
    }
    r.row(Row::new().field("result", verdict(checked.passed())));
    Ok(r)
}

pub fn pushforward(args: &[String], depth: usize) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let m = a.get(Tokens::machine)?;
    let mu = a.get(Tokens::measure)?;
    let tau = a.get(Tokens::word)?;
    a.done()?;
    let b = pushforward_bounds(&m, &mu, &tau, depth);
    let mut r = Report::new();
    r.row(
        Row::new()
            .field("machine", m.label())
            .field("measure", mu.label())
            .field("tau", &tau)
            .field("depth", depth)
            .field("interval", &b)
            .field("width", Frac(&b.width())),
    );
    Ok(r)
}

pub fn preimage(args: &[String], depth: usize) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let m = a.get(Tokens::machine)?;
    let mu = a.get(Tokens::measure)?;
    let tau = a.get(Tokens::word)?;
    a.done()?;
    let p = preimage_search(&m, &mu, &tau, depth);
    let mut r = Report::new();
    r.row(
        Row::new()
            .field("machine", m.label())
            .field("measure", mu.label())
            .field("tau", &tau)
            .field("depth", depth)
            .field("in_mass", Frac(&p.in_mass))
            .field("out_mass", Frac(&p.out_mass))
            .field("undecided_mass", Frac(&p.undecided_mass)),
    );
    let mut words: Vec<(&BinWord, &str)> = p
        .decided_in
        .iter()
        .map(|w| (w, "in"))
        .chain(p.decided_out.iter().map(|w| (w, "out")))
        .chain(p.undecided.iter().map(|w| (w, "undecided")))
        .collect();
    words.sort();
    r.section(words.into_iter().map(|(w, v)| Row::tagged("WORD").field("word", w).field("verdict", v)).collect());
    let total = p.total_mass();
    let ok = total == mu.total();
    if !ok {
        r.fail();
    }
    r.row(Row::new().field("total_mass", Frac(&total)).field("result", verdict(ok)));
    Ok(r)
}

pub struct AvoiderConfig<'a> {
    pub depth: usize,
    pub fuel: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<&'a str>,
}

pub fn avoider(args: &[String], cfg: AvoiderConfig) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let mu = a.get(Tokens::measure)?;
    let nu_prime = a.get(Tokens::measure)?;
    let x0 = a.get(Tokens::point)?;
    a.done()?;
    let inst = make_instance(mu, nu_prime, x0)?;
    let mut r = Report::new();
    r.row(
        Row::new()
            .field("mu", inst.mu.label())
            .field("nuprime", inst.nu_prime.label())
            .field("x0", &inst.x0)
            .field("depth", cfg.depth),
    );
    let plan = TransportPlan::new(inst.clone(), cfg.depth);
    let mut defects = Vec::new();
    for st in plan.stages() {
        for d in st.audit(&inst.nu) {
            defects.push(Row::tagged("DEFECT").field("stage", st.index).field("detail", format!("{d:?}")));
        }
    }
    if !defects.is_empty() {
        r.fail();
    }
    r.section(defects);
    let ledger = verify_pushforward(&plan, cfg.depth)?;
    r.row(
        Row::tagged("VERIFY")
            .field("columns", ledger.entries.len())
            .field("failures", ledger.failures().count())
            .field("result", verdict(ledger.passed())),
    );
    r.section(ledger.failures().map(|e| Row::tagged("FAIL").field("entry", e)).collect());
    if !ledger.passed() {
        r.fail();
    }
    write_out(cfg.out, || {
        let mut text = plan.serialize();
        for e in &ledger.entries {
            text.push_str(&format!("{e}\n"));
        }
        text
    })?;
    let mut certs = Vec::new();
    let mut quarter = None;
    let mut missing = Vec::new();
    for (p, q) in CERT_THRESHOLDS {
        let y0 = rat(p, q);
        match avoidance_certificate(&inst, &y0, cfg.fuel) {
            Ok(c) => {
                certs.push(Row::tagged("CERT").field("y0", Frac(&y0)).field("n", c.depth).field("bound", Frac(&c.bound)));
                if (p, q) == (1, 4) {
                    quarter = Some(c);
                }
            }
            Err(e) => {
                certs.push(Row::tagged("CERT").field("y0", Frac(&y0)).field("n", "none").field("bound", "-"));
                missing.push(e.to_string());
            }
        }
    }
    r.section(certs);
    if cfg.samples > 0 {
        if let Some(cert) = &quarter {
            let sample_plan = TransportPlan::new(inst.clone(), cert.depth);
            let points = generate_samples(cfg.samples, &cert.y0, SAMPLE_PRECISION, cfg.seed)?;
            let rep = check_avoidance_empirical(&sample_plan, &points, cert, SAMPLE_PRECISION)?;
            r.row(
                Row::tagged("EMPIRICAL")
                    .field("y0", Frac(&cert.y0))
                    .field("n", cert.depth)
                    .field("seed", cfg.seed)
                    .field("samples", rep.samples)
                    .field("avoided", rep.avoided)
                    .field("stalled", rep.stalled.len())
                    .field("failures", rep.failures.len()),
            );
            r.section(
                rep.stalled
                    .iter()
                    .map(|(i, stage, why)| Row::tagged("STALLED").field("sample", i).field("stage", stage).field("reason", why))
                    .collect(),
            );
            if !rep.passed() {
                r.fail();
            }
        }
    }
    if !missing.is_empty() {
        r.fail();
        for m in missing {
            r.note(m);
        }
        r.note("no avoidance certificate: the density along x0 never drops below the threshold".into());
    }
    Ok(r)
}

pub struct TraceConfig {
    pub stages: usize,
    pub samples: usize,
    pub seed: u64,
}

pub fn trace(args: &[String], omega: Option<&str>, cfg: TraceConfig) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let mu = a.get(Tokens::measure)?;
    let nu_prime = a.get(Tokens::measure)?;
    let x0 = a.get(Tokens::point)?;
    a.done()?;
    let plan = TransportPlan::new(make_instance(mu, nu_prime, x0)?, cfg.stages);
    let points: Vec<PointOracle> = match omega {
        Some(src) => vec![one(src, Tokens::point)?],
        None => generate_samples(cfg.samples, &Rat::from_integer(0.into()), SAMPLE_PRECISION, cfg.seed)?,
    };
    let mut r = Report::new();
    for (i, p) in points.iter().enumerate() {
        let t = trace_point(&plan, p, cfg.stages, SAMPLE_PRECISION)?;
        let mut rows = vec![Row::tagged("POINT").field("index", i).field("omega", p)];
        rows.extend(t.history.iter().map(|rec| {
            Row::tagged("STAGE")
                .field("k", rec.stage)
                .field("col", &rec.column)
                .field("y", &rec.y)
                .field("moved", rec.moved)
        }));
        if let Some((stage, why)) = t.stall {
            rows.push(Row::tagged("STALLED").field("stage", stage).field("reason", why));
        }
        r.section(rows);
    }
    Ok(r)
}

pub struct MartingaleArgs<'a> {
    pub nu: &'a str,
    pub mu: &'a str,
    pub x: &'a str,
    pub threshold: &'a str,
    pub depth: usize,
    pub window: Option<usize>,
    pub show_trace: bool,
}

pub fn martingale(a: MartingaleArgs) -> Result<Report, CliError> {
    let nu = one(a.nu, Tokens::measure)?;
    let mu = one(a.mu, Tokens::measure)?;
    let x = one(a.x, Tokens::point)?;
    let threshold = one(a.threshold, Tokens::rational)?;
    let m = Martingale::new(nu, mu);
    let hit = divergence_witness(&m, &x, &threshold, a.depth).map_err(failed)?;
    let mut r = Report::new();
    r.row(match hit {
        Divergence::Found(n) => Row::new().field("n", n),
        Divergence::NotFound => Row::new().field("n", "none"),
    });
    if a.show_trace || a.window.is_some() {
        let trace = capital_trace(&m, &x, a.depth);
        if a.show_trace {
            r.section(
                trace.values.iter().enumerate().map(|(k, v)| Row::tagged("RATIO").field("n", k).field("value", Frac(v))).collect(),
            );
        }
        if let Some(n) = trace.zero_at {
            r.row(Row::tagged("ZERO").field("n", n));
        }
        if let Some(w) = a.window {
            let doob = doob_report(&trace.values, w).map_err(failed)?;
            let last = doob.last();
            r.row(
                Row::tagged("WINDOW")
                    .field("size", w)
                    .field("end", last.end)
                    .field("max", Frac(&last.max))
                    .field("min", Frac(&last.min))
                    .field("osc", Frac(&last.osc)),
            );
        }
    }
    Ok(r)
}

pub fn conditional(mu: &str, y: &str, sigma: &str, depth: Option<usize>) -> Result<Report, CliError> {
    let p = one(mu, Tokens::product)?;
    let y = one(y, Tokens::word)?;
    let sigma = one(sigma, Tokens::word)?;
    let c = ConditionalApprox::new(p, y).map_err(failed)?;
    let mut r = Report::new();
    r.row(Row::new().field("value", Frac(&c.value(&sigma))));
    if let Some(d) = depth {
        let normalized = c.value(&BinWord::empty()).is_one();
        let bad: Vec<BinWord> = BinWord::all_up_to(d.saturating_sub(1))
            .filter(|s| c.value(&s.child(false)) + c.value(&s.child(true)) != c.value(s))
            .collect();
        r.row(Row::new().field("normalized", normalized).field("depth", d).field("additivity_failures", bad.len()));
        r.section(bad.iter().map(|s| Row::tagged("VIOLATION").field("sigma", s)).collect());
        if !normalized || !bad.is_empty() {
            r.fail();
        }
    }
    Ok(r)
}

pub struct SllnArgs<'a> {
    pub machine: &'a str,
    pub x: Option<&'a str>,
    pub count: usize,
    pub fuel: usize,
    pub seed: u64,
}

pub fn slln(a: SllnArgs) -> Result<Report, CliError> {
    let m = one(a.machine, Tokens::machine)?;
    let x = match a.x {
        Some(src) => one(src, Tokens::point)?,
        None => PointOracle::seeded_dyadic(a.fuel, a.seed),
    };
    let t = slln_trace(&m, &x, a.count, a.fuel);
    let mut r = Report::new();
    let mut row = Row::new().field("machine", m.label()).field("n", a.count).field("available", t.means.len());
    if let Some(mean) = t.means.last() {
        let within = rat(2, 5) <= *mean && *mean <= rat(3, 5);
        row = row
            .field("mean", Frac(mean))
            .field("mean_decimal", format!("{:.4}", to_f64(mean)))
            .field("soft_check", if within { "within" } else { "outside" });
    }
    r.row(row.field("stalled", t.stalled));
    if t.stalled {
        r.row(Row::tagged("STALLED").field("bits", t.means.len()).field("fuel", a.fuel));
    }
    Ok(r)
}

pub fn independence(args: &[String], order: Option<usize>) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let fam = a.get(Tokens::family)?;
    a.done()?;
    let k = order.unwrap_or(fam.len());
    let mut r = Report::new();
    match check_independence(&fam, k) {
        Ok(checked) => {
            r.row(Row::new().field("family", &fam).field("order", k).field("checked", checked).field("result", "independent"));
            let depth_out = fam.len().min(8);
            let m = seqset_machine(fam.clone()).map_err(failed)?;
            let fair = pushforward_is_fair(&m, fam.horizon(), depth_out);
            r.row(
                Row::tagged("FAIR")
                    .field("depth", depth_out)
                    .field("checked", fair.checked)
                    .field("exact", fair.all_exact)
                    .field("result", verdict(fair.passed())),
            );
            if !fair.passed() {
                r.fail();
            }
        }
        Err(w) => {
            r.row(Row::new().field("family", &fam).field("order", k).field("result", "dependent"));
            let members: Vec<String> = w.members.iter().map(|i| format!("C{i}")).collect();
            r.row(
                Row::tagged("WITNESS")
                    .field("members", members.join(","))
                    .field("intersection", Frac(&w.intersection_mass))
                    .field("product", Frac(&w.product_mass)),
            );
            r.fail();
        }
    }
    Ok(r)
}

pub fn density(args: &[String], set: &str, x: &str, n: usize, working: usize) -> Result<Report, CliError> {
    let mut a = Args::new(args);
    let mu = a.get(Tokens::measure)?;
    a.done()?;
    let set = ClosedSetApprox::from_clopen(one(set, Tokens::clopen)?);
    let x = one(x, Tokens::point)?;
    let entries = lebesgue_density_trace(&mu, &set, &x, n, working).map_err(failed)?;
    let mut r = Report::new();
    r.row(Row::new().field("measure", mu.label()).field("set", set.label()).field("x", &x));
    r.section(
        entries
            .iter()
            .map(|e| Row::tagged("DENSITY").field("k", e.depth).field("enclosure", &e.enclosure).field("exact", e.exact))
            .collect(),
    );
    Ok(r)
}
