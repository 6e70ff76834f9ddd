use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use lieshift_core::field::PrimeField;
use lieshift_core::group_ring::{grigorchuk_p, support_growth, GroupRingError};
use lieshift_core::homoclinic::{
    check_invariance, check_no_new_homoclinics, dimension_laws, dimension_table, HomoclinicError,
    Limits,
};
use lieshift_core::lie::{
    closed_form_count, listed_count, periodic_zero_pairs, search_brackets, verify_axioms,
    BracketRule, LieError, PeriodicCountOptions, SearchOptions,
};
use lieshift_core::rewrite::{
    affine_normal_form, combination_term, eliminate_bad, eval_flat, eval_term, left_nest, LieTerm,
    Model, ModelOracle, RewriteError,
};
use lieshift_core::schreier::{standard_generators, t_generators, SchreierGraph};
use lieshift_core::shift::Config;

use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Cache(String),
    /// Carries the report that failed.
    #[error("verification failed")]
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Cache(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<LieError> for CliError {
    fn from(e: LieError) -> Self {
        match e {
            LieError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<HomoclinicError> for CliError {
    fn from(e: HomoclinicError) -> Self {
        match e {
            HomoclinicError::Field(_) => CliError::Usage(e.to_string()),
            _ => CliError::Cap(e.to_string()),
        }
    }
}

impl From<GroupRingError> for CliError {
    fn from(e: GroupRingError) -> Self {
        match e {
            GroupRingError::Field(_) => CliError::Usage(e.to_string()),
            _ => CliError::Cache(e.to_string()),
        }
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        match e {
            RewriteError::Lie(inner) => inner.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn field(q: u32) -> Result<PrimeField, CliError> {
    PrimeField::new(q).map_err(|e| CliError::Usage(e.to_string()))
}

/// `a..b` (inclusive, empty when `a > b`) or a single number.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad range `{s}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    Ok((a..=b).collect())
}

#[derive(Serialize)]
struct CountRow {
    k: u64,
    n: u64,
    brute: String,
    formula: String,
    #[serde(rename = "match")]
    matches: bool,
}

/// For `k = 0` the formula column is the listed `24^n`; a mismatch there is
/// expected and only noted on stderr.
pub fn periodic_count(f: Format, k: &str, n: &str, cap: Option<u128>) -> Result<String, CliError> {
    let mut opts = PeriodicCountOptions::default();
    if let Some(c) = cap {
        opts.cap = c;
    }
    let mut rows = Vec::new();
    for &k in &parse_range(k)? {
        for &n in &parse_range(n)? {
            let brute = periodic_zero_pairs(&BracketRule::bracket_k(k as i64), n as usize, opts)?;
            let formula: BigUint = if k == 0 {
                listed_count(0, n)
            } else {
                closed_form_count(k, n)
            };
            rows.push(CountRow {
                k,
                n,
                matches: brute == formula,
                brute: brute.to_string(),
                formula: formula.to_string(),
            });
        }
    }
    let out = match f {
        Format::Json => json(&rows),
        Format::Tsv => {
            let mut s = String::from("k\tn\tbrute\tformula\tmatch\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{}",
                    r.k, r.n, r.brute, r.formula, r.matches
                );
            }
            s
        }
    };
    if rows.iter().any(|r| r.k > 0 && !r.matches) {
        return Err(CliError::Verification(out));
    }
    if rows.iter().any(|r| r.k == 0 && !r.matches) {
        eprintln!("note: for k = 0 the brute-force count differs from the listed 24^n");
    }
    Ok(out)
}

#[derive(Serialize)]
struct PowerRow {
    i: usize,
    support: usize,
}

pub fn grig_powers(
    f: Format,
    i_max: usize,
    q: u32,
    cache: Option<&Path>,
) -> Result<String, CliError> {
    let p = grigorchuk_p(field(q)?);
    let sizes = support_growth(&p, "ada+dad+c", i_max, cache)?;
    let rows: Vec<PowerRow> = sizes
        .into_iter()
        .enumerate()
        .map(|(i, support)| PowerRow { i, support })
        .collect();
    Ok(match f {
        Format::Json => json(&rows),
        Format::Tsv => {
            let mut s = String::from("i\tsupport\n");
            for r in &rows {
                let _ = writeln!(s, "{}\t{}", r.i, r.support);
            }
            s
        }
    })
}

#[derive(Serialize)]
struct EdgeRow {
    u: usize,
    v: usize,
    label: char,
}

#[derive(Serialize)]
struct GeodesicRow {
    vertex: usize,
    point: String,
    distance: Option<usize>,
    count: String,
    t_distance: Option<usize>,
    t_count: String,
}

#[derive(Serialize)]
struct SegmentRow {
    start: usize,
    kind: &'static str,
}

#[derive(Serialize)]
struct SchreierOut {
    edges: Vec<EdgeRow>,
    geodesics: Vec<GeodesicRow>,
    segments: Vec<SegmentRow>,
}

pub fn schreier(f: Format, vertices: usize) -> Result<String, CliError> {
    let g = SchreierGraph::build(vertices).map_err(|e| CliError::Usage(e.to_string()))?;
    let std = g.geodesic_count(&standard_generators());
    let t = g.geodesic_count(&t_generators());
    let segments = g.segment_decomposition();
    let out = SchreierOut {
        edges: g
            .edges()
            .into_iter()
            .map(|e| EdgeRow {
                u: e.u,
                v: e.v,
                label: e.label.as_char(),
            })
            .collect(),
        geodesics: (0..g.len())
            .map(|v| GeodesicRow {
                vertex: v,
                point: match g.vertex(v).to_string() {
                    p if p.is_empty() => "-".to_string(),
                    p => p,
                },
                distance: std.distance[v],
                count: std.count[v].to_string(),
                t_distance: t.distance[v],
                t_count: t.count[v].to_string(),
            })
            .collect(),
        segments: segments
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|s| SegmentRow {
                start: s.start,
                kind: s.kind.name(),
            })
            .collect(),
    };
    let opt = |d: Option<usize>| d.map_or("-".to_string(), |d| d.to_string());
    let text = match f {
        Format::Json => json(&out),
        Format::Tsv => {
            let mut s = String::from("# edges\nu\tv\tlabel\n");
            for e in &out.edges {
                let _ = writeln!(s, "{}\t{}\t{}", e.u, e.v, e.label);
            }
            s.push_str("# geodesics\nvertex\tpoint\tdistance\tcount\tt_distance\tt_count\n");
            for r in &out.geodesics {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.vertex,
                    r.point,
                    opt(r.distance),
                    r.count,
                    opt(r.t_distance),
                    r.t_count
                );
            }
            s.push_str("# segments\nstart\tkind\n");
            for r in &out.segments {
                let _ = writeln!(s, "{}\t{}", r.start, r.kind);
            }
            s
        }
    };
    match segments {
        Ok(_) => Ok(text),
        Err(e) => {
            eprintln!("segment decomposition: {e}");
            Err(CliError::Verification(text))
        }
    }
}

#[derive(Serialize)]
struct AxiomOut {
    bilinear: bool,
    reflexive: bool,
    jacobi: bool,
    window: i64,
    generators: usize,
    triples: usize,
    witnesses: Vec<String>,
}

pub fn bracket_verify(f: Format, rule: &Path, window: u64) -> Result<String, CliError> {
    let rule = BracketRule::parse(&read(rule)?)?;
    let rep = verify_axioms(&rule, window)?;
    let out = match f {
        Format::Json => json(&AxiomOut {
            bilinear: rep.bilinear,
            reflexive: rep.reflexive,
            jacobi: rep.jacobi,
            window: rep.window_used,
            generators: rep.generators,
            triples: rep.triples_checked,
            witnesses: rep.witnesses.clone(),
        }),
        Format::Tsv => {
            let mut s = rep.summary();
            s.push('\n');
            for w in &rep.witnesses {
                let _ = writeln!(s, "witness\t{w}");
            }
            s
        }
    };
    if rep.all_ok() {
        Ok(out)
    } else {
        Err(CliError::Verification(out))
    }
}

#[derive(Serialize)]
struct DimOut {
    n: usize,
    window: usize,
    dim: usize,
}

#[derive(Serialize)]
struct CheckOut {
    check: String,
    level: usize,
    ok: bool,
}

#[derive(Serialize)]
struct HomoclinicOut {
    dims: Vec<DimOut>,
    checks: Vec<CheckOut>,
}

pub fn homoclinic(
    f: Format,
    level: usize,
    level_cap: Option<usize>,
    check: bool,
) -> Result<String, CliError> {
    let limits = match level_cap {
        Some(c) => Limits::new(c)?,
        None => Limits::default(),
    };
    let dims: Vec<DimOut> = dimension_table(level, limits)?
        .into_iter()
        .map(|r| DimOut {
            n: r.n,
            window: r.window,
            dim: r.dim,
        })
        .collect();
    let mut checks = Vec::new();
    if check {
        for n in 1..=level {
            let d = dimension_laws(n, limits)?;
            checks.push(CheckOut {
                check: "quadrupling".into(),
                level: n,
                ok: d.quadrupling(),
            });
            checks.push(CheckOut {
                check: "increment".into(),
                level: n,
                ok: d.increment(),
            });
        }
        for n in 0..=level {
            let ok = check_invariance(n, limits)?.ok();
            checks.push(CheckOut {
                check: "invariance".into(),
                level: n,
                ok,
            });
        }
        for i in 0..level.min(limits.level_cap()) {
            let ok = check_no_new_homoclinics(i, limits)?.ok();
            checks.push(CheckOut {
                check: "no_new_homoclinics".into(),
                level: i,
                ok,
            });
        }
    }
    let out = HomoclinicOut { dims, checks };
    let text = match f {
        Format::Json => json(&out),
        Format::Tsv => {
            let mut s = String::from("n\twindow\tdim\n");
            for r in &out.dims {
                let _ = writeln!(s, "{}\t{}\t{}", r.n, r.window, r.dim);
            }
            if check {
                s.push_str("# checks\ncheck\tlevel\tok\n");
                for c in &out.checks {
                    let _ = writeln!(s, "{}\t{}\t{}", c.check, c.level, c.ok);
                }
            }
            s
        }
    };
    if out.checks.iter().all(|c| c.ok) {
        Ok(text)
    } else {
        Err(CliError::Verification(text))
    }
}

#[derive(Serialize)]
struct RewriteRow {
    input: String,
    output: String,
}

/// Without a model each term is left-nested. With a model, bad brackets are
/// eliminated afterwards and terms containing `xi` are brought to their
/// affine normal form; both results are checked against evaluation.
pub fn rewrite(
    f: Format,
    terms: &Path,
    q: u32,
    rule: Option<&Path>,
    gens: &[String],
) -> Result<String, CliError> {
    let model = match rule {
        Some(p) => {
            let rule = BracketRule::parse(&read(p)?)?;
            let configs = gens
                .iter()
                .map(|g| Config::parse(rule.field(), g).map_err(|e| CliError::Usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            Some(Model::new(rule, configs))
        }
        None => None,
    };
    let fld = match &model {
        Some(m) => m.rule.field(),
        None => field(q)?,
    };
    let mut rows = Vec::new();
    let mut failures = 0;
    for line in read(terms)?.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t = LieTerm::parse(fld, line)?;
        let output = match (&model, t.xi_count()) {
            (None, 0) => combination_term(&left_nest(fld, &t)?).to_string(),
            (None, _) => return Err(CliError::Usage(format!("`{line}`: xi terms need --rule"))),
            (Some(m), 0) => {
                let value = eval_term(&t, m, None)?;
                let nested = left_nest(fld, &t)?;
                let mut oracle = ModelOracle::new(m.clone());
                let out = eliminate_bad(fld, &nested, &mut oracle)?;
                let extended = oracle.into_model();
                if eval_flat(&nested, m)? != value || eval_flat(&out.terms, &extended)? != value {
                    failures += 1;
                }
                combination_term(&out.terms).to_string()
            }
            (Some(m), _) => {
                let nf = affine_normal_form(&t, m)?;
                let chain: Vec<String> = nf.chain.iter().map(|c| c.to_string()).collect();
                format!(
                    "a={} chain=[{}] offset={}",
                    nf.a.value(),
                    chain.join(" | "),
                    nf.offset
                )
            }
        };
        rows.push(RewriteRow {
            input: line.to_string(),
            output,
        });
    }
    let text = match f {
        Format::Json => json(&rows),
        Format::Tsv => {
            let mut s = String::new();
            for r in &rows {
                let _ = writeln!(s, "{}\t{}", r.input, r.output);
            }
            s
        }
    };
    if failures > 0 {
        Err(CliError::Verification(text))
    } else {
        Ok(text)
    }
}

#[derive(Serialize)]
struct SearchOut {
    keys: usize,
    candidates: String,
    recheck_failures: usize,
    rules: Vec<String>,
}

pub fn search(
    f: Format,
    q: u32,
    d: usize,
    r: u64,
    w: u64,
    max_active: Option<usize>,
    cap: Option<u128>,
) -> Result<String, CliError> {
    let mut opts = SearchOptions {
        max_active_keys: max_active,
        ..SearchOptions::default()
    };
    if let Some(c) = cap {
        opts.cap = c;
    }
    let res = search_brackets(q, d, r, w, opts)?;
    let out = SearchOut {
        keys: res.keys,
        candidates: res.candidates.to_string(),
        recheck_failures: res.recheck_failures,
        rules: res.rules.iter().map(|r| r.to_text()).collect(),
    };
    Ok(match f {
        Format::Json => json(&out),
        Format::Tsv => {
            let mut s = format!(
                "# keys={} candidates={} recheck_failures={} rules={}\n",
                out.keys,
                out.candidates,
                out.recheck_failures,
                out.rules.len()
            );
            for (i, rule) in out.rules.iter().enumerate() {
                let flat: Vec<&str> = rule.lines().collect();
                let _ = writeln!(s, "{i}\t{}", flat.join("; "));
            }
            s
        }
    })
}
