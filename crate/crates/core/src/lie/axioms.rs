use super::{BracketRule, LieError};
use crate::shift::Config;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub bilinear: bool,
    pub reflexive: bool,
    pub jacobi: bool,
    /// Positions `|g| <= window` actually enumerated around the anchor.
    pub window_used: i64,
    pub generators: usize,
    pub triples_checked: usize,
    pub witnesses: Vec<String>,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.bilinear && self.reflexive && self.jacobi
    }

    pub fn summary(&self) -> String {
        let s = |ok: bool| if ok { "ok" } else { "FAILED" };
        format!(
            "bilinear {}, reflexive {}, jacobi {}",
            s(self.bilinear),
            s(self.reflexive),
            s(self.jacobi)
        )
    }
}

struct Gen {
    name: String,
    config: Config,
    /// `None` for the constant factor.
    pos: Option<i64>,
}

/// Checks the axioms on generators: basis configurations `e^(t)_g` and, for
/// construction A, the constant `(0, 1)`. The bracket is bilinear, so the
/// identities on generators give them on the dense span; shift invariance
/// reduces to triples with some non-constant generator at 0. A triple whose
/// Jacobi terms are not all zero spans at most `5R` cells for bracket radius
/// `R` (two inputs of a bracket lie within `2R`, its output within `R` of
/// them, and the third input within `2R` of that output). Positions are
/// therefore enumerated up to `max(2 * window, 5R)` around the anchor, which
/// covers every triple inside `[-window, window]` as well.
pub fn verify_axioms(rule: &BracketRule, window: u64) -> Result<AxiomReport, LieError> {
    let field = rule.field();
    let reach = (2 * window).max(5 * rule.radius()) as i64;
    let mut gens = Vec::new();
    for g in -reach..=reach {
        for t in 0..rule.vector_tracks() {
            gens.push(Gen {
                name: format!("e{}@{}", t + 1, g),
                config: rule.basis(t, g)?,
                pos: Some(g),
            });
        }
    }
    if let Some(c) = rule.constant(1) {
        gens.push(Gen {
            name: "const".into(),
            config: c,
            pos: None,
        });
    }
    let anchored = |a: &Gen| a.pos.is_none_or(|p| p == 0);
    let zero = Config::zero(field, rule.tracks());
    let mut report = AxiomReport {
        bilinear: true,
        reflexive: true,
        jacobi: true,
        window_used: reach,
        generators: gens.len(),
        triples_checked: 0,
        witnesses: Vec::new(),
    };
    let br = |x: &Config, y: &Config| rule.eval(x, y);

    // pairs with an anchor: reflexivity, antisymmetry, scalars
    for x in &gens {
        if x.pos.is_some() && !anchored(x) {
            continue;
        }
        if br(&x.config, &x.config)? != zero {
            report.reflexive = false;
            report.witnesses.push(format!("[{0}, {0}] != 0", x.name));
        }
        for y in &gens {
            let xy = br(&x.config, &y.config)?;
            let yx = br(&y.config, &x.config)?;
            if xy.add(&yx)? != zero {
                report.reflexive = false;
                report
                    .witnesses
                    .push(format!("[{0}, {1}] != -[{1}, {0}]", x.name, y.name));
            }
            let sum = x.config.add(&y.config)?;
            if br(&sum, &sum)? != zero {
                report.reflexive = false;
                report
                    .witnesses
                    .push(format!("[{0}+{1}, {0}+{1}] != 0", x.name, y.name));
            }
            for a in field.elements() {
                if br(&x.config.scale(a), &y.config)? != xy.scale(a)
                    || br(&y.config, &x.config.scale(a))? != yx.scale(a)
                {
                    report.bilinear = false;
                    report
                        .witnesses
                        .push(format!("scaling by {a} fails on ({}, {})", x.name, y.name));
                }
            }
        }
    }

    for x in &gens {
        for y in &gens {
            let xy = br(&x.config, &y.config)?;
            for z in &gens {
                let trio = [x, y, z];
                let has_anchor = trio.iter().any(|g| g.pos == Some(0));
                let all_const = trio.iter().all(|g| g.pos.is_none());
                if !has_anchor && !all_const {
                    continue;
                }
                report.triples_checked += 1;
                let xz = br(&x.config, &z.config)?;
                let yz = br(&y.config, &z.config)?;
                let xpy = x.config.add(&y.config)?;
                let ypz = y.config.add(&z.config)?;
                if br(&xpy, &z.config)? != xz.add(&yz)? || br(&x.config, &ypz)? != xy.add(&xz)? {
                    report.bilinear = false;
                    report.witnesses.push(format!(
                        "additivity fails on ({}, {}, {})",
                        x.name, y.name, z.name
                    ));
                }
                let zx = br(&z.config, &x.config)?;
                let jac = br(&xy, &z.config)?
                    .add(&br(&yz, &x.config)?)?
                    .add(&br(&zx, &y.config)?)?;
                if jac != zero {
                    report.jacobi = false;
                    report.witnesses.push(format!(
                        "jacobi fails on ({}, {}, {}): {}",
                        x.name, y.name, z.name, jac
                    ));
                }
            }
        }
    }
    report.witnesses.truncate(16);
    Ok(report)
}
