use anyhow::Result;
use edgestates::de_gennes::{BoundaryCondition, Branch, DeGennes, ResolutionPolicy};
use edgestates::direct2d::{convergence_study, theorem2_study, StudyTable};
use edgestates::geometry::Side;
use edgestates::model_ops::{
    count_curved_cylinder, count_half_cylinder_exact, count_half_cylinder_oracle, count_strip, half_cylinder_main_term,
    HalfCylinderSpec, SBoundary, StripGrid, StripSpec,
};
use edgestates::numerics::par_map;
use edgestates::weyl_law::{curvature_term, edge_weyl_term};
use serde_json::{json, Value};

use crate::config::{
    reject, BcConfig, HalfcylConfig, MuConfig, NuConfig, StripConfig, Theorem2Config, VerifyConfig, WeylConfig,
};
use crate::table::{Cell, Table};

/// Command result plus any violated acceptance thresholds.
pub struct Report {
    pub table: Table,
    /// Structured form for `--format json` when richer than the table.
    pub json: Option<Value>,
    pub failures: Vec<String>,
}

impl Report {
    fn table(table: Table) -> Self {
        Self {
            table,
            json: None,
            failures: Vec::new(),
        }
    }
}

pub struct Context {
    pub refine: u32,
}

impl Context {
    fn policy(&self) -> ResolutionPolicy {
        ResolutionPolicy {
            refine: self.refine,
            ..ResolutionPolicy::default()
        }
    }

    /// De Gennes tables at the requested resolution; the shared instance when unrefined.
    fn de_gennes(&self) -> Result<DeGennesRef> {
        Ok(if self.refine == 0 {
            DeGennesRef::Shared(DeGennes::shared())
        } else {
            DeGennesRef::Owned(Box::new(DeGennes::compute(self.policy())?))
        })
    }
}

enum DeGennesRef {
    Shared(&'static DeGennes),
    Owned(Box<DeGennes>),
}

impl std::ops::Deref for DeGennesRef {
    type Target = DeGennes;
    fn deref(&self) -> &DeGennes {
        match self {
            DeGennesRef::Shared(d) => d,
            DeGennesRef::Owned(d) => d,
        }
    }
}

/// Error bars at the requested grid; with `--refine K > 0` each constant is
/// also flagged by whether its bar at least halved against grid `K - 1`.
pub fn constants(ctx: &Context) -> Result<Report> {
    let dg = ctx.de_gennes()?;
    let c = &dg.constants;
    let coarse = match ctx.refine {
        0 => None,
        k => Some(Context { refine: k - 1 }.de_gennes()?.constants.err),
    };
    let rows = [
        ("theta0", c.theta0, c.err.theta0, coarse.map(|e| e.theta0)),
        ("xi0", c.xi0, c.err.xi0, coarse.map(|e| e.xi0)),
        ("mu_second", c.mu_second, c.err.mu_second, coarse.map(|e| e.mu_second)),
        ("c1", c.c1, c.err.c1, coarse.map(|e| e.c1)),
        ("theta1", c.theta1, c.err.theta1, coarse.map(|e| e.theta1)),
    ];
    let mut t = Table::new(vec!["name", "value", "error", "refinement"]);
    let mut status = serde_json::Map::new();
    for (name, value, err, prev) in rows {
        let flag = match prev {
            None => "n/a",
            Some(p) if err <= 0.5 * p => "halved",
            Some(_) => "stalled",
        };
        status.insert(name.to_string(), flag.into());
        t.push(vec![name.into(), value.into(), err.into(), flag.into()]);
    }
    let mut report = Report::table(t);
    report.json = Some(json!({ "grid": ctx.policy().grid(), "constants": c, "refinement": status }));
    Ok(report)
}

pub fn mu(ctx: &Context, cfg: &MuConfig) -> Result<Report> {
    if cfg.xi.is_empty() || cfg.xi.iter().any(|x| !x.is_finite()) {
        return reject("xi must be a nonempty list of finite values");
    }
    let policy = ctx.policy();
    let rows = par_map(&cfg.xi, |&xi| {
        let m0 = policy.eval(xi, BoundaryCondition::Neumann, 0)?;
        let m1 = policy.eval(xi, BoundaryCondition::Neumann, 1)?;
        Ok::<_, edgestates::Error>((xi, m0, m1))
    });
    let mut t = Table::new(vec!["xi", "mu", "mu_err", "mu1"]);
    for r in rows {
        let (xi, m0, m1) = r?;
        t.push(vec![xi.into(), m0.value.into(), m0.err.into(), m1.value.into()]);
    }
    Ok(Report::table(t))
}

pub fn nu(ctx: &Context, cfg: &NuConfig) -> Result<Report> {
    if cfg.beta.is_empty() || cfg.beta.iter().any(|b| !b.is_finite()) {
        return reject("beta must be a nonempty list of finite values");
    }
    let dg = ctx.de_gennes()?;
    let mut t = Table::new(vec!["beta", "nu_minus", "nu_plus", "width"]);
    let rows = par_map(&cfg.beta, |&beta| {
        Ok::<_, edgestates::Error>((beta, dg.nu(Branch::Minus, beta)?, dg.nu(Branch::Plus, beta)?))
    });
    for r in rows {
        let (beta, lo, hi) = r?;
        t.push(vec![beta.into(), lo.into(), hi.into(), (hi - lo).into()]);
    }
    Ok(Report::table(t))
}

pub fn halfcyl(ctx: &Context, cfg: &HalfcylConfig) -> Result<Report> {
    let rows = cfg.validate()?;
    let dg = ctx.de_gennes()?;
    let results = par_map(&rows, |r| {
        let spec = HalfCylinderSpec::new(r.s, r.b, r.h)?;
        let exact = count_half_cylinder_exact(&dg, &spec, r.lambda)?;
        let oracle = count_half_cylinder_oracle(&dg, &spec, r.lambda)?;
        let main = half_cylinder_main_term(&dg, &spec, r.lambda / r.h)?;
        Ok::<_, edgestates::Error>((exact, oracle, (r.h.sqrt() * exact as f64 - main).abs()))
    });
    let mut t = Table::new(vec![
        "h",
        "S",
        "B",
        "lambda",
        "N_exact",
        "N_oracle",
        "estimate_lhs",
        "estimate_rhs",
    ]);
    let mut failures = Vec::new();
    for (r, res) in rows.iter().zip(results) {
        let (exact, oracle, lhs) = res?;
        let rhs = r.h.sqrt();
        if exact != oracle {
            failures.push(format!(
                "h {} S {} B {} lambda {}: exact {exact} != oracle {oracle}",
                r.h, r.s, r.b, r.lambda
            ));
        }
        if lhs > rhs {
            failures.push(format!(
                "h {} S {} B {} lambda {}: estimate {lhs} > {rhs}",
                r.h, r.s, r.b, r.lambda
            ));
        }
        t.push(vec![
            r.h.into(),
            r.s.into(),
            r.b.into(),
            r.lambda.into(),
            exact.into(),
            oracle.into(),
            lhs.into(),
            rhs.into(),
        ]);
    }
    Ok(Report {
        table: t,
        json: None,
        failures,
    })
}

pub fn strip(ctx: &Context, cfg: &StripConfig) -> Result<Report> {
    cfg.validate()?;
    let dg = DeGennes::shared();
    let grid = StripGrid {
        points_per_length: cfg.points_per_length * f64::from(1u32 << ctx.refine),
    };
    let mut cases = Vec::new();
    for &h in &cfg.h {
        for &kappa in &cfg.kappas() {
            for &beta in &cfg.beta {
                cases.push((h, kappa, beta * h * cfg.b));
            }
        }
    }
    let results = par_map(&cases, |&(h, kappa, lambda)| {
        let spec = StripSpec {
            s_len: cfg.s,
            t_len: cfg.t,
            field: cfg.b,
            h,
            kappa,
            bc_s: cfg.bc.into(),
        };
        let n = count_strip(&spec, grid, lambda)?;
        let cyl = if kappa == 0.0 {
            count_half_cylinder_exact(dg, &HalfCylinderSpec::new(cfg.s, cfg.b, h)?, lambda)?
        } else {
            let per = StripSpec {
                bc_s: SBoundary::Periodic,
                ..spec
            };
            count_curved_cylinder(dg, &per, lambda, None)?.total
        };
        Ok::<_, edgestates::Error>((n, cyl))
    });
    let bc = match cfg.bc {
        BcConfig::Dirichlet => "dirichlet",
        BcConfig::Periodic => "periodic",
    };
    let mut t = Table::new(vec![
        "S",
        "T",
        "B",
        "h",
        "kappa",
        "bc",
        "lambda",
        "N_strip",
        "N_cylinder",
    ]);
    let mut failures = Vec::new();
    for (&(h, kappa, lambda), res) in cases.iter().zip(results) {
        let (n, cyl) = res?;
        if let (BcConfig::Dirichlet, Some(slack)) = (cfg.bc, cfg.slack) {
            if n > cyl + slack {
                failures.push(format!(
                    "h {h} kappa {kappa} lambda {lambda}: strip {n} > cylinder {cyl} + {slack}"
                ));
            }
        }
        t.push(vec![
            cfg.s.into(),
            cfg.t.into(),
            cfg.b.into(),
            h.into(),
            kappa.into(),
            bc.into(),
            lambda.into(),
            n.into(),
            cyl.into(),
        ]);
    }
    Ok(Report {
        table: t,
        json: None,
        failures,
    })
}

pub fn weyl(ctx: &Context, cfg: &WeylConfig) -> Result<Report> {
    let dg = ctx.de_gennes()?;
    let curve = cfg.curve.build(cfg.side)?;
    let field = cfg.field.build()?;
    if !cfg.kappa0.is_empty() && !field.is_constant() {
        return reject("curvature terms need a constant field");
    }
    let mut t = Table::new(vec!["kind", "parameter", "main_term", "h_power", "remainder_exponent"]);
    let mut edge = Vec::new();
    for &b0 in &cfg.b0 {
        let p = edge_weyl_term(&dg, &curve, &field, b0)?;
        t.push(vec![
            "edge".into(),
            b0.into(),
            p.main_term.into(),
            p.h_power.into(),
            p.remainder_exponent.into(),
        ]);
        edge.push(json!({ "b0": b0, "prediction": p }));
    }
    let mut curvature = Vec::new();
    for &k0 in &cfg.kappa0 {
        let p = curvature_term(&dg, &curve, k0, field.b())?;
        t.push(vec![
            "curvature".into(),
            k0.into(),
            p.main_term.into(),
            p.h_power.into(),
            p.remainder_exponent.into(),
        ]);
        curvature.push(json!({ "kappa0": k0, "prediction": p }));
    }
    let side = match cfg.side {
        Side::Interior => "interior",
        Side::Exterior => "exterior",
    };
    let mut report = Report::table(t);
    report.json = Some(json!({
        "curve": { "length": curve.length, "side": side, "total_curvature": curve.total_curvature() },
        "edge": edge,
        "curvature": curvature,
    }));
    Ok(report)
}

fn study_table(s: &StudyTable, error_name: &'static str) -> Table {
    let mut t = Table::new(vec!["h", "N", "scaled", "prediction", error_name]);
    for r in &s.rows {
        t.push(vec![
            r.h.into(),
            r.count.into(),
            r.scaled.into(),
            r.prediction.into(),
            Cell::Float(r.error),
        ]);
    }
    t
}

pub fn verify_disk(ctx: &Context, cfg: &VerifyConfig) -> Result<Report> {
    let p = cfg.problem()?;
    let p = p.with_grid(p.grid.refined(ctx.refine));
    let study = convergence_study(DeGennes::shared(), &p, cfg.b0, &cfg.h)?;
    let mut failures = Vec::new();
    if cfg.thresholds.require_nonincreasing && !study.error_nonincreasing {
        failures.push("rel_err is not nonincreasing along decreasing h".to_string());
    }
    if let (Some(max), Some(last)) = (cfg.thresholds.max_final_rel_err, study.rows.last()) {
        if last.error > max {
            failures.push(format!("final rel_err {} exceeds {max}", last.error));
        }
    }
    Ok(Report {
        table: study_table(&study, "rel_err"),
        json: None,
        failures,
    })
}

pub fn theorem2(ctx: &Context, cfg: &Theorem2Config) -> Result<Report> {
    let p = cfg.problem()?;
    let p = p.with_grid(p.grid.refined(ctx.refine));
    let study = theorem2_study(DeGennes::shared(), &p, cfg.kappa0, &cfg.h)?;
    let mut failures = Vec::new();
    for r in &study.rows {
        if let Some(band) = cfg.thresholds.band {
            if r.error > band {
                failures.push(format!("h {}: deviation {} outside band {band}", r.h, r.error));
            }
        }
        if let Some(max) = cfg.thresholds.max_count {
            if r.count > max {
                failures.push(format!("h {}: count {} above {max}", r.h, r.count));
            }
        }
    }
    Ok(Report {
        table: study_table(&study, "deviation"),
        json: None,
        failures,
    })
}
