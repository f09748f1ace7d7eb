use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use super::output::{Cell, Table};
use super::{CliError, Command, Grid, Method, OptionKind, RunConfig, SideArg};
use crate::criticality::{critical_point, explosion_time};
use crate::error::{Error, Result, Side};
use crate::reference::{
    call_price_numeric, density_numeric_log, implied_vol, otm_price_numeric_log, put_price_numeric, ContourSpec,
    DampingSpec,
};
use crate::riccati::{transform_closed, transform_ode};
use crate::smile::{exact_implied_vol, implied_vol_expansion, smile_coeffs, smile_sqrt_form, Order, SmileCoeffs};
use crate::tails::{
    density_asymptotic_log, logspot_density_asymptotic_log, tail_constants_at, TailConstants, GAMMA_QUAD_TOL,
};

pub fn run(config: &RunConfig, command: &Command) -> std::result::Result<Table, CliError> {
    let table = match command {
        Command::Constants { side } => constants(config, *side)?,
        Command::Critical { side } => critical(config, *side)?,
        Command::Tstar { s } => Table::record(vec![
            ("s", (*s).into()),
            ("tstar", explosion_time(&config.params, *s).into()),
        ]),
        Command::Transform { u_re, u_im, t, method } => transform(config, Complex64::new(*u_re, *u_im), *t, *method)?,
        Command::Density {
            logx,
            logx_grid,
            abscissa,
            truncation,
            asymptotic,
        } => {
            let points = match (logx, logx_grid) {
                (Some(l), None) => vec![*l],
                (None, Some(g)) => g.points(),
                _ => return Err(CliError::Config("give exactly one of --logx or --logx-grid".into())),
            };
            let spec = ContourSpec {
                abscissa: *abscissa,
                truncation: *truncation,
                quad_tol: config.quad_tol,
            };
            density(config, &points, &spec, *asymptotic)?
        }
        Command::Price {
            k,
            kind,
            alpha,
            truncation,
        } => {
            let spec = DampingSpec {
                alpha: *alpha,
                truncation: *truncation,
                quad_tol: config.quad_tol,
            };
            price(config, *k, *kind, &spec)?
        }
        Command::Impvol { k, price, truncation } => {
            let vol = match price {
                Some(p) => implied_vol(*p, *k, config.ctx.maturity(), None)?,
                None => {
                    let spec = DampingSpec {
                        truncation: *truncation,
                        quad_tol: config.quad_tol,
                        ..DampingSpec::default()
                    };
                    exact_implied_vol(&config.params, &config.ctx, *k, &spec)?
                }
            };
            Table::record(vec![("k", (*k).into()), ("implied_vol", vol.into())])
        }
        Command::Smile {
            k_min,
            k_max,
            points,
            orders,
            exact,
            sqrt_form,
        } => {
            let grid = Grid::new(*k_min, *k_max, *points)?;
            let orders = orders.iter().map(|&n| Order::try_from(n)).collect::<Result<Vec<_>>>()?;
            smile(config, &grid, &orders, *exact, *sqrt_form)?
        }
        Command::Figures { .. } => unreachable!("figures write files and are dispatched separately"),
    };
    Ok(table)
}

fn tail_constants_for(config: &RunConfig, side: Side) -> Result<TailConstants> {
    let cp = critical_point(&config.params, &config.ctx, side)?;
    tail_constants_at(&config.params, &config.ctx, &cp, config.quad_tol.min(GAMMA_QUAD_TOL))
}

fn constants(config: &RunConfig, side: SideArg) -> Result<Table> {
    let mut table = Table::new([
        "side",
        "s_crit",
        "sigma",
        "kappa",
        "C1",
        "C2",
        "C3",
        "beta",
        "gamma_const",
        "power_exp",
        "c_sqrt",
        "c_const",
        "c_log",
    ]);
    for &s in side.sides() {
        let cp = critical_point(&config.params, &config.ctx, s)?;
        let tc = tail_constants_at(&config.params, &config.ctx, &cp, config.quad_tol.min(GAMMA_QUAD_TOL))?;
        // a wing without finite variance beyond the critical moment has no expansion
        let co = smile_coeffs(&tc, &config.params).ok();
        table.push(vec![
            s.to_string().as_str().into(),
            cp.s_crit.into(),
            cp.sigma.into(),
            cp.kappa.into(),
            tc.c1.into(),
            tc.c2.into(),
            tc.c3.into(),
            tc.beta.into(),
            tc.gamma_const.into(),
            tc.power_exp.into(),
            co.map(|c| c.c_sqrt).into(),
            co.map(|c| c.c_const).into(),
            co.map(|c| c.c_log).into(),
        ]);
    }
    Ok(table)
}

fn critical(config: &RunConfig, side: SideArg) -> Result<Table> {
    let mut table = Table::new(["side", "s_crit", "tstar", "dtstar_ds", "sigma", "kappa"]);
    for &s in side.sides() {
        let cp = critical_point(&config.params, &config.ctx, s)?;
        table.push(vec![
            s.to_string().as_str().into(),
            cp.s_crit.into(),
            explosion_time(&config.params, cp.s_crit).into(),
            cp.dtstar_ds.into(),
            cp.sigma.into(),
            cp.kappa.into(),
        ]);
    }
    Ok(table)
}

fn transform(config: &RunConfig, u: Complex64, t: Option<f64>, method: Method) -> Result<Table> {
    let t = t.unwrap_or(config.ctx.maturity());
    let v = match method {
        Method::Closed => transform_closed(&config.params, u, t)?,
        Method::Ode => transform_ode(&config.params, u, t, config.quad_tol)?,
    };
    Ok(Table::record(vec![
        ("u_re", u.re.into()),
        ("u_im", u.im.into()),
        ("t", t.into()),
        ("phi_re", v.phi.re.into()),
        ("phi_im", v.phi.im.into()),
        ("psi_re", v.psi.re.into()),
        ("psi_im", v.psi.im.into()),
    ]))
}

fn side_of(x: f64) -> Option<Side> {
    if x > 0.0 {
        Some(Side::Upper)
    } else if x < 0.0 {
        Some(Side::Lower)
    } else {
        None
    }
}

fn density(config: &RunConfig, points: &[f64], spec: &ContourSpec, asymptotic: bool) -> Result<Table> {
    let values = points
        .par_iter()
        .map(|&l| density_numeric_log(&config.params, &config.ctx, l, spec))
        .collect::<Result<Vec<f64>>>()?;
    if !asymptotic {
        let mut table = Table::new(["log_x", "log_density"]);
        for (&l, &d) in points.iter().zip(&values) {
            table.push(vec![l.into(), d.into()]);
        }
        return Ok(table);
    }
    let upper = tail_constants_for(config, Side::Upper).ok();
    let lower = tail_constants_for(config, Side::Lower).ok();
    let mut table = Table::new(["log_x", "log_density", "log_asymptotic"]);
    for (&l, &d) in points.iter().zip(&values) {
        let tc = match side_of(l) {
            Some(Side::Upper) => upper.as_ref(),
            Some(Side::Lower) => lower.as_ref(),
            None => None,
        };
        let asym = tc.and_then(|tc| density_asymptotic_log(tc, l).ok());
        table.push(vec![l.into(), d.into(), asym.into()]);
    }
    Ok(table)
}

fn price(config: &RunConfig, k: f64, kind: OptionKind, spec: &DampingSpec) -> Result<Table> {
    let (params, ctx) = (&config.params, &config.ctx);
    let value = match kind {
        OptionKind::Call => call_price_numeric(params, ctx, k, spec)?,
        OptionKind::Put => put_price_numeric(params, ctx, k, spec)?,
        OptionKind::Otm => otm_price_numeric_log(params, ctx, k, spec)?.exp(),
    };
    Ok(Table::record(vec![("k", k.into()), ("price", value.into())]))
}

struct Wings {
    upper: Option<(TailConstants, SmileCoeffs)>,
    lower: Option<(TailConstants, SmileCoeffs)>,
}

impl Wings {
    fn new(config: &RunConfig) -> Self {
        let get = |side| {
            let tc = tail_constants_for(config, side).ok()?;
            let co = smile_coeffs(&tc, &config.params).ok()?;
            Some((tc, co))
        };
        Wings {
            upper: get(Side::Upper),
            lower: get(Side::Lower),
        }
    }

    fn at(&self, k: f64) -> Option<&(TailConstants, SmileCoeffs)> {
        match side_of(k)? {
            Side::Upper => self.upper.as_ref(),
            Side::Lower => self.lower.as_ref(),
        }
    }

    /// Expansion value, blank at `k = 0` or where the truncated sum is not positive.
    fn expansion(&self, config: &RunConfig, k: f64, order: Order) -> Option<f64> {
        let (_, co) = self.at(k)?;
        implied_vol_expansion(co, &config.ctx, k, order).ok().map(|w| w.value)
    }

    fn sqrt_form(&self, config: &RunConfig, k: f64) -> Option<f64> {
        let (tc, _) = self.at(k)?;
        smile_sqrt_form(tc, &config.params, &config.ctx, k).ok()
    }
}

fn order_label(o: Order) -> &'static str {
    match o {
        Order::First => "order1",
        Order::Second => "order2",
        Order::Third => "order3",
    }
}

fn exact_vols(config: &RunConfig, ks: &[f64]) -> Result<Vec<f64>> {
    let spec = DampingSpec {
        quad_tol: config.quad_tol,
        ..DampingSpec::default()
    };
    ks.par_iter()
        .map(|&k| exact_implied_vol(&config.params, &config.ctx, k, &spec))
        .collect()
}

fn smile(config: &RunConfig, grid: &Grid, orders: &[Order], exact: bool, sqrt_form: bool) -> Result<Table> {
    let ks = grid.points();
    let wings = Wings::new(config);
    let exact_values = if exact { Some(exact_vols(config, &ks)?) } else { None };
    let mut columns = vec!["k"];
    if exact {
        columns.push("exact_vol");
    }
    columns.extend(orders.iter().map(|&o| order_label(o)));
    if sqrt_form {
        columns.push("sqrt_form");
    }
    let mut table = Table::new(columns);
    for (i, &k) in ks.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into()];
        if let Some(v) = &exact_values {
            row.push(v[i].into());
        }
        row.extend(orders.iter().map(|&o| Cell::from(wings.expansion(config, k, o))));
        if sqrt_form {
            row.push(wings.sqrt_form(config, k).into());
        }
        table.push(row);
    }
    Ok(table)
}

/// Tables behind the five figures, in file order fig1 ... fig5.
pub fn figure_tables(config: &RunConfig, logx: Grid, x: Grid, k: Grid) -> Result<Vec<Table>> {
    let upper = tail_constants_for(config, Side::Upper)?;
    let lower = tail_constants_for(config, Side::Lower).ok();
    let spec = ContourSpec {
        quad_tol: config.quad_tol,
        ..ContourSpec::default()
    };
    let density_on = |points: &[f64]| -> Result<Vec<f64>> {
        points
            .par_iter()
            .map(|&l| density_numeric_log(&config.params, &config.ctx, l, &spec))
            .collect()
    };

    let xs = x.points();
    let dens_x = density_on(&xs)?;
    let mut fig1 = Table::new(["x", "neg_log_density", "right_asym", "left_asym"]);
    for (&x, &d) in xs.iter().zip(&dens_x) {
        let right = (x > 0.0)
            .then(|| logspot_density_asymptotic_log(&upper, x).ok())
            .flatten();
        let left = (x < 0.0)
            .then(|| lower.as_ref().and_then(|tc| logspot_density_asymptotic_log(tc, x).ok()))
            .flatten();
        fig1.push(vec![
            x.into(),
            (-(d + x)).into(),
            right.map(|v| -v).into(),
            left.map(|v| -v).into(),
        ]);
    }

    let ls = logx.points();
    let dens_l = density_on(&ls)?;
    let (a3, a2, a1, pe) = (upper.c3, upper.c2, upper.c1, upper.power_exp);
    let mut fig2 = Table::new(["log_x", "ratio", "A3"]);
    let mut fig3 = Table::new(["log_x", "ratio", "A2"]);
    let mut fig4 = Table::new(["log_x", "ratio", "A1"]);
    for (&l, &d) in ls.iter().zip(&dens_l) {
        if l <= 0.0 {
            return Err(Error::Domain(format!("figure log x grid must be positive, got {l}")));
        }
        fig2.push(vec![l.into(), (-d / l).into(), a3.into()]);
        fig3.push(vec![l.into(), ((d + a3 * l) / l.sqrt()).into(), a2.into()]);
        fig4.push(vec![
            l.into(),
            (d + a3 * l - a2 * l.sqrt() - pe * l.ln()).exp().into(),
            a1.into(),
        ]);
    }

    let ks = k.points();
    let vols = exact_vols(config, &ks)?;
    let wings = Wings::new(config);
    let t = config.ctx.maturity();
    let mut fig5 = Table::new(["k", "exact_total_variance", "order1_sq", "order3_sq"]);
    for (&k, &v) in ks.iter().zip(&vols) {
        let sq = |o| wings.expansion(config, k, o).map(|s| s * s * t);
        fig5.push(vec![
            k.into(),
            (v * v * t).into(),
            sq(Order::First).into(),
            sq(Order::Third).into(),
        ]);
    }
    Ok(vec![fig1, fig2, fig3, fig4, fig5])
}

/// Computes every figure, then writes them; nothing is left behind on failure.
pub fn figures(
    config: &RunConfig,
    logx: Grid,
    x: Grid,
    k: Grid,
    dir: &Path,
) -> std::result::Result<Vec<PathBuf>, CliError> {
    let tables = figure_tables(config, logx, x, k)?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for (i, table) in tables.iter().enumerate() {
        let path = dir.join(format!("fig{}.csv", i + 1));
        if let Err(e) = fs::write(&path, table.csv()) {
            for done in written.iter().chain([&path]) {
                let _ = fs::remove_file(done);
            }
            return Err(CliError::io(&path, e));
        }
        written.push(path);
    }
    Ok(written)
}
