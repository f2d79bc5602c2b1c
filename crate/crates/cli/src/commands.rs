use npc_core::export;
use npc_core::lattice::{MotifShape, NpcLattice};
use npc_core::phasematch::{
    emission_angle, pattern_scan, solve_periods, temperature_tuning_curve, threshold_temperature,
    PatternRequest, PhaseMatchProblem, PhaseMatchSolution,
};
use npc_core::quantum::{fringe_scan, polarization_visibility_curve, visibility_budget};
use npc_core::{DispersionModel, Error as CoreError};
use serde_json::json;

use crate::config::{LoadedConfig, Order, ProblemSection};
use crate::error::{CliError, CliResult};
use crate::manifest::RunOutput;

fn csv<F>(write: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).map_err(CliError::io("formatting output"))?;
    Ok(buf)
}

fn build_problem(p: &ProblemSection, order: Order, temperature_c: f64) -> CliResult<PhaseMatchProblem> {
    PhaseMatchProblem::new(
        p.pump_um,
        p.signal_um,
        p.idler_um,
        p.internal_angle_deg.to_radians(),
        temperature_c,
        (order[0], order[1]),
        p.crystal_length_mm,
    )
    .map_err(CliError::in_section("problem"))
}

fn solve(d: &DispersionModel, p: &ProblemSection, order: Order, temperature_c: f64) -> CliResult<PhaseMatchSolution> {
    let problem = build_problem(p, order, temperature_c)?;
    solve_periods(d, &problem).map_err(CliError::in_section("problem"))
}

/// Rectangular lattice of a solution, carrying a placeholder motif.
fn bare_lattice(sol: &PhaseMatchSolution) -> CliResult<NpcLattice> {
    let ly = sol.period_y_um.ok_or_else(|| {
        CliError::Config("[problem] a two-dimensional lattice needs a non-zero angle and order n".into())
    })?;
    let radius = 0.1 * sol.period_x_um.min(ly);
    sol.lattice(MotifShape::Circle { radius }).map_err(CliError::in_section("problem"))
}

pub fn design(cfg: &LoadedConfig) -> CliResult<RunOutput> {
    let d = cfg.dispersion()?;
    let p = cfg.section(&cfg.config.problem, "problem")?;
    if p.orders.is_empty() {
        return Err(CliError::Config("[problem] orders must list at least one (m, n) pair".into()));
    }
    let mut out = RunOutput::default();

    let solutions = p
        .orders
        .iter()
        .map(|&o| solve(&d, p, o, p.temperature_c))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = String::from(
        "m,n,pump_um,signal_um,idler_um,internal_angle_deg,temperature_c,period_x_um,period_y_um,\
         residual_x_rad_per_um,residual_y_rad_per_um\n",
    );
    for s in &solutions {
        let (m, n) = s.problem.orders();
        table.push_str(&format!(
            "{m},{n},{},{},{},{},{},{},{},{},{}\n",
            s.problem.pump_um(),
            s.problem.signal_um(),
            s.problem.idler_um(),
            p.internal_angle_deg,
            s.problem.temperature_c(),
            s.period_x_um,
            s.period_y_um.map(|v| v.to_string()).unwrap_or_default(),
            s.residual.x,
            s.residual.y
        ));
    }
    out.file("design.csv", table.into_bytes());
    out.note(
        "periods_um",
        solutions
            .iter()
            .map(|s| json!({"order": s.problem.orders(), "x": s.period_x_um, "y": s.period_y_um}))
            .collect::<Vec<_>>(),
    );

    let Some(ds) = &cfg.config.design else {
        return Ok(out);
    };
    let order = ds.motif_order;
    let sol = match solutions.iter().find(|s| s.problem.orders() == (order[0], order[1])) {
        Some(s) => s.clone(),
        None => solve(&d, p, order, p.temperature_c)?,
    };
    let (m, n) = (order[0], order[1]);
    let lattice = bare_lattice(&sol)?;
    let opt = lattice.optimize_motif_radius(m, n).map_err(CliError::in_section("design"))?;
    let lattice = lattice
        .with_motif(MotifShape::Circle { radius: opt.radius })
        .map_err(CliError::in_section("design"))?;
    let transposed = lattice
        .fourier_coefficient_transposed(m, n)
        .map_err(CliError::in_section("design"))?;
    out.file(
        "motif.csv",
        format!(
            "m,n,period_x_um,period_y_um,radius_um,coefficient,transposed_coefficient,fill_factor,at_boundary\n\
             {m},{n},{},{},{},{},{transposed},{},{}\n",
            sol.period_x_um,
            sol.period_y_um.unwrap_or_default(),
            opt.radius,
            opt.coefficient,
            lattice.fill_factor(),
            opt.at_boundary
        )
        .into_bytes(),
    );
    out.note("motif_radius_um", opt.radius);
    out.note("motif_coefficient", opt.coefficient);

    let orders: Vec<(i32, i32)> = ds.table_orders.iter().map(|o| (o[0], o[1])).collect();
    let rows = lattice
        .coefficient_table(&orders, ds.numeric_grid)
        .map_err(CliError::in_section("design"))?;
    out.file("coefficients.csv", csv(|w| export::write_coefficient_table(w, &rows))?);

    if let Some(ppu) = ds.domain_map_pixels_per_um {
        let (lx, ly) = lattice.periods().expect("rectangular design lattice");
        let map = lattice
            .render_domain_map(lx * ds.domain_map_cells[0] as f64, ly * ds.domain_map_cells[1] as f64, ppu)
            .map_err(CliError::in_section("design"))?;
        if let Some(w) = &map.warning {
            out.warnings.push(w.clone());
        }
        out.file("domain_map.pgm", csv(|w| export::write_domain_pgm(w, &map))?);
        out.file("domain_map.csv", csv(|w| export::write_domain_csv(w, &map))?);
    }

    if let Some(range) = ds.tuning_range_c {
        let rows = temperature_tuning_curve(
            &d,
            &lattice,
            (m, n),
            p.pump_um,
            p.signal_um,
            p.crystal_length_mm,
            (range[0], range[1]),
            ds.tuning_steps,
        )
        .map_err(CliError::in_section("design"))?;
        out.file("tuning.csv", csv(|w| export::write_tuning_csv(w, &rows))?);
        match threshold_temperature(&d, &lattice, (m, n), p.pump_um, p.signal_um, (range[0], range[1])) {
            Ok(t) => out.note("threshold_temperature_c", t),
            Err(CoreError::NoSolution(msg)) => out.warnings.push(msg),
            Err(e) => return Err(CliError::in_section("design")(e)),
        }
    }
    Ok(out)
}

pub fn pattern(cfg: &LoadedConfig) -> CliResult<RunOutput> {
    let d = cfg.dispersion()?;
    let p = cfg.section(&cfg.config.problem, "problem")?;
    let ps = cfg.section(&cfg.config.pattern, "pattern")?;
    let sol = solve(&d, p, ps.design_order, ps.design_temperature_c)?;
    let lattice = bare_lattice(&sol)?;
    let request = PatternRequest {
        orders: ps.orders.iter().map(|o| (o[0], o[1])).collect(),
        pump_um: p.pump_um,
        signal_um: p.signal_um,
        temperature_c: ps.temperature_c,
        crystal_length_mm: p.crystal_length_mm,
        half_window_deg: ps.half_window_deg,
        grid: ps.grid,
    };
    let map = pattern_scan(&d, &lattice, &request).map_err(CliError::in_section("pattern"))?;

    let mut out = RunOutput::default();
    out.file("pattern.csv", csv(|w| export::write_pattern_csv(w, &map))?);
    out.file("pattern.pgm", csv(|w| export::write_pattern_pgm(w, &map))?);
    let mut emission = Vec::new();
    for &(m, n) in &request.orders {
        let entry = match emission_angle(&d, &lattice, (m, n), p.pump_um, p.signal_um, ps.temperature_c, p.crystal_length_mm) {
            Ok(e) => json!({
                "order": [m, n],
                "regime": e.regime,
                "axis_angle_deg": e.axis_angle_rad.to_degrees(),
                "cone_half_angle_deg": e.cone_half_angle_rad.to_degrees(),
            }),
            Err(CoreError::NoSolution(_)) => json!({"order": [m, n], "regime": "no_solution"}),
            Err(e) => return Err(CliError::in_section("pattern")(e)),
        };
        emission.push(entry);
    }
    out.note("lattice_periods_um", [sol.period_x_um, sol.period_y_um.unwrap_or_default()]);
    out.note("emission", emission);
    Ok(out)
}

pub fn fringe(cfg: &LoadedConfig, budget: bool) -> CliResult<RunOutput> {
    let fs = cfg.section(&cfg.config.fringe, "fringe")?;
    let model = cfg.config.imperfections.model()?;
    let scan = fringe_scan(fs.wavelength_um, (fs.delay_start_um, fs.delay_end_um), fs.steps, &model)
        .map_err(|e| match e {
            CoreError::PeriodExtraction(_) => CliError::Config(format!("[fringe] {e}")),
            other => CliError::in_section("fringe")(other),
        })?;
    let mut out = RunOutput::default();
    out.file("fringe.csv", csv(|w| export::write_fringe_csv(w, &scan))?);
    out.note("visibility", scan.visibility);
    out.note("sampled_visibility", scan.sampled_visibility);
    out.note("period_um", scan.period_um);
    out.note("mixture_weights", scan.weights);
    out.note("imperfection_model", model);
    if budget {
        let rows = visibility_budget(&model).map_err(CliError::in_section("imperfections"))?;
        out.file("budget.csv", csv(|w| export::write_budget_csv(w, &rows))?);
        out.note("budget", rows);
    }
    Ok(out)
}

pub fn polscan(cfg: &LoadedConfig) -> CliResult<RunOutput> {
    let ps = cfg.section(&cfg.config.polscan, "polscan")?;
    let model = cfg.config.imperfections.model()?;
    let curve = polarization_visibility_curve(
        (ps.start_deg.to_radians(), ps.end_deg.to_radians()),
        ps.steps,
        &model,
    )
    .map_err(CliError::in_section("polscan"))?;
    let rows: Vec<(f64, f64)> = curve
        .iter()
        .enumerate()
        .map(|(i, &(_, v))| {
            let deg = if ps.steps == 1 {
                ps.start_deg
            } else {
                ps.start_deg + (ps.end_deg - ps.start_deg) * i as f64 / (ps.steps - 1) as f64
            };
            (deg, v)
        })
        .collect();
    let mut out = RunOutput::default();
    out.file("polarization.csv", csv(|w| export::write_polarization_csv(w, &rows))?);
    out.note("rows", rows.len());
    out.note("imperfection_model", model);
    Ok(out)
}

pub fn lattice_check(cfg: &LoadedConfig) -> CliResult<RunOutput> {
    let lc = cfg.section(&cfg.config.lattice_check, "lattice_check")?;
    let [lx, ly] = lc.reference_periods_um;
    let circle = MotifShape::Circle { radius: 0.0 };
    let reference = NpcLattice::rectangular(lx, ly, circle).map_err(CliError::in_section("lattice_check"))?;
    let g = |o: Order| reference.reciprocal_vector(o[0], o[1]).as_vec();
    let tested = match lc.basis_orders {
        Some([a, b]) => NpcLattice::from_reciprocal(g(a), g(b), circle).map_err(CliError::in_section("lattice_check"))?,
        None => reference.clone(),
    };
    let query = match (lc.vector_rad_per_um, lc.midpoint_orders) {
        (Some([x, y]), None) => npc_core::Vec2::new(x, y),
        (None, Some([a, b])) => (g(a) + g(b)).scale(0.5),
        _ => {
            return Err(CliError::Config(
                "[lattice_check] set exactly one of `vector_rad_per_um` and `midpoint_orders`".into(),
            ))
        }
    };
    let present = tested
        .has_lattice_point_at(query, lc.tolerance_rad_per_um)
        .map_err(CliError::in_section("lattice_check"))?;
    let mut out = RunOutput::default();
    out.file(
        "lattice_check.csv",
        format!(
            "query_x_rad_per_um,query_y_rad_per_um,tolerance_rad_per_um,lattice_point_present\n{},{},{},{present}\n",
            query.x, query.y, lc.tolerance_rad_per_um
        )
        .into_bytes(),
    );
    out.note("query_rad_per_um", [query.x, query.y]);
    out.note("lattice_point_present", present);
    Ok(out)
}
