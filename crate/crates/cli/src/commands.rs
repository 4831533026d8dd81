//! `run` and `region`.

use std::path::Path;

use clap::ValueEnum;
use parrondo_core::classical::{classical_limit, classical_win_prob, PfOptions};
use parrondo_core::geodesic::{achieve_extreme, build_b, geo_prob, Extreme};
use parrondo_core::hidden::{hidden_limit, hidden_region_sample, hidden_win_prob};
use parrondo_core::quantum::{quantum_limit, quantum_win_prob, region_grid, region_scan, RegionOptions};
use parrondo_core::walks::walk_geo_game;
use rayon::prelude::*;

use crate::csv::{flag, num, Table};
use crate::spec::{parse_spec, Model};
use crate::Failure;

pub struct RunArgs<'a> {
    pub spec: &'a Path,
    pub n: Option<u64>,
    pub limit: bool,
}

fn limit_value(r: parrondo_core::linalg::FixedPointReport<f64, f64>) -> Result<f64, Failure> {
    if r.converged {
        Ok(r.result)
    } else {
        Err(Failure::NonConvergence(format!(
            "limit did not converge after {} iterations (residual {:e})",
            r.iterations, r.residual
        )))
    }
}

/// Evaluates a spec file and returns its single-row table.
pub fn run(args: &RunArgs) -> Result<Table, Failure> {
    let text = std::fs::read_to_string(args.spec)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.spec.display())))?;
    let spec = parse_spec(&text)?;
    let n = args.n.or(spec.n).unwrap_or(1);
    if n == 0 {
        return Err(Failure::Input("round index n starts at 1".into()));
    }
    let name = spec.model.name().to_string();
    let mut header = vec!["model", "n", "P_A"];
    if args.limit {
        header.push("P_A_limit");
    }
    let single = |p: f64, lim: Option<f64>| {
        let mut t = Table::new(&header);
        let mut row = vec![name.clone(), n.to_string(), num(p)];
        row.extend(lim.map(num));
        t.row(row);
        t
    };
    let no_limit = |model: &str| Failure::Input(format!("--limit is not defined for the {model} model"));
    match &spec.model {
        Model::Classical(g) => {
            let p = classical_win_prob(g, n)?;
            let lim = args.limit.then(|| limit_value(classical_limit(g, PfOptions::slow_mixing())?)).transpose()?;
            Ok(single(p, lim))
        }
        Model::Hidden(pn, init) => {
            let p = hidden_win_prob(pn, init, n)?;
            let lim = args.limit.then(|| limit_value(hidden_limit(pn, PfOptions::slow_mixing())?)).transpose()?;
            Ok(single(p, lim))
        }
        Model::Quantum(pn, rho) => {
            let p = quantum_win_prob(pn, rho, n)?;
            let lim = args.limit.then(|| limit_value(quantum_limit(pn, PfOptions::default())?)).transpose()?;
            Ok(single(p, lim))
        }
        Model::Geodesic { effect, psi, xi, theta } => {
            if args.limit {
                return Err(no_limit("geodesic"));
            }
            let b = build_b(effect, psi, xi)?;
            let pg = geo_prob(&b, *theta)?;
            let mut t = Table::new(&["model", "P_A", "P_Aprime", "P_geo"]);
            t.row([name, num(b.b11()), num(b.b22()), num(pg)]);
            Ok(t)
        }
        Model::Walk(w) => {
            if args.limit {
                return Err(no_limit("walk"));
            }
            let (u, psi, xi) = w.setup(n)?;
            let g = walk_geo_game(&u, &psi, &xi, n as usize, w.theta)?;
            let mut t = Table::new(&["model", "n", "P_A", "P_Aprime", "P_geo"]);
            t.row([name, n.to_string(), num(g.p_a), num(g.p_aprime), num(g.p_geo)]);
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionModel {
    Hidden,
    Quantum,
    Geodesic,
}

#[derive(Debug, Clone)]
pub struct RegionArgs {
    pub model: RegionModel,
    pub p: f64,
    pub grid: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Monte Carlo draws per cell for the hidden model.
    pub samples: usize,
}

pub const REGION_HEADER: [&str; 5] = ["P_A", "P_Aprime", "min_Pcomb", "max_Pcomb", "converged"];

struct Cell {
    min: f64,
    max: f64,
    ok: bool,
}

impl Cell {
    fn from(r: parrondo_core::Result<(f64, f64)>) -> Self {
        match r {
            Ok((min, max)) => Cell { min, max, ok: true },
            Err(_) => Cell { min: f64::NAN, max: f64::NAN, ok: false },
        }
    }
}

/// Independent per-cell seed so cells can run in any order.
fn cell_seed(seed: u64, idx: usize) -> u64 {
    seed ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Extremes of the combined limit over a `K × K` interior grid of `(P_A, P′_A)`.
pub fn region(args: &RegionArgs) -> Result<Table, Failure> {
    if !(0.0..=1.0).contains(&args.p) {
        return Err(Failure::Input(format!("--p {} is outside [0, 1]", args.p)));
    }
    if args.grid == 0 {
        return Err(Failure::Input("--grid must be at least 1".into()));
    }
    let grid = region_grid(args.grid);
    let cells: Vec<Cell> = match args.model {
        RegionModel::Hidden => {
            if args.samples == 0 {
                return Err(Failure::Input("--samples must be at least 1".into()));
            }
            grid.par_iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    Cell::from(
                        hidden_region_sample(args.p, a, b, args.samples, cell_seed(args.seed, i))
                            .map(|s| (s.observed_min, s.observed_max)),
                    )
                })
                .collect()
        }
        RegionModel::Geodesic => grid
            .par_iter()
            .map(|&(a, b)| {
                Cell::from(
                    achieve_extreme(a, b, Extreme::Min)
                        .and_then(|lo| Ok((lo.value, achieve_extreme(a, b, Extreme::Max)?.value))),
                )
            })
            .collect(),
        RegionModel::Quantum => {
            if args.restarts == 0 {
                return Err(Failure::Input("--restarts must be at least 1".into()));
            }
            let opts = RegionOptions { restarts: args.restarts, seed: args.seed, ..RegionOptions::default() };
            region_scan(args.p, &grid, true, &opts)
                .into_iter()
                .map(|c| Cell { min: c.min, max: c.max, ok: c.converged })
                .collect()
        }
    };
    if cells.iter().all(|c| !c.ok) {
        return Err(Failure::AllCellsFailed(cells.len()));
    }
    let mut t = Table::new(&REGION_HEADER);
    for (&(a, b), c) in grid.iter().zip(&cells) {
        t.row([num(a), num(b), num(c.min), num(c.max), flag(c.ok)]);
    }
    Ok(t)
}
