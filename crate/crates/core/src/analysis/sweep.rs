//! Optimal-placement maps over the `(P_F, P_D)` plane.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::grid::{nodes, Grid, Node, PlaneRegion, Window};
use crate::detection::{admissible_placements, evaluate_all, Optimum};
use crate::error::{Error, Result};
use crate::model::{Placement, SensorModel};

/// Default ceiling on likelihood evaluations for one sweep.
pub const DEFAULT_BUDGET: f64 = 5e9;

/// CSV header of [`RegionMap::to_csv`].
pub const CSV_HEADER: &str = "p_f,p_d,best,tie_count,pe_min,margin";

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub step: f64,
    pub region: PlaneRegion,
    pub window: Option<(f64, f64, f64, f64)>,
    pub budget: f64,
}

impl SweepConfig {
    pub fn new(step: f64) -> Self {
        Self {
            step,
            region: PlaneRegion::PdGePf,
            window: None,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn region(mut self, region: PlaneRegion) -> Self {
        self.region = region;
        self
    }

    /// Restricts the sweep to `p_f ∈ [pf_lo, pf_hi]`, `p_d ∈ [pd_lo, pd_hi]`.
    pub fn window(mut self, pf_lo: f64, pf_hi: f64, pd_lo: f64, pd_hi: f64) -> Self {
        self.window = Some((pf_lo, pf_hi, pd_lo, pd_hi));
        self
    }

    pub fn budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }
}

/// Optimum at one grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    #[serde(flatten)]
    pub node: Node,
    #[serde(flatten)]
    pub optimum: Optimum,
}

/// Optimum record for every node of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub m: usize,
    pub n: usize,
    pub grid: Grid,
    pub region: PlaneRegion,
    pub cells: Vec<Cell>,
}

/// Rough count of likelihood evaluations for a sweep.
pub fn cost_estimate(m: usize, n_nodes: usize, n_placements: usize) -> f64 {
    n_nodes as f64 * n_placements as f64 * (1u64 << m.min(62)) as f64 * (m + 1) as f64
}

/// Sweeps the half-plane `p_d >= p_f` (or the full square) at `step`.
pub fn sweep_plane(m: usize, n: usize, step: f64, region: PlaneRegion) -> Result<RegionMap> {
    sweep(m, n, &SweepConfig::new(step).region(region))
}

/// Sweep with explicit configuration. Nodes are evaluated in parallel on
/// the current rayon pool and collected in node order.
pub fn sweep(m: usize, n: usize, config: &SweepConfig) -> Result<RegionMap> {
    let grid = Grid::new(config.step)?;
    let window = config
        .window
        .map(|(a, b, c, d)| Window::around(&grid, (a, b), (c, d)));
    let placements = admissible_placements(m, n)?;
    let nodes = nodes(&grid, config.region, window.as_ref());
    let estimate = cost_estimate(m, nodes.len(), placements.len());
    if estimate > config.budget {
        return Err(Error::BudgetExceeded {
            estimate,
            budget: config.budget,
        });
    }
    let cells = nodes
        .into_par_iter()
        .map(|node| {
            let model = SensorModel::new(node.p_d, node.p_f).expect("grid nodes are probabilities");
            let values = evaluate_all(&placements, &model);
            Cell {
                node,
                optimum: Optimum::from_values(&placements, &values),
            }
        })
        .collect();
    Ok(RegionMap {
        m,
        n,
        grid,
        region: config.region,
        cells,
    })
}

impl RegionMap {
    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    /// Count vectors of every placement that is strictly optimal somewhere
    /// with `p_d >= p_f`.
    pub fn strict_set(&self) -> BTreeSet<Vec<usize>> {
        self.cells
            .iter()
            .filter(|c| c.node.i_d >= c.node.i_f)
            .filter_map(|c| c.optimum.strict_best())
            .map(|p| p.counts().to_vec())
            .collect()
    }

    /// Strictly optimal placements, highest count vector first.
    pub fn strict_placements(&self) -> Vec<Placement> {
        self.strict_set()
            .into_iter()
            .rev()
            .map(|c| Placement::new(&c, self.n).expect("counts came from valid placements"))
            .collect()
    }

    pub fn cell(&self, i_f: usize, i_d: usize) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.node.i_f == i_f && c.node.i_d == i_d)
    }

    /// Cell closest to `(p_f, p_d)`.
    pub fn cell_at(&self, p_f: f64, p_d: f64) -> Option<&Cell> {
        self.cell(self.grid.index_of(p_f), self.grid.index_of(p_d))
    }

    /// CSV with one row per node in sweep order.
    pub fn to_csv(&self) -> String {
        let dec = self.grid.decimals();
        let mut out = String::with_capacity(self.cells.len() * 48);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let margin = c
                .optimum
                .margin
                .map(|m| format!("{m:.6e}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{:.dec$},{:.dec$},{},{},{:.12},{}",
                c.node.p_f,
                c.node.p_d,
                c.optimum.first(),
                c.optimum.best.len(),
                c.optimum.pe_min,
                margin
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}
