use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::field::{lq_norm, sobolev_norm_spectral};
use crate::grid::Grid;
use crate::propagator::{SolverConfig, SolverState};
use crate::scalar::Real;

use super::conserved::{energy_parts_with, mass};
use super::cube::{cube_half_cells, sup_window_sum};
use super::morawetz::{marginal_density, MorawetzKernel};

/// What to compute at each recorded step.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsPlan<T> {
    pub q_list: Vec<T>,
    /// Cube half-widths; the first one feeds the Morawetz integrand.
    pub r_list: Vec<T>,
    pub morawetz: bool,
}

impl<T: Real> Default for DiagnosticsPlan<T> {
    fn default() -> Self {
        Self {
            q_list: Vec::new(),
            r_list: Vec::new(),
            morawetz: false,
        }
    }
}

/// Ordered `key → value` pairs serialized as a JSON object.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyedValues(pub Vec<(f64, f64)>);

impl KeyedValues {
    pub fn get(&self, key: f64) -> Option<f64> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    pub fn first(&self) -> Option<f64> {
        self.0.first().map(|(_, v)| *v)
    }
}

impl Serialize for KeyedValues {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(&format_key(*k), v)?;
        }
        m.end()
    }
}

fn format_key(k: f64) -> String {
    if k.is_infinite() {
        "inf".to_string()
    } else {
        format!("{k}")
    }
}

/// One row of monitored functionals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub lq: KeyedValues,
    pub cube_mass: KeyedValues,
    pub morawetz: Option<f64>,
    /// `sup_cube_mass(r₀)^{(p+4)/2}` for the first cube width.
    #[serde(skip)]
    pub morawetz_integrand: f64,
    pub h2: f64,
    pub post_wrap: bool,
}

/// Evaluates a [`DiagnosticsPlan`] on solver states.
#[derive(Clone, Debug)]
pub struct Monitor<T: Real> {
    grid: Arc<Grid<T>>,
    config: SolverConfig<T>,
    plan: DiagnosticsPlan<T>,
    cube_cells: Vec<usize>,
    kernel: Option<MorawetzKernel<T>>,
}

impl<T: Real> Monitor<T> {
    pub fn new(grid: Arc<Grid<T>>, config: SolverConfig<T>, plan: DiagnosticsPlan<T>) -> Result<Self> {
        let h = grid.euclid_spacing();
        let l = grid.spec().box_half_length;
        let cube_cells = plan
            .r_list
            .iter()
            .map(|&r| cube_half_cells(h, l, r))
            .collect::<Result<Vec<_>>>()?;
        for &q in &plan.q_list {
            lq_norm(&crate::field::ComplexField::zeros(grid.clone()), q)?;
        }
        let kernel = if plan.morawetz {
            Some(MorawetzKernel::new(&grid)?)
        } else {
            None
        };
        Ok(Self {
            grid,
            config,
            plan,
            cube_cells,
            kernel,
        })
    }

    /// Effective cube half-widths (whole cells).
    pub fn effective_r(&self) -> Vec<T> {
        let h = self.grid.euclid_spacing();
        self.cube_cells.iter().map(|&c| T::of_usize(c) * h).collect()
    }

    pub fn record(&self, state: &SolverState<T>) -> Result<DiagnosticsRecord> {
        let f = &state.field;
        let spec = f.to_spectral();
        let e = energy_parts_with(f, &spec, &self.config);
        let mut lq = Vec::with_capacity(self.plan.q_list.len());
        for &q in &self.plan.q_list {
            lq.push((q.as_f64(), lq_norm(f, q)?.as_f64()));
        }
        let mut cube = Vec::with_capacity(self.cube_cells.len());
        if !self.cube_cells.is_empty() {
            let rho = marginal_density(f);
            let g = &self.grid;
            for (&r, &c) in self.plan.r_list.iter().zip(&self.cube_cells) {
                let v = sup_window_sum(&rho, g.euclid_dims(), g.spec().points_euclid, c) * g.euclid_cell_volume();
                cube.push((r.as_f64(), v.as_f64()));
            }
        }
        let integrand = cube
            .first()
            .map(|&(_, v)| v.powf((self.config.p.as_f64() + 4.0) / 2.0))
            .unwrap_or(0.0);
        Ok(DiagnosticsRecord {
            t: state.t.as_f64(),
            mass: mass(f).as_f64(),
            energy: e.total().as_f64(),
            kinetic: e.kinetic.as_f64(),
            potential: e.potential.as_f64(),
            lq: KeyedValues(lq),
            cube_mass: KeyedValues(cube),
            morawetz: self.kernel.as_ref().map(|k| k.action(f).as_f64()),
            morawetz_integrand: integrand,
            h2: sobolev_norm_spectral(&spec, T::of(2.0)).as_f64(),
            post_wrap: state.t > state.t_wrap,
        })
    }
}

/// CSV header matching [`csv_row`] for records shaped like `r`.
pub fn csv_header(r: &DiagnosticsRecord) -> String {
    let mut cols = vec!["t", "mass", "energy", "kinetic", "potential"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    cols.extend(r.lq.0.iter().map(|(q, _)| format!("lq_{}", format_key(*q))));
    cols.extend(r.cube_mass.0.iter().map(|(q, _)| format!("cube_mass_{}", format_key(*q))));
    cols.extend(["morawetz", "h2", "post_wrap"].map(String::from));
    cols.join(",")
}

pub fn csv_row(r: &DiagnosticsRecord) -> String {
    let mut cols = vec![
        r.t.to_string(),
        r.mass.to_string(),
        r.energy.to_string(),
        r.kinetic.to_string(),
        r.potential.to_string(),
    ];
    cols.extend(r.lq.0.iter().map(|(_, v)| v.to_string()));
    cols.extend(r.cube_mass.0.iter().map(|(_, v)| v.to_string()));
    cols.push(r.morawetz.map(|m| m.to_string()).unwrap_or_default());
    cols.push(r.h2.to_string());
    cols.push(r.post_wrap.to_string());
    cols.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DiagnosticsRecord {
        DiagnosticsRecord {
            t: 0.5,
            mass: 1.0,
            energy: 2.0,
            kinetic: 1.5,
            potential: 0.5,
            lq: KeyedValues(vec![(3.0, 0.25), (f64::INFINITY, 1.0)]),
            cube_mass: KeyedValues(vec![(1.0, 0.75)]),
            morawetz: Some(-0.125),
            morawetz_integrand: 0.0,
            h2: 4.0,
            post_wrap: false,
        }
    }

    #[test]
    fn ndjson_keys_are_fixed() {
        let v: serde_json::Value = serde_json::to_value(sample()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let mut expect = vec![
            "t", "mass", "energy", "kinetic", "potential", "lq", "cube_mass", "morawetz", "h2", "post_wrap",
        ];
        expect.sort();
        let mut got = keys.clone();
        got.sort();
        assert_eq!(got, expect);
        assert_eq!(v["lq"]["inf"], 1.0);
        assert_eq!(v["lq"]["3"], 0.25);
    }

    #[test]
    fn csv_columns_line_up() {
        let r = sample();
        let h = csv_header(&r);
        let row = csv_row(&r);
        assert_eq!(h.split(',').count(), row.split(',').count());
        assert!(h.starts_with("t,mass,energy,kinetic,potential,lq_3,lq_inf,cube_mass_1,morawetz"));
    }
}
