//! Combustion property tables for the three LOX/fuel combinations.
//!
//! The bundled CSV holds characteristic velocity, frozen ratio of specific
//! heats and chamber temperature on a rectangular chamber-pressure times
//! mixture-ratio grid per combination. Queries interpolate bilinearly and
//! refuse to extrapolate.

use std::sync::OnceLock;

use thiserror::Error;

use super::Fuel;

const BUNDLED_CSV: &str = include_str!("../../resources/thermo_tables.csv");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("combustion table line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{fuel} {axis} = {value:.4} outside table range [{min:.4}, {max:.4}]")]
    OutOfRange {
        fuel: Fuel,
        axis: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
}

/// Chamber equilibrium properties at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChamberProperties {
    /// Characteristic velocity, m/s.
    pub c_star: f64,
    /// Frozen ratio of specific heats of the chamber gas.
    pub gamma: f64,
    /// Adiabatic flame temperature, K.
    pub chamber_temperature: f64,
}

#[derive(Debug, Clone)]
struct ComboTable {
    /// Chamber pressure nodes, Pa, ascending.
    pc: Vec<f64>,
    /// Mixture ratio nodes, ascending.
    rof: Vec<f64>,
    /// Row-major over (pc, rof).
    points: Vec<ChamberProperties>,
}

impl ComboTable {
    fn lookup(&self, fuel: Fuel, p_c: f64, rof: f64) -> Result<ChamberProperties, TableError> {
        let i = locate(&self.pc, p_c).ok_or_else(|| TableError::OutOfRange {
            fuel,
            axis: "chamber pressure",
            value: p_c,
            min: self.pc[0],
            max: *self.pc.last().unwrap(),
        })?;
        let j = locate(&self.rof, rof).ok_or_else(|| TableError::OutOfRange {
            fuel,
            axis: "mixture ratio",
            value: rof,
            min: self.rof[0],
            max: *self.rof.last().unwrap(),
        })?;

        let tx = (p_c - self.pc[i]) / (self.pc[i + 1] - self.pc[i]);
        let ty = (rof - self.rof[j]) / (self.rof[j + 1] - self.rof[j]);
        let n = self.rof.len();
        let at = |i: usize, j: usize| &self.points[i * n + j];
        let blend = |f: fn(&ChamberProperties) -> f64| {
            let f00 = f(at(i, j));
            let f10 = f(at(i + 1, j));
            let f01 = f(at(i, j + 1));
            let f11 = f(at(i + 1, j + 1));
            f00 * (1.0 - tx) * (1.0 - ty)
                + f10 * tx * (1.0 - ty)
                + f01 * (1.0 - tx) * ty
                + f11 * tx * ty
        };
        Ok(ChamberProperties {
            c_star: blend(|p| p.c_star),
            gamma: blend(|p| p.gamma),
            chamber_temperature: blend(|p| p.chamber_temperature),
        })
    }
}

/// Index of the cell containing `x`, or None outside the grid hull.
fn locate(nodes: &[f64], x: f64) -> Option<usize> {
    if x < nodes[0] || x > *nodes.last().unwrap() {
        return None;
    }
    let i = nodes.partition_point(|&n| n <= x);
    Some(i.saturating_sub(1).min(nodes.len() - 2))
}

#[derive(Debug, Clone)]
pub struct ThermoTables {
    lh2: ComboTable,
    rp1: ComboTable,
    lch4: ComboTable,
}

impl ThermoTables {
    /// The table bundled with the binary.
    pub fn bundled() -> &'static ThermoTables {
        static BUNDLED: OnceLock<ThermoTables> = OnceLock::new();
        BUNDLED
            .get_or_init(|| ThermoTables::parse(BUNDLED_CSV).expect("bundled table is well formed"))
    }

    /// Interpolated chamber properties; `p_c` in Pa.
    pub fn lookup(
        &self,
        fuel: Fuel,
        p_c: f64,
        rof: f64,
    ) -> Result<ChamberProperties, TableError> {
        self.combo(fuel).lookup(fuel, p_c, rof)
    }

    /// Grid hull of one combination: ((pc_min, pc_max), (rof_min, rof_max)), Pa.
    pub fn hull(&self, fuel: Fuel) -> ((f64, f64), (f64, f64)) {
        let t = self.combo(fuel);
        (
            (t.pc[0], *t.pc.last().unwrap()),
            (t.rof[0], *t.rof.last().unwrap()),
        )
    }

    fn combo(&self, fuel: Fuel) -> &ComboTable {
        match fuel {
            Fuel::Lh2 => &self.lh2,
            Fuel::Rp1 => &self.rp1,
            Fuel::Lch4 => &self.lch4,
        }
    }

    fn parse(csv: &str) -> Result<ThermoTables, TableError> {
        let parse_err = |line: usize, message: &str| TableError::Parse {
            line,
            message: message.to_string(),
        };

        let mut rows: Vec<(Fuel, f64, f64, ChamberProperties)> = Vec::new();
        for (idx, raw) in csv.lines().enumerate() {
            let line = idx + 1;
            if idx == 0 {
                if raw.trim() != "combo,p_c_bar,rof,c_star_mps,gamma,t_c_K" {
                    return Err(parse_err(line, "unexpected header"));
                }
                continue;
            }
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split(',').collect();
            if fields.len() != 6 {
                return Err(parse_err(line, "expected 6 fields"));
            }
            let fuel = fields[0]
                .parse::<Fuel>()
                .map_err(|_| parse_err(line, "unknown combination"))?;
            let mut nums = [0f64; 5];
            for (k, text) in fields[1..].iter().enumerate() {
                nums[k] = text
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(line, "non-numeric field"))?;
            }
            let point = ChamberProperties {
                c_star: nums[2],
                gamma: nums[3],
                chamber_temperature: nums[4],
            };
            if !(1.05..=1.67).contains(&point.gamma)
                || !(800.0..=3000.0).contains(&point.c_star)
                || !(1000.0..=4500.0).contains(&point.chamber_temperature)
            {
                return Err(parse_err(line, "value outside physical bounds"));
            }
            rows.push((fuel, nums[0] * 1e5, nums[1], point));
        }

        let build = |fuel: Fuel| -> Result<ComboTable, TableError> {
            let mut pc: Vec<f64> = Vec::new();
            let mut rof: Vec<f64> = Vec::new();
            for &(f, p, r, _) in &rows {
                if f != fuel {
                    continue;
                }
                if !pc.iter().any(|&x| x == p) {
                    pc.push(p);
                }
                if !rof.iter().any(|&x| x == r) {
                    rof.push(r);
                }
            }
            pc.sort_by(|a, b| a.total_cmp(b));
            rof.sort_by(|a, b| a.total_cmp(b));
            if pc.len() < 2 || rof.len() < 2 {
                return Err(parse_err(0, "grid needs at least 2x2 nodes"));
            }
            let mut points = vec![None; pc.len() * rof.len()];
            for &(f, p, r, point) in &rows {
                if f != fuel {
                    continue;
                }
                let i = pc.iter().position(|&x| x == p).unwrap();
                let j = rof.iter().position(|&x| x == r).unwrap();
                points[i * rof.len() + j] = Some(point);
            }
            let points: Option<Vec<ChamberProperties>> = points.into_iter().collect();
            let points = points.ok_or_else(|| parse_err(0, "incomplete grid"))?;
            Ok(ComboTable { pc, rof, points })
        };

        Ok(ThermoTables {
            lh2: build(Fuel::Lh2)?,
            rp1: build(Fuel::Rp1)?,
            lch4: build(Fuel::Lch4)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn node_queries_return_stored_values() {
        let tables = ThermoTables::bundled();
        // Rows straight from the bundled file.
        let p = tables.lookup(Fuel::Lh2, 100e5, 4.0).unwrap();
        assert_eq!(p.c_star, 2404.31);
        assert_eq!(p.gamma, 1.21714);
        assert_eq!(p.chamber_temperature, 2958.1);
        let q = tables.lookup(Fuel::Rp1, 20e5, 1.5).unwrap();
        assert_eq!(q.c_star, 1637.18);
    }

    #[test]
    fn midpoint_along_pressure_axis_is_the_node_mean() {
        let tables = ThermoTables::bundled();
        let lo = tables.lookup(Fuel::Rp1, 80e5, 2.5).unwrap();
        let hi = tables.lookup(Fuel::Rp1, 100e5, 2.5).unwrap();
        let mid = tables.lookup(Fuel::Rp1, 90e5, 2.5).unwrap();
        assert_relative_eq!(mid.c_star, 0.5 * (lo.c_star + hi.c_star), epsilon = 1e-9);
        assert_relative_eq!(mid.gamma, 0.5 * (lo.gamma + hi.gamma), epsilon = 1e-12);
        assert_relative_eq!(
            mid.chamber_temperature,
            0.5 * (lo.chamber_temperature + hi.chamber_temperature),
            epsilon = 1e-9
        );
    }

    #[test]
    fn queries_outside_the_hull_are_rejected() {
        let tables = ThermoTables::bundled();
        assert!(matches!(
            tables.lookup(Fuel::Rp1, 19.9e5, 2.5),
            Err(TableError::OutOfRange { axis: "chamber pressure", .. })
        ));
        assert!(matches!(
            tables.lookup(Fuel::Rp1, 100e5, 3.51),
            Err(TableError::OutOfRange { axis: "mixture ratio", .. })
        ));
        assert!(tables.lookup(Fuel::Rp1, 200e5, 3.5).is_ok());
    }

    #[test]
    fn hull_matches_the_design_space_bounds() {
        let tables = ThermoTables::bundled();
        assert_eq!(tables.hull(Fuel::Lh2), ((20e5, 200e5), (4.0, 7.9)));
        assert_eq!(tables.hull(Fuel::Rp1), ((20e5, 200e5), (1.5, 3.5)));
        assert_eq!(tables.hull(Fuel::Lch4), ((20e5, 200e5), (2.0, 4.0)));
    }

    #[test]
    fn interpolation_stays_within_cell_bounds() {
        let tables = ThermoTables::bundled();
        for &(plo, phi) in &[(20e5, 40e5), (120e5, 140e5)] {
            for frac in [0.25, 0.5, 0.75] {
                let p = plo + frac * (phi - plo);
                let v = tables.lookup(Fuel::Lch4, p, 3.0).unwrap();
                let lo = tables.lookup(Fuel::Lch4, plo, 3.0).unwrap();
                let hi = tables.lookup(Fuel::Lch4, phi, 3.0).unwrap();
                let (min, max) = if lo.c_star < hi.c_star {
                    (lo.c_star, hi.c_star)
                } else {
                    (hi.c_star, lo.c_star)
                };
                assert!(v.c_star >= min - 1e-9 && v.c_star <= max + 1e-9);
            }
        }
    }
}
