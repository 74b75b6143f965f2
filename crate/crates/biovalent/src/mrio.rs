//! Input-output engine: coefficient matrices, the Leontief system, and the
//! attribution of physical stressors to consuming regions and products.
//!
//! Conventions:
//! - `Z` is the inter-industry flow matrix (currency), N x N with
//!   N = |regions| * |sectors|.
//! - `Y` is final demand (currency), N x |regions|, demand categories already
//!   summed per consuming region.
//! - `x` is gross output (currency), length N.
//! - a satellite row `f` holds a stressor quantity per producing
//!   (region, sector), in the row's physical unit.
//!
//! All operations are pure functions over immutable inputs and can be run in
//! parallel across satellite rows.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::index::RegionSectorIndex;
use crate::linalg::Matrix;
use crate::num::Scalar;

/// Relative slack allowed when validating a supplied gross output vector
/// against the accounting identity x >= rowsum(Z).
const OUTPUT_IDENTITY_TOL: f64 = 1e-6;

/// Maximum residual of (I - A) * L - I accepted from the inversion.
const LEONTIEF_RESIDUAL_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Economic core
// ---------------------------------------------------------------------------

/// Inter-industry flows, final demand and gross output over one index.
#[derive(Debug, Clone)]
pub struct EconomicCore<S> {
    index: RegionSectorIndex,
    z: Matrix<S>,
    y: Matrix<S>,
    x: Vec<S>,
}

/// Gross output from the accounting identity x[n] = sum_m Z[n,m] + sum_j Y[n,j].
pub fn derive_output<S: Scalar>(z: &Matrix<S>, y: &Matrix<S>) -> Result<Vec<S>> {
    if z.n_rows() != z.n_cols() {
        return Err(Error::Dimension {
            axis: "flow matrix columns".into(),
            expected: z.n_rows(),
            found: z.n_cols(),
        });
    }
    if y.n_rows() != z.n_rows() {
        return Err(Error::Dimension {
            axis: "final demand rows".into(),
            expected: z.n_rows(),
            found: y.n_rows(),
        });
    }
    if !z.is_finite() {
        return Err(Error::NonFinite("flow matrix".into()));
    }
    if !y.is_finite() {
        return Err(Error::NonFinite("final demand".into()));
    }
    Ok((0..z.n_rows())
        .map(|n| z.row_sum(n) + y.row_sum(n))
        .collect())
}

impl<S: Scalar> EconomicCore<S> {
    /// Build a core whose gross output is derived from Z and Y.
    pub fn new(index: RegionSectorIndex, z: Matrix<S>, y: Matrix<S>) -> Result<Self> {
        let x = derive_output(&z, &y)?;
        Self::with_output(index, z, y, x)
    }

    /// Build a core with a supplied gross output vector.
    pub fn with_output(
        index: RegionSectorIndex,
        z: Matrix<S>,
        y: Matrix<S>,
        x: Vec<S>,
    ) -> Result<Self> {
        let n = index.len();
        if z.n_rows() != n || z.n_cols() != n {
            return Err(Error::Dimension {
                axis: "flow matrix".into(),
                expected: n,
                found: z.n_rows().max(z.n_cols()),
            });
        }
        if y.n_rows() != n {
            return Err(Error::Dimension {
                axis: "final demand rows".into(),
                expected: n,
                found: y.n_rows(),
            });
        }
        if y.n_cols() != index.n_regions() {
            return Err(Error::Dimension {
                axis: "final demand columns".into(),
                expected: index.n_regions(),
                found: y.n_cols(),
            });
        }
        if x.len() != n {
            return Err(Error::Dimension {
                axis: "gross output".into(),
                expected: n,
                found: x.len(),
            });
        }
        if z.values().iter().any(|v| *v < S::zero()) {
            return Err(Error::Invalid("negative entry in flow matrix".into()));
        }
        if y.values().iter().any(|v| *v < S::zero()) {
            return Err(Error::Invalid("negative entry in final demand".into()));
        }
        if x.iter().any(|v| *v < S::zero() || !v.is_finite()) {
            return Err(Error::Invalid("gross output must be finite and >= 0".into()));
        }
        // x must cover intermediate use, up to rounding in the source data
        let scale = x.iter().fold(S::zero(), |acc, v| acc.max(*v));
        let slack = scale * S::from_f64_lossy(OUTPUT_IDENTITY_TOL);
        for n_pos in 0..n {
            let used = z.row_sum(n_pos);
            if x[n_pos] + slack < used {
                return Err(Error::Invalid(format!(
                    "gross output of {} is below its intermediate deliveries",
                    index.label(n_pos)
                )));
            }
        }
        Ok(Self { index, z, y, x })
    }

    pub fn index(&self) -> &RegionSectorIndex {
        &self.index
    }

    pub fn flows(&self) -> &Matrix<S> {
        &self.z
    }

    pub fn final_demand(&self) -> &Matrix<S> {
        &self.y
    }

    pub fn output(&self) -> &[S] {
        &self.x
    }

    /// Total final demand for product sector `k` by consuming region `j`,
    /// summed over producing regions.
    pub fn demand_for(&self, consuming_region: usize, sector: usize) -> S {
        (0..self.index.n_regions())
            .map(|r| {
                self.y
                    .get(self.index.position_of(r, sector), consuming_region)
            })
            .sum()
    }

    /// Technical coefficients A[n,m] = Z[n,m] / x[m].
    ///
    /// Columns with zero output must be empty; a zero-output sector that still
    /// receives deliveries indicates corrupt data and is rejected.
    pub fn coefficients(&self) -> Result<Matrix<S>> {
        let n = self.index.len();
        let mut a = Matrix::zeros(n, n);
        for m in 0..n {
            if self.x[m].is_zero() {
                if (0..n).any(|r| !self.z.get(r, m).is_zero()) {
                    return Err(Error::DegenerateSector {
                        label: self.index.label(m),
                        reason: "zero gross output but nonzero input column".into(),
                    });
                }
                continue;
            }
            for r in 0..n {
                a.set(r, m, self.z.get(r, m) / self.x[m]);
            }
        }
        Ok(a)
    }

    /// Total requirements matrix L = (I - A)^-1 for this core.
    pub fn total_requirements(&self) -> Result<Matrix<S>> {
        leontief_inverse(&self.coefficients()?)
    }
}

// ---------------------------------------------------------------------------
// Leontief inversion
// ---------------------------------------------------------------------------

/// Total requirements matrix L = (I - A)^-1.
///
/// The result is verified two ways: the residual ||(I - A) L - I||_max must
/// stay below 1e-8, and L must be non-negative, which for a non-negative A is
/// equivalent to the spectral radius being below one (a productive economy).
pub fn leontief_inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::Dimension {
            axis: "coefficient matrix".into(),
            expected: a.n_rows(),
            found: a.n_cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("coefficient matrix".into()));
    }
    let n = a.n_rows();
    let mut i_minus_a = Matrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            i_minus_a.set(r, c, i_minus_a.get(r, c) - a.get(r, c));
        }
    }
    let l = i_minus_a.lu_inverse().map_err(|e| match e {
        Error::Singular(msg) => Error::NonProductive(format!("singular system: {msg}")),
        other => other,
    })?;

    let residual = i_minus_a.matmul(&l)?.max_abs_diff(&Matrix::<S>::identity(n));
    if residual > S::from_f64_lossy(LEONTIEF_RESIDUAL_TOL) {
        return Err(Error::NonProductive(format!(
            "inversion residual {residual} exceeds tolerance"
        )));
    }
    let negative_floor = -S::from_f64_lossy(1e-9) * l.max_abs().max(S::one());
    if l.min_value() < negative_floor {
        return Err(Error::NonProductive(
            "total requirements contain negative entries".into(),
        ));
    }
    Ok(l)
}

// ---------------------------------------------------------------------------
// Satellite accounts
// ---------------------------------------------------------------------------

/// Named stressor rows with one physical unit each.
#[derive(Debug, Clone)]
pub struct SatelliteTable<S> {
    names: Vec<String>,
    units: Vec<String>,
    data: Matrix<S>,
}

/// Borrowed view of one stressor account.
#[derive(Debug, Clone, Copy)]
pub struct SatelliteRow<'a, S> {
    pub name: &'a str,
    pub unit: &'a str,
    pub values: &'a [S],
}

impl<S: Scalar> SatelliteTable<S> {
    pub fn new(rows: Vec<(String, String, Vec<S>)>) -> Result<Self> {
        let width = rows
            .first()
            .map(|(_, _, v)| v.len())
            .ok_or_else(|| Error::Invalid("satellite table has no rows".into()))?;
        let mut names = Vec::with_capacity(rows.len());
        let mut units = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (name, unit, row) in rows {
            if row.len() != width {
                return Err(Error::Dimension {
                    axis: format!("satellite row {name:?}"),
                    expected: width,
                    found: row.len(),
                });
            }
            if names.contains(&name) {
                return Err(Error::Invalid(format!(
                    "duplicate satellite row name {name:?}"
                )));
            }
            names.push(name);
            units.push(unit);
            values.push(row);
        }
        Ok(Self {
            names,
            units,
            data: Matrix::from_rows(values)?,
        })
    }

    pub fn width(&self) -> usize {
        self.data.n_cols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> impl Iterator<Item = SatelliteRow<'_, S>> + '_ {
        (0..self.names.len()).map(move |i| SatelliteRow {
            name: &self.names[i],
            unit: &self.units[i],
            values: self.data.row(i),
        })
    }

    pub fn row(&self, name: &str) -> Option<SatelliteRow<'_, S>> {
        self.names.iter().position(|n| n == name).map(|i| SatelliteRow {
            name: &self.names[i],
            unit: &self.units[i],
            values: self.data.row(i),
        })
    }

    /// Replace all rows matched by `pattern` with their element-wise sum.
    ///
    /// A trailing `*` makes the pattern a prefix match, otherwise it must
    /// equal the row name. The summed row takes the position of the first
    /// match. An empty match leaves the table unchanged and returns a warning
    /// instead of failing.
    pub fn aggregate_rows(
        &self,
        pattern: &str,
        new_name: &str,
    ) -> Result<(Self, Option<String>)> {
        let matches: Vec<usize> = (0..self.names.len())
            .filter(|&i| pattern_matches(pattern, &self.names[i]))
            .collect();
        if matches.is_empty() {
            return Ok((
                self.clone(),
                Some(format!("pattern {pattern:?} matched no satellite rows")),
            ));
        }
        let unit = &self.units[matches[0]];
        for &i in &matches[1..] {
            if &self.units[i] != unit {
                return Err(Error::UnitMismatch(format!(
                    "rows matched by {pattern:?} mix units {:?} and {:?}",
                    unit, self.units[i]
                )));
            }
        }
        let mut summed = vec![S::zero(); self.width()];
        for &i in &matches {
            for (acc, v) in summed.iter_mut().zip(self.data.row(i)) {
                *acc += *v;
            }
        }
        let mut rows = Vec::with_capacity(self.names.len() - matches.len() + 1);
        for i in 0..self.names.len() {
            if i == matches[0] {
                rows.push((new_name.to_string(), unit.clone(), summed.clone()));
            } else if !matches.contains(&i) {
                rows.push((
                    self.names[i].clone(),
                    self.units[i].clone(),
                    self.data.row(i).to_vec(),
                ));
            }
        }
        Ok((Self::new(rows)?, None))
    }

    /// Data-quality notes per row: non-finite cells, negative cells, empty rows.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut notes = Vec::new();
        for row in self.rows() {
            let non_finite = row.values.iter().filter(|v| !v.is_finite()).count();
            let negative = row.values.iter().filter(|v| **v < S::zero()).count();
            if non_finite > 0 {
                notes.push(format!("{}: {} non-finite cells", row.name, non_finite));
            }
            if negative > 0 {
                notes.push(format!(
                    "{}: {} negative cells (check the source account)",
                    row.name, negative
                ));
            }
            if row.values.iter().all(|v| v.is_zero()) {
                notes.push(format!("{}: all cells are zero", row.name));
            }
        }
        notes
    }
}

fn pattern_matches(pattern: &str, name: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => name.starts_with(prefix),
        None => name == pattern,
    }
}

// ---------------------------------------------------------------------------
// Source attribution
// ---------------------------------------------------------------------------

/// Stressor amounts by impact region (rows) attributable to final consumption
/// of each (consuming region, product sector) column.
#[derive(Debug, Clone)]
pub struct AttributionTensor<S> {
    index: RegionSectorIndex,
    values: Matrix<S>,
}

impl<S: Scalar> AttributionTensor<S> {
    /// Assemble a tensor from raw parts, enforcing shape and non-negativity.
    pub fn from_parts(index: RegionSectorIndex, values: Matrix<S>) -> Result<Self> {
        if values.n_rows() != index.n_regions() || values.n_cols() != index.len() {
            return Err(Error::Dimension {
                axis: "attribution tensor".into(),
                expected: index.len(),
                found: values.n_cols(),
            });
        }
        if values.values().iter().any(|v| *v < S::zero() || !v.is_finite()) {
            return Err(Error::Invalid(
                "attribution entries must be finite and >= 0".into(),
            ));
        }
        Ok(Self { index, values })
    }

    pub fn index(&self) -> &RegionSectorIndex {
        &self.index
    }

    /// |regions| x N matrix; columns follow the flattened (region, sector) index.
    pub fn values(&self) -> &Matrix<S> {
        &self.values
    }

    pub fn get(&self, impact_region: usize, column: usize) -> S {
        self.values.get(impact_region, column)
    }

    pub fn column_total(&self, column: usize) -> S {
        self.values.col_sum(column)
    }

    pub fn total(&self) -> S {
        self.values.total()
    }
}

/// Attribute a satellite row to its source regions.
///
/// With the per-unit-of-output intensity s[n] = f[n] / x[n], the cell for
/// impact region i and column (j, k) is
/// sum over source sectors sct and producing regions r of
/// s[(i,sct)] * L[(i,sct),(r,k)] * Y[(r,k), j].
pub fn source_attribution<S: Scalar>(
    core: &EconomicCore<S>,
    l: &Matrix<S>,
    stressor: &[S],
) -> Result<AttributionTensor<S>> {
    let index = core.index();
    let n = index.len();
    if stressor.len() != n {
        return Err(Error::Dimension {
            axis: "stressor vector".into(),
            expected: n,
            found: stressor.len(),
        });
    }
    if l.n_rows() != n || l.n_cols() != n {
        return Err(Error::Dimension {
            axis: "total requirements matrix".into(),
            expected: n,
            found: l.n_rows().max(l.n_cols()),
        });
    }
    let x = core.output();
    let mut intensity = vec![S::zero(); n];
    for pos in 0..n {
        if stressor[pos].is_zero() {
            continue;
        }
        if x[pos].is_zero() {
            return Err(Error::DegenerateSector {
                label: index.label(pos),
                reason: "stressor recorded on a sector with zero output".into(),
            });
        }
        intensity[pos] = stressor[pos] / x[pos];
    }

    let n_regions = index.n_regions();
    let n_sectors = index.n_sectors();
    let y = core.final_demand();
    let mut values = Matrix::zeros(n_regions, n);
    for src in 0..n {
        if intensity[src].is_zero() {
            continue;
        }
        let impact_region = index.region_of(src);
        for j in 0..n_regions {
            for k in 0..n_sectors {
                // final demand of product k by region j, over producing regions r
                let mut chain = S::zero();
                for r in 0..n_regions {
                    let mid = index.position_of(r, k);
                    chain += l.get(src, mid) * y.get(mid, j);
                }
                values.add_to(impact_region, index.position_of(j, k), intensity[src] * chain);
            }
        }
    }
    Ok(AttributionTensor {
        index: index.clone(),
        values,
    })
}

// ---------------------------------------------------------------------------
// Monetary intensities
// ---------------------------------------------------------------------------

/// Stressor per unit of final consumption for each (region, sector) column.
#[derive(Debug, Clone)]
pub struct IntensityTable<S> {
    index: RegionSectorIndex,
    values: Vec<S>,
    zero_demand: Vec<bool>,
}

impl<S: Scalar> IntensityTable<S> {
    pub fn index(&self) -> &RegionSectorIndex {
        &self.index
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, column: usize) -> S {
        self.values[column]
    }

    /// True where the column had no final demand and was zeroed.
    pub fn zero_demand_flags(&self) -> &[bool] {
        &self.zero_demand
    }
}

/// Stressor embodied per unit of final consumption, from an attribution.
///
/// Columns with zero final demand hold 0 and are flagged rather than failing.
pub fn intensity_from_attribution<S: Scalar>(
    core: &EconomicCore<S>,
    attribution: &AttributionTensor<S>,
) -> IntensityTable<S> {
    let index = core.index();
    let n = index.len();
    let mut values = vec![S::zero(); n];
    let mut zero_demand = vec![false; n];
    for column in 0..n {
        let j = index.region_of(column);
        let k = index.sector_of(column);
        let demand = core.demand_for(j, k);
        if demand.is_zero() {
            zero_demand[column] = true;
        } else {
            values[column] = attribution.column_total(column) / demand;
        }
    }
    IntensityTable {
        index: index.clone(),
        values,
        zero_demand,
    }
}

/// One-step form of [`intensity_from_attribution`] for a raw satellite row.
pub fn footprint_intensity<S: Scalar>(
    core: &EconomicCore<S>,
    l: &Matrix<S>,
    stressor: &[S],
) -> Result<IntensityTable<S>> {
    let attribution = source_attribution(core, l, stressor)?;
    Ok(intensity_from_attribution(core, &attribution))
}
