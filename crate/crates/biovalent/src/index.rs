//! Region × sector index shared by all economic tables.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Ordered (region, sector) index, flattened row-major with the region as the
/// outer axis: position = region_index * n_sectors + sector_index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSectorIndex {
    regions: Vec<String>,
    sectors: Vec<String>,
    region_pos: BTreeMap<String, usize>,
    sector_pos: BTreeMap<String, usize>,
}

impl RegionSectorIndex {
    pub fn new(
        regions: impl IntoIterator<Item = impl Into<String>>,
        sectors: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let regions: Vec<String> = regions.into_iter().map(Into::into).collect();
        let sectors: Vec<String> = sectors.into_iter().map(Into::into).collect();
        if regions.is_empty() || sectors.is_empty() {
            return Err(Error::Invalid(
                "region/sector index must be non-empty".into(),
            ));
        }
        let mut region_pos = BTreeMap::new();
        for (i, code) in regions.iter().enumerate() {
            if region_pos.insert(code.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate region code {code:?}")));
            }
        }
        let mut sector_pos = BTreeMap::new();
        for (i, code) in sectors.iter().enumerate() {
            if sector_pos.insert(code.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate sector code {code:?}")));
            }
        }
        Ok(Self {
            regions,
            sectors,
            region_pos,
            sector_pos,
        })
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn n_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    /// Flattened length: |regions| * |sectors|.
    pub fn len(&self) -> usize {
        self.regions.len() * self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty axes
    }

    pub fn region_index(&self, code: &str) -> Result<usize> {
        self.region_pos
            .get(code)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("unknown region code {code:?}")))
    }

    pub fn sector_index(&self, code: &str) -> Result<usize> {
        self.sector_pos
            .get(code)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("unknown sector code {code:?}")))
    }

    /// Flattened position of a (region, sector) pair given by code.
    pub fn position(&self, region: &str, sector: &str) -> Result<usize> {
        Ok(self.region_index(region)? * self.sectors.len() + self.sector_index(sector)?)
    }

    #[inline]
    pub fn position_of(&self, region_idx: usize, sector_idx: usize) -> usize {
        region_idx * self.sectors.len() + sector_idx
    }

    #[inline]
    pub fn region_of(&self, position: usize) -> usize {
        position / self.sectors.len()
    }

    #[inline]
    pub fn sector_of(&self, position: usize) -> usize {
        position % self.sectors.len()
    }

    /// Human-readable label, also the CSV header form.
    pub fn label(&self, position: usize) -> String {
        format!(
            "{}:{}",
            self.regions[self.region_of(position)],
            self.sectors[self.sector_of(position)]
        )
    }

    /// Parse a `region:sector` label into its flattened position.
    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let (region, sector) = label
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("label {label:?} is not region:sector")))?;
        self.position(region, sector)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, &str)> + '_ {
        (0..self.len()).map(move |p| {
            (
                p,
                self.regions[self.region_of(p)].as_str(),
                self.sectors[self.sector_of(p)].as_str(),
            )
        })
    }
}

impl fmt::Display for RegionSectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} regions x {} sectors",
            self.regions.len(),
            self.sectors.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index() -> RegionSectorIndex {
        RegionSectorIndex::new(["FI", "BR"], ["AGR", "IND", "SVC"]).unwrap()
    }

    #[test]
    fn row_major_with_region_outer() {
        let idx = index();
        assert_eq!(idx.len(), 6);
        assert_eq!(idx.position("FI", "AGR").unwrap(), 0);
        assert_eq!(idx.position("FI", "SVC").unwrap(), 2);
        assert_eq!(idx.position("BR", "AGR").unwrap(), 3);
        assert_eq!(idx.label(4), "BR:IND");
        assert_eq!(idx.region_of(5), 1);
        assert_eq!(idx.sector_of(5), 2);
    }

    #[test]
    fn lookups_are_total_over_known_codes() {
        let idx = index();
        for region in idx.regions().to_vec() {
            for sector in idx.sectors().to_vec() {
                let p = idx.position(&region, &sector).unwrap();
                assert_eq!(idx.parse_label(&idx.label(p)).unwrap(), p);
            }
        }
        assert!(idx.position("XX", "AGR").is_err());
        assert!(idx.position("FI", "XXX").is_err());
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(RegionSectorIndex::new(["FI", "FI"], ["AGR"]).is_err());
        assert!(RegionSectorIndex::new(["FI"], ["AGR", "AGR"]).is_err());
        assert!(RegionSectorIndex::new(Vec::<String>::new(), vec!["AGR".to_string()]).is_err());
    }
}
