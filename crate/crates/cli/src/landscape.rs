//! Bundled table of published discrete-time photonic walks.

use serde::Deserialize;

/// Raw CSV: `year,reference,steps,loss_db_per_step,fidelity,distance,photons,platform`.
pub const LANDSCAPE_CSV: &str = include_str!("../data/landscape.csv");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LandscapeEntry {
    pub year: u16,
    pub reference: String,
    pub steps: u32,
    pub loss_db_per_step: Option<f64>,
    pub fidelity: Option<f64>,
    /// Reported instead of a fidelity by some experiments.
    pub distance: Option<f64>,
    pub photons: u8,
    pub platform: String,
}

pub fn landscape() -> Vec<LandscapeEntry> {
    csv::Reader::from_reader(LANDSCAPE_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled landscape table is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_parses() {
        let rows = landscape();
        assert_eq!(rows.len(), 31);
        assert!(rows.windows(2).all(|w| w[0].year <= w[1].year));
        assert!(rows.iter().all(|r| r.photons == 1 || r.photons == 2));
        assert!(rows
            .iter()
            .all(|r| r.loss_db_per_step.is_none_or(|l| l <= 0.0)));
        assert!(rows
            .iter()
            .all(|r| !(r.fidelity.is_some() && r.distance.is_some())));
        let last = rows.last().unwrap();
        assert_eq!(
            (last.steps, last.loss_db_per_step, last.fidelity),
            (18, Some(-0.044), Some(0.98))
        );
        assert_eq!(rows.iter().filter(|r| r.distance.is_some()).count(), 2);
        assert_eq!(rows.iter().map(|r| r.steps).max(), Some(400));
    }
}
