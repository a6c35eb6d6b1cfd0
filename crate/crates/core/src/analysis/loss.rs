use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)] // std builds resolve these as inherent methods
use num_traits::Float;

use crate::error::{Error, Result};

/// Loss of an AR-coated α-BBO crystal (the common variant).
pub const CRYSTAL_LOSS_DB: f64 = -0.044;
/// Loss of the crystals with the alternative, worse AR coating.
pub const HIGH_LOSS_CRYSTAL_DB: f64 = -0.269;

/// Power ratio for a gain in dB (`10^(dB/10)`).
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// One kind of optical element in a loss budget.
#[derive(Debug, Clone, PartialEq)]
pub struct LossComponent {
    pub name: String,
    /// Per-element loss, dB (≤ 0).
    pub loss_db: f64,
    pub count: u32,
}

impl LossComponent {
    pub fn new(name: impl Into<String>, loss_db: f64, count: u32) -> Self {
        Self {
            name: name.into(),
            loss_db,
            count,
        }
    }

    pub fn subtotal_db(&self) -> f64 {
        self.count as f64 * self.loss_db
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBudget {
    pub total_db: f64,
    pub efficiency: f64,
}

/// Sums per-component losses in dB and converts the total to a power ratio.
pub fn loss_budget(components: &[LossComponent]) -> Result<LossBudget> {
    let mut total_db = 0.0;
    for c in components {
        if !c.loss_db.is_finite() {
            return Err(Error::NonFinite { what: "loss" });
        }
        if c.loss_db > 0.0 {
            return Err(Error::PositiveLoss {
                name: c.name.clone(),
                loss_db: c.loss_db,
            });
        }
        if c.count == 0 {
            return Err(Error::ZeroCount(c.name.clone()));
        }
        total_db += c.subtotal_db();
    }
    Ok(LossBudget {
        total_db,
        efficiency: db_to_linear(total_db),
    })
}

/// Per-element losses of the reference setup, one of each element, plus
/// `crystals` low-loss α-BBO crystals.
///
/// Element multiplicities of the real setup are not known, so this list does
/// not reproduce its overall efficiency.
pub fn reference_setup_losses(crystals: u32) -> Vec<LossComponent> {
    let mut list: Vec<LossComponent> = [
        ("silver mirror", -0.088),
        ("half-waveplate", -0.223),
        ("quarter-waveplate", -0.223),
        ("nanoparticle thin-film polarizer", -0.044),
        ("telescope", -0.094),
        ("dichroic mirror", -0.044),
        ("Kerr gate (lenses and 10 cm SMF)", -1.192),
        ("polarizing beamsplitter", -0.706),
        ("spectral filters", -1.871),
        ("1 m SMF to detector", -0.706),
        ("avalanche photodiode", -2.218),
    ]
    .iter()
    .map(|&(name, db)| LossComponent::new(name.to_string(), db, 1))
    .collect();
    if crystals > 0 {
        list.push(LossComponent::new(
            "alpha-BBO crystal",
            CRYSTAL_LOSS_DB,
            crystals,
        ));
    }
    list
}
