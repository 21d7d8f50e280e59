use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TerrainClass {
    PavedAreas,
    UrbanAreas,
    OpenFields,
    LightVegetation,
    DenseScrub,
    Forest,
}

impl TerrainClass {
    pub const ALL: [TerrainClass; 6] = [
        TerrainClass::PavedAreas,
        TerrainClass::UrbanAreas,
        TerrainClass::OpenFields,
        TerrainClass::LightVegetation,
        TerrainClass::DenseScrub,
        TerrainClass::Forest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TerrainClass::PavedAreas => "PavedAreas",
            TerrainClass::UrbanAreas => "UrbanAreas",
            TerrainClass::OpenFields => "OpenFields",
            TerrainClass::LightVegetation => "LightVegetation",
            TerrainClass::DenseScrub => "DenseScrub",
            TerrainClass::Forest => "Forest",
        }
    }

    /// Flat-ground speed of the default matrix, m/s.
    pub fn base_speed(self) -> f64 {
        match self {
            TerrainClass::PavedAreas => 8.0,
            TerrainClass::UrbanAreas => 5.0,
            TerrainClass::OpenFields => 5.0,
            TerrainClass::LightVegetation => 3.0,
            TerrainClass::DenseScrub => 1.5,
            TerrainClass::Forest => 1.0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TerrainClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TerrainClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TerrainClass::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown terrain class {s:?}")))
    }
}

/// Upper edges of the slope bands in degrees: `[0,5) [5,10) [10,20) [20,30) [30,90]`.
pub const SLOPE_BAND_EDGES_DEG: [f64; 4] = [5.0, 10.0, 20.0, 30.0];
pub const SLOPE_BANDS: usize = SLOPE_BAND_EDGES_DEG.len() + 1;

/// Band of a directed slope angle. Descents count as flat ground.
pub fn slope_band(slope_deg: f64) -> usize {
    let uphill = slope_deg.max(0.0);
    SLOPE_BAND_EDGES_DEG.iter().take_while(|&&edge| uphill >= edge).count()
}

/// Maximum safe speed per terrain class and slope band, m/s. Zero means
/// impassable.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityMatrix {
    speeds: [[f64; SLOPE_BANDS]; 6],
}

impl Default for VelocityMatrix {
    fn default() -> Self {
        let mut speeds = [[0.0; SLOPE_BANDS]; 6];
        for class in TerrainClass::ALL {
            let row = &mut speeds[class.index()];
            let mut v = class.base_speed();
            for slot in row.iter_mut().take(SLOPE_BANDS - 1) {
                *slot = v;
                v *= 0.75;
            }
            // steeper than 30 degrees stays 0.0
        }
        VelocityMatrix { speeds }
    }
}

impl VelocityMatrix {
    pub fn new(rows: BTreeMap<TerrainClass, Vec<f64>>) -> Result<Self> {
        let mut speeds = [[0.0; SLOPE_BANDS]; 6];
        for class in TerrainClass::ALL {
            let row = rows
                .get(&class)
                .ok_or_else(|| Error::InvalidConfig(format!("velocity matrix is missing terrain {class}")))?;
            if row.len() != SLOPE_BANDS {
                return Err(Error::InvalidConfig(format!(
                    "velocity matrix row {class} has {} entries, expected {SLOPE_BANDS}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "velocity matrix row {class} has a negative or non-finite speed"
                )));
            }
            if row.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::InvalidConfig(format!("velocity matrix row {class} increases with slope")));
            }
            speeds[class.index()].copy_from_slice(row);
        }
        Ok(VelocityMatrix { speeds })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows: BTreeMap<TerrainClass, Vec<f64>> = serde_json::from_str(text)?;
        Self::new(rows)
    }

    pub fn to_json(&self) -> String {
        let rows: BTreeMap<TerrainClass, Vec<f64>> =
            TerrainClass::ALL.into_iter().map(|c| (c, self.speeds[c.index()].to_vec())).collect();
        serde_json::to_string_pretty(&rows).expect("matrix serializes")
    }

    pub fn speed(&self, class: TerrainClass, slope_deg: f64) -> f64 {
        self.speeds[class.index()][slope_band(slope_deg)]
    }

    pub fn row(&self, class: TerrainClass) -> &[f64; SLOPE_BANDS] {
        &self.speeds[class.index()]
    }
}
