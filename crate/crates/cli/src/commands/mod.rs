pub mod bench;
pub mod estimate;
pub mod gen_mg;
pub mod kaf;

use crate::args::MapKind;
use eips_itl::MapSpec;

pub fn map_spec(kind: MapKind, degree: u32, features: usize, seed: u64) -> MapSpec {
    match kind {
        MapKind::Taylor => MapSpec::Taylor { degree },
        MapKind::Gq => MapSpec::GaussQuadrature { degree, features, seed },
        MapKind::RffPaired => MapSpec::RffPaired { features, seed },
        MapKind::RffShifted => MapSpec::RffShifted { features, seed },
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
