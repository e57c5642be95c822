//! The built-in barrier geometries: positive orthant, unit cube, and
//! Lorentz (forward light) cone, each with its canonical barrier in
//! closed form.

mod cube;
mod lorentz;
mod orthant;

pub use cube::CubeGeometry;
pub use lorentz::{
    lorentz_aux_gradient, lorentz_aux_hessian, lorentz_aux_value, lorentz_mu, lorentz_radial_value,
    lorentz_sigma, make_light_vector, LightVector, LorentzGeometry,
};
pub use orthant::OrthantGeometry;

use crate::error::GeometryError;
use crate::geometry::BarrierGeometry;
use std::fmt;
use std::str::FromStr;

/// Selector for the built-in geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Orthant,
    Cube,
    Lorentz,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 3] =
        [GeometryKind::Orthant, GeometryKind::Cube, GeometryKind::Lorentz];

    /// Builds the geometry at the given coordinate dimension. For the
    /// Lorentz cone the dimension is the ambient one (n + 1 >= 2).
    pub fn build(self, dim: usize) -> Result<Box<dyn BarrierGeometry>, GeometryError> {
        match self {
            GeometryKind::Orthant => Ok(Box::new(OrthantGeometry::new(dim)?)),
            GeometryKind::Cube => Ok(Box::new(CubeGeometry::new(dim)?)),
            GeometryKind::Lorentz => Ok(Box::new(LorentzGeometry::new(dim)?)),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryKind::Orthant => write!(f, "orthant"),
            GeometryKind::Cube => write!(f, "cube"),
            GeometryKind::Lorentz => write!(f, "lorentz"),
        }
    }
}

impl FromStr for GeometryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "orthant" => Ok(GeometryKind::Orthant),
            "cube" => Ok(GeometryKind::Cube),
            "lorentz" => Ok(GeometryKind::Lorentz),
            other => Err(format!(
                "unknown geometry {other:?} (expected orthant, cube or lorentz)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_round_trips_through_strings() {
        for kind in GeometryKind::ALL {
            assert_eq!(kind.to_string().parse::<GeometryKind>().unwrap(), kind);
        }
        assert!("frustum".parse::<GeometryKind>().is_err());
    }

    #[test]
    fn build_validates_dimension() {
        assert!(GeometryKind::Orthant.build(0).is_err());
        assert!(GeometryKind::Lorentz.build(1).is_err());
        assert_eq!(GeometryKind::Lorentz.build(4).unwrap().dim(), 4);
    }
}
