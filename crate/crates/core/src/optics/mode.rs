use std::fmt;

/// Spatial port label. 'a' and 'b' are the beam splitter inputs, 'c' and 'd'
/// its outputs (the detected ports).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    A,
    B,
    C,
    D,
}

/// Linear polarization of a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

/// Internal wavepacket identity, used to model partial distinguishability:
/// a reference wavepacket and the component orthogonal to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Internal {
    W0,
    WPerp,
}

/// Unique key of an optical mode. The derived ordering is total and fixed:
/// spatial, then polarization, then internal label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub spatial: Spatial,
    pub pol: Pol,
    pub internal: Internal,
}

impl ModeLabel {
    pub fn new(spatial: Spatial, pol: Pol, internal: Internal) -> Self {
        ModeLabel {
            spatial,
            pol,
            internal,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spatial {
            Spatial::A => 'a',
            Spatial::B => 'b',
            Spatial::C => 'c',
            Spatial::D => 'd',
        };
        let p = match self.pol {
            Pol::H => 'H',
            Pol::V => 'V',
        };
        let w = match self.internal {
            Internal::W0 => "w0",
            Internal::WPerp => "w+",
        };
        write!(f, "{s}_{p}({w})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_spatial_then_pol_then_internal() {
        let m1 = ModeLabel::new(Spatial::A, Pol::V, Internal::WPerp);
        let m2 = ModeLabel::new(Spatial::B, Pol::H, Internal::W0);
        let m3 = ModeLabel::new(Spatial::B, Pol::H, Internal::WPerp);
        let m4 = ModeLabel::new(Spatial::B, Pol::V, Internal::W0);
        assert!(m1 < m2 && m2 < m3 && m3 < m4);
    }
}
