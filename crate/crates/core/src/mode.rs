//! Fermionic mode labels and their linear ordering.
//!
//! A system with internal dimension `d` has `4d` modes: two species, `d`
//! internal states each, two sites. Modes are numbered
//!
//! ```text
//! index = species_offset + 2 * (internal - 1) + site
//! ```
//!
//! with `species_offset = 0` for A and `2d` for B, and `site = 0` for L,
//! `1` for R. Species A comes first, then the internal index, and the site
//! varies fastest. The same order fixes the Jordan-Wigner string used for
//! fermionic signs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported internal dimension: `4d` modes must fit in a `u64`.
pub const MAX_D: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Species {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Site {
    L,
    R,
}

impl Site {
    pub const BOTH: [Site; 2] = [Site::L, Site::R];

    pub fn other(self) -> Site {
        match self {
            Site::L => Site::R,
            Site::R => Site::L,
        }
    }
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::A, Species::B];
}

/// Structured label of a single fermionic mode. `internal` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeId {
    pub species: Species,
    pub internal: usize,
    pub site: Site,
}

impl ModeId {
    pub fn new(species: Species, internal: usize, site: Site) -> Self {
        Self {
            species,
            internal,
            site,
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.species {
            Species::A => 'a',
            Species::B => 'b',
        };
        write!(f, "{}{}{:?}", s, self.internal, self.site)
    }
}

/// Linear index of a mode under the fixed total ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode(pub u8);

impl Mode {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn bit(self) -> u64 {
        1u64 << self.0
    }
}

/// Linear index of `(species, internal, site)` for internal dimension `d`.
pub fn mode_index(species: Species, internal: usize, site: Site, d: usize) -> Result<usize> {
    if d == 0 || d > MAX_D {
        return Err(Error::Domain(format!("d must lie in 1..={MAX_D}, got {d}")));
    }
    if internal == 0 || internal > d {
        return Err(Error::Domain(format!(
            "internal index {internal} outside 1..={d}"
        )));
    }
    let offset = match species {
        Species::A => 0,
        Species::B => 2 * d,
    };
    let s = match site {
        Site::L => 0,
        Site::R => 1,
    };
    Ok(offset + 2 * (internal - 1) + s)
}

/// Inverse of [`mode_index`].
pub fn mode_from_index(index: usize, d: usize) -> Result<ModeId> {
    if d == 0 || d > MAX_D || index >= 4 * d {
        return Err(Error::Domain(format!(
            "mode index {index} outside 0..{} for d={d}",
            4 * d
        )));
    }
    let (species, local) = if index < 2 * d {
        (Species::A, index)
    } else {
        (Species::B, index - 2 * d)
    };
    let site = if local % 2 == 0 { Site::L } else { Site::R };
    Ok(ModeId::new(species, local / 2 + 1, site))
}

/// The set of `4d` modes for a fixed internal dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeSpace {
    d: usize,
}

impl ModeSpace {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::Domain(format!("d must lie in 1..={MAX_D}, got {d}")));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_modes(&self) -> usize {
        4 * self.d
    }

    pub fn mode(&self, species: Species, internal: usize, site: Site) -> Result<Mode> {
        mode_index(species, internal, site, self.d).map(|i| Mode(i as u8))
    }

    /// Shorthand for a species-A mode; panics on an out-of-range index.
    pub fn a(&self, internal: usize, site: Site) -> Mode {
        self.mode(Species::A, internal, site)
            .expect("internal index out of range")
    }

    /// Shorthand for a species-B mode; panics on an out-of-range index.
    pub fn b(&self, internal: usize, site: Site) -> Mode {
        self.mode(Species::B, internal, site)
            .expect("internal index out of range")
    }

    pub fn id(&self, mode: Mode) -> ModeId {
        mode_from_index(mode.index(), self.d).expect("mode belongs to this space")
    }

    /// Bit mask selecting every mode of one species.
    pub fn species_mask(&self, species: Species) -> u64 {
        let block = (1u64 << (2 * self.d)) - 1;
        match species {
            Species::A => block,
            Species::B => block << (2 * self.d),
        }
    }

    /// Modes of one species in increasing order; `2d` of them.
    pub fn species_modes(&self, species: Species) -> Vec<Mode> {
        let offset = match species {
            Species::A => 0,
            Species::B => 2 * self.d,
        };
        (offset..offset + 2 * self.d)
            .map(|i| Mode(i as u8))
            .collect()
    }

    pub fn all_modes(&self) -> impl Iterator<Item = Mode> {
        (0..4 * self.d).map(|i| Mode(i as u8))
    }
}
