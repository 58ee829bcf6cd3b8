use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::chain::{mapping_cone, ChainComplex, ChainMap, Ring};
use super::snf::{invariant_factors, rational_rank};
use super::{normalized_chain_complex, SimplicialError, SimplicialSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHomology {
    pub degree: i64,
    pub betti: usize,
    /// Invariant factors greater than one, each dividing the next.
    #[serde(with = "decimal_list")]
    pub torsion: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub ring: Ring,
    pub reduced: bool,
    /// Set for the reduced homology of the empty simplicial set, which is
    /// reported without numbers.
    pub empty_complex: bool,
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyResult {
    pub fn empty_complex(ring: Ring) -> Self {
        HomologyResult { ring, reduced: true, empty_complex: true, degrees: Vec::new() }
    }

    pub fn betti(&self, degree: i64) -> usize {
        self.get(degree).map_or(0, |d| d.betti)
    }

    pub fn torsion(&self, degree: i64) -> &[BigUint] {
        self.get(degree).map_or(&[], |d| d.torsion.as_slice())
    }

    fn get(&self, degree: i64) -> Option<&DegreeHomology> {
        self.degrees.iter().find(|d| d.degree == degree)
    }

    pub fn has_torsion(&self) -> bool {
        self.degrees.iter().any(|d| !d.torsion.is_empty())
    }

    /// All groups vanish. The empty complex is never acyclic.
    pub fn is_zero(&self) -> bool {
        !self.empty_complex && self.degrees.iter().all(|d| d.betti == 0 && d.torsion.is_empty())
    }

    /// Degrees carrying a nonzero group.
    pub fn support(&self) -> Vec<i64> {
        self.degrees.iter().filter(|d| d.betti > 0 || !d.torsion.is_empty()).map(|d| d.degree).collect()
    }

    /// Same groups in every degree; degrees missing on one side count as zero.
    pub fn same_groups(&self, other: &HomologyResult) -> bool {
        if self.empty_complex || other.empty_complex {
            return self.empty_complex == other.empty_complex;
        }
        let mut degrees: Vec<i64> = self.support();
        degrees.extend(other.support());
        degrees.iter().all(|&d| self.betti(d) == other.betti(d) && self.torsion(d) == other.torsion(d))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees.iter().map(|d| if d.degree.rem_euclid(2) == 0 { d.betti as i64 } else { -(d.betti as i64) }).sum()
    }

    /// Result with every degree shifted up by `by`.
    pub fn shifted(&self, by: i64) -> HomologyResult {
        let mut r = self.clone();
        for d in &mut r.degrees {
            d.degree += by;
        }
        r
    }
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty_complex {
            return write!(f, "empty complex");
        }
        let h = if self.reduced { "H~" } else { "H" };
        let mut first = true;
        for d in &self.degrees {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{h}_{} = ", d.degree)?;
            let mut parts = Vec::new();
            if d.betti > 0 {
                parts.push(if d.betti == 1 { self.ring.to_string() } else { format!("{}^{}", self.ring, d.betti) });
            }
            parts.extend(d.torsion.iter().map(|t| format!("Z/{t}")));
            if parts.is_empty() {
                write!(f, "0")?;
            } else {
                write!(f, "{}", parts.join(" + "))?;
            }
        }
        Ok(())
    }
}

/// Homology of a chain complex from the ranks and invariant factors of its
/// differentials. Over the rationals only ranks are computed.
pub fn homology(c: &ChainComplex) -> Result<HomologyResult, SimplicialError> {
    c.check_d_squared()?;
    let degrees: Vec<i64> = c.degrees().collect();
    // factors[k] belongs to the differential out of degrees[k]
    let factors: Vec<(usize, Vec<BigUint>)> = degrees
        .iter()
        .map(|&d| match c.boundary_ref(d) {
            Some(m) if m.nnz() > 0 => match c.ring {
                Ring::Integers => {
                    let f = invariant_factors(m);
                    (f.len(), f)
                }
                Ring::Rationals => (rational_rank(m), Vec::new()),
            },
            _ => (0, Vec::new()),
        })
        .collect();
    let mut out = Vec::with_capacity(degrees.len());
    for (k, &d) in degrees.iter().enumerate() {
        let rank_out = factors[k].0;
        let (rank_in, torsion) = match factors.get(k + 1) {
            Some((r, f)) => (*r, f.iter().filter(|x| !x.is_one()).cloned().collect()),
            None => (0, Vec::new()),
        };
        let betti = c.rank(d) - rank_out - rank_in;
        out.push(DegreeHomology { degree: d, betti, torsion });
    }
    Ok(HomologyResult { ring: c.ring, reduced: c.reduced, empty_complex: false, degrees: out })
}

/// Homology of the algebraic mapping cone of `f`.
pub fn mapping_cone_homology(f: &ChainMap) -> Result<HomologyResult, SimplicialError> {
    homology(&mapping_cone(f)?)
}

impl SimplicialSet {
    /// Homology of the normalized chains; reduced homology of the empty set
    /// is reported as an empty complex.
    pub fn homology(&self, ring: Ring, reduced: bool) -> HomologyResult {
        if reduced && self.is_empty() {
            return HomologyResult::empty_complex(ring);
        }
        homology(&normalized_chain_complex(self, ring, reduced)).expect("normalized chains square to zero")
    }

    pub fn reduced_homology(&self) -> HomologyResult {
        self.homology(Ring::Integers, true)
    }
}

mod decimal_list {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect()
    }
}
