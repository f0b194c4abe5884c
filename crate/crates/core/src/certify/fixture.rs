use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::CertifyError;
use crate::exactmath::{format_rational, int, rational_string, Poly, Rational};

const BUILTIN_K4: &str = include_str!("../../fixtures/k4.toml");
const BUILTIN_K6: &str = include_str!("../../fixtures/k6.toml");
const AMENDED_K4: &str = include_str!("../../fixtures/k4_amended.toml");

/// Names accepted by [`EnvelopeFixture::resolve`] besides file paths.
pub const FIXTURE_NAMES: [&str; 3] = ["k4", "k6", "k4-amended"];

/// Mesh cell count for the fixed-`r` bound on `r_min ..= r_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshBand {
    pub r_min: u32,
    pub r_max: u32,
    pub cells: u32,
}

/// Reference coefficient tables; entry `i` is the coefficient of `x^i` as a
/// polynomial in `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTables {
    pub minus_p1: Vec<Poly>,
    pub q_plus: Vec<Poly>,
    pub q_minus: Vec<Poly>,
}

/// Envelope polynomials and mesh schedule for one even `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeFixture {
    pub k: u32,
    #[serde(with = "rational_string")]
    pub c1: Rational,
    #[serde(with = "rational_string")]
    pub c2: Rational,
    pub r0: u32,
    #[serde(with = "rational_string")]
    pub alpha: Rational,
    #[serde(with = "rational_string")]
    pub margin: Rational,
    /// Lower envelope for `-P^{(1)}`, in `y = r x`.
    pub ptilde: Poly,
    /// Upper envelope for the even part of `P/P(0)`, in `y`.
    pub qtilde_plus: Poly,
    /// Lower envelope for minus the odd part of `P/P(0)`, in `y`.
    pub qtilde_minus: Poly,
    pub large_r_cells: u32,
    pub small_r_mesh: Vec<MeshBand>,
    #[serde(default)]
    pub tables: Option<ReferenceTables>,
}

impl EnvelopeFixture {
    pub fn from_toml(text: &str) -> Result<Self, CertifyError> {
        toml::from_str(text).map_err(|e| CertifyError::FixtureParse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CertifyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CertifyError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("fixture serializes")
    }

    /// The fixtures shipped for `k = 4` and `k = 6`.
    pub fn builtin(k: u32) -> Result<Self, CertifyError> {
        let text = match k {
            4 => BUILTIN_K4,
            6 => BUILTIN_K6,
            _ => return Err(CertifyError::FixtureMissing { k }),
        };
        Self::from_toml(text)
    }

    /// The replacement `k = 4` envelope (larger `r0`, tighter `Q~`); the
    /// published one does not satisfy the large-`r` inequality.
    pub fn amended_k4() -> Self {
        Self::from_toml(AMENDED_K4).expect("embedded fixture parses")
    }

    /// A built-in fixture by name (see [`FIXTURE_NAMES`]) or a TOML file.
    pub fn resolve(name_or_path: &str) -> Result<Self, CertifyError> {
        match name_or_path {
            "k4" => Self::builtin(4),
            "k6" => Self::builtin(6),
            "k4-amended" => Ok(Self::amended_k4()),
            path => Self::load(Path::new(path)),
        }
    }

    /// Cell count for the fixed-`r` mesh, if `r` is scheduled.
    pub fn cells_for(&self, r: u32) -> Option<u32> {
        self.small_r_mesh.iter().find(|b| b.r_min <= r && r <= b.r_max).map(|b| b.cells)
    }

    /// Every violated structural requirement, empty when the fixture is usable.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let k = self.k;
        if k == 0 || k % 2 == 1 {
            out.push(format!("k = {k} must be even and positive"));
        }
        if self.ptilde.degree() != Some(k as usize) {
            out.push(format!("ptilde has degree {:?}, expected {k}", self.ptilde.degree()));
        }
        if !self.ptilde.coeff(0).is_positive() {
            out.push("ptilde(0) must be positive".into());
        }
        let odd_in_plus = self.qtilde_plus.coeffs().iter().skip(1).step_by(2).any(|c| !c.is_zero());
        let even_in_minus = self.qtilde_minus.coeffs().iter().step_by(2).any(|c| !c.is_zero());
        if odd_in_plus {
            out.push("qtilde_plus has an odd-degree term".into());
        }
        if even_in_minus {
            out.push("qtilde_minus has an even-degree term".into());
        }
        if !self.qtilde_plus.has_nonnegative_coeffs() || !self.qtilde_minus.has_nonnegative_coeffs() {
            out.push("qtilde polynomials need nonnegative coefficients".into());
        }
        if !self.c1.is_positive() || self.c1 >= self.c2 {
            out.push(format!(
                "need 0 < c1 < c2, got c1 = {}, c2 = {}",
                format_rational(&self.c1),
                format_rational(&self.c2)
            ));
        }
        if self.r0 <= k {
            out.push(format!("r0 = {} must exceed k = {k}", self.r0));
        }
        if self.r0 > 0 {
            let alpha_max = int(2) - Rational::new((2 * k + 1).into(), self.r0.into());
            if !self.alpha.is_positive() || self.alpha > alpha_max {
                out.push(format!(
                    "alpha = {} must lie in (0, 2 - (2k+1)/r0 = {}]",
                    format_rational(&self.alpha),
                    format_rational(&alpha_max)
                ));
            }
        }
        if !self.margin.is_positive() || self.margin >= Rational::one() {
            out.push("margin must lie in (0, 1)".into());
        }
        if self.large_r_cells == 0 {
            out.push("large_r_cells must be positive".into());
        }
        let missing: Vec<u32> = (k + 1..=self.r0).filter(|&r| self.cells_for(r).is_none()).collect();
        if !missing.is_empty() {
            out.push(format!("small_r_mesh does not schedule r = {missing:?}"));
        }
        if self.small_r_mesh.iter().any(|b| b.cells == 0 || b.r_min > b.r_max) {
            out.push("small_r_mesh has an empty band".into());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn builtins_parse_and_validate() {
        let f4 = EnvelopeFixture::builtin(4).unwrap();
        assert_eq!(f4.c1, rat(1, 10));
        assert_eq!(f4.c2, int(76));
        assert_eq!(f4.r0, 50);
        assert_eq!(f4.alpha, rat(9, 5));
        assert_eq!(f4.margin, rat(1, 100000));
        assert_eq!(f4.ptilde, Poly::from_ints(&[45, -350, 112, -228, 3]));
        assert_eq!(f4.cells_for(5), Some(128));
        assert_eq!(f4.cells_for(50), Some(1024));
        assert!(f4.violations().is_empty(), "{:?}", f4.violations());

        let f6 = EnvelopeFixture::builtin(6).unwrap();
        assert_eq!(f6.c2, int(300));
        assert_eq!(f6.r0, 410);
        assert_eq!(f6.alpha, rat(39, 20));
        assert_eq!(f6.cells_for(410), Some(32768));
        assert_eq!(f6.cells_for(7), Some(2048));
        assert!(f6.violations().is_empty(), "{:?}", f6.violations());
    }

    #[test]
    fn alpha_bound_holds_for_builtins() {
        // 9/5 <= 2 - 9/50 and 39/20 <= 2 - 13/410
        assert!(rat(9, 5) <= int(2) - rat(9, 50));
        assert!(rat(39, 20) <= int(2) - rat(13, 410));
    }

    #[test]
    fn amended_fixture_is_valid() {
        let f = EnvelopeFixture::amended_k4();
        assert!(f.violations().is_empty(), "{:?}", f.violations());
        assert_eq!(f.alpha, int(2) - rat(9, 100));
        assert_eq!(EnvelopeFixture::resolve("k4-amended").unwrap(), f);
        assert!(matches!(EnvelopeFixture::resolve("/nonexistent.toml"), Err(CertifyError::Io { .. })));
    }

    #[test]
    fn missing_fixture() {
        assert!(matches!(EnvelopeFixture::builtin(8), Err(CertifyError::FixtureMissing { k: 8 })));
    }

    #[test]
    fn toml_roundtrip() {
        let f = EnvelopeFixture::builtin(4).unwrap();
        assert_eq!(EnvelopeFixture::from_toml(&f.to_toml()).unwrap(), f);
    }

    #[test]
    fn violations_are_reported() {
        let mut f = EnvelopeFixture::builtin(4).unwrap();
        f.alpha = rat(19, 10);
        f.qtilde_minus = Poly::from_ints(&[1, 7]);
        f.small_r_mesh.pop();
        let v = f.violations();
        assert_eq!(v.len(), 3, "{v:?}");
    }
}
