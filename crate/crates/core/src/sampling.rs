//! Probability fields and reproducible configuration sampling.
//!
//! Every site draws its uniform variate from a ChaCha8 keystream that is
//! addressed by the site's coordinates: the key comes from the run seed,
//! the stream number is the replica index and the word position is derived
//! from `(i, j)`. A site's variate therefore does not depend on the region
//! being sampled or on iteration order, and a configuration sampled on a
//! sub-region agrees with the restriction of one sampled on a larger region.
//!
//! Occupation is decided by exact integer comparison of the 64-bit variate
//! `x` against a cut: a site is occupied iff `x < cut`, where the cut is
//! `floor(p · 2^64)` for a homogeneous field and `ceil((N − y) · 2^64 / 2N)`
//! for the gradient field, so rows `y = −N` and `y = N` come out exactly
//! occupied and vacant.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};
use crate::lattice::{Region, SiteCoord};

const TWO_POW_64: u128 = 1u128 << 64;
const COORD_BIAS: i64 = 1 << 31;

/// Per-site random stream keyed by `(seed, replica, site)`.
#[derive(Clone, Debug)]
pub struct SiteStream {
    key: [u8; 32],
    replica: u64,
}

impl SiteStream {
    pub fn new(seed: u64, replica: u64) -> Self {
        let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
        SiteStream { key, replica }
    }

    #[inline]
    fn word_pos(z: SiteCoord) -> u128 {
        let i = (z.i + COORD_BIAS) as u64;
        let j = (z.j + COORD_BIAS) as u64;
        ((j << 32) | i) as u128 * 2
    }

    fn positioned(&self, z: SiteCoord) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(self.replica);
        rng.set_word_pos(Self::word_pos(z));
        rng
    }

    /// The variate of a single site.
    pub fn variate(&self, z: SiteCoord) -> u64 {
        self.positioned(z).next_u64()
    }

    /// Variates of sites `(i_start, j), (i_start + 1, j), …` into `out`.
    pub fn fill_row(&self, j: i64, i_start: i64, out: &mut [u64]) {
        let mut rng = self.positioned(SiteCoord::new(i_start, j));
        for x in out.iter_mut() {
            *x = rng.next_u64();
        }
    }
}

/// Occupation threshold on the raw 64-bit variate: occupied iff `x < cut`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cut(u128);

impl Cut {
    pub const ALWAYS: Cut = Cut(TWO_POW_64);
    pub const NEVER: Cut = Cut(0);

    pub fn from_probability(p: f64) -> Cut {
        if p.is_nan() || p <= 0.0 {
            Cut::NEVER
        } else if p >= 1.0 {
            Cut::ALWAYS
        } else {
            // p * 2^64 is exact in binary floating point; truncation is floor.
            Cut((p * TWO_POW_64 as f64) as u128)
        }
    }

    #[inline]
    pub fn admits(self, x: u64) -> bool {
        (x as u128) < self.0
    }

    pub fn is_deterministic(self) -> bool {
        self == Cut::ALWAYS || self == Cut::NEVER
    }
}

/// Occupation probability as a function of position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbabilityField {
    Homogeneous {
        p: f64,
    },
    /// `p(y) = 1/2 − y/(2N)`, clamped to `[0, 1]` outside `[−N, N]`.
    Gradient {
        half_width: u32,
    },
}

impl ProbabilityField {
    pub fn homogeneous(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(PercError::InvalidParameter(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        Ok(ProbabilityField::Homogeneous { p })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ProbabilityField::Homogeneous { p } => ProbabilityField::homogeneous(p).map(|_| ()),
            ProbabilityField::Gradient { half_width } => gradient_field(half_width as i64).map(|_| ()),
        }
    }

    pub fn probability(&self, z: SiteCoord) -> f64 {
        match *self {
            ProbabilityField::Homogeneous { p } => p,
            ProbabilityField::Gradient { half_width } => {
                let n = half_width as f64;
                (0.5 - z.j as f64 / (2.0 * n)).clamp(0.0, 1.0)
            }
        }
    }

    /// The cut used for every site of row `j`.
    pub fn row_cut(&self, j: i64) -> Cut {
        match *self {
            ProbabilityField::Homogeneous { p } => Cut::from_probability(p),
            ProbabilityField::Gradient { half_width } => {
                let n = half_width as i64;
                if j <= -n {
                    Cut::ALWAYS
                } else if j >= n {
                    Cut::NEVER
                } else {
                    let num = (n - j) as u128 * TWO_POW_64;
                    let den = 2 * n as u128;
                    Cut(num.div_ceil(den))
                }
            }
        }
    }
}

/// The gradient field `p(y) = 1/2 − y/(2N)`.
pub fn gradient_field(half_width: i64) -> Result<ProbabilityField> {
    if half_width < 1 || half_width > u32::MAX as i64 {
        return Err(PercError::InvalidParameter(format!(
            "gradient half-width must be a positive integer, got {half_width}"
        )));
    }
    Ok(ProbabilityField::Gradient {
        half_width: half_width as u32,
    })
}

/// The strip `[0, ℓ] × [−N, N]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripSpec {
    pub half_width: u32,
    pub ell: u32,
}

impl StripSpec {
    pub fn new(half_width: u32, ell: u32) -> Result<Self> {
        if half_width == 0 || ell == 0 {
            return Err(PercError::InvalidParameter(format!(
                "strip needs N >= 1 and ell >= 1, got N={half_width}, ell={ell}"
            )));
        }
        Ok(StripSpec { half_width, ell })
    }

    pub fn region(&self) -> Region {
        let n = self.half_width as i64;
        Region::new(0, self.ell as i64, -n, n).expect("strip bounds are ordered")
    }

    pub fn field(&self) -> ProbabilityField {
        ProbabilityField::Gradient {
            half_width: self.half_width,
        }
    }

    /// Recovers the strip from a region of the form `[0, ℓ] × [−N, N]`.
    pub fn from_region(region: &Region) -> Result<Self> {
        if region.a1 != 0 || region.b1 != -region.b2 || region.b2 < 1 || region.a2 < 1 {
            return Err(PercError::InvalidInput(format!(
                "{region:?} is not a strip [0, ell] x [-N, N]"
            )));
        }
        StripSpec::new(region.b2 as u32, region.a2 as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub field: ProbabilityField,
    pub seed: u64,
    pub replica: u64,
}

/// Occupancy of every site of a region.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    region: Region,
    occupied: Vec<bool>,
    provenance: Option<Provenance>,
}

impl Configuration {
    pub fn from_fn(region: Region, mut occupied: impl FnMut(SiteCoord) -> bool) -> Self {
        let occupied = region.sites().map(&mut occupied).collect();
        Configuration {
            region,
            occupied,
            provenance: None,
        }
    }

    pub fn from_bits(region: Region, occupied: Vec<bool>) -> Result<Self> {
        if occupied.len() != region.len() {
            return Err(PercError::InvalidInput(format!(
                "{} occupancy bits for a region of {} sites",
                occupied.len(),
                region.len()
            )));
        }
        Ok(Configuration {
            region,
            occupied,
            provenance: None,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn bits(&self) -> &[bool] {
        &self.occupied
    }

    #[inline]
    pub fn is_occupied(&self, z: SiteCoord) -> bool {
        self.occupied[self.region.index(z)]
    }

    #[inline]
    pub fn get(&self, z: SiteCoord) -> Option<bool> {
        self.region.index_checked(z).map(|k| self.occupied[k])
    }

    #[inline]
    pub fn occupied_at(&self, index: usize) -> bool {
        self.occupied[index]
    }

    pub fn set(&mut self, z: SiteCoord, occupied: bool) {
        let k = self.region.index(z);
        self.occupied[k] = occupied;
        self.provenance = None;
    }

    pub fn count_occupied(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    /// The colour-swapped configuration.
    pub fn swapped(&self) -> Configuration {
        Configuration {
            region: self.region,
            occupied: self.occupied.iter().map(|b| !b).collect(),
            provenance: None,
        }
    }

    /// Restriction to a sub-region.
    pub fn restrict(&self, sub: &Region) -> Result<Configuration> {
        if !self.region.contains_region(sub) {
            return Err(PercError::RegionMismatch(format!(
                "{sub:?} is not inside {:?}",
                self.region
            )));
        }
        Ok(Configuration::from_fn(*sub, |z| self.is_occupied(z)))
    }

    /// Re-draws the configuration from its provenance.
    pub fn regenerate(&self) -> Option<Configuration> {
        self.provenance
            .map(|p| sample(&p.field, self.region, p.seed, p.replica))
    }

    /// Region bounds as four little-endian `i64`, then occupancy packed eight
    /// sites per byte in row-major order, least significant bit first.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        for c in [self.region.a1, self.region.a2, self.region.b1, self.region.b2] {
            w.write_all(&c.to_le_bytes())?;
        }
        for chunk in self.occupied.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << k));
            w.write_all(&[byte])?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Configuration> {
        let mut bounds = [0i64; 4];
        for b in bounds.iter_mut() {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            *b = i64::from_le_bytes(buf);
        }
        let region = Region::new(bounds[0], bounds[1], bounds[2], bounds[3])?;
        let mut packed = vec![0u8; region.len().div_ceil(8)];
        r.read_exact(&mut packed)?;
        let occupied = (0..region.len())
            .map(|k| packed[k / 8] >> (k % 8) & 1 == 1)
            .collect();
        Configuration::from_bits(region, occupied)
    }

    /// Writes `path` (binary dump) and `path.json` (provenance sidecar).
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_binary(&mut w)?;
        w.flush()?;
        let sidecar = Sidecar {
            region: self.region,
            provenance: self.provenance,
        };
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Configuration> {
        let mut config = Configuration::read_binary(BufReader::new(File::open(path)?))?;
        let side = sidecar_path(path);
        if side.exists() {
            let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(side)?)?;
            if sidecar.region != config.region {
                return Err(PercError::InvalidInput(
                    "sidecar region disagrees with binary dump".into(),
                ));
            }
            config.provenance = sidecar.provenance;
        }
        Ok(config)
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    region: Region,
    provenance: Option<Provenance>,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Samples `field` on the sites of `region` accepted by `keep`; the other
/// sites are left vacant and never draw a variate.
pub fn sample_masked(
    field: &ProbabilityField,
    region: Region,
    seed: u64,
    replica: u64,
    keep: impl Fn(SiteCoord) -> bool,
) -> Configuration {
    let stream = SiteStream::new(seed, replica);
    let width = region.width();
    let mut occupied = vec![false; region.len()];
    let mut buf = vec![0u64; width];
    for (row, j) in (region.b1..=region.b2).enumerate() {
        let cut = field.row_cut(j);
        let out = &mut occupied[row * width..(row + 1) * width];
        if cut.is_deterministic() {
            let value = cut == Cut::ALWAYS;
            for (k, o) in out.iter_mut().enumerate() {
                *o = value && keep(SiteCoord::new(region.a1 + k as i64, j));
            }
            continue;
        }
        // Draw only the span of kept sites in this row.
        let kept: Vec<usize> = (0..width)
            .filter(|&k| keep(SiteCoord::new(region.a1 + k as i64, j)))
            .collect();
        let (Some(&first), Some(&last)) = (kept.first(), kept.last()) else {
            continue;
        };
        if kept.len() == last - first + 1 {
            let span = &mut buf[first..=last];
            stream.fill_row(j, region.a1 + first as i64, span);
            for (o, &x) in out[first..=last].iter_mut().zip(span.iter()) {
                *o = cut.admits(x);
            }
        } else {
            // Row with a hole: fill the two runs separately.
            let mut start = 0;
            while start < kept.len() {
                let mut end = start;
                while end + 1 < kept.len() && kept[end + 1] == kept[end] + 1 {
                    end += 1;
                }
                let (a, b) = (kept[start], kept[end]);
                let span = &mut buf[a..=b];
                stream.fill_row(j, region.a1 + a as i64, span);
                for (o, &x) in out[a..=b].iter_mut().zip(span.iter()) {
                    *o = cut.admits(x);
                }
                start = end + 1;
            }
        }
    }
    Configuration {
        region,
        occupied,
        provenance: Some(Provenance {
            field: *field,
            seed,
            replica,
        }),
    }
}

/// Each site of `region` independently occupied with probability `field(z)`.
pub fn sample(field: &ProbabilityField, region: Region, seed: u64, replica: u64) -> Configuration {
    sample_masked(field, region, seed, replica, |_| true)
}

/// Monotone coupling: one variate per site, configuration `k` occupies the
/// sites whose variate falls below `p_list[k]`.
pub fn sample_coupled(p_list: &[f64], region: Region, seed: u64, replica: u64) -> Result<Vec<Configuration>> {
    if p_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(PercError::InvalidParameter(
            "coupled probabilities must be sorted ascending".into(),
        ));
    }
    let fields = p_list
        .iter()
        .map(|&p| ProbabilityField::homogeneous(p))
        .collect::<Result<Vec<_>>>()?;
    let cuts: Vec<Cut> = p_list.iter().map(|&p| Cut::from_probability(p)).collect();
    let stream = SiteStream::new(seed, replica);
    let width = region.width();
    let mut bits = vec![vec![false; region.len()]; p_list.len()];
    let mut buf = vec![0u64; width];
    for (row, j) in (region.b1..=region.b2).enumerate() {
        stream.fill_row(j, region.a1, &mut buf);
        for (k, &x) in buf.iter().enumerate() {
            for (b, cut) in bits.iter_mut().zip(&cuts) {
                b[row * width + k] = cut.admits(x);
            }
        }
    }
    Ok(bits
        .into_iter()
        .zip(fields)
        .map(|(occupied, field)| Configuration {
            region,
            occupied,
            provenance: Some(Provenance { field, seed, replica }),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::box_region;

    #[test]
    fn gradient_values() {
        let f = gradient_field(50).unwrap();
        assert_eq!(f.probability(SiteCoord::new(3, 0)), 0.5);
        assert_eq!(f.probability(SiteCoord::new(3, -50)), 1.0);
        assert_eq!(f.probability(SiteCoord::new(3, 50)), 0.0);
        assert_eq!(f.row_cut(-50), Cut::ALWAYS);
        assert_eq!(f.row_cut(50), Cut::NEVER);
        assert_eq!(f.row_cut(0), Cut(1u128 << 63));
        assert!(gradient_field(0).is_err());
        assert!(gradient_field(-3).is_err());
    }

    #[test]
    fn gradient_cut_is_exact_rational() {
        let n = 7i64;
        let f = gradient_field(n).unwrap();
        for y in -n..=n {
            let Cut(c) = f.row_cut(y);
            // x < c  <=>  x * 2N < (N - y) * 2^64 for every integer x.
            let num = (n - y) as u128 * TWO_POW_64;
            let den = 2 * n as u128;
            if c > 0 {
                assert!((c - 1) * den < num);
            }
            assert!(c * den >= num);
        }
    }

    #[test]
    fn gradient_strip_edges_are_deterministic() {
        let spec = StripSpec::new(10, 12).unwrap();
        let c = sample(&spec.field(), spec.region(), 9, 0);
        for i in 0..=12 {
            assert!(c.is_occupied(SiteCoord::new(i, -10)));
            assert!(!c.is_occupied(SiteCoord::new(i, 10)));
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let r = Region::square(9).unwrap();
        let full = sample(&ProbabilityField::homogeneous(1.0).unwrap(), r, 1, 0);
        assert_eq!(full.count_occupied(), r.len());
        let empty = sample(&ProbabilityField::homogeneous(0.0).unwrap(), r, 1, 0);
        assert_eq!(empty.count_occupied(), 0);
        assert!(ProbabilityField::homogeneous(1.5).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let r = Region::new(-4, 20, -3, 11).unwrap();
        let f = ProbabilityField::homogeneous(0.37).unwrap();
        let a = sample(&f, r, 77, 5);
        let b = sample(&f, r, 77, 5);
        assert_eq!(a, b);
        assert_eq!(a.regenerate().unwrap(), a);
        assert_ne!(a, sample(&f, r, 77, 6));
        assert_ne!(a, sample(&f, r, 78, 5));
    }

    #[test]
    fn single_site_variate_matches_row_fill() {
        let s = SiteStream::new(3, 4);
        let mut row = [0u64; 9];
        s.fill_row(-2, -4, &mut row);
        for (k, x) in row.iter().enumerate() {
            assert_eq!(*x, s.variate(SiteCoord::new(-4 + k as i64, -2)));
        }
    }

    #[test]
    fn subregion_sample_is_restriction() {
        let f = ProbabilityField::homogeneous(0.5).unwrap();
        let big = sample(&f, Region::new(-10, 10, -10, 10).unwrap(), 12, 3);
        let sub = Region::new(-3, 6, 0, 9).unwrap();
        assert_eq!(sample(&f, sub, 12, 3).bits(), big.restrict(&sub).unwrap().bits());
    }

    #[test]
    fn masked_sample_matches_full_on_kept_sites() {
        let f = ProbabilityField::homogeneous(0.5).unwrap();
        let region = box_region(SiteCoord::ORIGIN, 6);
        let full = sample(&f, region, 5, 1);
        let annulus = sample_masked(&f, region, 5, 1, |z| z.norm() >= 2);
        for z in region.sites() {
            if z.norm() >= 2 {
                assert_eq!(full.is_occupied(z), annulus.is_occupied(z));
            } else {
                assert!(!annulus.is_occupied(z));
            }
        }
    }

    #[test]
    fn coupled_samples_nest() {
        let r = Region::square(15).unwrap();
        for seed in 0..20 {
            let cs = sample_coupled(&[0.3, 0.7], r, seed, 0).unwrap();
            for z in r.sites() {
                assert!(!cs[0].is_occupied(z) || cs[1].is_occupied(z));
            }
        }
        let single = sample_coupled(&[0.5], r, 4, 2).unwrap();
        assert_eq!(
            single[0],
            sample(&ProbabilityField::homogeneous(0.5).unwrap(), r, 4, 2)
        );
        let ends = sample_coupled(&[0.0, 1.0], r, 4, 2).unwrap();
        assert_eq!(ends[0].count_occupied(), 0);
        assert_eq!(ends[1].count_occupied(), r.len());
        assert!(sample_coupled(&[0.7, 0.3], r, 1, 0).is_err());
    }

    #[test]
    fn mean_occupancy_within_four_stderr() {
        let r = Region::new(0, 31, 0, 31).unwrap();
        let p = 0.3;
        let f = ProbabilityField::homogeneous(p).unwrap();
        let samples = 10_000u64;
        let total: usize = (0..samples)
            .map(|k| sample(&f, r, 2024, k).count_occupied())
            .sum();
        let n = samples as f64 * r.len() as f64;
        let mean = total as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        assert!((mean - p).abs() < 4.0 * se, "mean {mean} vs {p} (se {se})");
    }

    #[test]
    fn replica_streams_uncorrelated() {
        let r = Region::new(0, 127, 0, 127).unwrap();
        let f = ProbabilityField::homogeneous(0.5).unwrap();
        let a = sample(&f, r, 99, 0);
        let b = sample(&f, r, 99, 1);
        let n = r.len() as f64;
        let x: Vec<f64> = a.bits().iter().map(|&v| v as u8 as f64).collect();
        let y: Vec<f64> = b.bits().iter().map(|&v| v as u8 as f64).collect();
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let cov = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
        let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / n).sqrt();
        let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / n).sqrt();
        let corr = cov / (sx * sy);
        // Sample correlation of independent bits has standard error 1/sqrt(n).
        assert!(corr.abs() < 4.0 / n.sqrt(), "corr {corr}");
    }

    #[test]
    fn binary_dump_roundtrip() {
        let r = Region::new(-3, 9, 2, 6).unwrap();
        let f = ProbabilityField::homogeneous(0.5).unwrap();
        let c = sample(&f, r, 8, 1);
        let mut buf = Vec::new();
        c.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + r.len().div_ceil(8));
        assert_eq!(&buf[..8], &(-3i64).to_le_bytes());
        let back = Configuration::read_binary(&buf[..]).unwrap();
        assert_eq!(back.bits(), c.bits());
        assert_eq!(back.region(), c.region());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.bin");
        c.save(&path).unwrap();
        let loaded = Configuration::load(&path).unwrap();
        assert_eq!(loaded, c);
        assert_eq!(loaded.regenerate().unwrap(), c);
    }
}
