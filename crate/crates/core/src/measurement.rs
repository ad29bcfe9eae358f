//! Finite-statistics measurement simulation: Pauli-setting sampling, the
//! three-setting witness estimator, two-qubit tomography and bootstrap
//! error bars.
//!
//! Counts are multinomial with a fixed total per setting. Outcome bit `0`
//! is the `+1` eigenvalue of the measured Pauli; outcome strings put qubit
//! 0 (A) first, matching the register convention.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, kron_all, Bipartition, ComplexMatrix};
use crate::metrics::{build_witness_abcd, negativity};
use crate::objects::{DensityMatrix, Gate};
use crate::pauli::{Pauli, PauliString};

pub const DEFAULT_RESAMPLES: usize = 1000;

/// One measured Pauli (X, Y or Z) per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementSetting(Vec<Pauli>);

impl MeasurementSetting {
    pub fn new(bases: Vec<Pauli>) -> Result<Self> {
        if bases.is_empty() || bases.contains(&Pauli::I) {
            return Err(Error::InvalidRecord("a setting measures X, Y or Z on every qubit".into()));
        }
        Ok(Self(bases))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.parse::<PauliString>()?.0)
    }

    pub fn bases(&self) -> &[Pauli] {
        &self.0
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    /// Whether a Pauli string can be read off this setting by marginalizing
    /// the identity positions.
    pub fn measures(&self, s: &PauliString) -> bool {
        s.n_qubits() == self.n_qubits() && s.0.iter().zip(&self.0).all(|(p, b)| *p == Pauli::I || p == b)
    }

    /// Unitary taking each qubit's measured eigenbasis to the computational basis.
    fn rotation(&self) -> ComplexMatrix {
        let s_dag = Gate::phase_s().adjoint();
        let h = Gate::hadamard();
        let mats: Vec<ComplexMatrix> = self
            .0
            .iter()
            .map(|b| match b {
                Pauli::X => h.matrix().clone(),
                Pauli::Y => h.matrix() * s_dag.matrix(),
                _ => ComplexMatrix::identity(2),
            })
            .collect();
        kron_all(&mats)
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

/// The settings XZXZ, YZYZ, ZZZZ needed for the AB|CD witness.
pub fn witness_settings() -> Vec<MeasurementSetting> {
    ["XZXZ", "YZYZ", "ZZZZ"]
        .iter()
        .map(|s| MeasurementSetting::parse(s).expect("fixed setting"))
        .collect()
}

/// All `3^n` settings in X < Y < Z lexicographic order.
pub fn all_settings(n_qubits: usize) -> Vec<MeasurementSetting> {
    PauliString::all(n_qubits)
        .into_iter()
        .filter(|s| !s.0.contains(&Pauli::I))
        .map(|s| MeasurementSetting(s.0))
        .collect()
}

/// Photon counts for one setting, indexed by outcome (qubit 0 most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    setting: MeasurementSetting,
    counts: Vec<u64>,
    total: u64,
}

impl CountRecord {
    pub fn new(setting: MeasurementSetting, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1 << setting.n_qubits() {
            return Err(Error::InvalidRecord(format!(
                "{} outcomes for a {}-qubit setting",
                counts.len(),
                setting.n_qubits()
            )));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidRecord("record holds no counts".into()));
        }
        Ok(Self { setting, counts, total })
    }

    pub fn setting(&self) -> &MeasurementSetting {
        &self.setting
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Nonzero counts keyed by outcome bitstring, e.g. `"0101"`.
    pub fn by_bitstring(&self) -> BTreeMap<String, u64> {
        let n = self.setting.n_qubits();
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (format!("{k:0n$b}"), c))
            .collect()
    }

    pub fn frequencies(&self) -> FrequencyTable {
        FrequencyTable {
            setting: self.setting.clone(),
            freqs: self.counts.iter().map(|&c| c as f64 / self.total as f64).collect(),
        }
    }
}

/// Relative frequencies for one setting; exact probabilities give the
/// infinite-shot limit.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub setting: MeasurementSetting,
    pub freqs: Vec<f64>,
}

/// Born-rule outcome distribution of `rho` measured in `setting`.
pub fn outcome_probabilities(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<f64>> {
    if rho.n_qubits() != setting.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit setting on a {}-qubit state",
            setting.n_qubits(),
            rho.n_qubits()
        )));
    }
    let rotated = rho.matrix().conjugate_by(&setting.rotation())?;
    Ok(rotated.diagonal().iter().map(|z| z.re.max(0.0)).collect())
}

pub fn exact_table(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<FrequencyTable> {
    Ok(FrequencyTable { setting: setting.clone(), freqs: outcome_probabilities(rho, setting)? })
}

/// Multinomial draw of `shots` outcomes by sequential binomials.
pub fn multinomial<R: Rng>(rng: &mut R, probs: &[f64], shots: u64) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum();
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            if p > 0.0 {
                counts[k] = remaining;
            }
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let share = (p / mass).clamp(0.0, 1.0);
        let drawn = Binomial::new(remaining, share).expect("share in [0, 1]").sample(rng);
        counts[k] = drawn;
        remaining -= drawn;
        mass -= p;
    }
    counts
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples `shots` outcomes from `probs`, deterministically in `seed`.
pub fn sample_counts(setting: &MeasurementSetting, probs: &[f64], shots: u64, seed: u64) -> Result<CountRecord> {
    if shots == 0 {
        return Err(Error::InvalidRecord("shots must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CountRecord::new(setting.clone(), multinomial(&mut rng, probs, shots))
}

/// Simulated records for several settings; setting `k` uses stream `k` of `seed`.
pub fn simulate_records(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    shots: u64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    if shots == 0 {
        return Err(Error::InvalidRecord("shots must be positive".into()));
    }
    settings
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let probs = outcome_probabilities(rho, s)?;
            CountRecord::new(s.clone(), multinomial(&mut stream(seed, k as u64), &probs, shots))
        })
        .collect()
}

/// `<P>` from every table that measures `P`, averaged.
pub fn pauli_expectation(tables: &[FrequencyTable], s: &PauliString) -> Result<f64> {
    let n = s.n_qubits();
    let mask: usize = s
        .0
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != Pauli::I)
        .map(|(k, _)| 1 << (n - 1 - k))
        .sum();
    let mut sum = 0.0;
    let mut used = 0usize;
    for t in tables.iter().filter(|t| t.setting.measures(s)) {
        sum += t
            .freqs
            .iter()
            .enumerate()
            .map(|(b, f)| if (b & mask).count_ones().is_multiple_of(2) { *f } else { -*f })
            .sum::<f64>();
        used += 1;
    }
    if used == 0 {
        return Err(Error::MissingSetting(s.to_string()));
    }
    Ok(sum / used as f64)
}

/// `<W>` of the AB|CD witness expanded term by term over `tables`.
pub fn witness_value(tables: &[FrequencyTable]) -> Result<f64> {
    build_witness_abcd()
        .pauli_terms()
        .iter()
        .map(|(c, s)| {
            if s.is_identity() {
                Ok(*c)
            } else {
                pauli_expectation(tables, s).map(|e| c * e)
            }
        })
        .sum()
}

fn require_settings(records: &[CountRecord], needed: &[MeasurementSetting]) -> Result<()> {
    for s in needed {
        if !records.iter().any(|r| r.setting() == s) {
            return Err(Error::MissingSetting(s.to_string()));
        }
    }
    Ok(())
}

fn tables(records: &[CountRecord]) -> Vec<FrequencyTable> {
    records.iter().map(CountRecord::frequencies).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

/// Witness estimate from the three witness settings with a bootstrap sigma.
pub fn witness_estimate(records: &[CountRecord], resamples: usize, seed: u64) -> Result<Estimate> {
    require_settings(records, &witness_settings())?;
    let value = witness_value(&tables(records))?;
    let sigma = bootstrap_sigma(records, Statistic::AbcdWitness, resamples, seed)?;
    Ok(Estimate { value, sigma })
}

/// Linear inversion `1/4 sum <s_i s_j> s_i (x) s_j`, then negative
/// eigenvalues clipped to zero and the trace renormalized.
pub fn tomography_from_tables(tables: &[FrequencyTable]) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(4);
    for s in PauliString::all(2) {
        let e = if s.is_identity() { 1.0 } else { pauli_expectation(tables, &s)? };
        m = &m + &s.matrix().scale_real(e / 4.0);
    }
    let eig = hermitian_eig(&m)?;
    let clipped: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidState("reconstruction has no positive spectrum".into()));
    }
    let diag = ComplexMatrix::from_diagonal(&clipped.iter().map(|v| v / total).collect::<Vec<_>>());
    let rebuilt = diag.conjugate_by(&eig.vectors)?;
    // symmetrize away round-off from the reconstruction
    let rebuilt = (&rebuilt + &rebuilt.adjoint()).scale_real(0.5);
    DensityMatrix::new(rebuilt)
}

/// Two-qubit state from the nine `{X,Y,Z}^2` settings.
pub fn tomography_2q(records: &[CountRecord]) -> Result<DensityMatrix> {
    require_settings(records, &all_settings(2))?;
    tomography_from_tables(&tables(records))
}

/// Named statistics that can be bootstrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// `<W>` of the AB|CD witness.
    AbcdWitness,
    /// Negativity across A|C of the tomographic two-qubit reconstruction.
    TomographicNegativity,
}

impl Statistic {
    pub fn evaluate(self, tables: &[FrequencyTable]) -> Result<f64> {
        match self {
            Statistic::AbcdWitness => witness_value(tables),
            Statistic::TomographicNegativity => {
                let rho = tomography_from_tables(tables)?;
                negativity(&rho, &Bipartition::qubits(2, &[0])?)
            }
        }
    }
}

/// Standard deviation of `statistic` over multinomial resamples of every
/// record. Resample `b` draws from stream `b` of `seed`.
pub fn bootstrap_sigma(records: &[CountRecord], statistic: Statistic, resamples: usize, seed: u64) -> Result<f64> {
    bootstrap_sigma_with(records, |t| statistic.evaluate(t), resamples, seed)
}

pub fn bootstrap_sigma_with<F>(records: &[CountRecord], statistic: F, resamples: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[FrequencyTable]) -> Result<f64> + Sync,
{
    if resamples < 100 {
        return Err(Error::OutOfRange { name: "resamples", value: resamples as f64, range: "at least 100" });
    }
    let base = tables(records);
    let values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let resampled: Vec<FrequencyTable> = records
                .iter()
                .zip(&base)
                .map(|(r, t)| {
                    let counts = multinomial(&mut rng, &t.freqs, r.total());
                    FrequencyTable {
                        setting: t.setting.clone(),
                        freqs: counts.iter().map(|&c| c as f64 / r.total() as f64).collect(),
                    }
                })
                .collect();
            statistic(&resampled)
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    Ok(var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn phi_plus() -> DensityMatrix {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        DensityMatrix::pure(&[a, z, z, a]).unwrap()
    }

    #[test]
    fn bell_state_correlations() {
        let zz = outcome_probabilities(&phi_plus(), &MeasurementSetting::parse("ZZ").unwrap()).unwrap();
        let xx = outcome_probabilities(&phi_plus(), &MeasurementSetting::parse("XX").unwrap()).unwrap();
        let yy = outcome_probabilities(&phi_plus(), &MeasurementSetting::parse("YY").unwrap()).unwrap();
        for (got, want) in [(zz, [0.5, 0.0, 0.0, 0.5]), (xx, [0.5, 0.0, 0.0, 0.5]), (yy, [0.0, 0.5, 0.5, 0.0])] {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn settings_reject_identity() {
        assert!(MeasurementSetting::parse("XI").is_err());
        assert_eq!(all_settings(2).len(), 9);
        assert_eq!(witness_settings()[1].to_string(), "YZYZ");
    }

    #[test]
    fn multinomial_keeps_total_and_zero_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let counts = multinomial(&mut rng, &[0.2, 0.0, 0.5, 0.3, 0.0], 1000);
        assert_eq!(counts.iter().sum::<u64>(), 1000);
        assert_eq!(counts[1], 0);
        assert_eq!(counts[4], 0);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let s = MeasurementSetting::parse("Z").unwrap();
        let a = sample_counts(&s, &[0.5, 0.5], 1_000_000, 7).unwrap();
        let b = sample_counts(&s, &[0.5, 0.5], 1_000_000, 7).unwrap();
        assert_eq!(a, b);
        for c in a.counts() {
            assert!((*c as f64 - 500_000.0).abs() < 5.0 * 500.0);
        }
        assert!(sample_counts(&s, &[0.5, 0.5], 0, 7).is_err());
    }

    #[test]
    fn record_validation() {
        let s = MeasurementSetting::parse("ZZ").unwrap();
        assert!(CountRecord::new(s.clone(), vec![1, 2, 3]).is_err());
        assert!(CountRecord::new(s.clone(), vec![0; 4]).is_err());
        let r = CountRecord::new(s, vec![3, 0, 0, 1]).unwrap();
        assert_eq!(r.total(), 4);
        let m = r.by_bitstring();
        assert_eq!(m.get("00"), Some(&3));
        assert_eq!(m.get("11"), Some(&1));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn missing_settings_are_reported() {
        let rho = DensityMatrix::maximally_mixed(4);
        let recs = simulate_records(&rho, &witness_settings()[..2], 100, 1).unwrap();
        assert!(matches!(witness_estimate(&recs, 100, 1), Err(Error::MissingSetting(s)) if s == "ZZZZ"));
        let rho2 = DensityMatrix::maximally_mixed(2);
        let recs2 = simulate_records(&rho2, &all_settings(2)[..8], 100, 1).unwrap();
        assert!(matches!(tomography_2q(&recs2), Err(Error::MissingSetting(_))));
    }

    #[test]
    fn deterministic_record_has_zero_sigma() {
        let rec = CountRecord::new(MeasurementSetting::parse("ZZ").unwrap(), vec![0, 0, 50, 0]).unwrap();
        let s = bootstrap_sigma_with(
            std::slice::from_ref(&rec),
            |t| pauli_expectation(t, &"ZZ".parse().unwrap()),
            200,
            3,
        )
        .unwrap();
        assert_eq!(s, 0.0);
        assert!(bootstrap_sigma(&[rec], Statistic::AbcdWitness, 50, 0).is_err());
    }
}
