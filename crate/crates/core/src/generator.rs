//! Seeded random workload generation.
//!
//! The generator realizes balanced instances: every writer's write count
//! is `max(1, ceil(beta_target * lambda))`, which pins its balancing
//! ratio at or above the target. Identical parameters and seed always
//! produce the identical workload (ChaCha8 generator, fixed draw order).

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ResourceId, Transaction, TxnId, Workload};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parses a ratio written as `a/b`, a decimal like `0.25`, or an
/// integer. Exact; no float round-trip.
pub fn parse_ratio(text: &str) -> Result<Rational64, String> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| format!("bad numerator in {text:?}"))?;
        let den: i64 = den.trim().parse().map_err(|_| format!("bad denominator in {text:?}"))?;
        if den == 0 {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(Rational64::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| format!("bad decimal {text:?}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal {text:?}"));
        }
        let scale = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| format!("too many digits in {text:?}"))?;
        let frac_value: i64 = frac.parse().map_err(|_| format!("bad decimal {text:?}"))?;
        let sign = if text.starts_with('-') { -1 } else { 1 };
        return Ok(Rational64::new(whole * scale + sign * frac_value, scale));
    }
    let whole: i64 = text.parse().map_err(|_| format!("not a ratio: {text:?}"))?;
    Ok(Rational64::from_integer(whole))
}

pub fn format_ratio(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

mod ratio_string {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).map_err(D::Error::custom)
    }
}

/// Shape of a generated workload. Ratios are serialized as strings
/// (`"1/4"`, `"0.25"`) so values stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    /// Number of transactions.
    pub n: usize,
    /// Number of shared resources.
    pub resource_count: u32,
    /// Minimum balancing ratio every writer must reach, in `(0, 1]`.
    #[serde(with = "ratio_string")]
    pub beta_target: Rational64,
    /// Fraction of transactions that are read-only, in `[0, 1)`.
    #[serde(with = "ratio_string")]
    pub read_only_fraction: Rational64,
    pub tau_min: u64,
    pub tau_max: u64,
    /// Access-set size range; `lambda_max` may not exceed the resource count.
    pub lambda_min: u64,
    pub lambda_max: u64,
    pub seed: u64,
}

impl GeneratorParams {
    fn validate(&self) -> Result<(), GenError> {
        let fail = |msg: String| Err(GenError::Invalid(msg));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if self.resource_count == 0 {
            return fail("resource_count must be positive".into());
        }
        if self.beta_target <= Rational64::from_integer(0)
            || self.beta_target > Rational64::from_integer(1)
        {
            return fail(format!(
                "beta_target {} outside (0, 1]",
                format_ratio(self.beta_target)
            ));
        }
        if self.read_only_fraction < Rational64::from_integer(0)
            || self.read_only_fraction >= Rational64::from_integer(1)
        {
            return fail(format!(
                "read_only_fraction {} outside [0, 1)",
                format_ratio(self.read_only_fraction)
            ));
        }
        if self.tau_min == 0 || self.tau_min > self.tau_max {
            return fail(format!(
                "duration range [{}, {}] is invalid",
                self.tau_min, self.tau_max
            ));
        }
        if self.lambda_min == 0 || self.lambda_min > self.lambda_max {
            return fail(format!(
                "access-count range [{}, {}] is invalid",
                self.lambda_min, self.lambda_max
            ));
        }
        if self.lambda_max > self.resource_count as u64 {
            return fail(format!(
                "lambda_max {} exceeds resource_count {}",
                self.lambda_max, self.resource_count
            ));
        }
        Ok(())
    }
}

/// Generates a workload: the first `n - floor(read_only_fraction * n)`
/// transactions write, the rest are read-only. Per transaction the draws
/// are duration, access count, then the access set (without
/// replacement); a writer's first `max(1, ceil(beta_target * lambda))`
/// sampled resources become its write set.
pub fn generate(params: &GeneratorParams) -> Result<Workload, GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let read_only = (params.read_only_fraction * params.n as i64)
        .floor()
        .to_integer() as usize;
    let writers = params.n - read_only;

    let mut transactions = Vec::with_capacity(params.n);
    for i in 0..params.n {
        let duration = rng.gen_range(params.tau_min..=params.tau_max);
        let lambda = rng.gen_range(params.lambda_min..=params.lambda_max) as usize;
        let resources: Vec<ResourceId> =
            rand::seq::index::sample(&mut rng, params.resource_count as usize, lambda)
                .into_iter()
                .map(|r| ResourceId(r as u32))
                .collect();
        let txn = if i < writers {
            let write_count = (params.beta_target * lambda as i64)
                .ceil()
                .to_integer()
                .max(1) as usize;
            let txn = Transaction::new(
                TxnId(i as u32),
                duration,
                resources[write_count..].iter().copied(),
                resources[..write_count].iter().copied(),
            )?;
            assert!(
                txn.balancing_ratio() >= params.beta_target,
                "ceiling rule guarantees the target balancing ratio"
            );
            txn
        } else {
            Transaction::new(TxnId(i as u32), duration, resources, [])?
        };
        transactions.push(txn);
    }
    Ok(Workload::new(params.resource_count, transactions)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base_params() -> GeneratorParams {
        GeneratorParams {
            n: 6,
            resource_count: 8,
            beta_target: Rational64::new(1, 2),
            read_only_fraction: Rational64::new(0, 1),
            tau_min: 1,
            tau_max: 3,
            lambda_min: 1,
            lambda_max: 4,
            seed: 1,
        }
    }

    #[test]
    fn single_forced_writer() {
        let params = GeneratorParams {
            n: 1,
            resource_count: 1,
            beta_target: Rational64::from_integer(1),
            read_only_fraction: Rational64::from_integer(0),
            tau_min: 1,
            tau_max: 1,
            lambda_min: 1,
            lambda_max: 1,
            seed: 0,
        };
        let w = generate(&params).unwrap();
        assert_eq!(w.len(), 1);
        let t = &w.transactions()[0];
        assert!(t.is_writing());
        assert_eq!(t.balancing_ratio(), Rational64::from_integer(1));
    }

    #[test]
    fn ceiling_rule_splits_half_and_half() {
        let params = GeneratorParams {
            lambda_min: 4,
            lambda_max: 4,
            ..base_params()
        };
        let w = generate(&params).unwrap();
        for t in w.transactions() {
            assert_eq!(t.write_count(), 2);
            assert_eq!(t.read_count(), 2);
        }
    }

    #[test]
    fn same_seed_same_workload() {
        let params = base_params();
        assert_eq!(generate(&params).unwrap(), generate(&params).unwrap());
        let other = GeneratorParams { seed: 2, ..base_params() };
        assert_ne!(generate(&params).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn infeasible_params_rejected() {
        let params = GeneratorParams {
            lambda_min: 9,
            lambda_max: 9,
            ..base_params()
        };
        assert!(matches!(generate(&params), Err(GenError::Invalid(_))));
        let params = GeneratorParams {
            beta_target: Rational64::from_integer(0),
            ..base_params()
        };
        assert!(matches!(generate(&params), Err(GenError::Invalid(_))));
        let params = GeneratorParams {
            read_only_fraction: Rational64::from_integer(1),
            ..base_params()
        };
        assert!(matches!(generate(&params), Err(GenError::Invalid(_))));
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("1/4").unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_ratio("0.25").unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_ratio("1").unwrap(), Rational64::from_integer(1));
        assert_eq!(parse_ratio(".5").unwrap(), Rational64::new(1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
        assert_eq!(format_ratio(Rational64::new(2, 4)), "1/2");
        assert_eq!(format_ratio(Rational64::from_integer(1)), "1");
    }

    #[test]
    fn params_json_round_trip() {
        let params = base_params();
        let json = serde_json::to_string(&params).unwrap();
        let back: GeneratorParams = serde_json::from_str(&json).unwrap();
        assert_eq!(params, back);
    }

    proptest! {
        #[test]
        fn generated_workloads_meet_their_targets(
            n in 1usize..12,
            s in 2u32..10,
            beta_num in 1i64..4,
            ro_num in 0i64..3,
            seed in 0u64..200,
        ) {
            let params = GeneratorParams {
                n,
                resource_count: s,
                beta_target: Rational64::new(beta_num, 4),
                read_only_fraction: Rational64::new(ro_num, 4),
                tau_min: 1,
                tau_max: 4,
                lambda_min: 1,
                lambda_max: (s as u64).min(4),
                seed,
            };
            let w = generate(&params).unwrap();
            prop_assert_eq!(w.len(), n);
            prop_assert!(w.global_beta() >= params.beta_target);
            let read_only = w.transactions().iter().filter(|t| t.is_read_only()).count();
            let expected = (params.read_only_fraction * n as i64).floor().to_integer() as usize;
            prop_assert_eq!(read_only, expected);
        }
    }
}
