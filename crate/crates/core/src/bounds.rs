//! Assembly of exact values and certificates into headline bounds via the
//! counting arguments, in exact rational arithmetic.
//!
//! Floats appear only inside SDP solves; once a bound is certified, every
//! further step (deletion counting, the asymptotic-ratio transfer, the
//! quadratic bipartite bounds) runs over BigRational so the final constants
//! carry no accumulated rounding.

use crate::{binomial, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The asymptotic-ratio transfer: a certified lower bound B on nu2(K_m)
/// gives lim nu2(K_n)/Z(n) >= 64 B / (m(m-1)(m-2)(m-3)), exactly.
///
/// Every crossing of K_n survives in C(n-4, m-4) of the C(n, m) induced
/// copies of K_m, which pushes the density of crossings upward; dividing by
/// the leading term of Z(n) leaves this constant.
pub fn claim_a_ratio(m: u64, nu2_lower: u64) -> Result<BigRational> {
    if m <= 3 {
        return Err(Error::InvalidParameter(format!(
            "the ratio transfer needs m > 3, got {m}"
        )));
    }
    let num = BigInt::from(64u64) * BigInt::from(nu2_lower);
    let den = BigInt::from(m) * BigInt::from(m - 1) * BigInt::from(m - 2) * BigInt::from(m - 3);
    Ok(BigRational::new(num, den))
}

/// A quadratic lower bound a n^2 + b n with exact rational coefficients.
/// Serialized as fraction strings to keep them exact in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBound {
    #[serde(
        serialize_with = "rational_to_string",
        deserialize_with = "rational_from_string"
    )]
    pub a: BigRational,
    #[serde(
        serialize_with = "rational_to_string",
        deserialize_with = "rational_from_string"
    )]
    pub b: BigRational,
}

fn rational_to_string<S: Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn rational_from_string<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<BigRational, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl QuadraticBound {
    pub fn zero() -> QuadraticBound {
        QuadraticBound {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }

    pub fn eval(&self, n: u64) -> BigRational {
        let n = BigRational::from_integer(BigInt::from(n));
        &self.a * &n * &n + &self.b * &n
    }

    pub fn eval_f64(&self, n: u64) -> f64 {
        self.eval(n).to_f64().unwrap_or(f64::NAN)
    }

    pub fn display(&self) -> String {
        format!("({})n^2 + ({})n", self.a, self.b)
    }

    /// Decimal rendering for human-readable output; [`display`] stays exact.
    pub fn display_approx(&self) -> String {
        format!(
            "({:.6})n^2 + ({:.6})n",
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// eq-genbound instantiated at a certified t for fixed m:
/// nu2(K_{m,n}) >= (t/2) n^2 - (m(m-1)/4) n. The f64 t converts exactly
/// (binary64 values are dyadic rationals).
pub fn assemble_genbound(m: u32, certified_t: f64) -> Result<QuadraticBound> {
    let t = BigRational::from_f64(certified_t)
        .ok_or_else(|| Error::BadCertificate(format!("non-finite certified t {certified_t}")))?;
    let a = t / BigRational::from_integer(BigInt::from(2));
    let b = -BigRational::new(BigInt::from(m as u64 * (m as u64 - 1)), BigInt::from(4));
    Ok(QuadraticBound { a, b })
}

/// Convenience: the K_{7,n} polynomial from a certified t for m = 7; at
/// t = 9/2 this is (9/4) n^2 - (21/2) n.
pub fn assemble_k7n_bound(certified_t: f64) -> Result<QuadraticBound> {
    assemble_genbound(7, certified_t)
}

/// The even-step counting argument for bipartite bounds:
/// nu2(K_{8,n}) >= (8/6) nu2(K_{7,n}), applied to a polynomial bound.
pub fn k7_to_k8_bipartite(bound7: &QuadraticBound) -> QuadraticBound {
    let f = BigRational::new(BigInt::from(8), BigInt::from(6));
    QuadraticBound {
        a: &bound7.a * &f,
        b: &bound7.b * &f,
    }
}

/// Parses a decimal literal like "1.76537474e10" into an exact rational.
pub fn parse_decimal_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad exponent in {s:?}")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let value: BigInt = digits
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad decimal {s:?}")))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut out = BigRational::from_integer(value);
    match shift.cmp(&0) {
        std::cmp::Ordering::Greater => out *= BigRational::from_integer(ten.pow(shift as u32)),
        std::cmp::Ordering::Less => {
            out /= BigRational::from_integer(ten.pow((-shift) as u32));
        }
        std::cmp::Ordering::Equal => {}
    }
    Ok(out)
}

/// Exact implied bound nu2(K_n) >= ceil(C(n,4) - gw) from a decimal GW upper
/// bound, in integer arithmetic.
pub fn gw_implied_bound_exact(n: u64, gw_upper_bound: &str) -> Result<BigInt> {
    let gw = parse_decimal_rational(gw_upper_bound)?;
    let e_n = BigRational::from_integer(BigInt::from(binomial(n, 4)));
    let diff = e_n - gw;
    Ok(diff.ceil().to_integer())
}

/// One provenance step of a bound report. Replay recomputes the value from
/// these alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ProvenanceStep {
    /// Exact maxcut(G_n) from branch and bound.
    MaxcutExact { n: u32, maxcut: u64 },
    /// A verified GW certificate: upper bound on GW(G_n), given exactly as
    /// the decimal printed by the verifier.
    GwUpperBound {
        n: u32,
        bound: String,
        certificate: Option<String>,
    },
    /// A verified reduced/dense Zarankiewicz certificate for SDP_bound(m).
    ZarCertifiedT {
        m: u32,
        t: f64,
        certificate: Option<String>,
    },
    /// Deletion counting from odd n to n+1.
    OddToEven { n_odd: u32 },
    /// The asymptotic-ratio transfer of Claim A.
    ClaimA { m: u64 },
    /// eq-genbound: polynomial bound from a certified t.
    GenBound { m: u32 },
    /// nu2(K_{8,n}) >= (8/6) nu2(K_{7,n}).
    K7ToK8,
}

/// A reported bound with the chain that produced it. `value` is an exact
/// rational rendered as a string; [`replay`] recomputes it bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub target: String,
    pub value: String,
    pub provenance: Vec<ProvenanceStep>,
    /// False when a certificate-backed step has no backing file.
    pub verified: bool,
}

/// Recomputes a report's value from its provenance chain. Supported chains:
///
/// - [MaxcutExact]                    -> nu2(K_n) = C(n,4) - maxcut
/// - [MaxcutExact, OddToEven]         -> nu2(K_{n+1}) lower bound
/// - [GwUpperBound]                   -> ceil(C(n,4) - bound)
/// - [MaxcutExact | GwUpperBound, ClaimA] -> ratio as exact rational
/// - [ZarCertifiedT, GenBound]        -> polynomial, rendered
/// - [ZarCertifiedT, GenBound, K7ToK8] -> polynomial, rendered
pub fn replay(report: &BoundReport) -> Result<String> {
    use ProvenanceStep::*;
    let steps = report.provenance.as_slice();
    let value: String = match steps {
        [MaxcutExact { n, maxcut }] => {
            (binomial(*n as u64, 4) as i128 - *maxcut as i128).to_string()
        }
        [MaxcutExact { n, maxcut }, OddToEven { n_odd }] => {
            if n != n_odd {
                return Err(Error::InvalidParameter("odd-to-even step n mismatch".into()));
            }
            let nu = binomial(*n as u64, 4) as u64 - maxcut;
            crate::maxcut::odd_to_even_step(nu, *n)?.to_string()
        }
        [GwUpperBound { n, bound, .. }] => gw_implied_bound_exact(*n as u64, bound)?.to_string(),
        [MaxcutExact { n, maxcut }, ClaimA { m }] => {
            if *m != *n as u64 {
                return Err(Error::InvalidParameter("claim-A m mismatch".into()));
            }
            let nu = binomial(*n as u64, 4) as u64 - maxcut;
            claim_a_ratio(*m, nu)?.to_string()
        }
        [GwUpperBound { n, bound, .. }, ClaimA { m }] => {
            if *m != *n as u64 {
                return Err(Error::InvalidParameter("claim-A m mismatch".into()));
            }
            let nu = gw_implied_bound_exact(*n as u64, bound)?;
            let nu = nu
                .to_u64()
                .ok_or_else(|| Error::InvalidParameter("implied bound out of range".into()))?;
            claim_a_ratio(*m, nu)?.to_string()
        }
        [ZarCertifiedT { m, t, .. }, GenBound { m: m2 }] => {
            if m != m2 {
                return Err(Error::InvalidParameter("genbound m mismatch".into()));
            }
            assemble_genbound(*m, *t)?.display()
        }
        [ZarCertifiedT { m: 7, t, .. }, GenBound { m: 7 }, K7ToK8] => {
            k7_to_k8_bipartite(&assemble_genbound(7, *t)?).display()
        }
        _ => {
            return Err(Error::InvalidParameter(
                "unsupported provenance chain".into(),
            ))
        }
    };
    Ok(value)
}

/// Builds a report and fills `value` by replaying the chain.
pub fn make_report(
    target: impl Into<String>,
    provenance: Vec<ProvenanceStep>,
    verified: bool,
) -> Result<BoundReport> {
    let mut report = BoundReport {
        target: target.into(),
        value: String::new(),
        provenance,
        verified,
    };
    report.value = replay(&report)?;
    Ok(report)
}

/// One row of the summary table for K_n: n, maxcut(G_n), C(n,4), nu2, Z(n).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u32,
    pub maxcut: u64,
    pub e_n: u64,
    pub nu2: u64,
    pub z: u64,
    pub exact: bool,
    pub nodes: u64,
    pub seconds: f64,
}

impl TableRow {
    pub fn matches_conjecture(&self) -> bool {
        self.exact && self.nu2 == self.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{zeta_bipartite, zeta_complete};
    use num_traits::One;

    #[test]
    fn claim_a_paper_constant() {
        let r = claim_a_ratio(899, 9_381_181_976).unwrap();
        let f = r.to_f64().unwrap();
        assert!((0.9253..=0.9254).contains(&f), "ratio = {f}");
    }

    #[test]
    fn claim_a_small_cases() {
        let r = claim_a_ratio(24, 3630).unwrap();
        assert_eq!(
            r,
            BigRational::new(BigInt::from(232_320), BigInt::from(255_024))
        );
        assert!((r.to_f64().unwrap() - 0.910973).abs() < 1e-6);

        let r = claim_a_ratio(5, 1).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(64), BigInt::from(120)));

        assert!(claim_a_ratio(3, 1).is_err());
    }

    #[test]
    fn claim_a_at_z_never_exceeds_one() {
        for m in 4..=1000u64 {
            let r = claim_a_ratio(m, zeta_complete(m)).unwrap();
            assert!(r <= BigRational::one(), "m={m}: {r}");
        }
        // and monotone in the lower bound
        let lo = claim_a_ratio(24, 1000).unwrap();
        let hi = claim_a_ratio(24, 3630).unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn k899_arithmetic_exact() {
        // C(899,4) - 1.76537474e10 lands exactly on the paper's bound
        let implied = gw_implied_bound_exact(899, "1.76537474e10").unwrap();
        assert_eq!(implied, BigInt::from(9_381_181_976u64));
        assert!(implied >= BigInt::from(9_381_181_976u64));
    }

    #[test]
    fn decimal_parser_exact() {
        assert_eq!(
            parse_decimal_rational("1.76537474e10").unwrap(),
            BigRational::from_integer(BigInt::from(17_653_747_400u64))
        );
        assert_eq!(
            parse_decimal_rational("0.5").unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
        assert!(parse_decimal_rational("not-a-number").is_err());
    }

    #[test]
    fn genbound_polynomials() {
        let b7 = assemble_k7n_bound(4.5).unwrap();
        assert_eq!(b7.a, BigRational::new(BigInt::from(9), BigInt::from(4)));
        assert_eq!(b7.b, BigRational::new(BigInt::from(-21), BigInt::from(2)));

        let b8 = k7_to_k8_bipartite(&b7);
        assert_eq!(b8.a, BigRational::from_integer(BigInt::from(3)));
        assert_eq!(b8.b, BigRational::from_integer(BigInt::from(-14)));
        // 3n^2 - 14n at n=100, against Z(8,100)
        assert_eq!(b8.eval(100), BigRational::from_integer(BigInt::from(28_600)));
        assert!(28_600 <= zeta_bipartite(8, 100));

        let z = k7_to_k8_bipartite(&QuadraticBound::zero());
        assert_eq!(z, QuadraticBound::zero());

        // vacuous t = 0 bound is formally correct
        let b0 = assemble_k7n_bound(0.0).unwrap();
        assert!(b0.a.is_zero());
        assert_eq!(b0.b, BigRational::new(BigInt::from(-21), BigInt::from(2)));

        // m=3 at t=1/2: (1/4)n^2 - (3/2)n; n=10 gives 10 <= Z(3,10) = 20
        let b3 = assemble_genbound(3, 0.5).unwrap();
        assert_eq!(b3.eval(10), BigRational::from_integer(BigInt::from(10)));
        assert_eq!(zeta_bipartite(3, 10), 20);
    }

    #[test]
    fn genbound_never_exceeds_z_small() {
        let b3 = assemble_genbound(3, 0.5).unwrap();
        for n in 1..=50u64 {
            let z = BigRational::from_integer(BigInt::from(zeta_bipartite(3, n)));
            assert!(b3.eval(n) <= z, "n={n}");
        }
    }

    #[test]
    fn reports_replay_deterministically() {
        let r = make_report(
            "nu2_complete(9)",
            vec![ProvenanceStep::MaxcutExact { n: 9, maxcut: 90 }],
            true,
        )
        .unwrap();
        assert_eq!(r.value, "36");
        assert_eq!(replay(&r).unwrap(), r.value);

        let r = make_report(
            "asymptotic_ratio",
            vec![
                ProvenanceStep::MaxcutExact { n: 24, maxcut: 6996 },
                ProvenanceStep::ClaimA { m: 24 },
            ],
            true,
        )
        .unwrap();
        assert_eq!(replay(&r).unwrap(), r.value);
        assert_eq!(r.value, claim_a_ratio(24, 3630).unwrap().to_string());

        let r = make_report(
            "nu2_bipartite(8,n)",
            vec![
                ProvenanceStep::ZarCertifiedT {
                    m: 7,
                    t: 4.5,
                    certificate: None,
                },
                ProvenanceStep::GenBound { m: 7 },
                ProvenanceStep::K7ToK8,
            ],
            false,
        )
        .unwrap();
        assert!(r.value.contains("3"));
        let json = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(replay(&back).unwrap(), r.value);
    }

    #[test]
    fn odd_to_even_replay() {
        let r = make_report(
            "nu2_complete(14)",
            vec![
                ProvenanceStep::MaxcutExact { n: 13, maxcut: 490 },
                ProvenanceStep::OddToEven { n_odd: 13 },
            ],
            true,
        )
        .unwrap();
        assert_eq!(r.value, "315");
    }
}
