//! Counting layer for the local-ubiquity machinery: the pairing constant
//! ε(b), the bad-vector pairing check, the 2-regular step function ω built
//! from divergent summand blocks, the ubiquity radius ρ_c, exact rational
//! censuses T(N)/G(N) for m = 1, and mean/variance statistics of the
//! resonant-hit count ν_N for m ≥ 2.

use crate::error::{Error, Result};
use crate::num::{dist_to_int, gcd_u64, gcd_with_slice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Hard cap for the m = 1 census level.
pub const CENSUS_MAX_LEVEL: u32 = 14;
const ENUM_CAP: u64 = 100_000_000;

/// ε(b) = min over nonintegral coordinates of |b_j|_Z / 4.
pub fn epsilon_of_b(b: &[f64]) -> Result<f64> {
    let mut eps = f64::INFINITY;
    for &bj in b {
        let d = dist_to_int(bj);
        if d > 0.0 {
            eps = eps.min(d / 4.0);
        }
    }
    if eps.is_infinite() {
        return Err(Error::Domain("epsilon_of_b undefined for integral b".into()));
    }
    Ok(eps)
}

/// True iff |b·x|_Z ≤ ε(b), i.e. x is a "bad" vector for the pairing lemma.
pub fn bad_pair_check(b: &[f64], x: &[i64]) -> Result<bool> {
    if b.len() != x.len() {
        return Err(Error::Domain("bad_pair_check: dimension mismatch".into()));
    }
    let eps = epsilon_of_b(b)?;
    let bx: f64 = b.iter().zip(x).map(|(&bi, &xi)| bi * xi as f64).sum();
    Ok(dist_to_int(bx) <= eps)
}

/// Index of a coordinate realizing ε(b).
pub fn epsilon_index(b: &[f64]) -> Result<usize> {
    let eps = epsilon_of_b(b)?;
    b.iter()
        .position(|&bj| dist_to_int(bj) > 0.0 && (dist_to_int(bj) / 4.0 - eps).abs() < 1e-15)
        .ok_or_else(|| Error::Domain("no coordinate realizes epsilon".into()))
}

/// Step function ω(h) = i^{1/n} on the block (h_{i−1}, h_i], stored as the
/// block list [(h_i, i)].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OmegaTable {
    pub n: u32,
    pub blocks: Vec<(u64, u32)>,
}

impl OmegaTable {
    pub fn omega(&self, h: u64) -> Result<f64> {
        if h == 0 {
            return Err(Error::Domain("omega is defined for h >= 1".into()));
        }
        let idx = self.blocks.partition_point(|&(hb, _)| hb < h);
        if idx == self.blocks.len() {
            return Err(Error::Domain(format!(
                "omega table exhausted at h={h} (last boundary {})",
                self.blocks.last().map(|&(hb, _)| hb).unwrap_or(0)
            )));
        }
        Ok(((idx + 1) as f64).powf(1.0 / self.n as f64))
    }

    pub fn last_boundary(&self) -> u64 {
        self.blocks.last().map(|&(h, _)| h).unwrap_or(0)
    }
}

/// Build the block boundaries h_i from a divergent summand sequence: each
/// block's partial sum exceeds 1 and h_i > 2 h_{i−1}. Errors out if the
/// summands run dry before `h_max`.
pub fn omega_sequence(summand: impl Fn(u64) -> f64, n: u32, h_max: u64) -> Result<OmegaTable> {
    if n == 0 {
        return Err(Error::Domain("omega_sequence needs n >= 1".into()));
    }
    let mut blocks: Vec<(u64, u32)> = Vec::new();
    let mut h_prev = 0u64;
    let mut sum = 0.0;
    let mut i = 0u32;
    for h in 1..=h_max {
        let g = summand(h);
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::Domain(format!("summand({h}) = {g} is not a finite nonnegative value")));
        }
        sum += g;
        if sum > 1.0 && h > 2 * h_prev {
            i += 1;
            blocks.push((h, i));
            h_prev = h;
            sum = 0.0;
        }
    }
    if blocks.is_empty() {
        return Err(Error::DivergenceExhausted(format!(
            "no block closed below h_max={h_max}; partial sum {sum}"
        )));
    }
    Ok(OmegaTable { n, blocks })
}

/// The normalized critical summand 1/h (the constant-free shape of the
/// divergent Jarník sum at the critical dimension). Blocks built from it
/// grow by a factor of about e.
pub fn critical_unit_summand(h: u64) -> f64 {
    1.0 / h as f64
}

/// ρ_c(h): c·h^{−(1+n)/n} for m = 1, c·h^{−(m+n)/n}·ω(h) for m ≥ 2.
pub fn rho_ubiquity(c: f64, m: u32, n: u32, h: f64, omega: Option<&OmegaTable>) -> Result<f64> {
    if !(c > 0.0) || !(h >= 1.0) {
        return Err(Error::Domain("rho_ubiquity needs c > 0 and h >= 1".into()));
    }
    let nf = n as f64;
    if m == 1 {
        Ok(c * h.powf(-(1.0 + nf) / nf))
    } else {
        let table = omega.ok_or_else(|| Error::Domain("rho_ubiquity with m >= 2 needs an omega table".into()))?;
        Ok(c * h.powf(-((m + n) as f64) / nf) * table.omega(h.ceil() as u64)?)
    }
}

#[derive(Clone, Debug)]
pub struct UbiquityConfig {
    /// Shift vector, b ∉ Z^m.
    pub b: Vec<f64>,
    pub m: u32,
    pub n: u32,
    /// Dyadic level N.
    pub level: u32,
    /// Box B = Π [l_i, u_i] ⊆ [0,1]^n (m = 1 census only).
    pub box_b: Vec<(f64, f64)>,
    /// Ubiquity constant; fitted from the census when absent.
    pub c: Option<f64>,
    pub mc_samples: usize,
    pub rng_seed: u64,
    /// ω table (m ≥ 2 statistics only).
    pub omega: Option<OmegaTable>,
}

impl UbiquityConfig {
    pub fn validate(&self) -> Result<()> {
        epsilon_of_b(&self.b)?;
        if self.b.len() != self.m as usize {
            return Err(Error::Domain("b must have m coordinates".into()));
        }
        if let Some(c) = self.c {
            if !(c > 0.0) {
                return Err(Error::Domain("c must be positive".into()));
            }
        }
        if self.m == 1 {
            if self.box_b.len() != self.n as usize {
                return Err(Error::Domain("box must have n intervals".into()));
            }
            for &(l, u) in &self.box_b {
                if !(0.0 <= l && l < u && u <= 1.0) {
                    return Err(Error::Domain(format!("bad box interval [{l}, {u}]")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum UbiquityReport {
    /// Exact m = 1 census of resonant centers and disjoint-ball survivors.
    Census {
        level: u32,
        count_t: u64,
        count_g: u64,
        c_used: f64,
        rho: f64,
        eps0: f64,
    },
    /// m ≥ 2 statistics of ν_N over Monte Carlo samples of A.
    MeanVariance {
        level: u32,
        size_i: u64,
        omega_2n: f64,
        delta: f64,
        mu_exact: f64,
        mu_hat: f64,
        sigma2_hat: f64,
        z_empty_fraction: f64,
        mc_samples: usize,
        /// raw moments of ν up to order 4 (for error bars downstream)
        raw_moments: [f64; 4],
    },
}

struct CensusPoint {
    x: u64,
    y: Vec<i64>,
    coords: Vec<f64>,
}

fn census_points(cfg: &UbiquityConfig) -> Result<Vec<CensusPoint>> {
    let n = cfg.n as usize;
    let b0 = cfg.b[0];
    let eps0 = epsilon_of_b(&cfg.b)?;
    let lo = (1u64 << (cfg.level - 1)) + 1;
    let hi = 1u64 << cfg.level;
    let per_x: Vec<Vec<CensusPoint>> = (lo..=hi)
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            if dist_to_int(b0 * x as f64) <= eps0 {
                return out;
            }
            let ranges: Vec<(i64, i64)> = cfg
                .box_b
                .iter()
                .map(|&(l, u)| (((x as f64) * l).ceil() as i64, ((x as f64) * u).floor() as i64))
                .collect();
            let mut y: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            if y.iter().zip(&ranges).any(|(v, r)| *v > r.1) {
                return out;
            }
            'outer: loop {
                // membership in the index family: ‖y‖ ≤ m‖x‖ and coprimality
                if y.iter().all(|&v| v.unsigned_abs() <= x) && gcd_with_slice(x, &y) == 1 {
                    let coords = y.iter().map(|&v| v as f64 / x as f64).collect();
                    out.push(CensusPoint { x, y: y.clone(), coords });
                }
                let mut idx = 0;
                loop {
                    if idx == n {
                        break 'outer;
                    }
                    y[idx] += 1;
                    if y[idx] <= ranges[idx].1 {
                        break;
                    }
                    y[idx] = ranges[idx].0;
                    idx += 1;
                }
            }
            out
        })
        .collect();
    Ok(per_x.into_iter().flatten().collect())
}

/// Exact census for m = 1: T(N) enumerates reduced fractions y/x in the box
/// with 2^{N−1} < x ≤ 2^N and |b x|_Z > ε(b); G(N) keeps the points whose
/// ρ_c(2^N)-ball meets no other ball, found with a spatial hash at cell
/// size 2ρ.
pub fn census_m1(cfg: &UbiquityConfig) -> Result<UbiquityReport> {
    cfg.validate()?;
    if cfg.m != 1 {
        return Err(Error::WrongMode(format!("census_m1 needs m = 1, got m = {}", cfg.m)));
    }
    if cfg.level == 0 || cfg.level > CENSUS_MAX_LEVEL {
        return Err(Error::Budget(format!(
            "census level must satisfy 1 <= N <= {CENSUS_MAX_LEVEL}, got {}",
            cfg.level
        )));
    }
    let eps0 = epsilon_of_b(&cfg.b)?;
    let points = census_points(cfg)?;
    let count_t = points.len() as u64;

    let h = (1u64 << cfg.level) as f64;
    let vol: f64 = cfg.box_b.iter().map(|&(l, u)| u - l).product();
    let c_used = match cfg.c {
        Some(c) => c,
        None => {
            // fit c1 from this census, then take 90% of the disjointness bound
            let c1_hat = count_t as f64 / (vol * h.powi(cfg.n as i32 + 1)).max(1.0);
            0.9 * (c1_hat * 2f64.powi(-(2 * cfg.n as i32 + 1))).powf(1.0 / cfg.n as f64)
        }
    };
    let rho = rho_ubiquity(c_used, 1, cfg.n, h, None)?;

    let count_g = count_disjoint(&points, 2.0 * rho);
    Ok(UbiquityReport::Census { level: cfg.level, count_t, count_g, c_used, rho, eps0 })
}

/// Number of points whose open ball of radius sep/2 meets no other ball,
/// i.e. whose nearest neighbor is at sup-distance ≥ sep.
fn count_disjoint(points: &[CensusPoint], sep: f64) -> u64 {
    let n = points.first().map(|p| p.coords.len()).unwrap_or(0);
    let mut cells: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let key: Vec<i64> = p.coords.iter().map(|&c| (c / sep).floor() as i64).collect();
        cells.entry(key).or_default().push(i as u32);
    }
    let close = |p: &CensusPoint, q: &CensusPoint| -> bool {
        // |y_k/x − s_k/t| < sep exactly: |y_k t − s_k x| < sep·x·t
        let scale = sep * (p.x as f64) * (q.x as f64);
        (0..p.coords.len()).all(|k| {
            let num = p.y[k] as i128 * q.x as i128 - q.y[k] as i128 * p.x as i128;
            (num.unsigned_abs() as f64) < scale
        })
    };
    let mut isolated = 0u64;
    let mut neighbor = vec![0i64; n];
    for (i, p) in points.iter().enumerate() {
        let key: Vec<i64> = p.coords.iter().map(|&c| (c / sep).floor() as i64).collect();
        let mut ok = true;
        let mut off = vec![-1i64; n];
        'offsets: loop {
            for k in 0..n {
                neighbor[k] = key[k] + off[k];
            }
            if let Some(bucket) = cells.get(&neighbor) {
                for &j in bucket {
                    if j as usize != i && close(p, &points[j as usize]) {
                        ok = false;
                        break 'offsets;
                    }
                }
            }
            let mut idx = 0;
            loop {
                if idx == n {
                    break 'offsets;
                }
                off[idx] += 1;
                if off[idx] <= 1 {
                    break;
                }
                off[idx] = -1;
                idx += 1;
            }
        }
        if ok {
            isolated += 1;
        }
    }
    isolated
}

/// Sieve of Euler totients up to n inclusive.
pub fn totient_sieve(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            let mut k = p;
            while k <= n {
                phi[k] -= phi[k] / p as u64;
                k += p;
            }
        }
    }
    phi
}

/// (1/N²) Σ_{q=1}^{N} φ(q); tends to 3/π².
pub fn totient_ratio(n: u64) -> f64 {
    let phi = totient_sieve(n as usize);
    let total: u64 = phi[1..].iter().sum();
    total as f64 / (n as f64 * n as f64)
}

/// Enumerate the index set I(N): x_1 ∈ [N, 2N], 1 ≤ x_i ≤ N/ω(2N)^{1/(2(m−1))}
/// for i ≥ 2, gcd(x) = 1 and |b·x|_Z > ε(b).
fn enumerate_index_set(cfg: &UbiquityConfig, omega_2n: f64) -> Result<Vec<Vec<u64>>> {
    let m = cfg.m as usize;
    let eps0 = epsilon_of_b(&cfg.b)?;
    let level = cfg.level as u64;
    let tail_bound =
        (cfg.level as f64 / omega_2n.powf(1.0 / (2.0 * (m as f64 - 1.0)))).floor() as u64;
    if tail_bound < 1 {
        return Err(Error::Domain(format!(
            "index set empty: tail bound {tail_bound} below 1 at N={level}"
        )));
    }
    let total = (level + 1).saturating_mul(tail_bound.saturating_pow(m as u32 - 1));
    if total > ENUM_CAP {
        return Err(Error::Budget(format!("index set enumeration {total} exceeds {ENUM_CAP}")));
    }
    let mut out = Vec::new();
    let mut x = vec![1u64; m];
    x[0] = level;
    'outer: loop {
        let g = x.iter().skip(1).fold(x[0], |g, &v| gcd_u64(g, v));
        if g == 1 {
            let bx: f64 = cfg.b.iter().zip(&x).map(|(&bi, &xi)| bi * xi as f64).sum();
            if dist_to_int(bx) > eps0 {
                out.push(x.clone());
            }
        }
        let mut idx = m;
        loop {
            if idx == 0 {
                break 'outer;
            }
            idx -= 1;
            x[idx] += 1;
            let max = if idx == 0 { 2 * level } else { tail_bound };
            if x[idx] <= max {
                break;
            }
            x[idx] = if idx == 0 { level } else { 1 };
            if idx == 0 {
                break 'outer;
            }
        }
    }
    Ok(out)
}

/// Mean/variance statistics of ν_N(A) = #{(x, y) ∈ J(N) : ‖ᵗA x − y‖ < δ(N)}
/// for A uniform on [0,1]^{mn}, alongside the exact mean
/// μ_N = |I(N)|·2^n·N^{−m}·ω(2N)^n.
pub fn mean_variance(cfg: &UbiquityConfig) -> Result<UbiquityReport> {
    if cfg.m < 2 {
        return Err(Error::WrongMode(format!("mean_variance needs m >= 2, got m = {}", cfg.m)));
    }
    cfg.validate()?;
    if cfg.mc_samples == 0 {
        return Err(Error::Domain("mean_variance needs mc_samples >= 1".into()));
    }
    let table = cfg
        .omega
        .as_ref()
        .ok_or_else(|| Error::Domain("mean_variance needs an omega table".into()))?;
    if table.n != cfg.n {
        return Err(Error::Domain("omega table built for a different n".into()));
    }
    let (m, n) = (cfg.m as usize, cfg.n as usize);
    let nf = cfg.n as f64;
    let level = cfg.level as f64;
    let omega_2n = table.omega(2 * cfg.level as u64)?;
    let delta = level.powf(-(cfg.m as f64) / nf) * omega_2n;
    if !(delta < 0.5) {
        return Err(Error::Domain(format!("delta(N) = {delta} must be below 1/2; raise N")));
    }
    let index_set = enumerate_index_set(cfg, omega_2n)?;
    let size_i = index_set.len() as u64;
    let mu_exact = size_i as f64 * 2f64.powi(cfg.n as i32) * level.powi(-(cfg.m as i32))
        * omega_2n.powi(cfg.n as i32);

    let counts: Vec<u32> = (0..cfg.mc_samples)
        .into_par_iter()
        .map(|sample| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(sample as u64 + 1);
            let a: Vec<f64> = (0..m * n).map(|_| rng.gen::<f64>()).collect();
            let mut nu = 0u32;
            for x in &index_set {
                let norm_x = *x.iter().max().unwrap() as f64;
                let mut hit = true;
                for j in 0..n {
                    let tax: f64 = (0..m).map(|i| a[i * n + j] * x[i] as f64).sum();
                    if dist_to_int(tax) >= delta || tax.round().abs() > cfg.m as f64 * norm_x {
                        hit = false;
                        break;
                    }
                }
                if hit {
                    nu += 1;
                }
            }
            nu
        })
        .collect();

    let k = cfg.mc_samples as f64;
    let mut raw = [0.0f64; 4];
    let mut empty = 0u64;
    for &c in &counts {
        let v = c as f64;
        raw[0] += v;
        raw[1] += v * v;
        raw[2] += v * v * v;
        raw[3] += v * v * v * v;
        if c == 0 {
            empty += 1;
        }
    }
    for r in raw.iter_mut() {
        *r /= k;
    }
    let mu_hat = raw[0];
    let sigma2_hat = if cfg.mc_samples > 1 {
        (raw[1] - mu_hat * mu_hat) * k / (k - 1.0)
    } else {
        0.0
    };
    Ok(UbiquityReport::MeanVariance {
        level: cfg.level,
        size_i,
        omega_2n,
        delta,
        mu_exact,
        mu_hat,
        sigma2_hat,
        z_empty_fraction: empty as f64 / k,
        mc_samples: cfg.mc_samples,
        raw_moments: raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_examples() {
        assert!((epsilon_of_b(&[0.3]).unwrap() - 0.075).abs() < 1e-15);
        assert!((epsilon_of_b(&[0.5, 2.0]).unwrap() - 0.125).abs() < 1e-15);
        assert!((epsilon_of_b(&[0.9]).unwrap() - 0.025).abs() < 1e-12);
        assert!(epsilon_of_b(&[1.0, -3.0]).is_err());
    }

    #[test]
    fn bad_pair_examples() {
        assert!(bad_pair_check(&[0.5], &[2]).unwrap());
        assert!(!bad_pair_check(&[0.5], &[1]).unwrap());
    }

    #[test]
    fn pairing_lemma_small_brute_force() {
        let b = [0.3];
        let i = epsilon_index(&b).unwrap();
        assert_eq!(i, 0);
        for x in -100i64..=100 {
            let both = bad_pair_check(&b, &[x]).unwrap() && bad_pair_check(&b, &[x + 1]).unwrap();
            assert!(!both, "x={x}");
        }
    }

    #[test]
    fn omega_unit_summand_doubling_rule_binds() {
        let table = omega_sequence(|_| 1.0, 1, 1000).unwrap();
        // block sums exceed 1 instantly, so boundaries follow h -> 2h + 1
        let hs: Vec<u64> = table.blocks.iter().map(|&(h, _)| h).collect();
        assert_eq!(&hs[..5], &[2, 5, 11, 23, 47]);
        assert!((table.omega(2).unwrap() - 1.0).abs() < 1e-15);
        assert!((table.omega(3).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn omega_critical_blocks_have_bounded_sums() {
        let table = omega_sequence(critical_unit_summand, 1, 1 << 20).unwrap();
        let mut prev = 0u64;
        for &(h, _) in &table.blocks {
            let sum: f64 = (prev + 1..=h).map(|k| 1.0 / k as f64).sum();
            let max_term = 1.0 / (prev + 1) as f64;
            assert!(sum > 1.0 && sum <= 1.0 + max_term + 1e-12, "block ({prev}, {h}]");
            assert!(h > 2 * prev);
            prev = h;
        }
    }

    #[test]
    fn omega_errors_on_convergent_summands() {
        // total mass stays below 1, so no block can ever close
        assert!(matches!(
            omega_sequence(|h| 0.5 / (h as f64 * h as f64), 1, 100_000),
            Err(Error::DivergenceExhausted(_))
        ));
    }

    #[test]
    fn rho_values_and_regularity() {
        assert!((rho_ubiquity(1.0, 1, 1, 4.0, None).unwrap() - 0.0625).abs() < 1e-15);
        let table = omega_sequence(|_| 1.0, 1, 100).unwrap();
        let v = rho_ubiquity(1.0, 2, 1, 4.0, Some(&table)).unwrap();
        assert!((v - 4.0f64.powf(-3.0) * 2.0).abs() < 1e-12);
        // m=1 is exactly 2-regular with λ = 2^{-(1+n)/n}
        for np in 1..4u32 {
            let lam = 2f64.powf(-(1.0 + np as f64) / np as f64);
            for k in 3..10u32 {
                let r1 = rho_ubiquity(0.7, 1, np, 2f64.powi(k as i32), None).unwrap();
                let r2 = rho_ubiquity(0.7, 1, np, 2f64.powi(k as i32 + 1), None).unwrap();
                assert!((r2 - lam * r1).abs() < 1e-15 * r1.max(1.0));
            }
        }
        // m>=2: ratio < 1 empirically from the table
        let table = omega_sequence(critical_unit_summand, 1, 1 << 16).unwrap();
        for k in 3..12u32 {
            let r1 = rho_ubiquity(1.0, 2, 1, 2f64.powi(k as i32), Some(&table)).unwrap();
            let r2 = rho_ubiquity(1.0, 2, 1, 2f64.powi(k as i32 + 1), Some(&table)).unwrap();
            assert!(r2 < r1);
        }
    }

    fn census_cfg(level: u32) -> UbiquityConfig {
        UbiquityConfig {
            b: vec![0.5],
            m: 1,
            n: 1,
            level,
            box_b: vec![(0.0, 1.0)],
            c: None,
            mc_samples: 0,
            rng_seed: 0,
            omega: None,
        }
    }

    /// Brute-force census for cross-checking: double loop, O(n²) disjointness.
    fn census_brute(cfg: &UbiquityConfig) -> (u64, u64) {
        let b0 = cfg.b[0];
        let eps0 = epsilon_of_b(&cfg.b).unwrap();
        let lo = (1u64 << (cfg.level - 1)) + 1;
        let hi = 1u64 << cfg.level;
        let mut pts: Vec<(u64, i64)> = Vec::new();
        for x in lo..=hi {
            if dist_to_int(b0 * x as f64) <= eps0 {
                continue;
            }
            let (l, u) = cfg.box_b[0];
            let (ylo, yhi) = (((x as f64) * l).ceil() as i64, ((x as f64) * u).floor() as i64);
            for y in ylo..=yhi {
                if y.unsigned_abs() <= x && gcd_u64(x, y.unsigned_abs()) == 1 {
                    pts.push((x, y));
                }
            }
        }
        let count_t = pts.len() as u64;
        let h = (1u64 << cfg.level) as f64;
        let c1_hat = count_t as f64 / h.powi(2);
        let c = 0.9 * (c1_hat / 8.0);
        let rho = c * h.powf(-2.0);
        let mut count_g = 0;
        for (i, &(x, y)) in pts.iter().enumerate() {
            let mut iso = true;
            for (j, &(t, s)) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let num = (y as i128 * t as i128 - s as i128 * x as i128).unsigned_abs() as f64;
                if num < 2.0 * rho * (x as f64) * (t as f64) {
                    iso = false;
                    break;
                }
            }
            if iso {
                count_g += 1;
            }
        }
        (count_t, count_g)
    }

    #[test]
    fn census_matches_brute_force() {
        for level in 4..=8 {
            let cfg = census_cfg(level);
            let (bt, bg) = census_brute(&cfg);
            match census_m1(&cfg).unwrap() {
                UbiquityReport::Census { count_t, count_g, .. } => {
                    assert_eq!(count_t, bt, "N={level}");
                    assert_eq!(count_g, bg, "N={level}");
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn census_totals_match_odd_totient_sums() {
        // for b = 1/2 only odd x pass the pairing filter, and each
        // contributes phi(x) reduced fractions in [0,1]
        let level = 7;
        let cfg = census_cfg(level);
        let phi = totient_sieve(1 << level);
        let expected: u64 = ((1 << (level - 1)) + 1..=(1u64 << level))
            .filter(|x| x % 2 == 1)
            .map(|x| phi[x as usize])
            .sum();
        match census_m1(&cfg).unwrap() {
            UbiquityReport::Census { count_t, .. } => assert_eq!(count_t, expected),
            _ => unreachable!(),
        }
    }

    #[test]
    fn totient_examples() {
        assert!((totient_ratio(1) - 1.0).abs() < 1e-15);
        assert!((totient_ratio(3) - 4.0 / 9.0).abs() < 1e-15);
        let limit = 3.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((totient_ratio(1000) - limit).abs() < 0.05 * limit);
    }

    fn mv_cfg(level: u32, samples: usize) -> UbiquityConfig {
        UbiquityConfig {
            b: vec![0.5, 0.3],
            m: 2,
            n: 1,
            level,
            box_b: vec![],
            c: None,
            mc_samples: samples,
            rng_seed: 42,
            omega: Some(omega_sequence(critical_unit_summand, 1, 1 << 12).unwrap()),
        }
    }

    #[test]
    fn mean_variance_consistency() {
        match mean_variance(&mv_cfg(20, 4000)).unwrap() {
            UbiquityReport::MeanVariance {
                size_i,
                mu_exact,
                mu_hat,
                sigma2_hat,
                z_empty_fraction,
                mc_samples,
                ..
            } => {
                assert!(size_i > 50);
                let se = (sigma2_hat / mc_samples as f64).sqrt();
                assert!((mu_hat - mu_exact).abs() <= 3.0 * se, "mu_hat={mu_hat} mu_exact={mu_exact} se={se}");
                assert!(sigma2_hat <= mu_hat * 1.1);
                assert!(z_empty_fraction <= 1.0 / mu_exact + 3.0 * (z_empty_fraction / mc_samples as f64).sqrt() + 0.05);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn mean_variance_rejects_m1() {
        let mut cfg = mv_cfg(20, 10);
        cfg.m = 1;
        cfg.b = vec![0.5];
        assert!(matches!(mean_variance(&cfg), Err(Error::WrongMode(_))));
    }

    #[test]
    fn mean_variance_deterministic_given_seed() {
        let a = mean_variance(&mv_cfg(20, 500)).unwrap();
        let b = mean_variance(&mv_cfg(20, 500)).unwrap();
        match (a, b) {
            (
                UbiquityReport::MeanVariance { mu_hat: m1, sigma2_hat: s1, .. },
                UbiquityReport::MeanVariance { mu_hat: m2, sigma2_hat: s2, .. },
            ) => {
                assert_eq!(m1, m2);
                assert_eq!(s1, s2);
            }
            _ => unreachable!(),
        }
    }

    /// The counting claim behind the disjointness estimate: with the full box
    /// l = 0, u = 1, the number of solutions (y, s) of 0 < |t y − x s| ≤ A,
    /// 0 ≤ y ≤ x, 0 ≤ s ≤ t is at most 2(u−l)A.
    #[test]
    fn pair_counting_claim_full_box() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..300 {
            let x = rng.gen_range(1i64..=60);
            let t = rng.gen_range(1i64..=60);
            let a = rng.gen_range(1i64..=15) as f64;
            let mut count = 0;
            for y in 0..=x {
                for s in 0..=t {
                    let v = (t * y - x * s).abs() as f64;
                    if v > 0.0 && v <= a {
                        count += 1;
                    }
                }
            }
            assert!(count as f64 <= 2.0 * a, "x={x} t={t} A={a} count={count}");
        }
    }
}
