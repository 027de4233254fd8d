use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

use super::config::ExperimentConfig;
use super::histogram::{normalized_c, Histogram};
use super::ExperimentError;
use crate::bell::{perpendicular, AngleSetting, CountTable};
use crate::optics::{oracle_rho, polarizer_projector, SourceParams};
use crate::qmath::tensor_product;
use crate::tomography::{expected_probabilities, TomoCounts};

/// Shots per random-stream partition. Fixed so that results do not depend on
/// how partitions are spread over workers.
const CHUNK_SHOTS: u64 = 1 << 16;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn derived_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

fn setting_salt(setting: &AngleSetting) -> u64 {
    let a = (setting.alpha_deg.rem_euclid(180.0) * 1000.0).round() as u64 % 180_000;
    let b = (setting.beta_deg.rem_euclid(180.0) * 1000.0).round() as u64 % 180_000;
    a << 20 | b
}

/// Two-sided exponential jitter with the given scale.
fn laplace(rng: &mut ChaCha12Rng, scale_ns: f64) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    let a = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
    let sign = if u >= 0.0 { 1.0 } else { -1.0 };
    -sign * scale_ns * a.ln()
}

/// Everything a shot needs, precomputed once per (config, params, setting).
///
/// Paths are indexed 0 = short (enters port 'a' horizontally polarized) and
/// 1 = long (enters port 'b' vertically polarized, delayed by one pulse
/// separation). Routing follows the beam splitter intensities: a→c with R,
/// a→d with T, b→c with T, b→d with R.
struct ShotModel {
    /// Probability that an overlapping pair yields a central coincidence:
    /// post-selection success × tr[ρ (P_α ⊗ P_β)].
    overlap_prob: f64,
    /// P(reach detector c and pass the α analyzer), per path.
    q_c: [f64; 2],
    /// Same for detector d and the β analyzer.
    q_d: [f64; 2],
    /// arrival[photon][path] in ns relative to the pair's first emission.
    arrival: [[f64; 2]; 2],
    rep_period_ns: f64,
    jitter_ns: f64,
    /// Neighbor periods whose clusters can reach the recorded range.
    max_period_offset: u32,
}

impl ShotModel {
    fn build(
        cfg: &ExperimentConfig,
        params: &SourceParams,
        setting: &AngleSetting,
    ) -> Result<Self, ExperimentError> {
        let (rho, success) = oracle_rho(params)?;
        let projector = tensor_product(
            &polarizer_projector(setting.alpha_deg),
            &polarizer_projector(setting.beta_deg),
        );
        let overlap_prob = success * rho.expectation(&projector)?.max(0.0);

        let (r, t) = (params.reflectance(), params.transmittance());
        let (alpha, beta) = (
            setting.alpha_deg.to_radians(),
            setting.beta_deg.to_radians(),
        );
        let pass_alpha = [alpha.cos().powi(2), alpha.sin().powi(2)]; // H, V
        let pass_beta = [beta.cos().powi(2), beta.sin().powi(2)];
        // Path 0 = short: port a, H. Path 1 = long: port b, V.
        let q_c = [r * pass_alpha[0], t * pass_alpha[1]];
        let q_d = [t * pass_beta[0], r * pass_beta[1]];
        let sep = cfg.pulse_sep_ns;
        let arrival = [[0.0, sep], [sep, 2.0 * sep]];
        let half_range = cfg.norm_window_ns / 2.0;
        let max_period_offset = (half_range / cfg.rep_period_ns).ceil() as u32;
        Ok(ShotModel {
            overlap_prob,
            q_c,
            q_d,
            arrival,
            rep_period_ns: cfg.rep_period_ns,
            jitter_ns: cfg.jitter_scale_ns(),
            max_period_offset,
        })
    }

    #[inline]
    fn run_shot(&self, rng: &mut ChaCha12Rng, hist: &mut Histogram) {
        let bits = rng.random::<u32>();
        let path1 = (bits & 1) as usize;
        let path2 = ((bits >> 1) & 1) as usize;

        if (path1, path2) == (1, 0) {
            // First photon long, second short: the wavepackets overlap at the
            // splitter and the post-selected quantum state decides.
            let u: f64 = rng.random();
            if u < self.overlap_prob {
                hist.record(laplace(rng, self.jitter_ns));
            }
        } else {
            // The photons miss each other; independent routing through the
            // splitter and the analyzers.
            let u: f64 = rng.random();
            let p_plus = self.q_c[path1] * self.q_d[path2];
            let p_minus = self.q_c[path2] * self.q_d[path1];
            let tau = self.arrival[1][path2] - self.arrival[0][path1];
            if u < p_plus {
                hist.record(tau + laplace(rng, self.jitter_ns));
            } else if u < p_plus + p_minus {
                hist.record(-tau + laplace(rng, self.jitter_ns));
            }
        }

        // Accidental coincidences with photons of neighboring pulse pairs.
        let mut neighbor_bits = bits >> 2;
        for m in 1..=self.max_period_offset {
            let n1 = (neighbor_bits & 1) as usize;
            let n2 = ((neighbor_bits >> 1) & 1) as usize;
            neighbor_bits >>= 2;
            let offset = m as f64 * self.rep_period_ns;
            for (i, pi) in [(0usize, path1), (1, path2)] {
                for (j, pj) in [(0usize, n1), (1, n2)] {
                    let u: f64 = rng.random();
                    let p_plus = self.q_c[pi] * self.q_d[pj];
                    let p_minus = self.q_c[pj] * self.q_d[pi];
                    let tau = self.arrival[j][pj] + offset - self.arrival[i][pi];
                    if u < p_plus {
                        hist.record(tau + laplace(rng, self.jitter_ns));
                    } else if u < p_plus + p_minus {
                        hist.record(-tau + laplace(rng, self.jitter_ns));
                    }
                }
            }
        }
    }
}

/// Simulate one coincidence histogram at the given analyzer setting.
///
/// Deterministic for a given (config, params, setting, seed); `threads` only
/// spreads the fixed shot partitions over workers.
pub fn simulate_histogram(
    cfg: &ExperimentConfig,
    params: &SourceParams,
    setting: &AngleSetting,
    threads: usize,
) -> Result<Histogram, ExperimentError> {
    cfg.validate()?;
    let model = ShotModel::build(cfg, params, setting)?;
    let base_seed = derived_seed(cfg.seed, setting_salt(setting));
    let half_range = cfg.norm_window_ns / 2.0;
    let chunks = cfg.shots.div_ceil(CHUNK_SHOTS);
    let workers = threads.max(1).min(chunks as usize);

    let run_chunk = |chunk: u64, hist: &mut Histogram| {
        let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
        rng.set_stream(chunk + 1);
        let start = chunk * CHUNK_SHOTS;
        let len = CHUNK_SHOTS.min(cfg.shots - start);
        for _ in 0..len {
            model.run_shot(&mut rng, hist);
        }
    };

    if workers <= 1 {
        let mut hist = Histogram::new(half_range, cfg.bin_ns)?;
        for chunk in 0..chunks {
            run_chunk(chunk, &mut hist);
        }
        return Ok(hist);
    }

    let mut merged = Histogram::new(half_range, cfg.bin_ns)?;
    let partials = std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for worker in 0..workers {
            let template = Histogram::new(half_range, cfg.bin_ns);
            let run_chunk = &run_chunk;
            handles.push(scope.spawn(move || {
                let mut hist = template.expect("validated geometry");
                let mut chunk = worker as u64;
                while chunk < chunks {
                    run_chunk(chunk, &mut hist);
                    chunk += workers as u64;
                }
                hist
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("worker does not panic"))
            .collect::<Vec<_>>()
    });
    for partial in &partials {
        merged.merge(partial);
    }
    Ok(merged)
}

fn check_grid_closed(angles: &[f64; 4], which: &str) -> Result<(), ExperimentError> {
    let key = |deg: f64| (deg.rem_euclid(180.0) * 1000.0).round() as i64 % 180_000;
    let keys: Vec<i64> = angles.iter().map(|&a| key(a)).collect();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if keys[i] == keys[j] {
                return Err(ExperimentError::BadGrid(format!(
                    "{which} angles must be distinct mod 180°"
                )));
            }
        }
        if !keys.contains(&key(perpendicular(angles[i]))) {
            return Err(ExperimentError::BadGrid(format!(
                "{which} grid must contain the perpendicular of {}°",
                angles[i]
            )));
        }
    }
    Ok(())
}

/// Simulate histograms over a 4×4 analyzer grid, extract normalized central
/// coincidences, and scale each complementary quadruple to a total of 100.
///
/// Every setting draws from its own derived random stream, so the table is
/// deterministic in (config, params, grid, seed).
pub fn run_bell_experiment(
    cfg: &ExperimentConfig,
    params: &SourceParams,
    alphas: &[f64; 4],
    betas: &[f64; 4],
    threads: usize,
) -> Result<CountTable, ExperimentError> {
    cfg.validate()?;
    check_grid_closed(alphas, "alpha")?;
    check_grid_closed(betas, "beta")?;

    let mut raw: Vec<(f64, f64, f64)> = Vec::with_capacity(16);
    for &alpha in alphas {
        for &beta in betas {
            let hist = simulate_histogram(cfg, params, &AngleSetting::new(alpha, beta), threads)?;
            raw.push((alpha, beta, normalized_c(&hist, cfg)?));
        }
    }

    // Complementary quadruples share the unordered pairs {α, α⊥}, {β, β⊥}.
    let pair_key = |deg: f64| {
        let k = (deg.rem_euclid(180.0) * 1000.0).round() as i64 % 180_000;
        k.min((k + 90_000) % 180_000)
    };
    let mut table = CountTable::new();
    for &(alpha, beta, value) in &raw {
        let group: f64 = raw
            .iter()
            .filter(|&&(a, b, _)| pair_key(a) == pair_key(alpha) && pair_key(b) == pair_key(beta))
            .map(|&(_, _, v)| v)
            .sum();
        if group <= 0.0 {
            return Err(ExperimentError::ZeroNormalization);
        }
        table.insert(alpha, beta, 100.0 * value / group)?;
    }
    Ok(table)
}

/// Simulate per-setting coincidence counts for the 16 canonical tomography
/// settings on the post-selected state. With `exact` the expected counts are
/// returned instead of sampling (the infinite-shots limit at the same scale).
pub fn run_tomo_experiment(
    cfg: &ExperimentConfig,
    params: &SourceParams,
    exact: bool,
) -> Result<TomoCounts, ExperimentError> {
    cfg.validate()?;
    let (rho, success) = oracle_rho(params)?;
    let probabilities = expected_probabilities(&rho)?;
    let mut counts = [0.0; 16];
    for (nu, &q) in probabilities.iter().enumerate() {
        // One pulse-pair in four overlaps; of those, post-selection succeeds
        // with `success` and the analyzers pass with probability q.
        let p_event = (0.25 * success * q).clamp(0.0, 1.0);
        if exact {
            counts[nu] = cfg.shots as f64 * p_event;
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(derived_seed(cfg.seed, 0x7040_0000 + nu as u64));
            counts[nu] = if p_event > 0.0 {
                Binomial::new(cfg.shots, p_event)
                    .expect("probability in range")
                    .sample(&mut rng) as f64
            } else {
                0.0
            };
        }
    }
    Ok(TomoCounts::from_counts(counts)?)
}
