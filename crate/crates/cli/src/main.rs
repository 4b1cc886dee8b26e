//! Experiment runner: every report the library supports, emitted as a
//! deterministic CSV or JSON table.  Exit status 0 means all asserted
//! inequalities held, 1 means at least one violation (listed on stderr),
//! 2 means the invocation itself was invalid.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use output::{Cell, Table};
use rlab_core::rochberg::{self, RochbergVector};
use rlab_core::seq::FiniteSequence;
use rlab_core::{duality, jet, reparam, type2, zomega};

const SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Integer parameter list: either comma-separated values ("4,16,64") or an
/// inclusive range ("1..4").
#[derive(Clone, Debug)]
struct IntList(Vec<u64>);

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some((lo, hi)) = s.split_once("..") {
            let lo: u64 = lo
                .trim()
                .parse()
                .map_err(|_| format!("bad range start in '{s}'"))?;
            let hi: u64 = hi
                .trim()
                .parse()
                .map_err(|_| format!("bad range end in '{s}'"))?;
            if lo > hi {
                return Err(format!("empty range '{s}'"));
            }
            if hi - lo >= 4096 {
                return Err(format!("range '{s}' too long"));
            }
            Ok(IntList((lo..=hi).collect()))
        } else {
            let vals: Result<Vec<u64>, String> = s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| format!("bad integer '{}' in '{s}'", t.trim()))
                })
                .collect();
            let vals = vals?;
            if vals.is_empty() {
                return Err("empty list".into());
            }
            Ok(IntList(vals))
        }
    }
}

/// Comma-separated floating-point parameter list.
#[derive(Clone, Debug)]
struct FloatList(Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let vals: Result<Vec<f64>, String> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| format!("bad number '{}' in '{s}'", t.trim()))
            })
            .collect();
        let vals = vals?;
        if vals.is_empty() {
            return Err("empty list".into());
        }
        Ok(FloatList(vals))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "rlab",
    version,
    about = "Deterministic experiment tables for the twisted-sum interpolation laboratory"
)]
struct Cli {
    /// Base seed for every randomized trial
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Artifact encoding
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the artifact here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact rational vanishing of the alternating reciprocal-factorial sums
    Algebra {
        /// Largest order checked
        #[arg(long = "max-n", default_value_t = 20)]
        max_n: u64,
    },

    /// Quasinorm growth of bottom-padded summing vectors against the
    /// logarithmic lower bound; with --exactness, padding and projection
    /// invariants on random arrays instead
    Lowerbound {
        /// Interpolation parameter in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        theta: f64,

        /// Padding depths
        #[arg(long, default_value = "1..4")]
        m: IntList,

        /// Summing-vector sizes
        #[arg(long = "N", default_value = "4,16,64,256,1024")]
        big_n: IntList,

        /// Run this many padding/projection trials instead of the growth table
        #[arg(long)]
        exactness: Option<u64>,

        /// Largest padded length in the exactness trials
        #[arg(long = "max-len", default_value_t = 6)]
        max_len: u64,
    },

    /// Witnessed sign-average constants of the array spaces
    Type2 {
        /// Number of zero coordinates above the bottom one
        #[arg(long, default_value_t = 1)]
        m: u64,

        /// Tuple lengths
        #[arg(long, default_value = "4,8,16")]
        n: IntList,

        /// Largest witness block size searched (doubling steps)
        #[arg(long = "block-cap", default_value_t = 16)]
        block_cap: u64,
    },

    /// Quasilinearity defect ratios of the differential on random pairs
    Quasilin {
        /// Array lengths of the differential
        #[arg(long, default_value = "1..4")]
        n: IntList,

        /// Seeded random pairs per length
        #[arg(long, default_value_t = 500)]
        trials: u64,

        /// Largest support index of the random data
        #[arg(long, default_value_t = 64)]
        support: u64,

        /// Interpolation parameter in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
    },

    /// Pairing coefficients against the boundary-sup bound; with
    /// --certificate, the closed-form lower certificate against the quasinorm
    Duality {
        /// Interpolation parameters in (0, 1)
        #[arg(long, default_value = "0.25,0.5,0.75")]
        c: FloatList,

        /// Coefficient depths
        #[arg(long, default_value = "1..4")]
        n: IntList,

        /// Random pairs per parameter tuple
        #[arg(long, default_value_t = 100)]
        pairs: u64,

        /// Boundary sampling resolution
        #[arg(long, default_value_t = 256)]
        samples: u64,

        /// Check the certificate table instead of the pairing bound
        #[arg(long)]
        certificate: bool,

        /// Summing-vector sizes for the certificate table
        #[arg(long = "N", default_value = "4,16,64,256,1024")]
        big_n: IntList,
    },

    /// Commuting residuals of the transport and embedding diagrams
    Diagrams {
        /// Family code (poz, Fm2, F2m, FuGz, Tn) or "all"
        #[arg(long, default_value = "all")]
        which: String,

        /// Random inputs per diagram
        #[arg(long, default_value_t = 100)]
        samples: u64,

        /// Largest admissible residual
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },

    /// Reparametrization matrices against direct jet composition and
    /// multiplication
    Fdb {
        /// Random jet pairs per check
        #[arg(long, default_value_t = 100)]
        trials: u64,

        /// Largest jet order drawn
        #[arg(long, default_value_t = 6)]
        order: u64,

        /// Largest admissible composition residual
        #[arg(long = "chain-tol", default_value_t = 1e-10)]
        chain_tol: f64,

        /// Largest admissible product residual
        #[arg(long = "product-tol", default_value_t = 1e-12)]
        product_tol: f64,
    },

    /// Radial-weight family: boundary normalization, exact off-cycle
    /// vanishing, and the logarithmic twist at the first live order
    Zomega {
        /// Weight amplitudes in (0, 1/2)
        #[arg(long, default_value = "0.25,0.3")]
        r: FloatList,

        /// Weight frequencies
        #[arg(long, default_value = "2,3")]
        k: IntList,

        /// Boundary sample count
        #[arg(long, default_value_t = 4096)]
        samples: u64,

        /// Largest support index of the random data
        #[arg(long, default_value_t = 64)]
        support: u64,

        /// Largest admissible boundary normalization residual
        #[arg(long = "boundary-tol", default_value_t = 1e-8)]
        boundary_tol: f64,

        /// Largest admissible gap at the first live order
        #[arg(long = "twist-tol", default_value_t = 1e-10)]
        twist_tol: f64,
    },
}

fn seeded(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(SEED_MIX))
}

/// Non-negative random data of unit central norm, supported in `1..=support`.
fn profile_data(rng: &mut ChaCha8Rng, support: u32) -> FiniteSequence {
    let f = FiniteSequence::random_nonzero(rng, support, 24)
        .map_support(|_, v| Complex64::new(v.norm().max(0.05), 0.0));
    let norm = f.lp_norm(2.0).unwrap();
    f.scale_real(1.0 / norm)
}

fn check(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn factorial(m: u64) -> f64 {
    (1..=m).product::<u64>() as f64
}

fn run_algebra(max_n: u64) -> Result<(Table, Vec<String>), String> {
    check((1..=500).contains(&max_n), "--max-n must be in 1..=500")?;
    let mut table = Table::new(vec!["n", "numerator", "denominator", "vanishes"]);
    let mut violations = Vec::new();
    for n in 1..=max_n {
        let sum = jet::alternating_reciprocal_factorial_sum(n as u32);
        let vanishes = sum.is_zero();
        table.push(vec![
            Cell::UInt(n),
            Cell::Text(sum.numer().to_string()),
            Cell::Text(sum.denom().to_string()),
            Cell::Int(vanishes as i64),
        ]);
        if !vanishes {
            violations.push(format!("alternating sum at order {n} is nonzero"));
        }
    }
    Ok((table, violations))
}

fn run_lowerbound_growth(
    theta: f64,
    m_list: &[u64],
    n_list: &[u64],
) -> Result<(Table, Vec<String>), String> {
    check(theta > 0.0 && theta < 1.0, "--theta must lie in (0, 1)")?;
    check(
        m_list.iter().all(|&m| (1..=8).contains(&m)),
        "--m entries must lie in 1..=8",
    )?;
    check(
        n_list.iter().all(|&n| (1..=65536).contains(&n)),
        "--N entries must lie in 1..=65536",
    )?;
    let mut table = Table::new(vec!["m", "N", "theta", "quasinorm", "bound", "ratio"]);
    let mut violations = Vec::new();
    for &m in m_list {
        for &big_n in n_list {
            let mut coords = vec![FiniteSequence::zero(); m as usize];
            coords.push(FiniteSequence::make_sn(big_n as u32));
            let value = rochberg::rho(&RochbergVector::new(coords, theta).map_err(|e| e.to_string())?);
            let nf = big_n as f64;
            let bound = nf.ln().powi(m as i32) * nf.powf(theta) / factorial(m);
            table.push(vec![
                Cell::UInt(m),
                Cell::UInt(big_n),
                Cell::Float(theta),
                Cell::Float(value),
                Cell::Float(bound),
                Cell::Float(if bound > 0.0 { value / bound } else { f64::INFINITY }),
            ]);
            if !(value >= bound) {
                violations.push(format!(
                    "quasinorm {value:.6} below bound {bound:.6} at m={m}, N={big_n}"
                ));
            }
        }
    }
    Ok((table, violations))
}

fn run_lowerbound_exactness(
    theta: f64,
    trials: u64,
    max_len: u64,
    seed: u64,
) -> Result<(Table, Vec<String>), String> {
    check(theta > 0.0 && theta < 1.0, "--theta must lie in (0, 1)")?;
    check((1..=1_000_000).contains(&trials), "--exactness must be in 1..=1000000")?;
    check((2..=8).contains(&max_len), "--max-len must be in 2..=8")?;
    let mut shapes = Vec::new();
    for n in 1..max_len {
        for k in 1..=(max_len - n) {
            shapes.push((n as usize, k as usize));
        }
    }
    let mut pad_fail = vec![0u64; shapes.len()];
    let mut proj_fail = vec![0u64; shapes.len()];
    let mut counts = vec![0u64; shapes.len()];
    for t in 0..trials {
        let slot = (t % shapes.len() as u64) as usize;
        let (n, k) = shapes[slot];
        counts[slot] += 1;
        let mut rng = seeded(seed, t);
        let y = RochbergVector::random(&mut rng, n, theta, 24, 6).map_err(|e| e.to_string())?;
        if rochberg::rho(&y.pad_below(k)) != rochberg::rho(&y) {
            pad_fail[slot] += 1;
        }
        let v = RochbergVector::random(&mut rng, n + k, theta, 24, 6).map_err(|e| e.to_string())?;
        if !(rochberg::rho(&v.take_bottom(k).map_err(|e| e.to_string())?) <= rochberg::rho(&v)) {
            proj_fail[slot] += 1;
        }
    }
    let mut table = Table::new(vec![
        "n",
        "k",
        "trials",
        "pad_mismatches",
        "projection_violations",
    ]);
    let mut violations = Vec::new();
    for (slot, &(n, k)) in shapes.iter().enumerate() {
        table.push(vec![
            Cell::UInt(n as u64),
            Cell::UInt(k as u64),
            Cell::UInt(counts[slot]),
            Cell::UInt(pad_fail[slot]),
            Cell::UInt(proj_fail[slot]),
        ]);
        if pad_fail[slot] > 0 {
            violations.push(format!("padding changed the quasinorm at n={n}, k={k}"));
        }
        if proj_fail[slot] > 0 {
            violations.push(format!("projection increased the quasinorm at n={n}, k={k}"));
        }
    }
    Ok((table, violations))
}

fn run_type2(m: u64, n_list: &[u64], block_cap: u64) -> Result<(Table, Vec<String>), String> {
    check(m <= 4, "--m must be at most 4")?;
    check(
        n_list.iter().all(|&n| (2..=16).contains(&n)),
        "--n entries must lie in 2..=16",
    )?;
    check((1..=4096).contains(&block_cap), "--block-cap must be in 1..=4096")?;
    let mut table = Table::new(vec!["m", "n", "block_cap", "lower", "upper", "fitted"]);
    let mut violations = Vec::new();
    let mut fitted_all = Vec::new();
    for &n in n_list {
        let report =
            type2::an_lower(m as usize, n as usize, block_cap as u32).map_err(|e| e.to_string())?;
        let fitted = report.lower_bound / (n as f64).log2();
        fitted_all.push(fitted);
        table.push(vec![
            Cell::UInt(m),
            Cell::UInt(n),
            Cell::UInt(block_cap),
            Cell::Float(report.lower_bound),
            Cell::Float(report.recursion_upper),
            Cell::Float(fitted),
        ]);
        if m == 0 && (report.lower_bound - 1.0).abs() > 1e-9 {
            violations.push(format!(
                "square-summable sign average {} differs from 1 at n={n}",
                report.lower_bound
            ));
        }
        if !(report.lower_bound > 0.0) {
            violations.push(format!("witnessed constant not positive at n={n}"));
        }
        if report.lower_bound > report.recursion_upper {
            violations.push(format!(
                "witnessed constant exceeds its recursion bound at n={n}"
            ));
        }
    }
    if m >= 1 && fitted_all.len() >= 2 {
        let lo = fitted_all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = fitted_all.iter().copied().fold(0.0f64, f64::max);
        if !(lo > 0.0 && hi / lo <= 1.5) {
            violations.push(format!(
                "fitted growth constants unstable: spread {:.3} exceeds 1.5",
                hi / lo
            ));
        }
    }
    Ok((table, violations))
}

fn run_quasilin(
    n_list: &[u64],
    trials: u64,
    support: u64,
    theta: f64,
    seed: u64,
) -> Result<(Table, Vec<String>), String> {
    check(theta > 0.0 && theta < 1.0, "--theta must lie in (0, 1)")?;
    check(
        n_list.iter().all(|&n| (1..=6).contains(&n)),
        "--n entries must lie in 1..=6",
    )?;
    check((1..=100_000).contains(&trials), "--trials must be in 1..=100000")?;
    check((1..=65536).contains(&support), "--support must be in 1..=65536")?;
    let mut table = Table::new(vec![
        "n",
        "trials",
        "support",
        "theta",
        "global_max",
        "settled_max",
        "settled_fraction",
    ]);
    let mut violations = Vec::new();
    for &n in n_list {
        let report = rochberg::quasilinearity_experiment(
            n as usize,
            trials as usize,
            support as u32,
            theta,
            seed,
        )
        .map_err(|e| e.to_string())?;
        let running = report.running_max();
        let settled = if trials >= 200 {
            running[(trials - 101) as usize]
        } else {
            report.global_max
        };
        let fraction = if report.global_max > 0.0 {
            settled / report.global_max
        } else {
            1.0
        };
        table.push(vec![
            Cell::UInt(n),
            Cell::UInt(trials),
            Cell::UInt(support),
            Cell::Float(theta),
            Cell::Float(report.global_max),
            Cell::Float(settled),
            Cell::Float(fraction),
        ]);
        if !report.global_max.is_finite() {
            violations.push(format!("defect ratio diverged at n={n}"));
        }
        if trials >= 200 && fraction < 0.9 {
            violations.push(format!(
                "running max still growing in the last 100 trials at n={n} (settled fraction {fraction:.4})"
            ));
        }
    }
    Ok((table, violations))
}

fn run_duality_pairs(
    c_list: &[f64],
    n_list: &[u64],
    pairs: u64,
    samples: u64,
    seed: u64,
) -> Result<(Table, Vec<String>), String> {
    check(
        c_list.iter().all(|&c| c > 0.0 && c < 1.0),
        "--c entries must lie in (0, 1)",
    )?;
    check(
        n_list.iter().all(|&n| (1..=6).contains(&n)),
        "--n entries must lie in 1..=6",
    )?;
    check((1..=100_000).contains(&pairs), "--pairs must be in 1..=100000")?;
    check((8..=65536).contains(&samples), "--samples must be in 8..=65536")?;
    let mut table = Table::new(vec!["c", "n", "pairs", "boundary_samples", "worst_ratio"]);
    let mut violations = Vec::new();
    for (row, &c) in c_list.iter().enumerate() {
        for &n in n_list {
            let n = n as usize;
            let mut worst = 0.0f64;
            for i in 0..pairs {
                let mut rng = seeded(seed, (row as u64) << 40 | (n as u64) << 32 | i);
                let u = FiniteSequence::random_nonzero(&mut rng, 24, 6);
                let v = FiniteSequence::random_nonzero(&mut rng, 24, 6);
                let h = duality::dual_extremal_jet(&u, c, n - 1).map_err(|e| e.to_string())?;
                let g = rochberg::extremal_jet(&v, n - 1, c).map_err(|e| e.to_string())?;
                let tau = duality::holo_pair(&h, &g)
                    .map_err(|e| e.to_string())?
                    .coeff(n - 1)
                    .norm();
                let bound = duality::dual_boundary_sup(&u, c, samples as usize)
                    .map_err(|e| e.to_string())?
                    * duality::primal_boundary_sup(&v, c, samples as usize)
                        .map_err(|e| e.to_string())?
                    / c.min(1.0 - c).powi(n as i32 - 1);
                worst = worst.max(tau / bound);
            }
            table.push(vec![
                Cell::Float(c),
                Cell::UInt(n as u64),
                Cell::UInt(pairs),
                Cell::UInt(samples),
                Cell::Float(worst),
            ]);
            if worst > 1.0 {
                violations.push(format!(
                    "pairing coefficient exceeded the boundary bound at c={c}, n={n}"
                ));
            }
        }
    }
    Ok((table, violations))
}

fn run_duality_certificate(
    c_list: &[f64],
    n_list: &[u64],
    big_n_list: &[u64],
) -> Result<(Table, Vec<String>), String> {
    check(
        c_list.iter().all(|&c| c > 0.0 && c < 1.0),
        "--c entries must lie in (0, 1)",
    )?;
    check(
        n_list.iter().all(|&n| (1..=6).contains(&n)),
        "--n entries must lie in 1..=6",
    )?;
    check(
        big_n_list.iter().all(|&n| (1..=65536).contains(&n)),
        "--N entries must lie in 1..=65536",
    )?;
    let mut table = Table::new(vec!["c", "n", "N", "certificate", "quasinorm", "ratio"]);
    let mut violations = Vec::new();
    for &c in c_list {
        for &n in n_list {
            for &big_n in big_n_list {
                let cert = duality::lb_certificate(big_n as u32, n as usize, c)
                    .map_err(|e| e.to_string())?;
                let mut coords = vec![FiniteSequence::zero(); n as usize - 1];
                coords.push(FiniteSequence::make_sn(big_n as u32));
                let value =
                    rochberg::rho(&RochbergVector::new(coords, c).map_err(|e| e.to_string())?);
                table.push(vec![
                    Cell::Float(c),
                    Cell::UInt(n),
                    Cell::UInt(big_n),
                    Cell::Float(cert),
                    Cell::Float(value),
                    Cell::Float(if cert > 0.0 { value / cert } else { f64::INFINITY }),
                ]);
                if !(cert <= value) {
                    violations.push(format!(
                        "certificate {cert:.6} above quasinorm {value:.6} at c={c}, n={n}, N={big_n}"
                    ));
                }
            }
        }
    }
    Ok((table, violations))
}

fn run_diagrams(which: &str, samples: u64, tol: f64, seed: u64) -> Result<(Table, Vec<String>), String> {
    check((1..=100_000).contains(&samples), "--samples must be in 1..=100000")?;
    check(tol > 0.0, "--tol must be positive")?;
    let kinds: Vec<reparam::DiagramKind> = if which == "all" {
        reparam::DiagramKind::all().to_vec()
    } else {
        vec![reparam::DiagramKind::parse(which).ok_or_else(|| {
            format!("unknown diagram '{which}' (expected poz, Fm2, F2m, FuGz, Tn, or all)")
        })?]
    };
    let mut table = Table::new(vec!["which", "samples", "checks", "max_residual", "tolerance"]);
    let mut violations = Vec::new();
    for kind in kinds {
        let report = reparam::diagram_check(kind, samples as usize, seed);
        table.push(vec![
            Cell::Text(report.which.to_string()),
            Cell::UInt(report.samples as u64),
            Cell::UInt(report.checks as u64),
            Cell::Float(report.max_residual),
            Cell::Float(tol),
        ]);
        if !(report.max_residual <= tol) {
            violations.push(format!(
                "diagram {} residual {:.3e} above tolerance {tol:.3e}",
                report.which, report.max_residual
            ));
        }
    }
    Ok((table, violations))
}

fn run_fdb(
    trials: u64,
    order: u64,
    chain_tol: f64,
    product_tol: f64,
    seed: u64,
) -> Result<(Table, Vec<String>), String> {
    check((1..=100_000).contains(&trials), "--trials must be in 1..=100000")?;
    check((1..=12).contains(&order), "--order must be in 1..=12")?;
    check(chain_tol > 0.0 && product_tol > 0.0, "tolerances must be positive")?;
    let mut table = Table::new(vec!["check", "trials", "order", "residual", "tolerance"]);
    let mut violations = Vec::new();
    let rows = [
        (
            "composition",
            reparam::chain_rule_residual(trials as usize, order as usize, seed),
            chain_tol,
        ),
        (
            "product",
            reparam::leibniz_residual(trials as usize, order as usize, seed),
            product_tol,
        ),
    ];
    for (name, residual, tol) in rows {
        table.push(vec![
            Cell::Text(name.to_string()),
            Cell::UInt(trials),
            Cell::UInt(order),
            Cell::Float(residual),
            Cell::Float(tol),
        ]);
        if !(residual <= tol) {
            violations.push(format!(
                "{name} residual {residual:.3e} above tolerance {tol:.3e}"
            ));
        }
    }
    Ok((table, violations))
}

fn run_zomega(
    r_list: &[f64],
    k_list: &[u64],
    samples: u64,
    support: u64,
    boundary_tol: f64,
    twist_tol: f64,
    seed: u64,
) -> Result<(Table, Vec<String>), String> {
    check(
        r_list.iter().all(|&r| r > 0.0 && r < 0.5),
        "--r entries must lie in (0, 1/2)",
    )?;
    check(
        k_list.iter().all(|&k| (1..=16).contains(&k)),
        "--k entries must lie in 1..=16",
    )?;
    check((16..=1_000_000).contains(&samples), "--samples must be in 16..=1000000")?;
    check((1..=65536).contains(&support), "--support must be in 1..=65536")?;
    check(boundary_tol > 0.0 && twist_tol > 0.0, "tolerances must be positive")?;
    let mut table = Table::new(vec![
        "r",
        "k",
        "samples",
        "support",
        "boundary_residual",
        "offcycle_zero",
        "twist_gap",
    ]);
    let mut violations = Vec::new();
    let mut row = 0u64;
    for &r in r_list {
        for &k in k_list {
            let prof = zomega::OmegaProfile::new(r, k as u32).map_err(|e| e.to_string())?;
            let mut rng = seeded(seed, row);
            row += 1;
            let f = profile_data(&mut rng, support as u32);
            let boundary = zomega::boundary_normalization_residual(&prof, &f, samples as usize)
                .map_err(|e| e.to_string())?;
            let mut offcycle_zero = true;
            for j in 1..=(2 * k as usize + 1) {
                if j % k as usize != 0
                    && !zomega::differential_tau(&prof, &f, j)
                        .map_err(|e| e.to_string())?
                        .is_zero()
                {
                    offcycle_zero = false;
                }
            }
            let twist = f
                .log_ratio(2.0)
                .map_err(|e| e.to_string())?
                .scale_real(2.0 * r);
            let twist_gap = zomega::differential_tau(&prof, &f, k as usize)
                .map_err(|e| e.to_string())?
                .sub(&twist)
                .linf_norm();
            table.push(vec![
                Cell::Float(r),
                Cell::UInt(k),
                Cell::UInt(samples),
                Cell::UInt(support),
                Cell::Float(boundary),
                Cell::Int(offcycle_zero as i64),
                Cell::Float(twist_gap),
            ]);
            if !(boundary <= boundary_tol) {
                violations.push(format!(
                    "boundary residual {boundary:.3e} above tolerance at r={r}, k={k}"
                ));
            }
            if !offcycle_zero {
                violations.push(format!("off-cycle differential nonzero at r={r}, k={k}"));
            }
            if !(twist_gap <= twist_tol) {
                violations.push(format!(
                    "twist gap {twist_gap:.3e} above tolerance at r={r}, k={k}"
                ));
            }
        }
    }
    Ok((table, violations))
}

fn run(cli: &Cli) -> Result<(Table, Vec<String>), String> {
    match &cli.command {
        Command::Algebra { max_n } => run_algebra(*max_n),
        Command::Lowerbound {
            theta,
            m,
            big_n,
            exactness,
            max_len,
        } => match exactness {
            Some(trials) => run_lowerbound_exactness(*theta, *trials, *max_len, cli.seed),
            None => run_lowerbound_growth(*theta, &m.0, &big_n.0),
        },
        Command::Type2 { m, n, block_cap } => run_type2(*m, &n.0, *block_cap),
        Command::Quasilin {
            n,
            trials,
            support,
            theta,
        } => run_quasilin(&n.0, *trials, *support, *theta, cli.seed),
        Command::Duality {
            c,
            n,
            pairs,
            samples,
            certificate,
            big_n,
        } => {
            if *certificate {
                run_duality_certificate(&c.0, &n.0, &big_n.0)
            } else {
                run_duality_pairs(&c.0, &n.0, *pairs, *samples, cli.seed)
            }
        }
        Command::Diagrams {
            which,
            samples,
            tol,
        } => run_diagrams(which, *samples, *tol, cli.seed),
        Command::Fdb {
            trials,
            order,
            chain_tol,
            product_tol,
        } => run_fdb(*trials, *order, *chain_tol, *product_tol, cli.seed),
        Command::Zomega {
            r,
            k,
            samples,
            support,
            boundary_tol,
            twist_tol,
        } => run_zomega(
            &r.0,
            &k.0,
            *samples,
            *support,
            *boundary_tol,
            *twist_tol,
            cli.seed,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(raw) = std::env::var("RLAB_THREADS") {
        let threads: usize = match raw.parse() {
            Ok(t) if t >= 1 => t,
            _ => {
                eprintln!("error: RLAB_THREADS must be a positive integer, got '{raw}'");
                return ExitCode::from(2);
            }
        };
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let (table, violations) = match run(&cli) {
        Ok(result) => result,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let artifact = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &artifact) {
            eprintln!("error: could not write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{artifact}");
    }
    if violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        for v in &violations {
            eprintln!("violated: {v}");
        }
        ExitCode::from(1)
    }
}
