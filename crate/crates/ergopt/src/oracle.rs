//! Brute-force certification of the maximal ergodic value through periodic
//! orbits.
//!
//! For the doubling map the points of period `p` are exactly the rationals
//! `k/(2^p - 1)`, so orbits are enumerated as cyclic classes of numerators —
//! no floating-point orbit iteration, no drift. For iterated function
//! systems the orbits of branch words are found by composing the Moebius
//! branch maps and solving the resulting quadratic fixed-point equation,
//! which stays exact even for parabolic words (an iterative fixed-point
//! search converges like `1/n` there and would poison the certificate).
//!
//! The best Birkhoff average over all periods up to `p_max` is a rigorous
//! lower bound for `m(A)`.

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::systems::{BranchSystem, ForwardKind};

/// A periodic orbit: `points[i+1] = T(points[i])` cyclically, and `word[i]`
/// is the branch whose image contains `points[i]`.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<f64>,
    pub word: Vec<usize>,
}

/// An orbit together with its time average of `A` — a certified lower bound
/// for `m(A)`.
#[derive(Debug, Clone)]
pub struct OrbitCertificate {
    pub period: usize,
    pub points: Vec<f64>,
    pub word: Vec<usize>,
    pub birkhoff_average: f64,
}

/// Maximum supported period for doubling-orbit enumeration.
pub const MAX_DOUBLING_PERIOD: usize = 20;

/// All cyclic classes of fixed points of `T^p` for the doubling map, one
/// representative orbit per class, labeled with its exact period (a divisor
/// of `p`). The class point counts sum to `2^p - 1`.
pub fn doubling_orbits(p: usize) -> Result<Vec<PeriodicOrbit>> {
    if !(1..=MAX_DOUBLING_PERIOD).contains(&p) {
        return Err(Error::Parameter(format!(
            "period must be in 1..={MAX_DOUBLING_PERIOD}, got {p}"
        )));
    }
    let modulus: u64 = (1u64 << p) - 1;
    let mut seen = vec![false; modulus as usize];
    let mut orbits = Vec::new();
    for k in 0..modulus {
        if seen[k as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = k;
        loop {
            seen[j as usize] = true;
            cycle.push(j);
            j = (2 * j) % modulus;
            if j == k {
                break;
            }
        }
        let points: Vec<f64> = cycle.iter().map(|&n| n as f64 / modulus as f64).collect();
        let word: Vec<usize> = cycle
            .iter()
            .map(|&n| usize::from(2 * n >= modulus))
            .collect();
        orbits.push(PeriodicOrbit {
            period: cycle.len(),
            points,
            word,
        });
    }
    // p = 1 has modulus 1 and the fixed point 0 escapes the loop above
    if modulus == 1 && orbits.is_empty() {
        orbits.push(PeriodicOrbit {
            period: 1,
            points: vec![0.0],
            word: vec![0],
        });
    }
    Ok(orbits)
}

/// True when `word` is the lexicographically smallest among its rotations
/// and is not a repetition of a shorter word.
fn is_primitive_necklace(word: &[usize]) -> bool {
    let p = word.len();
    for shift in 1..p {
        let rotated = (0..p).map(|i| word[(i + shift) % p]);
        match rotated.cmp(word.iter().copied()) {
            std::cmp::Ordering::Less => return false,  // not minimal
            std::cmp::Ordering::Equal => return false, // not primitive
            std::cmp::Ordering::Greater => {}
        }
    }
    true
}

/// Periodic orbit of an IFS branch word: `points[i]` is the fixed point of
/// `tau_{w_i} ∘ ... ∘ tau_{w_{i+p-1}}`, solved exactly from the composed
/// Moebius map. Returns `None` when a rotation has no admissible fixed point
/// (a degenerate, non-contracting word).
fn ifs_word_orbit(sys: &BranchSystem, word: &[usize]) -> Option<Vec<f64>> {
    let p = word.len();
    let mut points = Vec::with_capacity(p);
    for start in 0..p {
        let mut comp = sys.branches[word[start]].map;
        for step in 1..p {
            comp = comp.compose(&sys.branches[word[(start + step) % p]].map);
        }
        let first = &sys.branches[word[start]];
        let candidates = comp.fixed_points_in_unit();
        let fixed = candidates
            .iter()
            .copied()
            .find(|&x| first.contains(x))
            .or_else(|| candidates.first().copied())?;
        points.push(fixed);
    }
    Some(points)
}

/// Best Birkhoff average over all periodic orbits of period `<= p_max`.
///
/// Doubling systems use the exact rational enumeration; systems driven by
/// branch words (the Farey-like map included, so its parabolic endpoint
/// orbits are certified exactly) enumerate primitive necklaces in the
/// branch alphabet.
pub fn best_periodic_value(
    pot: &Potential,
    sys: &BranchSystem,
    p_max: usize,
) -> Result<OrbitCertificate> {
    if p_max < 1 {
        return Err(Error::Parameter("p_max must be >= 1".into()));
    }
    let mut best: Option<OrbitCertificate> = None;
    let mut consider = |cert: OrbitCertificate| {
        let better = match &best {
            Some(b) => cert.birkhoff_average > b.birkhoff_average + 1e-14,
            None => true,
        };
        if better {
            best = Some(cert);
        }
    };

    let doubling = matches!(
        sys.forward,
        Some(ForwardKind::DoublingPeriodic) | Some(ForwardKind::DoublingInterval)
    );

    if doubling {
        for p in 1..=p_max.min(MAX_DOUBLING_PERIOD) {
            for orbit in doubling_orbits(p)? {
                if orbit.period != p {
                    continue; // already seen at its exact period
                }
                let avg = birkhoff(pot, &orbit.points)?;
                consider(OrbitCertificate {
                    period: orbit.period,
                    points: orbit.points,
                    word: orbit.word,
                    birkhoff_average: avg,
                });
            }
        }
    } else {
        let b = sys.branches.len();
        for p in 1..=p_max {
            let total = b.pow(p as u32);
            for code in 0..total {
                let mut word = Vec::with_capacity(p);
                let mut c = code;
                for _ in 0..p {
                    word.push(c % b);
                    c /= b;
                }
                if !is_primitive_necklace(&word) {
                    continue;
                }
                let Some(points) = ifs_word_orbit(sys, &word) else {
                    eprintln!("warning: skipping degenerate branch word {word:?}");
                    continue;
                };
                if points.iter().any(|&x| !pot.in_domain(x)) {
                    continue;
                }
                let avg = birkhoff(pot, &points)?;
                consider(OrbitCertificate {
                    period: p,
                    points,
                    word,
                    birkhoff_average: avg,
                });
            }
        }
    }

    best.ok_or_else(|| Error::Parameter("no periodic orbit found".into()))
}

fn birkhoff(pot: &Potential, points: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in points {
        sum += pot.eval(x)?;
    }
    Ok(sum / points.len() as f64)
}
