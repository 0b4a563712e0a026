use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::components::ComponentSolution;
use crate::numerics::Rational;

/// True when `α₁·x = α₂·y` for some integers `1 ≤ α₁, α₂ ≤ psi`.
///
/// With `x/y = a/b` in lowest terms every solution is a multiple of `(b, a)`,
/// so the pair is aligned exactly when `a ≤ psi` and `b ≤ psi`.
pub fn is_aligned(x: &Rational, y: &Rational, psi: u64) -> bool {
    if !x.is_positive() || !y.is_positive() {
        return false;
    }
    let q = x / y;
    let fits = |v: &num_bigint::BigInt| v.to_u64().is_some_and(|v| v <= psi);
    fits(q.numer()) && fits(q.denom())
}

/// One representative per active segment, as multipliers of `tmin`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentativeSet {
    representatives: Vec<(usize, Rational)>,
    components: Vec<Vec<usize>>,
    psi: u64,
    collisions: Vec<(usize, usize)>,
}

impl RepresentativeSet {
    /// `(segment, R̂)` sorted by segment.
    pub fn representatives(&self) -> &[(usize, Rational)] {
        &self.representatives
    }

    pub fn get(&self, segment: usize) -> Option<&Rational> {
        self.representatives
            .binary_search_by_key(&segment, |(s, _)| *s)
            .ok()
            .map(|i| &self.representatives[i].1)
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn psi(&self) -> u64 {
        self.psi
    }

    /// Cross-component segment pairs that ended up aligned because both
    /// components were tight.
    pub fn collisions(&self) -> &[(usize, usize)] {
        &self.collisions
    }

    /// Distinct representative values, ascending.
    pub fn distinct_values(&self) -> Vec<Rational> {
        let mut values: Vec<Rational> =
            self.representatives.iter().map(|(_, r)| r.clone()).collect();
        values.sort();
        values.dedup();
        values
    }
}

struct Fixed {
    segment: usize,
    value: Rational,
}

/// Picks source values so that every component meets its interval and no two
/// components are aligned.
///
/// Tight components are forced; loose ones take the midpoint of the widest
/// gap between forbidden source values.
pub fn choose_representatives(components: &[ComponentSolution], psi: u64) -> RepresentativeSet {
    let mut order: Vec<usize> = (0..components.len()).filter(|&i| components[i].is_tight()).collect();
    order.extend((0..components.len()).filter(|&i| !components[i].is_tight()));

    let mut fixed: Vec<Fixed> = Vec::new();
    let mut collisions = Vec::new();
    for &ci in &order {
        let comp = &components[ci];
        let source = if comp.is_tight() {
            comp.lower.clone()
        } else {
            choose_loose(comp, &fixed, psi)
        };
        let mut placed = Vec::with_capacity(comp.betas.values.len());
        for (segment, beta) in &comp.betas.values {
            let value = beta * &source;
            if comp.is_tight() {
                for f in &fixed {
                    if is_aligned(&value, &f.value, psi) {
                        collisions.push((f.segment.min(*segment), f.segment.max(*segment)));
                    }
                }
            }
            placed.push(Fixed { segment: *segment, value });
        }
        fixed.extend(placed);
    }

    let mut representatives: Vec<(usize, Rational)> =
        fixed.into_iter().map(|f| (f.segment, f.value)).collect();
    representatives.sort_by_key(|(s, _)| *s);
    collisions.sort_unstable();
    collisions.dedup();
    RepresentativeSet {
        representatives,
        components: components.iter().map(|c| c.vertices.clone()).collect(),
        psi,
        collisions,
    }
}

fn misaligned_with_fixed(comp: &ComponentSolution, source: &Rational, fixed: &[Fixed], psi: u64) -> bool {
    comp.betas.values.iter().all(|(_, beta)| {
        let value = beta * source;
        fixed.iter().all(|f| !is_aligned(&value, &f.value, psi))
    })
}

fn choose_loose(comp: &ComponentSolution, fixed: &[Fixed], psi: u64) -> Rational {
    let (lo, hi) = (&comp.lower, &comp.upper);
    if fixed.is_empty() {
        return (lo + hi) / Rational::from_integer(2);
    }
    // source values r with β·r = (a/b)·R̂ are c·a/b for c = R̂/β
    let scales: Vec<Rational> = comp
        .betas
        .values
        .iter()
        .flat_map(|(_, beta)| fixed.iter().map(move |f| &f.value / beta))
        .collect();
    let (lo_f, hi_f) = (lo.to_f64(), hi.to_f64());
    let mut points: Vec<(f64, usize, u64, u64)> = Vec::new();
    for (p, c) in scales.iter().enumerate() {
        let c_f = c.to_f64();
        for b in 1..=psi {
            let first = (libm::floor(b as f64 * lo_f / c_f) as u64).saturating_sub(1).max(1);
            let last = (libm::ceil(b as f64 * hi_f / c_f) as u64).saturating_add(1).min(psi);
            for a in first..=last {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let r = c_f * a as f64 / b as f64;
                if r > lo_f && r < hi_f {
                    points.push((r, p, a, b));
                }
            }
        }
    }
    points.sort_by(|x, y| x.0.total_cmp(&y.0));

    let exact = |i: usize| -> Rational {
        // 0 and points.len()+1 are the interval endpoints
        if i == 0 {
            lo.clone()
        } else if i == points.len() + 1 {
            hi.clone()
        } else {
            let (_, p, a, b) = points[i - 1];
            &scales[p] * &Rational::ratio(a as i64, b as i64)
        }
    };
    let at = |i: usize| -> f64 {
        if i == 0 {
            lo_f
        } else if i == points.len() + 1 {
            hi_f
        } else {
            points[i - 1].0
        }
    };
    let mut best = 0;
    let mut width = f64::NEG_INFINITY;
    for i in 0..=points.len() {
        let w = at(i + 1) - at(i);
        if w > width {
            width = w;
            best = i;
        }
    }
    let mid = (exact(best) + exact(best + 1)) / Rational::from_integer(2);
    if misaligned_with_fixed(comp, &mid, fixed, psi) && *lo < mid && mid < *hi {
        return mid;
    }
    choose_loose_exact(comp, &scales, fixed, psi)
}

/// Slow path with every forbidden value held exactly.
fn choose_loose_exact(comp: &ComponentSolution, scales: &[Rational], fixed: &[Fixed], psi: u64) -> Rational {
    let (lo, hi) = (&comp.lower, &comp.upper);
    let mut points = alloc::vec![lo.clone(), hi.clone()];
    for c in scales {
        let window_lo = lo / c;
        let window_hi = hi / c;
        for b in 1..=psi {
            let bq = Rational::from_integer(b);
            let first = (&window_lo * &bq).ceil().to_u64().unwrap_or(u64::MAX).max(1);
            let last = (&window_hi * &bq).floor().to_u64().unwrap_or(0).min(psi);
            for a in first..=last {
                if a.gcd(&b) == 1 {
                    points.push(c * &Rational::ratio(a as i64, b as i64));
                }
            }
        }
    }
    points.sort();
    points.dedup();
    let mut best = 0;
    let mut width: Option<Rational> = None;
    for i in 0..points.len() - 1 {
        let w = &points[i + 1] - &points[i];
        if width.as_ref().is_none_or(|cur| w > *cur) {
            width = Some(w);
            best = i;
        }
    }
    let mid = (&points[best] + &points[best + 1]) / Rational::from_integer(2);
    debug_assert!(misaligned_with_fixed(comp, &mid, fixed, psi));
    mid
}
