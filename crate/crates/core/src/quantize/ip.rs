use crate::complex::{BlockType, MotorcycleComplex};
use crate::error::{Error, Result};
use rand::Rng;

/// Integer arc lengths `ℓ_a ≥ 1` making every wall a rectangle with equal
/// opposite sides, closest to `s` times the parametric lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationProblem {
    /// Parametric length of each arc.
    pub lengths: Vec<f64>,
    /// Sides `A0..A3` of each wall.
    pub sides: Vec<[Vec<u32>; 4]>,
    pub scale: f64,
}

impl QuantizationProblem {
    pub fn n_vars(&self) -> usize {
        self.lengths.len()
    }

    pub fn target(&self, a: usize) -> f64 {
        self.scale * self.lengths[a]
    }

    /// Constraint rows as `(lhs arcs, rhs arcs)`, two per wall.
    pub fn rows(&self) -> Vec<(&[u32], &[u32])> {
        self.sides.iter().flat_map(|s| [(&s[0][..], &s[2][..]), (&s[1][..], &s[3][..])]).collect()
    }

    /// `lhs − rhs` of every row.
    pub fn residuals(&self, l: &[i64]) -> Vec<i64> {
        let sum = |arcs: &[u32]| arcs.iter().map(|&a| l[a as usize]).sum::<i64>();
        self.rows().iter().map(|(a, b)| sum(a) - sum(b)).collect()
    }

    pub fn objective(&self, l: &[i64]) -> f64 {
        l.iter().enumerate().map(|(a, &x)| (x as f64 - self.target(a)).powi(2)).sum()
    }

    pub fn is_feasible(&self, l: &[i64]) -> bool {
        l.len() == self.n_vars() && l.iter().all(|&x| x >= 1) && self.residuals(l).iter().all(|&r| r == 0)
    }
}

/// Quantization problem over the arcs of a cuboid complex.
pub fn build_ip(mc: &MotorcycleComplex, s: f64) -> Result<QuantizationProblem> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::Precondition(format!("scale {s} must be finite and non-negative")));
    }
    if let Some(b) = mc.blocks.iter().position(|b| b.kind != Some(BlockType::Cuboid)) {
        return Err(Error::Precondition(format!("block {b} is not a cuboid")));
    }
    let mut sides = Vec::with_capacity(mc.walls.len());
    for (i, w) in mc.walls.iter().enumerate() {
        if w.annulus {
            return Err(Error::Precondition(format!("wall {i} is an annulus")));
        }
        let s = w.sides.clone().ok_or_else(|| Error::Precondition(format!("wall {i} is not a rectangle")))?;
        sides.push(s);
    }
    Ok(QuantizationProblem { lengths: mc.arcs.iter().map(|a| a.length).collect(), sides, scale: s })
}

/// Random feasible problem with `n` arcs: a planted integer solution, walls
/// whose opposite sides have equal planted sums, and noisy lengths.
pub fn random_problem(rng: &mut impl Rng, n: usize, n_walls: usize) -> QuantizationProblem {
    let planted: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let lengths = planted.iter().map(|&x| x as f64 * rng.gen_range(0.6..1.4)).collect();
    let mut sides = Vec::new();
    let mut attempts = 0;
    while sides.len() < n_walls && attempts < 1000 {
        attempts += 1;
        let mut pick = || {
            let k = rng.gen_range(1..=2.min(n));
            let mut s: Vec<u32> = Vec::new();
            while s.len() < k {
                let a = rng.gen_range(0..n as u32);
                if !s.contains(&a) {
                    s.push(a);
                }
            }
            s
        };
        let w: [Vec<u32>; 4] = [pick(), pick(), pick(), pick()];
        let sum = |s: &[u32]| s.iter().map(|&a| planted[a as usize]).sum::<i64>();
        if sum(&w[0]) == sum(&w[2]) && sum(&w[1]) == sum(&w[3]) {
            sides.push(w);
        }
    }
    QuantizationProblem { lengths, sides, scale: rng.gen_range(0.0..3.0) }
}
