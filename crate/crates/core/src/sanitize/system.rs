use super::cut::{CutStructure, SheetKind};
use crate::error::{Error, Result};
use crate::octa::Vec3;
use crate::topology::Topology;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// One side pair of a cut sheet at a node, or one aligned sector of an
/// align sheet (`minus == plus`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub node: u32,
    pub minus: u32,
    pub plus: u32,
}

#[derive(Clone, Debug)]
pub struct CoreSystem {
    /// Node sectors; sector `node_sectors[i]` owns variables `3i..3i+3`.
    pub node_sectors: Vec<u32>,
    /// Sparse homogeneous rows over the variables.
    pub rows: Vec<Vec<(usize, i64)>>,
    /// Per sheet, its occurrences at nodes; the first is the base.
    pub occurrences: Vec<Vec<Occurrence>>,
}

impl CoreSystem {
    pub fn n_vars(&self) -> usize {
        3 * self.node_sectors.len()
    }

    pub fn var(&self, sector: u32, axis: usize) -> usize {
        3 * self.node_sectors.binary_search(&sector).expect("node sector") + axis
    }
}

pub fn occurrences(topo: &Topology, cs: &CutStructure) -> Vec<Vec<Occurrence>> {
    cs.sheets
        .iter()
        .map(|sheet| {
            let mut occ = BTreeSet::new();
            for &f in &sheet.facets {
                let fr = &topo.facets[f as usize];
                for &v in fr.vertices.iter().filter(|&&v| cs.nodes[v as usize]) {
                    let minus = cs.sectors.of(topo, cs.minus_cell[f as usize], v);
                    let plus = match sheet.kind {
                        SheetKind::Cut => cs.sectors.of(topo, cs.plus_cell(topo, f), v),
                        SheetKind::Align { .. } => minus,
                    };
                    occ.insert(Occurrence { node: v, minus, plus });
                }
            }
            occ.into_iter().collect()
        })
        .collect()
}

/// Transition rows `u⁺_i − u⁺_0 = R (u⁻_i − u⁻_0)` per cut sheet and
/// alignment rows `u_i|k = u_0|k` per align sheet, one per non-base
/// occurrence.
pub fn build_core_system(topo: &Topology, cs: &CutStructure) -> CoreSystem {
    let node_sectors: Vec<u32> = cs.node_list().into_iter().flat_map(|v| cs.sectors.at(v)).collect();
    let occurrences = occurrences(topo, cs);
    let mut sys = CoreSystem { node_sectors, rows: Vec::new(), occurrences: Vec::new() };
    for (sheet, occ) in cs.sheets.iter().zip(&occurrences) {
        let Some(base) = occ.first() else { continue };
        for o in &occ[1..] {
            match sheet.kind {
                SheetKind::Cut => {
                    let m = sheet.rotation.matrix();
                    for a in 0..3 {
                        let mut row = BTreeMap::new();
                        *row.entry(sys.var(o.plus, a)).or_insert(0) += 1;
                        *row.entry(sys.var(base.plus, a)).or_insert(0) -= 1;
                        for (b, &mab) in m[a].iter().enumerate() {
                            if mab != 0 {
                                *row.entry(sys.var(o.minus, b)).or_insert(0) -= mab as i64;
                                *row.entry(sys.var(base.minus, b)).or_insert(0) += mab as i64;
                            }
                        }
                        sys.rows.push(row.into_iter().filter(|&(_, c)| c != 0).collect());
                    }
                }
                SheetKind::Align { axis } => {
                    sys.rows.push(vec![(sys.var(base.minus, axis), -1), (sys.var(o.minus, axis), 1)]);
                    sys.rows.last_mut().unwrap().sort_unstable();
                }
            }
        }
    }
    sys.occurrences = occurrences;
    sys
}

/// Reduced row echelon form over the rationals: pivot columns and, per
/// pivot, the row expressing it through free columns.
struct Rref {
    pivots: Vec<(usize, BTreeMap<usize, BigRational>)>,
}

fn rref(n_vars: usize, rows: &[Vec<(usize, i64)>]) -> Rref {
    let mut rows: Vec<BTreeMap<usize, BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&(c, v)| (c, BigRational::from_integer(BigInt::from(v)))).collect())
        .filter(|r: &BTreeMap<usize, BigRational>| !r.is_empty())
        .collect();
    let mut pivots: Vec<(usize, BTreeMap<usize, BigRational>)> = Vec::new();
    for col in 0..n_vars {
        let Some(pi) = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains_key(&col))
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i)
        else {
            continue;
        };
        let mut p = rows.swap_remove(pi);
        let inv = p[&col].recip();
        for v in p.values_mut() {
            *v *= &inv;
        }
        let eliminate = |r: &mut BTreeMap<usize, BigRational>| {
            if let Some(f) = r.get(&col).cloned() {
                for (&c, v) in &p {
                    let e = r.entry(c).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.remove(&c);
                    }
                }
            }
        };
        rows.iter_mut().for_each(eliminate);
        rows.retain(|r| !r.is_empty());
        for (_, r) in pivots.iter_mut() {
            eliminate(r);
        }
        pivots.push((col, p));
    }
    Rref { pivots }
}

/// Exact node sector values: free variables snapped to a grid fine enough
/// that every implied variable is an integer multiple of `2^e` and thus an
/// exact `f64`. Returns values per node sector and the grid `2^e`.
pub fn solve_exact(sys: &CoreSystem, init: &[Vec3]) -> Result<(Vec<Vec3>, f64)> {
    let n = sys.n_vars();
    let x0: Vec<f64> = init.iter().flat_map(|p| [p.x, p.y, p.z]).collect();
    assert_eq!(x0.len(), n);
    let maxabs = x0.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let h = grid(maxabs);
    let rr = rref(n, &sys.rows);
    let mut denom = BigInt::one();
    for (_, r) in &rr.pivots {
        for v in r.values() {
            denom = denom.lcm(v.denom());
        }
    }
    let d = denom.to_f64().filter(|d| *d < 2f64.powi(20)).ok_or_else(|| {
        Error::Unsupported(format!("core system denominator {denom} is too large for an exact snap"))
    })?;
    let is_pivot: BTreeSet<usize> = rr.pivots.iter().map(|(c, _)| *c).collect();
    // integer multiples of h
    let mut m: Vec<BigInt> = vec![BigInt::zero(); n];
    for j in (0..n).filter(|j| !is_pivot.contains(j)) {
        let k = (x0[j] / (d * h)).round();
        m[j] = BigInt::from(k as i64) * &denom;
    }
    for (c, r) in &rr.pivots {
        let mut acc = BigRational::zero();
        for (&j, v) in r {
            if j != *c {
                acc -= v * BigRational::from_integer(m[j].clone());
            }
        }
        debug_assert!(acc.is_integer());
        m[*c] = acc.to_integer();
    }
    let limit = BigInt::from(1u64 << 53);
    let mut out = Vec::with_capacity(n);
    for k in &m {
        if k.abs() >= limit {
            return Err(Error::Unsupported("snapped node value exceeds the f64 mantissa".into()));
        }
        out.push(k.to_f64().unwrap() * h);
    }
    Ok((out.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect(), h))
}

/// Power of two `2^(ceil(log2 maxabs) - 30)`.
pub fn grid(maxabs: f64) -> f64 {
    2f64.powi(maxabs.max(1.0).log2().ceil() as i32 - 30)
}

/// Residual of every row at `values`, evaluated in floating point.
pub fn residuals(sys: &CoreSystem, values: &[Vec3]) -> Vec<f64> {
    sys.rows
        .iter()
        .map(|r| r.iter().map(|&(c, k)| k as f64 * values[c / 3][c % 3]).sum())
        .collect()
}
