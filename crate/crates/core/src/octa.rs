//! The octahedral rotation group and rigid chart transitions built on it.
//!
//! Rotations are signed permutation matrices with determinant +1. They are
//! kept as indices into a table of 24 entries sorted so that index 0 is the
//! identity; composition and inversion are precomputed table lookups.

use nalgebra::Vector3;
use std::sync::OnceLock;

pub type Vec3 = Vector3<f64>;

/// One of the 24 orientation-preserving signed permutation matrices.
///
/// Row `i` of the matrix has a single nonzero entry `sign[i]` in column
/// `perm[i]`, so `(R v)[i] = sign[i] * v[perm[i]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation(u8);

#[derive(Clone, Copy, Debug)]
struct Entry {
    perm: [u8; 3],
    sign: [i8; 3],
}

struct Tables {
    entries: [Entry; 24],
    compose: [[u8; 24]; 24],
    inverse: [u8; 24],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

fn matrix_of(e: &Entry) -> [[i8; 3]; 3] {
    let mut m = [[0i8; 3]; 3];
    for i in 0..3 {
        m[i][e.perm[i] as usize] = e.sign[i];
    }
    m
}

fn det3(m: &[[i8; 3]; 3]) -> i32 {
    let m = |i: usize, j: usize| m[i][j] as i32;
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

fn build_tables() -> Tables {
    const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut list = Vec::with_capacity(24);
    for perm in PERMS {
        for bits in 0..8u8 {
            let sign = [
                if bits & 4 == 0 { 1 } else { -1 },
                if bits & 2 == 0 { 1 } else { -1 },
                if bits & 1 == 0 { 1 } else { -1 },
            ];
            let e = Entry { perm, sign };
            if det3(&matrix_of(&e)) == 1 {
                list.push(e);
            }
        }
    }
    assert_eq!(list.len(), 24);
    let entries: [Entry; 24] = list.try_into().unwrap();
    let mats: Vec<[[i8; 3]; 3]> = entries.iter().map(matrix_of).collect();
    let find = |m: &[[i8; 3]; 3]| mats.iter().position(|x| x == m).unwrap() as u8;
    let mut compose = [[0u8; 24]; 24];
    let mut inverse = [0u8; 24];
    for a in 0..24 {
        for b in 0..24 {
            let mut p = [[0i8; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    p[i][j] = (0..3).map(|k| mats[a][i][k] * mats[b][k][j]).sum();
                }
            }
            compose[a][b] = find(&p);
        }
        let mut t = [[0i8; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = mats[a][j][i];
            }
        }
        inverse[a] = find(&t);
    }
    Tables { entries, compose, inverse }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation(0);

    pub fn all() -> impl Iterator<Item = Rotation> {
        (0..24u8).map(Rotation)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Rotation {
        assert!(i < 24);
        Rotation(i as u8)
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Rotation) -> Rotation {
        Rotation(tables().compose[self.index()][other.index()])
    }

    pub fn inverse(self) -> Rotation {
        Rotation(tables().inverse[self.index()])
    }

    pub fn matrix(self) -> [[i8; 3]; 3] {
        matrix_of(&tables().entries[self.index()])
    }

    pub fn apply(self, v: &Vec3) -> Vec3 {
        let e = &tables().entries[self.index()];
        Vec3::new(
            e.sign[0] as f64 * v[e.perm[0] as usize],
            e.sign[1] as f64 * v[e.perm[1] as usize],
            e.sign[2] as f64 * v[e.perm[2] as usize],
        )
    }

    pub fn apply_i64(self, v: [i64; 3]) -> [i64; 3] {
        let e = &tables().entries[self.index()];
        [
            e.sign[0] as i64 * v[e.perm[0] as usize],
            e.sign[1] as i64 * v[e.perm[1] as usize],
            e.sign[2] as i64 * v[e.perm[2] as usize],
        ]
    }

    /// Image of the basis vector `e_axis`: returns `(axis', sign)` with
    /// `R e_axis = sign * e_axis'`.
    pub fn map_axis(self, axis: usize) -> (usize, f64) {
        let e = &tables().entries[self.index()];
        let row = (0..3).find(|&i| e.perm[i] as usize == axis).unwrap();
        (row, e.sign[row] as f64)
    }

    /// Trace of the matrix; 3 for the identity, 1 for quarter turns,
    /// -1 for half turns about a coordinate axis, 0 for thirds.
    pub fn trace(self) -> i32 {
        let m = self.matrix();
        (m[0][0] + m[1][1] + m[2][2]) as i32
    }

    /// Rotation axis as an integer vector (unnormalized), zero for identity
    /// and for half turns (where it is ambiguous up to sign).
    pub fn axial_vector(self) -> [i32; 3] {
        let m = self.matrix();
        [
            (m[2][1] - m[1][2]) as i32,
            (m[0][2] - m[2][0]) as i32,
            (m[1][0] - m[0][1]) as i32,
        ]
    }

    /// Best-fitting rotation carrying each `src[i]` to `dst[i]`, with the
    /// residual (max abs component deviation). Ties pick the lowest index.
    pub fn fit(src: &[Vec3], dst: &[Vec3]) -> (Rotation, f64) {
        let mut best = (Rotation::IDENTITY, f64::INFINITY);
        for r in Rotation::all() {
            let res = src
                .iter()
                .zip(dst)
                .map(|(s, d)| (r.apply(s) - d).amax())
                .fold(0.0, f64::max);
            if res < best.1 {
                best = (r, res);
            }
        }
        best
    }
}

/// Rigid chart transition `p ↦ R p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl Transition {
    pub fn identity() -> Self {
        Transition { rotation: Rotation::IDENTITY, translation: Vec3::zeros() }
    }

    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        Transition { rotation, translation }
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation.apply(v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Transition) -> Transition {
        Transition {
            rotation: self.rotation.compose(other.rotation),
            translation: self.rotation.apply(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Transition {
        let inv = self.rotation.inverse();
        Transition { rotation: inv, translation: -inv.apply(&self.translation) }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.rotation.is_identity() && self.translation.amax() <= tol
    }

    /// Fit a transition from corresponding point sets. The rotation is fit on
    /// difference vectors relative to the first point; the translation is
    /// averaged over all points. Returns the transition and the max residual.
    pub fn fit(src: &[Vec3], dst: &[Vec3]) -> (Transition, f64) {
        assert!(!src.is_empty() && src.len() == dst.len());
        let ds: Vec<Vec3> = src.iter().skip(1).map(|p| p - src[0]).collect();
        let dd: Vec<Vec3> = dst.iter().skip(1).map(|p| p - dst[0]).collect();
        let (rotation, _) = Rotation::fit(&ds, &dd);
        let mut t = Vec3::zeros();
        for (s, d) in src.iter().zip(dst) {
            t += d - rotation.apply(s);
        }
        t /= src.len() as f64;
        let tr = Transition { rotation, translation: t };
        let res = src.iter().zip(dst).map(|(s, d)| (tr.apply(s) - d).amax()).fold(0.0, f64::max);
        (tr, res)
    }

    /// Exact transition from corresponding points: the rotation must map
    /// difference vectors exactly and the translation is read off the first
    /// point. `None` if no rotation matches exactly.
    pub fn fit_exact(src: &[Vec3], dst: &[Vec3]) -> Option<Transition> {
        let ds: Vec<Vec3> = src.iter().skip(1).map(|p| p - src[0]).collect();
        let dd: Vec<Vec3> = dst.iter().skip(1).map(|p| p - dst[0]).collect();
        let rotation = Rotation::all().find(|r| ds.iter().zip(&dd).all(|(s, d)| r.apply(s) == *d))?;
        let translation = dst[0] - rotation.apply(&src[0]);
        let tr = Transition { rotation, translation };
        src.iter().zip(dst).all(|(s, d)| tr.apply(s) == *d).then_some(tr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_closure_is_exhaustive() {
        let mats: Vec<_> = Rotation::all().map(|r| r.matrix()).collect();
        for a in Rotation::all() {
            for b in Rotation::all() {
                let c = a.compose(b);
                let (ma, mb) = (a.matrix(), b.matrix());
                let mut p = [[0i8; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        p[i][j] = (0..3).map(|k| ma[i][k] * mb[k][j]).sum();
                    }
                }
                assert_eq!(c.matrix(), p);
                assert!(mats.contains(&p));
            }
            assert!(a.compose(a.inverse()).is_identity());
            assert_eq!(det3(&a.matrix()), 1);
        }
    }

    #[test]
    fn identity_is_index_zero() {
        assert_eq!(Rotation::IDENTITY.matrix(), [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    }

    #[test]
    fn transition_round_trip() {
        let r = Rotation::all().nth(7).unwrap();
        let t = Transition::new(r, Vec3::new(1.0, -2.0, 0.5));
        let p = Vec3::new(0.25, 3.0, -1.0);
        assert_eq!(t.inverse().apply(&t.apply(&p)), p);
        assert!(t.compose(&t.inverse()).is_identity(0.0));
    }

    #[test]
    fn fit_quarter_turn_about_w() {
        // (u, v, w) -> (-v, u, w) + (1, 0, 0)
        let rot = Rotation::all()
            .find(|r| r.apply(&Vec3::new(1.0, 0.0, 0.0)) == Vec3::new(0.0, 1.0, 0.0) && r.apply(&Vec3::z()) == Vec3::z())
            .unwrap();
        let tr = Transition::new(rot, Vec3::new(1.0, 0.0, 0.0));
        let src = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 1.0)];
        let dst: Vec<Vec3> = src.iter().map(|p| tr.apply(p)).collect();
        assert_eq!(Transition::fit_exact(&src, &dst), Some(tr));
        assert_eq!(rot.trace(), 1);
        assert_eq!(rot.axial_vector(), [0, 0, 2]);
    }
}
