//! Exact decomposition of a 3×3 unitary into two-level Householder
//! reflections and a diagonal phase.

use num_complex::Complex;
use thiserror::Error;

use crate::ball::Ball;

pub type CBall = Complex<Ball>;
pub type Matrix3 = [[CBall; 3]; 3];

#[derive(Debug, Error, PartialEq)]
pub enum HouseholderError {
    #[error("matrix is not unitary: ‖U†U - I‖ = {0:e}")]
    NotUnitary(f64),
}

/// `I - 2|u⟩⟨u|` with `u` supported on `levels`.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub levels: (usize, usize),
    /// Unit vector components on `levels.0` and `levels.1`.
    pub u: [CBall; 2],
}

impl Reflection {
    /// Reflection about the basis state `|j⟩`.
    pub fn about_basis(j: usize, prec: u32) -> Self {
        let other = if j == 0 { 1 } else { 0 };
        Reflection { levels: (j, other), u: [cone(prec), czero(prec)] }
    }

    pub fn matrix(&self, prec: u32) -> Matrix3 {
        let mut m = identity(prec);
        let idx = [self.levels.0, self.levels.1];
        let two = Ball::from_i64(2, prec);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                let t = self.u[a].clone() * self.u[b].conj();
                m[i][j] = m[i][j].clone() - t.scale(two.clone());
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `U = R_1 ⋯ R_m · diag(phase)`.
    pub reflections: Vec<Reflection>,
    pub phase: [CBall; 3],
}

impl Decomposition {
    pub fn reconstruct(&self, prec: u32) -> Matrix3 {
        let mut m = identity(prec);
        for r in &self.reflections {
            m = matmul(&m, &r.matrix(prec));
        }
        for row in m.iter_mut() {
            for (x, p) in row.iter_mut().zip(&self.phase) {
                *x = x.clone() * p.clone();
            }
        }
        m
    }
}

fn czero(prec: u32) -> CBall {
    Complex::new(Ball::from_i64(0, prec), Ball::from_i64(0, prec))
}

fn cone(prec: u32) -> CBall {
    Complex::new(Ball::from_i64(1, prec), Ball::from_i64(0, prec))
}

pub fn identity(prec: u32) -> Matrix3 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { cone(prec) } else { czero(prec) }))
}

pub fn matmul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(czero(a[0][0].re.precision()), |s, k| s + a[i][k].clone() * b[k][j].clone()))
    })
}

pub fn adjoint(a: &Matrix3) -> Matrix3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

/// Largest entry modulus of `a - b`, as an upper bound.
pub fn max_diff(a: &Matrix3, b: &Matrix3) -> f64 {
    let mut worst = 0f64;
    for i in 0..3 {
        for j in 0..3 {
            let d = a[i][j].clone() - b[i][j].clone();
            worst = worst.max(upper(&d.norm_sqr()).sqrt());
        }
    }
    worst
}

fn upper(b: &Ball) -> f64 {
    num_traits::ToPrimitive::to_f64(&b.upper()).unwrap_or(f64::INFINITY)
}

/// Upper bound on `|z|`, avoiding the radius blow-up of `sqrt` near zero.
fn abs_upper(z: &CBall) -> f64 {
    upper(&z.norm_sqr()).sqrt()
}

fn abs(z: &CBall) -> Ball {
    z.norm_sqr().sqrt()
}

/// Splits `U` into at most six two-level reflections and a diagonal.
///
/// Three reflections on levels (1,2), (0,1), (1,2) bring `U` to diagonal
/// form; each diagonal entry within `tol` of `-1` becomes a reflection about
/// its basis state. Input must be unitary within `tol`.
pub fn decompose_su3(u: &Matrix3, tol: f64) -> Result<Decomposition, HouseholderError> {
    let prec = u[0][0].re.precision();
    let dev = max_diff(&matmul(&adjoint(u), u), &identity(prec));
    if dev > tol {
        return Err(HouseholderError::NotUnitary(dev));
    }
    let mut m = u.clone();
    let mut reflections = Vec::new();
    for (col, (i, j)) in [(0, (1, 2)), (0, (0, 1)), (1, (1, 2))] {
        let x = [m[i][col].clone(), m[j][col].clone()];
        if abs_upper(&x[1]) <= tiny(prec) {
            continue;
        }
        let r = eliminating(&x, (i, j), prec);
        m = matmul(&r.matrix(prec), &m);
        reflections.push(r);
    }
    let phase: [CBall; 3] = std::array::from_fn(|i| m[i][i].clone());
    let mut out = phase.clone();
    let minus_one = -cone(prec);
    for (j, p) in phase.iter().enumerate() {
        let d = p.clone() - minus_one.clone();
        if abs_upper(&d) <= tol {
            reflections.push(Reflection::about_basis(j, prec));
            out[j] = -p.clone();
        }
    }
    Ok(Decomposition { reflections, phase: out })
}

/// Entries below this are treated as already eliminated.
fn tiny(prec: u32) -> f64 {
    2f64.powi(-(prec as i32 / 2).min(1000))
}

/// Reflection sending `x` to `(-e^{i·arg x0}·|x|, 0)`.
fn eliminating(x: &[CBall; 2], levels: (usize, usize), prec: u32) -> Reflection {
    let nx = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
    let ph = if abs_upper(&x[0]) <= tiny(prec) {
        cone(prec)
    } else {
        x[0].clone().unscale(abs(&x[0]))
    };
    let y0 = -ph.scale(nx);
    let v = [x[0].clone() - y0, x[1].clone()];
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    Reflection { levels, u: [v[0].clone().unscale(nv.clone()), v[1].clone().unscale(nv)] }
}

/// A Haar-random unitary from a Gaussian matrix by Gram-Schmidt.
pub fn haar_random(rng: &mut impl rand::Rng, prec: u32) -> Matrix3 {
    let mut cols: Vec<[CBall; 3]> = Vec::new();
    for _ in 0..3 {
        let mut v: [CBall; 3] =
            std::array::from_fn(|_| Complex::new(Ball::from_f64(gaussian(rng), prec), Ball::from_f64(gaussian(rng), prec)));
        for c in &cols {
            let ip = (0..3).fold(czero(prec), |s, k| s + c[k].conj() * v[k].clone());
            for k in 0..3 {
                v[k] = v[k].clone() - c[k].clone() * ip.clone();
            }
        }
        let n = v.iter().fold(Ball::from_i64(0, prec), |s, z| s + z.norm_sqr()).sqrt();
        cols.push(std::array::from_fn(|k| v[k].clone().unscale(n.clone())));
    }
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

/// Box-Muller.
fn gaussian(rng: &mut impl rand::Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: i64, prec: u32) -> CBall {
        Complex::new(Ball::from_i64(re, prec), Ball::from_i64(0, prec))
    }

    #[test]
    fn identity_needs_nothing() {
        let d = decompose_su3(&identity(256), 1e-30).unwrap();
        assert!(d.reflections.is_empty());
    }

    #[test]
    fn single_basis_reflection() {
        let mut u = identity(256);
        u[2][2] = c(-1, 256);
        let d = decompose_su3(&u, 1e-30).unwrap();
        assert_eq!(d.reflections.len(), 1);
        assert_eq!(d.reflections[0].levels.0, 2);
        assert!(max_diff(&d.reconstruct(256), &u) < 1e-60);
    }

    #[test]
    fn rejects_non_unitary() {
        let mut u = identity(128);
        u[0][1] = c(1, 128);
        assert!(matches!(decompose_su3(&u, 1e-20), Err(HouseholderError::NotUnitary(_))));
    }

    #[test]
    fn haar_random_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let u = haar_random(&mut rng, 256);
            let d = decompose_su3(&u, 1e-30).unwrap();
            assert!(d.reflections.len() <= 6);
            assert!(max_diff(&d.reconstruct(256), &u) < 1e-12);
        }
    }
}
