use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math;

/// Truncated multidual number `Σ_S c_S ε_S` over `k` nilpotent directions
/// with `ε_i² = 0`. Component `S` is a bit mask of directions; the
/// coefficient of `ε_1⋯ε_k` is the mixed derivative along all of them.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { c: alloc::vec![v] }
    }

    /// `v + s ε_dir`.
    pub fn variable(v: f64, dir: usize, s: f64) -> Self {
        let mut c = alloc::vec![0.0; 1 << (dir + 1)];
        c[0] = v;
        c[1 << dir] = s;
        Jet { c }
    }

    pub fn from_components(c: Vec<f64>) -> Self {
        debug_assert!(c.len().is_power_of_two());
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Number of directions carried.
    pub fn dirs(&self) -> usize {
        self.c.len().trailing_zeros() as usize
    }

    pub fn components(&self) -> &[f64] {
        &self.c
    }

    pub fn coefficient(&self, mask: usize) -> f64 {
        self.c.get(mask).copied().unwrap_or(0.0)
    }

    fn lifted(&self, len: usize) -> Vec<f64> {
        let mut c = self.c.clone();
        c.resize(len, 0.0);
        c
    }

    /// Multiplies by `ε_dir`, which must be a new direction.
    pub fn times_new_dir(&self, dir: usize) -> Jet {
        let len = 1usize << (dir + 1);
        let mut c = alloc::vec![0.0; len];
        let shift = 1usize << dir;
        for (s, v) in self.c.iter().enumerate() {
            c[s | shift] = *v;
        }
        Jet { c }
    }

    /// Coefficient of `ε_dir` as a jet in the remaining lower directions.
    pub fn part_along(&self, dir: usize) -> Jet {
        let shift = 1usize << dir;
        if self.c.len() <= shift {
            return Jet::constant(0.0);
        }
        Jet { c: (0..shift).map(|s| self.c[s | shift]).collect() }
    }

    /// `f(a + n) = Σ_m f^{(m)}(a) nᵐ/m!` for the nilpotent part `n`.
    pub fn compose(&self, derivs: impl Fn(usize) -> f64) -> Jet {
        let k = self.dirs();
        let mut n = self.clone();
        n.c[0] = 0.0;
        let mut out = alloc::vec![0.0; self.c.len()];
        out[0] = derivs(0);
        let mut power = Jet::constant(1.0);
        let mut fact = 1.0;
        for m in 1..=k {
            power = power.mul_ref(&n);
            fact *= m as f64;
            let d = derivs(m) / fact;
            if d != 0.0 {
                for (o, p) in out.iter_mut().zip(&power.c) {
                    *o += d * p;
                }
            }
        }
        Jet { c: out }
    }

    pub fn mul_ref(&self, o: &Jet) -> Jet {
        if self.c.len() == 1 {
            return Jet { c: o.c.iter().map(|v| v * self.c[0]).collect() };
        }
        if o.c.len() == 1 {
            return Jet { c: self.c.iter().map(|v| v * o.c[0]).collect() };
        }
        let len = self.c.len().max(o.c.len());
        let a = self.lifted(len);
        let b = o.lifted(len);
        let mut c = alloc::vec![0.0; len];
        for (s, cs) in c.iter_mut().enumerate() {
            let mut sub = s;
            let mut acc = a[0] * b[s];
            while sub != 0 {
                acc += a[sub] * b[s ^ sub];
                sub = (sub - 1) & s;
            }
            *cs = acc;
        }
        Jet { c }
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let len = self.c.len().max(o.c.len());
        let a = self.lifted(len);
        let b = o.lifted(len);
        Jet { c: a.iter().zip(&b).map(|(x, y)| f(*x, *y)).collect() }
    }
}

/// Numbers the derivative oracles can evaluate fields on.
pub trait Real:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn recip(&self) -> Self;
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        math::sin(*self)
    }
    fn cos(&self) -> Self {
        math::cos(*self)
    }
    fn exp(&self) -> Self {
        math::exp(*self)
    }
    fn ln(&self) -> Self {
        math::ln(*self)
    }
    fn sqrt(&self) -> Self {
        math::sqrt(*self)
    }
    fn powf(&self, p: f64) -> Self {
        math::powf(*self, p)
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
}

fn falling(p: f64, m: usize) -> f64 {
    (0..m).map(|i| p - i as f64).product()
}

impl Real for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn sin(&self) -> Self {
        let (s, c) = (math::sin(self.c[0]), math::cos(self.c[0]));
        self.compose(|m| [s, c, -s, -c][m % 4])
    }
    fn cos(&self) -> Self {
        let (s, c) = (math::sin(self.c[0]), math::cos(self.c[0]));
        self.compose(|m| [c, -s, -c, s][m % 4])
    }
    fn exp(&self) -> Self {
        let e = math::exp(self.c[0]);
        self.compose(|_| e)
    }
    fn ln(&self) -> Self {
        let a = self.c[0];
        self.compose(|m| {
            if m == 0 {
                math::ln(a)
            } else {
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                sign * (1..m).map(|i| i as f64).product::<f64>() / math::powi(a, m as i32)
            }
        })
    }
    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }
    fn powf(&self, p: f64) -> Self {
        let a = self.c[0];
        self.compose(|m| falling(p, m) * math::powf(a, p - m as f64))
    }
    fn recip(&self) -> Self {
        let a = self.c[0];
        self.compose(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1..=m).map(|i| i as f64).product::<f64>() / math::powi(a, m as i32 + 1)
        })
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        self.zip(&o, |a, b| a + b)
    }
}
impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self.zip(&o, |a, b| a - b)
    }
}
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        self.mul_ref(&o)
    }
}
impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self.mul_ref(&o.recip())
    }
}
impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in &mut self.c {
            *v = -*v;
        }
        self
    }
}
impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.c[0] += o;
        self
    }
}
impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.c[0] -= o;
        self
    }
}
impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, o: f64) -> Jet {
        for v in &mut self.c {
            *v *= o;
        }
        self
    }
}
