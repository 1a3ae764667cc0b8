//! Unbiased cores of the benchmark functions. Every core has its global
//! minimum 0 at `z = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreFunction {
    Sphere,
    DifferentPowers,
    Weierstrass,
    NonContinuousRastrigin,
    Schwefel,
    Katsuura,
    LunacekBiRastrigin,
}

impl CoreFunction {
    pub fn eval(self, z: &[f64]) -> f64 {
        match self {
            CoreFunction::Sphere => sphere(z),
            CoreFunction::DifferentPowers => different_powers(z),
            CoreFunction::Weierstrass => weierstrass(z),
            CoreFunction::NonContinuousRastrigin => non_continuous_rastrigin(z),
            CoreFunction::Schwefel => schwefel(z),
            CoreFunction::Katsuura => katsuura(z),
            CoreFunction::LunacekBiRastrigin => lunacek_bi_rastrigin(z),
        }
    }
}

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

pub fn different_powers(z: &[f64]) -> f64 {
    let d = z.len();
    let denom = d.saturating_sub(1).max(1) as f64;
    z.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / denom))
        .sum::<f64>()
        .sqrt()
}

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: i32 = 20;

pub fn weierstrass(z: &[f64]) -> f64 {
    let term = |v: f64| -> f64 {
        (0..=WEIERSTRASS_KMAX)
            .map(|k| WEIERSTRASS_A.powi(k) * (2.0 * PI * WEIERSTRASS_B.powi(k) * (v + 0.5)).cos())
            .sum()
    };
    let offset = term(0.0);
    z.iter().map(|&v| term(v)).sum::<f64>() - z.len() as f64 * offset
}

pub fn non_continuous_rastrigin(z: &[f64]) -> f64 {
    z.iter()
        .map(|&v| {
            let y = if v.abs() <= 0.5 { v } else { (2.0 * v).round() / 2.0 };
            y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
        })
        .sum()
}

const SCHWEFEL_SHIFT: f64 = 420.968_746_227_503_6;
const SCHWEFEL_CONST: f64 = 418.982_887_272_433_8;

pub fn schwefel(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let mut acc = 0.0;
    for &v in z {
        let y = v + SCHWEFEL_SHIFT;
        acc += if y > 500.0 {
            let m = 500.0 - y % 500.0;
            let t = (y - 500.0) / 100.0;
            m * m.abs().sqrt().sin() - t * t / d
        } else if y < -500.0 {
            let m = y.abs() % 500.0 - 500.0;
            let t = (y + 500.0) / 100.0;
            m * m.abs().sqrt().sin() - t * t / d
        } else {
            y * y.abs().sqrt().sin()
        };
    }
    SCHWEFEL_CONST * d - acc
}

pub fn katsuura(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let exponent = 10.0 / d.powf(1.2);
    let scale = 10.0 / (d * d);
    let product: f64 = z
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let inner: f64 = (1..=32)
                .map(|j| {
                    let p = 2f64.powi(j);
                    let t = p * v;
                    (t - t.round()).abs() / p
                })
                .sum();
            (1.0 + (i + 1) as f64 * inner).powf(exponent)
        })
        .product();
    scale * product - scale
}

const LUNACEK_MU0: f64 = 2.5;
const LUNACEK_D: f64 = 1.0;

pub fn lunacek_bi_rastrigin(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let s = 1.0 - 1.0 / (2.0 * (d + 20.0).sqrt() - 8.2);
    let mu1 = -((LUNACEK_MU0 * LUNACEK_MU0 - LUNACEK_D) / s).sqrt();
    let (mut near, mut far, mut cos_sum) = (0.0, 0.0, 0.0);
    for &v in z {
        let xh = 2.0 * v + LUNACEK_MU0;
        near += (xh - LUNACEK_MU0).powi(2);
        far += (xh - mu1).powi(2);
        cos_sum += (2.0 * PI * (xh - LUNACEK_MU0)).cos();
    }
    near.min(LUNACEK_D * d + s * far) + 10.0 * (d - cos_sum)
}
