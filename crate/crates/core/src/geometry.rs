//! The admissible-range regions `A(c, d) = {Re σ ≥ c + d|σ|²}` and
//! `B(F, G) = {(1−F) − (1+F)|σ|² ≥ 2G Re σ}`: shape classification, membership
//! and boundary sampling.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::timedomain::Params;

/// Tolerance on the discriminants `1 − 4cd` and `1 − F² + G²` below which they
/// count as zero.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    FullPlane,
    HalfPlane,
    Disk,
    DiskComplement,
    Point,
    Empty,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::FullPlane => "full-plane",
            Shape::HalfPlane => "half-plane",
            Shape::Disk => "disk",
            Shape::DiskComplement => "disk-complement",
            Shape::Point => "point",
            Shape::Empty => "empty",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Admittance,
    Scattering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `Re σ ≥ threshold`
    AtLeast,
    /// `Re σ ≤ threshold`
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneBound {
    pub threshold: f64,
    pub orientation: Orientation,
}

/// `constant + linear·Re σ + quadratic·|σ|²`; the region is where this is `≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl QuadraticForm {
    pub fn eval(&self, sigma: Complex64) -> f64 {
        self.constant + self.linear * sigma.re + self.quadratic * sigma.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub family: Family,
    pub shape: Shape,
    /// Roman numeral of the case in the region taxonomy.
    pub case: &'static str,
    pub center: Option<Complex64>,
    pub radius: Option<f64>,
    pub half_plane: Option<HalfPlaneBound>,
    pub form: QuadraticForm,
    pub discriminant: f64,
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_num(z.re)
    } else {
        format!("{}{:+}i", fmt_num(z.re), z.im)
    }
}

impl fmt::Display for RegionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.shape.name())?;
        match self.shape {
            Shape::HalfPlane => {
                let h = self.half_plane.expect("half-plane bound");
                let op = match h.orientation {
                    Orientation::AtLeast => "≥",
                    Orientation::AtMost => "≤",
                };
                write!(f, " Re {op} {}", fmt_num(h.threshold))?;
            }
            Shape::Disk | Shape::DiskComplement => write!(
                f,
                " center {} radius {}",
                fmt_complex(self.center.expect("center")),
                fmt_num(self.radius.expect("radius"))
            )?,
            Shape::Point => write!(f, " {}", fmt_complex(self.center.expect("center")))?,
            Shape::FullPlane | Shape::Empty => {}
        }
        write!(f, " (case {})", self.case)
    }
}

impl RegionClass {
    fn new(family: Family, shape: Shape, case: &'static str, form: QuadraticForm, discriminant: f64) -> Self {
        Self {
            family,
            shape,
            case,
            center: None,
            radius: None,
            half_plane: None,
            form,
            discriminant,
        }
    }

    fn circle(mut self, center: f64, radius: f64) -> Self {
        self.center = Some(Complex64::new(center, 0.0));
        self.radius = Some(radius);
        self
    }

    /// Membership with the boundary included; `tol` slackens the defining
    /// inequality itself, not the Euclidean distance.
    pub fn contains(&self, sigma: Complex64, tol: f64) -> bool {
        self.form.eval(sigma) >= -tol
    }

    /// Boundary polylines clipped to `[x0, x1] × [y0, y1]`: the circle as one
    /// closed polyline of `n` points, a half-plane edge as a segment, a point as
    /// a single vertex.
    pub fn boundary(&self, viewport: [f64; 4], n: usize) -> Vec<Vec<(f64, f64)>> {
        let [x0, x1, y0, y1] = viewport;
        match self.shape {
            Shape::Disk | Shape::DiskComplement => {
                let c = self.center.expect("center");
                let r = self.radius.expect("radius");
                let pts: Vec<(f64, f64)> = (0..=n)
                    .map(|i| {
                        let th = std::f64::consts::TAU * i as f64 / n as f64;
                        (c.re + r * th.cos(), c.im + r * th.sin())
                    })
                    .collect();
                vec![pts]
            }
            Shape::HalfPlane => {
                let x = self.half_plane.expect("bound").threshold;
                if (x0..=x1).contains(&x) {
                    vec![vec![(x, y0), (x, y1)]]
                } else {
                    vec![]
                }
            }
            Shape::Point => {
                let c = self.center.expect("center");
                vec![vec![(c.re, c.im)]]
            }
            Shape::FullPlane | Shape::Empty => vec![],
        }
    }
}

/// Classifies `A(c, d)` with the default discriminant tolerance.
pub fn classify_admittance(c: f64, d: f64) -> RegionClass {
    classify_admittance_with(c, d, DISCRIMINANT_TOL)
}

/// Classifies `A(c, d)`; `disc_tol = 0` decides the discriminant exactly.
pub fn classify_admittance_with(c: f64, d: f64, disc_tol: f64) -> RegionClass {
    let form = QuadraticForm {
        constant: -c,
        linear: 1.0,
        quadratic: -d,
    };
    let disc = 1.0 - 4.0 * c * d;
    let make = |shape, case| RegionClass::new(Family::Admittance, shape, case, form, disc);
    let radius = || disc.max(0.0).sqrt() / (2.0 * d.abs());
    if d == 0.0 {
        let mut r = make(Shape::HalfPlane, "iii");
        r.half_plane = Some(HalfPlaneBound {
            threshold: c,
            orientation: Orientation::AtLeast,
        });
        r
    } else if d < 0.0 {
        if disc <= disc_tol {
            make(Shape::FullPlane, "i")
        } else {
            make(Shape::DiskComplement, "ii").circle(1.0 / (2.0 * d), radius())
        }
    } else if disc.abs() <= disc_tol {
        make(Shape::Point, "v").circle(1.0 / (2.0 * d), 0.0)
    } else if disc > 0.0 {
        make(Shape::Disk, "iv").circle(1.0 / (2.0 * d), radius())
    } else {
        make(Shape::Empty, "vi")
    }
}

/// Classifies `B(F, G)` with the default discriminant tolerance.
pub fn classify_scattering(f: f64, g: f64) -> RegionClass {
    classify_scattering_with(f, g, DISCRIMINANT_TOL)
}

/// Classifies `B(F, G)`. Completing the square puts the circle's center at
/// `−G/(1+F)`; with `F = −1` the region is `G·Re σ ≤ 1`.
pub fn classify_scattering_with(f: f64, g: f64, disc_tol: f64) -> RegionClass {
    let form = QuadraticForm {
        constant: 1.0 - f,
        linear: -2.0 * g,
        quadratic: -(1.0 + f),
    };
    let disc = 1.0 - f * f + g * g;
    let make = |shape, case| RegionClass::new(Family::Scattering, shape, case, form, disc);
    let center = -g / (1.0 + f);
    let radius = || disc.max(0.0).sqrt() / (1.0 + f).abs();
    if f == -1.0 {
        if g == 0.0 {
            return make(Shape::FullPlane, "iii");
        }
        let mut r = make(Shape::HalfPlane, "iv");
        r.half_plane = Some(HalfPlaneBound {
            threshold: 1.0 / g,
            orientation: if g > 0.0 { Orientation::AtMost } else { Orientation::AtLeast },
        });
        r
    } else if f < -1.0 {
        if disc <= disc_tol {
            make(Shape::FullPlane, "i")
        } else {
            make(Shape::DiskComplement, "ii").circle(center, radius())
        }
    } else if disc.abs() <= disc_tol {
        make(Shape::Point, "vi").circle(center, 0.0)
    } else if disc > 0.0 {
        make(Shape::Disk, "v").circle(center, radius())
    } else {
        make(Shape::Empty, "vii")
    }
}

/// Collapses the `|s|^{2j}` weights at a fixed `s` into effective scalars
/// and classifies the resulting region.
pub fn region_of_params(p: &Params, s: Complex64) -> RegionClass {
    let s2 = s.norm_sqr();
    let collapse = |v: &[f64]| {
        let mut w = 1.0;
        let mut acc = 0.0;
        for &x in v {
            acc += w * x;
            w *= s2;
        }
        acc
    };
    match p {
        Params::Admittance(a) => classify_admittance(collapse(&a.c), collapse(&a.d)),
        Params::Scattering(sc) => classify_scattering(collapse(&sc.f), collapse(&sc.g)),
    }
}
