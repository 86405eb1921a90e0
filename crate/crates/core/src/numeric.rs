//! Small floating-point helpers shared by the series and the dynamics.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of complex numbers, componentwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: Compensated,
    im: Compensated,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `e^{2πix}`.
pub fn cis_turns(x: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * x).sin_cos();
    Complex64::new(c, s)
}

/// `e^{2πix} - 1`, accurate for small `x`.
pub fn cis_turns_m1(x: f64) -> Complex64 {
    let (s, c) = (PI * x).sin_cos();
    // 2i sin(πx) e^{iπx}
    Complex64::new(-2.0 * s * s, 2.0 * s * c)
}

/// Shortest signed representative of `x` modulo 1, in `[-1/2, 1/2)`.
pub fn centered(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Chordal distance `|e^{2πix} - e^{2πiy}|` between two angles in turns.
pub fn chord(x: f64, y: f64) -> f64 {
    2.0 * (PI * centered(x - y)).sin().abs()
}
