//! Polar-area integrals of radial curves `r(θ) = Σ|g_i(θ)|`.
//!
//! Each `g_i` is a [`TrigSeries`], so
//! `r² = Σ g_i² + 2 Σ_{i<j} s_i s_j g_i g_j` with `s_i = sign g_i`. Every
//! product `g_i g_j` is a trigonometric polynomial of degree at most four and
//! has a closed-form antiderivative, so the integral is exact once the sign
//! changes are known. The uniform grid only brackets those sign changes;
//! a root pair closer together than one cell goes unnoticed, which costs at
//! most the integral of `|g_i g_j|` over that sliver.

use std::f64::consts::{PI, TAU};

use crate::mechanism::{trig_at, TrigSeries};

/// Trigonometric polynomial `a0 + Σ_{k=1..4} (a_k cos kθ + b_k sin kθ)`.
#[derive(Debug, Clone, Copy, Default)]
struct Fourier4 {
    a0: f64,
    a: [f64; 4],
    b: [f64; 4],
}

impl Fourier4 {
    fn product(g: &TrigSeries, h: &TrigSeries) -> Self {
        let gc = [g.c1, g.c2];
        let gs = [g.s1, g.s2];
        let hc = [h.c1, h.c2];
        let hs = [h.s1, h.s2];
        let mut out = Self::default();
        for m in 1..=2usize {
            for n in 1..=2usize {
                let (gcm, gsm, hcn, hsn) = (gc[m - 1], gs[m - 1], hc[n - 1], hs[n - 1]);
                // cos m cos n = ½[cos(m−n) + cos(m+n)]
                out.add_cos(m.abs_diff(n), 0.5 * gcm * hcn);
                out.add_cos(m + n, 0.5 * gcm * hcn);
                // sin m sin n = ½[cos(m−n) − cos(m+n)]
                out.add_cos(m.abs_diff(n), 0.5 * gsm * hsn);
                out.add_cos(m + n, -0.5 * gsm * hsn);
                // sin m cos n = ½[sin(m+n) + sin(m−n)]
                out.add_sin(m + n, 0.5 * gsm * hcn);
                out.add_sin_signed(m as isize - n as isize, 0.5 * gsm * hcn);
                // cos m sin n = ½[sin(m+n) − sin(m−n)]
                out.add_sin(m + n, 0.5 * gcm * hsn);
                out.add_sin_signed(m as isize - n as isize, -0.5 * gcm * hsn);
            }
        }
        out
    }

    fn add_cos(&mut self, k: usize, v: f64) {
        if k == 0 {
            self.a0 += v;
        } else {
            self.a[k - 1] += v;
        }
    }

    fn add_sin(&mut self, k: usize, v: f64) {
        if k > 0 {
            self.b[k - 1] += v;
        }
    }

    fn add_sin_signed(&mut self, k: isize, v: f64) {
        if k < 0 {
            self.add_sin(k.unsigned_abs(), -v);
        } else {
            self.add_sin(k as usize, v);
        }
    }

    /// `∫_0^θ` of the polynomial.
    fn antiderivative(&self, theta: f64) -> f64 {
        let mut total = self.a0 * theta;
        for k in 1..=4usize {
            let (s, c) = (k as f64 * theta).sin_cos();
            total += (self.a[k - 1] * s + self.b[k - 1] * (1.0 - c)) / k as f64;
        }
        total
    }
}

/// Root-bracketing grid of `n` uniform cells.
#[derive(Debug, Clone)]
pub struct PolarQuadrature {
    n: usize,
    /// `(cos θ, sin θ, cos 2θ, sin 2θ)` at the grid points `θ_k = 2πk/n`.
    edges: Vec<[f64; 4]>,
}

impl PolarQuadrature {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature grid needs at least one cell");
        let h = TAU / n as f64;
        let edges = (0..n).map(|k| trig_at(h * k as f64)).collect();
        Self { n, edges }
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    /// `½∮ (Σ|g_i(θ)|)² dθ` over one revolution.
    pub fn polar_area(&self, parts: &[TrigSeries]) -> f64 {
        let parts: Vec<&TrigSeries> = parts.iter().filter(|p| !p.is_zero()).collect();
        if parts.is_empty() {
            return 0.0;
        }

        // ∮ g² = π Σ coefficients²
        let squares: f64 = parts
            .iter()
            .map(|p| PI * (p.c1 * p.c1 + p.s1 * p.s1 + p.c2 * p.c2 + p.s2 * p.s2))
            .sum();
        if parts.len() == 1 {
            return 0.5 * squares;
        }

        let mut roots = Vec::new();
        for part in &parts {
            self.sign_changes(part, &mut roots);
        }
        roots.sort_by(f64::total_cmp);

        let products: Vec<(usize, usize, Fourier4)> = (0..parts.len())
            .flat_map(|i| (i + 1..parts.len()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, Fourier4::product(parts[i], parts[j])))
            .collect();

        let mut cross = 0.0;
        let mut add_piece = |a: f64, b: f64| {
            let mid = trig_at(0.5 * (a + b));
            for (i, j, prod) in &products {
                let sign = parts[*i].eval_trig(&mid) * parts[*j].eval_trig(&mid);
                if sign != 0.0 {
                    cross += sign.signum() * (prod.antiderivative(b) - prod.antiderivative(a));
                }
            }
        };
        match (roots.first(), roots.last()) {
            (Some(&first), Some(&last)) => {
                for w in roots.windows(2) {
                    add_piece(w[0], w[1]);
                }
                add_piece(last, first + TAU);
            }
            _ => add_piece(0.0, TAU),
        }

        0.5 * (squares + 2.0 * cross)
    }

    fn sign_changes(&self, g: &TrigSeries, roots: &mut Vec<f64>) {
        let h = TAU / self.n as f64;
        let mut left = g.eval_trig(&self.edges[0]);
        for k in 0..self.n {
            let right = g.eval_trig(&self.edges[(k + 1) % self.n]);
            if (left >= 0.0) != (right >= 0.0) {
                roots.push(find_root(g, h * k as f64, h * (k + 1) as f64, left, right));
            }
            left = right;
        }
    }
}

/// Root of `g` in `[a, b]` given `g(a) = ga` and `g(b) = gb` of opposite sign.
/// Newton steps are kept inside the shrinking bracket, falling back to
/// bisection whenever a step would leave it.
fn find_root(g: &TrigSeries, mut a: f64, mut b: f64, ga: f64, gb: f64) -> f64 {
    if ga == 0.0 {
        return a;
    }
    let left_negative = ga < 0.0;
    let mut x = a + (b - a) * ga / (ga - gb);
    for _ in 0..100 {
        let gx = g.eval(x);
        if gx == 0.0 {
            return x;
        }
        if (gx < 0.0) == left_negative {
            a = x;
        } else {
            b = x;
        }
        let dg = g.derivative(x);
        let newton = x - gx / dg;
        let next = if dg != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || next <= a || next >= b {
            return next.clamp(a, b);
        }
        x = next;
    }
    x
}
