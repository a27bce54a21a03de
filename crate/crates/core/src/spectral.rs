//! Closed-form Dirichlet spectra of `−Δ` on an interval or a rectangle, the
//! eigenfunctions sampled on a midpoint quadrature grid, and the eigenvalue
//! counting function.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_INTERVAL_MODES: usize = 32;
pub const DEFAULT_INTERVAL_CELLS: usize = 512;
pub const DEFAULT_RECTANGLE_MODES: usize = 64;
pub const DEFAULT_RECTANGLE_CELLS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl DomainKind {
    pub fn dim(&self) -> usize {
        match self {
            DomainKind::Interval { .. } => 1,
            DomainKind::Rectangle { .. } => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            DomainKind::Interval { length } => length,
            DomainKind::Rectangle { lx, ly } => lx * ly,
        }
    }
}

/// One normalized Dirichlet eigenfunction, evaluated in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigenfunction {
    Interval { j: usize, length: f64 },
    Rectangle { j: usize, k: usize, lx: f64, ly: f64 },
}

impl Eigenfunction {
    pub fn eval(&self, point: &[f64]) -> f64 {
        match *self {
            Eigenfunction::Interval { j, length } => sine_mode(j, length, point[0]),
            Eigenfunction::Rectangle { j, k, lx, ly } => {
                sine_mode(j, lx, point[0]) * sine_mode(k, ly, point[1])
            }
        }
    }
}

fn sine_mode(j: usize, length: f64, x: f64) -> f64 {
    (2.0 / length).sqrt() * (j as f64 * PI * x / length).sin()
}

/// A domain together with its first `n_modes` Dirichlet eigenpairs and a
/// uniform midpoint grid. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SpectralDomain {
    kind: DomainKind,
    cells: [usize; 2],
    cell_volume: f64,
    eigenvalues: Vec<f64>,
    shapes: Vec<Eigenfunction>,
    next_eigenvalue: f64,
    /// Mode-major table: `table[j * n_cells + i] = e_j(x_i)`.
    table: Vec<f64>,
}

impl SpectralDomain {
    pub fn interval(length: f64, n_modes: usize, cells: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(format!("interval length must be positive, got {length}")));
        }
        Self::build(DomainKind::Interval { length }, n_modes, [cells, 1])
    }

    pub fn rectangle(lx: f64, ly: f64, n_modes: usize, cx: usize, cy: usize) -> Result<Self> {
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::invalid(format!("rectangle sides must be positive, got {lx} x {ly}")));
        }
        Self::build(DomainKind::Rectangle { lx, ly }, n_modes, [cx, cy])
    }

    /// Interval with 32 modes on 512 cells.
    pub fn default_interval(length: f64) -> Result<Self> {
        Self::interval(length, DEFAULT_INTERVAL_MODES, DEFAULT_INTERVAL_CELLS)
    }

    /// Rectangle with 64 modes on a 128×128 grid.
    pub fn default_rectangle(lx: f64, ly: f64) -> Result<Self> {
        Self::rectangle(
            lx,
            ly,
            DEFAULT_RECTANGLE_MODES,
            DEFAULT_RECTANGLE_CELLS,
            DEFAULT_RECTANGLE_CELLS,
        )
    }

    fn build(kind: DomainKind, n_modes: usize, cells: [usize; 2]) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("at least one mode is required"));
        }
        if cells[0] == 0 || cells[1] == 0 {
            return Err(Error::invalid("grid needs at least one cell per axis"));
        }
        let (mut eigenvalues, mut shapes) = (Vec::with_capacity(n_modes), Vec::with_capacity(n_modes));
        let next_eigenvalue;
        match kind {
            DomainKind::Interval { length } => {
                for j in 1..=n_modes {
                    eigenvalues.push((j as f64 * PI / length).powi(2));
                    shapes.push(Eigenfunction::Interval { j, length });
                }
                next_eigenvalue = ((n_modes + 1) as f64 * PI / length).powi(2);
            }
            DomainKind::Rectangle { lx, ly } => {
                // The n+1 smallest pairs all have j, k <= n+1.
                let bound = n_modes + 1;
                let mut pairs: Vec<(f64, usize, usize)> = (1..=bound)
                    .flat_map(|j| (1..=bound).map(move |k| (j, k)))
                    .map(|(j, k)| {
                        let lam = (j as f64 * PI / lx).powi(2) + (k as f64 * PI / ly).powi(2);
                        (lam, j, k)
                    })
                    .collect();
                pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
                for &(lam, j, k) in pairs.iter().take(n_modes) {
                    eigenvalues.push(lam);
                    shapes.push(Eigenfunction::Rectangle { j, k, lx, ly });
                }
                next_eigenvalue = pairs[n_modes].0;
            }
        }

        let n_cells = cells[0] * cells[1];
        let cell_volume = kind.volume() / n_cells as f64;
        let mut table = vec![0.0; n_modes * n_cells];
        let centers = grid_centers(kind, cells);
        for (j, shape) in shapes.iter().enumerate() {
            let row = &mut table[j * n_cells..(j + 1) * n_cells];
            for (value, x) in row.iter_mut().zip(&centers) {
                *value = shape.eval(x);
            }
        }
        Ok(Self {
            kind,
            cells,
            cell_volume,
            eigenvalues,
            shapes,
            next_eigenvalue,
            table,
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn volume(&self) -> f64 {
        self.kind.volume()
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Cells per axis; the second entry is 1 for intervals.
    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Per-axis cell widths.
    pub fn cell_widths(&self) -> [f64; 2] {
        match self.kind {
            DomainKind::Interval { length } => [length / self.cells[0] as f64, 1.0],
            DomainKind::Rectangle { lx, ly } => [lx / self.cells[0] as f64, ly / self.cells[1] as f64],
        }
    }

    /// Cell centers in grid order (x fastest).
    pub fn cell_centers(&self) -> Vec<Vec<f64>> {
        grid_centers(self.kind, self.cells)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j]
    }

    pub fn eigenfunction(&self, j: usize) -> Eigenfunction {
        self.shapes[j]
    }

    /// All stored `(λ_j, e_j)` pairs, zero-based.
    pub fn eigenpairs(&self) -> Vec<(f64, Eigenfunction)> {
        self.eigenvalues.iter().copied().zip(self.shapes.iter().copied()).collect()
    }

    /// Values of `e_j` at the cell centers.
    pub fn mode_on_grid(&self, j: usize) -> &[f64] {
        let n = self.n_cells();
        &self.table[j * n..(j + 1) * n]
    }

    /// `Σ_j c_j e_j` on the grid, summed in mode order.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut field = vec![0.0; self.n_cells()];
        self.synthesize_into(coeffs, &mut field);
        field
    }

    pub fn synthesize_into(&self, coeffs: &[f64], field: &mut [f64]) {
        field.iter_mut().for_each(|v| *v = 0.0);
        for (j, &c) in coeffs.iter().enumerate().take(self.n_modes()) {
            if c == 0.0 {
                continue;
            }
            for (v, e) in field.iter_mut().zip(self.mode_on_grid(j)) {
                *v += c * e;
            }
        }
    }

    /// Grid inner product `Σ_i f_i g_i |cell|`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() * self.cell_volume
    }

    /// Quadrature `L¹` norm of `f` restricted to `mask` (`None` = whole domain).
    pub fn l1_norm(&self, f: &[f64], mask: Option<&[bool]>) -> f64 {
        let sum: f64 = match mask {
            Some(m) => f.iter().zip(m).filter(|(_, &keep)| keep).map(|(v, _)| v.abs()).sum(),
            None => f.iter().map(|v| v.abs()).sum(),
        };
        sum * self.cell_volume
    }

    pub fn mask_measure(&self, mask: &[bool]) -> f64 {
        mask.iter().filter(|&&m| m).count() as f64 * self.cell_volume
    }

    /// `k_λ`: the number of eigenvalues `≤ λ`.
    ///
    /// Requires `λ > λ_1` and a truncation holding every eigenvalue `≤ λ`.
    pub fn count_below(&self, lambda: f64) -> Result<usize> {
        if !(lambda > self.eigenvalues[0]) {
            return Err(Error::invalid(format!(
                "k_λ needs λ > λ_1 = {}, got {lambda}",
                self.eigenvalues[0]
            )));
        }
        if self.next_eigenvalue <= lambda {
            return Err(Error::InsufficientTruncation(format!(
                "λ = {lambda} reaches beyond the {} stored modes (next eigenvalue {})",
                self.n_modes(),
                self.next_eigenvalue
            )));
        }
        Ok(self.eigenvalues.partition_point(|&mu| mu <= lambda))
    }

    /// `k_λ / λ^{d/2}`.
    pub fn weyl_ratio(&self, lambda: f64) -> Result<f64> {
        let k = self.count_below(lambda)?;
        Ok(k as f64 / lambda.powf(self.dim() as f64 / 2.0))
    }

    /// Largest `|⟨e_i, e_j⟩_grid − δ_ij|` over all stored modes.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n_modes();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let ip = self.inner(self.mode_on_grid(i), self.mode_on_grid(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }
}

fn grid_centers(kind: DomainKind, cells: [usize; 2]) -> Vec<Vec<f64>> {
    match kind {
        DomainKind::Interval { length } => {
            let h = length / cells[0] as f64;
            (0..cells[0]).map(|i| vec![(i as f64 + 0.5) * h]).collect()
        }
        DomainKind::Rectangle { lx, ly } => {
            let (hx, hy) = (lx / cells[0] as f64, ly / cells[1] as f64);
            let mut out = Vec::with_capacity(cells[0] * cells[1]);
            for iy in 0..cells[1] {
                for ix in 0..cells[0] {
                    out.push(vec![(ix as f64 + 0.5) * hx, (iy as f64 + 0.5) * hy]);
                }
            }
            out
        }
    }
}

/// Diffusion `a > 0` and coupling `b ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    a: f64,
    b: f64,
}

impl PhysicalParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid(format!("diffusion a must be positive, got {a}")));
        }
        if !(b.is_finite() && b != 0.0) {
            return Err(Error::invalid(format!("coupling b must be nonzero, got {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `A = [[a, −b], [b, a]]`, eigenvalues `a ± ib`.
    pub fn coupling_matrix(&self) -> [[f64; 2]; 2] {
        [[self.a, -self.b], [self.b, self.a]]
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(self.a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_spectrum_is_j_squared() {
        let d = SpectralDomain::interval(PI, 3, 512).unwrap();
        for (lam, want) in d.eigenvalues().iter().zip([1.0, 4.0, 9.0]) {
            assert!((lam - want).abs() < 1e-12);
        }
        let e1 = d.eigenfunction(0).eval(&[PI / 2.0]);
        assert!((e1 - (2.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rectangle_spectrum_sorted_with_ties() {
        // Oracle: enumerate j² + k² for j, k <= 3 and sort.
        let mut lattice: Vec<f64> = (1..=3)
            .flat_map(|j| (1..=3).map(move |k| (j * j + k * k) as f64))
            .collect();
        lattice.sort_by(f64::total_cmp);
        assert_eq!(&lattice[..4], &[2.0, 5.0, 5.0, 8.0]);

        let d = SpectralDomain::rectangle(PI, PI, 4, 32, 32).unwrap();
        for (lam, want) in d.eigenvalues().iter().zip(&lattice) {
            assert!((lam - want).abs() < 1e-12);
        }
        // Tie at 5 broken lexicographically: (1,2) before (2,1).
        assert_eq!(d.eigenfunction(1), Eigenfunction::Rectangle { j: 1, k: 2, lx: PI, ly: PI });
        assert_eq!(d.eigenfunction(2), Eigenfunction::Rectangle { j: 2, k: 1, lx: PI, ly: PI });
    }

    #[test]
    fn zero_modes_rejected() {
        assert!(matches!(SpectralDomain::interval(PI, 0, 16), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn count_below_examples() {
        let d = SpectralDomain::interval(PI, 8, 64).unwrap();
        assert_eq!(d.count_below(10.0).unwrap(), 3);
        assert_eq!(d.count_below(1.0 + 1e-9).unwrap(), 1);
        assert!(matches!(d.count_below(1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(d.count_below(81.0), Err(Error::InsufficientTruncation(_))));
        assert_eq!(d.count_below(80.9).unwrap(), 8);

        let r = SpectralDomain::rectangle(PI, PI, 8, 16, 16).unwrap();
        assert_eq!(r.count_below(5.0).unwrap(), 3);
    }

    #[test]
    fn weyl_ratio_on_interval() {
        let d = SpectralDomain::interval(PI, 120, 64).unwrap();
        assert!((d.weyl_ratio(1e4).unwrap() - 1.0).abs() < 1e-15);
        assert!((d.weyl_ratio(4.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn default_grids_are_orthonormal() {
        let d = SpectralDomain::default_interval(PI).unwrap();
        assert!(d.orthonormality_defect() <= 1e-3);
        let r = SpectralDomain::default_rectangle(2.0, 1.0).unwrap();
        assert!(r.orthonormality_defect() <= 1e-3);
        let cells = r.n_cells() as f64;
        assert_eq!(r.cell_volume() * cells, 2.0);
    }

    #[test]
    fn params_validate_and_matrix_has_a_plus_minus_ib() {
        assert!(PhysicalParams::new(0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0).is_err());
        let p = PhysicalParams::new(0.7, -1.3).unwrap();
        let m = p.coupling_matrix();
        assert_eq!(m[0][0] + m[1][1], 1.4);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - (0.49 + 1.69)).abs() < 1e-15);
    }

    #[test]
    fn counting_is_monotone() {
        let d = SpectralDomain::rectangle(1.0, 2.0, 40, 8, 8).unwrap();
        let top = d.eigenvalues()[35];
        let mut prev = 0;
        let mut lam = d.eigenvalue(0) + 1e-6;
        while lam < top {
            let k = d.count_below(lam).unwrap();
            assert!(k >= prev);
            prev = k;
            lam += 0.37;
        }
        for (k, &lk) in d.eigenvalues().iter().enumerate().skip(1).take(30) {
            assert!(d.count_below(lk).unwrap() >= k + 1);
        }
    }
}
