//! Measurable sets as unions of grid cells: space-time masks, their time
//! slices `D_t`, the good-time set `E`, density points, and certified
//! telescoping time sequences.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::{DomainKind, SpectralDomain};

/// Default radius ladder for the density proxy, as fractions of `T`.
pub const DENSITY_RADII: [f64; 4] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];

const REL_TOL: f64 = 1e-12;

/// Boolean occupancy over (space grid × time grid), time-major rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSet {
    n_space: usize,
    n_time: usize,
    horizon: f64,
    space_cell_volume: f64,
    mask: Vec<bool>,
}

/// One time row of a [`SpaceTimeSet`].
#[derive(Debug, Clone, Copy)]
pub struct Slice<'a> {
    pub index: usize,
    pub mask: &'a [bool],
    pub measure: f64,
}

impl SpaceTimeSet {
    pub fn new(domain: &SpectralDomain, n_time: usize, horizon: f64, mask: Vec<bool>) -> Result<Self> {
        if n_time == 0 {
            return Err(Error::invalid("time grid needs at least one cell"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid(format!("horizon T must be positive, got {horizon}")));
        }
        if mask.len() != n_time * domain.n_cells() {
            return Err(Error::invalid(format!(
                "mask has {} cells, expected {} x {}",
                mask.len(),
                n_time,
                domain.n_cells()
            )));
        }
        Ok(Self {
            n_space: domain.n_cells(),
            n_time,
            horizon,
            space_cell_volume: domain.cell_volume(),
            mask,
        })
    }

    /// Cell `(i, k)` is in the set iff `inside(i, k)`.
    pub fn from_fn(
        domain: &SpectralDomain,
        n_time: usize,
        horizon: f64,
        mut inside: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let n_space = domain.n_cells();
        let mut mask = Vec::with_capacity(n_space * n_time);
        for k in 0..n_time {
            for i in 0..n_space {
                mask.push(inside(i, k));
            }
        }
        Self::new(domain, n_time, horizon, mask)
    }

    /// `Ω × (0, T)`.
    pub fn full(domain: &SpectralDomain, n_time: usize, horizon: f64) -> Result<Self> {
        Self::from_fn(domain, n_time, horizon, |_, _| true)
    }

    pub fn n_space(&self) -> usize {
        self.n_space
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_time as f64
    }

    pub fn space_cell_volume(&self) -> f64 {
        self.space_cell_volume
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, space: usize, time: usize) -> bool {
        self.mask[time * self.n_space + space]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Exact measure: cells × space-cell volume × time step.
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.space_cell_volume * self.dt()
    }

    /// `|Ω × (0, T)|` for the underlying grid.
    pub fn cylinder_measure(&self) -> f64 {
        (self.n_space * self.n_time) as f64 * self.space_cell_volume * self.dt()
    }

    pub fn row(&self, k: usize) -> &[bool] {
        &self.mask[k * self.n_space..(k + 1) * self.n_space]
    }

    pub fn row_count(&self, k: usize) -> usize {
        self.row(k).iter().filter(|&&m| m).count()
    }

    pub fn slice_at(&self, k: usize) -> Slice<'_> {
        let mask = self.row(k);
        Slice {
            index: k,
            mask,
            measure: self.row_count(k) as f64 * self.space_cell_volume,
        }
    }

    /// Time cell containing `t`.
    pub fn time_index(&self, t: f64) -> usize {
        ((t / self.dt()).floor() as usize).min(self.n_time - 1)
    }

    /// `D_t = {x : (x, t) ∈ D}` with `t` snapped to its time cell.
    pub fn slice(&self, t: f64) -> Result<Slice<'_>> {
        if !(t > 0.0 && t < self.horizon) {
            return Err(Error::invalid(format!("slice time {t} outside (0, {})", self.horizon)));
        }
        Ok(self.slice_at(self.time_index(t)))
    }

    /// Spatial cells touched by the set at any time.
    pub fn spatial_support(&self) -> Vec<bool> {
        let mut support = vec![false; self.n_space];
        for k in 0..self.n_time {
            for (s, &m) in support.iter_mut().zip(self.row(k)) {
                *s |= m;
            }
        }
        support
    }

    /// `E = {t : |D_t| ≥ |D| / (2T)}` together with the checks
    /// `|E| ≥ |D| / (2|B_R|)` and `∫∫ χ_E χ_{D_t} ≤ |D|`.
    pub fn good_time_set(&self, domain: &SpectralDomain, ball: &Ball) -> Result<GoodTimeSet> {
        self.check_domain(domain)?;
        let total = self.count();
        if total == 0 {
            return Err(Error::invalid("the observation set is empty"));
        }
        let support = self.spatial_support();
        if let Some(i) = support.iter().enumerate().find(|(i, &s)| s && !ball.contains_cell(domain, *i)).map(|(i, _)| i) {
            return Err(Error::Containment(format!(
                "spatial cell {i} of the set is not inside the ball (radius {})",
                ball.radius
            )));
        }
        // |D_k| >= |D| / (2T)  <=>  2 n_time count_k >= total, exact in integers.
        let cells: Vec<bool> = (0..self.n_time)
            .map(|k| 2 * self.n_time * self.row_count(k) >= total)
            .collect();
        let e = TimeMask::new(cells, self.horizon)?;
        let threshold = self.measure() / (2.0 * self.horizon);
        let lower_bound = self.measure() / (2.0 * ball.volume(domain.dim()));
        if e.measure() < lower_bound * (1.0 - REL_TOL) {
            return Err(Error::Violation(format!(
                "|E| = {} below |D|/(2|B_R|) = {lower_bound}",
                e.measure()
            )));
        }
        let dominated: usize = (0..self.n_time).filter(|&k| e.cell(k)).map(|k| self.row_count(k)).sum();
        if dominated > total {
            return Err(Error::Violation("χ_E χ_{D_t} exceeds χ_D".into()));
        }
        Ok(GoodTimeSet { e, threshold, lower_bound })
    }

    /// `(Σ χ_E χ_{D_t} f, Σ χ_D f)` on the space-time grid for a field `f`
    /// laid out like the mask.
    pub fn domination_sums(&self, e: &TimeMask, f: &[f64]) -> Result<(f64, f64)> {
        if f.len() != self.mask.len() || e.n_cells() != self.n_time {
            return Err(Error::invalid("field or time mask does not match the set's grid"));
        }
        let w = self.space_cell_volume * self.dt();
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for k in 0..self.n_time {
            for i in 0..self.n_space {
                let idx = k * self.n_space + i;
                if self.mask[idx] {
                    rhs += f[idx] * w;
                    if e.cell(k) {
                        lhs += f[idx] * w;
                    }
                }
            }
        }
        Ok((lhs, rhs))
    }

    /// `D̃ = {(x, T − t) : (x, t) ∈ D}`.
    pub fn time_reflected(&self) -> Self {
        let mut mask = Vec::with_capacity(self.mask.len());
        for k in (0..self.n_time).rev() {
            mask.extend_from_slice(self.row(k));
        }
        Self { mask, ..self.clone() }
    }

    /// Subset of `self` (same grid); errors if the grids differ.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        if self.mask.len() != other.mask.len() || self.n_time != other.n_time {
            return Err(Error::invalid("sets live on different grids"));
        }
        Ok(self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b))
    }

    fn check_domain(&self, domain: &SpectralDomain) -> Result<()> {
        if domain.n_cells() != self.n_space {
            return Err(Error::invalid(format!(
                "set has {} spatial cells, domain grid has {}",
                self.n_space,
                domain.n_cells()
            )));
        }
        Ok(())
    }

    /// Run-length text form: a header line, then one line per time row of
    /// `<count><t|f>` tokens.
    pub fn to_rle(&self) -> String {
        let mut out = format!(
            "spacetime n_space={} n_time={} horizon={} cell_volume={}\n",
            self.n_space, self.n_time, self.horizon, self.space_cell_volume
        );
        for k in 0..self.n_time {
            let row = self.row(k);
            let mut tokens = Vec::new();
            let mut start = 0;
            while start < row.len() {
                let v = row[start];
                let len = row[start..].iter().take_while(|&&m| m == v).count();
                tokens.push(format!("{len}{}", if v { 't' } else { 'f' }));
                start += len;
            }
            let _ = writeln!(out, "{}", tokens.join(" "));
        }
        out
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::invalid("empty mask file"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("spacetime") {
            return Err(Error::invalid("mask header must start with `spacetime`"));
        }
        let (mut n_space, mut n_time, mut horizon, mut volume) = (None, None, None, None);
        for f in fields {
            let (key, value) = f
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("bad header field `{f}`")))?;
            let bad = || Error::invalid(format!("bad value in header field `{f}`"));
            match key {
                "n_space" => n_space = Some(value.parse::<usize>().map_err(|_| bad())?),
                "n_time" => n_time = Some(value.parse::<usize>().map_err(|_| bad())?),
                "horizon" => horizon = Some(value.parse::<f64>().map_err(|_| bad())?),
                "cell_volume" => volume = Some(value.parse::<f64>().map_err(|_| bad())?),
                other => return Err(Error::invalid(format!("unknown header field `{other}`"))),
            }
        }
        let missing = |k: &str| Error::invalid(format!("mask header lacks `{k}`"));
        let n_space = n_space.ok_or_else(|| missing("n_space"))?;
        let n_time = n_time.ok_or_else(|| missing("n_time"))?;
        let horizon = horizon.ok_or_else(|| missing("horizon"))?;
        let space_cell_volume = volume.ok_or_else(|| missing("cell_volume"))?;
        let mut mask = Vec::with_capacity(n_space * n_time);
        for (k, line) in lines.enumerate() {
            let before = mask.len();
            for tok in line.split_whitespace() {
                let (count, flag) = tok.split_at(tok.len() - 1);
                let count: usize = count
                    .parse()
                    .map_err(|_| Error::invalid(format!("row {k}: bad run `{tok}`")))?;
                let v = match flag {
                    "t" => true,
                    "f" => false,
                    _ => return Err(Error::invalid(format!("row {k}: bad run `{tok}`"))),
                };
                mask.extend(std::iter::repeat_n(v, count));
            }
            if mask.len() - before != n_space {
                return Err(Error::invalid(format!("row {k} has {} cells, expected {n_space}", mask.len() - before)));
            }
        }
        if mask.len() != n_space * n_time {
            return Err(Error::invalid(format!("expected {n_time} rows")));
        }
        if n_time == 0 || !(horizon > 0.0) || !(space_cell_volume > 0.0) {
            return Err(Error::invalid("degenerate mask header"));
        }
        Ok(Self { n_space, n_time, horizon, space_cell_volume, mask })
    }
}

/// Output of [`SpaceTimeSet::good_time_set`].
#[derive(Debug, Clone, PartialEq)]
pub struct GoodTimeSet {
    pub e: TimeMask,
    /// `|D| / (2T)`.
    pub threshold: f64,
    /// `|D| / (2|B_R|)`, the guaranteed lower bound on `|E|`.
    pub lower_bound: f64,
}

/// Closed ball `B_R(center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Smallest ball around the domain's center containing every cell.
    pub fn enclosing(domain: &SpectralDomain) -> Self {
        match domain.kind() {
            DomainKind::Interval { length } => Self { center: vec![length / 2.0], radius: length / 2.0 },
            DomainKind::Rectangle { lx, ly } => Self {
                center: vec![lx / 2.0, ly / 2.0],
                radius: 0.5 * lx.hypot(ly),
            },
        }
    }

    /// `|B_R^d|` for `d ∈ {1, 2}`.
    pub fn volume(&self, dim: usize) -> f64 {
        match dim {
            1 => 2.0 * self.radius,
            2 => std::f64::consts::PI * self.radius * self.radius,
            _ => unreachable!("only intervals and rectangles are supported"),
        }
    }

    /// Whether grid cell `i` lies entirely inside the ball.
    pub fn contains_cell(&self, domain: &SpectralDomain, i: usize) -> bool {
        let [wx, wy] = domain.cell_widths();
        let slack = self.radius * (1.0 + REL_TOL);
        match domain.kind() {
            DomainKind::Interval { .. } => {
                let lo = i as f64 * wx;
                (lo - self.center[0]).abs() <= slack && (lo + wx - self.center[0]).abs() <= slack
            }
            DomainKind::Rectangle { .. } => {
                let [cx, _] = domain.cells();
                let (ix, iy) = (i % cx, i / cx);
                let (x0, y0) = (ix as f64 * wx, iy as f64 * wy);
                [(x0, y0), (x0 + wx, y0), (x0, y0 + wy), (x0 + wx, y0 + wy)]
                    .iter()
                    .all(|&(x, y)| (x - self.center[0]).hypot(y - self.center[1]) <= slack)
            }
        }
    }
}

/// Union of time cells of `(0, T)`, with prefix counts for interval queries.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMask {
    cells: Vec<bool>,
    horizon: f64,
    prefix: Vec<usize>,
}

impl TimeMask {
    pub fn new(cells: Vec<bool>, horizon: f64) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::invalid("time mask needs at least one cell"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        let mut prefix = Vec::with_capacity(cells.len() + 1);
        prefix.push(0);
        for &c in &cells {
            prefix.push(prefix.last().unwrap() + c as usize);
        }
        Ok(Self { cells, horizon, prefix })
    }

    /// Cells whose span meets `(lo, hi)` on a grid of `n` cells over `(0, T)`.
    pub fn from_interval(n: usize, horizon: f64, lo: f64, hi: f64) -> Result<Self> {
        let dt = horizon / n as f64;
        let cells = (0..n)
            .map(|k| {
                let mid = (k as f64 + 0.5) * dt;
                mid > lo && mid < hi
            })
            .collect();
        Self::new(cells, horizon)
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn cell(&self, k: usize) -> bool {
        self.cells[k]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.cells.len() as f64
    }

    pub fn measure(&self) -> f64 {
        *self.prefix.last().unwrap() as f64 * self.dt()
    }

    pub fn contains(&self, t: f64) -> bool {
        t > 0.0 && t < self.horizon && self.cells[((t / self.dt()) as usize).min(self.cells.len() - 1)]
    }

    /// `|E ∩ (lo, hi)|`, counting partial cells by their overlap.
    pub fn measure_between(&self, lo: f64, hi: f64) -> f64 {
        let dt = self.dt();
        let (lo, hi) = (lo.max(0.0), hi.min(self.horizon));
        if hi <= lo {
            return 0.0;
        }
        let n = self.cells.len();
        let k0 = ((lo / dt).floor() as usize).min(n - 1);
        let k1 = ((hi / dt).floor() as usize).min(n - 1);
        if k0 == k1 {
            return if self.cells[k0] { hi - lo } else { 0.0 };
        }
        let mut total = 0.0;
        if self.cells[k0] {
            total += (k0 + 1) as f64 * dt - lo;
        }
        if self.cells[k1] {
            total += hi - k1 as f64 * dt;
        }
        total + (self.prefix[k1] - self.prefix[k0 + 1]) as f64 * dt
    }

    /// `min_r |E ∩ (ℓ − r, ℓ + r)| / (2r)` over the radius ladder.
    pub fn density_proxy(&self, ell: f64, radii: &[f64]) -> f64 {
        radii
            .iter()
            .map(|&r| self.measure_between(ell - r, ell + r) / (2.0 * r))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Point of `E` maximizing the density proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub time: f64,
    pub proxy: f64,
}

/// A density point of `E` among the cell centers, using `radii` (absolute
/// times) or the default ladder `T/8 … T/64`.
pub fn find_density_point(e: &TimeMask, radii: Option<&[f64]>) -> Result<DensityPoint> {
    if e.measure() == 0.0 {
        return Err(Error::invalid("density point of an empty set"));
    }
    let default: Vec<f64> = DENSITY_RADII.iter().map(|f| f * e.horizon()).collect();
    let radii = radii.unwrap_or(&default);
    let dt = e.dt();
    let mut best = DensityPoint { time: f64::NAN, proxy: f64::NEG_INFINITY };
    for k in (0..e.n_cells()).filter(|&k| e.cell(k)) {
        let t = (k as f64 + 0.5) * dt;
        let proxy = e.density_proxy(t, radii);
        if proxy > best.proxy {
            best = DensityPoint { time: t, proxy };
        }
    }
    if best.proxy < 0.5 {
        return Err(Error::Resolution(format!(
            "best density proxy {:.4} < 1/2; refine the time grid",
            best.proxy
        )));
    }
    Ok(best)
}

/// `μ = √((β + 2) / (β + 1))`.
pub fn mu_from_beta(beta: f64) -> f64 {
    ((beta + 2.0) / (beta + 1.0)).sqrt()
}

/// Decreasing sequence `ℓ_{m+1} = ℓ + μ^{−m}(ℓ_1 − ℓ)` certified on the grid:
/// `ℓ_m − ℓ_{m+1} ≤ 3|E ∩ (ℓ_{m+1}, ℓ_m)|` for `m = 1..=depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySequence {
    pub ell: f64,
    pub ell1: f64,
    pub mu: f64,
    /// `ℓ_1, …, ℓ_{depth+1}` (index 0 holds `ℓ_1`).
    pub terms: Vec<f64>,
    /// `|E ∩ (ℓ_{m+1}, ℓ_m)|` for `m = 1..=depth`.
    pub ring_measures: Vec<f64>,
}

impl DensitySequence {
    pub fn depth(&self) -> usize {
        self.ring_measures.len()
    }

    /// `ℓ_m` with the one-based index used by the recurrence.
    pub fn term(&self, m: usize) -> f64 {
        self.terms[m - 1]
    }

    /// Checks the certificate for a given `ℓ_1`; `None` when some ring fails.
    pub fn certify(e: &TimeMask, ell: f64, ell1: f64, mu: f64, depth: usize) -> Result<Option<Self>> {
        validate_sequence_args(e, ell, mu, depth)?;
        if !(ell1 > ell && ell1 < e.horizon()) {
            return Err(Error::invalid(format!("ℓ_1 = {ell1} must lie in (ℓ, T) = ({ell}, {})", e.horizon())));
        }
        let mut terms = vec![ell1];
        for m in 1..=depth {
            terms.push(ell + mu.powi(-(m as i32)) * (ell1 - ell));
        }
        let mut ring_measures = Vec::with_capacity(depth);
        for m in 0..depth {
            let (hi, lo) = (terms[m], terms[m + 1]);
            let inside = e.measure_between(lo, hi);
            if hi - lo > 3.0 * inside * (1.0 + REL_TOL) {
                return Ok(None);
            }
            ring_measures.push(inside);
        }
        Ok(Some(Self { ell, ell1, mu, terms, ring_measures }))
    }
}

fn validate_sequence_args(e: &TimeMask, ell: f64, mu: f64, depth: usize) -> Result<()> {
    if !(mu > 1.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("μ must exceed 1, got {mu}")));
    }
    if depth < 2 {
        return Err(Error::invalid("depth must be at least 2"));
    }
    if !(ell >= 0.0 && ell < e.horizon()) {
        return Err(Error::invalid(format!("ℓ = {ell} outside [0, T)")));
    }
    Ok(())
}

/// Descending scan `ℓ_1 = T − Δt, T − 2Δt, …` for the first certified
/// sequence. `ℓ` must be a density point of `E` (proxy ≥ 1/2).
pub fn telescoping_sequence(e: &TimeMask, ell: f64, mu: f64, depth: usize) -> Result<DensitySequence> {
    validate_sequence_args(e, ell, mu, depth)?;
    let radii: Vec<f64> = DENSITY_RADII.iter().map(|f| f * e.horizon()).collect();
    let proxy = e.density_proxy(ell, &radii);
    if proxy < 0.5 - REL_TOL {
        return Err(Error::invalid(format!("ℓ = {ell} is not a density point (proxy {proxy:.4})")));
    }
    let dt = e.dt();
    let mut k = 1;
    loop {
        let ell1 = e.horizon() - k as f64 * dt;
        if ell1 <= ell {
            return Err(Error::Resolution(format!(
                "no ℓ_1 in (ℓ, T) certifies depth {depth} on a grid of {} cells",
                e.n_cells()
            )));
        }
        if let Some(seq) = DensitySequence::certify(e, ell, ell1, mu, depth)? {
            return Ok(seq);
        }
        k += 1;
    }
}

/// [`telescoping_sequence`] with `μ = √((β + 2)/(β + 1))`.
pub fn telescoping_sequence_beta(e: &TimeMask, ell: f64, beta: f64, depth: usize) -> Result<DensitySequence> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("β must be positive, got {beta}")));
    }
    telescoping_sequence(e, ell, mu_from_beta(beta), depth)
}

/// Random union of space-time boxes covering at least `min_fraction` of the
/// cylinder, optionally thinned cell by cell with keep-probability `keep`.
pub fn random_space_time_set<R: Rng>(
    domain: &SpectralDomain,
    n_time: usize,
    horizon: f64,
    min_fraction: f64,
    keep: f64,
    rng: &mut R,
) -> Result<SpaceTimeSet> {
    if !(0.0..1.0).contains(&min_fraction) {
        return Err(Error::invalid(format!("min_fraction must lie in [0, 1), got {min_fraction}")));
    }
    let [cx, cy] = domain.cells();
    let n_space = domain.n_cells();
    let mut mask = vec![false; n_space * n_time];
    let target = (min_fraction * (n_space * n_time) as f64).ceil() as usize;
    let mut count = 0;
    let mut boxes = 0;
    while count < target.max(1) || boxes == 0 {
        let span = |rng: &mut R, n: usize| {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            (a.min(b), a.max(b) + 1)
        };
        let (x0, x1) = span(rng, cx);
        let (y0, y1) = span(rng, cy);
        let (t0, t1) = span(rng, n_time);
        for k in t0..t1 {
            for iy in y0..y1 {
                for ix in x0..x1 {
                    let idx = k * n_space + iy * cx + ix;
                    if !mask[idx] && (keep >= 1.0 || rng.random::<f64>() < keep) {
                        mask[idx] = true;
                        count += 1;
                    }
                }
            }
        }
        boxes += 1;
    }
    SpaceTimeSet::new(domain, n_time, horizon, mask)
}
