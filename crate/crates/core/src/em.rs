//! Free-space Maxwell dynamics in six-component form.
//!
//! The field is a complex column (E_x, E_y, E_z, -B_x, -B_y, -B_z) on a
//! periodic 1-D grid along z. Time evolution is `d psi / dt = -sum_i
//! beta_i d_i psi`, which reproduces `Edot = curl B, Bdot = -curl E`
//! componentwise. With propagation restricted to z the generator is
//! diagonal per Fourier mode, where it exponentiates in closed form: the
//! hermitian beta_z satisfies beta_z^3 = beta_z, so
//! `exp(-i k dt beta_z) = 1 - i sin(k dt) beta_z + (cos(k dt) - 1) beta_z^2`
//! and every mode evolves by an exact unitary rotation.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::EmError;
use crate::grid::MIN_POINTS;
use crate::potential::Potential;

/// The three 6x6 coupling matrices assembling the curl blocks.
///
/// Each is real with entries in {-1, 0, 1} and symmetric (hermitian), with
/// `[[0, L_i], [-L_i, 0]]` block structure where `(L_i)_{ab} = -eps_{iab}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaMatrices {
    pub x: [[f64; 6]; 6],
    pub y: [[f64; 6]; 6],
    pub z: [[f64; 6]; 6],
}

/// The curl generator (L_i)_{ab} = -eps_{iab}, so curl = sum_i L_i d_i.
fn curl_block(i: usize) -> [[f64; 3]; 3] {
    let eps = |a: usize, b: usize, c: usize| -> f64 {
        match (a, b, c) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut m = [[0.0; 3]; 3];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = -eps(i, a, b);
        }
    }
    m
}

fn beta(i: usize) -> [[f64; 6]; 6] {
    let l = curl_block(i);
    let mut m = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            m[a][3 + b] = l[a][b];
            m[3 + a][b] = -l[a][b];
        }
    }
    m
}

/// Build the coupling matrices.
pub fn beta_matrices() -> BetaMatrices {
    BetaMatrices {
        x: beta(0),
        y: beta(1),
        z: beta(2),
    }
}

impl BetaMatrices {
    pub fn by_index(&self, i: usize) -> &[[f64; 6]; 6] {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis index {i} out of range"),
        }
    }
}

pub fn mat_mul(a: &[[f64; 6]; 6], b: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for r in 0..6 {
        for c in 0..6 {
            out[r][c] = (0..6).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn mat_sub(a: &[[f64; 6]; 6], b: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for r in 0..6 {
        for c in 0..6 {
            out[r][c] = a[r][c] - b[r][c];
        }
    }
    out
}

pub fn commutator(a: &[[f64; 6]; 6], b: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

/// Periodic 1-D spatial grid on [0, L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    n_z: usize,
    length: f64,
}

impl SpatialGrid {
    pub fn new(n_z: usize, length: f64) -> Result<Self, EmError> {
        if n_z < MIN_POINTS {
            return Err(EmError::TooFewPoints(n_z));
        }
        if n_z % 2 != 0 {
            return Err(EmError::OddSize(n_z));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(EmError::BadLength(length));
        }
        Ok(SpatialGrid { n_z, length })
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dz(&self) -> f64 {
        self.length / self.n_z as f64
    }

    pub fn z_at(&self, j: usize) -> f64 {
        j as f64 * self.dz()
    }

    /// Signed wavenumber of Fourier mode index `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        let dk = std::f64::consts::TAU / self.length;
        if k < self.n_z / 2 {
            k as f64 * dk
        } else {
            (k as f64 - self.n_z as f64) * dk
        }
    }
}

/// Six complex field components per grid point, stored as rows
/// (component, z) so each component is FFT-contiguous. Component order is
/// (E_x, E_y, E_z, -B_x, -B_y, -B_z).
#[derive(Debug, Clone, PartialEq)]
pub struct EmState {
    grid: SpatialGrid,
    field: Array2<Complex64>,
}

impl EmState {
    pub fn new(grid: SpatialGrid, field: Array2<Complex64>) -> Result<Self, EmError> {
        if field.dim() != (6, grid.n_z()) {
            return Err(EmError::LengthMismatch {
                expected: grid.n_z(),
                found: field.dim().1,
            });
        }
        let s = EmState { grid, field };
        s.check_finite()?;
        Ok(s)
    }

    /// Build from closures for E and B over z; the B components are stored
    /// negated.
    pub fn from_fields<FE, FB>(grid: SpatialGrid, e: FE, b: FB) -> Self
    where
        FE: Fn(f64) -> [Complex64; 3],
        FB: Fn(f64) -> [Complex64; 3],
    {
        let mut field = Array2::zeros((6, grid.n_z()));
        for j in 0..grid.n_z() {
            let z = grid.z_at(j);
            let ev = e(z);
            let bv = b(z);
            for c in 0..3 {
                field[(c, j)] = ev[c];
                field[(3 + c, j)] = -bv[c];
            }
        }
        EmState { grid, field }
    }

    /// Transverse plane-wave pair E = x cos(k z), B = y cos(k z) for mode
    /// number `mode` (k = 2 pi mode / L).
    pub fn plane_wave(grid: SpatialGrid, mode: usize, amplitude: f64) -> Self {
        let k = std::f64::consts::TAU * mode as f64 / grid.length();
        EmState::from_fields(
            grid,
            |z| {
                [
                    Complex64::from(amplitude * (k * z).cos()),
                    Complex64::from(0.0),
                    Complex64::from(0.0),
                ]
            },
            |z| {
                [
                    Complex64::from(0.0),
                    Complex64::from(amplitude * (k * z).cos()),
                    Complex64::from(0.0),
                ]
            },
        )
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn field(&self) -> &Array2<Complex64> {
        &self.field
    }

    pub fn field_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.field
    }

    pub fn e_at(&self, j: usize) -> [Complex64; 3] {
        [self.field[(0, j)], self.field[(1, j)], self.field[(2, j)]]
    }

    pub fn b_at(&self, j: usize) -> [Complex64; 3] {
        [-self.field[(3, j)], -self.field[(4, j)], -self.field[(5, j)]]
    }

    pub fn check_finite(&self) -> Result<(), EmError> {
        if self
            .field
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            Ok(())
        } else {
            Err(EmError::NonFinite)
        }
    }

    /// rho = psi^dagger psi summed over components, per grid point.
    pub fn energy_density(&self) -> Vec<f64> {
        (0..self.grid.n_z())
            .map(|j| (0..6).map(|c| self.field[(c, j)].norm_sqr()).sum())
            .collect()
    }

    /// Total energy: integral of psi^dagger psi over z.
    pub fn energy(&self) -> f64 {
        self.energy_density().iter().sum::<f64>() * self.grid.dz()
    }
}

/// Propagate by `dt` (any sign) with the exact per-mode rotation.
pub fn em_step(s: &EmState, dt: f64) -> Result<EmState, EmError> {
    s.check_finite()?;
    if !dt.is_finite() {
        return Err(EmError::NonFinite);
    }
    let n = s.grid.n_z();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut spectra: Vec<Vec<Complex64>> = (0..6)
        .map(|c| {
            let mut lane: Vec<Complex64> =
                s.field.row(c).iter().copied().collect();
            fft.process(&mut lane);
            lane
        })
        .collect();

    // exp(-i k dt beta_z) mixes (1,5) and (2,4); components 3 and 6 are in
    // the kernel of beta_z and stay put
    for k in 0..n {
        let th = s.grid.wavenumber(k) * dt;
        let (sin, cos) = th.sin_cos();
        let i_sin = Complex64::new(0.0, sin);
        let a = spectra[0][k];
        let e = spectra[4][k];
        spectra[0][k] = a * cos + i_sin * e;
        spectra[4][k] = e * cos + i_sin * a;
        let b = spectra[1][k];
        let d = spectra[3][k];
        spectra[1][k] = b * cos - i_sin * d;
        spectra[3][k] = d * cos - i_sin * b;
    }

    let scale = Complex64::from(1.0 / n as f64);
    let mut field = Array2::zeros((6, n));
    for (c, lane) in spectra.iter_mut().enumerate() {
        inv.process(lane);
        for (j, v) in lane.iter().enumerate() {
            field[(c, j)] = v * scale;
        }
    }
    EmState::new(s.grid, field)
}

/// Classical fourth-order Runge-Kutta integration of the componentwise
/// Maxwell equations with a spectral curl. Exists as an independent
/// reference for [`em_step`]; converges to it at fourth order in dt.
pub fn maxwell_rk4_oracle(s: &EmState, dt: f64, steps: usize) -> Result<EmState, EmError> {
    s.check_finite()?;
    let n = s.grid.n_z();
    let grid = s.grid;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    // spectral d/dz of one component lane
    let d_dz = |lane: &[Complex64]| -> Vec<Complex64> {
        let mut buf = lane.to_vec();
        fft.process(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            let mul = if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, grid.wavenumber(k))
            };
            *v *= mul;
        }
        inv.process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter().map(|v| v * scale).collect()
    };

    // time derivative of (E, -B) under Edot = curl B, Bdot = -curl E with
    // d_x = d_y = 0
    let rhs = |f: &Array2<Complex64>| -> Array2<Complex64> {
        let ex: Vec<Complex64> = f.row(0).to_vec();
        let ey: Vec<Complex64> = f.row(1).to_vec();
        let nbx: Vec<Complex64> = f.row(3).to_vec();
        let nby: Vec<Complex64> = f.row(4).to_vec();
        let dz_ex = d_dz(&ex);
        let dz_ey = d_dz(&ey);
        let dz_bx: Vec<Complex64> = d_dz(&nbx).iter().map(|v| -v).collect();
        let dz_by: Vec<Complex64> = d_dz(&nby).iter().map(|v| -v).collect();
        let mut out = Array2::zeros((6, n));
        for j in 0..n {
            out[(0, j)] = -dz_by[j]; // Edot_x = -dz B_y
            out[(1, j)] = dz_bx[j]; // Edot_y = dz B_x
            // Bdot_x = dz E_y, Bdot_y = -dz E_x; rows store -B
            out[(3, j)] = -dz_ey[j];
            out[(4, j)] = dz_ex[j];
        }
        out
    };

    let mut f = s.field.clone();
    for _ in 0..steps {
        let k1 = rhs(&f);
        let k2 = rhs(&(&f + &(&k1 * Complex64::from(dt / 2.0))));
        let k3 = rhs(&(&f + &(&k2 * Complex64::from(dt / 2.0))));
        let k4 = rhs(&(&f + &(&k3 * Complex64::from(dt))));
        f = &f
            + &((&k1 + &(&k2 * Complex64::from(2.0)) + &(&k3 * Complex64::from(2.0)) + &k4)
                * Complex64::from(dt / 6.0));
    }
    EmState::new(grid, f)
}

/// Energy, flux and divergence summary of one field configuration.
#[derive(Debug, Clone)]
pub struct EmDiagnostics {
    pub energy: f64,
    /// Re E x Re B + Im E x Im B per grid point; equal to E x B for real
    /// fields and to half the pairing psi^dagger beta_i psi that closes the
    /// energy continuity law.
    pub poynting: Vec<[f64; 3]>,
    /// max |spectral d_z E_z| over the grid.
    pub div_e: f64,
    /// max |spectral d_z B_z| over the grid.
    pub div_b: f64,
}

/// The flux pairing psi^dagger beta_i psi per grid point. This is the exact
/// conjugate of the energy density rho = psi^dagger psi: the continuity law
/// `d rho / dt + d_z S_z = 0` holds with this S.
pub fn flux_pairing(s: &EmState) -> Vec<[f64; 3]> {
    let betas = beta_matrices();
    (0..s.grid.n_z())
        .map(|j| {
            let psi: Vec<Complex64> = (0..6).map(|c| s.field[(c, j)]).collect();
            let mut out = [0.0; 3];
            for (i, o) in out.iter_mut().enumerate() {
                let m = betas.by_index(i);
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, mr) in m.iter().enumerate() {
                    for (c, &w) in mr.iter().enumerate() {
                        if w != 0.0 {
                            acc += psi[r].conj() * w * psi[c];
                        }
                    }
                }
                *o = acc.re;
            }
            out
        })
        .collect()
}

pub fn diagnostics(s: &EmState) -> EmDiagnostics {
    let n = s.grid.n_z();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let div_norm = |lane: Vec<Complex64>| -> f64 {
        let mut buf = lane;
        fft.process(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            let mul = if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, s.grid.wavenumber(k))
            };
            *v *= mul;
        }
        inv.process(&mut buf);
        buf.iter().map(|v| v.norm() / n as f64).fold(0.0, f64::max)
    };

    let poynting = flux_pairing(s)
        .into_iter()
        .map(|v| [0.5 * v[0], 0.5 * v[1], 0.5 * v[2]])
        .collect();

    EmDiagnostics {
        energy: s.energy(),
        poynting,
        div_e: div_norm(s.field.row(2).to_vec()),
        div_b: div_norm(s.field.row(5).iter().map(|v| -v).collect()),
    }
}

/// L-infinity residual of the energy continuity law along a trajectory of
/// uniformly spaced snapshots: central difference of rho in time plus the
/// spectral divergence of the flux pairing.
pub fn poynting_continuity_residual(
    snapshots: &[EmState],
    dt: f64,
) -> Result<f64, EmError> {
    if snapshots.len() < 3 {
        return Err(EmError::TooFewSnapshots(snapshots.len()));
    }
    let grid = snapshots[0].grid;
    for s in snapshots {
        if s.grid != grid {
            return Err(EmError::GridMismatch);
        }
    }
    let n = grid.n_z();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let densities: Vec<Vec<f64>> = snapshots.iter().map(|s| s.energy_density()).collect();
    let mut max_res: f64 = 0.0;
    for i in 1..snapshots.len() - 1 {
        let sz: Vec<Complex64> = flux_pairing(&snapshots[i])
            .iter()
            .map(|v| Complex64::from(v[2]))
            .collect();
        let mut buf = sz;
        fft.process(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            let mul = if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, grid.wavenumber(k))
            };
            *v *= mul;
        }
        inv.process(&mut buf);
        for j in 0..n {
            let drho = (densities[i + 1][j] - densities[i - 1][j]) / (2.0 * dt);
            let div_s = buf[j].re / n as f64;
            max_res = max_res.max((drho + div_s).abs());
        }
    }
    Ok(max_res)
}

/// One transverse mode mapped onto a classical oscillator: the magnetic
/// amplitude is the coordinate and the electric amplitude the conjugate
/// momentum, oscillating at omega = k. At k = 1 the oscillator trajectory
/// reproduces the mode amplitudes exactly; for other k the momentum
/// carries the usual (q, p/omega) scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOscillator {
    pub q: f64,
    pub p: f64,
    pub potential: Potential,
}

pub fn mode_to_oscillator(
    e_amp: Complex64,
    b_amp: Complex64,
    k: f64,
) -> Result<ModeOscillator, EmError> {
    if !(k.is_finite() && k > 0.0) {
        return Err(EmError::LongitudinalMode(k));
    }
    Ok(ModeOscillator {
        q: b_amp.re,
        p: e_amp.re,
        potential: Potential::harmonic(k),
    })
}
