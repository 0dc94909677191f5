use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conventional::RdiCube;
use crate::error::{Error, Result};
use crate::ops::OpCount;

/// Steering angles and the receiver pairs used for azimuth and elevation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformingGrid {
    /// Radians, strictly increasing, inside `(-pi/2, pi/2)`.
    pub angles: Vec<f64>,
    pub azimuth_pair: (usize, usize),
    pub elevation_pair: (usize, usize),
}

impl Default for BeamformingGrid {
    /// -45 to 45 degrees in 1 degree steps; pairs (1, 3) and (2, 3) as 0-based indices.
    fn default() -> Self {
        BeamformingGrid {
            angles: (-45..=45).map(|d| (d as f64).to_radians()).collect(),
            azimuth_pair: (0, 2),
            elevation_pair: (1, 2),
        }
    }
}

impl BeamformingGrid {
    pub fn new(angles: Vec<f64>, azimuth_pair: (usize, usize), elevation_pair: (usize, usize)) -> Result<Self> {
        let grid = BeamformingGrid {
            angles,
            azimuth_pair,
            elevation_pair,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.angles.is_empty() {
            return Err(Error::Parameter("empty beamforming grid".into()));
        }
        if self.angles.iter().any(|a| !(a.abs() < PI / 2.0)) {
            return Err(Error::Parameter("steering angles must lie strictly inside (-90, 90) degrees".into()));
        }
        if self.angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("steering angles must be strictly increasing".into()));
        }
        for (a, b) in [self.azimuth_pair, self.elevation_pair] {
            if a == b {
                return Err(Error::Parameter(format!("antenna pair ({a}, {b}) repeats a receiver")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.to_degrees()).collect()
    }
}

/// Beamformer response of every frame, row-major `F x A`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformOutput {
    pub azimuth: Vec<f64>,
    pub elevation: Vec<f64>,
    /// `(doppler, range)` bin used per frame, `None` for an all-zero frame.
    pub peaks: Vec<Option<(usize, usize)>>,
}

impl BeamformOutput {
    pub fn empty_frames(&self) -> usize {
        self.peaks.iter().filter(|p| p.is_none()).count()
    }
}

/// Array power `|x_a e^{-j 2 pi d sin t} + x_b|` over the grid for one pair,
/// where `d` is the spacing in wavelengths from `a` to `b` along the axis.
pub fn pair_response(xa: Complex64, xb: Complex64, spacing: f64, angles: &[f64]) -> Vec<f64> {
    angles
        .iter()
        .map(|t| (xa * Complex64::from_polar(1.0, -2.0 * PI * spacing * t.sin()) + xb).norm())
        .collect()
}

pub fn beamform(rdi: &RdiCube, grid: &BeamformingGrid) -> Result<BeamformOutput> {
    beamform_counted(rdi, grid, &mut OpCount::new())
}

/// For each frame the cell with the largest receiver-summed magnitude is
/// selected and both pairs are steered across the grid. A frame without any
/// energy yields zero power and a `None` peak.
pub fn beamform_counted(rdi: &RdiCube, grid: &BeamformingGrid, ops: &mut OpCount) -> Result<BeamformOutput> {
    grid.validate()?;
    let rx = rdi.channels();
    for (a, b) in [grid.azimuth_pair, grid.elevation_pair] {
        if a >= rx || b >= rx {
            return Err(Error::Parameter(format!("antenna pair ({a}, {b}) needs {} receivers", a.max(b) + 1)));
        }
    }
    let pos = &rdi.config().antenna_positions;
    let az_d = pos[grid.azimuth_pair.1][0] - pos[grid.azimuth_pair.0][0];
    let el_d = pos[grid.elevation_pair.1][1] - pos[grid.elevation_pair.0][1];

    let a_len = grid.len();
    let frames = rdi.frames();
    let mut out = BeamformOutput {
        azimuth: vec![0.0; frames * a_len],
        elevation: vec![0.0; frames * a_len],
        peaks: Vec::with_capacity(frames),
    };
    for f in 0..frames {
        let power = rdi.integrated_magnitude(f);
        let (idx, best) = power
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if best <= 0.0 {
            out.peaks.push(None);
            continue;
        }
        let cell = (idx / rdi.range_bins(), idx % rdi.range_bins());
        out.peaks.push(Some(cell));
        let x = |r: usize| rdi.image(f, r).get(cell.0, cell.1);
        let (pa, pe) = (grid.azimuth_pair, grid.elevation_pair);
        out.azimuth[f * a_len..(f + 1) * a_len].copy_from_slice(&pair_response(x(pa.0), x(pa.1), az_d, &grid.angles));
        out.elevation[f * a_len..(f + 1) * a_len].copy_from_slice(&pair_response(x(pe.0), x(pe.1), el_d, &grid.angles));
    }
    let cells = (frames * rx * rdi.doppler_bins() * rdi.range_bins()) as u64;
    ops.muls += 2 * cells;
    ops.adds += 2 * cells;
    ops.transcendentals += cells;
    ops.comparisons += (frames * rdi.doppler_bins() * rdi.range_bins()) as u64;
    // per steering angle and pair: sin + polar, one complex multiply-add, one magnitude
    let steer = (2 * frames * a_len) as u64;
    ops.complex_macs += steer;
    ops.muls += 6 * steer;
    ops.adds += 5 * steer;
    ops.transcendentals += 3 * steer;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argmax(v: &[f64]) -> usize {
        v.iter()
            .enumerate()
            .fold((0, f64::MIN), |a, (i, &x)| if x > a.1 { (i, x) } else { a })
            .0
    }

    #[test]
    fn in_phase_is_broadside() {
        let g = BeamformingGrid::default();
        let p = pair_response(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 0.5, &g.angles);
        assert_eq!(g.degrees()[argmax(&p)].round(), 0.0);
    }

    #[test]
    fn exact_two_element_response() {
        let g = BeamformingGrid::default();
        for deg in [-30.0f64, 20.0, 44.0] {
            let dphi = PI * deg.to_radians().sin();
            let xa = Complex64::from_polar(1.0, dphi + 0.7);
            let xb = Complex64::from_polar(1.0, 0.7);
            let p = pair_response(xa, xb, 0.5, &g.angles);
            assert!((g.degrees()[argmax(&p)] - deg).abs() <= 1.0);
            // closed form 2|cos((dphi - pi sin t) / 2)|
            for (t, v) in g.angles.iter().zip(&p) {
                assert!((v - 2.0 * ((dphi - PI * t.sin()) / 2.0).cos().abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_invariant() {
        let g = BeamformingGrid::default();
        let xa = Complex64::new(0.3, -1.1);
        let xb = Complex64::new(-0.4, 0.2);
        let rot = Complex64::from_polar(1.0, 1.9);
        let a = pair_response(xa, xb, 0.5, &g.angles);
        let b = pair_response(xa * rot, xb * rot, 0.5, &g.angles);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(BeamformingGrid::new(vec![0.1, 0.0], (0, 2), (1, 2)).is_err());
        assert!(BeamformingGrid::new(vec![-PI / 2.0, 0.0], (0, 2), (1, 2)).is_err());
        assert!(BeamformingGrid::new(vec![0.0], (1, 1), (1, 2)).is_err());
        let g = BeamformingGrid::default();
        assert_eq!(g.len(), 91);
        g.validate().unwrap();
    }
}
