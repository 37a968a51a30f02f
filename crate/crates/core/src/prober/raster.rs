//! Complex-line sections rasterized in the `lambda`-plane, with component
//! and hole counts.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MembershipOracle;
use crate::domains::MemberStatus;
use crate::error::{Error, Result};
use crate::point::{CPoint, C64};

/// Largest raster side length.
pub const MAX_RESOLUTION: usize = 2048;

/// Rectangle `[re_min, re_max] x [im_min, im_max]` in the `lambda`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(half_width: f64) -> Self {
        Window {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
        }
    }

    /// Centre of cell `(i, j)` (column `i`, row `j`) of a `res x res` raster.
    pub fn cell_center(&self, res: usize, i: usize, j: usize) -> C64 {
        C64::new(
            self.re_min + (i as f64 + 0.5) * (self.re_max - self.re_min) / res as f64,
            self.im_min + (j as f64 + 0.5) * (self.im_max - self.im_min) / res as f64,
        )
    }
}

/// Counts 4-connected components of the `true` cells and the 8-connected
/// components of the `false` cells that do not touch the frame.
pub fn raster_topology(inside: &[bool], width: usize, height: usize) -> (usize, usize) {
    assert_eq!(inside.len(), width * height);
    let four: &[(isize, isize)] = &[(1, 0), (-1, 0), (0, 1), (0, -1)];
    let eight: &[(isize, isize)] = &[
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    let mut seen = vec![false; inside.len()];
    let mut components = 0;
    let mut holes = 0;
    let mut queue = VecDeque::new();
    for start in 0..inside.len() {
        if seen[start] {
            continue;
        }
        let value = inside[start];
        let steps = if value { four } else { eight };
        let mut touches_frame = false;
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (x, y) = ((idx % width) as isize, (idx / width) as isize);
            if x == 0 || y == 0 || x == width as isize - 1 || y == height as isize - 1 {
                touches_frame = true;
            }
            for (dx, dy) in steps {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                let n = ny as usize * width + nx as usize;
                if !seen[n] && inside[n] == value {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        if value {
            components += 1;
        } else if !touches_frame {
            holes += 1;
        }
    }
    (components, holes)
}

/// Membership raster of `lambda -> basepoint + lambda * direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionMap {
    pub basepoint: CPoint,
    pub direction: CPoint,
    pub window: Window,
    pub resolution: usize,
    /// Row-major statuses, row `j` at imaginary part increasing with `j`.
    pub statuses: Vec<MemberStatus>,
    pub components: usize,
    pub holes: usize,
    /// Cells reported Undetermined; they count as outside for the topology.
    pub undetermined: usize,
}

/// [`SectionMap`] without the raster, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSummary {
    pub basepoint: CPoint,
    pub direction: CPoint,
    pub window: Window,
    pub resolution: usize,
    pub inside_cells: usize,
    pub components: usize,
    pub holes: usize,
    pub undetermined: usize,
}

impl SectionMap {
    pub fn inside(&self) -> Vec<bool> {
        self.statuses
            .iter()
            .map(|s| *s == MemberStatus::Inside)
            .collect()
    }

    pub fn summary(&self) -> SectionSummary {
        SectionSummary {
            basepoint: self.basepoint.clone(),
            direction: self.direction.clone(),
            window: self.window,
            resolution: self.resolution,
            inside_cells: self
                .statuses
                .iter()
                .filter(|s| **s == MemberStatus::Inside)
                .count(),
            components: self.components,
            holes: self.holes,
            undetermined: self.undetermined,
        }
    }

    /// Writes `lambda_re, lambda_im, status` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda_re", "lambda_im", "status"])?;
        let res = self.resolution;
        for j in 0..res {
            for i in 0..res {
                let l = self.window.cell_center(res, i, j);
                let status = serde_json::to_value(self.statuses[j * res + i])?;
                w.write_record([
                    l.re.to_string(),
                    l.im.to_string(),
                    status.as_str().unwrap_or("").to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Rasterizes the section of the domain by the complex line through
/// `basepoint` in direction `direction`.
pub fn line_section_scan<O: MembershipOracle + ?Sized>(
    oracle: &O,
    basepoint: &[C64],
    direction: &[C64],
    window: Window,
    resolution: usize,
) -> Result<SectionMap> {
    if basepoint.len() != oracle.dim() || direction.len() != oracle.dim() {
        return Err(Error::InvalidArgument(
            "basepoint and direction must have the domain's dimension".into(),
        ));
    }
    if direction.iter().all(|d| *d == C64::new(0.0, 0.0)) {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::Budget(format!(
            "raster side must lie in 1..={MAX_RESOLUTION}, got {resolution}"
        )));
    }
    if !(window.re_max > window.re_min && window.im_max > window.im_min) {
        return Err(Error::InvalidArgument(
            "window must have positive extent".into(),
        ));
    }
    let statuses: Vec<MemberStatus> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let l = window.cell_center(resolution, idx % resolution, idx / resolution);
            let x: Vec<C64> = basepoint
                .iter()
                .zip(direction)
                .map(|(b, d)| b + l * d)
                .collect();
            oracle.member(&x)
        })
        .collect::<Result<_>>()?;
    let inside: Vec<bool> = statuses
        .iter()
        .map(|s| *s == MemberStatus::Inside)
        .collect();
    let (components, holes) = raster_topology(&inside, resolution, resolution);
    Ok(SectionMap {
        basepoint: CPoint(basepoint.to_vec()),
        direction: CPoint(direction.to_vec()),
        window,
        resolution,
        undetermined: statuses
            .iter()
            .filter(|s| **s == MemberStatus::Undetermined)
            .count(),
        statuses,
        components,
        holes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisconnectionReport {
    pub lines_scanned: usize,
    /// Lines whose first raster showed several components or a hole.
    pub candidates: usize,
    /// Candidates that kept that property at four times the resolution.
    pub confirmed: Vec<SectionSummary>,
}

/// Scans random complex lines through sampled members; any raster with two
/// or more components or a hole is re-scanned at 4x resolution before it
/// is reported.
pub fn disconnection_search<O: MembershipOracle + ?Sized>(
    oracle: &O,
    lines: usize,
    window: Window,
    resolution: usize,
    seed: u64,
) -> Result<DisconnectionReport> {
    let mut report = DisconnectionReport {
        lines_scanned: 0,
        candidates: 0,
        confirmed: Vec::new(),
    };
    for i in 0..lines as u64 {
        let mut rng = crate::seed::task_rng(seed, i);
        let base = oracle.sample(&mut rng)?;
        let dir = crate::seed::gaussian_point(&mut rng, oracle.dim());
        let map = line_section_scan(oracle, &base, &dir, window, resolution)?;
        report.lines_scanned += 1;
        if map.components >= 2 || map.holes >= 1 {
            report.candidates += 1;
            let fine = line_section_scan(
                oracle,
                &base,
                &dir,
                window,
                (4 * resolution).min(MAX_RESOLUTION),
            )?;
            if fine.components >= 2 || fine.holes >= 1 {
                report.confirmed.push(fine.summary());
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prober::EuclideanBall;

    fn shape<F: Fn(f64, f64) -> bool>(res: usize, f: F) -> Vec<bool> {
        let w = Window::square(1.0);
        (0..res * res)
            .map(|idx| {
                let c = w.cell_center(res, idx % res, idx / res);
                f(c.re, c.im)
            })
            .collect()
    }

    #[test]
    fn synthetic_shapes() {
        let annulus = shape(200, |x, y| (0.3..0.8).contains(&(x * x + y * y).sqrt()));
        assert_eq!(raster_topology(&annulus, 200, 200), (1, 1));
        let two = shape(200, |x, y| {
            (x - 0.5).hypot(y) < 0.3 || (x + 0.5).hypot(y) < 0.3
        });
        assert_eq!(raster_topology(&two, 200, 200), (2, 0));
        let disc = shape(64, |x, y| x.hypot(y) < 0.5);
        assert_eq!(raster_topology(&disc, 64, 64), (1, 0));
        assert_eq!(raster_topology(&[false; 16], 4, 4), (0, 0));
    }

    #[test]
    fn diagonal_touch_is_not_a_connection() {
        // Two cells meeting at a corner: separate for 4-connectivity, and
        // the complement stays connected through the other diagonal.
        let r = [true, false, false, true];
        assert_eq!(raster_topology(&r, 2, 2), (2, 0));
    }

    #[test]
    fn ball_sections() {
        let ball = EuclideanBall {
            dim: 3,
            radius: 1.0,
        };
        let base = vec![C64::new(0.1, 0.0); 3];
        let dir = vec![C64::new(0.3, 0.1), C64::new(0.0, -0.5), C64::new(0.2, 0.2)];
        let map = line_section_scan(&ball, &base, &dir, Window::square(3.0), 64).unwrap();
        assert_eq!((map.components, map.holes), (1, 0));
        assert_eq!(
            map,
            line_section_scan(&ball, &base, &dir, Window::square(3.0), 64).unwrap()
        );
        let mut csv = Vec::new();
        map.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 64 * 64 + 1);
        assert!(text.lines().nth(1).unwrap().ends_with("outside"));
    }

    #[test]
    fn scan_rejects_bad_input() {
        let ball = EuclideanBall {
            dim: 2,
            radius: 1.0,
        };
        let z = vec![C64::new(0.0, 0.0); 2];
        assert!(line_section_scan(&ball, &z, &z, Window::square(1.0), 8).is_err());
        let d = vec![C64::new(1.0, 0.0); 2];
        assert!(matches!(
            line_section_scan(&ball, &z, &d, Window::square(1.0), 4096),
            Err(Error::Budget(_))
        ));
    }
}
